"""Quasi-uniform directions on the unit sphere and suprema of 0-homogeneous functions.

Suprema over an indicatrix are computed on Euclidean unit vectors: for a
0-homogeneous ratio (for instance xi(y)/F(y)) the sup over the indicatrix and
over the Euclidean sphere coincide.  The search is dense sampling followed by
a safeguarded Newton ascent in tangent coordinates with finite-difference
derivatives.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

N_DIRECTIONS = 2048
ASCENT_STEPS = 20


def directions(n: int, count: int = N_DIRECTIONS) -> np.ndarray:
    """Deterministic quasi-uniform unit vectors, shape (count, n)."""
    if n == 2:
        t = 2 * np.pi * np.arange(count) / count
        return np.stack([np.cos(t), np.sin(t)], axis=-1)
    if n == 3:
        k = np.arange(count) + 0.5
        z = 1 - 2 * k / count
        phi = np.pi * (1 + 5 ** 0.5) * k
        s = np.sqrt(1 - z * z)
        return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=-1)
    from scipy.stats import norm, qmc

    pts = qmc.Sobol(n, scramble=True, seed=12345).random(count)
    g = norm.ppf(np.clip(pts, 1e-12, 1 - 1e-12))
    return g / np.linalg.norm(g, axis=-1, keepdims=True)


def tangent_basis(u: np.ndarray) -> np.ndarray:
    """Orthonormal basis of the tangent space at unit vectors u: shape (..., n-1, n)."""
    n = u.shape[-1]
    if n == 2:
        return np.stack([-u[..., 1], u[..., 0]], axis=-1)[..., None, :]
    eye = np.eye(n)
    pick = np.argmin(np.abs(u), axis=-1)
    basis = []
    v = eye[pick] - u * np.take_along_axis(u, pick[..., None], -1)
    v /= np.linalg.norm(v, axis=-1, keepdims=True)
    basis.append(v)
    for _ in range(n - 2):
        w = np.zeros_like(u)
        # next vector: Gram-Schmidt of the coordinate vector least aligned so far
        best = None
        for e in eye:
            cand = e - u * (u @ e)[..., None]
            for b in basis:
                cand = cand - b * np.sum(cand * b, -1, keepdims=True)
            nrm = np.linalg.norm(cand, axis=-1, keepdims=True)
            if best is None:
                best, bestn = cand, nrm
            else:
                take = nrm > bestn
                best = np.where(take, cand, best)
                bestn = np.where(take, nrm, bestn)
        w = best / bestn
        basis.append(w)
    return np.stack(basis, axis=-2)


def _move(u, basis, s):
    v = u + np.einsum("...a,...an->...n", s, basis)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


@dataclass
class SupResult:
    value: np.ndarray
    argmax: np.ndarray
    residual: np.ndarray


def sup_on_sphere(func: Callable[[np.ndarray], np.ndarray], n: int, batch_shape=(),
                  count: int = N_DIRECTIONS, steps: int = ASCENT_STEPS,
                  fd_step: float = 1e-4) -> SupResult:
    """Maximise ``func`` over unit vectors, independently for each batch entry.

    ``func`` receives unit vectors of shape ``batch_shape + (m, n)`` and returns
    values of shape ``batch_shape + (m,)``.
    """
    dirs = directions(n, count)
    U = np.broadcast_to(dirs, tuple(batch_shape) + dirs.shape)
    vals = np.asarray(func(U))
    best = np.argmax(vals, axis=-1)
    u = np.take_along_axis(U, best[..., None, None], -2)[..., 0, :]
    f0 = np.take_along_axis(vals, best[..., None], -1)[..., 0]

    k = n - 1
    h = fd_step
    grad = np.zeros(tuple(batch_shape) + (k,))
    for _ in range(steps):
        basis = tangent_basis(u)
        # central-difference gradient and Hessian in tangent coordinates
        offs = [np.zeros(k)]
        for a in range(k):
            e = np.zeros(k)
            e[a] = h
            offs += [e, -e]
        for a in range(k):
            for b in range(a + 1, k):
                for sa in (1, -1):
                    for sb in (1, -1):
                        e = np.zeros(k)
                        e[a], e[b] = sa * h, sb * h
                        offs.append(e)
        S = np.stack(offs)
        pts = _move(u[..., None, :], basis[..., None, :, :], np.broadcast_to(S, u.shape[:-1] + S.shape))
        fv = np.asarray(func(pts))
        fc = fv[..., 0]
        hess = np.zeros(tuple(batch_shape) + (k, k))
        for a in range(k):
            fp, fm = fv[..., 1 + 2 * a], fv[..., 2 + 2 * a]
            grad[..., a] = (fp - fm) / (2 * h)
            hess[..., a, a] = (fp - 2 * fc + fm) / h ** 2
        idx = 1 + 2 * k
        for a in range(k):
            for b in range(a + 1, k):
                fpp, fpm, fmp, fmm = (fv[..., idx + j] for j in range(4))
                idx += 4
                hess[..., a, b] = hess[..., b, a] = (fpp - fpm - fmp + fmm) / (4 * h * h)
        # Newton step where the model is concave, gradient step otherwise
        eig = np.linalg.eigvalsh(hess)
        concave = np.all(eig < 0, axis=-1)
        safe_hess = np.where(concave[..., None, None], hess, -np.eye(k))
        step = -np.linalg.solve(safe_hess, grad[..., None])[..., 0]
        nrm = np.linalg.norm(step, axis=-1, keepdims=True)
        step = np.where(nrm > 0.1, step * 0.1 / np.maximum(nrm, 1e-300), step)
        improved = np.zeros(fc.shape, dtype=bool)
        cand_u = u
        cand_f = fc
        for _ls in range(8):
            trial = _move(u, basis, step)
            ft = np.asarray(func(trial[..., None, :]))[..., 0]
            ok = (ft >= fc) & ~improved
            cand_u = np.where(ok[..., None], trial, cand_u)
            cand_f = np.where(ok, ft, cand_f)
            improved |= ok
            if improved.all():
                break
            step = step * 0.5
        u, f0 = cand_u, cand_f
        if np.max(np.abs(grad)) < 1e-13:
            break
    return SupResult(value=f0, argmax=u, residual=np.linalg.norm(grad, axis=-1))
