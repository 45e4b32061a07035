"""Truncated multivariate Taylor arithmetic ("jets") and derivative queries.

A :class:`Jet` carries the Taylor coefficients of a scalar quantity in ``nvar``
perturbation variables, truncated at total degree ``order``.  Coefficients are
stored in graded order, so truncating to a lower order is a prefix slice, and
every coefficient may carry trailing batch dimensions that broadcast like
numpy arrays.  Chart functions (metrics, densities, scalar fields) are written
against the small set of elementary functions exported here, so the same code
runs on plain floats, on numpy arrays and on jets.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import UnsupportedOrderError

MAX_ORDER = 4


class _Table:
    """Monomial bookkeeping for one (nvar, order) pair."""

    def __init__(self, nvar: int, order: int):
        self.nvar = nvar
        self.order = order
        monos = []
        for d in range(order + 1):
            for combo in itertools.combinations_with_replacement(range(nvar), d):
                alpha = [0] * nvar
                for v in combo:
                    alpha[v] += 1
                monos.append(tuple(alpha))
        self.monos = monos
        self.index = {m: i for i, m in enumerate(monos)}
        self.size = len(monos)
        self.degree = np.array([sum(m) for m in monos])
        self.factorial = np.array(
            [math.prod(math.factorial(a) for a in m) for m in monos], dtype=float)

        triples = []
        for i, a in enumerate(monos):
            for j, b in enumerate(monos):
                if self.degree[i] + self.degree[j] <= order:
                    k = self.index[tuple(p + q for p, q in zip(a, b))]
                    triples.append((k, i, j))
        triples.sort()
        tr = np.array(triples, dtype=np.intp).reshape(-1, 3)
        self.mul_i = tr[:, 1]
        self.mul_j = tr[:, 2]
        self.mul_starts = np.searchsorted(tr[:, 0], np.arange(self.size))

    @functools.cached_property
    def diff_maps(self):
        """Per variable: (source index, factor) arrays mapping into order-1."""
        if self.order == 0:
            return None
        lower = table(self.nvar, self.order - 1)
        maps = []
        for v in range(self.nvar):
            src = np.empty(lower.size, dtype=np.intp)
            fac = np.empty(lower.size)
            for i, beta in enumerate(lower.monos):
                up = list(beta)
                up[v] += 1
                src[i] = self.index[tuple(up)]
                fac[i] = up[v]
            maps.append((src, fac))
        return maps

    @functools.lru_cache(maxsize=None)
    def tensor_map(self, k: int):
        """Flat coefficient indices and factors for the full k-th derivative tensor."""
        idx = []
        fac = []
        for combo in itertools.product(range(self.nvar), repeat=k):
            alpha = [0] * self.nvar
            for v in combo:
                alpha[v] += 1
            alpha = tuple(alpha)
            i = self.index[alpha]
            idx.append(i)
            fac.append(self.factorial[i])
        return np.array(idx, dtype=np.intp), np.array(fac)


@functools.lru_cache(maxsize=None)
def table(nvar: int, order: int) -> _Table:
    return _Table(nvar, order)


class Jet:
    """Truncated Taylor polynomial in ``nvar`` variables up to ``order``."""

    __array_ufunc__ = None
    __slots__ = ("c", "nvar", "order")

    def __init__(self, coeffs, nvar: int, order: int):
        self.c = np.asarray(coeffs, dtype=float)
        self.nvar = nvar
        self.order = order

    # construction -------------------------------------------------------
    @classmethod
    def constant(cls, value, nvar: int, order: int) -> "Jet":
        value = np.asarray(value, dtype=float)
        c = np.zeros((table(nvar, order).size,) + value.shape)
        c[0] = value
        return cls(c, nvar, order)

    @property
    def value(self):
        return self.c[0]

    @property
    def batch_shape(self):
        return self.c.shape[1:]

    def __repr__(self):
        return f"Jet(nvar={self.nvar}, order={self.order}, value={self.c[0]!r})"

    # structure ------------------------------------------------------------
    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        return Jet(self.c[: table(self.nvar, order).size], self.nvar, order)

    def diff(self, var: int) -> "Jet":
        """Exact partial derivative in ``var``; the result has order - 1."""
        if self.order == 0:
            raise UnsupportedOrderError("cannot differentiate an order-0 jet")
        src, fac = table(self.nvar, self.order).diff_maps[var]
        fac = fac.reshape((-1,) + (1,) * len(self.batch_shape))
        return Jet(self.c[src] * fac, self.nvar, self.order - 1)

    def partial(self, alpha: Sequence[int]):
        tab = table(self.nvar, self.order)
        i = tab.index[tuple(alpha)]
        return self.c[i] * tab.factorial[i]

    def derivative_tensor(self, k: int):
        """All k-th partials, derivative axes last: shape batch + (nvar,)*k."""
        if k > self.order:
            raise UnsupportedOrderError(f"jet of order {self.order} has no order-{k} data")
        idx, fac = table(self.nvar, self.order).tensor_map(k)
        flat = self.c[idx] * fac.reshape((-1,) + (1,) * len(self.batch_shape))
        t = flat.reshape((self.nvar,) * k + self.batch_shape)
        return np.moveaxis(t, tuple(range(k)), tuple(range(-k, 0)))

    def gradient(self):
        return self.derivative_tensor(1)

    def hessian(self):
        return self.derivative_tensor(2)

    def __getitem__(self, key):
        if not isinstance(key, tuple):
            key = (key,)
        return Jet(self.c[(slice(None),) + key], self.nvar, self.order)

    def sum(self, axis):
        axis = axis + 1 if axis >= 0 else axis
        return Jet(self.c.sum(axis=axis), self.nvar, self.order)

    def mean(self, axis):
        axis = axis + 1 if axis >= 0 else axis
        return Jet(self.c.mean(axis=axis), self.nvar, self.order)

    # arithmetic -----------------------------------------------------------
    def _align(self, other: "Jet"):
        if other.nvar != self.nvar:
            raise ValueError("jets over different variable sets cannot be combined")
        order = min(self.order, other.order)
        n = table(self.nvar, order).size
        return self.c[:n], other.c[:n], order

    def __add__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._align(other)
            return Jet(a + b, self.nvar, order)
        other = np.asarray(other, dtype=float)
        shape = np.broadcast_shapes(self.batch_shape, other.shape)
        c = np.array(np.broadcast_to(self.c, self.c.shape[:1] + shape))
        c[0] += other
        return Jet(c, self.nvar, self.order)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.c, self.nvar, self.order)

    def __pos__(self):
        return self

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b, order = self._align(other)
            tab = table(self.nvar, order)
            if tab.size == 1:
                return Jet(a * b, self.nvar, order)
            prod = a[tab.mul_i] * b[tab.mul_j]
            return Jet(np.add.reduceat(prod, tab.mul_starts, axis=0), self.nvar, order)
        other = np.asarray(other, dtype=float)
        return Jet(self.c * other, self.nvar, self.order)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * reciprocal(other)
        return self * (1.0 / np.asarray(other, dtype=float))

    def __rtruediv__(self, other):
        return reciprocal(self) * other

    def __pow__(self, p):
        if isinstance(p, int) and p >= 0:
            out = 1.0
            base = self
            while p:
                if p & 1:
                    out = base * out
                p >>= 1
                if p:
                    base = base * base
            return out if isinstance(out, Jet) else Jet.constant(
                np.ones(self.batch_shape), self.nvar, self.order)
        return power(self, p)


def _compose(a: Jet, coeffs) -> Jet:
    """Evaluate sum_k coeffs[k] * (a - a0)**k with Horner's rule."""
    h = Jet(a.c.copy(), a.nvar, a.order)
    h.c[0] = 0.0
    res = coeffs[a.order]
    for k in range(a.order - 1, -1, -1):
        res = h * res + coeffs[k]
    if not isinstance(res, Jet):
        res = Jet.constant(res, a.nvar, a.order)
    return res


def power(a, p: float):
    if not isinstance(a, Jet):
        return np.power(a, p)
    a0 = a.c[0]
    coeffs = []
    binom = 1.0
    for k in range(a.order + 1):
        coeffs.append(binom * a0 ** (p - k))
        binom *= (p - k) / (k + 1)
    return _compose(a, coeffs)


def reciprocal(a):
    if not isinstance(a, Jet):
        return 1.0 / np.asarray(a, dtype=float)
    inv = 1.0 / a.c[0]
    coeffs = [inv]
    for _ in range(a.order):
        coeffs.append(-coeffs[-1] * inv)
    return _compose(a, coeffs)


def sqrt(a):
    if not isinstance(a, Jet):
        return np.sqrt(a)
    return power(a, 0.5)


def exp(a):
    if not isinstance(a, Jet):
        return np.exp(a)
    e = np.exp(a.c[0])
    return _compose(a, [e / math.factorial(k) for k in range(a.order + 1)])


def log(a):
    if not isinstance(a, Jet):
        return np.log(a)
    a0 = a.c[0]
    coeffs = [np.log(a0)]
    for k in range(1, a.order + 1):
        coeffs.append((-1) ** (k + 1) / (k * a0 ** k))
    return _compose(a, coeffs)


def sin(a):
    if not isinstance(a, Jet):
        return np.sin(a)
    s, c = np.sin(a.c[0]), np.cos(a.c[0])
    cycle = [s, c, -s, -c]
    return _compose(a, [cycle[k % 4] / math.factorial(k) for k in range(a.order + 1)])


def cos(a):
    if not isinstance(a, Jet):
        return np.cos(a)
    s, c = np.sin(a.c[0]), np.cos(a.c[0])
    cycle = [c, -s, -c, s]
    return _compose(a, [cycle[k % 4] / math.factorial(k) for k in range(a.order + 1)])


def sinh(a):
    if not isinstance(a, Jet):
        return np.sinh(a)
    return 0.5 * (exp(a) - exp(-a))


def cosh(a):
    if not isinstance(a, Jet):
        return np.cosh(a)
    return 0.5 * (exp(a) + exp(-a))


def arctanh(a):
    if not isinstance(a, Jet):
        return np.arctanh(a)
    return 0.5 * (log(1.0 + a) - log(1.0 - a))


def value_of(a):
    return a.c[0] if isinstance(a, Jet) else np.asarray(a, dtype=float)


def dot(u, v):
    out = u[0] * v[0]
    for a, b in zip(u[1:], v[1:]):
        out = out + a * b
    return out


def seed(values: Sequence, order: int) -> list[Jet]:
    """One jet per value, each the identity in its own variable."""
    m = len(values)
    tab = table(m, order)
    arrays = np.broadcast_arrays(*[np.asarray(v, dtype=float) for v in values])
    out = []
    for i, v in enumerate(arrays):
        c = np.zeros((tab.size,) + v.shape)
        c[0] = v
        if order >= 1:
            e = [0] * m
            e[i] = 1
            c[tab.index[tuple(e)]] = 1.0
        out.append(Jet(c, m, order))
    return out


# jet matrices (lists of lists of jets) -----------------------------------

def mat_inv(a):
    """Inverse of a small matrix of jets/arrays by Gauss-Jordan without pivoting.

    Only used for positive-definite fundamental tensors, where the leading
    pivots are positive.
    """
    n = len(a)
    if n == 2:
        det = a[0][0] * a[1][1] - a[0][1] * a[1][0]
        r = reciprocal(det)
        return [[a[1][1] * r, -a[0][1] * r], [-a[1][0] * r, a[0][0] * r]]
    m = [list(row) + [1.0 if i == j else 0.0 for j in range(n)] for i, row in enumerate(a)]
    for k in range(n):
        r = reciprocal(m[k][k])
        m[k] = [e * r for e in m[k]]
        for i in range(n):
            if i == k:
                continue
            f = m[i][k]
            m[i] = [e - f * p for e, p in zip(m[i], m[k])]
    return [row[n:] for row in m]


def mat_det(a):
    n = len(a)
    if n == 1:
        return a[0][0]
    if n == 2:
        return a[0][0] * a[1][1] - a[0][1] * a[1][0]
    if n == 3:
        return (a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1])
                - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
                + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]))
    det = 0.0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        det = det + (-1) ** j * a[0][j] * mat_det(minor)
    return det


# derivative queries -------------------------------------------------------

@dataclass(frozen=True)
class MultiIndex:
    """Differentiation orders per coordinate, split into x- and y-blocks."""

    x: tuple
    y: tuple

    def __post_init__(self):
        if len(self.x) != len(self.y):
            raise ValueError("x- and y-blocks must have the same length")
        if any(o < 0 for o in self.x + self.y):
            raise ValueError("multi-index entries must be nonnegative")

    @classmethod
    def of(cls, n: int, x: Sequence[int] = (), y: Sequence[int] = ()) -> "MultiIndex":
        """Build from lists of variable indices, e.g. ``of(2, y=[0, 0, 1])``."""
        ox, oy = [0] * n, [0] * n
        for i in x:
            ox[i] += 1
        for i in y:
            oy[i] += 1
        return cls(tuple(ox), tuple(oy))

    @property
    def degree(self) -> int:
        return sum(self.x) + sum(self.y)

    @property
    def n(self) -> int:
        return len(self.x)

    def orders(self):
        return self.x + self.y


ChartFunction = Callable[[Sequence, Sequence], object]


def _check_args(f, x, y, idx: MultiIndex, nonzero_y: bool):
    from .errors import DomainError

    if idx.degree > MAX_ORDER:
        raise UnsupportedOrderError(f"derivative order {idx.degree} exceeds {MAX_ORDER}")
    if idx.degree < 1:
        raise ValueError("derivative queries need total degree >= 1")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != (idx.n,) or y.shape != (idx.n,):
        raise ValueError("point, vector and multi-index dimensions disagree")
    if nonzero_y and not np.any(y):
        raise DomainError("metric-type functions are not differentiable at y = 0")
    return x, y


def derive(f: ChartFunction, x, y, idx: MultiIndex, nonzero_y: bool = False) -> float:
    """Exact partial derivative of ``f(x, y)`` selected by ``idx``."""
    x, y = _check_args(f, x, y, idx, nonzero_y)
    orders = idx.orders()
    active = [k for k, o in enumerate(orders) if o > 0]
    base = list(x) + list(y)
    jets = seed([base[k] for k in active], idx.degree)
    args = list(base)
    for k, jet in zip(active, jets):
        args[k] = jet
    n = idx.n
    out = f(args[:n], args[n:])
    if not isinstance(out, Jet):
        return 0.0
    return float(out.partial([orders[k] for k in active]))


def jet_value(f: ChartFunction, x, y, order: int) -> dict:
    """All partials of ``f`` up to ``order`` at (x, y), keyed by MultiIndex.

    The zero multi-index maps to the function value.
    """
    if order > MAX_ORDER:
        raise UnsupportedOrderError(f"derivative order {order} exceeds {MAX_ORDER}")
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    n = len(x)
    jets = seed(list(x) + list(y), order)
    out = f(jets[:n], jets[n:])
    tab = table(2 * n, order)
    res = {}
    for i, alpha in enumerate(tab.monos):
        val = out.c[i] * tab.factorial[i] if isinstance(out, Jet) else (float(out) if i == 0 else 0.0)
        res[MultiIndex(alpha[:n], alpha[n:])] = float(val)
    return res


def _snap(step: float) -> float:
    # powers of two keep x +- k*h exactly representable
    return 2.0 ** round(math.log2(step))


def _central(f, base, active, orders, h, n):
    stencils = []
    for k, o in zip(active, orders):
        pts = [((o / 2.0 - j) * h, (-1) ** j * math.comb(o, j)) for j in range(o + 1)]
        stencils.append(pts)
    # extended precision where the platform has it: roundoff grows like eps / h^k
    base = [np.longdouble(v) for v in base]
    total = np.longdouble(0.0)
    for combo in itertools.product(*stencils):
        point = list(base)
        w = 1.0
        for k, (off, wk) in zip(active, combo):
            point[k] = base[k] + np.longdouble(off)
            w *= wk
        total += w * np.longdouble(f(point[:n], point[n:]))
    return float(total / np.longdouble(h) ** sum(orders))


def derive_fd(f: ChartFunction, x, y, idx: MultiIndex, step: float = 1e-4) -> float:
    """Central-difference estimate of the same derivative as :func:`derive`.

    Uses a tensor-product central stencil at steps h and h/2 combined by one
    Richardson extrapolation.  The step is rounded to a power of two.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    x, y = _check_args(f, x, y, idx, False)
    n = idx.n
    orders_all = idx.orders()
    active = [k for k, o in enumerate(orders_all) if o > 0]
    orders = [orders_all[k] for k in active]
    base = list(x) + list(y)
    h = _snap(step)
    d1 = _central(f, base, active, orders, h, n)
    d2 = _central(f, base, active, orders, h / 2, n)
    return (4.0 * d2 - d1) / 3.0
