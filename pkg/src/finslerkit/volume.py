"""Volume forms dmu = sigma(x) dx^1 ... dx^n on a chart.

A volume form is represented by its chart density, evaluated on coordinate
components that may be floats, arrays or jets, so the same object feeds
divergences, S-curvature and ball volumes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import autodiff as ad
from .metrics import FinslerMetric
from .tensors import bh_density as bh_density_qmc
from .tensors import components


class VolumeForm:
    name = "abstract"

    def density(self, metric: FinslerMetric, xs):
        raise NotImplementedError

    def at(self, metric: FinslerMetric, X):
        """Density on an array of points (coordinate axis last)."""
        X = np.asarray(X, float)
        val = self.density(metric, components(X))
        return np.broadcast_to(np.asarray(ad.value_of(val), float), X.shape[:-1]).copy()

    def jet(self, metric: FinslerMetric, X, order: int):
        xs = ad.seed(components(X), order)
        s = self.density(metric, xs)
        if not isinstance(s, ad.Jet):
            s = ad.Jet.constant(np.broadcast_to(s, np.shape(X)[:-1]), len(xs), order)
        return s

    def log_gradient(self, metric: FinslerMetric, X):
        """d(log sigma)/dx, shape (..., n)."""
        J = self.jet(metric, X, 1)
        return J.gradient() / np.asarray(J.value)[..., None]

    def describe(self):
        return {"name": self.name}


@dataclass(frozen=True)
class BusemannHausdorff(VolumeForm):
    """sigma(x) = vol(B^n) / vol{y : F(x, y) < 1}.

    Uses the metric's closed form when it has one; otherwise the density is
    estimated pointwise by quasi-Monte Carlo (plain arrays only, no jets).
    """

    name = "busemann-hausdorff"

    def density(self, metric, xs):
        val = metric.bh_density(xs)
        if val is not None:
            return val
        if any(isinstance(c, ad.Jet) for c in xs):
            raise NotImplementedError(
                f"{metric.name}: no closed-form Busemann-Hausdorff density to differentiate")
        X = np.stack(np.broadcast_arrays(*xs), axis=-1)
        flat = X.reshape(-1, X.shape[-1])
        out = np.array([bh_density_qmc(metric, p).value for p in flat])
        return out.reshape(X.shape[:-1])

    def source(self, metric):
        return "closed-form" if metric.bh_density(list(metric.base_point)) is not None else "quasi-monte-carlo"

    def describe(self):
        return {"name": self.name}


@dataclass(frozen=True)
class ConstantDensity(VolumeForm):
    value: float = 1.0
    name = "constant"

    def density(self, metric, xs):
        return self.value

    def describe(self):
        return {"name": self.name, "value": self.value}


def volume_form(name: str = "busemann-hausdorff", **kw) -> VolumeForm:
    if name in ("busemann-hausdorff", "bh"):
        return BusemannHausdorff()
    if name in ("constant", "lebesgue"):
        return ConstantDensity(float(kw.get("value", 1.0)))
    from .errors import UsageError

    raise UsageError(f"unknown volume form {name!r}; choose busemann-hausdorff or constant")
