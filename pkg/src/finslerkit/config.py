"""Run-time defaults for verifications and eigenvalue estimates."""
from __future__ import annotations

from dataclasses import asdict, dataclass, fields, replace

from .errors import UsageError


@dataclass(frozen=True)
class VerifyConfig:
    step: float = 1e-2          # RK4 step along rays
    ntheta: int = 32            # directions on the indicatrix (n = 2); per face side for n = 3
    nrays: int = 16             # rays for Hessian sampling
    samples: int = 200
    rmin: float = 0.1
    rmax: float = 1.5
    radius_start: float = 0.05
    radius_ratio: float = 1.1
    tolerance: float = 1e-3
    normalization_radius: float = 0.05
    normalization_tolerance: float = 2e-2
    crosscheck_points: int = 10
    crosscheck_tolerance: float = 1e-4
    snorm_directions: int = 256
    hypothesis_slack: float = 1e-6
    seed: int = 0

    def radii(self, rmax=None):
        from .comparison import geometric_radii

        return geometric_radii(self.radius_start, self.rmax if rmax is None else rmax,
                               self.radius_ratio)


@dataclass(frozen=True)
class CertifyConfig:
    nsamples: int = 4096
    refinements: int = 50
    top: int = 4
    seed: int = 0


@dataclass(frozen=True)
class Lambda1Config:
    grid: int = 200
    boundary_rays: int = 256
    step: float = 1e-2
    max_iter: int = 5000
    fixed_point_iter: int = 40
    tolerance: float = 1e-9
    seed: int = 0


@dataclass(frozen=True)
class RiccatiConfig:
    step: float = 1e-3
    radii: int = 20
    rmin: float = 0.2
    rmax: float = 1.5


def updated(cfg, **overrides):
    """Copy of a config dataclass with the non-None overrides applied."""
    names = {f.name for f in fields(cfg)}
    bad = set(overrides) - names
    if bad:
        raise UsageError(f"unknown {type(cfg).__name__} fields: {sorted(bad)}")
    return replace(cfg, **{k: v for k, v in overrides.items() if v is not None})


def as_dict(cfg):
    return asdict(cfg)

