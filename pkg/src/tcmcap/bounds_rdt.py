"""Plain random-duality capacity upper bounds.

The bound is the sample-complexity ratio where ``sqrt(alpha * E z) - 1``
crosses zero, i.e. ``alpha = 1 / E z``.  The expectation is evaluated by
deterministic quadrature where the kernel collapses to a low-dimensional
integral (linear, quadratic, ReLU d=2) and by Monte Carlo otherwise, with
the error bar propagated to the bound by the first-order delta method.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import distributions as dist
from .config import DEFAULT_CONFIG, NumericsConfig, validate_width
from .kernels import expected_z
from .quadrature import EstimateWithError

__all__ = ["CapacityBound", "rdt_capacity", "quad_capacity_closed_form",
           "relu_I1_I2"]

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class CapacityBound:
    """An n-scaled capacity upper bound with its numerical pedigree.

    ``alpha`` is the bound on lim m/n; ``error`` is the propagated
    numerical uncertainty (0 for exact results).  ``ez`` carries the
    kernel expectation when the plain bound computed one; ``mc_samples``
    is set when Monte Carlo was involved.  ``diagnostics`` holds the
    saddle-point data for the lifted method.
    """

    alpha: float
    method: str
    activation: str
    d: int
    error: float = 0.0
    ez: Optional[float] = None
    mc_samples: Optional[int] = None
    diagnostics: Optional[object] = None


def quad_capacity_closed_form(d: int) -> float:
    """Exact plain bound for the quadratic activation.

    The difference of two iid chi(d/2) variables is symmetric with no
    atom, so E max(a1-a2, 0)^2 = E(a1-a2)^2 / 2 = d/2 - mu^2 with mu the
    chi mean, and the bound is 2 / (d/2 - mu^2).
    """
    _, d = validate_width("quad", d)
    k = d / 2.0
    mu = dist.chi_mean(k)
    return 2.0 / (k - mu * mu)


def relu_I1_I2(g1):
    """Closed-form inner integrals of the ReLU d=2 kernel expectation.

    For a fixed outer value g1 >= 0 these are the contributions of the
    two nonzero kernel branches after integrating the inner Gaussian
    coordinate: the fully-clipped branch (value g1^2, inner tail mass)
    and the split branch (value (g1-g2)^2/2 between the two kinks).
    """
    g1 = np.asarray(g1, dtype=float)
    if np.any(g1 < 0):
        raise ValueError("g1 must be nonnegative")
    i1 = g1 ** 2 * dist.erfc((_SQRT2 - 1.0) * g1 / _SQRT2) / 2.0
    erf_hi = dist.erf(g1 / _SQRT2)
    erf_lo = dist.erf((1.0 - _SQRT2) * g1 / _SQRT2)
    expo_hi = np.exp(-g1 ** 2 / 2.0)
    expo_lo = np.exp(-((1.0 - _SQRT2) * g1) ** 2 / 2.0)
    i2 = 0.25 * ((g1 ** 2 + 1.0) * (erf_hi - erf_lo)
                 + np.sqrt(2.0 / np.pi)
                 * (g1 * expo_hi - (1.0 + _SQRT2) * g1 * expo_lo))
    if i1.ndim == 0:
        return float(i1), float(i2)
    return i1, i2


def _from_ez(ez: EstimateWithError, activation: str, d: int,
             mc_samples: int | None) -> CapacityBound:
    alpha = 1.0 / ez.value
    err = ez.error / ez.value ** 2           # delta method for 1/x
    return CapacityBound(alpha=alpha, method="rdt", activation=activation,
                         d=d, error=err, ez=ez.value, mc_samples=mc_samples)


def rdt_capacity(activation: str, d: int,
                 cfg: NumericsConfig | None = None,
                 workers: int | None = None) -> CapacityBound:
    """Plain capacity upper bound for one activation and width.

    linear      -> exactly 2 (any d >= 1)
    quadratic   -> chi double-integral quadrature (even d)
    relu, d=2   -> closed-form inner integrals + 1D quadrature
    relu, d>=4  -> Monte Carlo over the exact kernel, with standard error
    """
    cfg = cfg or DEFAULT_CONFIG
    activation, d = validate_width(activation, d)
    if activation == "linear":
        return CapacityBound(alpha=2.0, method="rdt", activation=activation,
                             d=d, error=0.0, ez=0.5)
    if activation == "quad" or d == 2:
        ez = expected_z(activation, d, "quadrature", cfg)
        return _from_ez(ez, activation, d, None)
    ez = expected_z(activation, d, "monte-carlo", cfg, workers=workers)
    return _from_ez(ez, activation, d, cfg.mc_samples)
