"""Special functions and distributions used by the capacity integrals.

Only what the capacity formulas need: the chi density and its mean, the
error functions, the standard normal pdf/cdf, and a chi sampler.  Gamma
factors are evaluated in log space (``scipy.special.gammaln``, a Lanczos
style approximation good to ~15 digits) so the density stays finite for
large degrees of freedom.
"""

from __future__ import annotations

import numpy as np
from scipy import special

__all__ = [
    "chi_pdf",
    "chi_log_pdf",
    "chi_mean",
    "chi_sample",
    "erf",
    "erfc",
    "std_normal_pdf",
    "std_normal_cdf",
]

_LOG2 = np.log(2.0)
_SQRT2 = np.sqrt(2.0)
_INV_SQRT_2PI = 1.0 / np.sqrt(2.0 * np.pi)


def _check_dof(k: float) -> float:
    k = float(k)
    if not np.isfinite(k) or k <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {k}")
    return k


def chi_log_pdf(a, k: float):
    """Log density of the chi distribution with ``k`` degrees of freedom.

    Computed as ``(1 - k/2) log 2 - log Gamma(k/2) + (k-1) log a - a^2/2``;
    ``a`` may be a scalar or an ndarray of nonnegative values.  Returns
    ``-inf`` where the density vanishes (``a == 0`` with ``k > 1``).
    """
    k = _check_dof(k)
    a = np.asarray(a, dtype=float)
    if np.any(a < 0):
        raise ValueError("chi density is supported on a >= 0")
    with np.errstate(divide="ignore", invalid="ignore"):
        log_a = np.where(a > 0, np.log(np.where(a > 0, a, 1.0)), -np.inf)
        out = (1.0 - k / 2.0) * _LOG2 - special.gammaln(k / 2.0) \
            + (k - 1.0) * log_a - a * a / 2.0
    if k == 1.0:
        # a^0 = 1 even at a = 0: the half-normal density is positive there.
        out = np.where(a == 0, -0.5 * np.log(np.pi / 2.0), out)
    return out if out.ndim else float(out)


def chi_pdf(a, k: float):
    """Chi density with ``k`` degrees of freedom, vectorized in ``a``.

    Integrates to 1 over [0, inf); evaluated via :func:`chi_log_pdf` to
    avoid overflow of the gamma and power factors for large ``k``.
    """
    lp = chi_log_pdf(a, k)
    out = np.exp(lp)
    return out if np.ndim(out) else float(out)


def chi_mean(k: float) -> float:
    """Mean of a chi random variable: ``sqrt(2) Gamma((k+1)/2) / Gamma(k/2)``."""
    k = _check_dof(k)
    return _SQRT2 * np.exp(special.gammaln((k + 1.0) / 2.0) - special.gammaln(k / 2.0))


def chi_sample(k: int, rng: np.random.Generator, size: int | None = None):
    """Draw chi(k) variates as the norm of ``k`` iid standard normals.

    ``k`` must be a positive integer so the construction is exact.  The
    stream advances deterministically: a fixed ``rng`` state yields a
    fixed sample.
    """
    if int(k) != k or k <= 0:
        raise ValueError(f"chi_sample needs a positive integer dof, got {k}")
    k = int(k)
    n = 1 if size is None else int(size)
    g = rng.standard_normal((n, k))
    r = np.sqrt(np.sum(g * g, axis=1))
    return float(r[0]) if size is None else r


def erf(x):
    """Error function (relative accuracy better than 1e-12)."""
    return special.erf(x)


def erfc(x):
    """Complementary error function, ``1 - erf(x)`` without cancellation."""
    return special.erfc(x)


def std_normal_pdf(x):
    """Standard normal density ``exp(-x^2/2)/sqrt(2 pi)``."""
    x = np.asarray(x, dtype=float)
    out = _INV_SQRT_2PI * np.exp(-x * x / 2.0)
    return out if out.ndim else float(out)


def std_normal_cdf(x):
    """Standard normal cdf via erf."""
    x = np.asarray(x, dtype=float)
    out = 0.5 * (1.0 + special.erf(x / _SQRT2))
    return out if out.ndim else float(out)
