"""Per-sample minimal-distance kernels.

Each kernel is the squared distance from a Gaussian vector g to the set of
points whose activated output survives the output-weight sign test:

    z(g) = min { ||g - q||^2 : f(q)' w >= 0 }

with f the hidden activation and w the output weights (d/2 entries of -1
followed by d/2 entries of +1 for quadratic/ReLU; any nonzero w for the
linear activation, whose kernel is w-invariant after normalization).

Linear and quadratic kernels have closed forms.  The ReLU kernel for
general even d is solved exactly: the constraint couples the two halves
only through the budget b = sum of positive parts, the optimal half-
solutions are soft-thresholds of the sorted coordinates, and for each
pair (number of clipped left coordinates, size of the raised right
support) the cost is an explicit convex quadratic in b.  Scanning all
pairs and minimizing each quadratic in closed form yields the global
minimum without any iterative search.  An independent enumeration oracle
(`z_relu_oracle`) checks the same minimum by brute force over sign
patterns.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import DEFAULT_CONFIG, NumericsConfig, validate_width
from .quadrature import EstimateWithError, QuadratureConfig, integrate_1d, \
    integrate_2d_triangular
from . import distributions as dist
from . import montecarlo as mc

__all__ = ["KernelResult", "z_linear", "z_quad", "z_quad_chi", "z_relu_d2",
           "z_relu_general", "z_relu_batch", "z_relu_oracle", "expected_z"]

_SQRT2 = np.sqrt(2.0)


@dataclass(frozen=True)
class KernelResult:
    """Kernel value, the branch that produced it, and the minimizer if known."""

    z: float
    branch: str
    q_opt: np.ndarray | None = None


def _as_vector(g) -> np.ndarray:
    g = np.asarray(g, dtype=float)
    if g.ndim != 1 or g.size < 1:
        raise ValueError("g must be a 1-dimensional vector")
    return g


# ---------------------------------------------------------------------------
# linear activation
# ---------------------------------------------------------------------------

def z_linear(g, w) -> KernelResult:
    """Kernel for the linear activation: ``(max(-g'w / ||w||, 0))^2``.

    The constraint set is the halfspace ``q'w >= 0``; the minimizer is the
    Euclidean projection of g onto it.
    """
    g = _as_vector(g)
    w = _as_vector(w)
    if g.shape != w.shape:
        raise ValueError("g and w must have the same length")
    nw = float(np.linalg.norm(w))
    if nw == 0.0:
        raise ValueError("output weights must be nonzero")
    t = float(g @ w)
    if t >= 0.0:
        return KernelResult(0.0, "slack", g.copy())
    lam = -2.0 * t / (nw * nw)
    q = g + (lam / 2.0) * w      # lands on the constraint boundary q'w = 0
    return KernelResult((t / nw) ** 2, "projected", q)


# ---------------------------------------------------------------------------
# quadratic activation
# ---------------------------------------------------------------------------

def z_quad(g) -> KernelResult:
    """Quadratic-activation kernel ``(max(||g_L|| - ||g_R||, 0))^2 / 2``.

    g_L and g_R are the first and second halves of g; the constraint is
    ``||q_L||^2 <= ||q_R||^2``.
    """
    g = _as_vector(g)
    _, d = validate_width("quad", g.size)
    h = d // 2
    n_l = float(np.linalg.norm(g[:h]))
    n_r = float(np.linalg.norm(g[h:]))
    if n_l <= n_r:
        return KernelResult(0.0, "slack", g.copy())
    root_b = 0.5 * (n_l + n_r)
    q = np.empty(d)
    q[:h] = g[:h] * (root_b / n_l)
    if n_r > 0.0:
        q[h:] = g[h:] * (root_b / n_r)
    else:
        q[h:] = 0.0
        q[h] = root_b
    return KernelResult(0.5 * (n_l - n_r) ** 2, "radial", q)


def z_quad_chi(a1: float, a2: float) -> float:
    """Quadratic kernel in terms of the two half-norms: ``max(a1-a2,0)^2/2``."""
    if a1 < 0 or a2 < 0:
        raise ValueError("half-norms must be nonnegative")
    return 0.5 * max(a1 - a2, 0.0) ** 2


# ---------------------------------------------------------------------------
# ReLU activation, d = 2 closed form
# ---------------------------------------------------------------------------

def z_relu_d2(g1: float, g2: float) -> KernelResult:
    """Closed-form ReLU kernel for d = 2 (three analytic branches)."""
    g1 = float(g1)
    g2 = float(g2)
    if g1 <= 0.0 or g2 >= g1:
        return KernelResult(0.0, "slack", np.array([g1, g2]))
    if g2 <= (1.0 - _SQRT2) * g1:
        return KernelResult(g1 * g1, "zero-left", np.array([0.0, g2]))
    m = 0.5 * (g1 + g2)
    return KernelResult(0.5 * (g1 - g2) ** 2, "split", np.array([m, m]))


# ---------------------------------------------------------------------------
# ReLU activation, general even d: exact prefix-scan solver
# ---------------------------------------------------------------------------

def z_relu_batch(G: np.ndarray) -> np.ndarray:
    """Exact ReLU kernel values for an (N, d) batch of samples.

    Vectorized over samples.  For each infeasible sample the minimum over
    all (n, k) prefix pairs of the closed-form quadratic cost in the
    shared budget b is taken; see :func:`z_relu_general` for the scalar
    version that also reports the minimizer.
    """
    G = np.asarray(G, dtype=float)
    if G.ndim != 2:
        raise ValueError("G must be a 2-dimensional array of samples")
    _, d = validate_width("relu", G.shape[1])
    h = d // 2
    g_l, g_r = G[:, :h], G[:, h:]
    b_l = np.maximum(g_l, 0.0).sum(axis=1)
    b_r = np.maximum(g_r, 0.0).sum(axis=1)
    z = np.zeros(G.shape[0])
    hard = b_l > b_r
    if not hard.any():
        return z
    gl = g_l[hard]
    gr = g_r[hard]
    br = b_r[hard]

    p = -np.sort(-np.maximum(gl, 0.0), axis=1)   # left positives, descending
    pre_p = np.cumsum(p, axis=1)
    pre_p2 = np.cumsum(p * p, axis=1)
    tot_l = pre_p2[:, -1]
    gam = -np.sort(-gr, axis=1)                  # right half, descending
    pre_s = np.cumsum(gam, axis=1)
    pre_pos2 = np.cumsum(np.maximum(gam, 0.0) ** 2, axis=1)
    tot_r = pre_pos2[:, -1]

    best = tot_l.copy()                          # clip every left positive to 0
    for n in range(1, h + 1):
        p_n = p[:, n - 1]
        valid = p_n > 0.0
        if not valid.any():
            break
        pn_sum = pre_p[:, n - 1]
        t_n = tot_l - pre_p2[:, n - 1]
        for k in range(1, h + 1):
            s_k = pre_s[:, k - 1]
            g_k = gam[:, k - 1]
            u_k = tot_r - pre_pos2[:, k - 1]
            lo = np.maximum(br, np.maximum(s_k - k * g_k, pn_sum - n * p_n))
            b = np.maximum((n * s_k + k * pn_sum) / (n + k), lo)
            cost = t_n + (pn_sum - b) ** 2 / n + (b - s_k) ** 2 / k + u_k
            np.minimum(best, np.where(valid, cost, np.inf), out=best)
    z[hard] = best
    return z


def z_relu_general(g, cfg: NumericsConfig | None = None) -> KernelResult:
    """Exact global minimum of the ReLU kernel for any even d.

    The constraint ``sum_L max(q_i,0) <= sum_R max(q_i,0)`` ties the two
    halves only through the common budget b at which it binds.  With the
    left positives sorted descending (p) and the right half sorted
    descending (gamma), the optimal q soft-thresholds each half: the top
    n left positives move down by a common amount, the top k right
    coordinates move up by a common amount.  For each (n, k) the cost is
    a convex quadratic in b minimized in closed form subject to the
    validity bounds, so the scan is exact; ties are broken toward the
    smallest k, then smallest n.
    """
    del cfg  # accepted for interface symmetry; the solver is closed-form
    g = _as_vector(g)
    _, d = validate_width("relu", g.size)
    h = d // 2
    g_l, g_r = g[:h], g[h:]
    b_l = float(np.maximum(g_l, 0.0).sum())
    b_r = float(np.maximum(g_r, 0.0).sum())
    if b_l <= b_r:
        return KernelResult(0.0, "feasible", g.copy())

    pos_idx = np.flatnonzero(g_l > 0.0)
    order_l = pos_idx[np.argsort(-g_l[pos_idx], kind="stable")]
    p = g_l[order_l]
    m = p.size
    pre_p = np.cumsum(p)
    pre_p2 = np.cumsum(p * p)
    tot_l = float(pre_p2[-1])

    order_r = np.argsort(-g_r, kind="stable")
    gam = g_r[order_r]
    pre_s = np.cumsum(gam)
    pre_pos2 = np.cumsum(np.maximum(gam, 0.0) ** 2)
    tot_r = float(pre_pos2[-1])

    best = tot_l
    best_nkb: tuple[int, int, float] | None = None   # None = zero-left branch
    for k in range(1, h + 1):
        s_k = float(pre_s[k - 1])
        u_k = tot_r - float(pre_pos2[k - 1])
        for n in range(1, m + 1):
            pn_sum = float(pre_p[n - 1])
            t_n = tot_l - float(pre_p2[n - 1])
            lo = max(b_r, s_k - k * gam[k - 1], pn_sum - n * p[n - 1])
            b = max((n * s_k + k * pn_sum) / (n + k), lo)
            cost = t_n + (pn_sum - b) ** 2 / n + (b - s_k) ** 2 / k + u_k
            if cost < best - 1e-15 * (1.0 + best):
                best = cost
                best_nkb = (n, k, b)

    q = g.copy()
    if best_nkb is None:
        q[:h] = np.minimum(g_l, 0.0)
        return KernelResult(best, "zero-left", q)
    n, k, b = best_nkb
    nu_l = (float(pre_p[n - 1]) - b) / n
    q_l = np.minimum(g_l, 0.0)
    q_l[order_l[:n]] = p[:n] - nu_l
    nu_r = (b - float(pre_s[k - 1])) / k
    q_r = np.minimum(g_r, 0.0)
    q_r[order_r[:k]] = gam[:k] + nu_r
    q[:h] = q_l
    q[h:] = q_r
    return KernelResult(best, f"active(n={n},k={k})", q)


# ---------------------------------------------------------------------------
# ReLU enumeration oracle
# ---------------------------------------------------------------------------

@lru_cache(maxsize=8)
def _relu_patterns(d: int) -> tuple[np.ndarray, np.ndarray]:
    """All per-coordinate states {pinned-to-0, free-negative, free-positive}.

    Returns the free mask and the constraint coefficient rows (+1 on the
    left half, -1 on the right half, for coordinates modeled positive).
    """
    states = np.indices((3,) * d).reshape(d, -1).T   # (3^d, d) over {0,1,2}
    free = states != 0
    sign = np.where(np.arange(d) < d // 2, 1.0, -1.0)
    coeff = np.where(states == 2, sign, 0.0)
    return free, coeff


def z_relu_oracle(g) -> KernelResult:
    """Independent exact ReLU kernel by exhaustive candidate enumeration.

    Every stationary point of the problem pins some coordinates to zero
    and, on the rest, either keeps g or shifts along the constraint
    normal of the orthant containing it.  All such candidates are
    generated (3^d per-coordinate states, with and without the coupling
    constraint active), filtered by the true constraint, and the cheapest
    one returned.  Cost grows too fast beyond d = 8.
    """
    g = _as_vector(g)
    _, d = validate_width("relu", g.size)
    if d > 8:
        raise ValueError(
            f"enumeration oracle is limited to d <= 8 (got d={d}); "
            "use z_relu_general for larger widths")
    h = d // 2
    free, coeff = _relu_patterns(d)

    q_inactive = np.where(free, g, 0.0)
    denom = np.sum(coeff * coeff, axis=1)
    ok = denom > 0
    lam = np.zeros(len(coeff))
    lam[ok] = (coeff[ok] @ g) / denom[ok]
    q_active = np.where(free, g - lam[:, None] * coeff, 0.0)
    q_active[~ok] = q_inactive[~ok]

    candidates = np.vstack([q_inactive, q_active])
    s_l = np.maximum(candidates[:, :h], 0.0).sum(axis=1)
    s_r = np.maximum(candidates[:, h:], 0.0).sum(axis=1)
    tol = 1e-10 * max(1.0, float(np.abs(g).sum()))
    feasible = s_l <= s_r + tol
    costs = np.where(feasible, ((candidates - g) ** 2).sum(axis=1), np.inf)
    i = int(np.argmin(costs))
    return KernelResult(float(costs[i]), "enumeration", candidates[i])


# ---------------------------------------------------------------------------
# expectations
# ---------------------------------------------------------------------------

def _relu_d2_integrand(g1: np.ndarray) -> np.ndarray:
    from .bounds_rdt import relu_I1_I2   # closed-form inner integrals
    i1, i2 = relu_I1_I2(g1)
    return (i1 + i2) * dist.std_normal_pdf(g1)


def _mc_sampler(activation: str, d: int):
    h = d // 2

    if activation == "linear":
        w = np.ones(d)
        nw = np.sqrt(float(d))

        def sample(rng: np.random.Generator, n: int) -> np.ndarray:
            g = rng.standard_normal((n, d))
            return np.maximum(-(g @ w) / nw, 0.0) ** 2
    elif activation == "quad":
        def sample(rng: np.random.Generator, n: int) -> np.ndarray:
            g = rng.standard_normal((n, d))
            n_l = np.linalg.norm(g[:, :h], axis=1)
            n_r = np.linalg.norm(g[:, h:], axis=1)
            return 0.5 * np.maximum(n_l - n_r, 0.0) ** 2
    else:
        def sample(rng: np.random.Generator, n: int) -> np.ndarray:
            return z_relu_batch(rng.standard_normal((n, d)))
    return sample


def expected_z(activation: str, d: int, estimator: str = "quadrature",
               cfg: NumericsConfig | None = None,
               workers: int | None = None) -> EstimateWithError:
    """E z(g) for one activation and width, by quadrature or Monte Carlo.

    Quadrature is available where the kernel expectation collapses to a
    low-dimensional integral: linear (exactly 1/2), quadratic (chi double
    integral over the half-norms), and ReLU with d = 2 (closed-form inner
    integrals).  Monte Carlo covers every valid (activation, d).
    """
    cfg = cfg or DEFAULT_CONFIG
    activation, d = validate_width(activation, d)
    if estimator not in ("quadrature", "monte-carlo"):
        raise ValueError(f"unknown estimator {estimator!r}")

    if estimator == "monte-carlo":
        mc_cfg = mc.MCConfig(samples=cfg.mc_samples, seed=cfg.seed,
                             chunk_size=cfg.mc_chunk_size)
        return mc.estimate_mean(_mc_sampler(activation, d), mc_cfg, workers)

    if activation == "linear":
        # E max(N,0)^2 = 1/2 for a standard normal N, independent of d.
        return EstimateWithError(0.5, 0.0)
    if activation == "quad":
        k = d / 2.0
        qcfg = QuadratureConfig(rel_tol=cfg.quad_rel_tol,
                                truncation_radius=np.sqrt(k) + 14.0)

        def integrand(a1: float, a2: np.ndarray) -> np.ndarray:
            return (0.5 * (a1 - a2) ** 2
                    * dist.chi_pdf(a2, k) * dist.chi_pdf(a1, k))

        return integrate_2d_triangular(integrand, qcfg)
    if d == 2:
        qcfg = QuadratureConfig(rel_tol=cfg.quad_rel_tol)
        return integrate_1d(_relu_d2_integrand, 0.0, np.inf, qcfg)
    raise ValueError(
        f"quadrature estimator is not available for relu with d={d}; "
        "use the monte-carlo estimator")
