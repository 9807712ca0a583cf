"""Runtime property suite behind the ``selfcheck`` CLI command.

Each check re-verifies one of the library's structural guarantees at a
reduced budget: oracle equivalences between independent solution paths,
closed-form limits, monotonicity of the bounds, and determinism of the
Monte Carlo engine.  Checks look up the functions they exercise through
the module objects at call time, so a deliberately faulty implementation
(or a monkeypatched one, in the fault-injection test) is caught and named.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bounds_plrdt, bounds_rdt, distributions, kernels, montecarlo
from .config import NumericsConfig
from .quadrature import QuadratureConfig, integrate_1d

__all__ = ["CheckResult", "run_selfcheck", "CHECKS"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


def _check_chi_normalization(quick: bool) -> str:
    for k in (1, 2, 3, 4, 16):
        cfg = QuadratureConfig(truncation_radius=np.sqrt(k) + 14.0)
        total = integrate_1d(lambda a: distributions.chi_pdf(a, k), 0, np.inf, cfg)
        if abs(total.value - 1.0) > 1e-8:
            raise AssertionError(f"chi pdf with k={k} integrates to {total.value}")
        second = integrate_1d(lambda a: a * a * distributions.chi_pdf(a, k),
                              0, np.inf, cfg)
        if abs(second.value - k) > 1e-6:
            raise AssertionError(f"chi second moment k={k}: {second.value}")
    return "chi density normalized, second moment = dof (k in 1..16)"


def _check_oracle_equivalence(quick: bool) -> str:
    widths = (2, 4) if quick else (2, 4, 6)
    per_d = 40 if quick else 150
    rng = np.random.default_rng(20240811)
    worst = 0.0
    for d in widths:
        for _ in range(per_d):
            g = rng.standard_normal(d)
            got = kernels.z_relu_general(g).z
            want = kernels.z_relu_oracle(g).z
            rel = abs(got - want) / max(1e-12, abs(want))
            if rel > 1e-8:
                raise AssertionError(
                    f"z_relu_general={got} vs oracle={want} at d={d}, g={g.tolist()}")
            worst = max(worst, rel)
    return f"relu solver matches enumeration oracle (worst rel err {worst:.1e})"


def _check_closed_form_d2(quick: bool) -> str:
    n = 200 if quick else 800
    rng = np.random.default_rng(7)
    for _ in range(n):
        g = rng.standard_normal(2)
        got = kernels.z_relu_general(g).z
        want = kernels.z_relu_d2(g[0], g[1]).z
        if abs(got - want) > 1e-10 * max(1.0, want):
            raise AssertionError(f"d=2 mismatch at g={g.tolist()}: {got} vs {want}")
        gq = rng.standard_normal(4)
        zq = kernels.z_quad(gq).z
        zc = kernels.z_quad_chi(float(np.linalg.norm(gq[:2])),
                                float(np.linalg.norm(gq[2:])))
        if zq != zc:
            raise AssertionError(f"quad chi identity broken at g={gq.tolist()}")
    return f"relu d=2 closed form and quad chi identity hold on {n} samples"


def _check_scale_equivariance(quick: bool) -> str:
    rng = np.random.default_rng(11)
    for _ in range(100 if quick else 400):
        g = rng.standard_normal(4)
        c = float(rng.uniform(0.1, 5.0))
        for fn in (lambda v: kernels.z_quad(v).z,
                   lambda v: kernels.z_relu_general(v).z):
            z1, zc = fn(g), fn(c * g)
            if abs(zc - c * c * z1) > 1e-9 * max(1.0, abs(zc)):
                raise AssertionError(f"z(c g) != c^2 z(g) at c={c}, g={g.tolist()}")
    return "kernels are scale equivariant (constraint sets are cones)"


def _check_quad_bound_shape(quick: bool) -> str:
    caps = [bounds_rdt.quad_capacity_closed_form(d)
            for d in (2, 4, 8, 16, 32, 64, 128)]
    if not all(a > b for a, b in zip(caps, caps[1:])):
        raise AssertionError(f"quad bound not strictly decreasing: {caps}")
    if not (4.0 < caps[-1] < 4.05):
        raise AssertionError(f"quad bound at d=128 is {caps[-1]}, not near 4")
    cfg = NumericsConfig()
    for d in (2, 4, 8):
        quad_path = bounds_rdt.rdt_capacity("quad", d, cfg).alpha
        closed = bounds_rdt.quad_capacity_closed_form(d)
        if abs(quad_path - closed) > 1e-4:
            raise AssertionError(
                f"quadrature vs closed form at d={d}: {quad_path} vs {closed}")
    return "quad bound decreasing, limit ~4, quadrature matches closed form"


def _check_relu_d2_mc_agreement(quick: bool) -> str:
    cfg = NumericsConfig(mc_samples=100_000 if quick else 2_000_000)
    quad_est = kernels.expected_z("relu", 2, "quadrature", cfg)
    mc_est = kernels.expected_z("relu", 2, "monte-carlo", cfg)
    spread = 3.0 * np.hypot(quad_est.error, mc_est.error)
    if abs(quad_est.value - mc_est.value) > max(spread, 1e-12):
        raise AssertionError(
            f"relu d=2 E z: quadrature {quad_est.value} vs MC {mc_est.value} "
            f"+- {mc_est.error}")
    return (f"relu d=2 quadrature {quad_est.value:.5f} agrees with MC "
            f"{mc_est.value:.5f} +- {mc_est.error:.1e}")


def _check_plain_limit_recovery(quick: bool) -> str:
    cfg = NumericsConfig()
    for activation, d, ez in (("linear", 2, 0.5),
                              ("quad", 2, (1.0 - 2.0 / np.pi) / 2.0)):
        alpha = 1.5
        got = bounds_plrdt.phi_at_c3(alpha, activation, d, 1e-3, cfg)
        want = np.sqrt(alpha * ez) - 1.0
        if abs(got - want) > 1e-2:
            raise AssertionError(
                f"saddle profile at c3=1e-3 for {activation}: {got} vs plain {want}")
    return "c3 -> 0 saddle profile recovers the plain objective within 1e-2"


def _check_plrdt_tightening(quick: bool) -> str:
    cfg = NumericsConfig(mc_samples=100_000 if quick else 1_000_000)
    pairs = [("linear", 2), ("quad", 2)] if quick else \
            [("linear", 2), ("quad", 2), ("quad", 4), ("relu", 2)]
    for activation, d in pairs:
        plain = bounds_rdt.rdt_capacity(activation, d, cfg)
        lifted = bounds_plrdt.plrdt_capacity(activation, d, cfg)
        slack = plain.error + lifted.error + 1e-6
        if lifted.alpha > plain.alpha + slack:
            raise AssertionError(
                f"plrdt {lifted.alpha} exceeds rdt {plain.alpha} for "
                f"({activation}, d={d})")
    return "lifted bound never exceeds the plain bound (tested pairs)"


def _check_mc_determinism(quick: bool) -> str:
    cfg = montecarlo.MCConfig(samples=200_000, seed=123, chunk_size=50_000)

    def sampler(rng, n):
        return np.maximum(rng.standard_normal(n), 0.0) ** 2

    runs = [montecarlo.estimate_mean(sampler, cfg, workers=w) for w in (1, 2, 8)]
    if not all(r == runs[0] for r in runs[1:]):
        raise AssertionError(f"worker count changed the estimate: {runs}")
    if abs(runs[0].value - 0.5) > 3.0 * runs[0].error + 1e-3:
        raise AssertionError(f"E max(N,0)^2 estimate off: {runs[0]}")
    return "Monte Carlo engine worker-count independent and calibrated"


CHECKS: tuple[tuple[str, Callable[[bool], str]], ...] = (
    ("chi-normalization", _check_chi_normalization),
    ("kernel-closed-forms", _check_closed_form_d2),
    ("kernel-scale-equivariance", _check_scale_equivariance),
    ("oracle-equivalence", _check_oracle_equivalence),
    ("quad-bound-shape", _check_quad_bound_shape),
    ("relu-d2-quadrature-vs-mc", _check_relu_d2_mc_agreement),
    ("plain-limit-recovery", _check_plain_limit_recovery),
    ("plrdt-tightening", _check_plrdt_tightening),
    ("mc-determinism", _check_mc_determinism),
)


def run_selfcheck(quick: bool = False,
                  report: Callable[[str], None] = print) -> list[CheckResult]:
    """Run every check, report one line each, and return the results."""
    results = []
    for name, fn in CHECKS:
        try:
            detail = fn(quick)
            ok = True
        except AssertionError as exc:
            detail = str(exc)
            ok = False
        results.append(CheckResult(name, ok, detail))
        report(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
    return results
