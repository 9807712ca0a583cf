import numpy as np
import pytest
from numpy.testing import assert_allclose

from tcmcap import distributions as dist
from tcmcap.quadrature import (EstimateWithError, QuadratureConfig,
                               integrate_1d, integrate_2d_triangular)


def quad13_integrand(k):
    """Chi-pair integrand whose wedge integral is d/2 - chi_mean(d/2)^2."""
    def f(a1, a2):
        return (a1 - a2) ** 2 * dist.chi_pdf(a2, k) * dist.chi_pdf(a1, k)
    return f


def closed_form_wedge(k):
    return k - dist.chi_mean(k) ** 2


class TestIntegrate1D:
    def test_gaussian_half_line(self):
        res = integrate_1d(lambda x: np.exp(-x * x / 2), 0, np.inf)
        assert_allclose(res.value, np.sqrt(np.pi / 2), rtol=1e-10)
        assert res.converged

    def test_unit_box(self):
        res = integrate_1d(lambda x: np.ones_like(x), 0.0, 1.0)
        assert_allclose(res.value, 1.0, rtol=1e-13)

    def test_chi_second_moment(self):
        cfg = QuadratureConfig(truncation_radius=16.0)
        res = integrate_1d(lambda a: a * a * dist.chi_pdf(a, 2), 0, np.inf, cfg)
        assert abs(res.value - 2.0) <= 1e-8

    def test_breakpoints_help_kinked_integrand(self):
        f = lambda x: np.abs(x - np.pi / 6)
        exact = (np.pi / 6) ** 2 / 2 + (1 - np.pi / 6) ** 2 / 2
        res = integrate_1d(f, 0.0, 1.0, breakpoints=(np.pi / 6,))
        assert_allclose(res.value, exact, rtol=1e-12)

    def test_error_bound_is_honest(self):
        res = integrate_1d(lambda x: np.sin(3 * x) ** 2 * np.exp(-x), 0.0, 8.0)
        exact = 0.5 * (1 - np.exp(-8)) - 0.5 * (
            (np.exp(-8) * (6 * np.sin(48) - np.cos(48)) + 1) / 37)
        assert abs(res.value - exact) <= max(res.error, 1e-12)

    def test_nonconvergence_flag(self):
        cfg = QuadratureConfig(rel_tol=1e-14, abs_tol=1e-16, max_subdivisions=4)
        res = integrate_1d(lambda x: np.cos(40 * x) ** 2, 0.0, 10.0, cfg)
        assert isinstance(res, EstimateWithError)
        assert not res.converged
        assert res.error > 0

    def test_deterministic(self):
        f = lambda x: np.exp(-x * x) * np.cos(5 * x)
        a = integrate_1d(f, -np.inf, np.inf)
        b = integrate_1d(f, -np.inf, np.inf)
        assert a == b

    def test_truncation_radius_doubling_invariance(self):
        f = lambda x: np.exp(-x * x / 2) * (1 + x ** 4)
        base = QuadratureConfig()
        wide = QuadratureConfig(truncation_radius=2 * base.truncation_radius)
        r1 = integrate_1d(f, 0, np.inf, base)
        r2 = integrate_1d(f, 0, np.inf, wide)
        assert abs(r1.value - r2.value) <= max(r1.error + r2.error, 1e-10)

    def test_halving_tolerance_never_hurts(self):
        f = lambda x: np.exp(-x) * np.sin(x) ** 2
        exact = 0.5 - 0.5 / 5.0   # int_0^inf e^-x sin^2 x = 1/2 - 1/(2*5)
        errs = []
        for rel in (1e-4, 5e-5, 2.5e-5, 1.25e-5):
            res = integrate_1d(f, 0, np.inf,
                               QuadratureConfig(rel_tol=rel, abs_tol=1e-14,
                                                truncation_radius=60.0))
            errs.append(abs(res.value - exact))
        assert all(b <= a + 1e-12 for a, b in zip(errs, errs[1:]))


class TestIntegrate2DTriangular:
    @pytest.mark.parametrize("k", [1, 2])
    def test_wedge_probability_is_half(self, k):
        cfg = QuadratureConfig(rel_tol=1e-9, truncation_radius=np.sqrt(k) + 14)
        res = integrate_2d_triangular(
            lambda a1, a2: dist.chi_pdf(a2, k) * dist.chi_pdf(a1, k), cfg)
        assert abs(res.value - 0.5) <= 1e-6

    def test_chi_pair_gap_moment_d4(self):
        cfg = QuadratureConfig(truncation_radius=16.0)
        res = integrate_2d_triangular(quad13_integrand(2), cfg)
        assert abs(res.value - closed_form_wedge(2)) <= 1e-5
        assert_allclose(res.value, 0.42920, atol=1e-5)

    def test_chi_pair_gap_moment_d2(self):
        cfg = QuadratureConfig(truncation_radius=16.0)
        res = integrate_2d_triangular(quad13_integrand(1), cfg)
        assert abs(res.value - closed_form_wedge(1)) <= 1e-5
        assert_allclose(res.value, 1 - 2 / np.pi, atol=1e-5)

    def test_deterministic(self):
        cfg = QuadratureConfig(truncation_radius=12.0)
        a = integrate_2d_triangular(quad13_integrand(1), cfg)
        b = integrate_2d_triangular(quad13_integrand(1), cfg)
        assert a == b
