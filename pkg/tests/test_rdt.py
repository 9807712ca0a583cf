import numpy as np
import pytest
from numpy.testing import assert_allclose

from tcmcap import distributions as dist
from tcmcap.bounds_rdt import (quad_capacity_closed_form, rdt_capacity,
                               relu_I1_I2)
from tcmcap.config import DomainError, NumericsConfig
from tcmcap.quadrature import QuadratureConfig, integrate_1d

SQRT2 = np.sqrt(2.0)


class TestLinear:
    @pytest.mark.parametrize("d", [1, 2, 4, 8])
    def test_exactly_two(self, d):
        b = rdt_capacity("linear", d)
        assert b.alpha == 2.0 and b.error == 0.0


class TestQuadClosedForm:
    def test_d4(self):
        assert_allclose(quad_capacity_closed_form(4), 2.0 / (2.0 - np.pi / 2.0),
                        rtol=1e-13)

    def test_d2(self):
        assert_allclose(quad_capacity_closed_form(2), 2.0 / (1.0 - 2.0 / np.pi),
                        rtol=1e-13)

    def test_d64_range_and_monotonicity(self):
        v64 = quad_capacity_closed_form(64)
        v128 = quad_capacity_closed_form(128)
        assert 4.0 < v64 < 4.1
        assert v64 > v128 > 4.0

    def test_rejects_odd(self):
        with pytest.raises(DomainError):
            quad_capacity_closed_form(3)


class TestQuadBound:
    def test_d4_reference_value(self):
        b = rdt_capacity("quad", 4)
        assert abs(b.alpha - 4.660) <= 1e-3
        assert abs(b.alpha - quad_capacity_closed_form(4)) <= 1e-4

    def test_d2_closed_form_and_printed_discrepancy(self):
        b = rdt_capacity("quad", 2)
        closed = quad_capacity_closed_form(2)
        assert abs(b.alpha - closed) <= 1e-4
        # the published table prints 5.498, about 0.1% below the closed form;
        # both stay within the widened reference tolerance
        assert 0.004 < abs(closed - 5.498) < 0.007

    @pytest.mark.parametrize("d", [2, 4, 8, 16, 32])
    def test_quadrature_matches_closed_form(self, d):
        b = rdt_capacity("quad", d)
        assert abs(b.alpha - quad_capacity_closed_form(d)) <= 1e-4

    def test_monotone_decrease(self):
        caps = [rdt_capacity("quad", d).alpha for d in (2, 4, 8, 16)]
        assert all(a > b for a, b in zip(caps, caps[1:]))


class TestReluD2:
    def test_reference_value(self):
        b = rdt_capacity("relu", 2)
        assert abs(b.alpha - 3.81) <= 0.01
        assert b.ez is not None and abs(1.0 / b.ez - b.alpha) < 1e-12

    def test_inner_integrals_vanish_at_zero(self):
        i1, i2 = relu_I1_I2(0.0)
        assert i1 == 0.0 and abs(i2) <= 1e-15

    @pytest.mark.parametrize("g1", [1.0, 3.0])
    def test_inner_integrals_against_direct_quadrature(self, g1):
        # oracle: integrate each kernel branch against the inner Gaussian
        cfg = QuadratureConfig(rel_tol=1e-12, abs_tol=1e-14)
        clip = integrate_1d(lambda g2: g1 ** 2 * dist.std_normal_pdf(g2),
                            -np.inf, (1 - SQRT2) * g1, cfg)
        split = integrate_1d(
            lambda g2: 0.5 * (g1 - g2) ** 2 * dist.std_normal_pdf(g2),
            (1 - SQRT2) * g1, g1, cfg)
        i1, i2 = relu_I1_I2(g1)
        assert abs(i1 - clip.value) <= 1e-8
        assert abs(i2 - split.value) <= 1e-8

    def test_rejects_negative_argument(self):
        with pytest.raises(ValueError):
            relu_I1_I2(-0.1)


class TestReluMonteCarlo:
    def test_d4_short_run_bracket(self):
        cfg = NumericsConfig(mc_samples=1_000_000, seed=42)
        b = rdt_capacity("relu", 4, cfg)
        assert b.mc_samples == 1_000_000
        assert abs(b.alpha - 3.078) <= 5 * b.error + 0.02

    def test_seed_reproducibility(self):
        cfg = NumericsConfig(mc_samples=200_000, seed=9)
        a = rdt_capacity("relu", 4, cfg)
        b = rdt_capacity("relu", 4, cfg)
        assert a.alpha == b.alpha and a.error == b.error


class TestValidation:
    def test_invalid_pairs(self):
        with pytest.raises(DomainError):
            rdt_capacity("quad", 3)
        with pytest.raises(DomainError):
            rdt_capacity("relu", 1)
        with pytest.raises(DomainError):
            rdt_capacity("sigmoid", 2)

    def test_quadratic_alias(self):
        b = rdt_capacity("quadratic", 2)
        assert b.activation == "quad"
