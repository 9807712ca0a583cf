import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from numpy.testing import assert_allclose

from tcmcap.config import DomainError, NumericsConfig
from tcmcap.kernels import (expected_z, z_linear, z_quad, z_quad_chi,
                            z_relu_batch, z_relu_d2, z_relu_general,
                            z_relu_oracle)

SQRT2 = np.sqrt(2.0)


def relu_constraint_slack(q):
    h = len(q) // 2
    return np.maximum(q[h:], 0).sum() - np.maximum(q[:h], 0).sum()


class TestLinearKernel:
    def test_feasible_point(self):
        assert z_linear([1, 1], [1, 1]).z == 0.0

    def test_projected_value(self):
        assert_allclose(z_linear([-1, -1], [1, 1]).z, 2.0, rtol=1e-14)

    def test_boundary_is_zero(self):
        assert z_linear([1, -1], [1, 1]).z == 0.0

    def test_weight_direction_invariance(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            g = rng.standard_normal(4)
            w = rng.standard_normal(4)
            assert_allclose(z_linear(g, w).z, z_linear(g, 3.7 * w).z, rtol=1e-12)

    def test_zero_weights_rejected(self):
        with pytest.raises(ValueError):
            z_linear([1.0], [0.0])

    def test_minimizer_consistency(self):
        rng = np.random.default_rng(6)
        for _ in range(100):
            g = rng.standard_normal(6)
            w = rng.standard_normal(6)
            res = z_linear(g, w)
            assert res.q_opt @ w >= -1e-9
            assert_allclose(((g - res.q_opt) ** 2).sum(), res.z, atol=1e-9)


class TestQuadKernel:
    def test_feasible(self):
        assert z_quad([0.6, 1.0]).z == 0.0

    def test_d2_value(self):
        assert_allclose(z_quad([1.0, 0.0]).z, 0.5, rtol=1e-14)

    def test_d4_value(self):
        assert_allclose(z_quad([3, 4, 0, 0]).z, 12.5, rtol=1e-14)

    def test_odd_width_rejected(self):
        with pytest.raises(DomainError):
            z_quad([1.0, 2.0, 3.0])

    def test_chi_form_values(self):
        assert z_quad_chi(1.0, 2.0) == 0.0
        assert z_quad_chi(2.0, 1.0) == 0.5
        with pytest.raises(ValueError):
            z_quad_chi(-1.0, 0.0)

    def test_chi_identity_on_random_samples(self):
        rng = np.random.default_rng(7)
        for _ in range(100):
            g = rng.standard_normal(4)
            via_chi = z_quad_chi(float(np.linalg.norm(g[:2])),
                                 float(np.linalg.norm(g[2:])))
            assert z_quad(g).z == via_chi

    def test_minimizer_consistency(self):
        rng = np.random.default_rng(8)
        for _ in range(100):
            g = rng.standard_normal(6)
            res = z_quad(g)
            q = res.q_opt
            assert (q[3:] ** 2).sum() - (q[:3] ** 2).sum() >= -1e-9
            assert_allclose(((g - q) ** 2).sum(), res.z, atol=1e-9)


class TestReluD2:
    def test_branches(self):
        assert z_relu_d2(-1.0, 5.0).z == 0.0
        assert_allclose(z_relu_d2(1.0, -2.0).z, 1.0, rtol=1e-14)
        assert_allclose(z_relu_d2(1.0, 0.0).z, 0.5, rtol=1e-14)

    def test_branch_tags(self):
        assert z_relu_d2(-1.0, 5.0).branch == "slack"
        assert z_relu_d2(1.0, -2.0).branch == "zero-left"
        assert z_relu_d2(1.0, 0.0).branch == "split"

    def test_continuity_at_kinks(self):
        for g1 in (0.3, 1.0, 2.5):
            at_kink = (1 - SQRT2) * g1
            assert_allclose(z_relu_d2(g1, at_kink - 1e-12).z,
                            z_relu_d2(g1, at_kink + 1e-12).z, atol=1e-10)
            assert_allclose(z_relu_d2(g1, g1 - 1e-12).z, 0.0, atol=1e-10)


class TestReluGeneral:
    def test_d2_example(self):
        assert_allclose(z_relu_general([1.0, 0.0]).z, 0.5, rtol=1e-12)

    def test_all_negative_is_feasible(self):
        res = z_relu_general([-1.0, -1.0, -1.0, -1.0])
        assert res.z == 0.0 and res.branch == "feasible"

    def test_d4_matches_oracle_example(self):
        g = [1.0, 1.0, -1.0, -1.0]
        assert_allclose(z_relu_general(g).z, z_relu_oracle(g).z, rtol=1e-12)

    def test_odd_width_rejected(self):
        with pytest.raises(DomainError):
            z_relu_general([1.0, 2.0, 3.0])
        with pytest.raises(DomainError):
            z_relu_general([1.0])

    def test_matches_closed_form_d2(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            g = rng.standard_normal(2)
            want = z_relu_d2(g[0], g[1]).z
            got = z_relu_general(g).z
            assert abs(got - want) <= 1e-10 * max(1.0, want)

    @pytest.mark.parametrize("d", [2, 4, 6])
    def test_oracle_equivalence(self, d):
        rng = np.random.default_rng(20240811 + d)
        for _ in range(1000):
            g = rng.standard_normal(d)
            want = z_relu_oracle(g).z
            got = z_relu_general(g).z
            assert abs(got - want) <= 1e-8 * max(1e-12, want) + 1e-12

    def test_minimizer_is_feasible_and_consistent(self):
        rng = np.random.default_rng(12)
        for d in (2, 4, 8):
            for _ in range(200):
                g = rng.standard_normal(d)
                res = z_relu_general(g)
                assert res.q_opt is not None
                assert relu_constraint_slack(res.q_opt) >= -1e-9
                assert_allclose(((g - res.q_opt) ** 2).sum(), res.z, atol=1e-9)

    def test_batch_matches_scalar(self):
        rng = np.random.default_rng(13)
        G = rng.standard_normal((500, 6))
        z = z_relu_batch(G)
        for i in range(500):
            assert_allclose(z[i], z_relu_general(G[i]).z, atol=1e-12)

    def test_feasibility_zero(self):
        rng = np.random.default_rng(14)
        count = 0
        for _ in range(500):
            g = rng.standard_normal(6)
            if relu_constraint_slack(g) >= 0:
                count += 1
                assert z_relu_general(g).z == 0.0
        assert count > 100   # sanity: the feasible event is common

    def test_dominated_by_distance_to_origin(self):
        rng = np.random.default_rng(15)
        for _ in range(300):
            g = rng.standard_normal(4)
            assert z_relu_general(g).z <= (g ** 2).sum() + 1e-12


class TestReluOracle:
    def test_examples(self):
        assert_allclose(z_relu_oracle([1.0, -2.0]).z, 1.0, rtol=1e-12)
        assert z_relu_oracle([-0.5, -1.0, -2.0, -0.1]).z == 0.0

    def test_matches_closed_form_d2(self):
        rng = np.random.default_rng(16)
        for _ in range(1000):
            g = rng.standard_normal(2)
            want = z_relu_d2(g[0], g[1]).z
            assert abs(z_relu_oracle(g).z - want) <= 1e-10 * max(1.0, want)

    def test_refuses_large_width(self):
        with pytest.raises(ValueError, match="d <= 8"):
            z_relu_oracle(np.zeros(10))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=4, max_size=4),
       st.floats(0.01, 100.0))
def test_scale_equivariance(values, c):
    g = np.array(values)
    for fn in (lambda v: z_quad(v).z, lambda v: z_relu_general(v).z):
        z1, zc = fn(g), fn(c * g)
        assert zc >= 0.0
        assert abs(zc - c * c * z1) <= 1e-9 * max(1.0, abs(zc))


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=2, max_size=2))
def test_relu_d2_nonnegative_and_exact(values):
    g1, g2 = values
    res = z_relu_d2(g1, g2)
    assert res.z >= 0.0
    assert abs(z_relu_general([g1, g2]).z - res.z) <= 1e-10 * max(1.0, res.z)


class TestExpectedZ:
    def test_linear_is_exactly_half(self):
        res = expected_z("linear", 4, "quadrature")
        assert res.value == 0.5 and res.error == 0.0

    def test_quad_d4_matches_closed_form(self):
        want = (2.0 - np.pi / 2.0) / 2.0
        res = expected_z("quad", 4, "quadrature")
        assert abs(res.value - want) <= 1e-6

    def test_relu_d2_quadrature_value(self):
        res = expected_z("relu", 2, "quadrature")
        assert_allclose(res.value, 0.2624604604, atol=1e-6)
        assert_allclose(1.0 / res.value, 3.81, atol=0.01)

    def test_relu_d2_monte_carlo_agrees(self):
        cfg = NumericsConfig(mc_samples=2_000_000, seed=3)
        mc_est = expected_z("relu", 2, "monte-carlo", cfg)
        quad_est = expected_z("relu", 2, "quadrature", cfg)
        assert abs(mc_est.value - quad_est.value) <= 3 * mc_est.error

    def test_unsupported_combination(self):
        with pytest.raises(ValueError, match="monte-carlo"):
            expected_z("relu", 4, "quadrature")
        with pytest.raises(ValueError):
            expected_z("quad", 4, "bogus")
