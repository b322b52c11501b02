import math

import numpy as np
import pytest
import scipy.stats as st
from hypothesis import given, settings, strategies as hst

from sharedclust.distributions import (
    RngStream,
    log_sum_exp,
    logpdf_beta,
    logpdf_dirichlet,
    logpdf_inverse_wishart,
    logpdf_mvnormal,
    sample_beta,
    sample_categorical,
    sample_dirichlet,
    sample_inverse_wishart,
    sample_mvnormal,
)
from conftest import assert_within_se

N_DRAWS = 100_000


class TestDirichlet:
    def test_symmetric_mean(self):
        rng = RngStream(1)
        total = np.zeros(3)
        for _ in range(N_DRAWS):
            total += sample_dirichlet((1.0, 1.0, 1.0), rng)
        mean = total / N_DRAWS
        assert np.all(np.abs(mean - 1.0 / 3.0) < 0.01)

    def test_concentrated(self):
        # Beta(1e6, 1) has mean 1e6/(1e6+1); mass above 0.99 overwhelming
        rng = RngStream(2)
        hits = sum(sample_dirichlet((1e6, 1.0), rng)[0] > 0.99 for _ in range(2000))
        assert hits / 2000 > 0.99

    def test_degenerate_k1(self):
        assert sample_dirichlet([5.0], RngStream(3)) == pytest.approx([1.0], abs=0)

    def test_moment_four_se(self):
        alpha = np.array([2.0, 3.0, 5.0])
        a0 = alpha.sum()
        rng = RngStream(4)
        draws = np.array([sample_dirichlet(alpha, rng) for _ in range(N_DRAWS)])
        for k in range(3):
            sd = math.sqrt(alpha[k] * (a0 - alpha[k]) / (a0 ** 2 * (a0 + 1)))
            assert_within_se(draws[:, k].mean(), alpha[k] / a0, sd, N_DRAWS)

    def test_simplex_invariants(self):
        rng = RngStream(5)
        for _ in range(100):
            p = sample_dirichlet([0.5, 1.0, 2.0], rng)
            assert np.all(p > 0)
            assert abs(p.sum() - 1.0) < 1e-12

    def test_rejects_bad_alpha(self):
        with pytest.raises(ValueError):
            sample_dirichlet([1.0, 0.0], RngStream(6))
        with pytest.raises(ValueError):
            sample_dirichlet([-1.0], RngStream(6))


class TestBeta:
    @pytest.mark.parametrize("b1,b2,mean", [(1.0, 1.0, 0.5), (1.1, 1.1, 0.5), (8.0, 2.0, 0.8)])
    def test_means(self, b1, b2, mean):
        rng = RngStream(int(b1 * 10 + b2))
        draws = np.array([sample_beta(b1, b2, rng) for _ in range(N_DRAWS)])
        assert abs(draws.mean() - mean) < 0.005
        assert draws.min() >= 1e-12 and draws.max() <= 1.0 - 1e-12

    def test_rejects_bad_shapes(self):
        for b1, b2 in [(0.0, 1.0), (1.0, -2.0)]:
            with pytest.raises(ValueError):
                sample_beta(b1, b2, RngStream(1))


class TestCategorical:
    def test_point_mass(self):
        rng = RngStream(1)
        for _ in range(50):
            assert sample_categorical([0.0, -np.inf, -np.inf], rng) == 0

    def test_frequencies(self):
        logw = np.log([0.2, 0.3, 0.5])
        rng = RngStream(2)
        counts = np.bincount([sample_categorical(logw, rng) for _ in range(N_DRAWS)],
                             minlength=3)
        assert np.all(np.abs(counts / N_DRAWS - [0.2, 0.3, 0.5]) < 0.01)

    def test_constant_weights_uniform(self):
        rng = RngStream(3)
        counts = np.bincount(
            [sample_categorical([-700.0, -700.0, -700.0], rng) for _ in range(N_DRAWS)],
            minlength=3)
        assert np.all(np.abs(counts / N_DRAWS - 1.0 / 3.0) < 0.01)

    # dyadic weights and shifts make the float arithmetic exact, so the
    # drawn index must be bit-identical under a constant shift
    @settings(max_examples=200, deadline=None)
    @given(
        hst.lists(hst.integers(min_value=-400, max_value=400), min_size=2, max_size=8),
        hst.integers(min_value=-(2 ** 20), max_value=2 ** 20),
        hst.integers(min_value=0, max_value=2 ** 32),
    )
    def test_shift_invariance_exact(self, eighths, shift_eighths, seed):
        logw = np.array(eighths, dtype=np.float64) / 8.0
        shifted = logw + shift_eighths / 8.0
        a = sample_categorical(logw, RngStream(seed))
        b = sample_categorical(shifted, RngStream(seed))
        assert a == b

    def test_rejects_all_minus_inf(self):
        with pytest.raises(ValueError):
            sample_categorical([-np.inf, -np.inf], RngStream(1))


class TestMvNormal:
    def test_identity_cov(self):
        rng = RngStream(1)
        draws = np.array([sample_mvnormal([0.0, 0.0], np.eye(2), rng)
                          for _ in range(N_DRAWS)])
        emp_cov = np.cov(draws.T)
        assert np.all(np.abs(emp_cov - np.eye(2)) < 0.02)

    def test_cluster_mean(self):
        cov = np.array([[0.1, -0.03], [-0.03, 0.1]])
        rng = RngStream(2)
        draws = np.array([sample_mvnormal([1.1, 1.1], cov, rng) for _ in range(N_DRAWS)])
        assert np.all(np.abs(draws.mean(axis=0) - 1.1) < 0.01)

    def test_scalar_variance(self):
        rng = RngStream(3)
        draws = np.array([sample_mvnormal([5.0], [[4.0]], rng)[0] for _ in range(N_DRAWS)])
        assert abs(draws.var(ddof=1) - 4.0) < 0.1

    def test_rejects_non_spd(self):
        with pytest.raises(ValueError):
            sample_mvnormal([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]], RngStream(1))
        with pytest.raises(ValueError):
            sample_mvnormal([0.0, 0.0], [[1.0, 0.5], [0.4, 1.0]], RngStream(1))


class TestInverseWishart:
    def test_scalar_is_inverse_gamma(self):
        # q=1, scale s, dof v reduces to InvGamma(v/2, s/2) with mean s/(v-2)
        rng = RngStream(1)
        draws = np.array([sample_inverse_wishart([[8.0]], 10.0, rng)[0, 0]
                          for _ in range(N_DRAWS)])
        assert abs(draws.mean() - 1.0) < 0.02

    def test_matrix_mean(self):
        rng = RngStream(2)
        total = np.zeros((2, 2))
        for _ in range(N_DRAWS):
            total += sample_inverse_wishart(np.eye(2), 10.0, rng)
        mean = total / N_DRAWS
        assert np.all(np.abs(mean - np.eye(2) / 7.0) < 0.03 / 7.0 + 0.003)

    def test_draws_positive_definite(self):
        rng = RngStream(3)
        for _ in range(200):
            w = sample_inverse_wishart(np.array([[2.0, 0.3], [0.3, 1.0]]), 4.0, rng)
            assert np.linalg.det(w) > 0
            assert np.allclose(w, w.T)

    def test_rejects_small_dof(self):
        with pytest.raises(ValueError):
            sample_inverse_wishart(np.eye(3), 1.5, RngStream(1))


class TestLogPdfs:
    def test_mvnormal_at_mean(self):
        for q in (1, 2, 5):
            val = logpdf_mvnormal(np.zeros(q), np.zeros(q), np.eye(q))
            assert val == pytest.approx(-0.5 * q * math.log(2 * math.pi), rel=1e-12)

    def test_standard_normal_at_zero(self):
        assert logpdf_mvnormal([0.0], [0.0], [[1.0]]) == pytest.approx(-0.9189385, abs=1e-6)

    def test_two_by_two_closed_form(self):
        # hand inverse of [[2, .5], [.5, 1]]
        cov = np.array([[2.0, 0.5], [0.5, 1.0]])
        det = 2.0 * 1.0 - 0.25
        inv = np.array([[1.0, -0.5], [-0.5, 2.0]]) / det
        x = np.array([1.0, 1.0])
        expected = -math.log(2 * math.pi) - 0.5 * math.log(det) - 0.5 * x @ inv @ x
        assert logpdf_mvnormal(x, np.zeros(2), cov) == pytest.approx(expected, rel=1e-12)

    def test_cov_scaling_shift(self):
        # scaling cov by c changes logpdf by -(q/2) ln c and rescales the quadratic
        x, mean = np.array([1.3]), np.array([0.2])
        base = logpdf_mvnormal(x, mean, [[2.0]])
        scaled = logpdf_mvnormal(x, mean, [[2.0 * 4.0]])
        quad = (1.3 - 0.2) ** 2 / 2.0
        assert scaled == pytest.approx(base - 0.5 * math.log(4.0) + 0.5 * quad * (1 - 0.25),
                                       rel=1e-12)

    def test_against_scipy(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            q = int(rng.integers(1, 4))
            a = rng.normal(size=(q, q))
            cov = a @ a.T + q * np.eye(q)
            x = rng.normal(size=q)
            mean = rng.normal(size=q)
            assert logpdf_mvnormal(x, mean, cov) == pytest.approx(
                st.multivariate_normal.logpdf(x, mean, cov), rel=1e-10)

    def test_inverse_wishart_against_scipy(self):
        w = np.array([[0.7, 0.1], [0.1, 0.4]])
        t = np.array([[2.0, 0.3], [0.3, 1.5]])
        assert logpdf_inverse_wishart(w, t, 6.5) == pytest.approx(
            st.invwishart.logpdf(w, 6.5, t), rel=1e-10)

    def test_beta_dirichlet_against_scipy(self):
        assert logpdf_beta(0.37, 1.1, 2.3) == pytest.approx(
            st.beta.logpdf(0.37, 1.1, 2.3), rel=1e-12)
        assert logpdf_beta(1.2, 1.0, 1.0) == -np.inf
        assert logpdf_beta(0.0, 2.0, 2.0) == -np.inf
        p, a = np.array([0.2, 0.3, 0.5]), np.array([1.0, 2.0, 3.0])
        assert logpdf_dirichlet(p, a) == pytest.approx(st.dirichlet.logpdf(p, a), rel=1e-12)


class TestLogSumExp:
    def test_basics(self):
        assert log_sum_exp([0.0, 0.0]) == pytest.approx(math.log(2), rel=1e-15)
        assert log_sum_exp([-1000.0, -1000.0]) == pytest.approx(-1000 + math.log(2), rel=1e-15)
        assert log_sum_exp([0.0, -np.inf]) == 0.0
        assert log_sum_exp([-np.inf, -np.inf]) == -np.inf

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            log_sum_exp([])

    @settings(max_examples=100, deadline=None)
    @given(hst.lists(hst.floats(min_value=-1e6, max_value=700), min_size=1, max_size=20))
    def test_matches_direct_sum(self, vals):
        v = np.array(vals)
        direct = math.log(np.exp(v - v.max()).sum()) + v.max()
        assert log_sum_exp(v) == pytest.approx(direct, rel=1e-12)


class TestDeterminism:
    def test_bitwise_repeatable(self):
        def draw_all(seed):
            rng = RngStream(seed)
            return (
                sample_dirichlet([1.0, 2.0], rng),
                sample_beta(2.0, 3.0, rng),
                sample_categorical([0.0, -1.0], rng),
                sample_mvnormal([0.0, 1.0], np.eye(2), rng),
                sample_inverse_wishart(np.eye(2), 5.0, rng),
            )

        a = draw_all(123)
        b = draw_all(123)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_distinct_seeds_differ(self):
        a = sample_mvnormal([0.0], [[1.0]], RngStream(1))
        b = sample_mvnormal([0.0], [[1.0]], RngStream(2))
        assert a != b
