import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lowrank import (
    LowRankFactors,
    ParameterError,
    ShapeError,
    empirical_deviation,
    exact_svd,
    gaussian_matrix,
    perturbation_bound,
    softmax,
    softmax_jacobian,
    split_factors,
    truncate_svd,
)
from oracles import finite_difference_jacobian, spectral_norm_dense


class TestSoftmax:
    def test_uniform_logits(self):
        assert np.allclose(softmax(np.zeros(4)), 0.25)

    def test_two_class_closed_form(self):
        p = softmax(np.array([np.log(2.0), 0.0]))
        assert np.allclose(p, [2.0 / 3.0, 1.0 / 3.0])

    def test_shift_invariance(self):
        logits = np.array([0.3, -1.2, 2.5])
        assert np.allclose(softmax(logits), softmax(logits + 100.0))

    def test_huge_logits_do_not_overflow(self):
        p = softmax(np.array([1000.0, 0.0]))
        assert p[0] == pytest.approx(1.0)
        assert np.isfinite(p).all()

    @settings(max_examples=50, deadline=None)
    @given(
        st.lists(
            st.floats(min_value=-50.0, max_value=50.0, allow_nan=False),
            min_size=1,
            max_size=10,
        )
    )
    def test_output_is_a_probability_vector(self, logits):
        p = softmax(np.array(logits))
        assert p.sum() == pytest.approx(1.0, abs=1e-12)
        assert np.all(p > 0)
        assert np.all(p <= 1.0)


class TestJacobian:
    def test_two_class_uniform_point(self):
        jac = softmax_jacobian(np.zeros(2))
        assert np.allclose(jac, [[0.25, -0.25], [-0.25, 0.25]])

    def test_symmetric_with_zero_row_sums(self):
        jac = softmax_jacobian(np.array([0.1, -2.0, 1.3, 0.4]))
        assert np.allclose(jac, jac.T)
        assert np.abs(jac.sum(axis=1)).max() < 1e-14

    def test_matches_finite_differences(self):
        rng = np.random.Generator(np.random.Philox(key=5))
        for _ in range(25):
            logits = rng.uniform(-4.0, 4.0, size=int(rng.integers(2, 11)))
            jac = softmax_jacobian(logits)
            approx = finite_difference_jacobian(softmax, logits)
            assert np.abs(jac - approx).max() < 1e-6

    def test_absolute_row_sums_never_exceed_half(self):
        rng = np.random.Generator(np.random.Philox(key=6))
        for _ in range(200):
            logits = rng.uniform(-30.0, 30.0, size=int(rng.integers(2, 12)))
            p = softmax(logits)
            row_sums = np.abs(softmax_jacobian(logits)).sum(axis=1)
            assert np.allclose(row_sums, 2.0 * p * (1.0 - p), atol=1e-14)
            assert row_sums.max() <= 0.5 + 1e-15

    def test_row_sum_peaks_at_a_balanced_pair(self):
        row_sums = np.abs(softmax_jacobian(np.zeros(2))).sum(axis=1)
        assert np.allclose(row_sums, 0.5)


class TestLogitAndContractionSteps:
    """The certificate chains two elementary inequalities; each is checked
    on its own here."""

    def test_logit_shift_bounded_by_radius_times_spectral_norm(self):
        rng = np.random.Generator(np.random.Philox(key=7))
        for _ in range(50):
            c, d = int(rng.integers(2, 8)), int(rng.integers(2, 10))
            w = rng.standard_normal((c, d))
            delta = rng.standard_normal((c, d)) * 10.0 ** rng.uniform(-3, 0)
            radius = float(rng.uniform(0.1, 3.0))
            h = rng.standard_normal(d)
            h *= radius / np.linalg.norm(h)
            logit_shift = np.abs(delta @ h).max()
            assert logit_shift <= radius * spectral_norm_dense(delta) * (1.0 + 1e-12)

    def test_softmax_is_a_half_contraction_in_infinity_norm(self):
        rng = np.random.Generator(np.random.Philox(key=8))
        for _ in range(300):
            n = int(rng.integers(2, 12))
            a = rng.uniform(-10.0, 10.0, size=n)
            b = a + rng.uniform(-5.0, 5.0, size=n)
            deviation = np.abs(softmax(a) - softmax(b)).max()
            assert deviation <= 0.5 * np.abs(a - b).max() + 1e-15


class TestPerturbationBound:
    def test_zero_when_factors_are_lossless(self):
        w = gaussian_matrix(6, 9, seed=1)
        pair = split_factors(exact_svd(w))
        assert perturbation_bound(w, pair, radius=2.0) < 1e-12

    def test_rank_one_difference_closed_form(self):
        w = np.zeros((2, 3))
        w_tilde = np.array([[2.0, 0.0, 0.0], [0.0, 0.0, 0.0]])
        assert perturbation_bound(w, w_tilde, radius=3.0) == pytest.approx(3.0, rel=1e-7)

    def test_truncation_bound_is_half_radius_times_dropped_value(self):
        w = gaussian_matrix(10, 12, seed=3)
        f = exact_svd(w)
        pair = split_factors(truncate_svd(f, 4))
        bound = perturbation_bound(w, pair, radius=2.0, rel_tol=1e-10)
        assert bound == pytest.approx(float(f.s[4]), rel=1e-8)

    def test_radius_must_be_positive(self):
        w = gaussian_matrix(3, 3, seed=0)
        with pytest.raises(ParameterError):
            perturbation_bound(w, w, radius=0.0)

    def test_shape_mismatch_rejected(self):
        w = gaussian_matrix(3, 4, seed=0)
        with pytest.raises(ShapeError):
            perturbation_bound(w, gaussian_matrix(3, 5, seed=0), radius=1.0)


class TestEmpiricalDeviation:
    def test_identical_weights_have_zero_deviation(self):
        w = gaussian_matrix(5, 7, seed=11)
        features = gaussian_matrix(4, 7, seed=12)
        report = empirical_deviation(w, w.copy(), None, features)
        assert report.empirical_max_dev == 0.0
        assert report.theoretical_bound == 0.0
        assert report.samples_tested == 4

    def test_two_class_rank_one_case_is_exact(self):
        w = np.array([[1.0], [0.0]])
        w_tilde = np.array([[0.6], [0.0]])
        feature = np.array([1.0])
        report = empirical_deviation(w, w_tilde, None, feature, radius=1.0)
        expected = softmax(np.array([0.6, 0.0]))[0] - softmax(np.array([1.0, 0.0]))[0]
        assert report.empirical_max_dev == pytest.approx(abs(expected), abs=1e-12)
        assert report.spectral_error == pytest.approx(0.4, rel=1e-7)
        assert report.empirical_max_dev <= report.theoretical_bound + 1e-10

    def test_bias_shifts_logits_but_not_the_certificate(self):
        w = gaussian_matrix(6, 8, seed=21)
        pair = split_factors(truncate_svd(exact_svd(w), 3))
        features = gaussian_matrix(10, 8, seed=22)
        bias = gaussian_matrix(6, 1, seed=23)[:, 0]
        with_bias = empirical_deviation(w, pair, bias, features)
        without = empirical_deviation(w, pair, None, features)
        assert with_bias.theoretical_bound == pytest.approx(without.theoretical_bound)
        assert with_bias.empirical_max_dev <= with_bias.theoretical_bound + 1e-10

    def test_default_radius_is_the_largest_feature_norm(self):
        w = gaussian_matrix(4, 5, seed=31)
        features = gaussian_matrix(6, 5, seed=32)
        report = empirical_deviation(w, w, None, features)
        assert report.radius == pytest.approx(
            float(np.linalg.norm(features, axis=1).max())
        )

    def test_feature_outside_radius_is_named(self):
        w = gaussian_matrix(3, 4, seed=41)
        features = np.vstack([np.zeros(4), np.full(4, 10.0)])
        features[0, 0] = 0.1
        with pytest.raises(ParameterError, match="feature 1"):
            empirical_deviation(w, w, None, features, radius=1.0)

    def test_feature_on_the_sphere_is_accepted(self):
        w = gaussian_matrix(3, 4, seed=42)
        h = gaussian_matrix(1, 4, seed=43)[0]
        h *= 2.0 / np.linalg.norm(h)
        report = empirical_deviation(w, w, None, h, radius=2.0)
        assert report.samples_tested == 1

    def test_bias_length_checked(self):
        w = gaussian_matrix(3, 4, seed=44)
        with pytest.raises(ShapeError):
            empirical_deviation(w, w, np.zeros(5), np.ones(4))

    def test_fuzz_never_violates_the_certificate(self):
        rng = np.random.Generator(np.random.Philox(key=99))
        for _ in range(300):
            c = int(rng.integers(2, 8))
            d = int(rng.integers(2, 12))
            w = rng.standard_normal((c, d))
            rank = int(rng.integers(1, min(c, d) + 1))
            pair = split_factors(truncate_svd(exact_svd(w), rank))
            count = int(rng.integers(1, 5))
            features = rng.standard_normal((count, d))
            bias = rng.standard_normal(c) if rng.random() < 0.5 else None
            report = empirical_deviation(w, pair, bias, features)
            assert report.empirical_max_dev <= report.theoretical_bound + 1e-10
