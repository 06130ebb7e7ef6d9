import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from synthaudit import calibrate_sigma, clip_norm, dp_layer
from synthaudit.mechanism import dp_layer_samples

vectors = hnp.arrays(
    np.float64, st.integers(min_value=1, max_value=12),
    elements=st.floats(min_value=-1e8, max_value=1e8, allow_nan=False, width=64),
)


class TestCalibrateSigma:
    def test_reference_value(self):
        # sqrt(2 ln 125000) evaluated independently to 5 significant digits
        assert calibrate_sigma(1.0, 1e-5, 1.0) == pytest.approx(4.8448, abs=1e-4)

    def test_epsilon_linearity(self):
        assert calibrate_sigma(2.0, 1e-5, 1.0) == pytest.approx(calibrate_sigma(1.0, 1e-5, 1.0) / 2, rel=1e-12)

    def test_clip_linearity(self):
        assert calibrate_sigma(1.0, 1e-5, 3.0) == pytest.approx(3 * calibrate_sigma(1.0, 1e-5, 1.0), rel=1e-12)

    @pytest.mark.parametrize("eps,delta,clip", [
        (0.0, 1e-5, 1.0), (-1.0, 1e-5, 1.0),
        (1.0, 0.0, 1.0), (1.0, 1.0, 1.0), (1.0, -0.1, 1.0),
        (1.0, 1e-5, 0.0), (1.0, 1e-5, -2.0),
    ])
    def test_domain(self, eps, delta, clip):
        with pytest.raises(ValueError):
            calibrate_sigma(eps, delta, clip)

    @given(st.floats(min_value=0.1, max_value=10), st.floats(min_value=1e-8, max_value=0.5),
           st.floats(min_value=0.1, max_value=10))
    def test_monotonicity(self, eps, delta, clip):
        base = calibrate_sigma(eps, delta, clip)
        assert calibrate_sigma(eps * 1.5, delta, clip) < base
        assert calibrate_sigma(eps, min(delta * 1.5, 0.9), clip) < base
        assert calibrate_sigma(eps, delta, clip * 1.5) > base


class TestClipNorm:
    def test_scales_down(self):
        np.testing.assert_allclose(clip_norm([3.0, 4.0], 1.0), [0.6, 0.8], rtol=1e-12)

    def test_short_vector_unchanged(self):
        np.testing.assert_array_equal(clip_norm([0.3, 0.4], 1.0), [0.3, 0.4])

    def test_large_bound_unchanged(self):
        np.testing.assert_array_equal(clip_norm([3.0, 4.0], 10.0), [3.0, 4.0])

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError, match="non-finite"):
            clip_norm([np.inf, 0.0], 1.0)

    def test_bad_clip(self):
        with pytest.raises(ValueError, match="clip"):
            clip_norm([1.0], 0.0)

    @settings(max_examples=200)
    @given(vectors, st.floats(min_value=1e-3, max_value=1e3))
    def test_norm_bounded(self, v, clip):
        out = clip_norm(v, clip)
        assert float(np.linalg.norm(out)) <= clip or float(np.linalg.norm(v)) <= clip

    @settings(max_examples=200)
    @given(vectors, st.floats(min_value=1e-3, max_value=1e3))
    def test_idempotent(self, v, clip):
        once = clip_norm(v, clip)
        np.testing.assert_array_equal(clip_norm(once, clip), once)

    @given(vectors, st.floats(min_value=1e-3, max_value=1e3))
    def test_direction_preserved(self, v, clip):
        out = clip_norm(v, clip)
        assert float(v @ out) >= 0.0


class TestDpLayer:
    def test_zero_sigma_equals_clip(self):
        a = np.array([3.0, 4.0])
        np.testing.assert_array_equal(dp_layer(a, 1.0, 0.0, rng=0), clip_norm(a, 1.0))

    def test_same_seed_identical(self):
        a = np.array([0.5, -2.0, 1.0])
        x = dp_layer(a, 1.0, 1.5, rng=np.random.default_rng(9))
        y = dp_layer(a, 1.0, 1.5, rng=np.random.default_rng(9))
        np.testing.assert_array_equal(x, y)

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError, match="sigma"):
            dp_layer([1.0], 1.0, -0.5, rng=0)

    def test_batch_sampler_matches_single_call(self):
        a = np.array([3.0, 4.0])
        single = dp_layer(a, 1.0, 1.5, rng=np.random.default_rng(5))
        batch = dp_layer_samples(a, 1.0, 1.5, rng=np.random.default_rng(5), count=10)
        np.testing.assert_array_equal(batch[0], single)

    def test_noise_moments(self):
        # per-coordinate mean of 10^6 draws within 4 standard errors of the
        # clipped input (0.6, 0.8); variance within 1% of sigma^2 = 2.25
        a = np.array([3.0, 4.0])
        sigma = 1.5
        n = 1_000_000
        draws = dp_layer_samples(a, 1.0, sigma, rng=np.random.default_rng(1234), count=n)
        se = sigma / np.sqrt(n)
        assert np.all(np.abs(draws.mean(axis=0) - [0.6, 0.8]) < 4 * se)
        assert np.all(np.abs(draws.var(axis=0) - sigma**2) < 0.01 * sigma**2)

    def test_residual_normality_moments(self):
        # skewness and excess kurtosis of 10^6 residuals within +-0.02
        a = np.array([3.0, 4.0])
        draws = dp_layer_samples(a, 1.0, 1.5, rng=np.random.default_rng(77), count=500_000)
        res = (draws - clip_norm(a, 1.0)).ravel()
        z = (res - res.mean()) / res.std()
        assert abs(np.mean(z**3)) < 0.02
        assert abs(np.mean(z**4) - 3.0) < 0.02
