import math

import numpy as np
import pytest
from sklearn.base import clone

from specdens.estimator import (
    MultichannelSamples,
    SmoothedPeriodogram,
    default_frequency_grid,
    estimate_cross_spectrum,
)
from specdens.kernels import tukey_hanning_kernel

from oracles import direct_cosine_sine_sums, direct_cross_spectrum


def test_single_sample_at_zero_frequency():
    samples = MultichannelSamples(np.array([[1.0]]), 1.0)
    est = estimate_cross_spectrum(samples, "tukey-hanning", 0.3, [0.0])
    assert est.values[0, 0, 0] == pytest.approx(1.0 / (2.0 * math.pi), abs=1e-15)
    assert est.real_imag(0, 0, 0.0) == pytest.approx((1.0 / (2.0 * math.pi), 0.0))


def test_zero_beyond_representable_band():
    rng = np.random.default_rng(0)
    samples = MultichannelSamples(rng.standard_normal((50, 2)), 2.0)
    lam = 4.0 * math.pi * samples.sampling_rate
    est = estimate_cross_spectrum(samples, "tukey-hanning", 0.2, [lam])
    assert np.all(est.values[0] == 0.0)


def test_matches_direct_double_sum():
    rng = np.random.default_rng(42)
    X = rng.standard_normal((64, 2))
    samples = MultichannelSamples(X, 2.0)
    freqs = np.array([0.0, 0.5, 1.3])
    est = estimate_cross_spectrum(samples, "tukey-hanning", 0.2, freqs)
    oracle = direct_cross_spectrum(X, 2.0, 0.2, tukey_hanning_kernel(), freqs)
    assert np.abs(est.values - oracle).max() <= 1e-10 * np.abs(oracle).max()


def test_real_imag_match_cosine_sine_sums():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((32, 2))
    samples = MultichannelSamples(X, 1.5)
    lam = 0.9
    est = estimate_cross_spectrum(samples, "tukey-hanning", 0.25, [lam])
    for a1, a2 in [(0, 0), (0, 1), (1, 0), (1, 1)]:
        re, im = est.real_imag(a1, a2, lam)
        cos_sum, sin_sum = direct_cosine_sine_sums(X, 1.5, 0.25, tukey_hanning_kernel(), a1, a2, lam)
        assert re == pytest.approx(cos_sum, abs=1e-12)
        assert im == pytest.approx(sin_sum, abs=1e-12)
    re, im = est.real_imag(0, 0, lam)
    assert im == pytest.approx(0.0, abs=1e-12 * abs(re))


def test_frequency_not_on_grid_errors():
    samples = MultichannelSamples(np.ones((4, 1)), 1.0)
    est = estimate_cross_spectrum(samples, "tukey-hanning", 0.5, [0.0, 1.0])
    with pytest.raises(ValueError, match="not on the estimation grid"):
        est.real_imag(0, 0, 0.5)


def test_symmetries_random_records():
    rng = np.random.default_rng(11)
    for _ in range(10):
        n = int(rng.integers(8, 120))
        r = int(rng.integers(1, 4))
        rho = float(rng.uniform(0.5, 4.0))
        bn = float(rng.uniform(0.05, 0.6))
        X = rng.standard_normal((n, r))
        samples = MultichannelSamples(X, rho)
        base = rng.uniform(0.1, 0.9 * math.pi * rho, size=4)
        freqs = np.unique(np.concatenate([-base, [0.0], base]))
        est = estimate_cross_spectrum(samples, "tukey-hanning", bn, freqs)
        values = est.values
        scale = np.abs(values).max()
        # Hermitian in the channels
        assert np.abs(values - np.conj(np.swapaxes(values, 1, 2))).max() <= 1e-12 * scale
        # conjugate symmetry in frequency
        assert np.abs(values - np.conj(values[::-1])).max() <= 1e-12 * scale
        # real diagonal
        diag = values[:, range(r), range(r)]
        assert np.abs(diag.imag).max() <= 1e-12 * scale


def test_scale_equivariance():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((60, 2))
    freqs = np.array([0.0, 0.4, 1.1])
    base = estimate_cross_spectrum(MultichannelSamples(X, 1.0), "tukey-hanning", 0.2, freqs)
    c = 1.7
    scaled_X = X.copy()
    scaled_X[:, 0] *= c
    scaled = estimate_cross_spectrum(MultichannelSamples(scaled_X, 1.0), "tukey-hanning", 0.2, freqs)
    tol = 1e-12 * np.abs(base.values).max()
    assert np.abs(scaled.values[:, 0, 0] - c**2 * base.values[:, 0, 0]).max() <= c**2 * tol
    assert np.abs(scaled.values[:, 0, 1] - c * base.values[:, 0, 1]).max() <= c * tol
    assert np.abs(scaled.values[:, 1, 1] - base.values[:, 1, 1]).max() <= tol


def test_mean_subtraction_flag():
    rng = np.random.default_rng(9)
    X = rng.standard_normal((40, 2)) + np.array([5.0, -3.0])
    freqs = np.array([0.3, 0.8])
    with_flag = estimate_cross_spectrum(
        MultichannelSamples(X, 1.0), "tukey-hanning", 0.3, freqs, subtract_mean=True
    )
    pre_centered = estimate_cross_spectrum(
        MultichannelSamples(X - X.mean(axis=0), 1.0), "tukey-hanning", 0.3, freqs
    )
    raw = estimate_cross_spectrum(MultichannelSamples(X, 1.0), "tukey-hanning", 0.3, freqs)
    assert np.allclose(with_flag.values, pre_centered.values, atol=1e-15)
    assert not np.allclose(with_flag.values, raw.values)


def test_empty_grid_gives_empty_estimate():
    samples = MultichannelSamples(np.ones((5, 2)), 1.0)
    est = estimate_cross_spectrum(samples, "tukey-hanning", 0.5, [])
    assert est.values.shape == (0, 2, 2)


def test_nonfinite_samples_rejected():
    with pytest.raises(ValueError, match="non-finite"):
        MultichannelSamples(np.array([[1.0], [np.nan]]), 1.0)


def test_grid_validation():
    samples = MultichannelSamples(np.ones((5, 1)), 1.0)
    with pytest.raises(ValueError, match="ascending"):
        estimate_cross_spectrum(samples, "tukey-hanning", 0.5, [1.0, 0.5])


def test_sklearn_interface():
    rng = np.random.default_rng(21)
    X = rng.standard_normal((100, 2))
    model = SmoothedPeriodogram(bandwidth=0.2, sampling_rate=2.0, frequencies=[0.0, 1.0])
    params = model.get_params()
    assert params["kernel"] == "tukey-hanning"
    cloned = clone(model)
    fitted = cloned.fit(X)
    assert fitted is cloned
    assert fitted.spectrum_.shape == (2, 2, 2)
    assert fitted.bandwidth_ == 0.2
    direct = estimate_cross_spectrum(MultichannelSamples(X, 2.0), "tukey-hanning", 0.2, [0.0, 1.0])
    assert np.array_equal(fitted.spectrum_, direct.values)


def test_sklearn_defaults_pick_plan_bandwidth_and_grid():
    rng = np.random.default_rng(2)
    X = rng.standard_normal((256, 1))
    fitted = SmoothedPeriodogram().fit(X)
    assert fitted.frequencies_.shape == (301,)
    assert fitted.frequencies_[1] == pytest.approx(0.01 * math.pi)
    # default plan bandwidth at n=256: 0.25 * 256 ** (-1/3)
    assert fitted.bandwidth_ == pytest.approx(0.25 * 256 ** (-1 / 3))


def test_default_frequency_grid_shape():
    grid = default_frequency_grid()
    assert grid.shape == (301,)
    assert grid[-1] == pytest.approx(3.0 * math.pi)
