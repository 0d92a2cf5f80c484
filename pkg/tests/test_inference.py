import math

import numpy as np
import pytest
from scipy.special import zeta

from specdens.estimator import MultichannelSamples, estimate_cross_spectrum
from specdens.inference import (
    confidence_interval,
    limiting_covariance,
    normal_quantile,
    normalized_stats,
    power_tail_sum,
    predicted_bias,
)

B = 0.375


def random_hermitian(rng):
    phi11 = rng.uniform(0.2, 2.0)
    phi22 = rng.uniform(0.2, 2.0)
    phi12 = complex(rng.normal(), rng.normal()) * 0.3
    return np.array([[phi11, phi12], [np.conj(phi12), phi22]], dtype=complex)


def test_diagonal_block_away_from_zero():
    phi = np.array([[0.7, 0.0], [0.0, 0.4]], dtype=complex)
    block = limiting_covariance(phi, (0, 0, 0, 0), 1.3, 1.3, B)
    assert block.rr == pytest.approx(2.0 * B * 0.7**2, abs=1e-15)
    assert block.ii == 0.0
    assert block.ri == 0.0
    assert block.ir == 0.0


def test_block_zero_when_frequencies_unrelated():
    rng = np.random.default_rng(0)
    phi = random_hermitian(rng)
    block = limiting_covariance(phi, (0, 1, 0, 1), 1.0, 2.0, B)
    assert (block.rr, block.ri, block.ir, block.ii) == (0.0, 0.0, 0.0, 0.0)


def test_block_doubles_at_zero_frequency():
    phi = np.array([[0.7, 0.0], [0.0, 0.4]], dtype=complex)
    block = limiting_covariance(phi, (0, 0, 0, 0), 0.0, 0.0, B)
    assert block.rr == pytest.approx(4.0 * B * 0.7**2, abs=1e-15)


def test_mirrored_frequencies_change_sign_structure():
    rng = np.random.default_rng(1)
    phi = random_hermitian(rng)
    same = limiting_covariance(phi, (0, 1, 0, 1), 0.8, 0.8, B)
    mirrored = limiting_covariance(phi, (0, 1, 0, 1), 0.8, -0.8, B)
    assert mirrored.rr == pytest.approx(same.rr, abs=1e-15)
    assert mirrored.ii == pytest.approx(-same.ii, abs=1e-15)
    assert mirrored.ir == pytest.approx(-same.ir, abs=1e-15)
    assert mirrored.ri == pytest.approx(same.ri, abs=1e-15)


def test_cross_pair_blocks_match_studentizing_radicands():
    rng = np.random.default_rng(2)
    for _ in range(50):
        phi = random_hermitian(rng)
        p11, p22 = phi[0, 0].real, phi[1, 1].real
        re12, im12 = phi[0, 1].real, phi[0, 1].imag
        block = limiting_covariance(phi, (0, 1, 0, 1), 0.9, 0.9, B)
        assert block.rr == pytest.approx(B * (p11 * p22 + re12**2 - im12**2), abs=1e-12)
        assert block.ii == pytest.approx(B * (p11 * p22 - re12**2 + im12**2), abs=1e-12)


def test_channel_out_of_range():
    phi = np.eye(2, dtype=complex)
    with pytest.raises(ValueError, match="out of range"):
        limiting_covariance(phi, (0, 2, 0, 1), 1.0, 1.0, B)


def synthetic_estimate(matrices, freqs, n, bandwidth):
    from specdens.estimator import SpectralEstimate

    return SpectralEstimate(
        frequencies=np.asarray(freqs, dtype=float),
        values=np.asarray(matrices, dtype=complex),
        n_samples=n,
        bandwidth=bandwidth,
        sampling_rate=10.0,
        kernel_name="tukey-hanning",
        variance_constant=B,
    )


def test_stats_zero_when_estimate_equals_reference():
    phi = np.array([[0.5, 0.1 + 0.05j], [0.1 - 0.05j, 0.4]])
    est = synthetic_estimate([phi], [1.0], 400, 0.2)
    stats = normalized_stats(est, phi, 1.0)
    assert stats.auto1 == 0.0
    assert stats.auto2 == 0.0
    assert stats.cross_re == 0.0
    assert stats.cross_im == 0.0


def test_cross_im_invalid_at_zero_and_denominator_doubles():
    value = 1.0 / (2.0 * math.pi)
    n, bandwidth = 1000, 0.25
    delta = math.sqrt(2.0 * B / (n * bandwidth)) * value
    phi_hat = np.array([[value, 0.0], [0.0, value]], dtype=complex)
    truth = phi_hat.copy()
    truth[0, 0] -= delta

    est = synthetic_estimate([phi_hat, phi_hat], [0.0, 1.0], n, bandwidth)
    away = normalized_stats(est, truth, 1.0)
    assert away.auto1 == pytest.approx(1.0, abs=1e-12)
    at_zero = normalized_stats(est, truth, 0.0)
    assert at_zero.auto1 == pytest.approx(1.0 / math.sqrt(2.0), abs=1e-12)
    assert math.isnan(at_zero.cross_im)
    assert not math.isnan(away.cross_im)


def test_nonpositive_radicand_flagged_not_zeroed():
    phi_hat = np.array([[0.2, 0.1 + 0.9j], [0.1 - 0.9j, 0.2]], dtype=complex)
    est = synthetic_estimate([phi_hat], [0.5], 500, 0.2)
    stats = normalized_stats(est, np.zeros((2, 2)), 0.5)
    # auto radicands stay positive, the cross_re one goes negative here
    assert math.isnan(stats.cross_re)
    assert not math.isnan(stats.auto1)


def test_stats_require_two_channels():
    est = synthetic_estimate(np.ones((1, 3, 3)), [0.0], 100, 0.2)
    with pytest.raises(ValueError, match="two-channel"):
        normalized_stats(est, np.eye(2), 0.0)


def test_normal_quantile_and_level_validation():
    assert normal_quantile(0.975) == pytest.approx(1.959964, abs=1e-6)
    with pytest.raises(ValueError):
        normal_quantile(1.2)
    with pytest.raises(ValueError):
        confidence_interval(0.0, 1.0, 100, 0.1, level=0.0)
    with pytest.raises(ValueError):
        confidence_interval(0.0, -1.0, 100, 0.1)


def test_confidence_interval_worked_example():
    est = 0.159155
    variance = 2.0 * B * est**2
    lo, hi = confidence_interval(est, variance, 1000, 0.25, level=0.95)
    assert lo == pytest.approx(0.14206945, abs=1e-5)
    assert hi == pytest.approx(0.17624055, abs=1e-5)


def test_confidence_interval_degenerate():
    assert confidence_interval(0.3, 0.0, 100, 0.1) == (0.3, 0.3)


def test_power_tail_sum():
    assert power_tail_sum(2.0) == pytest.approx(math.pi**2 / 3.0, abs=1e-9)
    for p in (1.5, 3.0, 2.5):
        assert power_tail_sum(p) == pytest.approx(2.0 * zeta(p), rel=1e-12)
    with pytest.raises(ValueError):
        power_tail_sum(1.0)


def exponential_cov(gain, rate):
    return lambda t: gain**2 / (2.0 * rate) * math.exp(-rate * abs(t))


@pytest.mark.parametrize("lam", [0.0, 0.7])
def test_smoothing_term_against_closed_form(lam):
    gain, rate = 1.3, 0.9
    cov = exponential_cov(gain, rate)
    # integral |t|^2 cov(t) exp(-i t lam) dt = 2 gain^2 / rate * Re (rate + i lam)^-3
    closed = 2.0 * gain**2 / rate * (1.0 / (rate + 1j * lam) ** 3).real
    terms = predicted_bias(
        cov,
        lam,
        smoothness_order=2.0,
        smoothness_coefficient=math.pi**2 / 4.0,
        decay_order=2.0,
        decay_limit=0.0,
        bandwidth=0.025,
        sampling_rate=18.0,
        n_samples=10_000,
    )
    want = -(math.pi**2 / 4.0) / (2.0 * math.pi) * closed * (18.0 * 0.025) ** 2
    assert terms.smoothing == pytest.approx(want, abs=1e-8)


def test_smoothing_term_vanishes_with_bandwidth():
    cov = exponential_cov(1.0, 1.0)
    wide = predicted_bias(cov, 0.5, 2.0, 2.0, 2.0, 0.0, 0.1, 10.0, 1000)
    narrow = predicted_bias(cov, 0.5, 2.0, 2.0, 2.0, 0.0, 1e-4, 10.0, 1000)
    assert abs(narrow.smoothing) < 1e-5 * abs(wide.smoothing)


def test_bias_terms_total_and_folding():
    cov = exponential_cov(1.0, 1.0)
    terms = predicted_bias(cov, 0.0, 2.0, 2.0, 2.0, 1.0 / math.pi, 0.025, 18.0, 10_000)
    assert terms.total == pytest.approx(terms.smoothing + terms.finite_record + terms.folding)
    want_folding = (1.0 / math.pi) / (2.0 * math.pi) ** 2 * (math.pi**2 / 3.0) / 18.0**2
    assert terms.folding == pytest.approx(want_folding, rel=1e-9)


def test_quadrature_failure_raises():
    heavy_tail = lambda t: 1.0 / (1.0 + abs(t)) ** 0.5
    with pytest.raises(ValueError, match="quadrature"):
        predicted_bias(heavy_tail, 0.0, 2.0, 2.0, 2.0, 0.0, 0.025, 18.0, 10_000)


def test_bias_component_argument():
    model_cov = exponential_cov(1.0, 1.0)
    with pytest.raises(ValueError, match="component"):
        predicted_bias(model_cov, 0.0, 2.0, 2.0, 2.0, 0.0, 0.025, 18.0, 100, component="abs")


def test_imaginary_component_of_asymmetric_covariance():
    # one-sided exponential: C(t) = exp(-t) for t >= 0, 0 otherwise
    cov = lambda t: math.exp(-t) if t >= 0 else 0.0
    lam = 0.9
    # integral |t| C e^{-i t lam} dt = 1 / (1 + i lam)^2
    closed = (1.0 / (1.0 + 1j * lam) ** 2).imag
    terms = predicted_bias(cov, lam, 1.0, 1.0, 2.0, 0.0, 0.01, 5.0, 1000, component="im")
    want = -closed / (2.0 * math.pi) * (5.0 * 0.01)
    assert terms.smoothing == pytest.approx(want, abs=1e-10)


def test_plug_in_variance_round_trip_with_estimator():
    """The studentizing radicands equal the covariance blocks at plug-in spectra."""
    rng = np.random.default_rng(8)
    X = rng.standard_normal((300, 2))
    est = estimate_cross_spectrum(MultichannelSamples(X, 2.0), "tukey-hanning", 0.2, [0.7])
    phi = est.at(0.7)
    auto_block = limiting_covariance(phi, (0, 0, 0, 0), 0.7, 0.7, est.variance_constant)
    assert auto_block.rr == pytest.approx(2 * est.variance_constant * phi[0, 0].real ** 2, rel=1e-12)
