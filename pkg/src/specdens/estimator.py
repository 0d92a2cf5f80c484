"""Smoothed-periodogram estimation of spectra and cross-spectra.

The estimator evaluated here is, for channels ``a1, a2`` and frequency
``lam`` (radians per unit time of the continuous process),

    (2 pi n rho)**-1 * sum_{t1, t2} K(b * (t1 - t2)) *
        X_a1(t1 / rho) * X_a2(t2 / rho) * exp(-1j * (t1 - t2) * lam / rho)

restricted to ``|lam| <= pi * rho``, with ``t1, t2`` ranging over ``1..n``.
It is computed in the algebraically equivalent lag form

    (2 pi rho)**-1 * sum_{|u| <= U} K(b u) * chat_a1a2(u) * exp(-1j u lam / rho)

where ``chat_a1a2(u) = n**-1 * sum_t X_a1((t+u)/rho) * X_a2(t/rho)`` and
``U`` is capped by the kernel support, which brings the cost down to
``O(r**2 n U + r**2 U F)``.  The direct double sum survives only as a test
oracle.  No mean is subtracted by default (the processes of interest are
zero mean); ``subtract_mean=True`` is the escape hatch for field data.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from sklearn.base import BaseEstimator

from ._validation import check_channel, check_frequency_grid, check_positive, check_sample_array
from .kernels import Kernel, get_kernel, variance_constant
from .rates import default_plan

__all__ = [
    "MultichannelSamples",
    "SmoothedPeriodogram",
    "SpectralEstimate",
    "default_frequency_grid",
    "estimate_cross_spectrum",
]


@dataclass(frozen=True)
class MultichannelSamples:
    """Uniformly spaced samples of an ``r``-channel record.

    ``data[t, a]`` holds channel ``a`` sampled at time ``(t + 1) / sampling_rate``
    (sampling starts one step after the time origin).
    """

    data: np.ndarray
    sampling_rate: float

    def __post_init__(self):
        object.__setattr__(self, "data", check_sample_array(self.data))
        object.__setattr__(self, "sampling_rate", check_positive("sampling_rate", self.sampling_rate))

    @property
    def n_samples(self) -> int:
        return self.data.shape[0]

    @property
    def n_channels(self) -> int:
        return self.data.shape[1]


def default_frequency_grid(n_points: int = 301, step: float = 0.01 * math.pi) -> np.ndarray:
    """Uniform grid ``0, step, ..., (n_points - 1) * step``.

    The default covers [0, 3 pi] at spacing pi / 100, the grid used by the
    bundled simulation study.
    """
    return np.arange(n_points) * step


@dataclass
class SpectralEstimate:
    """Cross-spectral matrix estimate over a frequency grid.

    ``values[f, a1, a2]`` is the estimate for the channel pair ``(a1, a2)``
    at ``frequencies[f]``.  The matrix is Hermitian at every frequency and
    identically zero for ``|lam| > pi * sampling_rate``.
    """

    frequencies: np.ndarray
    values: np.ndarray
    n_samples: int
    bandwidth: float
    sampling_rate: float
    kernel_name: str
    variance_constant: float = field(repr=False)

    @property
    def n_channels(self) -> int:
        return self.values.shape[1]

    def _freq_index(self, lam: float) -> int:
        hits = np.nonzero(self.frequencies == float(lam))[0]
        if hits.size == 0:
            raise ValueError(f"frequency {lam!r} is not on the estimation grid")
        return int(hits[0])

    def at(self, lam: float) -> np.ndarray:
        """The r x r spectral matrix at grid frequency ``lam``."""
        return self.values[self._freq_index(lam)]

    def pair(self, a1: int, a2: int) -> np.ndarray:
        """Complex series for channel pair ``(a1, a2)`` over the whole grid."""
        a1 = check_channel(a1, self.n_channels)
        a2 = check_channel(a2, self.n_channels)
        return self.values[:, a1, a2]

    def real_imag(self, a1: int, a2: int, lam: float) -> tuple[float, float]:
        """Real and imaginary components for ``(a1, a2)`` at grid frequency ``lam``.

        These coincide with the cosine and sine double sums over the raw
        samples; the diagonal imaginary part is zero.
        """
        a1 = check_channel(a1, self.n_channels)
        a2 = check_channel(a2, self.n_channels)
        value = self.values[self._freq_index(lam), a1, a2]
        return float(value.real), float(value.imag)


def _lagged_products(X: np.ndarray, max_lag: int) -> np.ndarray:
    """``chat[a, b, u] = sum_t X[t + u, a] * X[t, b] / n`` for ``u = 0..max_lag``.

    Negative lags follow from ``chat_ab(-u) == chat_ba(u)``.
    """
    n, r = X.shape
    chat = np.empty((r, r, max_lag + 1))
    for u in range(max_lag + 1):
        # plain einsum keeps a fixed summation order, so results are
        # bitwise independent of BLAS/worker thread counts
        chat[:, :, u] = np.einsum("ta,tb->ab", X[u:], X[: n - u]) / n
    return chat


def estimate_cross_spectrum(
    samples: MultichannelSamples,
    kernel: Kernel | str,
    bandwidth: float,
    frequencies,
    subtract_mean: bool = False,
) -> SpectralEstimate:
    """Estimate the spectral density matrix on a frequency grid.

    Parameters
    ----------
    samples : MultichannelSamples
        The record to analyze.
    kernel : Kernel or str
        Covariance-averaging kernel (instance or registered name).
    bandwidth : float
        Kernel bandwidth ``b``; lags beyond ``support_radius / b`` get zero
        weight.
    frequencies : array-like
        Strictly ascending grid, in radians per unit time of the underlying
        continuous process (the grid does not rescale with the sampling
        rate).  May be empty.
    subtract_mean : bool
        Subtract the per-channel sample mean first.  Off by default.

    Returns
    -------
    SpectralEstimate
    """
    kernel = get_kernel(kernel)
    bandwidth = check_positive("bandwidth", bandwidth)
    freqs = check_frequency_grid(frequencies)
    X = samples.data
    if subtract_mean:
        X = X - X.mean(axis=0)
    n, r = X.shape
    rho = samples.sampling_rate

    if freqs.size == 0:
        empty = np.zeros((0, r, r), dtype=complex)
        return SpectralEstimate(
            frequencies=freqs,
            values=empty,
            n_samples=n,
            bandwidth=bandwidth,
            sampling_rate=rho,
            kernel_name=kernel.name,
            variance_constant=variance_constant(kernel),
        )

    if math.isfinite(kernel.support_radius):
        max_lag = min(n - 1, int(math.ceil(kernel.support_radius / bandwidth)))
    else:
        max_lag = n - 1
    lags = np.arange(max_lag + 1)
    weights = kernel(bandwidth * lags)
    chat = _lagged_products(X, max_lag)

    weighted = weights * chat
    phase = np.exp(-1j * np.outer(freqs, lags[1:]) / rho)
    positive = np.einsum("abu,fu->fab", weighted[:, :, 1:], phase)
    values = positive + np.conj(np.swapaxes(positive, 1, 2)) + weighted[:, :, 0][None, :, :]
    values /= 2.0 * np.pi * rho
    values[np.abs(freqs) > np.pi * rho] = 0.0

    return SpectralEstimate(
        frequencies=freqs,
        values=values,
        n_samples=n,
        bandwidth=bandwidth,
        sampling_rate=rho,
        kernel_name=kernel.name,
        variance_constant=variance_constant(kernel),
    )


class SmoothedPeriodogram(BaseEstimator):
    """Spectral density matrix estimator with a scikit-learn style interface.

    Parameters
    ----------
    kernel : str or Kernel, default "tukey-hanning"
        Covariance-averaging kernel.
    bandwidth : float or None
        Kernel bandwidth.  ``None`` selects the default rate plan's
        bandwidth at the observed sample count.
    sampling_rate : float, default 1.0
        Samples per unit time of the underlying continuous process.
    frequencies : array-like or None
        Evaluation grid in radians per unit time; ``None`` selects the
        default grid over [0, 3 pi].
    subtract_mean : bool, default False
        Subtract per-channel sample means before estimation.

    Attributes
    ----------
    estimate_ : SpectralEstimate
        Full estimate produced by :meth:`fit`.
    spectrum_ : ndarray of shape (n_frequencies, r, r)
        Complex spectral matrices (view into ``estimate_``).
    frequencies_ : ndarray
        Grid actually used.
    bandwidth_ : float
        Bandwidth actually used.
    """

    def __init__(
        self,
        kernel="tukey-hanning",
        bandwidth=None,
        sampling_rate=1.0,
        frequencies=None,
        subtract_mean=False,
    ):
        self.kernel = kernel
        self.bandwidth = bandwidth
        self.sampling_rate = sampling_rate
        self.frequencies = frequencies
        self.subtract_mean = subtract_mean

    def fit(self, X, y=None):
        """Estimate the spectral matrix of the record ``X``.

        ``X`` has one row per time point and one column per channel.
        """
        X = check_sample_array(X)
        samples = MultichannelSamples(X, self.sampling_rate)
        if self.bandwidth is None:
            bandwidth, _ = default_plan().evaluate(samples.n_samples)
        else:
            bandwidth = self.bandwidth
        freqs = self.frequencies if self.frequencies is not None else default_frequency_grid()
        self.estimate_ = estimate_cross_spectrum(
            samples,
            kernel=self.kernel,
            bandwidth=bandwidth,
            frequencies=freqs,
            subtract_mean=self.subtract_mean,
        )
        self.spectrum_ = self.estimate_.values
        self.frequencies_ = self.estimate_.frequencies
        self.bandwidth_ = self.estimate_.bandwidth
        return self
