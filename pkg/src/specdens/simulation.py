"""Exact simulation of a bivariate mixture-of-exponentials process.

The model is a two-channel stationary Gaussian process built from four
latent components with exponentially decaying memory (mean-reverting
diffusions): channel 1 adds components with gains/rates ``(beta1, alpha1)``
and ``(beta2, alpha2)``; channel 2 adds ``(beta3, alpha3)`` and
``(beta4, alpha4)``.  The first and third components share a white-noise
driver, which is the only source of cross-channel correlation.

Sampling at step ``dt`` uses the exact discrete transition of each
component (a Gaussian AR(1) with coefficient ``exp(-alpha * dt)``), with
the correlated pair advanced jointly so the sampled path has the exact
finite-dimensional law of the continuous-time model: there is no
discretization bias to confound downstream bias measurements.

Randomness comes from the counter-based Philox generator; seeds are derived
through ``numpy.random.SeedSequence``, so a master seed plus replicate
index yields reproducible, stream-independent draws regardless of
execution order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from ._validation import check_channel, check_positive
from .estimator import MultichannelSamples

__all__ = [
    "DEFAULT_ALPHA",
    "DEFAULT_BETA",
    "OuMixtureModel",
    "SimOutput",
    "make_rng",
    "simulate",
    "true_covariance",
    "true_spectrum",
]

DEFAULT_BETA = (1.0, 1.0, 2.0, 0.4)
DEFAULT_ALPHA = (
    1.0 * math.sqrt(1.5),
    1.0 * math.sqrt(3.0),
    2.0 * math.sqrt(3.0),
    0.4 * math.sqrt(3.0),
)


@dataclass(frozen=True)
class OuMixtureModel:
    """Gains ``beta`` and decay rates ``alpha`` of the four latent components."""

    beta: tuple[float, float, float, float] = DEFAULT_BETA
    alpha: tuple[float, float, float, float] = DEFAULT_ALPHA

    def __post_init__(self):
        beta = tuple(float(b) for b in self.beta)
        alpha = tuple(float(a) for a in self.alpha)
        if len(beta) != 4 or len(alpha) != 4:
            raise ValueError("model requires exactly four gain/rate pairs")
        if any(not (b > 0 and math.isfinite(b)) for b in beta):
            raise ValueError(f"gains must be positive, got {beta}")
        if any(not (a > 0 and math.isfinite(a)) for a in alpha):
            raise ValueError(f"decay rates must be positive, got {alpha}")
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "alpha", alpha)

    def decay_limit(self, a1: int, a2: int) -> float:
        """Limit of ``lam**2 * |spectrum[a1, a2](lam)]`` as ``lam -> inf``.

        The model's spectra decay at quadratic order; this is the constant
        entering the folding (aliasing) bias term.
        """
        a1 = check_channel(a1, 2)
        a2 = check_channel(a2, 2)
        b1, b2, b3, b4 = self.beta
        if a1 == a2:
            gains = (b1, b2) if a1 == 0 else (b3, b4)
            return (gains[0] ** 2 + gains[1] ** 2) / (2.0 * np.pi)
        return b1 * b3 / (2.0 * np.pi)


def true_spectrum(model: OuMixtureModel, lam) -> np.ndarray:
    """Closed-form spectral density matrix at frequency ``lam``.

    ``lam`` may be a scalar or an array; the result has shape
    ``lam.shape + (2, 2)`` and is Hermitian with ``spec[..., 1, 0]`` the
    conjugate of ``spec[..., 0, 1]``.
    """
    lam = np.asarray(lam, dtype=float)
    b1, b2, b3, b4 = model.beta
    a1, a2, a3, a4 = model.alpha
    lam2 = lam**2
    two_pi = 2.0 * np.pi
    phi11 = (b1**2 / (a1**2 + lam2) + b2**2 / (a2**2 + lam2)) / two_pi
    phi22 = (b3**2 / (a3**2 + lam2) + b4**2 / (a4**2 + lam2)) / two_pi
    denom = (a1**2 + lam2) * (a3**2 + lam2)
    re12 = b1 * b3 * (a1 * a3 + lam2) / denom / two_pi
    # The imaginary component is the transform of the asymmetric
    # cross-covariance, which decays at rate alpha1 for positive lags.
    im12 = b1 * b3 * (a1 - a3) * lam / denom / two_pi
    phi12 = re12 + 1j * im12
    out = np.empty(lam.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = phi11
    out[..., 1, 1] = phi22
    out[..., 0, 1] = phi12
    out[..., 1, 0] = np.conj(phi12)
    return out


def true_covariance(model: OuMixtureModel, a1: int, a2: int, tau) -> np.ndarray:
    """Closed-form covariance ``E[X_a1(t + tau) X_a2(t)]``.

    The auto-covariances are even mixtures of exponentials; the
    cross-covariance is one-sided exponential with rate ``alpha1`` for
    ``tau >= 0`` and rate ``alpha3`` for ``tau < 0``.
    """
    a1 = check_channel(a1, 2)
    a2 = check_channel(a2, 2)
    tau = np.asarray(tau, dtype=float)
    b1, b2, b3, b4 = model.beta
    al1, al2, al3, al4 = model.alpha
    if a1 == a2:
        if a1 == 0:
            pairs = ((b1, al1), (b2, al2))
        else:
            pairs = ((b3, al3), (b4, al4))
        out = np.zeros_like(tau)
        for gain, rate in pairs:
            out = out + gain**2 / (2.0 * rate) * np.exp(-rate * np.abs(tau))
        return out
    scale = b1 * b3 / (al1 + al3)
    if a1 == 0:
        exponent = np.where(tau >= 0, -al1 * tau, al3 * tau)
    else:
        exponent = np.where(tau >= 0, -al3 * tau, al1 * tau)
    return scale * np.exp(exponent)


@dataclass(frozen=True)
class SimOutput:
    """Simulated record plus the inputs needed to reproduce it."""

    samples: MultichannelSamples
    seed: object
    model: OuMixtureModel


def make_rng(seed) -> np.random.Generator:
    """Philox generator for ``seed`` (int, tuple, or SeedSequence).

    Replicated runs derive disjoint streams from tuples
    ``(master_seed, replicate_index)``: the derivation is pure, so any
    degree of parallelism yields identical draws per replicate.
    """
    if isinstance(seed, np.random.SeedSequence):
        sequence = seed
    else:
        sequence = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(sequence))


def _psd_factor(matrix: np.ndarray) -> np.ndarray:
    """Lower-triangular-ish factor ``L`` with ``L @ L.T == matrix``.

    Cholesky when positive definite; an eigenvalue factor for the
    semidefinite boundary case of equal decay rates.
    """
    try:
        return np.linalg.cholesky(matrix)
    except np.linalg.LinAlgError:
        eigvals, eigvecs = np.linalg.eigh(matrix)
        if np.min(eigvals) < -1e-12 * max(1.0, np.max(np.abs(eigvals))):
            raise ValueError("innovation covariance is not positive semidefinite")
        return eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))


def _ar1_path(coeff: float, start: float, innovations: np.ndarray) -> np.ndarray:
    """Exact AR(1) recursion ``y[t] = coeff * y[t-1] + innovations[t]``.

    ``start`` is the state one step before the first output sample.
    """
    out, _ = lfilter([1.0], [1.0, -coeff], innovations, zi=np.array([coeff * start]))
    return out


def simulate(model: OuMixtureModel, n: int, sampling_rate: float, seed) -> SimOutput:
    """Draw ``n`` samples of the two channels at spacing ``1 / sampling_rate``.

    The correlated latent pair (components 1 and 3) advances as a joint
    Gaussian AR(1): diagonal transition ``(exp(-alpha1 dt), exp(-alpha3 dt))``
    with the exact one-step innovation covariance, started from the exact
    stationary law, so no burn-in is needed.  Components 2 and 4 are
    independent scalar analogues.

    Draw order (fixed for reproducibility): pair initial state, pair
    innovations, channel-1 independent component, channel-2 independent
    component.
    """
    n = int(n)
    if n < 1:
        raise ValueError(f"sample count must be >= 1, got {n}")
    sampling_rate = check_positive("sampling_rate", sampling_rate)
    dt = 1.0 / sampling_rate
    rng = make_rng(seed)
    b1, b2, b3, b4 = model.beta
    a1, a2, a3, a4 = model.alpha

    cross = b1 * b3 / (a1 + a3)
    stationary = np.array(
        [
            [b1**2 / (2.0 * a1), cross],
            [cross, b3**2 / (2.0 * a3)],
        ]
    )
    innovation = np.array(
        [
            [b1**2 * -np.expm1(-2.0 * a1 * dt) / (2.0 * a1), cross * -np.expm1(-(a1 + a3) * dt)],
            [cross * -np.expm1(-(a1 + a3) * dt), b3**2 * -np.expm1(-2.0 * a3 * dt) / (2.0 * a3)],
        ]
    )
    start = _psd_factor(stationary) @ rng.standard_normal(2)
    # einsum instead of matmul: bitwise reproducible for any BLAS threading
    shocks = np.einsum("tj,ij->ti", rng.standard_normal((n, 2)), _psd_factor(innovation))
    shared1 = _ar1_path(math.exp(-a1 * dt), start[0], shocks[:, 0])
    shared2 = _ar1_path(math.exp(-a3 * dt), start[1], shocks[:, 1])

    def scalar_component(gain: float, rate: float) -> np.ndarray:
        std_stat = math.sqrt(gain**2 / (2.0 * rate))
        std_innov = math.sqrt(gain**2 * -math.expm1(-2.0 * rate * dt) / (2.0 * rate))
        start = std_stat * rng.standard_normal()
        innov = std_innov * rng.standard_normal(n)
        return _ar1_path(math.exp(-rate * dt), start, innov)

    solo1 = scalar_component(b2, a2)
    solo2 = scalar_component(b4, a4)

    data = np.column_stack([shared1 + solo1, shared2 + solo2])
    return SimOutput(samples=MultichannelSamples(data, sampling_rate), seed=seed, model=model)
