"""Spectral and cross-spectral density estimation from uniform samples.

Consistent estimation for continuous-time stationary processes whose
spectra need not be bandlimited: the sampling rate and the kernel bandwidth
follow schedules in the sample count, the estimator is a kernel-smoothed
periodogram over all channel pairs, and the limiting normal law supplies
pointwise confidence intervals.  A simulation model with closed-form
spectra and a Monte-Carlo harness validate the distributional claims.
"""

from .estimator import (
    MultichannelSamples,
    SmoothedPeriodogram,
    SpectralEstimate,
    default_frequency_grid,
    estimate_cross_spectrum,
)
from .inference import (
    BiasTerms,
    NormalizedStats,
    ReImCovariance,
    confidence_interval,
    limiting_covariance,
    normal_quantile,
    normalized_stats,
    power_tail_sum,
    predicted_bias,
)
from .kernels import (
    Kernel,
    KernelConstants,
    available_kernels,
    bartlett_kernel,
    characteristic_exponent,
    get_kernel,
    kernel_constants,
    rectangular_kernel,
    register_kernel,
    tukey_hanning_kernel,
    variance_constant,
)
from .mcstudy import (
    McConfig,
    McReport,
    joint_cumulant,
    ks_pvalue,
    ks_statistic,
    run_study,
    study_grid,
)
from .rates import (
    RateClampWarning,
    RatePlan,
    default_plan,
    optimal_exponents,
    reference_rate_plan,
)
from .simulation import (
    OuMixtureModel,
    SimOutput,
    make_rng,
    simulate,
    true_covariance,
    true_spectrum,
)

__version__ = "0.1.0"

__all__ = [
    "BiasTerms",
    "Kernel",
    "KernelConstants",
    "McConfig",
    "McReport",
    "MultichannelSamples",
    "NormalizedStats",
    "OuMixtureModel",
    "RateClampWarning",
    "RatePlan",
    "ReImCovariance",
    "SimOutput",
    "SmoothedPeriodogram",
    "SpectralEstimate",
    "available_kernels",
    "bartlett_kernel",
    "characteristic_exponent",
    "confidence_interval",
    "default_frequency_grid",
    "default_plan",
    "estimate_cross_spectrum",
    "get_kernel",
    "joint_cumulant",
    "kernel_constants",
    "ks_pvalue",
    "ks_statistic",
    "limiting_covariance",
    "make_rng",
    "normal_quantile",
    "normalized_stats",
    "optimal_exponents",
    "reference_rate_plan",
    "power_tail_sum",
    "predicted_bias",
    "rectangular_kernel",
    "register_kernel",
    "run_study",
    "simulate",
    "study_grid",
    "true_covariance",
    "true_spectrum",
    "tukey_hanning_kernel",
    "variance_constant",
]
