"""Bandwidth and sampling-rate schedules with asymptotic diagnostics.

A :class:`RatePlan` maps the sample count ``n`` to the kernel bandwidth
``b_n = bn_constant * n**bn_exponent`` and the sampling rate
``rho_n = rho_constant * n**rho_exponent``.  The admissible exponent region
is controlled by two regularity indices of the underlying process: ``q > 1``
(smoothness of the spectrum, i.e. integrability of ``|t|**q`` against the
covariance) and ``p > 1`` (polynomial decay order of the spectrum).

Exponent arithmetic is carried out over exact rationals whenever the inputs
are rational, so the identities tested downstream hold exactly.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational

__all__ = [
    "RateClampWarning",
    "RatePlan",
    "default_plan",
    "evaluate",
    "optimal_exponents",
    "reference_rate_plan",
]


class RateClampWarning(UserWarning):
    """Raised when a schedule value is clamped to its admissible range."""


def _exactify(value):
    """Ints and Fractions stay exact rationals; everything else is float."""
    if isinstance(value, Rational):
        return Fraction(value)
    return float(value)


@dataclass(frozen=True)
class RatePlan:
    """Decay/growth schedule ``b_n = c_b * n**e_b``, ``rho_n = c_r * n**e_r``.

    ``p`` and ``q`` record the decay and smoothness indices the plan was
    designed for; they feed the asymptotic diagnostics below.
    """

    bn_constant: float
    bn_exponent: Fraction | float
    rho_constant: float
    rho_exponent: Fraction | float
    p: Fraction | float
    q: Fraction | float

    def __post_init__(self):
        object.__setattr__(self, "bn_constant", float(self.bn_constant))
        object.__setattr__(self, "rho_constant", float(self.rho_constant))
        object.__setattr__(self, "bn_exponent", _exactify(self.bn_exponent))
        object.__setattr__(self, "rho_exponent", _exactify(self.rho_exponent))
        object.__setattr__(self, "p", _exactify(self.p))
        object.__setattr__(self, "q", _exactify(self.q))
        if self.bn_constant <= 0 or self.rho_constant <= 0:
            raise ValueError("rate plan constants must be positive")
        if not self.bn_exponent < 0:
            raise ValueError(f"bandwidth exponent must be negative, got {self.bn_exponent}")
        if not self.rho_exponent > 0:
            raise ValueError(f"sampling-rate exponent must be positive, got {self.rho_exponent}")
        if not (self.p > 1 and self.q > 1):
            raise ValueError(f"indices p and q must exceed 1, got p={self.p}, q={self.q}")

    @property
    def variance_vanishes(self) -> bool:
        """Whether ``n * b_n`` diverges, so the estimator variance vanishes."""
        return 1 + self.bn_exponent > 0

    @property
    def bias_vanishes(self) -> bool:
        """Whether ``rho_n`` diverges while ``rho_n * b_n`` vanishes.

        Together these drive the estimator bias to zero.
        """
        return self.rho_exponent > 0 and self.bn_exponent + self.rho_exponent < 0

    @property
    def bias_below_noise(self) -> bool:
        """Whether the bias decays faster than the stochastic error scale.

        Requires both ``sqrt(n b_n) * (rho_n b_n)**q -> 0`` (smoothing bias)
        and ``sqrt(n b_n) / rho_n**p -> 0`` (folding bias), so intervals can
        be centered at the true value.  Pure function of the exponents.
        """
        half = Fraction(1, 2) if isinstance(self.bn_exponent, Fraction) else 0.5
        clt_scale = (1 + self.bn_exponent) * half
        smoothing = clt_scale + self.q * (self.bn_exponent + self.rho_exponent)
        folding = clt_scale - self.p * self.rho_exponent
        return smoothing < 0 and folding < 0

    def evaluate(self, n: int) -> tuple[float, float]:
        """Bandwidth and sampling rate at sample count ``n``.

        Values are clamped to ``b_n <= 1`` and ``rho_n >= 1`` (warning on
        clamp): outside that range the asymptotic formulas are meaningless.
        """
        n = int(n)
        if n < 1:
            raise ValueError(f"sample count must be >= 1, got {n}")
        bandwidth = self.bn_constant * float(n) ** float(self.bn_exponent)
        rate = self.rho_constant * float(n) ** float(self.rho_exponent)
        if bandwidth > 1.0:
            warnings.warn(
                f"bandwidth {bandwidth:.6g} at n={n} clamped to 1", RateClampWarning, stacklevel=2
            )
            bandwidth = 1.0
        if rate < 1.0:
            warnings.warn(
                f"sampling rate {rate:.6g} at n={n} clamped to 1", RateClampWarning, stacklevel=2
            )
            rate = 1.0
        return bandwidth, rate


def evaluate(plan: RatePlan, n: int) -> tuple[float, float]:
    """Module-level alias for :meth:`RatePlan.evaluate`."""
    return plan.evaluate(n)


def optimal_exponents(p, q):
    """Exponents giving the fastest vanishing of the error scale ``1/sqrt(n b_n)``.

    For smoothness index ``q > 1`` and decay index ``p > 1`` the bandwidth
    and sampling-rate exponents balancing smoothing bias, folding bias and
    stochastic error are::

        bn_exponent  = -(p + q) / (p + q + 2 p q)
        rho_exponent =        q / (p + q + 2 p q)
        rate_exponent =     p q / (p + q + 2 p q)

    where ``rate_exponent`` is the decay order of ``1/sqrt(n b_n)``.
    Returns exact :class:`fractions.Fraction` values when ``p`` and ``q``
    are rational, floats otherwise.
    """
    p = _exactify(p)
    q = _exactify(q)
    if not (p > 1 and q > 1):
        raise ValueError(f"indices p and q must exceed 1, got p={p}, q={q}")
    denom = p + q + 2 * p * q
    if isinstance(p, Fraction) and isinstance(q, Fraction):
        return (-(p + q) / denom, q / denom, p * q / denom)
    p, q, denom = float(p), float(q), float(denom)
    return (-(p + q) / denom, q / denom, p * q / denom)


def reference_rate_plan() -> RatePlan:
    """Schedule ``b_n = n**(-1/4) / 4`` and ``rho_n = 4 n**(1/6)`` (p = q = 2).

    These are the constants used in the reference simulation study bundled
    with this package.  The combination does *not* satisfy the
    bias-below-noise condition (the ``bias_below_noise`` diagnostic is
    False): the smoothing-bias scale grows like ``n**(5/24)`` relative to
    the stochastic error.
    """
    return RatePlan(
        bn_constant=0.25,
        bn_exponent=Fraction(-1, 4),
        rho_constant=4.0,
        rho_exponent=Fraction(1, 6),
        p=Fraction(2),
        q=Fraction(2),
    )


def default_plan(p=2, q=2, bn_constant=0.25, rho_constant=4.0) -> RatePlan:
    """Plan with the optimal exponents for ``(p, q)``.

    The constants default to the reference-study choices; no data-driven
    constant selection is attempted.
    """
    bn_exp, rho_exp, _ = optimal_exponents(p, q)
    return RatePlan(
        bn_constant=bn_constant,
        bn_exponent=bn_exp,
        rho_constant=rho_constant,
        rho_exponent=rho_exp,
        p=_exactify(p),
        q=_exactify(q),
    )
