"""Noise families with invertible CDFs for one-bit quantized sensing.

A sensor observes x = theta + mu + n and reports the bit u = 1{x > tau}.
With n drawn from a zero-mean noise family with CDF F, the bit-zero
probabilities are

    q(theta)        = P(u = 0 | no shift)   = F(tau - theta)
    qtilde(theta,m) = P(u = 0 | shift m)    = F(tau - theta - m)

Everything downstream (likelihoods, estimators, detector statistics) only
touches the noise through F and its inverse, so the model is just the pair
(cdf, quantile) plus a scale parameter.

Families:
    gaussian  F(x) = Phi(x / scale), scale = standard deviation
    logistic  F(x) = 1 / (1 + exp(-x / scale))

The gaussian quantile is computed by a rational approximation (max relative
error about 1e-9) refined by one Newton step against the erf-based CDF, which
lands at double precision. The scalar forms below use only the math module so
the compiled kernels can reuse them unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import DomainError

_SQRT2 = math.sqrt(2.0)
_SQRT_2PI = math.sqrt(2.0 * math.pi)

GAUSSIAN = "gaussian"
LOGISTIC = "logistic"

# Integer codes used by the compiled kernels.
FAMILY_CODES = {GAUSSIAN: 0, LOGISTIC: 1}


def norm_cdf(x: float) -> float:
    """Standard normal CDF, scalar."""
    # erfc form: no cancellation in the left tail
    return 0.5 * math.erfc(-x / _SQRT2)


def norm_ppf(p: float) -> float:
    """Standard normal quantile, scalar.

    Rational approximation in three regions, then one Newton step
    x <- x - (Phi(x) - p) / phi(x). Returns +-inf at p in {0, 1}.

    The Newton step evaluates Phi through erfc, which is only accurate in
    the left tail, so the right half reflects onto the left first (1 - p is
    exact for p >= 0.5).
    """
    if p <= 0.0:
        return -math.inf
    if p >= 1.0:
        return math.inf
    flip = p > 0.5
    pl = 1.0 - p if flip else p
    p_low = 0.02425
    if pl < p_low:
        r = math.sqrt(-2.0 * math.log(pl))
        x = (((((-7.784894002430293e-03 * r - 3.223964580411365e-01) * r
                - 2.400758277161838e+00) * r - 2.549732539343734e+00) * r
              + 4.374664141464968e+00) * r + 2.938163982698783e+00) / \
            ((((7.784695709041462e-03 * r + 3.224671290700398e-01) * r
               + 2.445134137142996e+00) * r + 3.754408661907416e+00) * r + 1.0)
    else:
        r = pl - 0.5
        s = r * r
        x = (((((-3.969683028665376e+01 * s + 2.209460984245205e+02) * s
                - 2.759285104469687e+02) * s + 1.383577518672690e+02) * s
              - 3.066479806614716e+01) * s + 2.506628277459239e+00) * r / \
            (((((-5.447609879822406e+01 * s + 1.615858368580409e+02) * s
                - 1.556989798598866e+02) * s + 6.680131188771972e+01) * s
              - 1.328068155288572e+01) * s + 1.0)
    pdf = math.exp(-0.5 * x * x) / _SQRT_2PI
    if pdf > 0.0:
        cdf = 0.5 * math.erfc(-x / _SQRT2)
        x = x - (cdf - pl) / pdf
    return -x if flip else x


def logistic_cdf(x: float) -> float:
    """Standard logistic CDF, scalar, overflow-safe."""
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    e = math.exp(x)
    return e / (1.0 + e)


def logistic_ppf(p: float) -> float:
    """Standard logistic quantile, scalar. Returns +-inf at p in {0, 1}."""
    if p <= 0.0:
        return -math.inf
    if p >= 1.0:
        return math.inf
    return math.log(p / (1.0 - p))


@dataclass(frozen=True)
class NoiseModel:
    """Invertible noise CDF F and quantile F^-1 with a scale parameter."""

    family: str = GAUSSIAN
    scale: float = 1.0

    def __post_init__(self) -> None:
        if self.family not in FAMILY_CODES:
            raise DomainError(f"unknown noise family {self.family!r}")
        if not self.scale > 0.0:
            raise DomainError("noise scale must be positive")

    @property
    def code(self) -> int:
        return FAMILY_CODES[self.family]

    def cdf(self, x):
        """F(x); accepts scalars or arrays."""
        z = np.asarray(x, dtype=float) / self.scale
        if self.family == GAUSSIAN:
            out = ndtr(z)
        else:
            out = 1.0 / (1.0 + np.exp(-np.clip(z, -709.0, 709.0)))
        return float(out) if np.isscalar(x) or np.ndim(x) == 0 else out

    def quantile(self, p):
        """F^-1(p); accepts scalars or arrays, +-inf at the endpoints."""
        if np.isscalar(p) or np.ndim(p) == 0:
            base = norm_ppf(float(p)) if self.family == GAUSSIAN else logistic_ppf(float(p))
            return self.scale * base
        arr = np.asarray(p, dtype=float)
        fn = norm_ppf if self.family == GAUSSIAN else logistic_ppf
        out = np.fromiter((fn(v) for v in arr.ravel()), dtype=float, count=arr.size)
        return self.scale * out.reshape(arr.shape)

    def q(self, theta: float, tau: float) -> float:
        """Bit-zero probability with no shift: F(tau - theta)."""
        return self.cdf(tau - theta)

    def qtilde(self, theta: float, mu: float, tau: float) -> float:
        """Bit-zero probability under a mean shift mu: F(tau - theta - mu)."""
        return self.cdf(tau - theta - mu)
