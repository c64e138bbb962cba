"""Angle arithmetic and the wrapped Cauchy distribution.

All angles are radians on ``[0, 2*pi)``.  The distribution function uses
origin 0, i.e. ``F(0) = 0``, so ``2*pi*F(theta)`` is again an angle.
Functions accept scalars or numpy arrays and broadcast.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
LOG_2PI = math.log(TWO_PI)

# Concentrations at or above this are rejected; the density blows up as rho -> 1.
RHO_CAP = 1.0 - 1e-9

# Largest double strictly below 2*pi.
_BELOW_TWO_PI = math.nextafter(TWO_PI, 0.0)


def wrap_angle(x):
    """Reduce ``x`` to ``[0, 2*pi)``.

    Raises
    ------
    ValueError
        If any entry of ``x`` is not finite.
    """
    arr = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(arr)):
        raise ValueError("wrap_angle: input must be finite")
    out = arr - TWO_PI * np.floor(arr / TWO_PI)
    # x = -tiny rounds up to exactly 2*pi
    out = np.where(out >= TWO_PI, 0.0, out)
    return float(out) if out.ndim == 0 else out


def _wrap(x):
    # unchecked, array-only variant for hot paths
    out = x - TWO_PI * np.floor(x / TWO_PI)
    return np.where(out >= TWO_PI, 0.0, out)


def check_rho(rho: float, what: str = "rho") -> float:
    rho = float(rho)
    if not (0.0 <= rho < RHO_CAP) or math.isnan(rho):
        raise ValueError(f"{what} must lie in [0, 1 - 1e-9), got {rho!r}")
    return rho


@dataclass(frozen=True)
class WrappedCauchy:
    """Wrapped Cauchy law ``wC(mu, rho)``.

    Parameters
    ----------
    mu : float
        Location, wrapped into ``[0, 2*pi)``.
    rho : float
        Concentration (mean resultant length) in ``[0, 1)``.  ``rho = 0`` is
        the circular uniform distribution.
    """

    mu: float = 0.0
    rho: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "mu", wrap_angle(self.mu))
        object.__setattr__(self, "rho", check_rho(self.rho))

    def pdf(self, theta):
        return wc_density(theta, self)

    def logpdf(self, theta):
        return wc_logdensity(theta, self.mu, self.rho)

    def cdf(self, theta):
        return wc_cdf(theta, self)

    def ppf(self, p):
        return wc_quantile(p, self)

    def rvs(self, size=None, random_state=None):
        rng = np.random.default_rng(random_state)
        return wc_quantile(rng.random(size), self)


def wc_logdensity(theta, mu, rho):
    """Log of the wrapped Cauchy density, vectorized over all arguments."""
    theta = np.asarray(theta, dtype=float)
    rho = np.asarray(rho, dtype=float)
    denom = 1.0 + rho * rho - 2.0 * rho * np.cos(theta - mu)
    return np.log1p(-rho * rho) - np.log(denom) - LOG_2PI


def wc_density(theta, params: WrappedCauchy):
    """Density ``(1/2pi) (1 - rho^2) / (1 + rho^2 - 2 rho cos(theta - mu))``."""
    theta = np.asarray(theta, dtype=float)
    rho = params.rho
    val = (1.0 - rho * rho) / (TWO_PI * (1.0 + rho * rho - 2.0 * rho * np.cos(theta - params.mu)))
    return float(val) if val.ndim == 0 else val


def _g0(delta, rho):
    # atan2 form of the closed-form CDF; equal to the arccos expression on
    # [0, pi] and to its reflection on (pi, 2pi), but without the arccos
    # precision loss near delta = 0.
    half = 0.5 * delta
    return np.arctan2((1.0 + rho) * np.sin(half), (1.0 - rho) * np.cos(half)) / math.pi


def _g0_inv(p, rho):
    a = math.pi * p
    return 2.0 * np.arctan2((1.0 - rho) * np.sin(a), (1.0 + rho) * np.cos(a))


def _frac(x):
    return np.where(x < 0.0, x + 1.0, x)


def wc_cdf0(delta, rho):
    """Standardized distribution function ``P(D <= delta)`` for ``D ~ wC(0, rho)``.

    ``delta`` is measured from the location and must lie in ``[0, 2*pi)``.
    The result is nondecreasing with ``G0(0) = 0``, ``G0(pi) = 1/2`` and
    ``G0(delta) + G0(2*pi - delta) = 1``.
    """
    delta = np.asarray(delta, dtype=float)
    out = np.clip(_g0(delta, float(rho)), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


def fisher_cdf0(delta, rho):
    """Reference arccos form of :func:`wc_cdf0`, reflected on ``(pi, 2*pi)``.

    Kept as an independent cross-check; :func:`wc_cdf0` is the stable
    evaluation used everywhere else.
    """
    delta = np.asarray(delta, dtype=float)
    c = np.cos(delta)
    arg = ((1.0 + rho * rho) * c - 2.0 * rho) / (1.0 + rho * rho - 2.0 * rho * c)
    base = np.arccos(np.clip(arg, -1.0, 1.0)) / TWO_PI
    out = np.where(delta <= math.pi, base, 1.0 - base)
    return float(out) if out.ndim == 0 else out


def wc_cdf(theta, params: WrappedCauchy):
    """Distribution function with origin 0: ``F(theta) = int_0^theta wC(u) du``."""
    theta = np.asarray(theta, dtype=float)
    out = _cdf(theta, params.mu, params.rho)
    return float(out) if out.ndim == 0 else out


def _cdf(theta, mu, rho):
    # arc subtraction modulo 1; broadcasts over theta, mu and rho
    return _frac(_g0(_wrap(theta - mu), rho) - _g0(_wrap(-mu), rho))


def wc_quantile(p, params: WrappedCauchy):
    """Inverse of :func:`wc_cdf`; ``p`` in ``[0, 1)``, result in ``[0, 2*pi)``."""
    p = np.asarray(p, dtype=float)
    if np.any(~(p >= 0.0) | ~(p < 1.0)):
        raise ValueError("wc_quantile: p must lie in [0, 1)")
    out = _quantile(p, params.mu, params.rho)
    return float(out) if out.ndim == 0 else out


def _quantile(p, mu, rho):
    s = p + _g0(_wrap(-mu), rho)
    s = np.where(s >= 1.0, s - 1.0, s)
    theta = _wrap(mu + _g0_inv(s, rho))
    # p = 0 must map to the origin, not to 2*pi - eps
    return np.where(p == 0.0, 0.0, theta)


def resultant_length(sample) -> float:
    """Mean resultant length ``|mean(exp(i theta))|`` of a sample of angles."""
    theta = np.asarray(sample, dtype=float).ravel()
    if theta.size == 0:
        raise ValueError("resultant_length: sample is empty")
    return float(np.hypot(np.mean(np.cos(theta)), np.mean(np.sin(theta))))


def circular_mean(sample) -> float:
    theta = np.asarray(sample, dtype=float).ravel()
    if theta.size == 0:
        raise ValueError("circular_mean: sample is empty")
    return wrap_angle(math.atan2(np.mean(np.sin(theta)), np.mean(np.cos(theta))))


def angular_difference(a, b):
    """Signed difference ``a - b`` mapped to ``(-pi, pi]``."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    out = math.pi - _wrap(math.pi - d)
    return float(out) if out.ndim == 0 else out
