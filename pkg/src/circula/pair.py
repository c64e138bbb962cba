"""Pair circulas built from a wrapped Cauchy binding density.

A pair circula links two circular-uniform angles through a binding density
``g`` on the circle::

    c(x, y) = g(y - q*x) / (2*pi),      q in {-1, +1}

Here ``g`` is ``wC(0, rho)``.  ``x`` is the first slot and ``y`` the second.
The h-functions are the conditional distribution functions of one slot given
the other, returned in ``[0, 1]``; multiply by ``2*pi`` to get an angle.

The underscored kernels take ``rho`` and ``q`` as arrays so that the vine
engine can evaluate a whole tree of differently parameterized pairs at once.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .circular import LOG_2PI, TWO_PI, _frac, _g0, _g0_inv, _wrap, check_rho


@dataclass(frozen=True)
class PairCirculaSpec:
    """Parameters of one pair circula: sign ``q`` and binding concentration."""

    binding_rho: float = 0.0
    q: int = 1

    def __post_init__(self):
        if self.q not in (1, -1):
            raise ValueError(f"q must be +1 or -1, got {self.q!r}")
        object.__setattr__(self, "q", int(self.q))
        object.__setattr__(self, "binding_rho", check_rho(self.binding_rho, "binding_rho"))

    @property
    def is_independence(self) -> bool:
        return self.binding_rho == 0.0


INDEPENDENCE = PairCirculaSpec(0.0, 1)


def _logc(x, y, rho, q):
    # log pc_density from the closed form; denominator >= (1 - rho)^2 > 0
    d = y - q * x
    return (np.log1p(-rho * rho)
            - np.log(1.0 + rho * rho - 2.0 * rho * np.cos(d))
            - 2.0 * LOG_2PI)


def _h_first(y, x, rho, q):
    # P(second slot <= y | first slot = x)
    qx = q * x
    return _frac(_g0(_wrap(y - qx), rho) - _g0(_wrap(-qx), rho))


def _h_second(x, y, rho, q):
    # P(first slot <= x | second slot = y)
    y = _wrap(y)
    plus = _frac(_g0(y, rho) - _g0(_wrap(y - x), rho))
    minus = _frac(_g0(_wrap(y + x), rho) - _g0(y, rho))
    return np.where(q > 0, plus, minus)


def _h_first_inv(p, x, rho, q):
    qx = q * x
    s = p + _g0(_wrap(-qx), rho)
    s = np.where(s >= 1.0, s - 1.0, s)
    out = _wrap(qx + _g0_inv(s, rho))
    return np.where(p == 0.0, 0.0, out)


def _h_second_inv(p, y, rho, q):
    y = _wrap(y)
    plus_s = _g0(y, rho) - p
    plus_s = np.where(plus_s < 0.0, plus_s + 1.0, plus_s)
    plus = _wrap(y - _g0_inv(plus_s, rho))
    minus_s = p + _g0(y, rho)
    minus_s = np.where(minus_s >= 1.0, minus_s - 1.0, minus_s)
    minus = _wrap(_g0_inv(minus_s, rho) - y)
    out = np.where(q > 0, plus, minus)
    return np.where(p == 0.0, 0.0, out)


def _scalar(out):
    out = np.asarray(out)
    return float(out) if out.ndim == 0 else out


def _check_p(p, name):
    p = np.asarray(p, dtype=float)
    if np.any(~(p >= 0.0) | ~(p < 1.0)):
        raise ValueError(f"{name}: p must lie in [0, 1)")
    return p


def pc_density(spec: PairCirculaSpec, x, y):
    """Pair circula density ``wC(y - q*x; 0, rho) / (2*pi)``."""
    return _scalar(np.exp(pc_logdensity(spec, x, y)))


def pc_logdensity(spec: PairCirculaSpec, x, y):
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _scalar(_logc(_wrap(x), _wrap(y), spec.binding_rho, spec.q))


def h_given_first(spec: PairCirculaSpec, y, x):
    """Conditional CDF of the second slot at ``y`` given the first slot ``x``."""
    y = np.asarray(y, dtype=float)
    x = np.asarray(x, dtype=float)
    return _scalar(_h_first(_wrap(y), _wrap(x), spec.binding_rho, spec.q))


def h_given_second(spec: PairCirculaSpec, x, y):
    """Conditional CDF of the first slot at ``x`` given the second slot ``y``."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return _scalar(_h_second(_wrap(x), _wrap(y), spec.binding_rho, spec.q))


def h_inverse_given_first(spec: PairCirculaSpec, p, x):
    """Solve ``h_given_first(spec, y, x) = p`` for ``y`` in ``[0, 2*pi)``."""
    p = _check_p(p, "h_inverse_given_first")
    x = np.asarray(x, dtype=float)
    return _scalar(_h_first_inv(p, _wrap(x), spec.binding_rho, spec.q))


def h_inverse_given_second(spec: PairCirculaSpec, p, y):
    """Solve ``h_given_second(spec, x, y) = p`` for ``x`` in ``[0, 2*pi)``."""
    p = _check_p(p, "h_inverse_given_second")
    y = np.asarray(y, dtype=float)
    return _scalar(_h_second_inv(p, _wrap(y), spec.binding_rho, spec.q))


def pc_dependence(spec: PairCirculaSpec) -> float:
    """Dependence strength: the mean resultant length of the binding density."""
    return spec.binding_rho


def pc_sample(spec: PairCirculaSpec, size=None, random_state=None):
    """Draw ``(x, y)`` pairs: ``x`` uniform, ``y = omega + q*x`` with ``omega ~ g``."""
    rng = np.random.default_rng(random_state)
    x = TWO_PI * rng.random(size)
    y = _h_first_inv(rng.random(size), x, spec.binding_rho, spec.q)
    return x, y
