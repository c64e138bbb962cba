"""Pair-circula decomposition of a multivariate circular time series.

A ``T x m`` series is flattened time-major, ``phi[(t-1)*m + j] = theta[t, j]``
(1-based ``t`` and ``j``), and the ``N = T*m`` dimensional circula is written
as a D-vine on the flattened index: tree ``l`` holds the pairs ``(i, i - l)``
conditioned on everything in between.

Under a stationary ``p``-th order Markov assumption the pair circula for
``(i, j)`` depends only on the within-block positions of ``i`` and ``j`` and on
the block lag ``k``.  Lag 0 pairs are *cross* pairs ``(l1, l2)`` with
``l1 > l2``; lags ``1..p`` are *serial* pairs ``(l1, l2, k)`` where ``l1`` is
the series at the later time.  Pairs with lag above ``p`` are independent,
and every tree deeper than ``m*(p+1) - 1`` consists of independence pairs
only, so the recursion stops there.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Mapping, Sequence

import numpy as np

from .circular import (
    LOG_2PI,
    TWO_PI,
    WrappedCauchy,
    _BELOW_TWO_PI,
    _cdf,
    _quantile,
    _wrap,
    check_rho,
    wc_logdensity,
    wrap_angle,
)
from .pair import INDEPENDENCE, PairCirculaSpec, _h_first, _h_second, _logc


def n_pair_circulas(m: int, p: int) -> int:
    """Number of distinct pair circulas, ``m(m-1)/2 + m^2 p``."""
    return m * (m - 1) // 2 + m * m * p


def pair_keys(m: int, p: int) -> list[tuple[int, int, int]]:
    """``(l1, l2, k)`` keys in storage order.

    Cross pairs first (``k = 0``, row-major over ``l1 > l2``), then serial
    pairs by ascending lag, row-major over ``(l1, l2)``.
    """
    keys = [(l1, l2, 0) for l1 in range(2, m + 1) for l2 in range(1, l1)]
    keys += [(l1, l2, k) for k in range(1, p + 1)
             for l1 in range(1, m + 1) for l2 in range(1, m + 1)]
    return keys


def pair_index(m: int, p: int, l1: int, l2: int, k: int) -> int:
    if k == 0:
        if not (1 <= l2 < l1 <= m):
            raise ValueError(f"cross pair needs 1 <= l2 < l1 <= m, got ({l1}, {l2})")
        return (l1 - 1) * (l1 - 2) // 2 + (l2 - 1)
    if not (1 <= k <= p and 1 <= l1 <= m and 1 <= l2 <= m):
        raise ValueError(f"no serial pair ({l1}, {l2}, {k}) for m={m}, p={p}")
    return m * (m - 1) // 2 + (k - 1) * m * m + (l1 - 1) * m + (l2 - 1)


class ModelSpec:
    """Stationary ``p``-th order Markov pair-circula model for ``m`` series.

    Parameters
    ----------
    m, p : int
        Number of series and Markov order.
    marginals : sequence of WrappedCauchy, optional
        One marginal per series; circular uniform by default.
    cross : mapping, optional
        ``(l1, l2) -> rho`` for the lag-0 pairs, ``l1 > l2``.
    serial : mapping, optional
        ``(l1, l2, k) -> rho`` for the lag ``k`` pairs.
    q : mapping, optional
        Sign of each pair, keyed like ``cross`` or ``serial``; default ``+1``.

    Unlisted pairs get ``rho = 0`` (independence).
    """

    def __init__(
        self,
        m: int,
        p: int,
        marginals: Sequence[WrappedCauchy] | None = None,
        cross: Mapping | None = None,
        serial: Mapping | None = None,
        q: Mapping | None = None,
    ):
        if int(m) != m or m < 1:
            raise ValueError(f"m must be a positive integer, got {m!r}")
        if int(p) != p or p < 0:
            raise ValueError(f"p must be a nonnegative integer, got {p!r}")
        self.m = m = int(m)
        self.p = p = int(p)
        if marginals is None:
            marginals = [WrappedCauchy(0.0, 0.0)] * m
        marginals = tuple(marginals)
        if len(marginals) != m:
            raise ValueError(f"expected {m} marginals, got {len(marginals)}")
        self.marginals = marginals

        n = n_pair_circulas(m, p)
        rho = np.zeros(n)
        sign = np.ones(n, dtype=int)
        for key, val in (cross or {}).items():
            l1, l2 = key
            rho[pair_index(m, p, l1, l2, 0)] = check_rho(val, f"cross{key}")
        for key, val in (serial or {}).items():
            l1, l2, k = key
            if k == 0:
                raise ValueError("serial pairs need lag k >= 1")
            rho[pair_index(m, p, l1, l2, k)] = check_rho(val, f"serial{key}")
        for key, val in (q or {}).items():
            key = tuple(key)
            full = key + (0,) if len(key) == 2 else key
            if val not in (1, -1):
                raise ValueError(f"q{key} must be +1 or -1")
            sign[pair_index(m, p, *full)] = val
        self._set_pairs(rho, sign)

    def _set_pairs(self, rho, sign):
        self.pairs = tuple(PairCirculaSpec(float(r), int(s)) for r, s in zip(rho, sign))
        # trailing slot is the independence pair used beyond lag p
        self._rho = np.append(rho, 0.0)
        self._q = np.append(sign, 1).astype(float)
        self._rho.setflags(write=False)
        self._q.setflags(write=False)
        self.mu = np.array([f.mu for f in self.marginals])
        self.marginal_rho = np.array([f.rho for f in self.marginals])
        self.mu.setflags(write=False)
        self.marginal_rho.setflags(write=False)

    @classmethod
    def from_arrays(cls, m, p, mu, rho, binding_rho, binding_q=None) -> "ModelSpec":
        """Build from flat arrays in :func:`pair_keys` order."""
        self = cls.__new__(cls)
        self.m, self.p = int(m), int(p)
        self.marginals = tuple(WrappedCauchy(a, b) for a, b in zip(mu, rho))
        if len(self.marginals) != self.m:
            raise ValueError(f"expected {self.m} marginals")
        binding_rho = np.array([check_rho(r, "binding rho") for r in binding_rho], dtype=float)
        if binding_rho.size != n_pair_circulas(self.m, self.p):
            raise ValueError(
                f"expected {n_pair_circulas(self.m, self.p)} binding parameters, got {binding_rho.size}")
        if binding_q is None:
            binding_q = np.ones(binding_rho.size, dtype=int)
        binding_q = np.asarray(binding_q, dtype=int)
        if not np.all(np.isin(binding_q, (-1, 1))):
            raise ValueError("binding q must be +1 or -1")
        self._set_pairs(binding_rho, binding_q)
        return self

    @property
    def binding_rho(self) -> np.ndarray:
        return self._rho[:-1]

    @property
    def binding_q(self) -> np.ndarray:
        return self._q[:-1].astype(int)

    def cross(self, l1: int, l2: int) -> PairCirculaSpec:
        return self.pairs[pair_index(self.m, self.p, l1, l2, 0)]

    def serial(self, l1: int, l2: int, k: int) -> PairCirculaSpec:
        return self.pairs[pair_index(self.m, self.p, l1, l2, k)]

    def keys(self) -> list[tuple[int, int, int]]:
        return pair_keys(self.m, self.p)

    def __eq__(self, other):
        if not isinstance(other, ModelSpec):
            return NotImplemented
        return (self.m == other.m and self.p == other.p
                and self.marginals == other.marginals and self.pairs == other.pairs)

    def __repr__(self):
        return f"ModelSpec(m={self.m}, p={self.p}, n_pairs={len(self.pairs)})"


@dataclass
class CircularSeries:
    """A ``T x m`` time-major matrix of angles with optional labels."""

    data: np.ndarray
    names: tuple[str, ...] = ()
    times: tuple[str, ...] | None = field(default=None, repr=False)

    def __post_init__(self):
        data = np.asarray(self.data, dtype=float)
        if data.ndim == 1:
            data = data[:, None]
        if data.ndim != 2 or data.shape[0] < 1 or data.shape[1] < 1:
            raise ValueError(f"series must be a non-empty T x m array, got shape {data.shape}")
        self.data = wrap_angle(data)
        if not self.names:
            self.names = tuple(f"series{j + 1}" for j in range(data.shape[1]))
        if len(self.names) != data.shape[1]:
            raise ValueError("one name per column required")

    @property
    def T(self) -> int:
        return self.data.shape[0]

    @property
    def m(self) -> int:
        return self.data.shape[1]

    def flat(self) -> np.ndarray:
        return self.data.reshape(-1)


def _as_array(series) -> np.ndarray:
    if isinstance(series, CircularSeries):
        return series.data
    return np.asarray(series, dtype=float)


def _check_m(model: ModelSpec, data: np.ndarray):
    if data.ndim < 2 or data.shape[-1] != model.m:
        raise ValueError(
            f"dimension mismatch: model has m={model.m}, data has shape {data.shape}")


def tie_key(model: ModelSpec, i: int, j: int) -> tuple[int, int, int] | None:
    """Key ``(l1, l2, k)`` of the pair circula tied to flat indices ``(i, j)``.

    Indices are 1-based with ``j < i``; ``None`` means independence (lag > p).
    """
    if not (1 <= j < i):
        raise ValueError(f"need 1 <= j < i, got i={i}, j={j}")
    m = model.m
    t, tj = (i - 1) // m, (j - 1) // m
    k = t - tj
    if k > model.p:
        return None
    return ((i - 1) % m + 1, (j - 1) % m + 1, k)


def tie_lookup(model: ModelSpec, i: int, j: int, N: int | None = None) -> PairCirculaSpec:
    """Pair circula linking flat variables ``i > j`` (1-based)."""
    if N is not None and i > N:
        raise ValueError(f"index {i} exceeds N={N}")
    key = tie_key(model, i, j)
    if key is None:
        return INDEPENDENCE
    return model.pairs[pair_index(model.m, model.p, *key)]


def tree_depth(N: int, m: int, p: int) -> int:
    return min(N - 1, m * (p + 1) - 1)


@lru_cache(maxsize=64)
def _tree_indices(N: int, m: int, p: int) -> tuple[np.ndarray, ...]:
    # for tree l, entry s is the storage index of pair (s + l, s), 0-based;
    # the value n_pairs selects the trailing independence slot
    n = n_pair_circulas(m, p)
    trees = []
    for lag in range(1, tree_depth(N, m, p) + 1):
        i = np.arange(lag, N)
        j = i - lag
        k = i // m - j // m
        l1 = i % m + 1
        l2 = j % m + 1
        cross = (l1 - 1) * (l1 - 2) // 2 + (l2 - 1)
        serial = m * (m - 1) // 2 + (k - 1) * m * m + (l1 - 1) * m + (l2 - 1)
        idx = np.where(k == 0, cross, np.where(k <= p, serial, n))
        idx.setflags(write=False)
        trees.append(idx)
    return tuple(trees)


def uniformize(model: ModelSpec, series) -> np.ndarray:
    """Map a ``(..., T, m)`` series to the flat ``(..., N)`` circula arguments."""
    data = _as_array(series)
    _check_m(model, data)
    u = _cdf(_wrap(data), model.mu, model.marginal_rho)
    ups = np.minimum(TWO_PI * u, _BELOW_TWO_PI)
    return ups.reshape(data.shape[:-2] + (-1,))


def deuniformize(model: ModelSpec, upsilon) -> np.ndarray:
    """Inverse of :func:`uniformize`; returns an array of shape ``(..., T, m)``."""
    ups = np.asarray(upsilon, dtype=float)
    if ups.shape[-1] % model.m:
        raise ValueError(f"length {ups.shape[-1]} is not a multiple of m={model.m}")
    ups = ups.reshape(ups.shape[:-1] + (-1, model.m))
    return _quantile(_wrap(ups) / TWO_PI, model.mu, model.marginal_rho)


def _circula_logpdf(ups, rho_vec, q_vec, m, p):
    N = ups.shape[-1]
    a = _wrap(ups) / TWO_PI
    b = a.copy()
    total = np.full(ups.shape[:-1], -N * LOG_2PI)
    for lag, idx in enumerate(_tree_indices(N, m, p), start=1):
        rho = rho_vec[idx]
        q = q_vec[idx]
        x = TWO_PI * a[..., lag:]
        y = TWO_PI * b[..., : N - lag]
        total = total + np.sum(_logc(x, y, rho, q) + 2.0 * LOG_2PI, axis=-1)
        a[..., lag:] = _h_second(x, y, rho, q)
        b[..., : N - lag] = _h_first(y, x, rho, q)
    return total


def circula_log_density(model: ModelSpec, upsilon):
    """Log circula density at flat arguments of shape ``(..., N)``, ``N`` a multiple of m."""
    ups = np.asarray(upsilon, dtype=float)
    if ups.shape[-1] % model.m:
        raise ValueError(f"length {ups.shape[-1]} is not a multiple of m={model.m}")
    out = _circula_logpdf(ups, model._rho, model._q, model.m, model.p)
    return float(out) if out.ndim == 0 else out


def _joint_logpdf(data, model: ModelSpec):
    N = data.shape[-1] * data.shape[-2]
    ups = np.minimum(TWO_PI * _cdf(data, model.mu, model.marginal_rho), _BELOW_TWO_PI)
    ups = ups.reshape(data.shape[:-2] + (N,))
    marg = wc_logdensity(data, model.mu, model.marginal_rho).sum(axis=(-1, -2))
    return N * LOG_2PI + _circula_logpdf(ups, model._rho, model._q, model.m, model.p) + marg


def joint_log_density(model: ModelSpec, series):
    """Log joint density of a ``(..., T, m)`` series: circula times marginals."""
    data = _as_array(series)
    _check_m(model, data)
    if data.shape[-2] == 0:
        return 0.0
    out = _joint_logpdf(_wrap(data), model)
    return float(out) if out.ndim == 0 else out


def transition_log_density(model: ModelSpec, block, history) -> float:
    """Log density of ``block`` given the preceding blocks ``history``.

    Only the last ``p`` rows of ``history`` enter; it must have at least that many.
    """
    block = np.asarray(block, dtype=float).reshape(1, -1)
    history = np.asarray(history, dtype=float).reshape(-1, model.m)
    _check_m(model, block)
    if history.shape[0] < model.p:
        raise ValueError(f"need at least p={model.p} history blocks, got {history.shape[0]}")
    window = history[history.shape[0] - model.p:]
    full = np.vstack([window, block])
    return joint_log_density(model, full) - joint_log_density(model, window)


# Scalar kernels for the sequential sampler; numpy scalar overhead dominates
# there, so these use math directly.

def _g0s(delta, rho):
    half = 0.5 * delta
    return math.atan2((1.0 + rho) * math.sin(half), (1.0 - rho) * math.cos(half)) / math.pi


def _g0inv_s(p, rho):
    a = math.pi * p
    return 2.0 * math.atan2((1.0 - rho) * math.sin(a), (1.0 + rho) * math.cos(a))


def _wraps(x):
    x = x % TWO_PI
    return 0.0 if x >= TWO_PI else x


def _h_first_s(y, x, rho, q):
    qx = q * x
    v = _g0s(_wraps(y - qx), rho) - _g0s(_wraps(-qx), rho)
    return v + 1.0 if v < 0.0 else v


def _h_second_inv_s(p, y, rho, q):
    if p == 0.0:
        return 0.0
    gy = _g0s(y, rho)
    if q > 0:
        s = gy - p
        if s < 0.0:
            s += 1.0
        return _wraps(y - _g0inv_s(s, rho))
    s = p + gy
    if s >= 1.0:
        s -= 1.0
    return _wraps(_g0inv_s(s, rho) - y)


def simulate_uniformized(model: ModelSpec, T: int, seed=None) -> np.ndarray:
    """Draw flat circula arguments ``(N,)`` by sequential D-vine inversion."""
    if int(T) != T or T < 1:
        raise ValueError("T must be a positive integer")
    m, p = model.m, model.p
    N = int(T) * m
    rng = np.random.default_rng(seed)
    w = rng.random(N).tolist()
    depth = tree_depth(N, m, p)
    trees = [idx.tolist() for idx in _tree_indices(N, m, p)]
    rho_vec = model._rho.tolist()
    q_vec = model._q.tolist()
    # back[l][j] = F(u_j | u_{j+1..j+l-1}), stored in [0, 1]
    back = [None] + [[0.0] * N for _ in range(depth + 1)]
    fwd = [0.0] * (depth + 2)
    out = [0.0] * N
    for n in range(N):
        depth_n = min(n, depth)
        a = w[n]
        # walk down the trees: F(u_n | l predecessors) -> F(u_n | l-1 predecessors)
        for lag in range(depth_n, 0, -1):
            slot = trees[lag - 1][n - lag]
            y = TWO_PI * back[lag][n - lag]
            a = _h_second_inv_s(a, y, rho_vec[slot], q_vec[slot]) / TWO_PI
            fwd[lag] = a
        fwd[1] = a
        back[1][n] = a
        for lag in range(1, depth_n + 1):
            slot = trees[lag - 1][n - lag]
            back[lag + 1][n - lag] = _h_first_s(
                TWO_PI * back[lag][n - lag], TWO_PI * fwd[lag], rho_vec[slot], q_vec[slot])
        out[n] = min(TWO_PI * a, _BELOW_TWO_PI)
    return np.array(out)


def simulate(model: ModelSpec, T: int, seed=None, names: Sequence[str] = ()) -> CircularSeries:
    """Simulate ``T`` time points of the model; deterministic for a fixed seed."""
    ups = simulate_uniformized(model, T, seed)
    return CircularSeries(deuniformize(model, ups), names=tuple(names))
