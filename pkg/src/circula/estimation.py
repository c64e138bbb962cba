"""Bayesian fitting by multi-chain random-walk Metropolis.

Sampling happens in an unconstrained space: each location ``mu_j`` is kept
as an unwrapped real (wrapped on evaluation) and every concentration is
logit-transformed.  The prior is flat on the constrained scale (uniform
``[0, 2pi)`` for locations, uniform ``(0, 1)`` for concentrations); the logit
Jacobian is added so the chains target that prior.

Vector layout: ``m`` locations, ``m`` marginal concentrations, then the
binding concentrations in :func:`circula.vine.pair_keys` order.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.special import expit, log_expit, logit

from .circular import RHO_CAP, TWO_PI, _wrap, angular_difference, circular_mean, resultant_length
from .vine import ModelSpec, _as_array, _check_m, _joint_logpdf, n_pair_circulas, pair_keys

log = logging.getLogger(__name__)

# logit(RHO_CAP); larger values are outside the support
_Z_CAP = float(logit(RHO_CAP))
# transform() floor for rho = 0, which has no finite logit
_RHO_FLOOR = 1e-12


def n_params(m: int, p: int) -> int:
    return 2 * m + n_pair_circulas(m, p)


def param_names(m: int, p: int) -> list[str]:
    """Labels in vector order: ``mu_j``, ``rho_j``, ``rho_ab,k``.

    Cross pairs ``(l1, l2)`` with ``l1 > l2`` are labelled with the smaller
    index first (``rho_12,0`` is the pair of series 1 and 2); serial pairs are
    labelled later-series first (``rho_31,1`` links series 3 at time t to
    series 1 at time t-1).
    """
    sep = "" if m < 10 else "_"
    names = [f"mu_{j}" for j in range(1, m + 1)] + [f"rho_{j}" for j in range(1, m + 1)]
    for l1, l2, k in pair_keys(m, p):
        a, b = (l2, l1) if k == 0 else (l1, l2)
        names.append(f"rho_{a}{sep}{b},{k}")
    return names


def transform(model: ModelSpec) -> np.ndarray:
    """Unconstrained vector for ``model``."""
    rho = np.concatenate([model.marginal_rho, model.binding_rho])
    return np.concatenate([model.mu, logit(np.maximum(rho, _RHO_FLOOR))])


def untransform(v, m: int, p: int, binding_q=None) -> ModelSpec:
    """Inverse of :func:`transform`."""
    v = np.asarray(v, dtype=float)
    if v.shape != (n_params(m, p),):
        raise ValueError(f"expected a vector of length {n_params(m, p)}, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("parameter vector has non-finite entries")
    rho = expit(v[m:])
    if np.any(rho >= RHO_CAP):
        raise ValueError("a concentration is at or above 1 - 1e-9")
    return ModelSpec.from_arrays(m, p, _wrap(v[:m]), rho[:m], rho[m:], binding_q)


def log_prior(v, m: int) -> float:
    """Flat prior on the constrained scale, in unconstrained coordinates."""
    z = np.asarray(v, dtype=float)[m:]
    return float(-m * math.log(TWO_PI) + np.sum(log_expit(z) + log_expit(-z)))


class Posterior:
    """Log posterior of the unconstrained vector for a fixed dataset.

    Evaluation skips ModelSpec construction; use :meth:`model` to get one.
    """

    def __init__(self, data, p: int, m: int | None = None, binding_q=None):
        data = _as_array(data)
        if data.ndim != 2:
            raise ValueError("data must be a T x m array")
        if m is not None and data.shape[1] != m:
            raise ValueError(f"dimension mismatch: m={m}, data has {data.shape[1]} columns")
        self.data = _wrap(data)
        self.T, self.m = data.shape
        self.p = int(p)
        self.dim = n_params(self.m, self.p)
        if binding_q is None:
            binding_q = np.ones(n_pair_circulas(self.m, self.p))
        self.binding_q = np.asarray(binding_q, dtype=int)
        self._view = _FastModel(self.m, self.p, self.binding_q)

    def model(self, v) -> ModelSpec:
        return untransform(v, self.m, self.p, self.binding_q)

    def log_likelihood(self, v) -> float:
        v = np.asarray(v, dtype=float)
        if not np.all(np.isfinite(v)) or np.any(v[self.m:] >= _Z_CAP):
            return -math.inf
        self._view.load(v)
        return float(_joint_logpdf(self.data, self._view))

    def __call__(self, v) -> float:
        ll = self.log_likelihood(v)
        if ll == -math.inf:
            return ll
        return ll + log_prior(v, self.m)


class _FastModel:
    # duck-typed stand-in for ModelSpec inside _joint_logpdf
    def __init__(self, m, p, binding_q):
        self.m, self.p = m, p
        self._q = np.append(binding_q, 1).astype(float)
        self._rho = np.zeros(n_pair_circulas(m, p) + 1)

    def load(self, v):
        m = self.m
        self.mu = _wrap(v[:m])
        self.marginal_rho = expit(v[m:2 * m])
        self._rho[:-1] = expit(v[2 * m:])


def log_posterior(v, data, p: int, binding_q=None) -> float:
    """Joint log density of ``data`` under ``untransform(v)`` plus the log prior."""
    data = _as_array(data)
    m = data.shape[-1]
    v = np.asarray(v, dtype=float)
    if v.shape != (n_params(m, p),):
        raise ValueError(f"expected a vector of length {n_params(m, p)}, got shape {v.shape}")
    return Posterior(data, p, binding_q=binding_q)(v)


@dataclass
class McmcConfig:
    """Sampler settings; defaults are 3 chains of 3000 iterations, warmup 100, no thinning."""

    chains: int = 3
    iterations: int = 3000
    warmup: int = 100
    thinning: int = 1
    seed: int = 0
    proposal_scale: float | None = None
    target_accept: tuple[float, float] = (0.25, 0.40)
    init_jitter: float = 1.0

    def __post_init__(self):
        if self.chains < 1:
            raise ValueError("chains must be >= 1")
        if self.thinning < 1:
            raise ValueError("thinning must be >= 1")
        if not (0 <= self.warmup < self.iterations):
            raise ValueError("need 0 <= warmup < iterations")


@dataclass
class ChainResult:
    draws: np.ndarray
    log_post: np.ndarray
    acceptance: float
    scale: float


def default_init(data, p: int) -> np.ndarray:
    """Moment-based start: circular means, resultant lengths, weak bindings."""
    data = _as_array(data)
    m = data.shape[1]
    mu = [circular_mean(data[:, j]) for j in range(m)]
    rho = [min(max(resultant_length(data[:, j]), 0.01), 0.95) for j in range(m)]
    rho += [0.1] * n_pair_circulas(m, p)
    return np.concatenate([mu, logit(rho)])


def run_chain(data, config: McmcConfig, chain_seed, p: int = 2, init=None,
              proposal_chol=None, posterior: Posterior | None = None) -> ChainResult:
    """One adaptive random-walk Metropolis chain.

    Proposals are ``v + s * L @ z`` with ``z`` standard normal, ``L`` a fixed
    preconditioner (identity unless given) and ``s`` a global scale.  During
    warmup ``log s`` takes Robbins-Monro steps toward the middle of
    ``config.target_accept``; afterwards it is frozen.  Every
    ``config.thinning``-th post-warmup state is kept.
    """
    post = posterior if posterior is not None else Posterior(data, p)
    dim = post.dim
    rng = np.random.default_rng(chain_seed)
    v = np.array(default_init(post.data, post.p) if init is None else init, dtype=float)
    lp = post(v)
    if not math.isfinite(lp):
        raise ValueError("log posterior is not finite at the initial point")
    chol = np.eye(dim) if proposal_chol is None else np.asarray(proposal_chol, dtype=float)
    scale = config.proposal_scale
    if scale is None:
        scale = 2.38 / math.sqrt(dim) if proposal_chol is not None else 0.1
    lo, hi = config.target_accept
    keep = (config.iterations - config.warmup) // config.thinning
    draws = np.empty((keep, dim))
    lps = np.empty(keep)
    accepted = 0
    kept = 0
    target = 0.5 * (lo + hi)
    for it in range(config.iterations):
        prop = v + scale * (chol @ rng.standard_normal(dim))
        lp_prop = post(prop)
        log_alpha = lp_prop - lp
        if math.log(rng.random()) < log_alpha:
            v, lp = prop, lp_prop
            if it >= config.warmup:
                accepted += 1
        if it < config.warmup:
            # Robbins-Monro step on log(scale) toward the target acceptance
            alpha = math.exp(min(0.0, log_alpha)) if math.isfinite(log_alpha) else 0.0
            scale *= math.exp((alpha - target) / (it + 1) ** 0.6)
        elif (it - config.warmup + 1) % config.thinning == 0 and kept < keep:
            draws[kept] = v
            lps[kept] = lp
            kept += 1
    n_post = config.iterations - config.warmup
    return ChainResult(draws[:kept], lps[:kept], accepted / n_post, scale)


def split_rhat(chains: np.ndarray) -> np.ndarray:
    """Split potential scale reduction factor.

    ``chains`` has shape ``(n_chains, n_draws, n_params)``.  Each chain is cut
    in half and the usual between/within variance ratio is taken over the
    resulting ``2 * n_chains`` sequences.
    """
    chains = np.asarray(chains, dtype=float)
    if chains.ndim == 2:
        chains = chains[..., None]
    n = chains.shape[1] // 2
    if n < 2:
        return np.full(chains.shape[2], np.nan)
    halves = np.concatenate([chains[:, :n], chains[:, -n:]], axis=0)
    means = halves.mean(axis=1)
    within = halves.var(axis=1, ddof=1).mean(axis=0)
    between = n * means.var(axis=0, ddof=1)
    var_plus = (n - 1) / n * within + between / n
    with np.errstate(divide="ignore", invalid="ignore"):
        rhat = np.sqrt(var_plus / within)
    return np.where(within > 0, rhat, np.where(between > 0, np.inf, 1.0))


@dataclass
class ChainSummary:
    """Posterior summary in constrained coordinates, one row per parameter."""

    names: list[str]
    mean: np.ndarray
    sd: np.ndarray
    median: np.ndarray
    rhat: np.ndarray
    acceptance: list[float]
    m: int
    p: int
    draws: np.ndarray = field(repr=False, default=None)

    def rows(self):
        for k, name in enumerate(self.names):
            yield name, self.mean[k], self.sd[k], self.median[k], self.rhat[k]

    def point_model(self, binding_q=None) -> ModelSpec:
        """ModelSpec at the posterior means."""
        m = self.m
        rho = np.minimum(self.mean[m:], RHO_CAP - 1e-12)
        return ModelSpec.from_arrays(m, self.p, self.mean[:m], rho[:m], rho[m:], binding_q)

    def table(self) -> str:
        lines = [f"{'':>10} {'mean':>9} {'sd':>9} {'median':>9} {'rhat':>7}"]
        for name, mean, sd, med, rhat in self.rows():
            lines.append(f"{name:>10} {mean:9.4f} {sd:9.4f} {med:9.4f} {rhat:7.3f}")
        lines.append("acceptance: " + ", ".join(f"{a:.3f}" for a in self.acceptance))
        return "\n".join(lines)


def constrained_draws(draws: np.ndarray, m: int) -> np.ndarray:
    """Map unconstrained draws ``(..., dim)`` to ``(mu, rho)`` scale.

    Locations are returned unwrapped around their pooled circular mean so that
    linear summaries are meaningful; callers wrap the reported centre.
    """
    out = np.array(draws, dtype=float)
    mu = out[..., :m].reshape(-1, m)
    for j in range(m):
        centre = circular_mean(mu[:, j])
        out[..., j] = centre + angular_difference(out[..., j], centre)
    out[..., m:] = expit(out[..., m:])
    return out


def summarize(results: list[ChainResult], m: int, p: int) -> ChainSummary:
    stacked = np.stack([r.draws for r in results])
    con = constrained_draws(stacked, m)
    pooled = con.reshape(-1, con.shape[-1])
    mean = pooled.mean(axis=0)
    median = np.median(pooled, axis=0)
    mean[:m] = _wrap(mean[:m])
    median[:m] = _wrap(median[:m])
    return ChainSummary(
        names=param_names(m, p),
        mean=mean,
        sd=pooled.std(axis=0, ddof=1) if pooled.shape[0] > 1 else np.zeros(pooled.shape[1]),
        median=median,
        rhat=split_rhat(con),
        acceptance=[r.acceptance for r in results],
        m=m,
        p=p,
        draws=con,
    )


def laplace_chol(post: Posterior, v, step: float = 1e-4) -> np.ndarray | None:
    """Cholesky factor of the inverse negative Hessian at ``v``, or None if not PD."""
    dim = v.size
    f0 = post(v)
    hess = np.empty((dim, dim))
    e = np.eye(dim) * step
    fp = np.array([post(v + e[a]) for a in range(dim)])
    fm = np.array([post(v - e[a]) for a in range(dim)])
    for a in range(dim):
        hess[a, a] = (fp[a] - 2.0 * f0 + fm[a]) / step**2
        for b in range(a):
            fpp = post(v + e[a] + e[b])
            fmm = post(v - e[a] - e[b])
            hess[a, b] = hess[b, a] = (fpp - fp[a] - fp[b] + 2.0 * f0 - fm[a] - fm[b] + fmm) / (2.0 * step**2)
    if not np.all(np.isfinite(hess)):
        return None
    try:
        return np.linalg.cholesky(np.linalg.inv(-hess))
    except np.linalg.LinAlgError:
        return None


def map_estimate(data, init=None, p: int = 2, max_evals: int = 5000, tol: float = 1e-6,
                 posterior: Posterior | None = None) -> np.ndarray:
    """Posterior mode by Nelder-Mead, restarted until it stops moving.

    Stops when the simplex shrinks below ``tol`` and a restart does not move
    the point, or after ``max_evals`` objective evaluations in total.  The
    returned point never has a lower log posterior than ``init``.
    """
    post = posterior if posterior is not None else Posterior(data, p)
    x = np.array(default_init(post.data, post.p) if init is None else init, dtype=float)
    f = post(x)
    if not math.isfinite(f):
        raise ValueError("log posterior is not finite at the initial point")
    used = 0
    while used < max_evals:
        res = minimize(lambda z: -post(z), x, method="Nelder-Mead",
                       options=dict(xatol=tol, fatol=1e-10, maxfev=max_evals - used,
                                    adaptive=x.size > 5))
        used += res.nfev
        moved = float(np.max(np.abs(res.x - x)))
        if -res.fun >= f:
            x, f = res.x, -res.fun
        if moved < 10 * tol:
            break
    x = x.copy()
    x[:post.m] = _wrap(x[:post.m])
    return x


def fit(data, config: McmcConfig | None = None, p: int = 2, binding_q=None) -> ChainSummary:
    """Run ``config.chains`` chains and pool them into a :class:`ChainSummary`.

    Each chain starts from a jittered copy of the posterior mode and uses the
    Laplace covariance at the mode as its proposal shape.
    """
    config = config or McmcConfig()
    post = Posterior(data, p, binding_q=binding_q)
    seeds = np.random.SeedSequence(config.seed).spawn(config.chains + 1)
    mode = map_estimate(None, posterior=post)
    chol = laplace_chol(post, mode)
    if chol is None:
        log.warning("Hessian at the mode is not negative definite; using identity proposals")
    jitter_rng = np.random.default_rng(seeds[-1])
    results = []
    for c in range(config.chains):
        init = mode
        if chol is not None and config.init_jitter > 0:
            for _ in range(100):
                cand = mode + config.init_jitter * (chol @ jitter_rng.standard_normal(mode.size))
                if math.isfinite(post(cand)):
                    init = cand
                    break
        results.append(run_chain(None, config, seeds[c], init=init,
                                 proposal_chol=chol, posterior=post))
        log.info("chain %d: acceptance %.3f", c + 1, results[-1].acceptance)
    return summarize(results, post.m, post.p)
