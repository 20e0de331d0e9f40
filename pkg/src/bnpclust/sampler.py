"""Blocked Gibbs sampler for an overfitted multivariate-Gaussian mixture
with symmetric Dirichlet weights (the Dirichlet-multinomial mixture).

Model, for data x_1..x_n in R^r and K components:

    w | abar ~ Dir(abar, ..., abar)            abar = alpha/K
    z_i | w  ~ Cat(w)
    mu_k     ~ N(b0, B0)
    Q_k = Sigma_k^{-1} ~ W(c0, C0),  C0 ~ W(g0, G0)

where W(a, B) is the Wishart with density proportional to
|X|^(a-(r+1)/2) exp(-tr(BX)), so E[X] = a B^{-1}.  Hyperparameters
follow the standard empirical choices: b0 the data median, B0 the
squared data ranges, c0 = 2.5 + (r-1)/2, g0 = 0.5 + (r-1)/2 and
G0 = (100 g0/c0) diag(1/R_j^2).

The weights are sampled explicitly (blocked, not collapsed) because the
post-processing consumes the full mixing measure and the weight
summaries need w draws.  No identifiability constraint is imposed;
weight summaries sort each draw in decreasing order instead.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from bnpclust.ot import AtomicMeasure
from bnpclust.priors import solve_param_for_ekn
from bnpclust.processes import Family

__all__ = [
    "GenSpec",
    "default_genspec",
    "generate_data",
    "ModelConfig",
    "ChainState",
    "Trace",
    "run_chains",
    "gibbs_sweep",
    "gelman_rubin",
    "posterior_kn_pmf",
    "posterior_sorted_weights",
    "export_mixing_measures",
    "alpha_for_fixed_ekn",
]

TRACE_FORMAT_VERSION = 1


# ---------------------------------------------------------------------------
# data generation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GenSpec:
    """Ground truth for the simulated Gaussian location mixture."""

    weights: tuple
    means: tuple
    covariance: tuple
    seed: int = 2024

    def __post_init__(self):
        w = np.asarray(self.weights)
        if abs(w.sum() - 1.0) > 1e-12 or np.any(w <= 0):
            raise ValueError("weights must be positive and sum to 1")
        if len(self.means) != len(self.weights):
            raise ValueError("need one mean per component")

    @property
    def K0(self) -> int:
        return len(self.weights)

    @property
    def dim(self) -> int:
        return len(self.means[0])

    def mixing_measure(self) -> AtomicMeasure:
        return AtomicMeasure(np.asarray(self.weights), np.asarray(self.means))


def default_genspec(seed: int = 2024) -> GenSpec:
    """Three well-separated bivariate Gaussians, common covariance 0.05 I."""
    return GenSpec(
        weights=(0.5, 0.3, 0.2),
        means=((0.8, 0.8), (0.8, -0.8), (-0.8, 0.8)),
        covariance=((0.05, 0.0), (0.0, 0.05)),
        seed=seed,
    )


def generate_data(gen: GenSpec, n: int):
    """Draw n observations; returns (x, true labels).

    Each observation uses its own counter-derived substream, so the
    dataset for a smaller n is exactly the prefix of the dataset for any
    larger n at the same seed (nested designs come for free).
    """
    d = gen.dim
    x = np.empty((n, d))
    labels = np.empty(n, dtype=np.int64)
    cum = np.cumsum(gen.weights)
    L = np.linalg.cholesky(np.asarray(gen.covariance))
    means = np.asarray(gen.means)
    for i in range(n):
        rng = np.random.default_rng(np.random.SeedSequence(entropy=(gen.seed, i)))
        labels[i] = int(np.searchsorted(cum, rng.random()))
        x[i] = means[labels[i]] + L @ rng.standard_normal(d)
    return x, labels


# ---------------------------------------------------------------------------
# model configuration and state
# ---------------------------------------------------------------------------

@dataclass
class ModelConfig:
    """Sampler configuration.

    alpha_mode is one of "fixed" (use alpha_bar), "solve_ekn" (choose
    alpha_bar so the exact prior E[K_n] equals ekn_target), or
    "gamma_prior" (alpha_bar ~ Gamma(gamma_a, rate gamma_b * K) updated
    by an adaptive random-walk Metropolis step on log alpha_bar).
    """

    K: int = 10
    alpha_mode: str = "fixed"
    alpha_bar: float | None = 1.0
    ekn_target: float | None = None
    gamma_a: float = 1.0
    gamma_b: float = 0.1

    def __post_init__(self):
        if self.K < 1:
            raise ValueError("K must be >= 1")
        if self.alpha_mode not in ("fixed", "solve_ekn", "gamma_prior"):
            raise ValueError(f"unknown alpha_mode {self.alpha_mode!r}")
        if self.alpha_mode == "fixed" and (self.alpha_bar is None or self.alpha_bar <= 0):
            raise ValueError("fixed mode requires alpha_bar > 0")
        if self.alpha_mode == "solve_ekn" and self.ekn_target is None:
            raise ValueError("solve_ekn mode requires ekn_target")
        if self.alpha_mode == "gamma_prior" and (self.gamma_a <= 0 or self.gamma_b <= 0):
            raise ValueError("gamma_prior mode requires a, b > 0")


@dataclass
class _Hyper:
    b0: np.ndarray
    B0inv: np.ndarray
    c0: float
    g0: float
    G0: np.ndarray

    @staticmethod
    def from_data(x: np.ndarray) -> "_Hyper":
        r = x.shape[1]
        rng_x = x.max(axis=0) - x.min(axis=0)
        return _Hyper(
            b0=np.median(x, axis=0),
            B0inv=np.diag(1.0 / rng_x**2),
            c0=2.5 + (r - 1) / 2.0,
            g0=0.5 + (r - 1) / 2.0,
            G0=(100.0 * (0.5 + (r - 1) / 2.0) / (2.5 + (r - 1) / 2.0)) * np.diag(1.0 / rng_x**2),
        )


@dataclass
class ChainState:
    z: np.ndarray
    w: np.ndarray
    mu: np.ndarray          # (K, r)
    prec: np.ndarray        # (K, r, r) component precisions
    C0: np.ndarray          # (r, r)
    alpha_bar: float
    rw_scale: float = 0.5   # Metropolis step size on log alpha_bar
    rw_accept: int = 0
    rw_tries: int = 0

    def counts(self, K: int) -> np.ndarray:
        return np.bincount(self.z, minlength=K)


def _wishart_rate(rng: np.random.Generator, shape: float, rate: np.ndarray) -> np.ndarray:
    """Sample from density |X|^(shape-(r+1)/2) exp(-tr(rate X))."""
    r = rate.shape[0]
    df = 2.0 * shape
    V = np.linalg.inv(2.0 * rate)
    L = np.linalg.cholesky(V)
    A = np.zeros((r, r))
    for i in range(r):
        A[i, i] = math.sqrt(rng.chisquare(df - i))
        for j in range(i):
            A[i, j] = rng.standard_normal()
    W = L @ A
    return W @ W.T


def _init_state(x, config, hyper, rng, init, alpha_bar) -> ChainState:
    n, r = x.shape
    K = config.K
    if init == "single":
        z = np.zeros(n, dtype=np.int64)
    elif init == "random":
        z = rng.integers(0, K, size=n)
    else:
        raise ValueError(f"unknown init {init!r}")
    C0 = hyper.g0 * np.linalg.inv(hyper.G0)
    prec = np.array([hyper.c0 * np.linalg.inv(C0) for _ in range(K)])
    mu = hyper.b0 + rng.standard_normal((K, r)) @ np.linalg.cholesky(
        np.linalg.inv(hyper.B0inv)).T
    w = _sample_dirichlet(rng, np.full(K, alpha_bar))
    return ChainState(z=z, w=w, mu=mu, prec=prec, C0=C0, alpha_bar=alpha_bar)


def _sample_dirichlet(rng: np.random.Generator, shape: np.ndarray) -> np.ndarray:
    # gamma draws can underflow to exact zero for shapes << 1; that is a
    # genuine feature of sparse Dirichlets (weights below realmin), kept as 0
    g = rng.gamma(shape)
    total = g.sum()
    if total == 0.0:  # pragma: no cover - only if every shape is tiny
        g[np.argmax(shape)] = 1.0
        total = 1.0
    return g / total


def gibbs_sweep(state: ChainState, x: np.ndarray, config: ModelConfig,
                hyper: _Hyper, rng: np.random.Generator,
                likelihood_on: bool = True) -> float:
    """One full conditional update cycle; returns the data log-likelihood.

    With likelihood_on=False the allocations are drawn from the prior
    weights alone (the mu/Sigma blocks then drop out of the (z, w)
    marginal and are skipped); this is the prior-reproduction mode used
    by the Geweke-style correctness test.
    """
    n, r = x.shape
    K = config.K
    loglik = float("nan")
    if likelihood_on:
        LL = np.empty((n, K))
        for k in range(K):
            Q = state.prec[k]
            diff = x - state.mu[k]
            quad = np.einsum("ij,jk,ik->i", diff, Q, diff)
            _, logdet = np.linalg.slogdet(Q)
            LL[:, k] = 0.5 * logdet - 0.5 * quad
        LL -= 0.5 * r * math.log(2 * math.pi)
        with np.errstate(divide="ignore"):
            post = LL + np.log(state.w)[None, :]
        state.z = np.argmax(post + rng.gumbel(size=(n, K)), axis=1)
        m = post.max(axis=1)
        loglik = float((m + np.log(np.exp(post - m[:, None]).sum(axis=1))).sum())
    else:
        u = rng.random((n, 1))
        state.z = (state.w.cumsum() < u).sum(axis=1).clip(max=K - 1)
    counts = state.counts(K)

    state.w = _sample_dirichlet(rng, state.alpha_bar + counts)

    if likelihood_on:
        for k in range(K):
            nk = counts[k]
            Q = state.prec[k]
            prec_post = hyper.B0inv + nk * Q
            cov_post = np.linalg.inv(prec_post)
            s = x[state.z == k].sum(axis=0) if nk else np.zeros(r)
            mean_post = cov_post @ (hyper.B0inv @ hyper.b0 + Q @ s)
            state.mu[k] = mean_post + np.linalg.cholesky(cov_post) @ rng.standard_normal(r)
        for k in range(K):
            nk = counts[k]
            if nk:
                diff = x[state.z == k] - state.mu[k]
                S = diff.T @ diff
            else:
                S = np.zeros((r, r))
            state.prec[k] = _wishart_rate(rng, hyper.c0 + nk / 2.0, state.C0 + 0.5 * S)
        state.C0 = _wishart_rate(rng, hyper.g0 + K * hyper.c0,
                                 hyper.G0 + state.prec.sum(axis=0))

    if config.alpha_mode == "gamma_prior":
        _alpha_metropolis(state, config, rng)
    return loglik


def _alpha_log_target(ab: float, w: np.ndarray, config: ModelConfig) -> float:
    K = config.K
    # Dirichlet marginal of the current weights + Gamma(a, bK) prior,
    # plus the log-scale proposal Jacobian
    logw = np.log(np.maximum(w, 1e-280)).sum()
    return (math.lgamma(K * ab) - K * math.lgamma(ab) + (ab - 1.0) * logw
            + (config.gamma_a - 1.0) * math.log(ab) - config.gamma_b * K * ab
            + math.log(ab))


def _alpha_metropolis(state: ChainState, config: ModelConfig,
                      rng: np.random.Generator) -> None:
    cur = state.alpha_bar
    prop = cur * math.exp(state.rw_scale * rng.standard_normal())
    loga = _alpha_log_target(prop, state.w, config) - _alpha_log_target(cur, state.w, config)
    state.rw_tries += 1
    if math.log(rng.random()) < loga:
        state.alpha_bar = prop
        state.rw_accept += 1


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

@dataclass
class Trace:
    """Post-burn-in per-iteration records plus mixing-measure snapshots."""

    k_occupied: np.ndarray
    w_sorted: np.ndarray       # (T, K) decreasing per row
    alpha_bar: np.ndarray
    loglik: np.ndarray
    iters: np.ndarray          # global iteration index per record
    snap_w: np.ndarray         # (S, K)
    snap_mu: np.ndarray        # (S, K, r)
    snap_iters: np.ndarray
    meta: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.k_occupied)

    def scalar(self, name: str) -> np.ndarray:
        if name not in ("k_occupied", "alpha_bar", "loglik"):
            raise ValueError(f"unknown scalar {name!r}")
        return getattr(self, name)

    def save(self, path) -> None:
        path = Path(path)
        with open(path, "w") as fh:
            header = {"version": TRACE_FORMAT_VERSION, "kind": "trace", "meta": self.meta}
            fh.write(json.dumps(header) + "\n")
            for i in range(len(self)):
                rec = {
                    "iter": int(self.iters[i]),
                    "k_occupied": int(self.k_occupied[i]),
                    "w_sorted": [float(v) for v in self.w_sorted[i]],
                    "alpha_bar": float(self.alpha_bar[i]),
                    "loglik": float(self.loglik[i]),
                }
                fh.write(json.dumps(rec) + "\n")
        np.savez_compressed(self.snapshot_path(path), w=self.snap_w, mu=self.snap_mu,
                            iters=self.snap_iters)

    @staticmethod
    def snapshot_path(path) -> Path:
        path = Path(path)
        return path.with_name(path.stem + ".snapshots.npz")

    @staticmethod
    def load(path) -> "Trace":
        path = Path(path)
        with open(path) as fh:
            header = json.loads(fh.readline())
            if header.get("kind") != "trace" or header.get("version") != TRACE_FORMAT_VERSION:
                raise ValueError(f"{path} is not a recognized trace file")
            recs = [json.loads(line) for line in fh if line.strip()]
        if not recs:
            raise ValueError(f"trace file {path} holds no records")
        snaps = np.load(Trace.snapshot_path(path))
        return Trace(
            k_occupied=np.array([r["k_occupied"] for r in recs], dtype=np.int64),
            w_sorted=np.array([r["w_sorted"] for r in recs]),
            alpha_bar=np.array([r["alpha_bar"] for r in recs]),
            loglik=np.array([r["loglik"] for r in recs]),
            iters=np.array([r["iter"] for r in recs], dtype=np.int64),
            snap_w=snaps["w"],
            snap_mu=snaps["mu"],
            snap_iters=snaps["iters"],
            meta=header.get("meta", {}),
        )


def run_chains(x: np.ndarray, config: ModelConfig, n_chains: int = 2,
               iters: int = 15000, burnin: int = 6000, seed: int = 0,
               thin: int = 1, snapshot_stride: int = 20,
               inits=("random", "single"), likelihood_on: bool = True) -> list[Trace]:
    """Run independent chains with derived seeds; returns one Trace each.

    Chain c uses inits[c % len(inits)], so the default pair starts one
    chain from a uniform-random allocation and one from a single
    cluster (overdispersed starts for the convergence diagnostic).
    """
    if iters <= burnin:
        raise ValueError("iters must exceed burnin")
    x = np.asarray(x, dtype=float)
    n, r = x.shape
    hyper = _Hyper.from_data(x)
    alpha_bar = _resolve_alpha(config, n)
    traces = []
    for c, ss in enumerate(np.random.SeedSequence(seed).spawn(n_chains)):
        rng = np.random.default_rng(ss)
        state = _init_state(x, config, hyper, rng, inits[c % len(inits)], alpha_bar)
        K = config.K
        kept = range(burnin, iters, thin)
        T = len(kept)
        S = len(range(burnin, iters, snapshot_stride))
        tr = Trace(
            k_occupied=np.empty(T, dtype=np.int64),
            w_sorted=np.empty((T, K)),
            alpha_bar=np.empty(T),
            loglik=np.empty(T),
            iters=np.array(list(kept), dtype=np.int64),
            snap_w=np.empty((S, K)),
            snap_mu=np.empty((S, K, r)),
            snap_iters=np.array(list(range(burnin, iters, snapshot_stride)), dtype=np.int64),
            meta={"n": n, "K": K, "alpha_mode": config.alpha_mode,
                  "alpha_bar": alpha_bar, "chain": c, "iters": iters,
                  "burnin": burnin, "thin": thin, "seed": seed,
                  "likelihood_on": likelihood_on},
        )
        t = s = 0
        for it in range(iters):
            ll = gibbs_sweep(state, x, config, hyper, rng, likelihood_on=likelihood_on)
            if state.rw_tries and it < burnin and state.rw_tries % 50 == 0:
                rate = state.rw_accept / state.rw_tries
                state.rw_scale *= math.exp(0.5 * (rate - 0.44))
            if it >= burnin:
                if (it - burnin) % thin == 0:
                    tr.k_occupied[t] = (state.counts(K) > 0).sum()
                    tr.w_sorted[t] = np.sort(state.w)[::-1]
                    tr.alpha_bar[t] = state.alpha_bar
                    tr.loglik[t] = ll
                    t += 1
                if (it - burnin) % snapshot_stride == 0:
                    tr.snap_w[s] = state.w
                    tr.snap_mu[s] = state.mu
                    s += 1
        traces.append(tr)
    return traces


def _resolve_alpha(config: ModelConfig, n: int) -> float:
    if config.alpha_mode == "fixed":
        return float(config.alpha_bar)
    if config.alpha_mode == "solve_ekn":
        return alpha_for_fixed_ekn(n, config.ekn_target, config.K)
    # gamma_prior: start at the prior mean a/(bK)
    return config.gamma_a / (config.gamma_b * config.K)


# ---------------------------------------------------------------------------
# summaries and diagnostics
# ---------------------------------------------------------------------------

def gelman_rubin(traces: list[Trace], scalar: str = "k_occupied") -> float:
    """Potential scale reduction factor across >= 2 equal-length chains.

    Clamped below at 1, so identical chains report exactly 1.
    """
    if len(traces) < 2:
        raise ValueError("the diagnostic needs at least two chains")
    series = [np.asarray(t.scalar(scalar), dtype=float) for t in traces]
    T = len(series[0])
    if any(len(s) != T for s in series):
        raise ValueError("chains must have equal lengths")
    chains = np.stack(series)
    W = chains.var(axis=1, ddof=1).mean()
    var_means = chains.mean(axis=1).var(ddof=1)
    if W == 0:
        return 1.0
    v_hat = (T - 1) / T * W + var_means
    return max(1.0, math.sqrt(v_hat / W))


def posterior_kn_pmf(traces) -> np.ndarray:
    """Pmf of the occupied-component count; index j holds P(K+ = j+1)."""
    traces = traces if isinstance(traces, (list, tuple)) else [traces]
    ks = np.concatenate([t.k_occupied for t in traces])
    K = max(int(t.meta.get("K", ks.max())) for t in traces)
    return np.bincount(ks, minlength=K + 1)[1 : K + 1] / len(ks)


def posterior_sorted_weights(traces, quantiles=(0.05, 0.25, 0.5, 0.75, 0.95)) -> np.ndarray:
    """Per-rank quantiles of the decreasing-sorted weights, shape (K, len(q))."""
    traces = traces if isinstance(traces, (list, tuple)) else [traces]
    w = np.concatenate([t.w_sorted for t in traces], axis=0)
    return np.quantile(w, quantiles, axis=0).T


def export_mixing_measures(trace: Trace) -> list[AtomicMeasure]:
    """Snapshot mixing measures over all K components, for post-processing.

    Components whose sampled weight underflowed to exact zero carry no
    mass and are dropped (a zero-weight atom is invisible to both the
    Wasserstein distance and the post-processing).
    """
    out = []
    for w, mu in zip(trace.snap_w, trace.snap_mu):
        keep = w > 0
        out.append(AtomicMeasure(w[keep], mu[keep], normalize=True))
    return out


def alpha_for_fixed_ekn(n: int, target: float, K: int,
                        bracket: tuple[float, float] = (1e-6, 1e6)) -> float:
    """alpha_bar = alpha/K such that the exact DMP prior E[K_n] = target.

    E[K_n] spans (1, min(n, K)) as alpha sweeps (0, inf), so targets at
    or beyond min(n, K) raise BracketError.
    """
    alpha = solve_param_for_ekn(Family.DMP, "alpha", n, target,
                                bracket=(bracket[0] * K, bracket[1] * K), K=K)
    return alpha / K
