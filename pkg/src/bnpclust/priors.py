"""Prior distributions of the number of clusters K_n.

Exact pmfs exist for the Gibbs-type families (through V_{n,k} times a
factorial-coefficient table) and for the Dirichlet multinomial process
(through a dedicated dynamic program).  PYM/NGGM have no product-form
dynamic program because the |l|-dependent factor couples the blocks, so
their prior K_n is estimated by sequential Monte Carlo driven by the
EPPF predictive ratios.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from bnpclust.eppf import log_eppf_unordered, shared_engine
from bnpclust.gfc import GfcTable, StirlingTable
from bnpclust.logspace import log_pochhammer
from bnpclust.processes import Composition, Family, ProcessSpec
from bnpclust.vnk import NggVnkEngine

__all__ = [
    "PriorKnPmf",
    "prior_kn_gibbs",
    "prior_kn_dmp",
    "prior_kn_mc",
    "prior_kn_mc_mixed_alpha",
    "expected_kn",
    "solve_param_for_ekn",
    "BracketError",
]


@dataclass
class PriorKnPmf:
    """Distribution of the number of clusters among n observations.

    ``pmf[j]`` is P(K_n = j+1) for j = 0..k_max-1.
    """

    spec: ProcessSpec
    n: int
    pmf: np.ndarray
    method: str
    draws: int | None = None
    seed: int | None = None

    @property
    def support(self) -> np.ndarray:
        return np.arange(1, len(self.pmf) + 1)

    @property
    def mean(self) -> float:
        return float((self.support * self.pmf).sum())

    def prob(self, k: int) -> float:
        if 1 <= k <= len(self.pmf):
            return float(self.pmf[k - 1])
        return 0.0

    def to_records(self) -> list[dict]:
        return [{"k": int(k), "probability": float(p)}
                for k, p in zip(self.support, self.pmf)]


def prior_kn_gibbs(spec: ProcessSpec, n: int,
                   engine: NggVnkEngine | None = None) -> PriorKnPmf:
    """Exact K_n pmf for DP/PY/NGG.

    P(K_n = k) = V_{n,k} C(n,k;sigma)/sigma^k for sigma > 0, with the
    sigma -> 0 limit |s(n,k)| (unsigned Stirling numbers) for the DP.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    f = spec.family
    if f not in (Family.DP, Family.PY, Family.NGG):
        raise ValueError(f"prior_kn_gibbs handles DP/PY/NGG, not {f.value}")
    sigma = spec.effective_sigma()
    ks = np.arange(1, n + 1)
    if f == Family.DP or (f == Family.PY and sigma == 0.0):
        alpha = spec.alpha
        logv = ks * math.log(alpha) - log_pochhammer(alpha, n)
        logc = StirlingTable(n).log_row(n)
    elif f == Family.PY:
        a, s = spec.alpha, spec.sigma
        cum = np.concatenate([[0.0], np.cumsum(np.log(a + s * np.arange(1, n)))])
        logv = cum[ks - 1] - log_pochhammer(a + 1, n - 1)
        logc = GfcTable(s, n).log_row(n) - ks * math.log(s)
    else:
        if engine is None:
            engine = shared_engine(spec.sigma, spec.beta)
        logv = engine.row_log(n)
        logc = GfcTable(spec.sigma, n).log_row(n) - ks * math.log(spec.sigma)
    pmf = np.exp(logv + logc)
    return PriorKnPmf(spec, n, pmf, method="exact")


def prior_kn_dmp(spec: ProcessSpec, n: int) -> PriorKnPmf:
    """Exact K_n pmf for the Dirichlet multinomial process.

    Uses the dynamic program over S(n,k) = sum over k-block set
    partitions of prod_j (c)_{n_j} with c = alpha/K:

        S(1,1) = c,   S(n+1,k) = c S(n,k-1) + (k c + n) S(n,k),

    exact because attaching a new element to any k-block partition
    contributes sum_j (c + n_j) = k c + n regardless of block sizes.
    Then P(K_n = k) = K!/(K-k)! S(n,k) / (alpha)_n.
    """
    if spec.family != Family.DMP:
        raise ValueError("prior_kn_dmp requires a DMP spec")
    if n < 1:
        raise ValueError("n must be >= 1")
    K, alpha = spec.K, spec.alpha
    c = alpha / K
    log_c = math.log(c)
    kmax = min(n, K)
    logS = np.full(kmax + 1, -np.inf)
    logS[1] = log_c
    for m in range(1, n):
        hi = min(m + 1, kmax)
        ks = np.arange(1, hi + 1)
        grow = np.log(ks * c + m) + logS[1 : hi + 1]
        born = log_c + np.concatenate([[-np.inf], logS[1:hi]])
        logS[1 : hi + 1] = np.logaddexp(grow, born)
    ks = np.arange(1, kmax + 1)
    log_fall = np.array([math.lgamma(K + 1) - math.lgamma(K - k + 1) for k in ks])
    logp = log_fall + logS[1:] - log_pochhammer(alpha, n)
    return PriorKnPmf(spec, n, np.exp(logp), method="exact")


def prior_kn_mc(spec: ProcessSpec, n: int, draws: int, seed: int) -> PriorKnPmf:
    """Monte-Carlo K_n pmf by sequential allocation for finite families.

    Element i+1 joins an existing block or opens a new one with
    probability proportional to the EPPF predictive ratio.  Exchangeable
    partition distributions make these ratios a proper predictive rule.
    Deterministic given ``seed``.
    """
    if not spec.is_finite:
        raise ValueError("prior_kn_mc supports DMP/PYM/NGGM")
    if draws < 1:
        raise ValueError("draws must be >= 1")
    if spec.family == Family.DMP:
        counts_k = _mc_dmp_fast(spec, n, draws, seed)
    else:
        counts_k = _mc_generic(spec, n, draws, seed)
    kmax = min(n, spec.K)
    pmf = np.bincount(counts_k, minlength=kmax + 1)[1 : kmax + 1] / draws
    return PriorKnPmf(spec, n, pmf, method="monte_carlo", draws=draws, seed=seed)


def _mc_dmp_fast(spec: ProcessSpec, n: int, draws: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    c = np.full((draws, 1), spec.alpha / spec.K)
    return _dirichlet_multinomial_kn(rng, spec.K, n, c)


def _dirichlet_multinomial_kn(rng, K: int, n: int, c: np.ndarray) -> np.ndarray:
    # DMP allocations are iid draws from w ~ Dir(c,...,c) marginalized:
    # P(z_{i+1} = j | counts) = (c + m_j)/(K c + i); vectorized across
    # draws, with a per-draw concentration column c of shape (draws, 1).
    draws = c.shape[0]
    counts = np.zeros((draws, K))
    for i in range(n):
        probs = (counts + c) / (K * c + i)
        u = rng.random((draws, 1))
        z = (probs.cumsum(axis=1) < u).sum(axis=1).clip(max=K - 1)
        counts[np.arange(draws), z] += 1
    return (counts > 0).sum(axis=1)


def prior_kn_mc_mixed_alpha(K: int, n: int, a: float, b: float,
                            draws: int, seed: int) -> np.ndarray:
    """K_n pmf of a DMP whose concentration carries a Gamma(a, bK) prior.

    Draws alpha_bar ~ Gamma(a, rate bK) per replicate, then the number
    of occupied components among n allocations; returns the pmf over
    k = 1..K.
    """
    rng = np.random.default_rng(seed)
    abar = rng.gamma(a, 1.0 / (b * K), size=(draws, 1))
    abar = np.maximum(abar, 1e-12)
    ks = _dirichlet_multinomial_kn(rng, K, n, abar)
    return np.bincount(ks.astype(np.int64), minlength=K + 1)[1 : K + 1] / draws


def _mc_generic(spec: ProcessSpec, n: int, draws: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    memo: dict[tuple, float] = {}

    def logq(blocks: tuple) -> float:
        key = tuple(sorted(blocks))
        if key not in memo:
            memo[key] = log_eppf_unordered(spec, Composition(key)).log
        return memo[key]

    out = np.empty(draws, dtype=np.int64)
    for d in range(draws):
        blocks = [1]
        for _ in range(1, n):
            base = logq(tuple(blocks))
            lw = []
            for j in range(len(blocks)):
                grown = list(blocks)
                grown[j] += 1
                lw.append(logq(tuple(grown)) - base)
            if len(blocks) < spec.K:
                lw.append(logq(tuple(blocks + [1])) - base)
            w = np.exp(np.array(lw) - max(lw))
            w /= w.sum()
            j = rng.choice(len(w), p=w)
            if j < len(blocks):
                blocks[j] += 1
            else:
                blocks.append(1)
        out[d] = len(blocks)
    return out


def expected_kn(spec: ProcessSpec, n: int,
                engine: NggVnkEngine | None = None) -> float:
    """Exact prior expectation of K_n for DP/PY/NGG/DMP."""
    f = spec.family
    if f == Family.DP:
        i = np.arange(n)
        return float((spec.alpha / (spec.alpha + i)).sum())
    if f == Family.PY:
        a, s = spec.alpha, spec.sigma
        if s == 0:
            i = np.arange(n)
            return float((a / (a + i)).sum())
        lr = (math.lgamma(a + s + n) - math.lgamma(a + s)
              - (math.lgamma(a + n) - math.lgamma(a)))
        return (a / s) * math.expm1(lr)
    if f == Family.NGG:
        return prior_kn_gibbs(spec, n, engine=engine).mean
    if f == Family.DMP:
        return prior_kn_dmp(spec, n).mean
    raise ValueError(f"no exact prior expectation for {f.value}; use prior_kn_mc")


class BracketError(ValueError):
    """The bisection bracket does not enclose the target expectation."""


def solve_param_for_ekn(family: Family, param: str, n: int, target: float,
                        bracket: tuple[float, float], tol: float = 1e-3,
                        max_iter: int = 200, **fixed) -> float:
    """Solve one parameter so that the exact prior E[K_n] hits ``target``.

    ``param`` names the free ProcessSpec field ("alpha" or "beta");
    remaining parameters are passed as keyword arguments.  Monotonicity
    of the expectation over the bracket is checked at the endpoints, and
    plain bisection then drives |E[K_n] - target| below ``tol``.
    """

    def ekn(value: float) -> float:
        return expected_kn(ProcessSpec(family, **{param: value, **fixed}), n)

    lo, hi = bracket
    e_lo, e_hi = ekn(lo), ekn(hi)
    if not (min(e_lo, e_hi) <= target <= max(e_lo, e_hi)):
        raise BracketError(
            f"E[K_{n}] spans [{e_lo:.4g}, {e_hi:.4g}] on the bracket; target {target} outside"
        )
    increasing = e_hi >= e_lo
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        e_mid = ekn(mid)
        if abs(e_mid - target) <= tol:
            return mid
        if (e_mid < target) == increasing:
            lo = mid
        else:
            hi = mid
    raise ArithmeticError(f"bisection did not reach |E[K_n] - {target}| <= {tol}")
