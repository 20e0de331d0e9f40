"""Ordered-partition probabilities for all supported prior families.

The canonical ``log_eppf`` returns the ordered-partition probability
p(A) exactly as each family defines it (the 1/k! or binomial-coefficient
normalization is already inside); ``log_eppf_unordered`` multiplies by
k!.  The finite PYM/NGGM families involve a sum over per-block counts
(l_1, ..., l_k) with l_i <= n_i; that sum is evaluated by convolving the
per-block coefficient sequences into the distribution of m = |l| and
contracting against the m-dependent factor, all in log space (every
summand is positive).
"""

from __future__ import annotations

import functools
import math

import numpy as np

from bnpclust.gfc import GfcTable
from bnpclust.logspace import LogValue, log_convolve, log_pochhammer
from bnpclust.processes import Composition, Family, ProcessSpec
from bnpclust.vnk import NggVnkEngine, log_vnk

__all__ = ["log_eppf", "log_eppf_unordered", "log_eppf_ratio_split", "shared_engine"]


@functools.lru_cache(maxsize=8)
def _gfc(sigma: float, n_max: int) -> GfcTable:
    return GfcTable(sigma, n_max)


@functools.lru_cache(maxsize=8)
def shared_engine(sigma: float, beta: float, precision_bits: int = 512) -> NggVnkEngine:
    """Process-wide NGG weight engine, shared so gamma caches accumulate."""
    return NggVnkEngine(sigma, beta, precision_bits=precision_bits)


def _bucket(n: int) -> int:
    # round table sizes up so nearby n reuse one cached table
    size = 16
    while size < n:
        size *= 2
    return size


def _log_binom(K: int, k: int) -> float:
    return math.lgamma(K + 1) - math.lgamma(k + 1) - math.lgamma(K - k + 1)


def log_eppf(spec: ProcessSpec, comp: Composition,
             engine: NggVnkEngine | None = None) -> LogValue:
    """log p(A) for the ordered partition with block sizes ``comp``."""
    n, k = comp.n, comp.k
    f = spec.family
    if spec.is_finite and k > spec.K:
        return LogValue.zero()
    # blocks are summed in sorted order so permuted compositions produce
    # bitwise-identical values (exchangeability holds exactly)
    blocks = sorted(comp.blocks)
    if spec.is_gibbs:
        sigma = spec.effective_sigma()
        lv = log_vnk(spec, n, k, engine=engine)
        tail = sum(log_pochhammer(1.0 - sigma, b - 1) for b in blocks)
        return LogValue(lv.log - math.lgamma(k + 1) + tail)
    if f == Family.DMP:
        c = spec.alpha / spec.K
        tail = sum(log_pochhammer(c, b) for b in blocks)
        return LogValue(_log_binom(spec.K, k) + tail - log_pochhammer(spec.alpha, n))
    if f == Family.PYM:
        return _log_eppf_pym(spec, comp)
    if f == Family.NGGM:
        return _log_eppf_nggm(spec, comp, engine)
    raise ValueError(f"unsupported family {f}")  # pragma: no cover


def log_eppf_unordered(spec: ProcessSpec, comp: Composition,
                       engine: NggVnkEngine | None = None) -> LogValue:
    """log of the unordered-partition probability, k! times the ordered one."""
    p = log_eppf(spec, comp, engine=engine)
    if p.is_zero:
        return p
    return LogValue(p.log + math.lgamma(comp.k + 1))


def _block_count_distribution(comp: Composition, sigma: float, per_count_log: float) -> np.ndarray:
    """log coefficients over m = |l| of prod_i C(n_i, l_i; sigma) * e^(per_count_log * l_i).

    Index j of the returned array corresponds to m = k + j, up to m = n.
    """
    gfc = _gfc(sigma, _bucket(comp.n))
    acc = None
    for b in sorted(comp.blocks):
        vec = gfc.log_row(b) + per_count_log * np.arange(1, b + 1)
        acc = vec if acc is None else log_convolve(acc, vec)
    return acc


def _log_eppf_pym(spec: ProcessSpec, comp: Composition) -> LogValue:
    n, k = comp.n, comp.k
    a, s, K = spec.alpha, spec.sigma, spec.K
    coeffs = _block_count_distribution(comp, s, -math.log(K))
    ms = np.arange(k, n + 1)
    with np.errstate(invalid="ignore"):
        terms = coeffs + np.array([math.lgamma(a / s + m) for m in ms])
    total = _logsumexp(terms)
    log_p = (_log_binom(K, k) - log_pochhammer(a + 1, n - 1)
             - math.log(s) - math.lgamma(a / s + 1) + total)
    return LogValue(log_p)


def _log_eppf_nggm(spec: ProcessSpec, comp: Composition,
                   engine: NggVnkEngine | None) -> LogValue:
    n, k = comp.n, comp.k
    s, K = spec.sigma, spec.K
    if engine is None:
        engine = shared_engine(s, spec.beta)
    coeffs = _block_count_distribution(comp, s, -math.log(s))
    ms = np.arange(k, n + 1)
    vlogs = np.array([engine.log_vnk(n, int(m)) for m in ms])
    terms = coeffs + vlogs - np.log(K) * ms
    total = _logsumexp(terms)
    return LogValue(_log_binom(K, k) + total)


def _logsumexp(terms: np.ndarray) -> float:
    finite = terms[np.isfinite(terms)]
    if finite.size == 0:
        return -math.inf
    mx = finite.max()
    return float(mx + np.log(np.exp(finite - mx).sum()))


def log_eppf_ratio_split(spec: ProcessSpec, comp: Composition, block: int,
                         engine: NggVnkEngine | None = None) -> float:
    """log[p(A) / p(B)] where B removes one element of ``block`` into a new singleton.

    Uses the cancellation shortcuts for Gibbs-type and DMP families;
    PYM/NGGM fall back to the direct quotient of two EPPF evaluations.
    Returns +inf when p(B) = 0 (splitting past a finite family's K).
    """
    size = comp.blocks[block]
    if size < 2:
        raise ValueError(f"block {block} is a singleton; nothing to split off")
    n, k = comp.n, comp.k
    if spec.is_gibbs:
        sigma = spec.effective_sigma()
        va = log_vnk(spec, n, k, engine=engine)
        vb = log_vnk(spec, n, k + 1, engine=engine)
        return math.log(k + 1) + va.log - vb.log + math.log(size - 1 - sigma)
    if spec.family == Family.DMP:
        if k >= spec.K:
            return math.inf
        c = spec.alpha / spec.K
        return (math.log(k + 1) + math.log(c + size - 1)
                - math.log(spec.K - k) - math.log(c))
    pa = log_eppf(spec, comp, engine=engine)
    pb = log_eppf(spec, comp.split_singleton(block), engine=engine)
    if pb.is_zero:
        return math.inf
    return pa.log - pb.log
