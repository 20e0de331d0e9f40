"""The singleton-split inconsistency diagnostic c_n(k).

c_n(k) is 1/n times the largest ratio p(A)/p(B) over k-block partitions
A and over partitions B obtained from A by splitting one element off a
non-singleton block.  The ratio depends on A only through its block
sizes and the donor block, so the exact search runs over integer
partitions of n into k parts rather than set partitions.  For the
Gibbs-type and DMP families the ratio is increasing in the donor block
size, making the single composition (n-k+1, 1, ..., 1) the exact
argmax; for PYM/NGGM the same composition is used as a heuristic and
validated against the exact search at small n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from bnpclust.eppf import log_eppf_ratio_split
from bnpclust.processes import Composition, Family, ProcessSpec
from bnpclust.vnk import NggVnkEngine, log_vnk

__all__ = ["CnkCurve", "cnk_exact", "cnk_fast", "cnk_curve", "vnk_ratio_curve",
           "integer_partitions"]

_EXACT_N_LIMIT = 30


@dataclass
class CnkCurve:
    spec: ProcessSpec
    k: int
    points: list[tuple[int, float]]
    method: str

    def values(self) -> list[float]:
        return [v for _, v in self.points]

    def to_records(self) -> list[dict]:
        return [
            {
                "family": self.spec.family.value,
                "params": self.spec.label(),
                "k": self.k,
                "n": n,
                "c_n_k": v,
                "method": self.method,
            }
            for n, v in self.points
        ]


def integer_partitions(n: int, k: int):
    """Yield the partitions of n into exactly k parts, non-increasing order."""
    if k < 1 or k > n:
        return
    if k == 1:
        yield (n,)
        return
    # first part m, remaining n-m into k-1 parts each <= m
    for m in range((n + k - 1) // k, n - k + 2):
        for rest in _partitions_max(n - m, k - 1, m):
            yield (m,) + rest


def _partitions_max(n: int, k: int, cap: int):
    if k == 1:
        if 1 <= n <= cap:
            yield (n,)
        return
    for m in range((n + k - 1) // k, min(cap, n - k + 1) + 1):
        for rest in _partitions_max(n - m, k - 1, m):
            yield (m,) + rest


def cnk_exact(spec: ProcessSpec, n: int, k: int,
              engine: NggVnkEngine | None = None) -> float:
    """Brute-force c_n(k) over every composition and donor block; n <= 30."""
    if not k < n:
        raise ValueError("c_n(k) requires k < n")
    if n > _EXACT_N_LIMIT:
        raise ValueError(f"cnk_exact refuses n > {_EXACT_N_LIMIT}; use cnk_fast")
    if spec.is_finite and k >= min(n, spec.K):
        raise ValueError("finite families require k < min(n, K)")
    best = -math.inf
    for part in integer_partitions(n, k):
        comp = Composition(part)
        seen = set()
        for j, size in enumerate(part):
            if size < 2 or size in seen:
                continue
            seen.add(size)
            best = max(best, log_eppf_ratio_split(spec, comp, j, engine=engine))
    return math.exp(best - math.log(n))


def cnk_fast(spec: ProcessSpec, n: int, k: int,
             engine: NggVnkEngine | None = None) -> float:
    """c_n(k) evaluated at the candidate maximizer (n-k+1, 1, ..., 1).

    Exact for Gibbs-type and DMP families (the split ratio increases
    with the donor block size); heuristic for PYM/NGGM.
    """
    if not k < n:
        raise ValueError("c_n(k) requires k < n")
    if spec.is_finite and k >= min(n, spec.K):
        raise ValueError("finite families require k < min(n, K)")
    comp = Composition((n - k + 1,) + (1,) * (k - 1))
    logr = log_eppf_ratio_split(spec, comp, 0, engine=engine)
    return math.exp(logr - math.log(n))


def cnk_curve(spec: ProcessSpec, k: int, n_grid,
              engine: NggVnkEngine | None = None) -> CnkCurve:
    """c_n(k) along a grid of n values using the argmax composition."""
    method = "heuristic_argmax" if spec.family in (Family.PYM, Family.NGGM) else "exact_argmax"
    # largest n first: the NGG engine then computes its gamma cache once
    # at the highest precision and reuses it for every smaller n
    grid = sorted({int(n) for n in n_grid if n > k}, reverse=True)
    pts = {n: cnk_fast(spec, n, k, engine=engine) for n in grid}
    return CnkCurve(spec, k, sorted(pts.items()), method)


def vnk_ratio_curve(spec: ProcessSpec, k: int, n_grid,
                    engine: NggVnkEngine | None = None) -> list[tuple[int, float]]:
    """The sequence V_{n,k}/V_{n,k+1}, whose boundedness drives the diagnostic."""
    if k < 1:
        raise ValueError("k must be >= 1")
    grid = sorted({int(n) for n in n_grid if n >= k + 1}, reverse=True)
    out = {}
    for n in grid:
        va = log_vnk(spec, n, k, engine=engine)
        vb = log_vnk(spec, n, k + 1, engine=engine)
        out[n] = math.exp(va.log - vb.log)
    return sorted(out.items())
