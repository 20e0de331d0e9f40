"""Merge-truncate-merge post-processing of posterior mixing measures.

Stage 1 draws a weight-proportional priority order over the atoms and
absorbs each atom into its nearest already-kept neighbour whenever the
distance is within the rate omega_n.  Stage 2 removes every surviving
atom whose weight falls at or below c * omega_n^e (e defaults to
r/(r+1)) and hands its mass to the nearest survivor; when no atom
survives, the estimate is K-tilde = 0 and the output measure is empty.
A too-large c therefore truncates all clusters at once, which is the
expected behaviour at the top of a regularization path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from bnpclust.ot import AtomicMeasure

__all__ = [
    "MtmConfig",
    "MtmOutcome",
    "RegularizationPath",
    "rate_overfitted",
    "rate_py",
    "mtm_apply",
    "regularization_path",
]


def rate_overfitted(n: float) -> float:
    """Mixing-measure contraction rate (log n / n)^(1/4) for overfitted mixtures."""
    if n < 2:
        raise ValueError("rate is defined for n >= 2")
    return (math.log(n) / n) ** 0.25


def rate_py(n: float, eta: float, M: float = 1.0) -> float:
    """Pitman-Yor mixture rate M (log n)^(-1/eta), eta in (0, 2]."""
    if n < 2:
        raise ValueError("rate is defined for n >= 2")
    if not 0 < eta <= 2:
        raise ValueError("eta must lie in (0, 2]")
    if M <= 0:
        raise ValueError("M must be > 0")
    return M * math.log(n) ** (-1.0 / eta)


@dataclass(frozen=True)
class MtmConfig:
    c: float
    omega_n: float
    r: float = 2.0
    truncation_exponent: float | None = None
    seed: int = 0
    merge_locations: str = "keep"  # "keep" the priority atom or "average" by weight

    def __post_init__(self):
        if self.c <= 0:
            raise ValueError("c must be > 0")
        if self.omega_n <= 0:
            raise ValueError("omega_n must be > 0")
        if self.r < 1:
            raise ValueError("r must be >= 1")
        if self.merge_locations not in ("keep", "average"):
            raise ValueError("merge_locations must be 'keep' or 'average'")
        if self.truncation_exponent is None:
            object.__setattr__(self, "truncation_exponent", self.r / (self.r + 1.0))

    @property
    def threshold(self) -> float:
        return self.c * self.omega_n**self.truncation_exponent


@dataclass
class MtmOutcome:
    measure: AtomicMeasure | None
    k_tilde: int
    audit: list = field(default_factory=list)


def mtm_apply(G: AtomicMeasure, cfg: MtmConfig) -> MtmOutcome:
    """Run both stages on one mixing-measure sample; deterministic per seed."""
    if G is None or G.n_atoms == 0:
        raise ValueError("mtm_apply requires a nonempty measure")
    rng = np.random.default_rng(cfg.seed)
    audit: list = []

    # stage 1: probabilistic merge along a weight-proportional priority order
    order = rng.choice(G.n_atoms, size=G.n_atoms, replace=False, p=G.weights)
    kept_idx = [order[0]]
    kept_w = [float(G.weights[order[0]])]
    kept_x = [G.locations[order[0]].copy()]
    for idx in order[1:]:
        x = G.locations[idx]
        d = np.linalg.norm(np.asarray(kept_x) - x, axis=1)
        j = int(np.argmin(d))
        if d[j] <= cfg.omega_n:
            w = float(G.weights[idx])
            if cfg.merge_locations == "average":
                kept_x[j] = (kept_w[j] * kept_x[j] + w * x) / (kept_w[j] + w)
            kept_w[j] += w
            audit.append(("merge", int(idx), int(kept_idx[j]), float(d[j])))
        else:
            kept_idx.append(int(idx))
            kept_w.append(float(G.weights[idx]))
            kept_x.append(x.copy())

    # stage 2: truncate small weights, re-merge their mass into survivors
    w = np.array(kept_w)
    x = np.array(kept_x)
    desc = np.argsort(-w, kind="stable")
    w, x = w[desc], x[desc]
    ids = [kept_idx[i] for i in desc]
    alive = w > cfg.threshold
    if not alive.any():
        audit.append(("truncate_all", float(cfg.threshold)))
        return MtmOutcome(measure=None, k_tilde=0, audit=audit)
    surv_x = x[alive]
    surv_w = w[alive].copy()
    for i in np.nonzero(~alive)[0]:
        d = np.linalg.norm(surv_x - x[i], axis=1)
        j = int(np.argmin(d))
        surv_w[j] += w[i]
        audit.append(("truncate", int(ids[i]), float(w[i]), int(j)))
    measure = AtomicMeasure(surv_w, surv_x, normalize=True)
    return MtmOutcome(measure=measure, k_tilde=measure.n_atoms, audit=audit)


@dataclass
class RegularizationPath:
    c_grid: list[float]
    pmfs: list[dict[int, float]]
    means: list[float]
    maps: list[int]
    plateau: tuple[float, float, int] | None  # (c_lo, c_hi, MAP value)

    def runs(self) -> list[tuple[float, float, int]]:
        """Maximal constant-MAP stretches as (c_lo, c_hi, value)."""
        out = []
        start = 0
        for i in range(1, len(self.maps) + 1):
            if i == len(self.maps) or self.maps[i] != self.maps[start]:
                out.append((self.c_grid[start], self.c_grid[i - 1], self.maps[start]))
                start = i
        return out

    def to_records(self) -> list[dict]:
        return [
            {"c": c, "mean": m, "map": mp}
            for c, m, mp in zip(self.c_grid, self.means, self.maps)
        ]


def regularization_path(samples: list[AtomicMeasure], c_grid, base: MtmConfig) -> RegularizationPath:
    """Posterior of K-tilde per c over a sweep, plus the longest MAP plateau.

    Seeds are derived per (sample, c) pair from the base seed, so the
    sweep is reproducible and embarrassingly parallel.
    """
    c_grid = [float(c) for c in c_grid]
    if not samples or not c_grid:
        raise ValueError("need at least one sample and one c value")
    pmfs, means, maps = [], [], []
    for ci, c in enumerate(c_grid):
        ks = np.empty(len(samples), dtype=np.int64)
        for si, G in enumerate(samples):
            seed = np.random.SeedSequence((base.seed, si, ci)).generate_state(1)[0]
            cfg = MtmConfig(c=c, omega_n=base.omega_n, r=base.r,
                            truncation_exponent=base.truncation_exponent,
                            seed=int(seed), merge_locations=base.merge_locations)
            ks[si] = mtm_apply(G, cfg).k_tilde
        counts = np.bincount(ks)
        pmf = {int(k): float(counts[k] / len(samples)) for k in np.nonzero(counts)[0]}
        pmfs.append(pmf)
        means.append(float(ks.mean()))
        maps.append(int(np.argmax(counts)))
    plateau = _longest_plateau(c_grid, maps)
    return RegularizationPath(c_grid, pmfs, means, maps, plateau)


def _longest_plateau(c_grid: list[float], maps: list[int]):
    # length measured on the log-c scale: c is a multiplicative
    # regularization constant, and the terminal single-cluster descent
    # would otherwise dominate any additive-length comparison
    best = None
    best_len = -1.0
    start = 0
    for i in range(1, len(maps) + 1):
        if i == len(maps) or maps[i] != maps[start]:
            lo, hi = c_grid[start], c_grid[i - 1]
            if maps[start] > 0 and hi > lo:
                length = math.log(hi / lo)
                if length > best_len:
                    best, best_len = (lo, hi, maps[start]), length
            start = i
    return best
