"""Prior-family identifiers and partition compositions.

A :class:`ProcessSpec` names one of six partition-distribution families
together with its parameters:

* ``DP``    Dirichlet process (alpha > 0)
* ``PY``    Pitman-Yor process (sigma in [0,1), alpha > -sigma)
* ``NGG``   normalized generalized gamma process (sigma in (0,1), beta >= 0)
* ``DMP``   Dirichlet multinomial process (alpha > 0, K components)
* ``PYM``   Pitman-Yor multinomial process (sigma in (0,1), K components)
* ``NGGM``  NGG multinomial process (sigma in (0,1), beta >= 0, K components)

``sigma = 0`` inside PYM/NGGM is rejected: the finite-family weights
divide by sigma, and the sigma -> 0 family is exactly DMP, which callers
must request explicitly.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

__all__ = ["Family", "ProcessSpec", "Composition"]


class Family(str, enum.Enum):
    DP = "DP"
    PY = "PY"
    NGG = "NGG"
    DMP = "DMP"
    PYM = "PYM"
    NGGM = "NGGM"


#: families whose EPPF is the Gibbs product form V_{n,k} * prod (1-sigma)_{n_j-1}
GIBBS_FAMILIES = (Family.DP, Family.PY, Family.NGG)
#: finite multinomial families with a component bound K
FINITE_FAMILIES = (Family.DMP, Family.PYM, Family.NGGM)


@dataclass(frozen=True)
class ProcessSpec:
    """A prior family plus its parameters; validated on construction."""

    family: Family
    alpha: Optional[float] = None
    sigma: Optional[float] = None
    beta: Optional[float] = None
    K: Optional[int] = None

    def __post_init__(self):
        f = self.family
        if f == Family.DP:
            self._require(self.alpha is not None and self.alpha > 0, "DP requires alpha > 0")
            self._forbid(self.K, "K")
        elif f == Family.PY:
            self._require(self.sigma is not None and 0 <= self.sigma < 1,
                          "PY requires sigma in [0,1)")
            self._require(self.alpha is not None and self.alpha > -self.sigma,
                          "PY requires alpha > -sigma")
            self._forbid(self.K, "K")
        elif f == Family.NGG:
            self._require(self.sigma is not None and 0 < self.sigma < 1,
                          "NGG requires sigma in (0,1)")
            self._require(self.beta is not None and self.beta >= 0, "NGG requires beta >= 0")
            self._forbid(self.K, "K")
        elif f == Family.DMP:
            self._require(self.alpha is not None and self.alpha > 0, "DMP requires alpha > 0")
            self._require(self.K is not None and self.K >= 1, "DMP requires K >= 1")
        elif f == Family.PYM:
            self._require(self.sigma is not None and 0 < self.sigma < 1,
                          "PYM requires sigma in (0,1); request DMP explicitly for sigma = 0")
            self._require(self.alpha is not None and self.alpha > -self.sigma,
                          "PYM requires alpha > -sigma")
            self._require(self.K is not None and self.K >= 1, "PYM requires K >= 1")
        elif f == Family.NGGM:
            self._require(self.sigma is not None and 0 < self.sigma < 1,
                          "NGGM requires sigma in (0,1); request DMP explicitly for sigma = 0")
            self._require(self.beta is not None and self.beta >= 0, "NGGM requires beta >= 0")
            self._require(self.K is not None and self.K >= 1, "NGGM requires K >= 1")
        else:  # pragma: no cover
            raise ValueError(f"unknown family {f}")

    @staticmethod
    def _require(cond, msg):
        if not cond:
            raise ValueError(msg)

    def _forbid(self, value, name):
        if value is not None:
            raise ValueError(f"{self.family.value} does not take parameter {name}")

    # -- convenience constructors -------------------------------------------------

    @staticmethod
    def dp(alpha: float) -> "ProcessSpec":
        return ProcessSpec(Family.DP, alpha=alpha)

    @staticmethod
    def py(sigma: float, alpha: float) -> "ProcessSpec":
        return ProcessSpec(Family.PY, alpha=alpha, sigma=sigma)

    @staticmethod
    def ngg(sigma: float, beta: float) -> "ProcessSpec":
        return ProcessSpec(Family.NGG, sigma=sigma, beta=beta)

    @staticmethod
    def dmp(alpha: float, K: int) -> "ProcessSpec":
        return ProcessSpec(Family.DMP, alpha=alpha, K=K)

    @staticmethod
    def pym(sigma: float, alpha: float, K: int) -> "ProcessSpec":
        return ProcessSpec(Family.PYM, alpha=alpha, sigma=sigma, K=K)

    @staticmethod
    def nggm(sigma: float, beta: float, K: int) -> "ProcessSpec":
        return ProcessSpec(Family.NGGM, sigma=sigma, beta=beta, K=K)

    @property
    def is_gibbs(self) -> bool:
        return self.family in GIBBS_FAMILIES

    @property
    def is_finite(self) -> bool:
        return self.family in FINITE_FAMILIES

    def effective_sigma(self) -> float:
        """sigma entering the Gibbs product (1-sigma)_{n_j-1}; 0 for DP/DMP."""
        if self.family in (Family.DP, Family.DMP):
            return 0.0
        return float(self.sigma)

    def label(self) -> str:
        parts = []
        if self.alpha is not None:
            parts.append(f"alpha={self.alpha:g}")
        if self.sigma is not None:
            parts.append(f"sigma={self.sigma:g}")
        if self.beta is not None:
            parts.append(f"beta={self.beta:g}")
        if self.K is not None:
            parts.append(f"K={self.K}")
        return f"{self.family.value}({', '.join(parts)})"

    def key(self) -> tuple:
        """Hashable identity used for cache files."""
        return (self.family.value, self.alpha, self.sigma, self.beta, self.K)


class Composition:
    """Ordered block sizes (n_1, ..., n_k) of a partition of n."""

    __slots__ = ("blocks", "n", "k")

    def __init__(self, blocks):
        blocks = tuple(int(b) for b in blocks)
        if len(blocks) == 0:
            raise ValueError("a composition needs at least one block")
        if any(b < 1 for b in blocks):
            raise ValueError(f"all blocks must be >= 1, got {blocks}")
        self.blocks = blocks
        self.n = sum(blocks)
        self.k = len(blocks)

    def split_singleton(self, block: int) -> "Composition":
        """Remove one element from ``block`` and append it as a new singleton."""
        if self.blocks[block] < 2:
            raise ValueError(f"block {block} has size {self.blocks[block]}; cannot split a singleton")
        new = list(self.blocks)
        new[block] -= 1
        new.append(1)
        return Composition(new)

    def __repr__(self):
        return f"Composition{self.blocks}"

    def __eq__(self, other):
        return isinstance(other, Composition) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)
