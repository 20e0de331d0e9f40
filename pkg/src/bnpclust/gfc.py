"""Generalized factorial coefficients and unsigned Stirling numbers.

C(n,k;sigma) is built by the triangular recurrence

    C(n+1,k) = (n - k*sigma) C(n,k) + sigma C(n,k-1),   C(1,1) = sigma,

kept in log space (every entry is positive for sigma in (0,1)).  The
alternating explicit sum is implemented separately at extended
precision as the independent cross-check.  The sigma -> 0 limit
C(n,k;sigma)/sigma^k is the unsigned Stirling number of the first kind,
tabulated by its own recurrence for the Dirichlet-process branch.
"""

from __future__ import annotations

import json
import math

import numpy as np
import gmpy2
from gmpy2 import mpfr

from bnpclust.hiprec import precision

__all__ = ["GfcTable", "StirlingTable", "gfc_explicit_sum"]

_CACHE_FORMAT_VERSION = 1


class GfcTable:
    """Triangular table of log C(n,k;sigma), 1 <= k <= n <= n_max."""

    def __init__(self, sigma: float, n_max: int, _table: np.ndarray | None = None):
        if not 0 < sigma < 1:
            raise ValueError(f"GfcTable requires sigma in (0,1), got {sigma}")
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        self.sigma = float(sigma)
        self.n_max = int(n_max)
        self._log = _table if _table is not None else self._build()

    def _build(self) -> np.ndarray:
        s = self.sigma
        log_s = math.log(s)
        t = np.full((self.n_max + 1, self.n_max + 2), -np.inf)
        t[1, 1] = log_s
        for n in range(1, self.n_max):
            k = np.arange(1, n + 1)
            # n - k*sigma > 0 on k <= n; the k = n+1 corner is pure birth
            grow = np.log(n - k * s) + t[n, 1 : n + 1]
            add = log_s + t[n, 0:n]
            t[n + 1, 1 : n + 1] = np.logaddexp(grow, add)
            t[n + 1, n + 1] = log_s + t[n, n]
        return t

    def log(self, n: int, k: int) -> float:
        """log C(n,k;sigma); -inf outside the 1 <= k <= n triangle."""
        if not 1 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range 1..{self.n_max}")
        if k < 1 or k > n:
            return -np.inf
        return float(self._log[n, k])

    def log_row(self, n: int) -> np.ndarray:
        """Array of log C(n,k;sigma) for k = 1..n."""
        if not 1 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range 1..{self.n_max}")
        return self._log[n, 1 : n + 1].copy()

    def save(self, path) -> None:
        header = {
            "format_version": _CACHE_FORMAT_VERSION,
            "kind": "gfc",
            "sigma": self.sigma,
            "n_max": self.n_max,
        }
        np.savez_compressed(path, header=json.dumps(header), table=self._log)

    @staticmethod
    def load(path, sigma: float, n_max: int) -> "GfcTable":
        with np.load(path, allow_pickle=False) as f:
            header = json.loads(str(f["header"]))
            if header.get("format_version") != _CACHE_FORMAT_VERSION or header.get("kind") != "gfc":
                raise ValueError(f"unrecognized GFC cache file {path}")
            if header["sigma"] != sigma or header["n_max"] < n_max:
                raise ValueError(
                    f"cache {path} keyed by sigma={header['sigma']}, n_max={header['n_max']}; "
                    f"requested sigma={sigma}, n_max={n_max}"
                )
            return GfcTable(sigma, header["n_max"], _table=f["table"])


class StirlingTable:
    """log |s(n,k)|, unsigned Stirling numbers of the first kind."""

    def __init__(self, n_max: int):
        if n_max < 1:
            raise ValueError("n_max must be >= 1")
        self.n_max = int(n_max)
        t = np.full((n_max + 1, n_max + 2), -np.inf)
        t[1, 1] = 0.0
        for n in range(1, n_max):
            k = np.arange(1, n + 2)
            grow = math.log(n) + t[n, 1 : n + 2]
            add = t[n, 0 : n + 1]
            t[n + 1, 1 : n + 2] = np.logaddexp(grow, add)
        self._log = t

    def log(self, n: int, k: int) -> float:
        if not 1 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range 1..{self.n_max}")
        if k < 1 or k > n:
            return -np.inf
        return float(self._log[n, k])

    def log_row(self, n: int) -> np.ndarray:
        if not 1 <= n <= self.n_max:
            raise ValueError(f"n={n} outside table range 1..{self.n_max}")
        return self._log[n, 1 : n + 1].copy()


def gfc_explicit_sum(sigma: float, n: int, k: int, bits: int = 256) -> mpfr:
    """C(n,k;sigma) by the alternating explicit sum, at ``bits`` precision.

    (1/k!) sum_{j=0}^k (-1)^j binom(k,j) (-j sigma)_n, the independent
    oracle for the recurrence table.
    """
    if not 1 <= k <= n:
        raise ValueError("need 1 <= k <= n")
    with precision(bits):
        s = mpfr(sigma)
        total = mpfr(0)
        binom = mpfr(1)  # binom(k, j)
        for j in range(0, k + 1):
            if j > 0:
                binom = binom * (k - j + 1) / j
            poch = mpfr(1)  # (-j sigma)_n
            base = -j * s
            for i in range(n):
                poch *= base + i
            term = binom * poch
            total += -term if j % 2 else term
        return +(total / gmpy2.factorial(k))
