"""Log-domain scalars and small helpers.

All partition-distribution quantities handled by this package are
nonnegative, so a value is represented by the log of its magnitude with
``-inf`` standing for an exact zero.  This keeps quantities such as
EPPFs at n = 5000 (whose linear values underflow double precision by
thousands of orders of magnitude) representable and composable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["LogValue", "log_pochhammer", "logsumexp_pair", "log_convolve"]

NEG_INF = float("-inf")


@dataclass(frozen=True)
class LogValue:
    """A nonnegative real stored as ``log`` of its magnitude.

    ``log == -inf`` flags an exact zero.  ``log`` must never be NaN.
    """

    log: float

    @staticmethod
    def zero() -> "LogValue":
        return LogValue(NEG_INF)

    @staticmethod
    def from_value(x: float) -> "LogValue":
        if x < 0:
            raise ValueError(f"LogValue requires a nonnegative value, got {x}")
        return LogValue(math.log(x) if x > 0 else NEG_INF)

    @property
    def is_zero(self) -> bool:
        return self.log == NEG_INF

    def value(self) -> float:
        """Linear-scale value; underflows to 0.0 when log < ~-745."""
        return math.exp(self.log)

    def __mul__(self, other: "LogValue") -> "LogValue":
        return LogValue(self.log + other.log)

    def __truediv__(self, other: "LogValue") -> "LogValue":
        if other.is_zero:
            raise ZeroDivisionError("division by a zero LogValue")
        if self.is_zero:
            return LogValue.zero()
        return LogValue(self.log - other.log)

    def __float__(self) -> float:
        return self.log


def log_pochhammer(x: float, n: int) -> float:
    """log of the ascending factorial x(x+1)...(x+n-1), with (x)_0 = 1."""
    if x <= 0:
        raise ValueError(f"log_pochhammer requires x > 0, got x={x}")
    if n < 0:
        raise ValueError(f"log_pochhammer requires n >= 0, got n={n}")
    if n == 0:
        return 0.0
    return math.lgamma(x + n) - math.lgamma(x)


def logsumexp_pair(a: float, b: float) -> float:
    """log(e^a + e^b) for possibly -inf arguments."""
    if a == NEG_INF:
        return b
    if b == NEG_INF:
        return a
    m = a if a > b else b
    return m + math.log1p(math.exp(-abs(a - b)))


def log_convolve(log_a: np.ndarray, log_b: np.ndarray) -> np.ndarray:
    """Convolution of two nonnegative sequences given in log space.

    Entries may be -inf.  Output index m holds log sum_{i+j=m} a_i b_j.
    """
    la, lb = len(log_a), len(log_b)
    out = np.full(la + lb - 1, NEG_INF)
    for m in range(la + lb - 1):
        lo = max(0, m - lb + 1)
        hi = min(la - 1, m)
        terms = log_a[lo : hi + 1] + log_b[m - hi : m - lo + 1][::-1]
        finite = terms[np.isfinite(terms)]
        if finite.size:
            mx = finite.max()
            out[m] = mx + math.log(np.exp(finite - mx).sum())
    return out
