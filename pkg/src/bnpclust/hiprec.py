"""Extended-precision special functions on top of gmpy2.

The normalized-generalized-gamma partition weights are alternating
binomial sums whose terms overshoot the result by roughly 1.2 bits per
summand, so double precision is useless beyond n of a few dozen.  All
high-precision arithmetic in the package flows through the helpers
here; mpmath serves as the independent cross-check in the test suite,
never as the production path.
"""

from __future__ import annotations

import contextlib
import math

import gmpy2
from gmpy2 import mpfr

__all__ = ["precision", "upper_gamma", "log_upper_gamma_float"]

_MAX_CF_ITER = 1_000_000


@contextlib.contextmanager
def precision(bits: int):
    """Temporarily set the gmpy2 working precision."""
    ctx = gmpy2.get_context()
    old = ctx.precision
    ctx.precision = int(bits)
    try:
        yield ctx
    finally:
        ctx.precision = old


def upper_gamma(s, x, bits: int) -> mpfr:
    """Upper incomplete gamma integral_x^inf t^(s-1) e^(-t) dt at ``bits`` precision.

    Defined for x > 0 and any real s (including s <= 0, where the
    complete gamma function would be singular or the integral from 0
    divergent).  Uses the Legendre continued fraction when x >= s + 1
    and the lower-incomplete power series otherwise; the switchover is
    the classical one balancing the two convergence regions.
    """
    with precision(bits + 48):
        s = mpfr(s)
        x = mpfr(x)
        if x < 0:
            raise ValueError("upper_gamma requires x >= 0")
        if x == 0:
            if s <= 0:
                raise ValueError("upper_gamma(s, 0) diverges for s <= 0")
            return +gmpy2.gamma(s)
        if x >= s + 1 or s <= 0:
            # the continued fraction converges for every x > 0; for s <= 0
            # the series route is unavailable (complete gamma pole), but
            # x < s + 1 can then only happen for x < 1 where the CF is fine
            return +_upper_gamma_cf(s, x, bits)
        return +_upper_gamma_series(s, x, bits)


def _upper_gamma_cf(s: mpfr, x: mpfr, bits: int) -> mpfr:
    # Gamma(s,x) = e^{-x} x^s / (x+1-s - 1(1-s)/(x+3-s - 2(2-s)/(...)))
    # evaluated by the modified Lentz algorithm.
    tiny = mpfr(2) ** (-(bits + 4096))
    eps = mpfr(2) ** (-(bits + 16))
    f = x + 1 - s
    if f == 0:
        f = tiny
    c, d = f, mpfr(0)
    for i in range(1, _MAX_CF_ITER):
        an = i * (s - i)
        bn = x + 2 * i + 1 - s
        d = bn + an * d
        if d == 0:
            d = tiny
        c = bn + an / c
        if c == 0:
            c = tiny
        d = 1 / d
        delta = c * d
        f *= delta
        if abs(delta - 1) < eps:
            break
    else:  # pragma: no cover - x>0 always converges in practice
        raise ArithmeticError(f"continued fraction for Gamma({s},{x}) did not converge")
    return gmpy2.exp(-x + s * gmpy2.log(x)) / f


def _upper_gamma_series(s: mpfr, x: mpfr, bits: int) -> mpfr:
    # gamma(s,x) = x^s e^{-x} sum_{m>=0} x^m / (s (s+1) ... (s+m));
    # only entered when x < s + 1, which our callers hit with s > 0.
    if s <= 0:
        raise ValueError("series branch requires s > 0")
    eps = mpfr(2) ** (-(bits + 16))
    term = 1 / s
    total = term
    m = 0
    while True:
        m += 1
        term *= x / (s + m)
        total += term
        if abs(term) < abs(total) * eps:
            break
        if m > _MAX_CF_ITER:  # pragma: no cover
            raise ArithmeticError("power series for lower incomplete gamma stalled")
    lower = gmpy2.exp(s * gmpy2.log(x) - x) * total
    return gmpy2.gamma(s) - lower


def log_upper_gamma_float(s: float, x: float, bits: int = 128) -> float:
    """Double-precision log of upper_gamma, for callers outside hot loops."""
    v = upper_gamma(s, x, bits)
    if v <= 0:
        raise ArithmeticError(f"upper_gamma({s}, {x}) evaluated nonpositive")
    with precision(96):
        return float(gmpy2.log(v))


def float_log2(v: mpfr) -> float:
    """log2 of |v| as a double, -inf for zero; robust to huge exponents."""
    if v == 0:
        return -math.inf
    e, m = gmpy2.frexp(abs(v))
    return e + math.log2(float(m))
