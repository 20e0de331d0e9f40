"""The extended-precision incomplete gamma kernel against mpmath."""

import math

import gmpy2
import mpmath
import pytest
from mpmath import mp

from bnpclust.hiprec import float_log2, precision, upper_gamma

BETA_LIKE = [0.3, 2.0, 48.4, 150.0]
SHAPES = [-20000.0, -1999.75, -513.0, -48.0, -7.5, -1.0, -0.25, 0.0, 0.25,
          1.0, 3.75, 20.0, 47.0, 60.0, 200.5]


def _ref(shape, x, dps):
    mp.dps = dps
    return mpmath.gammainc(mpmath.mpf(shape), mpmath.mpf(x), mp.inf)


@pytest.mark.parametrize("bits", [128, 512])
def test_matches_mpmath_across_shapes(bits):
    # accuracy target: 1e-(P/4) relative, P = mantissa bits
    tol = mpmath.mpf(10) ** (-(bits // 4))
    for x in BETA_LIKE:
        for s in SHAPES:
            if x == 0.3 and s < -3000:
                continue  # slow corner, covered at x=48.4
            got = upper_gamma(s, x, bits)
            ref = _ref(s, x, int(bits * 0.33) + 30)
            rel = abs((mpmath.mpf(got) - ref) / ref)
            assert rel < tol, f"shape={s} x={x}: rel={mpmath.nstr(rel, 3)}"


def test_series_and_cf_agree_at_switchover():
    # evaluate just above and below x = s+1 and compare to mpmath
    for s in (5.0, 20.0, 120.0):
        for x in (s + 0.9, s + 1.1):
            got = upper_gamma(s, x, 256)
            ref = _ref(s, x, 120)
            rel = abs((mpmath.mpf(got) - ref) / ref)
            assert rel < mpmath.mpf("1e-60")


def test_positive_shape_at_zero_is_complete_gamma():
    got = upper_gamma(4.0, 0.0, 128)
    assert got == pytest.approx(6.0)


def test_zero_limit_rejected_for_nonpositive_shape():
    with pytest.raises(ValueError):
        upper_gamma(-1.0, 0.0, 128)


def test_negative_x_rejected():
    with pytest.raises(ValueError):
        upper_gamma(1.0, -2.0, 128)


def test_float_log2():
    with precision(128):
        assert float_log2(gmpy2.mpfr(8)) == pytest.approx(3.0)
        assert float_log2(gmpy2.mpfr(0)) == -math.inf
        big = gmpy2.mpfr(2) ** 100000
        assert float_log2(big) == pytest.approx(100000.0)
