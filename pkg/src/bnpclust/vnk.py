"""Partition-distribution weights V_{n,k} for DP, PY and NGG priors.

DP and PY have closed forms handled in double-precision log space.  The
NGG weights are alternating binomial sums over incomplete gamma values;
the summands exceed the result by roughly 1.2 bits per data point, so
:class:`NggVnkEngine` evaluates them with gmpy2 at an adaptively chosen
working precision and verifies, per evaluation, that enough headroom
survived the cancellation.
"""

from __future__ import annotations

import json
import math

import numpy as np
import gmpy2
from gmpy2 import mpfr

from bnpclust.hiprec import precision, upper_gamma, float_log2
from bnpclust.logspace import LogValue, log_pochhammer
from bnpclust.processes import Family, ProcessSpec

__all__ = ["PrecisionError", "log_vnk", "NggVnkEngine"]

_CACHE_FORMAT_VERSION = 1


class PrecisionError(ArithmeticError):
    """An extended-precision evaluation could not be certified accurate."""


def log_vnk(spec: ProcessSpec, n: int, k: int, engine: "NggVnkEngine | None" = None) -> LogValue:
    """log V_{n,k} for a DP/PY/NGG spec, 1 <= k <= n.

    NGG evaluation goes through ``engine`` when given (recommended: the
    engine caches incomplete-gamma values across calls) or a throwaway
    engine otherwise.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
    f = spec.family
    if f == Family.DP:
        return LogValue(k * math.log(spec.alpha) - log_pochhammer(spec.alpha, n))
    if f == Family.PY:
        if spec.sigma == 0:
            return LogValue(k * math.log(spec.alpha) - log_pochhammer(spec.alpha, n))
        a, s = spec.alpha, spec.sigma
        num = sum(math.log(a + i * s) for i in range(1, k))
        return LogValue(num - log_pochhammer(a + 1, n - 1))
    if f == Family.NGG:
        if engine is None:
            engine = NggVnkEngine(spec.sigma, spec.beta)
        elif (engine.sigma, engine.beta) != (spec.sigma, spec.beta):
            raise ValueError("engine parameters do not match the spec")
        return LogValue(engine.log_vnk(n, k))
    raise ValueError(f"V_{{n,k}} is defined for Gibbs-type families, not {f.value}")


class NggVnkEngine:
    """Evaluates NGG V_{n,k} = e^b s^(k-1)/Gamma(n) * alternating sum.

    ``precision_bits`` is the floor of the working precision; the
    engine raises it automatically when the measured cancellation of an
    evaluation leaves fewer than ``min_headroom_bits`` trustworthy bits,
    and raises :class:`PrecisionError` only if refinement keeps failing.
    """

    _MAX_REFINE = 6

    def __init__(self, sigma: float, beta: float, precision_bits: int = 512,
                 min_headroom_bits: int = 128):
        if not 0 < sigma < 1:
            raise ValueError("NGG requires sigma in (0,1)")
        if beta < 0:
            raise ValueError("NGG requires beta >= 0")
        self.sigma = float(sigma)
        self.beta = float(beta)
        self.precision_bits = int(precision_bits)
        self.min_headroom_bits = int(min_headroom_bits)
        # shapes k - i/sigma live on an integer grid when 1/sigma is integral
        inv = 1.0 / self.sigma
        self._integer_grid = inv == round(inv)
        self._inv_sigma = round(inv) if self._integer_grid else inv
        # fractional grids: shape key -> (bits, value); a value computed at
        # high precision serves every request at or below that precision
        self._gamma_cache: dict = {}
        # integer grids: one contiguous table Gamma(s, beta) for lo <= s <= hi,
        # filled by stable recurrences from exact anchors (see _int_gamma_table)
        self._int_table: dict | None = None
        self._v_cache: dict[tuple[int, int], mpfr] = {}
        self._v_log: dict[tuple[int, int], float] = {}

    # -- public API ---------------------------------------------------------------

    def log_vnk(self, n: int, k: int) -> float:
        key = (n, k)
        if key not in self._v_log:
            v = self.vnk_mpf(n, k)
            with precision(96):
                self._v_log[key] = float(gmpy2.log(v))
        return self._v_log[key]

    def vnk_mpf(self, n: int, k: int) -> mpfr:
        """V_{n,k} as an mpfr certified to ~min_headroom_bits of accuracy."""
        if not 1 <= k <= n:
            raise ValueError(f"need 1 <= k <= n, got n={n}, k={k}")
        key = (n, k)
        if key not in self._v_cache:
            self._v_cache[key] = self._evaluate(n, k)
        return self._v_cache[key]

    def row_log(self, n: int) -> np.ndarray:
        """Array of log V_{n,k} for k = 1..n (shared-term evaluation)."""
        vals = self._evaluate_row(n)
        out = np.empty(n)
        with precision(96):
            for k in range(1, n + 1):
                self._v_cache[(n, k)] = vals[k - 1]
                lg = float(gmpy2.log(vals[k - 1]))
                self._v_log[(n, k)] = lg
                out[k - 1] = lg
        return out

    def save_cache(self, path) -> None:
        """Persist the float log table computed so far, keyed by parameters."""
        header = {
            "format_version": _CACHE_FORMAT_VERSION,
            "kind": "ngg_vnk",
            "sigma": self.sigma,
            "beta": self.beta,
            "precision_bits": self.precision_bits,
        }
        items = sorted(self._v_log.items())
        nk = np.array([key for key, _ in items], dtype=np.int64).reshape(-1, 2)
        logs = np.array([v for _, v in items])
        np.savez_compressed(path, header=json.dumps(header), nk=nk, logs=logs)

    def load_cache(self, path) -> int:
        """Load a previously saved log table; returns the number of entries."""
        with np.load(path, allow_pickle=False) as f:
            header = json.loads(str(f["header"]))
            if header.get("format_version") != _CACHE_FORMAT_VERSION or header.get("kind") != "ngg_vnk":
                raise ValueError(f"unrecognized V_nk cache file {path}")
            if (header["sigma"], header["beta"]) != (self.sigma, self.beta) or \
                    header["precision_bits"] != self.precision_bits:
                raise ValueError(f"cache {path} keyed by different parameters")
            nk, logs = f["nk"], f["logs"]
        for (n, k), lg in zip(nk, logs):
            self._v_log[(int(n), int(k))] = float(lg)
        return len(logs)

    # -- internals ----------------------------------------------------------------

    def _shape_key(self, k: int, i: int):
        if self._integer_grid:
            return k - i * self._inv_sigma
        return (k, i)

    def _gamma(self, k: int, i: int, bits: int) -> mpfr:
        key = self._shape_key(k, i)
        hit = self._gamma_cache.get(key)
        if hit is not None and hit[0] >= bits:
            return hit[1]
        with precision(bits + 32):
            shape = mpfr(k) - mpfr(i) / mpfr(self.sigma)
        g = upper_gamma(shape, self.beta, bits)
        self._gamma_cache[key] = (bits, g)
        return g

    def _gamma_block(self, k: int, n: int, bits: int) -> list:
        """Gamma(k - i/sigma, beta) for i = 0..n-1 at >= ``bits`` accuracy."""
        if self._integer_grid:
            table = self._int_gamma_table(k, k - (n - 1) * self._inv_sigma, bits)
            lo, vals = table["lo"], table["vals"]
            return [vals[k - i * self._inv_sigma - lo] for i in range(n)]
        return [self._gamma(k, i, bits) for i in range(n)]

    def _int_gamma_table(self, hi: int, lo: int, bits: int) -> dict:
        """Integer-shape table of Gamma(s, beta), lo <= s <= hi.

        Positive shapes follow the stable upward recurrence
        Gamma(s+1) = s Gamma(s) + x^s e^{-x} from the exact
        Gamma(1,x) = e^{-x}; shape 0 is one continued-fraction call; the
        negative tail runs Gamma(s-1) = (Gamma(s) - x^{s-1} e^{-x})/(s-1)
        downward, which sheds roughly log2(1 + x/|s|) bits per step.
        The accumulated loss is covered by guard bits and the deepest
        entry is verified against an independent continued-fraction
        evaluation, escalating the guard if the check fails.
        """
        t = self._int_table
        if t is not None and t["bits"] >= bits and t["lo"] <= lo and t["hi"] >= hi:
            return t
        if t is not None:
            lo = min(lo, t["lo"])
            hi = max(hi, t["hi"])
            bits = max(bits, t["bits"])
        x = self.beta
        guard = int(1.4427 * x * (math.log(abs(lo) + 2) + 1)) + 256
        for _ in range(self._MAX_REFINE):
            work = bits + guard
            with precision(work):
                xm = mpfr(x)
                emx = gmpy2.exp(-xm)
                vals = [mpfr(0)] * (hi - lo + 1)
                # positive shapes, upward from Gamma(1,x) = e^{-x}
                g = emx
                power = emx  # x^s e^{-x} at the current s
                if hi >= 1:
                    if 1 - lo >= 0:
                        vals[1 - lo] = g
                    for s in range(1, hi):
                        power *= xm
                        g = s * g + power
                        if s + 1 - lo >= 0:
                            vals[s + 1 - lo] = g
                if lo <= 0:
                    g0 = upper_gamma(mpfr(0), xm, work)
                    vals[0 - lo] = g0
                    # negative tail, downward
                    g = g0
                    power = emx / xm  # x^{s-1} e^{-x} at the current s
                    for s in range(0, lo, -1):
                        g = (g - power) / (s - 1)
                        power /= xm
                        vals[s - 1 - lo] = g
                    ref = upper_gamma(mpfr(lo), xm, bits + 64)
                    err = abs(g - ref) / ref
                    if err > mpfr(2) ** (-(bits + 16)):
                        guard = guard * 2 + 128
                        continue
            self._int_table = {"bits": bits, "lo": lo, "hi": hi, "vals": vals}
            return self._int_table
        raise PrecisionError("integer-shape gamma table failed its tail cross-check")

    def _working_bits(self, n: int) -> int:
        # empirical cancellation ~1.2 bits per summand; generous slack on
        # top, rounded to coarse steps so nearby n share cached gammas
        raw = max(self.precision_bits, int(1.25 * n) + self.min_headroom_bits + 96)
        return ((raw + 511) // 512) * 512

    def _evaluate(self, n: int, k: int) -> mpfr:
        if self.beta == 0.0:
            # only the i = 0 term survives: V = sigma^(k-1) Gamma(k) / Gamma(n)
            with precision(max(self.precision_bits, 128)):
                s = mpfr(self.sigma)
                return +(s ** (k - 1) * gmpy2.factorial(k - 1) / gmpy2.factorial(n - 1))
        bits = self._working_bits(n)
        for _ in range(self._MAX_REFINE):
            val, ok, needed = self._try_sum(n, [k], bits)
            if ok:
                return val[0]
            bits = needed
        raise PrecisionError(
            f"NGG V_({n},{k}) not certified positive at {bits} bits; raise working precision"
        )

    def _evaluate_row(self, n: int) -> list:
        if self.beta == 0.0:
            with precision(max(self.precision_bits, 128)):
                s = mpfr(self.sigma)
                gn = gmpy2.factorial(n - 1)
                return [+(s ** (k - 1) * gmpy2.factorial(k - 1) / gn) for k in range(1, n + 1)]
        bits = self._working_bits(n)
        for _ in range(self._MAX_REFINE):
            vals, ok, needed = self._try_sum(n, range(1, n + 1), bits)
            if ok:
                return vals
            bits = needed
        raise PrecisionError(f"NGG row n={n} not certified positive at {bits} bits")

    def _try_sum(self, n: int, ks, bits: int):
        """Alternating sums for the requested k's at one working precision.

        Returns (values, certified, suggested_bits).  Certification
        requires every sum to be strictly positive with at least
        ``min_headroom_bits`` below the largest summand magnitude.
        """
        ks = list(ks)
        with precision(bits):
            beta = mpfr(self.beta)
            sigma = mpfr(self.sigma)
            # A_i = binom(n-1, i) * beta^(i/sigma), accumulated incrementally
            beta_step = gmpy2.exp(gmpy2.log(beta) / sigma)
            prefactor = gmpy2.exp(beta) / gmpy2.factorial(n - 1)
            a = [mpfr(1)] * n
            acc = mpfr(1)
            for i in range(1, n):
                acc = acc * (n - i) / i * beta_step
                a[i] = acc
            out = []
            worst_deficit = 0
            for k in ks:
                gam = self._gamma_block(k, n, bits)
                total = mpfr(0)
                max_mag = mpfr(0)
                for i in range(n):
                    term = a[i] * gam[i]
                    t = abs(term)
                    if t > max_mag:
                        max_mag = t
                    total = total - term if i & 1 else total + term
                if total <= 0:
                    worst_deficit = max(worst_deficit, bits)
                    out.append(None)
                    continue
                lost = float_log2(max_mag) - float_log2(total)
                headroom = bits - lost
                if headroom < self.min_headroom_bits:
                    worst_deficit = max(worst_deficit, int(self.min_headroom_bits - headroom) + 64)
                    out.append(None)
                    continue
                out.append(+(prefactor * sigma ** (k - 1) * total))
        if worst_deficit:
            return out, False, bits + worst_deficit
        return out, True, bits
