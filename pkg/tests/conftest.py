import itertools
import math

import numpy as np
import pytest

from bnpclust.processes import Composition, ProcessSpec

# one spec per family with smallish parameters, for shared sweeps
FAMILY_SPECS = [
    ProcessSpec.dp(1.7),
    ProcessSpec.py(0.3, 2.1),
    ProcessSpec.ngg(0.25, 2.0),
    ProcessSpec.dmp(3.0, 5),
    ProcessSpec.pym(0.5, 1.2, 4),
    ProcessSpec.nggm(0.25, 1.5, 4),
]


def set_partitions(n):
    """All set partitions of {1..n} as lists of blocks."""
    if n == 0:
        yield []
        return
    for part in set_partitions(n - 1):
        for i in range(len(part)):
            yield part[:i] + [part[i] + [n]] + part[i + 1 :]
        yield part + [[n]]


def partition_compositions(n):
    """Block-size tuples of every set partition of {1..n} (with repeats)."""
    for part in set_partitions(n):
        yield Composition([len(b) for b in part])


def enumerate_l_vectors(blocks):
    """All (l_1..l_k) with 1 <= l_i <= n_i, for the finite-family sums."""
    return itertools.product(*[range(1, b + 1) for b in blocks])


def total_partition_probability(spec, n, log_eppf_unordered):
    tot = 0.0
    for comp in partition_compositions(n):
        lv = log_eppf_unordered(spec, comp)
        if not lv.is_zero:
            tot += math.exp(lv.log)
    return tot


def mc_tolerance(p: np.ndarray, draws: int, z: float = 3.0) -> np.ndarray:
    """z Monte-Carlo standard errors for a pmf estimated from `draws`."""
    return z * np.sqrt(p * (1.0 - p) / draws)


# ---------------------------------------------------------------------------
# acceptance reporting: collect one line per criterion, print at the end
# ---------------------------------------------------------------------------

ACCEPTANCE_RESULTS: list[tuple[str, str, str]] = []


def record_acceptance(criterion: str, ok: bool, detail: str = ""):
    ACCEPTANCE_RESULTS.append((criterion, "PASS" if ok else "FAIL", detail))
    assert ok, f"acceptance criterion {criterion}: {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for criterion, status, detail in ACCEPTANCE_RESULTS:
        line = f"[{status}] criterion {criterion}"
        if detail:
            line += f" - {detail}"
        terminalreporter.write_line(line)
