"""The singleton-split diagnostic c_n(k) and its large-n behaviour.

Boundedness of c_n(k) in n is the partition-side condition driving
posterior inconsistency of the number of clusters.  The exact search
over compositions is feasible for small n and validates the argmax
composition (n-k+1, 1, ..., 1), which then scales the curves to
n = 5000.  Note the NGG curve: it is bounded but keeps decaying like
n^(-sigma/(1+sigma)) instead of settling on a positive plateau.
"""

import time

from bnpclust import ProcessSpec
from bnpclust.diagnostics import cnk_curve, cnk_exact, cnk_fast, vnk_ratio_curve
from bnpclust.eppf import shared_engine

CAPTION = [
    ProcessSpec.dp(19.2),
    ProcessSpec.py(0.25, 12.2),
    ProcessSpec.ngg(0.25, 48.4),
    ProcessSpec.dmp(22.5, 200),
]

print("Brute force vs argmax composition (n = 20):")
for spec in CAPTION:
    engine = shared_engine(spec.sigma, spec.beta) if spec.family.value == "NGG" else None
    exact = cnk_exact(spec, 20, 3, engine=engine)
    fast = cnk_fast(spec, 20, 3, engine=engine)
    print(f"  {spec.label():30s} c_20(3): exact {exact:.6f}  argmax {fast:.6f}")

print("\nc_n(k) for k = 10 along n (the Figure-2-style curves):")
grid = [15, 50, 200, 1000, 2500, 5000]
for spec in CAPTION:
    t0 = time.time()
    engine = shared_engine(spec.sigma, spec.beta) if spec.family.value == "NGG" else None
    curve = cnk_curve(spec, 10, grid, engine=engine)
    vals = "  ".join(f"{v:8.4f}" for _, v in curve.points)
    print(f"  {spec.label():30s} {vals}   ({time.time() - t0:.1f}s)")
print("  n =                            " + "  ".join(f"{n:8d}" for n in grid))

print("\nThe weight ratio V_{n,k}/V_{n,k+1} behind the Gibbs-type curves (k = 10):")
for spec in CAPTION[:3]:
    engine = shared_engine(spec.sigma, spec.beta) if spec.family.value == "NGG" else None
    pts = vnk_ratio_curve(spec, 10, [50, 500, 5000], engine=engine)
    vals = ", ".join(f"n={n}: {v:.4f}" for n, v in pts)
    print(f"  {spec.label():30s} {vals}")
print("  (DP and PY are constant; the NGG ratio drifts to 0 on a slow power law,")
print("   which is why its c_n(k) has no positive-level plateau.)")
