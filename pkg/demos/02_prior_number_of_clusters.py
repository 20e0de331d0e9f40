"""Prior distribution of the number of clusters K_n.

Reproduces the calibration behind the diagnostic figures: each family's
free parameter is solved so that E[K_50] = 25, and the resulting prior
pmfs are tabulated for growing n.  The Dirichlet multinomial prior is
also evaluated on the simulation-study grid, matching the prior column
of the summary table.
"""

import numpy as np

from bnpclust import ProcessSpec
from bnpclust.priors import (
    expected_kn,
    prior_kn_dmp,
    prior_kn_gibbs,
    prior_kn_mc,
    solve_param_for_ekn,
)
from bnpclust.processes import Family

print("Solving each family's free parameter for E[K_50] = 25:")
a_dp = solve_param_for_ekn(Family.DP, "alpha", 50, 25.0, (1.0, 100.0))
a_py = solve_param_for_ekn(Family.PY, "alpha", 50, 25.0, (0.1, 100.0), sigma=0.25)
b_ngg = solve_param_for_ekn(Family.NGG, "beta", 50, 25.0, (1.0, 200.0), sigma=0.25)
a_dmp = solve_param_for_ekn(Family.DMP, "alpha", 50, 25.0, (1.0, 100.0), K=200)
print(f"  DP:   alpha = {a_dp:.2f}")
print(f"  PY:   alpha = {a_py:.2f}  (sigma = 0.25)")
print(f"  NGG:  beta  = {b_ngg:.2f}  (sigma = 0.25)")
print(f"  DMP:  alpha = {a_dmp:.2f}  (K = 200)")

print("\nPrior pmfs at n = 50 (mode and mean):")
for spec in (ProcessSpec.dp(a_dp), ProcessSpec.py(0.25, a_py), ProcessSpec.ngg(0.25, b_ngg)):
    pmf = prior_kn_gibbs(spec, 50)
    print(f"  {spec.label():30s} mode k = {int(pmf.support[np.argmax(pmf.pmf)]):2d}, "
          f"mean = {pmf.mean:.2f}")
pmf = prior_kn_dmp(ProcessSpec.dmp(a_dmp, 200), 50)
print(f"  {pmf.spec.label():30s} mode k = {int(pmf.support[np.argmax(pmf.pmf)]):2d}, "
      f"mean = {pmf.mean:.2f}")

print("\nDMP prior E[K_n] on the simulation grid (K = 10):")
print("  n      abar=0.01   abar=1    abar=2.5  abar=3")
for n in (20, 200, 2000, 20000):
    row = [expected_kn(ProcessSpec.dmp(ab * 10, 10), n) for ab in (0.01, 1.0, 2.5, 3.0)]
    print(f"  {n:<6d} {row[0]:^9.2f} {row[1]:^9.2f} {row[2]:^9.2f} {row[3]:^7.2f}")

print("\nMonte-Carlo check for a finite family without a closed form (PYM):")
mc = prior_kn_mc(ProcessSpec.pym(0.5, 1.0, 10), 20, draws=4000, seed=5)
print(f"  {mc.spec.label()}: n=20, E[K_n] ~ {mc.mean:.2f} ({mc.draws} draws)")
