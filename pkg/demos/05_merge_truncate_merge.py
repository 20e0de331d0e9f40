"""Merge-truncate-merge post-processing and the regularization path in c.

MTM turns posterior mixing-measure samples into a consistent estimate
of the number of components: close atoms merge (within the contraction
rate omega_n), then sub-threshold weights are truncated and re-merged.
The constant c acts as a regularizer; sweeping it traces a path whose
plateau identifies the stable estimate.
"""

import numpy as np

from bnpclust import AtomicMeasure, ModelConfig, default_genspec, generate_data, run_chains
from bnpclust.harness import mtm_calibrate
from bnpclust.mtm import MtmConfig, mtm_apply, rate_overfitted, regularization_path
from bnpclust.ot import wasserstein
from bnpclust.sampler import export_mixing_measures

# -- a hand-built example first ---------------------------------------------------
G0 = AtomicMeasure([0.5, 0.3, 0.2], [[0.8, 0.8], [0.8, -0.8], [-0.8, 0.8]])
rng = np.random.default_rng(3)
eps = 1e-4
w = [0.5 - 5 * eps, 0.3, 0.2] + [eps] * 5
locs = list(G0.locations) + [G0.locations[0] + 0.02 * rng.normal(size=2) for _ in range(5)]
G = AtomicMeasure(np.array(w), np.array(locs))

wn = rate_overfitted(2000)
print(f"omega_n at n=2000: {wn:.4f}")
print(f"contaminated sample: {G.n_atoms} atoms, W2 to truth = {wasserstein(G, G0, 2):.2e}")
out = mtm_apply(G, MtmConfig(c=0.5, omega_n=wn, r=2.0, seed=1))
print(f"after MTM (c=0.5): K-tilde = {out.k_tilde}, "
      f"W2 to truth = {wasserstein(out.measure, G0, 2):.2e}, "
      f"{len(out.audit)} audit events")
out = mtm_apply(G, MtmConfig(c=10.0, omega_n=wn, r=2.0, seed=1))
print(f"after MTM (c=10): K-tilde = {out.k_tilde} (threshold exceeds every weight)")

# -- now on real posterior samples -------------------------------------------------
n = 400
x, _ = generate_data(default_genspec(), n)
config = ModelConfig(K=10, alpha_mode="fixed", alpha_bar=1.0)
trace = run_chains(x, config, n_chains=1, iters=3000, burnin=1000, seed=12,
                   snapshot_stride=10)[0]
samples = export_mixing_measures(trace)
print(f"\nposterior samples: {len(samples)} mixing measures from one chain (n={n})")

base = MtmConfig(c=1.0, omega_n=rate_overfitted(n), r=2.0, seed=9)
path = regularization_path(samples, [round(c, 3) for c in np.linspace(0.01, 2, 25)], base)
print("regularization path (c, MAP):",
      " ".join(f"({c:.2f},{m})" for c, m in zip(path.c_grid[::4], path.maps[::4])))
print("reported plateau:", path.plateau)

report = mtm_calibrate(samples, omega_n=rate_overfitted(n), seed=4, k_target_hint=3)
print("calibration heuristic:", report["recommendation"])
