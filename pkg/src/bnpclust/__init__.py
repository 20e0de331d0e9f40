"""Clustering priors for Bayesian mixture models.

Partition-distribution weights and EPPFs for Dirichlet, Pitman-Yor,
normalized generalized gamma processes and their finite multinomial
counterparts; prior distributions of the number of clusters; the
singleton-split inconsistency diagnostic; an overfitted Gaussian-mixture
Gibbs sampler; exact Wasserstein distances between atomic measures; and
the merge-truncate-merge post-processing of posterior mixing measures.
"""

from bnpclust.processes import ProcessSpec, Composition, Family
from bnpclust.logspace import LogValue
from bnpclust.gfc import GfcTable, StirlingTable
from bnpclust.vnk import log_vnk, NggVnkEngine, PrecisionError
from bnpclust.eppf import log_eppf, log_eppf_unordered, log_eppf_ratio_split
from bnpclust.priors import (
    PriorKnPmf,
    prior_kn_gibbs,
    prior_kn_dmp,
    prior_kn_mc,
    expected_kn,
    solve_param_for_ekn,
)
from bnpclust.diagnostics import CnkCurve, cnk_exact, cnk_fast, vnk_ratio_curve
from bnpclust.ot import AtomicMeasure, wasserstein
from bnpclust.mtm import (
    MtmConfig,
    MtmOutcome,
    rate_overfitted,
    rate_py,
    mtm_apply,
    regularization_path,
)
from bnpclust.sampler import (
    GenSpec,
    ModelConfig,
    Trace,
    default_genspec,
    generate_data,
    run_chains,
    gelman_rubin,
    posterior_kn_pmf,
    posterior_sorted_weights,
    export_mixing_measures,
    alpha_for_fixed_ekn,
)

__version__ = "0.1.0"
