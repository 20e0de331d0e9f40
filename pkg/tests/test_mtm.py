"""Merge-truncate-merge: stage behaviour, invariants, regularization paths."""

import math

import numpy as np
import pytest

from bnpclust.mtm import (
    MtmConfig,
    mtm_apply,
    rate_overfitted,
    rate_py,
    regularization_path,
)
from bnpclust.ot import AtomicMeasure, wasserstein


def separated_measure(extra=0, eps_w=1e-6, seed=0, jitter=0.0):
    """K0=3 well-separated atoms, optionally plus tiny atoms near the first.

    The spurious mass is borrowed from the atom the extras sit next to,
    so the total stays 1 without touching the other true weights.
    """
    rng = np.random.default_rng(seed)
    w = [0.5 - extra * eps_w, 0.3, 0.2]
    locs = [[0.8, 0.8], [0.8, -0.8], [-0.8, 0.8]]
    for _ in range(extra):
        w.append(eps_w)
        locs.append([0.8 + jitter * rng.normal(), 0.8 + jitter * rng.normal()])
    return AtomicMeasure(np.array(w), np.array(locs))


def test_rate_overfitted_values():
    assert rate_overfitted(math.e) == pytest.approx(math.exp(-0.25))
    # direct evaluation of (log 2000 / 2000)^(1/4)
    assert rate_overfitted(2000) == pytest.approx(0.24829, abs=5e-5)
    vals = [rate_overfitted(n) for n in range(3, 2000, 7)]
    assert all(a > b for a, b in zip(vals, vals[1:]))
    with pytest.raises(ValueError):
        rate_overfitted(1)


def test_rate_py_values():
    assert rate_py(math.e, 1.0) == pytest.approx(1.0)
    assert rate_py(math.e**4, 2.0, 1.0) == pytest.approx(0.5)
    assert rate_py(55, 2.0, 1.0) == pytest.approx(math.log(55) ** -0.5)
    vals = [rate_py(n, 1.5, 2.0) for n in (10, 100, 1000)]
    assert vals[0] > vals[1] > vals[2]
    with pytest.raises(ValueError):
        rate_py(10, 3.0)
    with pytest.raises(ValueError):
        rate_py(10, 1.0, M=0.0)


def test_config_validation_and_default_exponent():
    cfg = MtmConfig(c=1.0, omega_n=0.25, r=2.0, seed=0)
    assert cfg.truncation_exponent == pytest.approx(2 / 3)
    assert cfg.threshold == pytest.approx(0.25 ** (2 / 3))
    with pytest.raises(ValueError):
        MtmConfig(c=0.0, omega_n=0.25)
    with pytest.raises(ValueError):
        MtmConfig(c=1.0, omega_n=-1.0)
    with pytest.raises(ValueError):
        MtmConfig(c=1.0, omega_n=0.2, merge_locations="mean")


def test_well_separated_measure_untouched():
    G = separated_measure()
    cfg = MtmConfig(c=0.5, omega_n=0.05, r=2.0, seed=4)
    out = mtm_apply(G, cfg)
    assert out.k_tilde == 3
    assert sorted(out.measure.weights) == pytest.approx(sorted(G.weights))
    assert wasserstein(out.measure, G, 2) == pytest.approx(0.0, abs=1e-12)


def test_spurious_atoms_absorbed():
    G0 = separated_measure()
    G = separated_measure(extra=7, eps_w=1e-6, jitter=0.01, seed=1)
    wn = rate_overfitted(2000)
    cfg = MtmConfig(c=0.5, omega_n=wn, r=2.0, seed=2)
    out = mtm_apply(G, cfg)
    assert out.k_tilde == 3
    assert wasserstein(out.measure, G0, 2) <= wasserstein(G, G0, 2) + 1e-12


def test_threshold_above_max_weight_empties():
    G = separated_measure()
    cfg = MtmConfig(c=100.0, omega_n=0.25, r=2.0, seed=0)
    out = mtm_apply(G, cfg)
    assert out.k_tilde == 0 and out.measure is None
    assert any(ev[0] == "truncate_all" for ev in out.audit)


def test_mass_conserved_and_atom_count_never_grows():
    rng = np.random.default_rng(8)
    for seed in range(6):
        m = int(rng.integers(2, 12))
        w = rng.dirichlet(np.ones(m))
        w = np.maximum(w, 1e-9)
        G = AtomicMeasure(w / w.sum(), rng.normal(size=(m, 2)), normalize=True)
        cfg = MtmConfig(c=0.3, omega_n=0.4, r=2.0, seed=seed)
        out = mtm_apply(G, cfg)
        assert out.k_tilde <= m
        if out.k_tilde:
            assert out.measure.weights.sum() == pytest.approx(1.0, abs=1e-12)
            assert out.k_tilde == out.measure.n_atoms


def test_k_tilde_nonincreasing_in_c_at_fixed_seed():
    G = separated_measure(extra=4, eps_w=0.02, jitter=0.3, seed=5)
    ks = []
    for c in (0.05, 0.2, 0.5, 1.0, 2.0, 5.0):
        cfg = MtmConfig(c=c, omega_n=0.2, r=2.0, seed=11)
        ks.append(mtm_apply(G, cfg).k_tilde)
    assert all(a >= b for a, b in zip(ks, ks[1:]))


def test_deterministic_per_seed():
    G = separated_measure(extra=5, eps_w=0.01, jitter=0.5, seed=3)
    cfg = MtmConfig(c=0.7, omega_n=0.3, r=2.0, seed=21)
    a, b = mtm_apply(G, cfg), mtm_apply(G, cfg)
    assert a.k_tilde == b.k_tilde
    np.testing.assert_array_equal(a.measure.weights, b.measure.weights)
    np.testing.assert_array_equal(a.measure.locations, b.measure.locations)


def test_merge_average_policy_moves_locations():
    # the first atom in priority order keeps its location under "keep";
    # "average" lands at the mass-weighted mean either way
    w = np.array([0.999, 0.001])
    locs = np.array([[0.0, 0.0], [0.05, 0.0]])
    G = AtomicMeasure(w, locs)
    keep = mtm_apply(G, MtmConfig(c=0.1, omega_n=0.1, seed=0))
    avg = mtm_apply(G, MtmConfig(c=0.1, omega_n=0.1, seed=0, merge_locations="average"))
    assert keep.k_tilde == avg.k_tilde == 1
    first = keep.audit[0][2]  # merge target index
    assert keep.measure.locations[0, 0] == pytest.approx(locs[first, 0])
    assert avg.measure.locations[0, 0] == pytest.approx(0.001 * 0.05)


def test_empty_input_rejected():
    with pytest.raises(ValueError):
        mtm_apply(None, MtmConfig(c=1.0, omega_n=0.2))


def test_path_single_atom_steps_to_zero():
    G = AtomicMeasure([1.0], [[0.0, 0.0]])
    base = MtmConfig(c=1.0, omega_n=0.3, r=2.0, seed=1)
    path = regularization_path([G] * 10, [0.1, 0.5, 1.0, 2.0, 5.0], base)
    thresh = 1.0  # weight of the single atom
    for c, mp in zip(path.c_grid, path.maps):
        expected = 1 if c * 0.3 ** (2 / 3) < thresh else 0
        assert mp == expected


def test_path_plateau_on_synthetic_posterior():
    samples = [separated_measure(extra=7, eps_w=1e-5, jitter=0.02, seed=s)
               for s in range(40)]
    wn = rate_overfitted(2000)
    base = MtmConfig(c=1.0, omega_n=wn, r=2.0, seed=9)
    grid = [round(c, 3) for c in np.linspace(0.01, 2.0, 30)]
    path = regularization_path(samples, grid, base)
    assert path.plateau is not None
    assert path.plateau[2] == 3
    assert path.plateau[1] > path.plateau[0]
    assert path.maps[-1] in (0, 1)  # large c truncates everything
    assert any(v == 3 and hi > lo for lo, hi, v in path.runs())


def test_path_requires_inputs():
    with pytest.raises(ValueError):
        regularization_path([], [0.1], MtmConfig(c=1, omega_n=0.2))
