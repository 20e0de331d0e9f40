"""Harness determinism, manifests, CLI surfaces, calibration heuristic."""

import json
import math
import os
import subprocess
import sys

import numpy as np
import pytest

from bnpclust.harness import (
    EXPERIMENTS,
    ExperimentConfig,
    derived_seed,
    mtm_calibrate,
    run,
)
from bnpclust.io import file_sha256, write_csv
from bnpclust.mtm import rate_overfitted
from bnpclust.ot import AtomicMeasure
from test_mtm import separated_measure


def small_cfg(experiment, out, **over):
    overrides = {"n_values": [15, 40], "alpha_bars": [0.5, 1.0],
                 "prior_n_values": [20, 50], "k_values": [1, 3], "n_max": 60,
                 "path_n": 40, "path_c_grid": [0.05, 0.3, 0.8, 1.5],
                 "prior_mc_draws": 500, **over}
    return ExperimentConfig(experiment, out, seed=7, iters=250, burnin=100,
                            overrides=overrides)


def test_unknown_experiment_rejected(tmp_path):
    with pytest.raises(ValueError):
        ExperimentConfig("fig99", tmp_path)


def test_derived_seed_stability():
    assert derived_seed(1, "x", 2) == derived_seed(1, "x", 2)
    assert derived_seed(1, "x", 2) != derived_seed(1, "x", 3)


def test_fig2_bottom_runs_and_manifests(tmp_path):
    m = run(small_cfg("fig2_bottom", tmp_path))
    out = tmp_path / "fig2_bottom"
    assert (out / "fig2_bottom.csv").exists()
    assert (out / "fig2_bottom.csv.schema.json").exists()
    assert (out / "manifest.json").exists()
    schema = json.loads((out / "fig2_bottom.csv.schema.json").read_text())
    assert schema["columns"][0] == "family"
    assert m["files"][0]["sha256"] == file_sha256(out / "fig2_bottom.csv")


def test_rerun_is_byte_identical(tmp_path):
    cfg = small_cfg("fig2_top", tmp_path / "a")
    m1 = run(cfg)
    data1 = (tmp_path / "a/fig2_top/fig2_top.csv").read_bytes()
    m2 = run(small_cfg("fig2_top", tmp_path / "b"))
    data2 = (tmp_path / "b/fig2_top/fig2_top.csv").read_bytes()
    assert data1 == data2
    assert m1["content_hash"] == m2["content_hash"]


def test_seed_changes_hash(tmp_path):
    cfg1 = small_cfg("table2", tmp_path / "a")
    m1 = run(cfg1)
    cfg2 = small_cfg("table2", tmp_path / "b")
    cfg2.seed = 8
    m2 = run(cfg2)
    assert m1["content_hash"] != m2["content_hash"]


def test_mcmc_experiments_share_traces(tmp_path):
    cfg = small_cfg("table2", tmp_path)
    run(cfg)
    traces = sorted(p.name for p in (tmp_path / "traces").glob("*.trace"))
    assert traces  # cached
    run(small_cfg("fig3", tmp_path))
    assert sorted(p.name for p in (tmp_path / "traces").glob("*.trace")) == traces
    rows = (tmp_path / "fig3/fig3.csv").read_text().splitlines()
    assert rows[0] == "alpha_bar,n,k,prior_probability,posterior_probability"
    assert len(rows) == 1 + 2 * 2 * 10  # abars x ns x K


def test_fig5_fig6_outputs(tmp_path):
    run(small_cfg("fig5", tmp_path))
    run(small_cfg("fig6", tmp_path))
    fig6 = (tmp_path / "fig6/fig6.csv").read_text().splitlines()
    assert fig6[0] == "alpha_bar,n,c,mean,map"
    plateaus = json.loads((tmp_path / "fig6/fig6_plateaus.json").read_text())
    assert set(plateaus) == {"0.5", "1.0"}


def test_fig7_outputs(tmp_path):
    run(small_cfg("fig7", tmp_path))
    rows = (tmp_path / "fig7/fig7_kn.csv").read_text().splitlines()
    assert rows[0] == "mode,n,k,prior_probability,posterior_probability"
    modes = {line.split(",")[0] for line in rows[1:]}
    assert modes == {"solve_ekn", "gamma_prior"}


def test_run_all_produces_every_manifest(tmp_path):
    cfg = small_cfg("all", tmp_path)
    manifests = run(cfg)
    assert set(manifests) == set(EXPERIMENTS)


# -- calibration heuristic -------------------------------------------------------

def test_calibrate_concentrated_posterior_reports_k0():
    samples = [separated_measure(extra=7, eps_w=1e-5, jitter=0.02, seed=s)
               for s in range(30)]
    rep = mtm_calibrate(samples, omega_n=rate_overfitted(2000), seed=1,
                        k_target_hint=3)
    assert rep["plateau"] is not None
    assert rep["plateau"]["k"] == 3
    assert "use c in" in rep["recommendation"]


def test_calibrate_single_atom_plateau_at_one():
    samples = [AtomicMeasure([1.0], [[0.0, 0.0]])] * 10
    rep = mtm_calibrate(samples, omega_n=0.3, seed=2)
    assert rep["plateau"] is not None and rep["plateau"]["k"] == 1


def test_calibrate_reports_absence():
    # incoherent samples: wildly different supports, tiny n analogue
    rng = np.random.default_rng(0)
    samples = []
    for s in range(12):
        m = int(rng.integers(2, 9))
        w = rng.dirichlet(np.ones(m) * 0.3) + 1e-6
        samples.append(AtomicMeasure(w / w.sum(), rng.normal(size=(m, 2)) * 3))
    rep = mtm_calibrate(samples, omega_n=rate_overfitted(20), seed=3,
                        grid_points=8)
    assert "recommendation" in rep
    if rep["plateau"] is None:
        assert "increase the sample size" in rep["recommendation"]


# -- CLI -------------------------------------------------------------------------

def _cli(args, env_extra=None, cwd=None):
    env = dict(os.environ)
    if env_extra:
        env.update(env_extra)
    return subprocess.run([sys.executable, "-m", "bnpclust.cli", *args],
                          capture_output=True, text=True, env=env, cwd=cwd)


def test_cli_eppf_json():
    res = _cli(["eppf", "--family", "DP", "--alpha", "1.0", "--blocks", "2,1"])
    assert res.returncode == 0
    payload = json.loads(res.stdout)
    assert payload["log_p_ordered"] == pytest.approx(math.log(1 / 12))


def test_cli_priors_and_env_root(tmp_path):
    res = _cli(["priors", "--family", "DMP", "--alpha", "10", "-K", "10", "-n", "20"],
               env_extra={"BNPCLUST_OUTPUT_ROOT": str(tmp_path)})
    assert res.returncode == 0
    assert (tmp_path / "prior_kn_dmp_n20.csv").exists()
    assert "E[K_n] = 6.89" in res.stdout


def test_cli_simulate_and_config_file(tmp_path):
    cfgfile = tmp_path / "cfg.toml"
    cfgfile.write_text(f'out = "{tmp_path}"\nseed = 11\n')
    res = _cli(["simulate", "-n", "25", "--config", str(cfgfile)])
    assert res.returncode == 0
    data = (tmp_path / "dataset_n25.csv").read_text().splitlines()
    assert data[0] == "x1,x2,component"
    assert len(data) == 26

    cfgjson = tmp_path / "cfg.json"
    cfgjson.write_text(json.dumps({"out": str(tmp_path / "j"), "seed": 11}))
    res = _cli(["simulate", "-n", "5", "--config", str(cfgjson)])
    assert res.returncode == 0
    assert (tmp_path / "j" / "dataset_n5.csv").exists()


def test_cli_sample_then_mtm(tmp_path):
    res = _cli(["sample", "-n", "30", "--iters", "120", "--burnin", "40",
                "--chains", "1", "--out", str(tmp_path)])
    assert res.returncode == 0, res.stderr
    trace = next(tmp_path.glob("*.trace"))
    res = _cli(["mtm", "--trace", str(trace), "-n", "30",
                "--c-grid", "0.1,1", "--out", str(tmp_path)])
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "mtm_path.csv").exists()
    res = _cli(["mtm", "--trace", str(trace), "-n", "30", "--calibrate",
                "--out", str(tmp_path)])
    assert res.returncode == 0
    assert (tmp_path / "mtm_calibration.json").exists()


def test_cli_reproduce_with_overrides(tmp_path):
    cfgfile = tmp_path / "over.toml"
    cfgfile.write_text(
        'seed = 7\n[overrides]\nprior_n_values = [10]\n')
    res = _cli(["reproduce", "fig2_bottom", "--out", str(tmp_path),
                "--config", str(cfgfile)])
    assert res.returncode == 0, res.stderr
    assert (tmp_path / "fig2_bottom/fig2_bottom.csv").exists()
    assert "content_hash" in res.stdout


def test_write_csv_float_roundtrip(tmp_path):
    path = write_csv(tmp_path / "t.csv", [{"a": 1 / 3, "b": 2}], ["a", "b"])
    row = path.read_text().splitlines()[1].split(",")
    assert float(row[0]) == 1 / 3
