"""Command-line harness.

Subcommands: priors, cnk, eppf, simulate, sample, mtm, reproduce.
Global flags accept a TOML or JSON config file whose keys provide
defaults for the matching command-line options; explicit flags win.
The output root honors the BNPCLUST_OUTPUT_ROOT environment variable.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

try:
    import tomllib
except ModuleNotFoundError:  # python < 3.11
    import tomli as tomllib

import numpy as np

from bnpclust import __version__
from bnpclust.diagnostics import cnk_curve
from bnpclust.eppf import log_eppf, log_eppf_unordered, shared_engine
from bnpclust.harness import (
    EXPERIMENT_ORDER,
    EXPERIMENTS,
    ExperimentConfig,
    derived_seed,
    mtm_calibrate,
    run,
    write_dataset,
)
from bnpclust.io import write_csv, write_json
from bnpclust.mtm import MtmConfig, rate_overfitted, regularization_path
from bnpclust.priors import prior_kn_dmp, prior_kn_gibbs, prior_kn_mc
from bnpclust.processes import Composition, Family, ProcessSpec
from bnpclust.sampler import ModelConfig, Trace, export_mixing_measures, run_chains
from bnpclust.sampler import default_genspec, generate_data


def _load_config_file(path: str | None) -> dict:
    if not path:
        return {}
    p = Path(path)
    if p.suffix == ".toml":
        with open(p, "rb") as fh:
            return tomllib.load(fh)
    if p.suffix == ".json":
        with open(p) as fh:
            return json.load(fh)
    # sniff: TOML rarely starts with '{'
    text = p.read_text()
    if text.lstrip().startswith("{"):
        return json.loads(text)
    return tomllib.loads(text)


def _out_root(args) -> Path:
    if args.out:
        return Path(args.out)
    env = os.environ.get("BNPCLUST_OUTPUT_ROOT")
    return Path(env) if env else Path("bnpclust-out")


def _spec_from_args(args) -> ProcessSpec:
    fields = {}
    for name in ("alpha", "sigma", "beta"):
        v = getattr(args, name, None)
        if v is not None:
            fields[name] = v
    if getattr(args, "K", None) is not None:
        fields["K"] = args.K
    return ProcessSpec(Family(args.family), **fields)


def _add_spec_flags(p: argparse.ArgumentParser):
    p.add_argument("--family", required=True,
                   choices=[f.value for f in Family])
    p.add_argument("--alpha", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("-K", "--K", type=int, dest="K")


def _add_common_flags(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--out", type=str, default=None)
    p.add_argument("--scale", choices=["desk", "full"], default=None)
    p.add_argument("--precision-bits", type=int, default=None)
    p.add_argument("--config", type=str, default=None,
                   help="TOML or JSON file supplying defaults for these flags")


def _merged(args, key, fallback):
    """CLI flag > config file entry > fallback."""
    v = getattr(args, key.replace("-", "_"), None)
    if v is not None:
        return v
    return args._file_config.get(key, fallback)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="bnpclust",
                                     description="clustering-prior experiments")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("priors", help="prior pmf of the number of clusters")
    _add_spec_flags(p)
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--draws", type=int, default=100000,
                   help="Monte-Carlo draws (PYM/NGGM only)")
    _add_common_flags(p)

    p = sub.add_parser("cnk", help="c_n(k) diagnostic curve")
    _add_spec_flags(p)
    p.add_argument("-k", type=int, required=True)
    p.add_argument("--n-max", type=int, default=5000)
    p.add_argument("--points", type=int, default=40)
    _add_common_flags(p)

    p = sub.add_parser("eppf", help="evaluate an EPPF at one composition")
    _add_spec_flags(p)
    p.add_argument("--blocks", required=True,
                   help="comma-separated block sizes, e.g. 3,2,1")
    _add_common_flags(p)

    p = sub.add_parser("simulate", help="write a simulated dataset as CSV")
    p.add_argument("-n", type=int, required=True)
    _add_common_flags(p)

    p = sub.add_parser("sample", help="run the overfitted-mixture Gibbs sampler")
    p.add_argument("-n", type=int, required=True)
    p.add_argument("--data", type=str, help="dataset CSV (default: simulate)")
    p.add_argument("--alpha-bar", type=float, default=1.0)
    p.add_argument("--components", type=int, default=10)
    p.add_argument("--iters", type=int, default=15000)
    p.add_argument("--burnin", type=int, default=6000)
    p.add_argument("--chains", type=int, default=2)
    _add_common_flags(p)

    p = sub.add_parser("mtm", help="merge-truncate-merge sweep over stored traces")
    p.add_argument("--trace", required=True, nargs="+",
                   help="trace file(s) produced by `sample`")
    p.add_argument("-n", type=int, required=True,
                   help="sample size behind the traces (sets omega_n)")
    p.add_argument("--c-grid", type=str, default="0.1,0.5,1,2")
    p.add_argument("--calibrate", action="store_true",
                   help="run the plateau-search heuristic instead of a fixed grid")
    _add_common_flags(p)

    p = sub.add_parser("reproduce", help="regenerate a figure/table dataset")
    p.add_argument("target", choices=list(EXPERIMENT_ORDER) + ["all"])
    p.add_argument("--iters", type=int, default=None)
    p.add_argument("--burnin", type=int, default=None)
    _add_common_flags(p)

    args = parser.parse_args(argv)
    args._file_config = _load_config_file(getattr(args, "config", None))
    seed = int(_merged(args, "seed", 2024))
    out = _out_root(argparse.Namespace(out=_merged(args, "out", None)))
    precision_bits = int(_merged(args, "precision-bits", 512))

    if args.command == "priors":
        return _cmd_priors(args, seed, out)
    if args.command == "cnk":
        return _cmd_cnk(args, out, precision_bits)
    if args.command == "eppf":
        return _cmd_eppf(args, precision_bits)
    if args.command == "simulate":
        cfg = ExperimentConfig("datasets", out, seed=seed)
        path = write_dataset(cfg, args.n, out / f"dataset_n{args.n}.csv")
        print(path)
        return 0
    if args.command == "sample":
        return _cmd_sample(args, seed, out)
    if args.command == "mtm":
        return _cmd_mtm(args, seed, out)
    if args.command == "reproduce":
        scale = _merged(args, "scale", "desk")
        cfg = ExperimentConfig(args.target, out, seed=seed, scale=scale,
                               precision_bits=precision_bits,
                               iters=int(_merged(args, "iters", 15000)),
                               burnin=int(_merged(args, "burnin", 6000)),
                               overrides=args._file_config.get("overrides", {}))
        manifest = run(cfg)
        targets = manifest if isinstance(manifest, dict) and "files" not in manifest \
            else {args.target: manifest}
        for name, m in targets.items():
            print(f"{name}: {len(m['files'])} file(s), content_hash {m['content_hash'][:16]}...")
        return 0
    raise AssertionError  # pragma: no cover


def _cmd_priors(args, seed: int, out: Path) -> int:
    spec = _spec_from_args(args)
    if spec.family == Family.DMP:
        pmf = prior_kn_dmp(spec, args.n)
    elif spec.is_finite:
        pmf = prior_kn_mc(spec, args.n, draws=args.draws, seed=seed)
    else:
        pmf = prior_kn_gibbs(spec, args.n)
    name = f"prior_kn_{spec.family.value.lower()}_n{args.n}"
    write_csv(out / f"{name}.csv", pmf.to_records(), ["k", "probability"])
    write_json(out / f"{name}.json", {
        "spec": spec.label(), "n": args.n, "method": pmf.method,
        "mean": pmf.mean, "pmf": [float(p) for p in pmf.pmf],
    })
    print(f"{spec.label()} n={args.n}: E[K_n] = {pmf.mean:.4f} -> {out / name}.csv")
    return 0


def _cmd_cnk(args, out: Path, precision_bits: int) -> int:
    spec = _spec_from_args(args)
    engine = None
    if spec.family in (Family.NGG, Family.NGGM):
        engine = shared_engine(spec.sigma, spec.beta, precision_bits)
    grid = sorted({int(round(v)) for v in np.geomspace(args.k + 2, args.n_max, args.points)})
    curve = cnk_curve(spec, args.k, grid, engine=engine)
    path = write_csv(out / f"cnk_{spec.family.value.lower()}_k{args.k}.csv",
                     curve.to_records(),
                     ["family", "params", "k", "n", "c_n_k", "method"])
    print(path)
    return 0


def _cmd_eppf(args, precision_bits: int) -> int:
    spec = _spec_from_args(args)
    comp = Composition([int(b) for b in args.blocks.split(",")])
    engine = None
    if spec.family in (Family.NGG, Family.NGGM):
        engine = shared_engine(spec.sigma, spec.beta, precision_bits)
    ordered = log_eppf(spec, comp, engine=engine)
    unordered = log_eppf_unordered(spec, comp, engine=engine)
    print(json.dumps({
        "spec": spec.label(),
        "blocks": list(comp.blocks),
        "log_p_ordered": None if ordered.is_zero else ordered.log,
        "log_p_unordered": None if unordered.is_zero else unordered.log,
        "zero": ordered.is_zero,
    }, indent=2))
    return 0


def _cmd_sample(args, seed: int, out: Path) -> int:
    if args.data:
        x = np.loadtxt(args.data, delimiter=",", skiprows=1, usecols=(0, 1))
    else:
        x, _ = generate_data(default_genspec(seed=seed), args.n)
        x = x[: args.n]
    model = ModelConfig(K=args.components, alpha_mode="fixed", alpha_bar=args.alpha_bar)
    traces = run_chains(x[: args.n], model, n_chains=args.chains, iters=args.iters,
                        burnin=args.burnin, seed=derived_seed(seed, "cli-sample", args.n))
    out.mkdir(parents=True, exist_ok=True)
    for c, tr in enumerate(traces):
        path = out / f"sample_abar{args.alpha_bar:g}_n{args.n}_chain{c}.trace"
        tr.save(path)
        print(path)
    return 0


def _cmd_mtm(args, seed: int, out: Path) -> int:
    samples = []
    for tpath in args.trace:
        samples.extend(export_mixing_measures(Trace.load(tpath)))
    omega = rate_overfitted(args.n)
    if args.calibrate:
        report = mtm_calibrate(samples, omega_n=omega, seed=seed)
        path = write_json(out / "mtm_calibration.json", report)
        print(report["recommendation"])
        print(path)
        return 0
    c_grid = [float(c) for c in args.c_grid.split(",")]
    base = MtmConfig(c=1.0, omega_n=omega, r=2.0, seed=seed)
    path_res = regularization_path(samples, c_grid, base)
    rows = []
    for c, pmf in zip(path_res.c_grid, path_res.pmfs):
        for k, p in sorted(pmf.items()):
            rows.append({"c": c, "k_tilde": k, "probability": p})
    csv_path = write_csv(out / "mtm_path.csv", rows, ["c", "k_tilde", "probability"])
    write_json(out / "mtm_path.json", {
        "c_grid": path_res.c_grid, "means": path_res.means, "maps": path_res.maps,
        "plateau": path_res.plateau,
    })
    print(csv_path)
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
