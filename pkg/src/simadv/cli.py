"""Command-line entry point.

    simadv search    --config cfg.json [--seed N] [--out DIR] [--jobs N]
    simadv baseline  --config cfg.json [...]
    simadv region    --config cfg.json [--seed-params OUTCOME.json] [...]
    simadv landscape --config cfg.json [...]
    simadv bench     --config cfg.json [...]

The config file carries the matching method section; --seed and --out
override the config. Relative output directories resolve against
SIMADV_OUT_ROOT when set. Every run writes a manifest.json echoing the
fully resolved configuration, so identical config+seed reproduce the output
directory byte for byte.

Exit codes: 0 completed with adversarial finding(s) or an analysis
artifact; 10 search/baseline completed without an adversarial sample;
1 error.
"""
import argparse
import json
import os
import sys

import numpy as np

from . import report
from .baselines import BaselineConfig, run_baseline
from .config import build_sut, parse_config
from .errors import ConfigError, RegionAborted, SimadvError
from .regions import RegionGridSpec, flood_region
from .search import SearchConfig, run_search

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_NOT_FOUND = 10

OUT_ROOT_ENV = "SIMADV_OUT_ROOT"


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="simadv",
        description="Adversarial testing of black-box simulator/model stacks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, doc in (
        ("search", "policy-gradient adversarial search"),
        ("baseline", "uniform / gaussian / random-opt baseline search"),
        ("region", "flood-fill the connected adversarial region around a seed"),
        ("landscape", "grid-sample a 2-D loss landscape"),
        ("bench", "compare methods at an equal evaluation budget"),
    ):
        p = sub.add_parser(name, help=doc)
        p.add_argument("--config", required=True, help="run-config JSON path")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--out", default=None,
                       help="override the output directory")
        p.add_argument("--jobs", type=int, default=1,
                       help="concurrent oracle sessions (external SUTs)")
        if name == "region":
            p.add_argument("--seed-params", default=None, metavar="OUTCOME",
                           help="outcome.json of a prior search; its "
                                "adversarial params seed the region")
    return parser


def _resolve_out(cfg, override):
    out = override if override is not None else cfg.out
    if out is None:
        raise ConfigError(
            "no output directory: pass --out or set 'out' in the config"
        )
    root = os.environ.get(OUT_ROOT_ENV)
    if root and not os.path.isabs(out):
        out = os.path.join(root, out)
    return out


def _load_seed_params(path, dims):
    if not os.path.exists(path):
        raise ConfigError(f"--seed-params file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except ValueError as exc:
            raise ConfigError(f"--seed-params is not valid JSON: {exc}") from exc
    rec = doc.get("adversarial")
    if not rec or "params" not in rec:
        raise ConfigError(
            f"--seed-params: {path} holds no adversarial record"
        )
    params = rec["params"]
    if len(params) != dims:
        raise ConfigError(
            f"--seed-params: record has {len(params)} dims, config domain "
            f"has {dims}"
        )
    return [float(x) for x in params]


def _write_manifest(out_dir, cfg, seed):
    # the effective config (defaults and seed override applied); the output
    # destination is invocation metadata, not configuration, so a --out
    # override never changes the manifest bytes
    manifest = dict(cfg.resolved)
    manifest["seed"] = seed
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _run_search(cfg, sut, seed, out_dir):
    section = cfg.method_cfg
    search_cfg = SearchConfig(
        threshold=cfg.threshold,
        batch_size=section["batch_size"],
        max_iters=section["max_iters"],
        learning_rate=section["learning_rate"],
        variance=section["variance"],
        baseline_decay=section["baseline_decay"],
        init_mode=section["init_mode"],
        seed=seed,
    )
    outcome = run_search(sut, cfg.domain, search_cfg)
    report.emit_report(outcome, out_dir, names=cfg.domain.names)
    return EXIT_OK if outcome.found else EXIT_NOT_FOUND


def _run_baseline(cfg, sut, seed, out_dir):
    section = cfg.method_cfg
    base_cfg = BaselineConfig(
        method=section["method"],
        budget=section["budget"],
        threshold=cfg.threshold,
        seed=seed,
        center=(np.array(section["center"]) if "center" in section else None),
    )
    outcome = run_baseline(sut, cfg.domain, base_cfg)
    report.emit_report(outcome, out_dir, names=cfg.domain.names)
    return EXIT_OK if outcome.found else EXIT_NOT_FOUND


def _run_region(cfg, sut, seed, out_dir, seed_params_file):
    section = cfg.method_cfg
    if seed_params_file is not None:
        seed_params = _load_seed_params(seed_params_file, cfg.domain.dims)
    elif "seed_params" in section:
        seed_params = section["seed_params"]
    else:
        raise ConfigError(
            "region.seed_params missing: set it in the config or pass "
            "--seed-params"
        )
    spec = RegionGridSpec(
        spacing=section["spacing"],
        seed_params=np.array(seed_params, dtype=np.float64),
        domain=cfg.domain,
        cap=section["cap"],
    )
    try:
        region = flood_region(sut, spec, cfg.threshold)
    except RegionAborted as exc:
        # keep what was mapped before the fault, then fail the run
        report.emit_report(exc.partial, out_dir, names=cfg.domain.names)
        raise
    report.emit_report(region, out_dir, names=cfg.domain.names)
    return EXIT_OK


def _run_landscape(cfg, sut, seed, out_dir):
    section = cfg.method_cfg
    axis_i, axis_j = section["axes"]
    res_i, res_j = section["resolution"]
    grid = report.grid_landscape(
        sut, cfg.domain, axis_i, axis_j, res_i, res_j,
        np.array(section["fixed"], dtype=np.float64), cfg.threshold,
    )
    report.emit_report(grid, out_dir, names=cfg.domain)
    return EXIT_OK


def _run_bench(cfg, sut, seed, out_dir):
    section = cfg.method_cfg
    table = report.bench_compare(
        sut, cfg.domain, section["methods"], section["runs_per_method"],
        section["budget"], cfg.threshold, master_seed=seed,
    )
    report.emit_report(table, out_dir)
    return EXIT_OK


def dispatch(cfg, command, seed, out_dir, jobs=1, seed_params_file=None):
    """Run one parsed config. The caller has already created out_dir."""
    if cfg.method != command:
        raise ConfigError(
            f"config has a {cfg.method!r} section but the {command!r} "
            "subcommand was invoked"
        )
    sut = build_sut(cfg, jobs=jobs)
    try:
        if command == "search":
            return _run_search(cfg, sut, seed, out_dir)
        if command == "baseline":
            return _run_baseline(cfg, sut, seed, out_dir)
        if command == "region":
            return _run_region(cfg, sut, seed, out_dir, seed_params_file)
        if command == "landscape":
            return _run_landscape(cfg, sut, seed, out_dir)
        return _run_bench(cfg, sut, seed, out_dir)
    finally:
        sut.close()


def main(argv=None):
    args = _build_parser().parse_args(argv)
    try:
        cfg = parse_config(args.config)
        seed = args.seed if args.seed is not None else cfg.seed
        out_dir = _resolve_out(cfg, args.out)
        os.makedirs(out_dir, exist_ok=True)
        _write_manifest(out_dir, cfg, seed)
        return dispatch(
            cfg, args.command, seed, out_dir, jobs=args.jobs,
            seed_params_file=getattr(args, "seed_params", None),
        )
    except SimadvError as exc:
        print(f"simadv: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
