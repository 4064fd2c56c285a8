"""Command line entry point: ``rgreedi run | gen | verify``.

Exit codes: 0 success, 1 bound-suite failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .experiments import ConfigError, ExperimentConfig, run_and_write
from .instances import (FimiFormatError, gen_diverse_relevant, gen_exemplar, gen_matroid_coverage,
                        gen_random_coverage, gen_tight_instance, save_instance, write_fimi)
from .suites import SUITES, run_suites

# CLI flag -> config key; flags mirror the keys of the key=value config file.
RUN_OVERRIDES = {
    "experiment": str,
    "k_range": str,
    "m": int,
    "trials": int,
    "seed": int,
    "out": str,
    "partition_strategies": str,
    "reference": str,
    "fimi_path": str,
    "n": int,
    "l": int,
}


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rgreedi", description="Randomized distributed greedy experiments.")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run an experiment and write CSV (and SVG) results")
    run.add_argument("config", nargs="?", help="key=value config file")
    for key, typ in RUN_OVERRIDES.items():
        run.add_argument("--" + key.replace("_", "-"), dest=key, type=typ, default=None)
    run.add_argument("--timing", action="store_true", help="record wall-clock times (CSV no longer reproducible)")
    run.add_argument("--no-plot", action="store_true")

    gen = sub.add_parser("gen", help="generate an instance file (.json, or .dat/.fimi for coverage)")
    gen.add_argument("kind", choices=["coverage", "exemplar", "diversity", "ellipse", "tight"])
    gen.add_argument("--out", required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--n", type=int, default=20)
    gen.add_argument("--k", type=int, default=5)
    gen.add_argument("--universe", type=int, default=50)
    gen.add_argument("--density", type=float, default=0.15)
    gen.add_argument("--d", type=int, default=16)
    gen.add_argument("--r", type=int, default=3)
    gen.add_argument("--demand-grid", type=int, default=100)
    gen.add_argument("--l", type=int, default=3)

    ver = sub.add_parser("verify", help="run the bound suites; exit 1 if any fails")
    ver.add_argument("--quick", action="store_true", help="reduced instance and trial counts")
    ver.add_argument("--suite", action="append", choices=sorted(SUITES), help="run only these suites")
    ver.add_argument("--seed", type=int, default=0)
    return p


def _cmd_run(args) -> int:
    overrides = {k: str(getattr(args, k)) for k in RUN_OVERRIDES if getattr(args, k) is not None}
    if args.timing:
        overrides["timing"] = "true"
    if args.no_plot:
        overrides["plot"] = "false"
    if args.config:
        cfg = ExperimentConfig.from_file(args.config, overrides)
    else:
        cfg = ExperimentConfig.from_pairs(overrides)
    rows, path = run_and_write(cfg)
    print(f"{len(rows)} rows -> {path}")
    return 0


def _generate(args):
    if args.kind == "coverage":
        return gen_random_coverage(args.n, args.universe, args.density, args.seed, k=args.k)
    if args.kind == "exemplar":
        return gen_exemplar(args.n, args.d, args.seed, k=args.k)
    if args.kind == "diversity":
        return gen_diverse_relevant(args.n, args.k, args.seed)
    if args.kind == "ellipse":
        return gen_matroid_coverage(args.n, args.r, args.demand_grid, args.seed, k=args.k)
    return gen_tight_instance(args.l)


def _cmd_gen(args) -> int:
    inst = _generate(args)
    out = Path(args.out)
    if out.suffix in (".dat", ".fimi"):
        write_fimi(inst, out)
    elif out.suffix == ".json":
        save_instance(inst, out)
    else:
        raise ConfigError(f"unknown output format {out.suffix!r}; use .json, .dat or .fimi")
    print(f"{inst.name} (n={inst.n}) -> {out}")
    return 0


def _cmd_verify(args) -> int:
    results = run_suites(args.suite, scale="quick" if args.quick else "full", seed=args.seed)
    for res in results:
        print(res.line(), flush=True)
    failed = [r.name for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} suites passed")
    return 1 if failed else 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 2
    try:
        return {"run": _cmd_run, "gen": _cmd_gen, "verify": _cmd_verify}[args.command](args)
    except (ValueError, OSError) as exc:  # ConfigError and FimiFormatError included
        print(f"rgreedi: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
