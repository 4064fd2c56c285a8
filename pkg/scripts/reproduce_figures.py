"""Run every experiment config in configs/ and write CSV and SVG files.

Usage: python3 scripts/reproduce_figures.py [--out DIR] [--trials N]
"""

import argparse
from pathlib import Path

from rgreedi.experiments import ExperimentConfig, run_and_write

CONFIGS = Path(__file__).resolve().parents[1] / "configs"


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="results")
    ap.add_argument("--trials", type=int, help="override the trial count of every config")
    args = ap.parse_args()
    for path in sorted(CONFIGS.glob("*.cfg")):
        overrides = {"out": args.out}
        if args.trials:
            overrides["trials"] = str(args.trials)
        rows, csv_path = run_and_write(ExperimentConfig.from_file(path, overrides))
        print(f"{path.stem}: {len(rows)} rows -> {csv_path}")


if __name__ == "__main__":
    main()
