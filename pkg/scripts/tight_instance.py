"""Deterministic GreeDi on its adversarial partition against RandGreeDi, for a range of l.

Usage: python3 scripts/tight_instance.py [--max-l L] [--trials N]
"""

import argparse

from rgreedi.suites import tight_runs


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--max-l", type=int, default=6)
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()
    print("l,opt,det_value,det_ratio,two_l_squared,rand_mean,rand_se")
    for l in range(2, args.max_l + 1):
        inst, det, est = tight_runs(l, args.trials, seed=0)
        opt = inst.known_opt
        print(f"{l},{opt:g},{det.final_value:g},{det.final_value / opt:.4f},{2 * l * l},"
              f"{est.mean:.4f},{est.std_error:.4f}")


if __name__ == "__main__":
    main()
