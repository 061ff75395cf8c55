"""Fit the per-electron offset c' under both log conventions, per source and
jointly.  Defaults to the synthetic fixture; pass real tables with --data."""

import argparse
from pathlib import Path

from atomdot.datasets import CONVENTIONS, fit_all, load_correlation_csv


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", default=str(Path(__file__).resolve().parents[1] / "data" / "synthetic_correlation.csv"))
    args = ap.parse_args()
    data = load_correlation_csv(args.data)
    print(f"{len(data)} records from {args.data}")
    for conv in CONVENTIONS:
        for name, fit in fit_all(data, conv).items():
            print(f"  {conv:<14s} {name:<7s} slope {fit.slope:.5f}  c' = {fit.c_prime:+.5f}  "
                  f"max rel dev (n >= 10) = {fit.max_rel_dev_n_ge_10:.3%}  ({fit.n_records} records)")


if __name__ == "__main__":
    main()
