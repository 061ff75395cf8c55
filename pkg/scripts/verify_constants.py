"""Every universal constant from its closed form and its defining integral,
with the acceptance rule applied.  Exit status 1 if any check fails."""

import argparse
import sys

from atomdot.constants import all_reports, verify_report
from atomdot.numerics import QuadratureSpec


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=4_000_000)
    ap.add_argument("--seed", type=int, default=20240611)
    args = ap.parse_args()
    failed = 0
    for rep in all_reports(QuadratureSpec(mc_samples=args.samples, seed=args.seed)):
        ok, rule = verify_report(rep)
        failed += not ok
        ref = rep.closed_form if rep.closed_form is not None else rep.reference
        se = f" +- {rep.std_error:.1e}" if rep.std_error is not None else ""
        print(f"{'PASS' if ok else 'FAIL'}  {rep.name:<20s} {rep.numeric:.10g}{se}  vs {ref:.10g}   [{rule}]")
    sys.exit(1 if failed else 0)


if __name__ == "__main__":
    main()
