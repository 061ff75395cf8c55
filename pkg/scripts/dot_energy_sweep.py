"""Smooth energy of parabolic and quartic dots over a range of electron numbers."""

import argparse

from atomdot.dot_energy import dot_total_energy
from atomdot.tf_dot import ConfinementSpec, solve_tf_dot_radial


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--potentials", nargs="+", default=["r^2", "r^4"])
    ap.add_argument("--n", nargs="+", type=int, default=[2, 6, 12, 20, 30, 42, 56, 72, 90])
    args = ap.parse_args()
    for text in args.potentials:
        conf = ConfinementSpec.parse(text)
        sol = solve_tf_dot_radial(conf)
        base = dot_total_energy(1, conf, sol=sol)
        print(f"V = {conf.description}:  R = {sol.R:.6f}  mu = {sol.mu_global:.6f}")
        print(f"  e_tf {base.e_tf:.6f}  exchange {base.exchange_term:.6f}  laplacian {base.laplacian_term:.6f}"
              f" (area {base.laplacian_area:.6f})  delta {base.delta_term:.6f}  corr {base.corr_integral:.6f}")
        print(f"  {'N':>4s} {'TF':>12s} {'exchange':>11s} {'lapl+delta':>11s} {'corr':>9s} {'total':>12s}")
        for n in args.n:
            t = dot_total_energy(n, conf, sol=sol).terms
            print(f"  {n:4d} {t['tf']:12.4f} {t['exchange']:11.4f} {t['laplacian'] + t['delta']:11.4f}"
                  f" {t['correlation']:9.4f} {sum(t.values()):12.4f}")


if __name__ == "__main__":
    main()
