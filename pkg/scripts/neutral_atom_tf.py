"""Neutral and ionized TF atoms: energy, tail coefficient, normalization and
grid-refinement behaviour."""

import math

from atomdot.grids import ScalingContext, log_grid
from atomdot.tf import integrated_dos, tf_energy
from atomdot.tf_atom import normalization, solve_tf_atom


def main():
    print("neutral atom, grid refinement")
    for n in (500, 1000, 2000, 4000):
        sol = solve_tf_atom(1.0, grid=log_grid(1e-6, 1e4, n))
        e = tf_energy(sol, ScalingContext.atom(1.0)).hartree
        print(f"  n={n:5d}  E/N^(7/3) = {e:.8f} Ha  tail = {sol.tail_coeff:.3f}  residual = {sol.residual:.1e}")
    print(f"  81 pi^2 = {81 * math.pi**2:.3f}")

    print("ions")
    for q in (0.9, 0.7, 0.5):
        sol = solve_tf_atom(q)
        ctx = ScalingContext.atom(1.0, q)
        dos = integrated_dos(sol, sol.mu_global, ctx)
        print(f"  q={q}: mu = {sol.mu_global:.6f}  r0 = {sol.support_radius:.4f}  "
              f"norm = {normalization(sol):.8f}  2 D(mu)/N = {2 * dos / q:.8f}")


if __name__ == "__main__":
    main()
