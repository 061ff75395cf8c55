"""Leading correlation energy of neutral atoms term by term, and the growth of
the B integral as its lower t cutoff is lowered."""

from atomdot.atom_energy import atom_B_integral, atom_correlation
from atomdot.tf_atom import solve_tf_atom


def main():
    sol = solve_tf_atom(1.0)
    br = atom_correlation(10, 10, sol=sol)
    print(f"A = {br.A_value:.7f}   B(t >= {br.B_t_min:g}) = {br.B_value:.4f}   "
          f"ec2 double integral = {br.ec2_integral:.6f}")
    print("per-electron contributions to -E_c, hartree (N = Z = 10):")
    for k, v in br.per_electron_hartree().items():
        print(f"  {k:<14s} {v:+.6f}")
    for note in br.notes:
        print(f"  note: {note}")

    print("B against the t cutoff")
    for t_min in (0.3, 0.1, 0.03, 0.01, 0.003):
        b = atom_B_integral(sol, t_min=t_min)
        print(f"  t_min = {t_min:<6g} B = {b.value:11.4f}   inner ~ t^{b.small_t_exponent:.2f}")

    print("-E_c in hartree for neutral atoms (x = 0)")
    for n in (10, 18, 36, 54, 86):
        b = atom_correlation(n, n, sol=sol)
        print(f"  N = {n:3d}   {b.minus_ec_hartree():12.4f}")


if __name__ == "__main__":
    main()
