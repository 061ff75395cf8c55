"""Semiclassical energies of large atoms and two-dimensional quantum dots."""

from .atom_energy import atom_correlation, atom_smooth_hx
from .constants import all_reports, verify_report
from .datasets import fit_offset, load_correlation_csv
from .dot_energy import dot_total_energy
from .grids import ScalingContext
from .numerics import ConvergenceError, DomainError, QuadratureSpec, integrate_1d, integrate_mc
from .tf import tf_energy
from .tf_atom import solve_tf_atom
from .tf_dot import ConfinementSpec, solve_tf_dot_radial

__version__ = "0.1.0"

__all__ = [
    "ConfinementSpec", "ConvergenceError", "DomainError", "QuadratureSpec", "ScalingContext",
    "all_reports", "atom_correlation", "atom_smooth_hx", "dot_total_energy", "fit_offset",
    "integrate_1d", "integrate_mc", "load_correlation_csv", "solve_tf_atom", "solve_tf_dot_radial",
    "tf_energy", "verify_report",
]
