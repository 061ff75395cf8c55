"""Smooth Hartree-exchange energy and correlation energy of a radial dot.

Energies stay in the scaled dot units; the ``N`` powers are applied only when
the breakdown is totalled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .coulomb2d import PanelOperator, coulomb_radial_2d
from .grids import ScalingContext
from .numerics import ConvergenceError, DomainError, QuadratureSpec
from .tf import tf_energy
from .tf_dot import ConfinementSpec, TFDotSolution, solve_tf_dot_radial

TWO_PI = 2.0 * math.pi
EC1_DOT = 0.1534
EC2_DOT = 0.1455
J_EXCHANGE = 16.0 * math.pi / 3.0
EXCHANGE_COEFF = J_EXCHANGE / (2.0 * math.pi) ** 3  # = 2 / (3 pi^2)


@dataclass(frozen=True)
class ScreeningProfile:
    """Solution ``a`` of ``a = 1 - (1/2pi) int_{|y|<R} a(y) / |x - y| d^2y``."""

    R: float
    nodes: np.ndarray
    a_values: np.ndarray
    residual: float
    tol: float
    condition: float
    _op: PanelOperator = field(default=None, repr=False, compare=False)

    def a_at(self, r):
        """Inside the support by the Nyström interpolant; outside by
        substitution into the equation."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        if self.R == 0.0:
            return np.ones_like(r)
        out = np.empty_like(r)
        inside = r <= self.R
        if inside.any():
            out[inside] = self._op.interpolate(self.a_values, r[inside] / self.R)
        if (~inside).any():
            M = self._op.matrix(r[~inside] / self.R)
            out[~inside] = 1.0 - self.R * (M @ self.a_values) / TWO_PI
        return out


def screening_defect(screen: ScreeningProfile, r, spec: QuadratureSpec | None = None) -> np.ndarray:
    """Defect of the screening equation with the integral redone adaptively."""
    spec = spec or QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14)
    out = []
    for x in np.atleast_1d(r):
        coul = coulomb_radial_2d(lambda s: screen.a_at(s), float(x), screen.R, spec) / TWO_PI
        out.append(float(screen.a_at(x)[0]) - (1.0 - coul))
    return np.array(out)


def solve_screening(sol: TFDotSolution, tol: float = 1e-8, probes: int = 10) -> ScreeningProfile:
    op = sol._op
    R = sol.R
    n = op.nodes.size
    M1 = op.matrix(op.nodes)
    A = np.eye(n) + (R / TWO_PI) * M1
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > 1e12:
        raise ConvergenceError(f"screening system is singular (condition number {cond:.2e})")
    a = np.linalg.solve(A, np.ones(n))
    node_res = float(np.max(np.abs(A @ a - 1.0)))
    tmp = ScreeningProfile(R, sol.nodes, a, 0.0, tol, cond, op)
    probe_r = R * (np.arange(probes) + 0.37) / probes
    residual = max(node_res, float(np.max(np.abs(screening_defect(tmp, probe_r)))))
    if not residual <= tol:
        raise ConvergenceError("screening equation defect above tolerance", residual)
    return ScreeningProfile(R, sol.nodes, a, residual, tol, cond, op)


def _disk(sol: TFDotSolution, values: np.ndarray) -> float:
    """``int_{|x|<R} values d^2x`` for values at the solver nodes."""
    return TWO_PI * math.fsum(sol._op.weights * sol.R * sol.nodes * values)


def dot_delta_term(sol: TFDotSolution, screening: ScreeningProfile) -> float:
    """``(1/pi^3) [int mu_+^(1/2) a]^2 / int a theta(mu)``."""
    m = np.maximum(sol.node_values, 0.0)
    num = _disk(sol, np.sqrt(m) * screening.a_values)
    den = _disk(sol, screening.a_values)
    if den == 0.0:
        raise DomainError("degenerate support: int a theta(mu) vanishes")
    return num**2 / (den * math.pi**3)


def dot_laplacian_term(sol: TFDotSolution) -> float:
    """``(1/24pi) int Delta W theta(mu)`` as the boundary flux ``R W'(R) / 12``."""
    if not (sol.R > 0 and math.isfinite(sol.W_prime_at_R)):
        raise DomainError("support radius or W'(R) undefined")
    return sol.R * sol.W_prime_at_R / 12.0


def dot_laplacian_area(sol: TFDotSolution) -> float:
    """Same quantity as an area integral of ``W'' + W'/r`` over the disk, with
    ``W`` sampled from the Coulomb operator and splined."""
    r = np.concatenate([[0.0], sol.nodes, [sol.R]])
    W = sol.potential_at(r)
    spline = CubicSpline(r, W, bc_type=((1, 0.0), "not-a-knot"))
    s, w = sol.nodes, sol._op.weights * sol.R
    lap = spline(s, 2) + spline(s, 1) / s
    return TWO_PI * math.fsum(w * s * lap) / (24.0 * math.pi)


def dot_correlation(sol: TFDotSolution, spec: QuadratureSpec | None = None) -> tuple[float, float]:
    """``(0.1534 + 0.1455, (1/2pi^4) int int mu_+^(1/2)(x) mu_+^(1/2)(y) / |x - y|)``."""
    m = np.sqrt(np.maximum(sol.node_values, 0.0))
    if not m.any():
        return EC1_DOT + EC2_DOT, 0.0
    op = sol._op
    pot = sol.R * (op.matrix(op.nodes) @ m)  # int d^2y m(y) / |x - y| at the nodes
    return EC1_DOT + EC2_DOT, _disk(sol, m * pot) / (2.0 * math.pi**4)


@dataclass(frozen=True)
class DotEnergyBreakdown:
    N: float
    confinement: str
    e_tf: float
    exchange_term: float
    laplacian_term: float
    delta_term: float
    corr_const: float
    corr_integral: float
    mu_global: float
    support_radius: float
    laplacian_area: float
    screening_residual: float
    tf_residual: float

    @property
    def terms(self) -> dict:
        N = self.N
        return {
            "tf": N**2 * self.e_tf,
            "exchange": N**1.5 * self.exchange_term,
            "laplacian": N * self.laplacian_term,
            "delta": N * self.delta_term,
            "correlation": -N * (self.corr_const - self.corr_integral),
        }

    @property
    def total(self) -> float:
        N = self.N
        return (N**2 * self.e_tf + N**1.5 * self.exchange_term
                + N * (self.laplacian_term + self.delta_term)
                - N * (self.corr_const - self.corr_integral))


def dot_total_energy(N: float, conf: ConfinementSpec, spec: QuadratureSpec | None = None,
                     tol: float = 1e-8, sol: TFDotSolution | None = None) -> DotEnergyBreakdown:
    if not N >= 1:
        raise DomainError("N must be >= 1")
    sol = sol or solve_tf_dot_radial(conf, tol=tol)
    ctx = ScalingContext.dot(N)
    e_tf = tf_energy(sol, ctx).reduced
    dirac = sol.disk_integral(lambda m, r: m**1.5)
    screen = solve_screening(sol, tol=tol)
    const, integral = dot_correlation(sol, spec)
    return DotEnergyBreakdown(
        N=N, confinement=conf.description, e_tf=e_tf, exchange_term=-EXCHANGE_COEFF * dirac,
        laplacian_term=dot_laplacian_term(sol), delta_term=dot_delta_term(sol, screen),
        corr_const=const, corr_integral=integral, mu_global=sol.mu_global,
        support_radius=sol.R, laplacian_area=dot_laplacian_area(sol),
        screening_residual=screen.residual, tf_residual=sol.residual,
    )
