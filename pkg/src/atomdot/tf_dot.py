"""Thomas-Fermi equations of a radially confined planar dot (scaled units).

    mu_plus(r) = [mu - W(r)]_+,   W = V + (1/2pi) int mu_plus(y) / |x - y| d^2y,
    (1/2pi) int mu_plus d^2x = 1.

For a trial support radius ``R`` the equations restricted to ``[0, R]`` are
linear in ``(mu_plus, mu)`` and are solved directly by a Nyström
discretization; ``R`` is then adjusted until the solution vanishes at the
edge.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .coulomb2d import PanelOperator, coulomb_radial_2d, ring_kernel_dr
from .grids import RadialGrid, graded_breaks, r2_grid
from .numerics import ConvergenceError, DomainError, QuadratureSpec

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class ConfinementSpec:
    """Radial confining potential: ``strength * r**p`` or a table."""

    kind: str
    p: float = 2.0
    strength: float = 1.0
    table_r: tuple = ()
    table_v: tuple = ()
    description: str = ""

    def __post_init__(self):
        if self.kind == "power_law":
            if not (self.p > 0 and self.strength > 0):
                raise DomainError("power-law confinement needs p > 0 and strength > 0")
        elif self.kind == "tabulated":
            r, v = np.asarray(self.table_r, float), np.asarray(self.table_v, float)
            if r.size < 4 or r.size != v.size:
                raise DomainError("tabulated confinement needs >= 4 (r, V) samples")
            if np.any(np.diff(r) <= 0) or r[0] < 0:
                raise DomainError("table radii must be non-negative and increasing")
            if not (v[-1] > v.min() and v[-1] > v[-2]):
                raise DomainError("tabulated potential is not confining (must rise at the outer end)")
        else:
            raise DomainError(f"unknown confinement kind {self.kind!r}")
        if not self.description:
            text = f"{self.strength:g}*r^{self.p:g}" if self.kind == "power_law" else f"table[{len(self.table_r)}]"
            object.__setattr__(self, "description", text)

    @classmethod
    def power_law(cls, p: float, strength: float = 1.0) -> "ConfinementSpec":
        return cls("power_law", float(p), float(strength))

    @classmethod
    def tabulated(cls, r, v, description: str = "") -> "ConfinementSpec":
        return cls("tabulated", table_r=tuple(map(float, r)), table_v=tuple(map(float, v)),
                   description=description)

    @classmethod
    def from_csv(cls, path) -> "ConfinementSpec":
        """Two columns ``r,V`` with a header line."""
        with open(path, newline="") as fh:
            rows = [row for row in csv.reader(fh) if row and not row[0].startswith("#")]
        try:
            data = np.array([[float(a), float(b)] for a, b in rows[1:]])
        except ValueError as exc:
            raise DomainError(f"{path}: malformed potential table ({exc})") from None
        return cls.tabulated(data[:, 0], data[:, 1], f"file:{path}")

    @classmethod
    def parse(cls, text: str) -> "ConfinementSpec":
        """``r^2``, ``r^4``, ``r^p:<p>`` or ``file:<csv>``."""
        if text.startswith("file:"):
            return cls.from_csv(text[5:])
        if text.startswith("r^p:"):
            return cls.power_law(float(text[4:]))
        if text.startswith("r^"):
            return cls.power_law(float(text[2:]))
        raise DomainError(f"cannot parse potential {text!r}")

    @property
    def r_max(self) -> float:
        return math.inf if self.kind == "power_law" else self.table_r[-1]

    def _spline(self):
        return _table_spline(self.table_r, self.table_v)

    def V(self, r, nu: int = 0):
        """Potential (``nu = 0``) or its ``nu``-th radial derivative."""
        r = np.asarray(r, dtype=float)
        if self.kind == "power_law":
            p, c = self.p, self.strength
            coef = c * math.prod(p - k for k in range(nu))
            with np.errstate(divide="ignore"):
                return coef * r ** (p - nu)
        if np.any(r > self.r_max * (1 + 1e-12)):
            raise DomainError(f"potential table ends at r={self.r_max}, needed {float(np.max(r))}")
        return self._spline()(r, nu)

    def laplacian(self, r):
        r = np.asarray(r, dtype=float)
        if self.kind == "power_law":
            return self.strength * self.p**2 * r ** (self.p - 2)
        return self.V(r, 2) + self.V(r, 1) / r


@lru_cache(maxsize=8)
def _table_spline(r, v):
    return CubicSpline(np.array(r), np.array(v))


@lru_cache(maxsize=4)
def _unit_operator(order: int, n_bulk: int, levels: int):
    """Operator on ``[0, 1]``; by homogeneity ``M_R = R * M_1`` at scaled nodes."""
    op = PanelOperator(graded_breaks(1.0, n_bulk, levels), order)
    return op, op.matrix(op.nodes), op.matrix([1.0], ring_kernel_dr)[0]


@dataclass(frozen=True)
class TFDotSolution:
    confinement: ConfinementSpec
    mu_global: float
    support_radius: float
    grid: RadialGrid
    mu_plus: np.ndarray
    W_prime_at_R: float
    residual: float
    tol: float
    nodes: np.ndarray = field(repr=False)
    node_values: np.ndarray = field(repr=False)
    _op: PanelOperator = field(default=None, repr=False, compare=False)

    d = 2
    q = 1.0

    @property
    def R(self) -> float:
        return self.support_radius

    def mu_plus_at(self, r):
        r = np.asarray(r, dtype=float)
        flat = np.atleast_1d(r)
        out = np.zeros(flat.shape)
        inside = flat < self.R
        if inside.any():
            out[inside] = np.maximum(self._op.interpolate(self.node_values, flat[inside] / self.R), 0.0)
        return out.reshape(r.shape)

    def mu_plus_prime_at(self, r):
        """Derivative from the panel interpolant (zero outside the support)."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        h = 1e-6 * self.R
        inside = r < self.R
        lo = np.clip(r - h, 0.0, self.R)
        hi = np.clip(r + h, 0.0, self.R)
        vals = (self._op.interpolate(self.node_values, hi / self.R)
                - self._op.interpolate(self.node_values, lo / self.R)) / (hi - lo)
        return np.where(inside, vals, 0.0)

    def hartree_at(self, r):
        """``(1/2pi) int mu_plus(y) / |x - y| d^2y`` at radii ``r``."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        M = self._op.matrix(r / self.R)
        return self.R * (M @ self.node_values) / TWO_PI

    def potential_at(self, r):
        return self.confinement.V(r) + self.hartree_at(r)

    def local_mu_at(self, r):
        """``mu - W(r)``: the profile inside the support, the field outside."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        out = self.mu_plus_at(r)
        far = r >= self.R
        if far.any():
            out[far] = self.mu_global - self.potential_at(r[far])
        return out

    def disk_integral(self, fn) -> float:
        """``int_{|x|<R} fn(mu_plus(x), r) d^2x`` on the solver nodes."""
        r, w = self.nodes, self._op.weights * self.R
        return TWO_PI * math.fsum(w * r * fn(np.maximum(self.node_values, 0.0), r))


def _solve_fixed_radius(conf: ConfinementSpec, R: float, op, M1):
    n = op.nodes.size
    r = R * op.nodes
    A = np.zeros((n + 1, n + 1))
    A[:n, :n] = np.eye(n) + (R / TWO_PI) * M1
    A[:n, n] = -1.0
    A[n, :n] = R * op.weights * r
    rhs = np.append(-conf.V(r), 1.0)
    x = np.linalg.solve(A, rhs)
    f, mu = x[:n], x[n]
    edge = float(op.interpolate(f, [1.0])[0])
    return f, mu, edge, A


def dot_self_consistency_defect(sol: TFDotSolution, r: np.ndarray, spec: QuadratureSpec | None = None) -> np.ndarray:
    """Defect of the TF equation at radii ``r`` with the Coulomb term redone
    by adaptive quadrature of the interpolated profile."""
    spec = spec or QuadratureSpec(rel_tol=1e-12, abs_tol=1e-13)
    out = []
    for x in np.atleast_1d(r):
        coul = coulomb_radial_2d(sol.mu_plus_at, float(x), sol.R, spec) / TWO_PI
        rhs = sol.mu_global - sol.confinement.V(x) - coul
        out.append(float(sol.mu_plus_at(x)) - max(rhs, 0.0))
    return np.array(out)


def solve_tf_dot_radial(conf: ConfinementSpec, grid: RadialGrid | int | None = None, tol: float = 1e-8,
                        order: int = 10, n_bulk: int = 8, levels: int = 18, probes: int = 12) -> TFDotSolution:
    """Solve the dot TF equations for a radial confinement.

    ``grid`` is either a RadialGrid on which to sample the profile or a node
    count for a grid uniform in ``r**2`` on the found support.
    """
    if not tol > 0:
        raise ValueError("tol must be positive")
    op, M1, dM1 = _unit_operator(order, n_bulk, levels)

    def edge_value(R):
        return _solve_fixed_radius(conf, R, op, M1)[2]

    # without interaction: strength R**(p+2) (1/2 - 1/(p+2)) = 1 for power laws
    if conf.kind == "power_law":
        R0 = (1.0 / (conf.strength * (0.5 - 1.0 / (conf.p + 2.0)))) ** (1.0 / (conf.p + 2.0))
    else:
        R0 = 0.25 * conf.r_max
    lo, hi = R0, 2.0 * R0
    for _ in range(60):
        if edge_value(lo) > 0:
            break
        lo *= 0.5
    for _ in range(60):
        if edge_value(hi) < 0 or hi > conf.r_max:
            break
        lo, hi = hi, 2.0 * hi
    if hi > conf.r_max:
        hi = conf.r_max
    if not (edge_value(lo) > 0 > edge_value(hi)):
        raise ConvergenceError("could not bracket the support radius", float("nan"))
    R = brentq(edge_value, lo, hi, xtol=1e-15, maxiter=200)
    f, mu, edge, A = _solve_fixed_radius(conf, R, op, M1)
    cond = np.linalg.cond(A)
    if not np.isfinite(cond) or cond > 1e12:
        raise ConvergenceError(f"ill-conditioned Nyström system (cond {cond:.2e})")
    r_nodes = R * op.nodes
    W_prime = float(conf.V(R, 1) + (dM1 @ f) / TWO_PI)

    if grid is None or isinstance(grid, int):
        grid = r2_grid(R, 400 if grid is None else grid)
    tmp = TFDotSolution(conf, float(mu), float(R), grid, np.zeros(0), W_prime, 0.0, tol,
                        r_nodes, f, op)
    mu_plus = tmp.mu_plus_at(grid.nodes)
    probe_r = R * np.sqrt((np.arange(probes) + 0.5) / probes)
    residual = float(np.max(np.abs(dot_self_consistency_defect(tmp, probe_r))))
    if np.any(f < -tol):
        raise ConvergenceError("negative density inside the support", float(-f.min()))
    if not residual <= tol:
        raise ConvergenceError("dot TF defect above tolerance", residual)
    return TFDotSolution(conf, float(mu), float(R), grid, mu_plus, W_prime, residual, tol,
                         r_nodes, f, op)
