"""Scaling bookkeeping and radial grids."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import Polynomial


def sphere_surface(d: int) -> float:
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


@dataclass(frozen=True)
class ScalingContext:
    """Dimension, charges and unit conversions of the rescaled Hamiltonian.

    Lengths are rescaled by ``Z**(2/d - 1)`` and energies by
    ``Z**(2 - 2/d)``; ``epsilon = Z**(-1/d)`` plays the role of hbar.
    """

    d: int
    Z: float
    N: float
    energy_unit_hartree: float | None = None

    def __post_init__(self):
        if self.d not in (2, 3):
            raise ValueError("d must be 2 or 3")
        if self.Z <= 0 or self.N <= 0:
            raise ValueError("Z and N must be positive")
        if not 0 < self.q <= 1 + 1e-15:
            raise ValueError(f"N/Z = {self.q} outside (0, 1]")

    @classmethod
    def atom(cls, Z: float, N: float | None = None) -> "ScalingContext":
        return cls(3, float(Z), float(Z if N is None else N), 2.0)

    @classmethod
    def dot(cls, N: float) -> "ScalingContext":
        return cls(2, float(N), float(N), None)

    @property
    def q(self) -> float:
        return self.N / self.Z

    @property
    def epsilon(self) -> float:
        return self.Z ** (-1.0 / self.d)

    @property
    def S_d(self) -> float:
        return sphere_surface(self.d)

    @property
    def alpha_d(self) -> float:
        return self.S_d / (self.d * (2 * math.pi) ** self.d)

    @property
    def energy_scale(self) -> float:
        """Factor taking a scaled energy to the original Hamiltonian."""
        return self.Z ** (2.0 - 2.0 / self.d)


@dataclass(frozen=True)
class RadialGrid:
    nodes: np.ndarray
    weights: np.ndarray
    stretch: str
    moment: int = field(default=2)

    def __post_init__(self):
        if self.nodes.ndim != 1 or self.nodes.size < 4:
            raise ValueError("a radial grid needs at least 4 nodes")
        if not self.nodes[0] >= 0 or np.any(np.diff(self.nodes) <= 0):
            raise ValueError("grid nodes must be strictly increasing and non-negative")

    def __len__(self):
        return self.nodes.size

    def integrate(self, values) -> float:
        """``int_0^rmax values(r) r**moment dr``."""
        return float(np.dot(self.weights, values))


def cubic_moment_weights(nodes: np.ndarray, moment: int) -> np.ndarray:
    """Weights exact for ``int_0^{r_n} p(r) r**moment dr`` when ``p`` is a
    cubic; panels of three intervals, the first panel extrapolated to 0."""
    n = nodes.size
    w = np.zeros(n)
    starts = list(range(0, n - 3, 3))
    covered = starts[-1] + 3
    pieces = [(s, nodes[s], nodes[s + 3]) for s in starts]
    pieces[0] = (0, 0.0, nodes[3])
    if covered < n - 1:
        pieces.append((n - 4, nodes[covered], nodes[-1]))
    for s, lo, hi in pieces:
        x = nodes[s:s + 4]
        c, h = 0.5 * (x[0] + x[-1]), 0.5 * (x[-1] - x[0])
        xs = (x - c) / h
        weight_poly = Polynomial([c, h]) ** moment
        for j in range(4):
            others = np.delete(xs, j)
            basis = Polynomial.fromroots(others) / np.prod(xs[j] - others)
            anti = (basis * weight_poly).integ()
            w[s + j] += h * (anti((hi - c) / h) - anti((lo - c) / h))
    return w


def log_grid(r_min: float = 1e-6, r_max: float = 1e4, n: int = 2000) -> RadialGrid:
    nodes = np.geomspace(r_min, r_max, n)
    return RadialGrid(nodes, cubic_moment_weights(nodes, 2), f"log[{r_min:g},{r_max:g}]x{n}", 2)


def r2_grid(r_max: float, n: int = 400) -> RadialGrid:
    """Uniform in ``r**2`` on ``(0, r_max]`` with weights for ``r dr``."""
    nodes = r_max * np.sqrt(np.linspace(0.0, 1.0, n + 1)[1:])
    return RadialGrid(nodes, cubic_moment_weights(nodes, 1), f"r2[0,{r_max:g}]x{n}", 1)


def panel_nodes(breaks, order: int) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights (plain ``dr``) on consecutive panels."""
    x, w = np.polynomial.legendre.leggauss(order)
    breaks = np.asarray(breaks, dtype=float)
    lo, hi = breaks[:-1, None], breaks[1:, None]
    nodes = 0.5 * (lo + hi) + 0.5 * (hi - lo) * x
    weights = 0.5 * (hi - lo) * w
    return nodes.ravel(), weights.ravel()


def graded_breaks(R: float, n_bulk: int = 8, levels: int = 18, ratio: float = 0.5) -> np.ndarray:
    """Panel breakpoints on ``[0, R]``: uniform on ``[0, R/2]``, then
    geometrically refined towards the edge ``R``."""
    bulk = np.linspace(0.0, 0.5 * R, n_bulk + 1)
    gaps = 0.5 * R * ratio ** np.arange(1, levels + 1)
    edge = R - gaps
    return np.concatenate([bulk, edge, [R]])
