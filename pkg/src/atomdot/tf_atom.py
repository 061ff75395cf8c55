"""Thomas-Fermi atoms and positive ions in scaled units.

With ``mu_plus(r) = chi(r) / r`` and ``chi(r) = phi(r / b)``,
``b = (3 pi / 4)**(2/3)``, the self-consistent equation becomes the universal
equation ``phi'' = phi**1.5 / sqrt(x)`` with ``phi(0) = 1``.

The neutral solution is integrated inwards from its large-``x`` expansion
and then rescaled, using that ``s**3 psi(s x)`` solves the same equation
whenever ``psi`` does.  Ions are found by shooting on the initial slope.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from .grids import RadialGrid, log_grid
from .numerics import ConvergenceError, DomainError

B_SCALE = (3.0 * math.pi / 4.0) ** (2.0 / 3.0)
ALPHA3 = 1.0 / (6.0 * math.pi**2)
# exponent of the leading correction to the 144/x**3 tail
TAIL_EXPONENT = (math.sqrt(73.0) - 7.0) / 2.0
TAIL_LIMIT = 81.0 * math.pi**2

_X_FAR = 1e10
_X_NEAR = 1e-16
_F_TAIL = 13.27

# Gauss-Legendre rule reused for all log-variable quadratures
_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)


class _UniversalCurve:
    """``phi`` and ``phi'`` of the universal equation, vectorized in ``x``."""

    def __init__(self, evaluate: Callable, x_zero: float, slope0: float):
        self._evaluate = evaluate
        self.x_zero = x_zero  # first zero of phi; inf for the neutral atom
        self.slope0 = slope0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        phi = np.zeros_like(x)
        dphi = np.zeros_like(x)
        inside = x < self.x_zero
        if inside.any():
            phi[inside], dphi[inside] = self._evaluate(x[inside])
        return phi, dphi


def _neutral_curve(rtol: float) -> _UniversalCurve:
    def rhs(t, y):
        x = math.exp(t)
        return [x * y[1], math.sqrt(x) * max(y[0], 0.0) ** 1.5]

    lam = TAIL_EXPONENT
    X = _X_FAR
    y0 = [144.0 / X**3 * (1.0 - _F_TAIL * X**-lam),
          -432.0 / X**4 + 144.0 * _F_TAIL * (3.0 + lam) * X ** (-4.0 - lam)]
    ode = solve_ivp(rhs, [math.log(X), math.log(_X_NEAR)], y0, method="DOP853",
                    rtol=rtol, atol=1e-300, dense_output=True)
    if not ode.success:
        raise ConvergenceError(f"inward integration failed: {ode.message}")
    psi0 = ode.y[0, -1]
    s = psi0 ** (-1.0 / 3.0)
    # drop the sqrt(x) term of phi' still present at the inner end point
    slope0 = s**4 * ode.y[1, -1] - 2.0 * math.sqrt(s * _X_NEAR)
    def evaluate(x):
        sx = s * x
        phi = np.empty_like(x)
        dphi = np.empty_like(x)
        mid = (sx >= _X_NEAR) & (sx <= X)
        if mid.any():
            y = ode.sol(np.log(sx[mid]))
            phi[mid], dphi[mid] = s**3 * y[0], s**4 * y[1]
        near = sx < _X_NEAR
        if near.any():
            xs = x[near]
            phi[near] = 1.0 + slope0 * xs + (4.0 / 3.0) * xs**1.5
            dphi[near] = slope0 + 2.0 * np.sqrt(xs)
        far = sx > X
        if far.any():
            xs = x[far]
            phi[far] = 144.0 / xs**3
            dphi[far] = -432.0 / xs**4
        return phi, dphi

    return _UniversalCurve(evaluate, math.inf, slope0)


def _shoot(slope: float, rtol: float, y_max: float = 1e4):
    """Integrate from the origin in ``y = sqrt(x)`` until ``phi`` vanishes."""

    def rhs(y, u):
        return [2.0 * y * u[1], 2.0 * max(u[0], 0.0) ** 1.5]

    def hit(y, u):
        return u[0]

    hit.terminal = True
    hit.direction = -1
    return solve_ivp(rhs, [0.0, y_max], [1.0, slope], method="DOP853", rtol=rtol,
                     atol=1e-14, events=hit, dense_output=True)


def _ion_curve(q: float, neutral_slope: float, rtol: float) -> _UniversalCurve:
    target = 1.0 - q

    def escaped_charge(slope):
        ode = _shoot(slope, rtol)
        if not ode.t_events[0].size:
            return -target  # never reaches zero: behaves like the neutral limit
        y0 = ode.t_events[0][0]
        return -(y0 * y0) * ode.y_events[0][0][1] - target

    hi = neutral_slope * (1.0 + 1e-12)
    lo = neutral_slope - 1.0
    while escaped_charge(lo) < 0:
        lo -= 2.0 * (neutral_slope - lo)
    if escaped_charge(hi) > 0:
        raise ConvergenceError(f"ionization ratio q={q} too close to 1 for the shooting bracket")
    slope = brentq(escaped_charge, lo, hi, xtol=1e-15, maxiter=200)
    ode = _shoot(slope, rtol)
    y_zero = ode.t_events[0][0]

    def evaluate(x):
        u = ode.sol(np.sqrt(x))
        return np.maximum(u[0], 0.0), u[1]

    return _UniversalCurve(evaluate, y_zero * y_zero, slope)


def log_panels(lo: float, hi: float, n: int):
    """Nodes and ``dr`` weights of a Gauss rule on ``[lo, hi]`` with panels
    uniform in ``ln r``."""
    t = np.linspace(math.log(lo), math.log(hi), n + 1)
    a, b = t[:-1, None], t[1:, None]
    tt = 0.5 * (a + b) + 0.5 * (b - a) * _GL_X
    r = np.exp(tt)
    w = 0.5 * (b - a) * _GL_W * r
    return r.ravel(), w.ravel()


@dataclass(frozen=True)
class TFAtomSolution:
    q: float
    mu_global: float
    grid: RadialGrid
    mu_plus: np.ndarray
    mu_plus_prime: np.ndarray
    origin_coeff: float
    tail_coeff: float | None
    residual: float
    tol: float
    support_radius: float = math.inf
    _chi: Callable = field(default=None, repr=False, compare=False)

    d = 3

    def chi(self, r):
        """``r mu_plus(r)`` and its derivative."""
        return self._chi(np.asarray(r, dtype=float))

    def mu_plus_at(self, r):
        r = np.asarray(r, dtype=float)
        return self.chi(r)[0] / r

    def mu_plus_prime_at(self, r):
        r = np.asarray(r, dtype=float)
        c, dc = self.chi(r)
        return dc / r - c / r**2

    def local_mu_at(self, r):
        """``mu - W(r)``; continues below zero outside an ion."""
        r = np.asarray(r, dtype=float)
        inside = r < self.support_radius
        outside = self.mu_global + (1.0 - self.q) / r
        return np.where(inside, self.mu_plus_at(np.where(inside, r, 1.0)), outside)

    def potential_at(self, r):
        """Self-consistent potential ``W(r) = mu - mu(r)``."""
        return self.mu_global - self.local_mu_at(r)

    def radial_integral(self, fn: Callable, r_lo: float = 1e-14, r_hi: float | None = None,
                        panels: int = 400) -> float:
        """``int r**2 fn(mu_plus(r), r) dr`` over the support."""
        r_hi = min(self.support_radius, 1e9) if r_hi is None else r_hi
        r, w = log_panels(r_lo, r_hi, panels)
        return math.fsum(w * r**2 * fn(self.mu_plus_at(r), r))


def _chi_from_curve(curve: _UniversalCurve):
    def chi(r):
        phi, dphi = curve(r / B_SCALE)
        return phi, dphi / B_SCALE
    return chi


def self_consistency_defect(sol: TFAtomSolution, r: np.ndarray) -> np.ndarray:
    """``r * (mu(r) - [mu + 1/r - 2 alpha_3 (rho * 1/|x|)(r)])`` at the given
    radii, with ``rho = mu_plus**1.5`` integrated independently of the ODE."""
    r = np.asarray(r, dtype=float)
    r_end = min(sol.support_radius, 1e6)
    lo = min(1e-14, r.min() * 1e-3)
    cuts = np.unique(np.concatenate([[lo], np.clip(r, lo, r_end), [r_end]]))
    a, b = np.log(cuts[:-1])[:, None], np.log(cuts[1:])[:, None]
    tt = 0.5 * (a + b) + 0.5 * (b - a) * _GL_X
    s = np.exp(tt)
    w = 0.5 * (b - a) * _GL_W * s
    rho = sol.mu_plus_at(s) ** 1.5
    inner_pieces = (w * s**2 * rho).sum(axis=1)
    outer_pieces = (w * s * rho).sum(axis=1)
    inner = np.concatenate([[0.0], np.cumsum(inner_pieces)])
    outer = np.concatenate([np.cumsum(outer_pieces[::-1])[::-1], [0.0]])
    if sol.support_radius == math.inf:
        # beyond r_end, rho ~ L**1.5 / r**6
        outer = outer + (TAIL_LIMIT**1.5) / (4.0 * r_end**4)
    idx = np.searchsorted(cuts, np.clip(r, lo, r_end))
    hartree = 8.0 * math.pi * ALPHA3 * (inner[idx] + r * outer[idx])
    return r * sol.local_mu_at(r) - r * sol.mu_global - 1.0 + hartree


def _tail_fit(r: np.ndarray, mu_plus: np.ndarray, terms: int = 3) -> float:
    """Limit of ``r**4 mu_plus`` from a fit of ``sum_k c_k r**(-k lambda)``
    on ``r >= 100``."""
    sel = (r >= 100.0) & (mu_plus > 0)
    if sel.sum() < 2 * (terms + 1):
        return float("nan")
    y = r[sel] ** 4 * mu_plus[sel]
    design = np.column_stack([r[sel] ** (-k * TAIL_EXPONENT) for k in range(terms + 1)])
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    return float(coef[0])


def solve_tf_atom(q: float = 1.0, grid: RadialGrid | None = None, tol: float = 1e-8,
                  ode_rtol: float = 1e-13) -> TFAtomSolution:
    """Solve the scaled TF problem for ionization ratio ``q = N / Z``."""
    if not 0.0 < q <= 1.0:
        raise DomainError(f"q must lie in (0, 1], got {q}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    grid = grid or log_grid()
    neutral = _neutral_curve(ode_rtol)
    if q == 1.0:
        curve, mu_global, r_zero = neutral, 0.0, math.inf
    else:
        curve = _ion_curve(q, neutral.slope0, ode_rtol)
        r_zero = B_SCALE * curve.x_zero
        mu_global = -(1.0 - q) / r_zero
    chi = _chi_from_curve(curve)
    r = grid.nodes
    c, dc = chi(r)
    mu_plus = np.maximum(c / r, 0.0)
    mu_prime = np.where(mu_plus > 0, dc / r - c / r**2, 0.0)
    sol = TFAtomSolution(
        q=q, mu_global=mu_global, grid=grid, mu_plus=mu_plus, mu_plus_prime=mu_prime,
        origin_coeff=float(c[0]), tail_coeff=_tail_fit(r, mu_plus) if q == 1.0 else None,
        residual=0.0, tol=tol, support_radius=r_zero, _chi=chi,
    )
    residual = float(np.max(np.abs(self_consistency_defect(sol, r))))
    if not residual <= tol:
        raise ConvergenceError("TF atom self-consistency defect above tolerance", residual)
    return dataclasses.replace(sol, residual=residual)


def normalization(sol: TFAtomSolution) -> float:
    """``2 alpha_3 int mu_plus**1.5 d^3x``; equals ``q`` for a solution."""
    return 8.0 * math.pi * ALPHA3 * sol.radial_integral(lambda m, r: m**1.5)
