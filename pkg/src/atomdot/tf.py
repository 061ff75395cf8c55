"""Quantities shared by atom and dot TF solutions, and profile CSV files."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from .grids import RadialGrid, ScalingContext, cubic_moment_weights
from .numerics import DomainError, QuadratureSpec, integrate_1d

PROFILE_COLUMNS = ("r", "mu_plus", "mu_plus_prime")


def _check_context(sol, ctx: ScalingContext):
    if sol.d != ctx.d:
        raise DomainError(f"solution is {sol.d}D but the context is {ctx.d}D")
    if abs(sol.q - ctx.q) > 1e-12:
        raise DomainError(f"context ratio N/Z = {ctx.q} differs from the solution's q = {sol.q}")


def integrated_dos(sol, e: float, ctx: ScalingContext, spec: QuadratureSpec | None = None) -> float:
    """Semiclassical count ``(alpha_d / eps**d) int (e - W)_+^(d/2) d^dx``.

    Returns ``inf`` for a neutral atom at ``e >= 0`` (unbounded allowed region).
    """
    _check_context(sol, ctx)
    spec = spec or QuadratureSpec(rel_tol=1e-11, abs_tol=0.0)
    d = sol.d
    shift = e - sol.mu_global  # (e - W) = shift + local_mu

    def excess(r):
        return shift + sol.local_mu_at(r)

    if d == 3:
        if e >= 0.0:
            return math.inf  # the allowed region reaches infinity
        hi = 1.0
        while excess(np.array([hi]))[0] > 0:
            hi *= 2.0
        r_cut = brentq(lambda x: float(excess(np.array([x]))[0]), 1e-300, hi, xtol=1e-300, rtol=1e-15)

        def integrand(t):
            r = np.exp(t)
            return r**3 * np.maximum(excess(r), 0.0) ** 1.5

        # below r = 1e-14 the integrand is r**1.5 and contributes < 1e-21
        val = integrate_1d(integrand, math.log(1e-14), math.log(r_cut), spec, singular="right").value
        surface = 4.0 * math.pi
    else:
        R = sol.R
        val = integrate_1d(lambda r: r * np.maximum(shift + sol.mu_plus_at(r), 0.0), 0.0, R, spec).value
        if shift > 0:
            hi = 2.0 * R
            while excess(np.array([hi]))[0] > 0:
                hi *= 2.0
            r_cut = brentq(lambda x: float(excess(np.array([x]))[0]), R, hi, xtol=1e-14)
            outer = QuadratureSpec(rel_tol=1e-9, abs_tol=0.0, max_evals=3000)
            val += integrate_1d(lambda r: r * np.maximum(excess(r), 0.0), R, r_cut, outer).value
        surface = 2.0 * math.pi
    return ctx.alpha_d / ctx.epsilon**d * surface * val


@dataclass(frozen=True)
class TFEnergy:
    reduced: float  # density-functional value per eps**-d
    rescaled: float  # energy of the rescaled Hamiltonian
    original: float  # energy of the original Hamiltonian (scaled units)
    hartree: float | None


def tf_energy(sol, ctx: ScalingContext) -> TFEnergy:
    """TF energy ``q mu / 2 + alpha_d [int V mu_+^(d/2) + (d-2)/(d+2) int mu_+^(d/2+1)]``.

    The form follows from the TF functional after eliminating the Hartree
    term with the self-consistency condition.
    """
    _check_context(sol, ctx)
    if not sol.residual <= sol.tol:
        raise DomainError("solution residual exceeds its tolerance")
    d = sol.d
    if d == 3:
        pot = sol.radial_integral(lambda m, r: -m**1.5 / r) * 4.0 * math.pi
        kin = sol.radial_integral(lambda m, r: m**2.5) * 4.0 * math.pi
    else:
        V = sol.confinement.V
        pot = sol.disk_integral(lambda m, r: V(r) * m)
        kin = 0.0
    reduced = 0.5 * sol.q * sol.mu_global + ctx.alpha_d * (pot + (d - 2) / (d + 2) * kin)
    rescaled = reduced / ctx.epsilon**d
    original = rescaled * ctx.energy_scale
    unit = ctx.energy_unit_hartree
    return TFEnergy(reduced, rescaled, original, None if unit is None else original * unit)


# --------------------------------------------------------------------------
# profile files


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def write_profile(sol, path) -> None:
    """CSV with ``#`` header lines and columns ``r,mu_plus,mu_plus_prime``."""
    r = sol.grid.nodes
    if sol.d == 3:
        prime = sol.mu_plus_prime
        meta = {"d": 3, "q": _fmt(sol.q)}
    else:
        prime = sol.mu_plus_prime_at(r)
        meta = {"d": 2, "confinement": sol.confinement.description,
                "support_radius": _fmt(sol.support_radius), "W_prime_at_R": _fmt(sol.W_prime_at_R)}
    meta.update(mu_global=_fmt(sol.mu_global), residual=_fmt(sol.residual), tol=_fmt(sol.tol),
                grid_size=r.size, stretch=sol.grid.stretch)
    if sol.d == 3:
        meta.update(origin_coeff=_fmt(sol.origin_coeff), support_radius=_fmt(sol.support_radius),
                    tail_coeff="none" if sol.tail_coeff is None else _fmt(sol.tail_coeff))
    lines = [f"# {k} = {v}" for k, v in meta.items()]
    lines.append(",".join(PROFILE_COLUMNS))
    lines += [f"{_fmt(a)},{_fmt(b)},{_fmt(c)}" for a, b, c in zip(r, sol.mu_plus, prime)]
    Path(path).write_text("\n".join(lines) + "\n")


@dataclass(frozen=True)
class LoadedProfile:
    """A profile read back from CSV; interpolates with a cubic Hermite
    spline of ``r mu_plus`` in ``ln r``."""

    meta: dict
    r: np.ndarray
    mu_plus: np.ndarray
    mu_plus_prime: np.ndarray

    @property
    def d(self) -> int:
        return int(self.meta["d"])

    def _spline(self):
        t = np.log(self.r)
        chi = self.r * self.mu_plus
        dchi_dt = self.r * (self.mu_plus + self.r * self.mu_plus_prime)
        return CubicHermiteSpline(t, chi, dchi_dt, extrapolate=False)

    def mu_plus_at(self, r):
        r = np.asarray(r, dtype=float)
        chi = self._spline()(np.log(r))
        out = np.where(np.isnan(chi), 0.0, chi) / r
        # beyond the table: the r**-4 tail for atoms, zero for dots
        far = r > self.r[-1]
        if self.d == 3 and np.any(far):
            out = np.where(far, self.mu_plus[-1] * (self.r[-1] / r) ** 4, out)
        near = r < self.r[0]
        if np.any(near):
            out = np.where(near, self.r[0] * self.mu_plus[0] / r if self.d == 3 else self.mu_plus[0], out)
        return np.maximum(out, 0.0)

    def grid(self) -> RadialGrid:
        moment = 2 if self.d == 3 else 1
        return RadialGrid(self.r, cubic_moment_weights(self.r, moment), self.meta.get("stretch", ""), moment)


def read_profile(path) -> LoadedProfile:
    meta, rows = {}, []
    with open(path) as fh:
        header_seen = False
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
                continue
            if not header_seen:
                if tuple(c.strip() for c in line.split(",")) != PROFILE_COLUMNS:
                    raise ValueError(f"{path}:{lineno}: expected header {','.join(PROFILE_COLUMNS)}")
                header_seen = True
                continue
            try:
                rows.append([float(x) for x in line.split(",")])
            except ValueError:
                raise ValueError(f"{path}:{lineno}: malformed row {line!r}") from None
    data = np.array(rows, dtype=float).reshape(-1, 3)
    return LoadedProfile(meta, data[:, 0], data[:, 1], data[:, 2])
