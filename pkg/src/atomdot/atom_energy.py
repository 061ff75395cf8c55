"""Smooth Hartree-exchange expansion and leading correlation energy of atoms.

Scaled energies ``E`` convert to hartrees as ``Z**(4/3) * E * 2``.  All
correlation pieces are stored as contributions to ``-E_c``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.fft import fht, fhtoffset

from .constants import universal_bracket
from .numerics import DomainError, QuadratureSpec
from .tf_atom import TFAtomSolution, log_panels, solve_tf_atom

HARTREE_PER_UNIT = 2.0

LOG_COEFF = 0.03109
CONST_BASE = 0.03700
XA_COEFF = 0.01979
XB_COEFF = 0.01027
EC2_CONST = 0.06390
# coefficient of Z^(-1/3) int r dr int_0^r s^2 ds mu(r) mu(s) in -E_c;2
EC2_COEFF = 4.0 / math.pi**4
EC2_COEFF_PRINTED = 2.0 * (2.0 * math.pi) ** 3 / 3.0

HX_DEFAULTS = {"c7": -0.7687, "c6": -0.5, "c5": -0.2699}
XB_SIGN_NOTE = "x_b = 0.01027 * B as printed; the X_lin chain carries -B/(2 pi)"

_R_LO = 1e-14
_R_HI = 1e9
_PANELS = 400


@dataclass(frozen=True)
class RadialProfile:
    """A prescribed ``mu_plus(r)``, for probes and tests of the integrals."""

    mu: Callable
    dmu: Callable | None = None
    support_radius: float = math.inf
    q: float = 1.0

    def mu_plus_at(self, r):
        r = np.asarray(r, dtype=float)
        return np.where(r < self.support_radius, np.maximum(self.mu(r), 0.0), 0.0)

    def mu_plus_prime_at(self, r):
        r = np.asarray(r, dtype=float)
        if self.dmu is None:
            h = 1e-6 * r
            return (self.mu_plus_at(r + h) - self.mu_plus_at(r - h)) / (2 * h)
        return np.where(r < self.support_radius, self.dmu(r), 0.0)


def _check_profile(sol):
    if isinstance(sol, TFAtomSolution):
        if not sol.residual <= sol.tol:
            raise DomainError("atom profile is not solved to its tolerance")
    elif not hasattr(sol, "mu_plus_at"):
        raise DomainError("expected a solved atom profile")


def _nodes(sol, panels: int = _PANELS):
    r_hi = min(getattr(sol, "support_radius", math.inf), _R_HI)
    return log_panels(_R_LO, r_hi, panels)


def _xlogx(m):
    safe = np.where(m > 0, m, 1.0)
    return np.where(m > 0, m**1.5 * 0.5 * np.log(safe), 0.0)


def atom_A_integral(sol, spec: QuadratureSpec | None = None, panels: int = _PANELS) -> float:
    """``A = int_0^inf dr r^2 mu_+^(3/2) ln mu_+^(1/2)`` (``0 ln 0 = 0``)."""
    _check_profile(sol)
    r, w = _nodes(sol, panels)
    return math.fsum(w * r**2 * _xlogx(sol.mu_plus_at(r)))


# --------------------------------------------------------------------------
# B = int dt int dp ln(p) g(p, t)^2


@dataclass(frozen=True)
class BIntegral:
    value: float
    t_min: float
    t_max: float
    small_t_exponent: float  # d ln(inner) / d ln t near t_min
    divergent: bool
    note: str = ""


class _GTransform:
    """``g(p, t)`` on a log-spaced ``p`` grid by a fast Hankel transform.

    With ``cos(x) - sin(x)/x = -x j_1(x)`` and ``j_1(x) = sqrt(pi/(2x)) J_{3/2}(x)``,
    ``g(p, t) = -sqrt(pi/2) p**-1/2 int a(r) J_{3/2}(p r) p dr`` with
    ``a = r**1.5 mu_+' exp(-t mu_+**1/2)``.
    """

    order = 1.5

    def __init__(self, sol, n: int = 4096, r_lo: float = 1e-12, r_hi: float = 1e7):
        lo, hi = math.log(r_lo), math.log(r_hi)
        self.dln = (hi - lo) / n
        self.offset = fhtoffset(self.dln, self.order)
        r = np.exp(0.5 * (lo + hi) + self.dln * (np.arange(n) - 0.5 * (n - 1)))
        self.p = math.exp(self.offset) / r[::-1]
        self.sqrt_mu = np.sqrt(sol.mu_plus_at(r))
        self.base = r**1.5 * sol.mu_plus_prime_at(r)

    def g(self, t: float) -> np.ndarray:
        a = self.base * np.exp(-t * self.sqrt_mu)
        return -math.sqrt(math.pi / 2) * fht(a, self.dln, self.order, offset=self.offset) / np.sqrt(self.p)

    def inner(self, t: float) -> float:
        """``int_0^inf dp ln(p) g(p, t)^2`` on the log grid."""
        g = self.g(t)
        return math.fsum(np.log(self.p) * g * g * self.p) * self.dln


def g_direct(sol, p: float, t: float, panels: int = 2000) -> float:
    """``g(p, t)`` by plain Gauss panels in ``ln r`` (slow; for cross-checks
    at moderate ``p``)."""
    r, w = log_panels(_R_LO, 1e7, panels)
    x = p * r
    xs = np.where(x < 1e-2, 1.0, x)
    bracket = np.where(x < 1e-2, -x**2 / 3 + x**4 / 30 - x**6 / 840, np.cos(xs) - np.sin(xs) / xs)
    h = r * sol.mu_plus_prime_at(r) * np.exp(-t * np.sqrt(sol.mu_plus_at(r)))
    return math.fsum(w * h * bracket)


def atom_B_integral(sol, spec: QuadratureSpec | None = None, t_min: float = 1e-2,
                    t_max: float = 1e3, t_panels: int = 40) -> BIntegral:
    """``B`` with the ``t`` integral started at ``t_min``.

    The inner ``p`` integral grows like ``t**-2`` as ``t -> 0`` for the TF
    profile, so the full ``t`` integral does not exist; the exponent of that
    growth is measured at ``t_min`` and the result is flagged divergent when
    it is below ``-1``.
    """
    _check_profile(sol)
    if not 0 < t_min < t_max:
        raise ValueError("need 0 < t_min < t_max")
    tr = _GTransform(sol)
    x, w = np.polynomial.legendre.leggauss(10)
    edges = np.linspace(math.log(t_min), math.log(t_max), t_panels + 1)
    total = []
    for a, b in zip(edges[:-1], edges[1:]):
        tt = np.exp(0.5 * (a + b) + 0.5 * (b - a) * x)
        total.append(0.5 * (b - a) * math.fsum(w * tt * np.array([tr.inner(t) for t in tt])))
    lo, hi = tr.inner(t_min), tr.inner(2.0 * t_min)
    if lo == 0.0 and hi == 0.0:
        exponent = 0.0
    else:
        exponent = math.log(abs(hi) / abs(lo)) / math.log(2.0) if lo and hi else -math.inf
    divergent = exponent < -1.0
    note = (f"t integral diverges at 0 (inner ~ t^{exponent:.2f}); value is the t >= {t_min:g} part"
            if divergent else "")
    return BIntegral(math.fsum(total), t_min, t_max, exponent, divergent, note)


def atom_ec2_integral(sol, spec: QuadratureSpec | None = None, panels: int = _PANELS) -> float:
    """``int_0^inf dr r mu_+(r) int_0^r ds s^2 mu_+(s)``."""
    _check_profile(sol)
    r_hi = min(getattr(sol, "support_radius", math.inf), _R_HI)
    edges = np.exp(np.linspace(math.log(_R_LO), math.log(r_hi), panels + 1))
    x, w = np.polynomial.legendre.leggauss(10)
    # nodes of each panel, and for every node a Gauss rule on [panel start, node]
    a, b = np.log(edges[:-1])[:, None], np.log(edges[1:])[:, None]
    t_nodes = 0.5 * (a + b) + 0.5 * (b - a) * x  # (panels, 10)
    r = np.exp(t_nodes)
    wr = 0.5 * (b - a) * w * r
    m = sol.mu_plus_at(r)
    full = (wr * r**2 * m).sum(axis=1)
    before = np.concatenate([[0.0], np.cumsum(full)[:-1]])
    # partial panel [a, t_node]
    half = 0.5 * (t_nodes[:, :, None] - a[:, :, None])
    ts = a[:, :, None] + half * (1.0 + x)
    s = np.exp(ts)
    partial = (half * w * s**3 * sol.mu_plus_at(s)).sum(axis=2)
    inner = before[:, None] + partial
    return math.fsum((wr * r * m * inner).ravel())


@dataclass(frozen=True)
class XLin:
    value: float
    bracket: float
    const_base: float  # bracket / (2 pi^2), the scaled-unit constant 0.03700


def atom_xlin(A: float, B: float, q: float = 1.0) -> XLin:
    """Constant term of ``X_eps``."""
    br = universal_bracket()
    value = q * (2 * math.pi) ** 5 * br + 0.5 * (4 * math.pi) ** 4 * ((1 - math.log(2.0)) * A - B / (2 * math.pi))
    return XLin(value, br, br / (2 * math.pi**2))


# --------------------------------------------------------------------------


@dataclass(frozen=True)
class AtomCorrelationBreakdown:
    N: float
    Z: float
    log_coeff: float
    const_base: float
    A_value: float
    B_value: float
    x_a: float
    x_b: float
    ec2_const: float
    ec2_integral: float
    x_unknown: float = 0.0
    ec2_coeff: float = EC2_COEFF
    B_divergent: bool = False
    B_t_min: float = math.nan
    notes: tuple = ()
    hartree: dict = field(default_factory=dict)

    @property
    def q(self) -> float:
        return self.N / self.Z

    def scaled_terms(self) -> dict:
        """Contributions to ``-E_c`` in scaled units."""
        Z, q = self.Z, self.q
        return {
            "log": self.log_coeff * q * Z ** (-1 / 3) * math.log(Z ** (1 / 3)),
            "const_base": Z ** (-1 / 3) * self.const_base * q,
            "x_a": Z ** (-1 / 3) * self.x_a,
            "x_b": Z ** (-1 / 3) * self.x_b,
            "x": Z ** (-1 / 3) * self.x_unknown,
            "ec2_const": self.ec2_const * q * Z ** (-1 / 3),
            "ec2_integral": -Z ** (-1 / 3) * self.ec2_coeff * self.ec2_integral,
        }

    def hartree_terms(self) -> dict:
        scale = self.Z ** (4 / 3) * HARTREE_PER_UNIT
        return {k: v * scale for k, v in self.scaled_terms().items()}

    def per_electron_hartree(self) -> dict:
        return {k: v / self.N for k, v in self.hartree_terms().items()}

    def minus_ec_hartree(self) -> float:
        return math.fsum(self.hartree_terms().values())

    @property
    def log_slope(self) -> dict:
        """Hartree coefficient of the log term at ``N = Z`` in both readings."""
        per_cuberoot = HARTREE_PER_UNIT * self.log_coeff
        return {"per-lnN^(1/3)": per_cuberoot, "per-lnN": per_cuberoot / 3.0}


def atom_correlation(N: float, Z: float, x_unknown: float = 0.0, sol: TFAtomSolution | None = None,
                     spec: QuadratureSpec | None = None, t_min: float = 1e-2) -> AtomCorrelationBreakdown:
    if not (N > 0 and Z > 0):
        raise DomainError("N and Z must be positive")
    q = N / Z
    if sol is None:
        sol = solve_tf_atom(q)
    elif abs(sol.q - q) > 1e-12:
        raise DomainError(f"profile has q = {sol.q}, but N/Z = {q}")
    A = atom_A_integral(sol, spec)
    B = atom_B_integral(sol, spec, t_min=t_min)
    I = atom_ec2_integral(sol, spec)
    notes = ["x is not computed; supplied value used (default 0)", XB_SIGN_NOTE]
    if B.divergent:
        notes.append(B.note)
    return AtomCorrelationBreakdown(
        N=N, Z=Z, log_coeff=LOG_COEFF, const_base=CONST_BASE, A_value=A, B_value=B.value,
        x_a=XA_COEFF * A, x_b=XB_COEFF * B.value, ec2_const=EC2_CONST, ec2_integral=I,
        x_unknown=x_unknown, B_divergent=B.divergent, B_t_min=t_min, notes=tuple(notes),
    )


@dataclass(frozen=True)
class AtomSmoothHX:
    """``sum_j c_j N^(j/3) + c_0 N ln N`` in hartrees."""

    N: float
    c7: float = HX_DEFAULTS["c7"]
    c6: float = HX_DEFAULTS["c6"]
    c5: float = HX_DEFAULTS["c5"]
    c4: float | None = None
    c3: float | None = None
    c0: float | None = None

    @property
    def terms(self) -> dict:
        N = self.N
        out = {"c7": self.c7 * N ** (7 / 3), "c6": self.c6 * N**2, "c5": self.c5 * N ** (5 / 3)}
        if self.c4 is not None:
            out["c4"] = self.c4 * N ** (4 / 3)
        if self.c3 is not None:
            out["c3"] = self.c3 * N
        if self.c0 is not None:
            out["c0"] = self.c0 * N * math.log(N)
        return out

    @property
    def total(self) -> float:
        return math.fsum(self.terms.values())


def atom_smooth_hx(N: float, overrides: dict | None = None) -> AtomSmoothHX:
    if not N >= 1:
        raise DomainError("N must be >= 1")
    overrides = dict(overrides or {})
    unknown = set(overrides) - {"c7", "c6", "c5", "c4", "c3", "c0"}
    if unknown:
        raise DomainError(f"unknown coefficients {sorted(unknown)}")
    return AtomSmoothHX(N, **overrides)
