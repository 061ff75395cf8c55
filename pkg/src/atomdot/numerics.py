"""Quadrature, seeded Monte Carlo and the special functions used throughout.

Everything here is deterministic: the adaptive rule has a fixed subdivision
order, and Monte Carlo streams are keyed by ``(seed, chunk index)`` so the
result does not depend on how many workers evaluate the chunks.
"""

from __future__ import annotations

import heapq
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np


class IntegrationError(RuntimeError):
    """Raised when an integrand misbehaves inside the integration interval."""


class DomainError(ValueError):
    """Argument outside the mathematical domain of a function."""


class ConvergenceError(RuntimeError):
    """An iterative solve missed its tolerance; carries the last residual."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (residual {residual:.3e})")
        self.residual = residual


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-13
    max_evals: int = 200_000
    mc_samples: int = 1_000_000
    seed: int = 20240611

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be > 0")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be >= 0")
        if self.max_evals < 1 or self.mc_samples < 1:
            raise ValueError("max_evals and mc_samples must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")

    def tolerance(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    evals: int
    converged: bool
    empty_region: bool = False

    def __float__(self):
        return float(self.value)


# --------------------------------------------------------------------------
# adaptive Gauss-Kronrod (7, 15)

_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_WEIGHTS_K = np.concatenate([_WK[:-1], _WK[::-1]])
_WEIGHTS_G = np.zeros(15)
_WEIGHTS_G[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _eval(f, x):
    y = np.asarray(f(x), dtype=float)
    if y.shape != x.shape:
        y = np.broadcast_to(y, x.shape).astype(float)
    bad = ~np.isfinite(y)
    if bad.any():
        raise IntegrationError(f"non-finite integrand value at x = {x[bad][0]!r}")
    return y


def _gk15(f, a, b):
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    y = _eval(f, c + h * _NODES)
    k = h * float(np.dot(_WEIGHTS_K, y))
    g = h * float(np.dot(_WEIGHTS_G, y))
    return k, abs(k - g)


def _vectorize(f):
    def g(x):
        try:
            return f(x)
        except (TypeError, ValueError):
            return np.array([f(float(xi)) for xi in np.ravel(x)]).reshape(np.shape(x))
    return g


def _adaptive(f, a, b, spec: QuadratureSpec) -> IntegralResult:
    value, err = _gk15(f, a, b)
    evals = 15
    heap = [(-err, a, b, value, err)]
    total, total_err = value, err
    while total_err > spec.tolerance(total) and evals + 30 <= spec.max_evals:
        _, lo, hi, v, e = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:  # interval exhausted in floating point
            heapq.heappush(heap, (0.0, lo, hi, v, e))
            break
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        evals += 30
        heapq.heappush(heap, (-e1, lo, mid, v1, e1))
        heapq.heappush(heap, (-e2, mid, hi, v2, e2))
        total += v1 + v2 - v
        total_err += e1 + e2 - e
    total = math.fsum(item[3] for item in heap)
    total_err = math.fsum(item[4] for item in heap)
    return IntegralResult(total, total_err, evals, total_err <= spec.tolerance(total))


def integrate_1d(
    f: Callable,
    a: float,
    b: float,
    spec: QuadratureSpec | None = None,
    singular: str | None = None,
    power: int = 4,
) -> IntegralResult:
    """Adaptive Gauss-Kronrod integral of ``f`` over ``[a, b]``.

    ``b`` may be ``+inf``; the half line is mapped to ``(0, 1)`` with
    ``x = a + u / (1 - u)``.  ``singular`` declares an integrable endpoint
    singularity (``"left"``, ``"right"`` or ``"both"``), absorbed with the
    substitution ``x = a + (b - a) u**power`` (mirrored for the right end).
    ``f`` should accept numpy arrays; scalar-only callables are wrapped.
    """
    spec = spec or QuadratureSpec()
    f = _vectorize(f)
    if singular not in (None, "left", "right", "both"):
        raise ValueError(f"unknown singularity declaration {singular!r}")
    if a == b:
        return IntegralResult(0.0, 0.0, 0, True)
    if b < a:
        r = integrate_1d(f, b, a, spec, {"left": "right", "right": "left"}.get(singular, singular), power)
        return IntegralResult(-r.value, r.error_estimate, r.evals, r.converged, r.empty_region)
    if math.isinf(b):
        if singular in ("right", "both"):
            raise ValueError("a singularity at +inf cannot be declared")
        g = f

        def f(u, g=g, a0=a):
            return g(a0 + u / (1.0 - u)) / (1.0 - u) ** 2

        a, b = 0.0, 1.0
    if singular == "both":
        mid = 0.5 * (a + b)
        r1 = integrate_1d(f, a, mid, spec, "left", power)
        r2 = integrate_1d(f, mid, b, spec, "right", power)
        return IntegralResult(
            r1.value + r2.value, r1.error_estimate + r2.error_estimate,
            r1.evals + r2.evals, r1.converged and r2.converged,
        )
    if singular in ("left", "right"):
        length = b - a
        sign = 1.0 if singular == "left" else -1.0
        origin = a if singular == "left" else b
        g = f

        def f(u, g=g, origin=origin, sign=sign, length=length):
            return g(origin + sign * length * u**power) * (power * length * u ** (power - 1))

        a, b = 0.0, 1.0
    return _adaptive(f, a, b, spec)


def integrate_split(f, points, spec=None, power=4) -> IntegralResult:
    """Sum of ``integrate_1d`` over consecutive breakpoints, each piece
    treated as log/power singular at both ends."""
    spec = spec or QuadratureSpec()
    parts = [integrate_1d(f, lo, hi, spec, "both", power) for lo, hi in zip(points[:-1], points[1:]) if hi > lo]
    return IntegralResult(
        math.fsum(p.value for p in parts), math.fsum(p.error_estimate for p in parts),
        sum(p.evals for p in parts), all(p.converged for p in parts),
    )


# --------------------------------------------------------------------------
# Monte Carlo

MC_CHUNK = 1 << 16


class Sampler(Protocol):
    def draw(self, rng: np.random.Generator, n: int) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(points, inv_density)``; zero inverse density marks a
        rejected sample."""


@dataclass(frozen=True)
class UniformBox:
    lo: tuple
    hi: tuple

    def draw(self, rng, n):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        pts = lo + (hi - lo) * rng.random((n, lo.size))
        return pts, np.full(n, float(np.prod(hi - lo)))


@dataclass(frozen=True)
class UniformBall:
    dim: int
    radius: float = 1.0

    def volume(self) -> float:
        return math.pi ** (self.dim / 2) / math.gamma(self.dim / 2 + 1) * self.radius**self.dim

    def draw(self, rng, n):
        return sample_ball(rng, n, self.dim, self.radius), np.full(n, self.volume())


def sample_ball(rng: np.random.Generator, n: int, dim: int, radius=1.0) -> np.ndarray:
    direction = rng.standard_normal((n, dim))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    rad = radius * rng.random(n) ** (1.0 / dim)
    return direction * rad[:, None]


def chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([seed & 0xFFFFFFFFFFFFFFFF, chunk]))


def integrate_mc(
    f: Callable[[np.ndarray], np.ndarray],
    sampler: Sampler,
    spec: QuadratureSpec | None = None,
    workers: int = 1,
) -> IntegralResult:
    """Importance-sampled Monte Carlo estimate of ``int f``.

    The estimate is ``mean(f(x) * inv_density(x))`` over ``spec.mc_samples``
    draws with a standard-error estimate.  Draws are made in fixed-size
    chunks, each from its own generator seeded by ``(spec.seed, chunk)``.
    """
    spec = spec or QuadratureSpec()
    n_total = spec.mc_samples
    sizes = [MC_CHUNK] * (n_total // MC_CHUNK)
    if n_total % MC_CHUNK:
        sizes.append(n_total % MC_CHUNK)

    def run(item):
        idx, size = item
        rng = chunk_rng(spec.seed, idx)
        pts, w = sampler.draw(rng, size)
        keep = w != 0
        vals = np.zeros(size)
        if keep.any():
            vals[keep] = np.asarray(f(pts[keep]), dtype=float) * w[keep]
        return float(vals.sum()), float(np.dot(vals, vals)), int(keep.sum())

    items = list(enumerate(sizes))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(run, items))
    else:
        parts = [run(item) for item in items]
    s1 = math.fsum(p[0] for p in parts)
    s2 = math.fsum(p[1] for p in parts)
    accepted = sum(p[2] for p in parts)
    if accepted == 0:
        return IntegralResult(0.0, 0.0, n_total, False, empty_region=True)
    mean = s1 / n_total
    var = max(s2 / n_total - mean * mean, 0.0)
    err = math.sqrt(var / max(n_total - 1, 1))
    return IntegralResult(mean, err, n_total, err <= spec.tolerance(mean))


# --------------------------------------------------------------------------
# special functions

def _agm(a, b, extra=None):
    a = np.array(a, dtype=float)
    b = np.array(b, dtype=float)
    for _ in range(64):
        if np.all(np.abs(a - b) <= 1e-16 * a):
            break
        c = 0.5 * (a - b)
        if extra is not None:
            extra.append(c)
        a, b = 0.5 * (a + b), np.sqrt(a * b)
    return a


def elliptic_k(m):
    """Complete elliptic integral of the first kind, parameter convention
    ``K(m) = int_0^{pi/2} (1 - m sin^2)^(-1/2)``, via the AGM."""
    m = np.asarray(m, dtype=float)
    if np.any(m >= 1.0):
        raise DomainError("elliptic_k requires m < 1")
    out = 0.5 * np.pi / _agm(np.ones_like(m), np.sqrt(1.0 - m))
    return float(out) if out.ndim == 0 else out


def elliptic_k_complement(m1):
    """``K(1 - m1)``; accurate when ``m1`` is tiny (no cancellation)."""
    m1 = np.asarray(m1, dtype=float)
    if np.any(m1 <= 0.0):
        raise DomainError("elliptic_k_complement requires m1 > 0")
    out = 0.5 * np.pi / _agm(np.ones_like(m1), np.sqrt(m1))
    return float(out) if out.ndim == 0 else out


def elliptic_e(m):
    """Complete elliptic integral of the second kind (parameter ``m <= 1``)."""
    m = np.asarray(m, dtype=float)
    if np.any(m > 1.0):
        raise DomainError("elliptic_e requires m <= 1")
    edge = m == 1.0
    mm = np.where(edge, 0.0, m)
    cs = []
    a = _agm(np.ones_like(mm), np.sqrt(1.0 - mm), cs)
    total = 0.5 * mm
    for n, c in enumerate(cs, start=1):
        total = total + 2.0 ** (n - 1) * c * c
    out = np.where(edge, 1.0, 0.5 * np.pi / a * (1.0 - total))
    return float(out) if out.ndim == 0 else out


def alternating_sum(term: Callable[[int], float], n: int = 60) -> float:
    """Sum of ``sum_k (-1)^k term(k)`` by the Cohen-Rodriguez Villegas-Zagier
    acceleration (``term`` positive and decreasing)."""
    d = (3.0 + math.sqrt(8.0)) ** n
    d = 0.5 * (d + 1.0 / d)
    b, c, s = -1.0, -d, 0.0
    for k in range(n):
        c = b - c
        s += c * term(k)
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0))
    return s / d


def catalan() -> float:
    return alternating_sum(lambda k: 1.0 / (2 * k + 1) ** 2)


def zeta3() -> float:
    # eta(3) = (3/4) zeta(3)
    return alternating_sum(lambda k: 1.0 / (k + 1) ** 3) * 4.0 / 3.0


def gamma_partial_sums(n_terms: int) -> np.ndarray:
    """Partial sums S_0..S_{n-1} of sum_n (-1)^n/(n+1)^3 sum_{m<=n} (-1)^m/(2m+1)."""
    n = np.arange(n_terms)
    inner = np.cumsum((-1.0) ** n / (2 * n + 1))
    return np.cumsum((-1.0) ** n * inner / (n + 1.0) ** 3)


def gamma_series(n_terms: int, average: bool = True) -> float:
    """The alternating double series for the constant gamma in the 2D
    second-order exchange energy.

    With ``average=False`` this is the plain partial sum over ``n < n_terms``.
    Otherwise the last partial sums are repeatedly pairwise averaged, which
    cancels the alternating tail.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    sums = gamma_partial_sums(n_terms)
    if not average or n_terms == 1:
        return float(sums[-1])
    tail = sums[-min(n_terms, 12):]
    while tail.size > 1:
        tail = 0.5 * (tail[1:] + tail[:-1])
    return float(tail[0])
