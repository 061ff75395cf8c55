"""Coulomb potential of radially symmetric planar charge.

For a charge density ``f(|y|)`` in the plane,

    int d^2y f(|y|) / |x - y| = int_0^R ds s f(s) k(r, s),
    k(r, s) = 4 / (r + s) * K(4 r s / (r + s)**2),

which has a logarithmic singularity at ``s = r``.  The kernel is evaluated
through the complementary parameter ``((r - s) / (r + s))**2`` so that it
stays accurate near the diagonal.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .numerics import DomainError, QuadratureSpec, elliptic_e, elliptic_k_complement, integrate_1d

_SUB_X, _SUB_W = np.polynomial.legendre.leggauss(16)


def ring_kernel(r, s):
    """``k(r, s)``; at ``r = 0`` this is ``2 pi / s``."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    tot = r + s
    m1 = ((r - s) / tot) ** 2
    return 4.0 / tot * elliptic_k_complement(m1)


def ring_kernel_dr(r, s):
    """``d k(r, s) / d r`` for ``r != s``."""
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    tot = r + s
    m1 = ((r - s) / tot) ** 2
    m = 1.0 - m1
    K = elliptic_k_complement(m1)
    E = elliptic_e(m)
    # dK/dm = (E - m1 K) / (2 m m1);  dm/dr = 4 s (s - r) / tot**3
    with np.errstate(divide="ignore", invalid="ignore"):
        dK_dr = (E - m1 * K) / (2.0 * m * m1) * 4.0 * s * (s - r) / tot**3
        dK_dr = np.where(r == 0, 0.0, dK_dr)
    return -4.0 / tot**2 * K + 4.0 / tot * dK_dr


def coulomb_radial_2d(f: Callable, r: float, R: float, spec: QuadratureSpec | None = None) -> float:
    """``int_0^R ds s f(s) k(r, s)`` by adaptive quadrature, split at ``s = r``
    with the logarithmic point absorbed by a power substitution."""
    if r < 0:
        raise DomainError("radius must be non-negative")
    spec = spec or QuadratureSpec(rel_tol=1e-12, abs_tol=1e-14)

    def g(s):
        s = np.asarray(s, dtype=float)
        # the substitution can round a node onto s = r, where the weight vanishes
        safe = np.where(s == r, 0.5 * r, s)
        return np.where(s == r, 0.0, safe * f(safe) * ring_kernel(r, safe))

    if r == 0.0:
        return 2.0 * math.pi * integrate_1d(f, 0.0, R, spec).value
    if r >= R:
        return integrate_1d(g, 0.0, R, spec, singular="right" if r == R else None).value
    return (integrate_1d(g, 0.0, r, spec, singular="right").value
            + integrate_1d(g, r, R, spec, singular="left").value)


def uniform_disk_potential(r, R: float, sigma: float = 1.0):
    """Closed form in-plane potential of a uniformly charged disk."""
    r = np.asarray(r, dtype=float)
    out = np.empty_like(r)
    inside = r <= R
    out[inside] = 4.0 * sigma * R * elliptic_e((r[inside] / R) ** 2)
    ro = r[~inside]
    if ro.size:
        k2 = (R / ro) ** 2
        out[~inside] = 4.0 * sigma * ro * (elliptic_e(k2) - (1.0 - k2) * elliptic_k_complement(1.0 - k2))
    return out if out.ndim else float(out)


class PanelOperator:
    """Product-integration Nyström discretization of the radial 2D Coulomb
    operator on Gauss-Legendre panels.

    ``matrix(targets)`` returns ``M`` with ``(M @ f)[i] ~ int s f(s) k(t_i, s) ds``
    for ``f`` given at the panel nodes and interpolated panel-wise by its
    Lagrange polynomial.  Panels close to a target are integrated with a
    sub-rule graded geometrically towards the target; the rest use the
    panel nodes directly.
    """

    def __init__(self, breaks: np.ndarray, order: int = 10, levels: int = 24):
        self.breaks = np.asarray(breaks, dtype=float)
        self.order = order
        self.levels = levels
        x, w = np.polynomial.legendre.leggauss(order)
        self.ref_x = x
        self.ref_w = w
        lo, hi = self.breaks[:-1, None], self.breaks[1:, None]
        self.nodes = (0.5 * (lo + hi) + 0.5 * (hi - lo) * x).ravel()
        self.weights = (0.5 * (hi - lo) * w).ravel()
        # barycentric weights of the Gauss nodes on [-1, 1]
        diff = x[:, None] - x[None, :]
        np.fill_diagonal(diff, 1.0)
        self.bary = 1.0 / diff.prod(axis=1)

    @property
    def n_panels(self) -> int:
        return self.breaks.size - 1

    @property
    def R(self) -> float:
        return float(self.breaks[-1])

    def lagrange(self, panel: int, s: np.ndarray) -> np.ndarray:
        """Values of the panel's Lagrange basis at ``s``: shape ``(len(s), order)``."""
        a, b = self.breaks[panel], self.breaks[panel + 1]
        u = (2.0 * np.asarray(s, dtype=float) - a - b) / (b - a)
        d = u[:, None] - self.ref_x[None, :]
        hit = d == 0.0
        d[hit] = 1.0
        terms = self.bary / d
        out = terms / terms.sum(axis=1, keepdims=True)
        rows = hit.any(axis=1)
        if rows.any():
            out[rows] = hit[rows].astype(float)
        return out

    def interpolate(self, values: np.ndarray, s) -> np.ndarray:
        """Panel-wise polynomial interpolation (extrapolating from the
        end panels outside ``[0, R]``)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        panel = np.clip(np.searchsorted(self.breaks, s, side="right") - 1, 0, self.n_panels - 1)
        out = np.empty_like(s)
        vals = values.reshape(self.n_panels, self.order)
        for p in np.unique(panel):
            sel = panel == p
            out[sel] = self.lagrange(p, s[sel]) @ vals[p]
        return out

    def _graded_rule(self, a: float, b: float, t: float):
        """Nodes and weights on ``[a, b]`` graded towards the point ``t``."""
        pieces = []
        for lo, hi, toward_hi in ((a, min(t, b), True), (max(t, a), b, False)):
            if hi <= lo:
                continue
            length = hi - lo
            edges = length * 0.5 ** np.arange(self.levels + 1)
            edges = np.append(edges, 0.0)[::-1]  # 0 ... length, fine near 0
            if toward_hi:
                edges = hi - edges[::-1]
            else:
                edges = lo + edges
            e0, e1 = edges[:-1, None], edges[1:, None]
            pieces.append(((0.5 * (e0 + e1) + 0.5 * (e1 - e0) * _SUB_X).ravel(),
                           (0.5 * (e1 - e0) * _SUB_W).ravel()))
        nodes = np.concatenate([p[0] for p in pieces])
        weights = np.concatenate([p[1] for p in pieces])
        return nodes, weights

    def matrix(self, targets, kernel: Callable = ring_kernel) -> np.ndarray:
        targets = np.atleast_1d(np.asarray(targets, dtype=float))
        n = self.nodes.size
        M = np.empty((targets.size, n))
        for i, t in enumerate(targets):
            # a node equal to t lies in a near panel, whose entries are replaced below
            safe = np.where(self.nodes == t, 1.0 + t, self.nodes)
            M[i] = self.nodes * self.weights * kernel(t, safe)
            for p in range(self.n_panels):
                a, b = self.breaks[p], self.breaks[p + 1]
                gap = max(a - t, t - b, 0.0)
                if gap > 0.5 * (b - a):
                    continue
                if gap > 0:
                    sub_s, sub_w = self._graded_rule(a, b, a if t < a else b)
                else:
                    sub_s, sub_w = self._graded_rule(a, b, t)
                keep = sub_s != t
                sub_s, sub_w = sub_s[keep], sub_w[keep]
                vals = sub_w * sub_s * kernel(t, sub_s)
                M[i, p * self.order:(p + 1) * self.order] = vals @ self.lagrange(p, sub_s)
        return M

    def moment(self, power: int = 1) -> np.ndarray:
        """Weights of ``int_0^R s**power f(s) ds``."""
        return self.weights * self.nodes**power
