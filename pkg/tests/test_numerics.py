import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomdot.numerics import (DomainError, IntegrationError, QuadratureSpec, UniformBall, UniformBox,
                              catalan, elliptic_e, elliptic_k, gamma_partial_sums, gamma_series,
                              integrate_1d, integrate_mc, zeta3)


def test_polynomial():
    assert integrate_1d(lambda x: x**2, 0, 1).value == pytest.approx(1 / 3, rel=1e-13)


def test_exponential_half_line():
    r = integrate_1d(lambda t: np.exp(-t), 0, math.inf)
    assert r.converged
    assert r.value == pytest.approx(1.0, rel=1e-10)


def test_log_singularity():
    r = integrate_1d(lambda x: np.log(1 / x), 0, 1, singular="left")
    assert r.value == pytest.approx(1.0, rel=1e-10)


def test_shifted_half_line():
    r = integrate_1d(lambda x: 1 / x**2, 2.0, math.inf)
    assert r.value == pytest.approx(0.5, rel=1e-10)


def test_reversed_limits():
    assert integrate_1d(np.cos, 1, 0).value == pytest.approx(-math.sin(1), rel=1e-13)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_nonfinite_interior_names_abscissa():
    with pytest.raises(IntegrationError, match="x ="):
        integrate_1d(lambda x: np.log(np.abs(x - 0.5)), 0, 1)


def test_converged_implies_tolerance():
    spec = QuadratureSpec(rel_tol=1e-9, abs_tol=0.0)
    r = integrate_1d(lambda x: np.sqrt(x) * np.exp(x), 0, 2, spec)
    assert r.converged and r.error_estimate <= spec.tolerance(r.value)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureSpec(mc_samples=0)
    with pytest.raises(ValueError):
        QuadratureSpec(seed=-1)


def _disk(pts):
    return (np.sum(pts**2, axis=1) <= 1.0).astype(float)


def test_mc_disk_area():
    r = integrate_mc(_disk, UniformBox((-1, -1), (1, 1)), QuadratureSpec(mc_samples=200_000))
    assert abs(r.value - math.pi) <= 3 * r.error_estimate


def test_mc_constant_exact():
    r = integrate_mc(lambda p: np.full(len(p), 2.5), UniformBox((0,), (1,)), QuadratureSpec(mc_samples=1000))
    assert r.value == 2.5 and r.error_estimate == pytest.approx(0.0, abs=1e-12)


def test_mc_ball_volume_4d():
    r = integrate_mc(_disk, UniformBox((-1,) * 4, (1,) * 4), QuadratureSpec(mc_samples=400_000, seed=3))
    assert abs(r.value - math.pi**2 / 2) <= 3 * r.error_estimate


def test_mc_ball_sampler():
    r = integrate_mc(lambda p: np.ones(len(p)), UniformBall(3), QuadratureSpec(mc_samples=1000))
    assert r.value == pytest.approx(4 * math.pi / 3, rel=1e-13)


def test_mc_empty_region():
    class Nothing:
        def draw(self, rng, n):
            return np.zeros((n, 1)), np.zeros(n)
    r = integrate_mc(lambda p: p[:, 0], Nothing(), QuadratureSpec(mc_samples=100))
    assert r.empty_region and r.value == 0.0


def test_mc_determinism_and_workers():
    spec = QuadratureSpec(mc_samples=300_000, seed=11)
    box = UniformBox((-1, -1), (1, 1))
    a = integrate_mc(_disk, box, spec)
    b = integrate_mc(_disk, box, spec)
    c = integrate_mc(_disk, box, spec, workers=4)
    assert a == b
    assert c.value == a.value


def test_mc_error_scaling():
    box = UniformBox((-1, -1), (1, 1))
    e1 = integrate_mc(_disk, box, QuadratureSpec(mc_samples=100_000)).error_estimate
    e4 = integrate_mc(_disk, box, QuadratureSpec(mc_samples=400_000)).error_estimate
    assert 1 / 1.5 <= (e1 / e4) / 2 <= 1.5


def _k_direct(m):
    return integrate_1d(lambda t: 1 / np.sqrt(1 - m * np.sin(t) ** 2), 0, math.pi / 2,
                        QuadratureSpec(rel_tol=1e-13)).value


def test_elliptic_examples():
    assert elliptic_k(0.0) == pytest.approx(math.pi / 2, rel=1e-15)
    assert elliptic_k(0.5) == pytest.approx(1.8540746773013719, rel=1e-14)
    m = 1 - 1e-6
    assert elliptic_k(m) - 0.5 * math.log(16 / (1 - m)) == pytest.approx(0.0, abs=1e-5)
    with pytest.raises(DomainError):
        elliptic_k(1.0)


@pytest.mark.parametrize("m", [0.0, 0.25, 0.5, 0.75, 0.99])
def test_elliptic_k_matches_quadrature(m):
    assert elliptic_k(m) == pytest.approx(_k_direct(m), rel=1e-10)


@pytest.mark.parametrize("m", [0.0, 0.3, 0.9])
def test_elliptic_e_matches_quadrature(m):
    direct = integrate_1d(lambda t: np.sqrt(1 - m * np.sin(t) ** 2), 0, math.pi / 2).value
    assert elliptic_e(m) == pytest.approx(direct, rel=1e-10)


@settings(max_examples=50, deadline=None)
@given(st.floats(0.0, 0.999), st.floats(0.0, 0.999))
def test_elliptic_k_increasing(a, b):
    lo, hi = sorted((a, b))
    if hi - lo > 1e-9:
        assert elliptic_k(hi) > elliptic_k(lo)


def test_catalan_zeta3():
    assert catalan() == pytest.approx(0.915965594177219, rel=1e-13)
    assert zeta3() == pytest.approx(1.202056903159594, rel=1e-13)
    assert 0.9 < catalan() < 1.3 and 0.9 < zeta3() < 1.3


def test_gamma_examples():
    assert gamma_series(1) == 1.0
    assert gamma_series(2, average=False) == pytest.approx(1 - (1 / 8) * (2 / 3), rel=1e-15)
    assert gamma_series(200) == pytest.approx(0.9424, abs=5e-5)
    assert abs(gamma_series(200) - gamma_series(400)) < 1e-6
    assert abs(gamma_series(400) - gamma_series(800)) < 1e-8


def test_gamma_partial_sums_bracket():
    sums = gamma_partial_sums(400)
    limit = gamma_series(2000)
    above = sums[1:] > limit
    assert np.all(above[1:] != above[:-1])
