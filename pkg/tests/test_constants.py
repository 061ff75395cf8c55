import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomdot import constants as c
from atomdot.numerics import QuadratureSpec, catalan, gamma_series


@pytest.fixture(scope="module")
def i2():
    return c.i2_report()


def test_i2(i2):
    assert i2.closed_form == pytest.approx(19.0289, rel=1e-4)
    assert i2.rel_error < 0.02
    assert i2.rel_error < 1e-8  # the quadrature is far better than needed


def test_alpha_t_large_k_is_disk_area():
    assert c.alpha_t(10.0, 0.0) == pytest.approx(math.pi, rel=1e-10)


def test_alpha_t_matches_brute_force():
    rng = np.random.default_rng(5)
    q = rng.uniform(-1, 1, (400_000, 2))
    k, t = 0.8, 0.3
    kq = q + np.array([k, 0.0])
    ok = (np.sum(q**2, 1) < 1) & (np.sum(kq**2, 1) > 1)
    vals = np.where(ok, np.exp(-t * (np.sum(kq**2, 1) - np.sum(q**2, 1))), 0.0) * 4.0
    se = vals.std() / math.sqrt(vals.size)
    assert abs(c.alpha_t(k, t) - vals.mean()) < 4 * se


def test_ec1_dot(i2):
    rep = c.ec1_star_dot(i2.numeric)
    assert rep.closed_form == pytest.approx(0.153426, abs=1e-6)
    assert rep.numeric == pytest.approx(0.1534, abs=5e-5)
    assert c.ec1_star_dot(0.0).numeric == 0.0


@pytest.mark.parametrize("rep", c.coefficient_reports() + [c.dot_correlation_constant()], ids=lambda r: r.name)
def test_printed_coefficients(rep):
    ok, rule = c.verify_report(rep)
    assert ok, rule


def test_xlog_identity():
    rep = c.xlog_coefficient()
    assert rep.numeric == pytest.approx((1 - math.log(2)) / math.pi**2, rel=1e-14)
    assert rep.rel_error < 1e-4


def test_ec2_identity():
    ln2 = math.log(2)
    from atomdot.numerics import zeta3
    expect = 3 / (4 * math.pi**2) - 0.5 * (ln2 / 6 - 3 * zeta3() / (4 * math.pi**2))
    assert c.ec2_atom_coefficient().numeric == pytest.approx(expect, rel=1e-14)


def test_b_closed_forms():
    assert c.b3_closed() == pytest.approx(0.024179, abs=5e-7)
    assert c.b2_closed() == pytest.approx(0.11437, abs=2e-5)


def test_dot_constant_degenerate_gamma():
    assert c.dot_correlation_constant(0.0).numeric == pytest.approx(2 / math.pi**2 - catalan() / 6, rel=1e-14)
    assert c.dot_correlation_constant(0.0).numeric == pytest.approx(0.04998, abs=1e-5)


@pytest.mark.parametrize("d,expect", [(2, -2 / math.pi**2), (3, -3 / (4 * math.pi**2))])
def test_a_d(d, expect):
    rep = c.a_d_constant(d)
    assert rep.closed_form == pytest.approx(expect, rel=1e-14)
    assert rep.rel_error < 1e-3
    from atomdot.grids import sphere_surface
    assert c.g_unit(d) == pytest.approx(4 / sphere_surface(d), rel=1e-3)


def test_c_integrand():
    assert float(c.c_integrand(2.0)) == pytest.approx(0.8 * math.log(3) - 1, rel=1e-14)
    for k in (50.0, 200.0):
        assert float(c.c_integrand(k)) == pytest.approx(-4 / (3 * k**3), rel=5 / k**2)


def test_c_two_methods():
    rep = c.c_appendix()
    assert rep.closed_form is None
    assert abs(rep.numeric - rep.reference) <= 1e-8 * abs(rep.reference)
    assert not rep.flagged


def test_gamma_report():
    rep = c.gamma_report()
    assert rep.numeric == pytest.approx(0.9424, abs=5e-5)
    assert c.verify_report(rep)[0]


def test_j_example():
    rep = c.j_exchange(QuadratureSpec(mc_samples=400_000))
    assert rep.closed_form == pytest.approx(16.7552, abs=5e-5)
    assert rep.numeric > 0
    assert rep.rel_error < 0.02


def test_b3_small_run():
    b3, b2 = c.b_constants(QuadratureSpec(mc_samples=1_000_000))
    assert b3.rel_error < 0.05 or abs(b3.numeric - b3.closed_form) < 3 * b3.std_error
    assert b2.rel_error < 0.05 or abs(b2.numeric - b2.closed_form) < 3 * b2.std_error


def test_reports_deterministic_and_seed_independent():
    a = c.j_exchange(QuadratureSpec(mc_samples=100_000, seed=9))
    b = c.j_exchange(QuadratureSpec(mc_samples=100_000, seed=9))
    assert a == b
    det1 = [c.xlog_coefficient(), c.a_d_constant(3), c.dot_correlation_constant()]
    det2 = [c.xlog_coefficient(), c.a_d_constant(3), c.dot_correlation_constant()]
    assert [r.numeric for r in det1] == [r.numeric for r in det2]


@settings(max_examples=30, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(-1e3, 1e3))
def test_rel_error_consistent(closed, numeric):
    rep = c.ConstantReport.build("x", closed, numeric, "m")
    assert rep.rel_error == abs(rep.numeric - closed) / max(abs(closed), 1e-300)


def test_as_dict_has_seed():
    row = c.j_exchange(QuadratureSpec(mc_samples=1000, seed=4)).as_dict()
    assert row["seed"] == 4 and row["std_error"] > 0
    assert {"name", "closed_form", "numeric", "rel_error"} <= set(row)


def _within_3se(rep):
    return abs(rep.numeric - rep.closed_form) <= 3 * rep.std_error


def test_mc_reseeded_coverage():
    # at least 95% of 20 reseeded runs land within 3 standard errors
    hits = {"J": 0, "B_3": 0, "B_2": 0}
    for seed in range(20):
        spec = QuadratureSpec(mc_samples=200_000, seed=1000 + seed)
        reps = [c.j_exchange(spec), *c.b_constants(spec)]
        for rep in reps:
            hits[rep.name] += _within_3se(rep)
    assert all(h >= 19 for h in hits.values()), hits


def test_gamma_stable():
    assert abs(gamma_series(400) - gamma_series(800)) < 1e-8
