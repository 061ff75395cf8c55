import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from atomdot.atom_energy import (EC2_COEFF, XA_COEFF, XB_COEFF, RadialProfile, _GTransform,
                                 atom_A_integral, atom_B_integral, atom_correlation, atom_ec2_integral,
                                 atom_smooth_hx, atom_xlin, g_direct)
from atomdot.numerics import DomainError

ZERO = RadialProfile(mu=lambda r: 0.0 * r, dmu=lambda r: 0.0 * r)
EXP = RadialProfile(mu=lambda r: np.exp(-r), dmu=lambda r: -np.exp(-r))


def test_zero_profile():
    assert atom_A_integral(ZERO) == 0.0
    assert atom_ec2_integral(ZERO) == 0.0
    b = atom_B_integral(ZERO)
    assert b.value == 0.0 and not b.divergent


@pytest.mark.parametrize("lam", [0.25, 2.0, 7.0])
def test_A_scaling_probe(lam):
    scaled = RadialProfile(mu=lambda r: lam * np.exp(-r))
    base = atom_A_integral(EXP)
    moment = 16.0 / 27.0  # int r^2 e^(-3r/2) dr
    assert atom_A_integral(scaled) == pytest.approx(lam**1.5 * (base + 0.5 * math.log(lam) * moment), rel=1e-10)


def test_A_exponential_closed_form():
    # int r^2 e^(-3r/2) (-r/2) dr = -(1/2) 3!/(3/2)^4
    assert atom_A_integral(EXP) == pytest.approx(-0.5 * 6 / 1.5**4, rel=1e-10)


def test_ec2_box():
    box = RadialProfile(mu=lambda r: np.ones_like(r), support_radius=1.0)
    assert atom_ec2_integral(box) == pytest.approx(1 / 15, rel=1e-12)


def test_ec2_exponential_closed_form():
    # int r e^-r int_0^r s^2 e^-s ds dr = int r e^-r (2 - e^-r (r^2 + 2r + 2)) dr = 2 - 11/8
    assert atom_ec2_integral(EXP) == pytest.approx(2 - 11 / 8, rel=1e-10)


def test_neutral_integrals_stable_under_refinement(neutral):
    a1, a2 = atom_A_integral(neutral, panels=400), atom_A_integral(neutral, panels=800)
    e1, e2 = atom_ec2_integral(neutral, panels=400), atom_ec2_integral(neutral, panels=800)
    b1 = atom_B_integral(neutral, t_panels=40).value
    b2 = atom_B_integral(neutral, t_panels=80).value
    assert abs(a1 - a2) < 5e-3 * abs(a2)
    assert abs(e1 - e2) < 5e-3 * abs(e2)
    assert abs(b1 - b2) < 5e-3 * abs(b2)


def test_ec2_neutral_contribution(neutral):
    I = atom_ec2_integral(neutral)
    per_electron = -2.0 * EC2_COEFF * I
    assert per_electron == pytest.approx(-1.1044, rel=0.02)


def test_g_small_p_quadratic(neutral):
    # g / p^2 settles to a finite limit (the r^-4 tail adds an O(p^3) correction)
    ratios = [g_direct(neutral, p, 1.0) / p**2 for p in (1e-4, 2e-4, 4e-4)]
    assert ratios[0] == pytest.approx(ratios[1], rel=5e-3)
    assert abs(ratios[0] - ratios[1]) < abs(ratios[1] - ratios[2])


def test_fht_matches_direct(neutral):
    tr = _GTransform(neutral)
    for t in (0.5, 3.0):
        g = tr.g(t)
        for p in (0.05, 0.4, 2.0, 5.0):
            i = int(np.argmin(np.abs(np.log(tr.p / p))))
            assert g[i] == pytest.approx(g_direct(neutral, tr.p[i], t), rel=2e-5, abs=1e-9)


def test_B_divergence_flagged(neutral):
    b = atom_B_integral(neutral, t_min=0.05)
    assert b.divergent and b.small_t_exponent < -1.0
    assert atom_B_integral(neutral, t_min=0.02).value > b.value


def test_xlin():
    x = atom_xlin(0.0, 0.0)
    assert x.bracket == pytest.approx(0.7303, abs=1e-4)
    assert x.const_base == pytest.approx(0.03700, abs=5e-6)
    assert x.value == pytest.approx((2 * math.pi) ** 5 * x.bracket, rel=1e-15)
    a, b = atom_xlin(1.0, 0.0), atom_xlin(0.0, 2 * math.pi)
    assert a.value - x.value == pytest.approx(0.5 * (4 * math.pi) ** 4 * (1 - math.log(2)), rel=1e-12)
    assert b.value - x.value == pytest.approx(-0.5 * (4 * math.pi) ** 4, rel=1e-12)


@pytest.fixture(scope="module")
def breakdown(neutral):
    return atom_correlation(20, 20, sol=neutral, t_min=0.05)


def test_breakdown_coefficients(breakdown):
    assert breakdown.x_a / breakdown.A_value == XA_COEFF
    assert breakdown.x_b / breakdown.B_value == XB_COEFF
    assert breakdown.x_unknown == 0.0
    assert any("x is not computed" in n for n in breakdown.notes)
    assert breakdown.B_divergent


def test_breakdown_hartree_chain(breakdown):
    h = breakdown.hartree_terms()
    s = breakdown.scaled_terms()
    for k in s:
        assert h[k] == pytest.approx(s[k] * 20 ** (4 / 3) * 2, rel=1e-14)
    assert breakdown.minus_ec_hartree() == pytest.approx(sum(h.values()), rel=1e-14)
    per = breakdown.per_electron_hartree()
    assert per["x_a"] == pytest.approx(2 * XA_COEFF * breakdown.A_value, rel=1e-12)
    assert per["const_base"] == pytest.approx(2 * 0.03700, rel=1e-12)


def test_log_slope_conventions(breakdown):
    s = breakdown.log_slope
    assert s["per-lnN^(1/3)"] == pytest.approx(2 * 0.03109)
    assert s["per-lnN"] == pytest.approx(2 * 0.03109 / 3)


def test_x_unknown_enters_linearly(neutral, breakdown):
    other = atom_correlation(20, 20, x_unknown=0.1, sol=neutral, t_min=0.05)
    diff = other.minus_ec_hartree() - breakdown.minus_ec_hartree()
    assert diff == pytest.approx(0.1 * 2 * 20, rel=1e-12)


def test_correlation_q_mismatch(neutral):
    with pytest.raises(DomainError):
        atom_correlation(8, 10, sol=neutral)
    with pytest.raises(DomainError):
        atom_correlation(-1, 10)


def test_smooth_hx_examples():
    assert atom_smooth_hx(1).total == pytest.approx(-1.5386, abs=1e-12)
    assert atom_smooth_hx(10).terms["c7"] == pytest.approx(-165.62, abs=0.01)
    zeros = atom_smooth_hx(10, {"c4": 0.0, "c3": 0.0, "c0": 0.0})
    assert zeros.total == pytest.approx(atom_smooth_hx(10).total, rel=1e-15)
    with pytest.raises(DomainError):
        atom_smooth_hx(0.5)
    with pytest.raises(DomainError):
        atom_smooth_hx(5, {"c9": 1.0})


@settings(max_examples=50, deadline=None)
@given(st.floats(1.0, 1e4))
def test_smooth_hx_power_scaling(n):
    a, b = atom_smooth_hx(n), atom_smooth_hx(2 * n)
    assert b.terms["c7"] / a.terms["c7"] == pytest.approx(2 ** (7 / 3), rel=1e-13)
    assert a.total == pytest.approx(-0.7687 * n ** (7 / 3) - 0.5 * n**2 - 0.2699 * n ** (5 / 3), rel=1e-13)


def test_smooth_hx_optional_terms():
    hx = atom_smooth_hx(27, {"c4": 1.0, "c3": 2.0, "c0": 3.0})
    assert hx.terms["c4"] == pytest.approx(81.0)
    assert hx.terms["c3"] == pytest.approx(54.0)
    assert hx.terms["c0"] == pytest.approx(81.0 * math.log(27))
