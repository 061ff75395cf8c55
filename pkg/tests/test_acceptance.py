"""Acceptance criteria 1-11, one PASS/FAIL line each.

Run directly (``python tests/test_acceptance.py``) or under pytest, where the
lines are printed in the terminal summary.
"""

import math
import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from atomdot import constants as const
from atomdot.atom_energy import atom_correlation
from atomdot.datasets import CorrelationDataset, CorrelationRecord, fit_offset, load_correlation_csv, model_energy
from atomdot.dot_energy import EXCHANGE_COEFF, J_EXCHANGE, dot_laplacian_area, dot_laplacian_term, dot_total_energy
from atomdot.grids import ScalingContext
from atomdot.numerics import QuadratureSpec, catalan, gamma_series
from atomdot.tf import tf_energy
from atomdot.tf_atom import normalization, solve_tf_atom
from atomdot.tf_dot import ConfinementSpec, solve_tf_dot_radial

ROOT = Path(__file__).resolve().parents[1]
RESULTS = {}


def record(key, ok, detail):
    RESULTS[key] = (bool(ok), detail)
    return ok


def test_c01_tf_atom_energy():
    t0 = time.perf_counter()
    sol = solve_tf_atom(1.0)
    e = tf_energy(sol, ScalingContext.atom(1.0)).hartree
    dt = time.perf_counter() - t0
    rel = abs(e + 0.7687) / 0.7687
    assert record("1", rel <= 1e-3 and dt < 5, f"E_TF/N^(7/3) = {e:.6f} Ha (rel {rel:.1e}), {dt:.2f} s")


def test_c02_tf_atom_tail_and_normalization():
    sol = solve_tf_atom(1.0)
    tail_rel = abs(sol.tail_coeff - 81 * math.pi**2) / (81 * math.pi**2)
    norm = normalization(sol)
    ok = tail_rel <= 0.01 and abs(norm - 1) <= 1e-6
    assert record("2", ok, f"r^4 mu_+ -> {sol.tail_coeff:.3f} (rel {tail_rel:.1e} to 81 pi^2); "
                           f"normalization - 1 = {norm - 1:.1e}")


def test_c03_i2():
    t0 = time.perf_counter()
    rep = const.i2_report()
    dt = time.perf_counter() - t0
    assert record("3", rep.rel_error <= 0.02 and dt < 300,
                  f"I_2 = {rep.numeric:.9f} vs {rep.closed_form:.9f} (rel {rep.rel_error:.1e}), {dt:.2f} s")


def test_c04_dot_constants():
    t0 = time.perf_counter()
    ec1 = 0.5 * (1 - math.log(2))
    gamma = gamma_series(const.GAMMA_TERMS)
    ec2 = 2 / math.pi**2 - 0.5 * (catalan() / 3 - 2 * gamma / math.pi**2)
    dt = time.perf_counter() - t0
    ok = abs(ec1 - 0.1534) <= 5e-5 and abs(ec2 - 0.1455) <= 1e-3 and dt < 1
    assert record("4", ok, f"(1 - ln2)/2 = {ec1:.6f}, recombination = {ec2:.6f} (gamma {gamma:.8f}), {dt * 1e3:.1f} ms")


def test_c05_coefficient_identities():
    from atomdot.numerics import zeta3
    ln2, G, pi = math.log(2), catalan(), math.pi
    pairs = {
        0.03109: (1 - ln2) / pi**2,
        0.03700: (23 / 6 - pi**2 / 4 + 8 / 3 * ln2 - 2 * G * (1 - ln2) - 4 * ln2**2) / (2 * pi**2),
        0.01979: 0.5 * (4 * pi) ** 4 * (1 - ln2) / (64 * pi**7),
        0.01027: 1 / pi**4,
        0.06390: 3 / (4 * pi**2) - 0.5 * (ln2 / 6 - 3 * zeta3() / (4 * pi**2)),
    }
    # four significant digits: within half a unit of the last printed digit
    bad = {k: v for k, v in pairs.items() if abs(k - v) > 5e-6}
    detail = ", ".join(f"{k:.5f}~{v:.6f}" for k, v in pairs.items())
    assert record("5", not bad, detail)


def test_c06_b_constants():
    t0 = time.perf_counter()
    b3, b2 = const.b_constants(QuadratureSpec(mc_samples=4_000_000))
    dt = time.perf_counter() - t0
    oks = [r.rel_error <= 0.05 or abs(r.numeric - r.closed_form) <= 3 * r.std_error for r in (b3, b2)]
    detail = "; ".join(f"{r.name} {r.numeric:.5f}+-{r.std_error:.1e} vs {r.closed_form:.5f}" for r in (b3, b2))
    assert record("6", all(oks) and dt < 600, f"{detail}, {dt:.1f} s")


def test_c07_j_exchange():
    rep = const.j_exchange(QuadratureSpec(mc_samples=4_000_000))
    identity = J_EXCHANGE / (2 * math.pi) ** 3 == EXCHANGE_COEFF
    identity_math = abs(EXCHANGE_COEFF - 2 / (3 * math.pi**2)) <= 1e-16
    sol = solve_tf_dot_radial(ConfinementSpec.power_law(2))
    br = dot_total_energy(10, ConfinementSpec.power_law(2), sol=sol)
    assembly = br.exchange_term == -EXCHANGE_COEFF * sol.disk_integral(lambda m, r: m**1.5)
    ok = rep.rel_error <= 0.02 and identity and identity_math and assembly
    assert record("7", ok, f"J = {rep.numeric:.4f} vs {rep.closed_form:.4f} (rel {rep.rel_error:.1e}); "
                           f"(16 pi/3)/(2 pi)^3 = 2/(3 pi^2) in assembly: {identity and assembly}")


@pytest.fixture(scope="module")
def neutral_breakdown():
    t0 = time.perf_counter()
    br = atom_correlation(10, 10)
    return br, time.perf_counter() - t0


def _c8_parts(br):
    per = br.per_electron_hartree()
    xa, xb, ecb = per["x_a"], per["x_b"], per["ec2_integral"]
    return {
        "x_a": (xa, 0.06533, 0.02, abs(xa - 0.06533) <= 0.02 * 0.06533),
        # sign per recorded convention: the magnitude chain is compared
        "x_b": (xb, -0.00329, 0.05, abs(abs(xb) - 0.00329) <= 0.05 * 0.00329),
        "ECB": (ecb, -1.1044, 0.02, abs(ecb + 1.1044) <= 0.02 * 1.1044),
    }


def _record_c8(br, dt):
    parts = _c8_parts(br)
    ok = all(p[3] for p in parts.values()) and dt < 120
    detail = "; ".join(f"{k} {'ok' if p[3] else 'off'} {p[0]:+.5f} vs {p[1]:+.5f}" for k, p in parts.items())
    note = " (B divergent, t_min cutoff)" if br.B_divergent else ""
    record("8", ok, f"{detail}{note}, {dt:.1f} s")
    return parts


def test_c08a_x_a(neutral_breakdown):
    parts = _record_c8(*neutral_breakdown)
    assert parts["x_a"][3], parts["x_a"]


def test_c08b_x_b(neutral_breakdown):
    parts = _record_c8(*neutral_breakdown)
    assert parts["x_b"][3], parts["x_b"]


def test_c08c_ecb(neutral_breakdown):
    parts = _record_c8(*neutral_breakdown)
    assert parts["ECB"][3], parts["ECB"]


@pytest.fixture(scope="module")
def dot_parts():
    conf = ConfinementSpec.power_law(2)
    sol = solve_tf_dot_radial(conf)
    br = dot_total_energy(50, conf, sol=sol)
    # semicircle c sqrt(1 - r^2/R^2) with R from the solution and c by least squares
    r = sol.nodes
    shape = np.sqrt(np.clip(1 - (r / sol.R) ** 2, 0, None))
    c = float(shape @ sol.node_values / (shape @ shape))
    semi = float(np.max(np.abs(sol.node_values - c * shape)))
    flux, area = dot_laplacian_term(sol), dot_laplacian_area(sol)
    total = (50**2 * br.e_tf + 50**1.5 * br.exchange_term + 50 * (br.laplacian_term + br.delta_term)
             - 50 * (br.corr_const - br.corr_integral))
    checks = {
        "semicircle": (semi <= 10 * sol.tol, f"sup|mu_+ - c sqrt(1-r^2/R^2)| = {semi:.3g}"),
        "fredholm": (br.screening_residual < 1e-8, f"Fredholm residual {br.screening_residual:.1e}"),
        "flux/area": (abs(flux - area) <= 0.01 * abs(area), f"flux {flux:.6f} vs area {area:.6f}"),
        "assembly": (br.total == total, "assembly exact" if br.total == total else "assembly mismatch"),
    }
    ok = all(v[0] for v in checks.values())
    record("9", ok, "; ".join(f"{k} {'ok' if v[0] else 'off'}: {v[1]}" for k, v in checks.items()))
    return checks


def test_c09a_semicircle(dot_parts):
    assert dot_parts["semicircle"][0], dot_parts["semicircle"][1]


def test_c09b_fredholm(dot_parts):
    assert dot_parts["fredholm"][0], dot_parts["fredholm"][1]


def test_c09c_flux_area(dot_parts):
    assert dot_parts["flux/area"][0], dot_parts["flux/area"][1]


def test_c09d_assembly(dot_parts):
    assert dot_parts["assembly"][0], dot_parts["assembly"][1]


def test_c10_fit_synthetic():
    exact = CorrelationDataset(tuple(CorrelationRecord(n, str(n), float(model_energy(n, -0.018, 0.062, "per-lnN")), "exp")
                                     for n in range(2, 55)))
    rec = fit_offset(exact).c_prime
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(200):
        noisy = CorrelationDataset(tuple(CorrelationRecord(r.n, r.label, r.e_corr_hartree * (1 + 0.01 * rng.uniform(-1, 1)),
                                                           r.source) for r in exact.records))
        worst = max(worst, abs(fit_offset(noisy).c_prime + 0.018))
    fixture = fit_offset(load_correlation_csv(ROOT / "data" / "synthetic_correlation.csv"))
    ok = (abs(rec + 0.018) <= 1e-12 and worst < 0.002 and abs(fixture.c_prime + 0.018) <= 0.005
          and fixture.max_rel_dev_n_ge_10 < 0.08)
    assert record("10", ok, f"exact c' error {abs(rec + 0.018):.1e}; 1% noise worst {worst:.1e} over 200 draws; "
                            f"fixture c' = {fixture.c_prime:.5f}, max dev {fixture.max_rel_dev_n_ge_10:.3f} "
                            "(synthetic data, no reference tables present)")


CLI_RUNS = [
    ("tf", "atom"),
    ("tf", "dot", "--potential", "r^4"),
    ("constants", "--seed", "77"),
    ("atom", "corr", "--n", "10"),
    ("atom", "hx", "--n", "18"),
    ("dot", "energy", "--n", "30"),
    ("fit", "--data", str(ROOT / "data" / "synthetic_correlation.csv")),
]


def test_c11_determinism(tmp_path):
    bad = []
    for i, args in enumerate(CLI_RUNS):
        outs = []
        for k in range(2):
            out = tmp_path / f"r{i}_{k}.json"
            proc = subprocess.run([sys.executable, "-m", "atomdot.cli", *args, "--out", str(out)],
                                  capture_output=True, check=False)
            outs.append((proc.returncode, proc.stdout, out.read_bytes() if out.exists() else None))
        if outs[0][0] != 0 or outs[0] != outs[1]:
            bad.append(" ".join(args[:2]))
    assert record("11", not bad, f"{len(CLI_RUNS)} subcommands run twice, differing: {bad or 'none'}")


def summary_lines():
    lines = []
    for key in sorted(RESULTS, key=int):
        ok, detail = RESULTS[key]
        lines.append(f"criterion {key:>2}: {'PASS' if ok else 'FAIL'}  {detail}")
    return lines


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    print("\n".join(summary_lines()))
    sys.exit(code)
