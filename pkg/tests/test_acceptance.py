"""Acceptance criteria 1-10, one PASS/FAIL line each.

Run through pytest (lines are repeated in the terminal summary) or directly:

    python3 tests/test_acceptance.py
"""

import math
import time
import warnings

import numpy as np
import pytest

from landau_nls import experiments as ex
from landau_nls.basis import BasisSpec, build_basis, eigen_residual
from landau_nls.field import Field, Grid, mass, sigma2_prime_norm
from landau_nls.nonlinearity import F_av_quadrature, F_av_resonant_oracle, theta_exactness_gap
from landau_nls.propagators import landau_phase

RESULTS = {}


def record(num, title, ok, detail):
    line = f"CRITERION {num:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail}"
    RESULTS[num] = line
    print(line)
    return ok


def _random(tables, grid, rng):
    s = tables.spec
    shape = (s.n_max + 1, s.k_max + 1, grid.z_points)
    c = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    if grid.z_points > 4:
        c *= np.exp(-grid.z ** 2 / 4)
    f = Field(c, grid, tables)
    return f * (1 / math.sqrt(mass(f)))


@pytest.fixture(scope="module")
def standard_sweep():
    cfg = ex.load_config(scenario="standard")
    t0 = time.perf_counter()
    rep = ex.convergence_sweep(cfg)
    return rep, time.perf_counter() - t0


def test_c01_basis_fidelity():
    t0 = time.perf_counter()
    tables = build_basis(BasisSpec(6, 6, 128, 12.0, check_support=False))
    worst = max(eigen_residual(tables, n, k) for n in range(7) for k in range(7))
    gram = tables.gram_deviation()
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and gram <= 1e-10 and dt <= 30
    assert record(1, "basis fidelity", ok,
                  f"max eigen residual {worst:.2e} (<=1e-6), Gram dev {gram:.2e} (<=1e-10), {dt:.1f}s (<=30s)")


def test_c02_phase_identities():
    t0 = time.perf_counter()
    tables = build_basis(BasisSpec(6, 6, 32, 12.0, check_support=False))
    u = _random(tables, Grid(16, 8.0), np.random.default_rng(2))
    d2 = float(np.max(np.abs(landau_phase(u, 2 * math.pi).coefs + u.coefs)))
    d4 = float(np.max(np.abs(landau_phase(u, 4 * math.pi).coefs - u.coefs)))
    dt = time.perf_counter() - t0
    ok = d2 <= 1e-14 and d4 <= 1e-14 and dt < 1
    assert record(2, "phase identities", ok,
                  f"|P(2pi)+I| {d2:.1e}, |P(4pi)-I| {d4:.1e} (<=1e-14), {dt:.2f}s (<1s)")


def test_c03_sigma2_prime_isometry():
    rng = np.random.default_rng(3)
    tables = build_basis(BasisSpec(2, 2, 32, 10.0))
    grid = Grid(32, 8.0)
    worst = 0.0
    for _ in range(100):
        u = _random(tables, grid, rng)
        th = rng.uniform(-1e3, 1e3)
        a = sigma2_prime_norm(u)
        worst = max(worst, abs(sigma2_prime_norm(landau_phase(u, th)) - a) / a)
    assert record(3, "Sigma2' isometry", worst <= 1e-12, f"max relative change {worst:.1e} (<=1e-12) over 100 pairs")


def test_c04_averaging_oracle():
    rng = np.random.default_rng(4)
    tables = build_basis(BasisSpec(2, 2, 32, 10.0))
    grid = Grid(4, 4.0)
    worst, gap = 0.0, 0.0
    for _ in range(50):
        u = _random(tables, grid, rng)
        d = F_av_quadrature(u, 1) - F_av_resonant_oracle(u, 1)
        worst = max(worst, math.sqrt(mass(d)))
        gap = max(gap, theta_exactness_gap(u, 1, 2 * 2 * 3))
    ok = worst <= 1e-12 and gap <= 1e-13
    assert record(4, "averaging oracle", ok,
                  f"quadrature vs resonant {worst:.1e} (<=1e-12), J-doubling {gap:.1e} (<=1e-13)")


def test_c05_level_invariance():
    t0 = time.perf_counter()
    rep = ex.level_invariance(ex.load_config(scenario="standard"))
    dt = time.perf_counter() - t0
    leak = max(r["max_leakage_mass"] for r in rep.summary["levels"])
    gap = max(r["max_reduced_gap"] for r in rep.summary["levels"])
    ok = leak <= 1e-10 and gap <= 1e-9 and dt <= 120
    assert record(5, "level invariance n=0,2", ok,
                  f"leakage mass {leak:.1e} (<=1e-10), reduced-equation gap {gap:.1e} (<=1e-9), {dt:.0f}s (<=120s)")


def test_c06_convergence_rate(standard_sweep):
    rep, dt = standard_sweep
    s = rep.summary
    slope = s.get("slope")
    ok = s["slope_status"] == "ok" and slope is not None and 1.7 <= slope <= 2.3 and dt <= 1800
    errs = ", ".join(f"{p['eps']}:{p['max_filtered_error']:.2e}" for p in s["per_eps"])
    cert = s.get("certification", {}).get("ratio", float("nan"))
    assert record(6, "eps^2 rate", ok,
                  f"slope {slope:.3f} CI {s.get('slope_ci95')} in [1.7,2.3]; errors {errs}; "
                  f"refinement/error {cert:.3f} (<0.1); {dt:.0f}s (<=1800s)")


def test_c07_conservation():
    rep = ex.conservation_audit(ex.load_config(scenario="standard"))
    avg = [d for d in rep.summary["drifts"] if d["solver"] == "averaged"]
    coarse = avg[0]
    ratio = rep.summary["energy_halving_ratio"]
    ok = coarse["mass_drift"] <= 1e-8 and coarse["rel_energy_drift"] <= 1e-6 and 3.4 <= ratio <= 4.6
    assert record(7, "averaged conservation", ok,
                  f"mass drift {coarse['mass_drift']:.1e} (<=1e-8), rel energy drift "
                  f"{coarse['rel_energy_drift']:.1e} (<=1e-6), halving ratio {ratio:.3f} in [3.4,4.6]")


def test_c08_lll_reduction():
    rep = ex.lll_compare(ex.load_config(scenario="standard"))
    s = rep.summary
    ok = s["max_trajectory_gap"] <= 1e-10 and s["max_kernel_gap"] <= 1e-8
    assert record(8, "LLL reduction", ok,
                  f"direct vs averaged {s['max_trajectory_gap']:.1e} (<=1e-10), "
                  f"kernel vs basis P0 {s['max_kernel_gap']:.1e} (<=1e-8)")


def test_c09_uniform_bound(standard_sweep):
    rep, _ = standard_sweep
    sups = [p["sup_sigma2prime"] for p in rep.summary["per_eps"]]
    spread = (max(sups) - min(sups)) / min(sups)
    assert record(9, "uniform Sigma2' bound", spread < 0.2,
                  f"sup_t norms {[round(x, 6) for x in sups]}, spread {spread:.1e} (<0.2)")


def test_c10_determinism(tmp_path):
    base = dict(grid={"z_points": 32, "z_half_width": 8.0}, eps_list=[0.4, 0.3, 0.2], T=0.1,
                samples=5, seed=11, initial={"kind": "random"})
    bodies = []
    for i, threads in enumerate((1, 1, 2)):
        out = ex.convergence_sweep(ex.load_config(scenario="standard", threads=threads, **base)).write(
            tmp_path / str(i))
        bodies.append({p.name: p.read_bytes() for p in sorted(out.glob("*.csv"))})
    ok = bool(bodies[0]) and bodies[0] == bodies[1] == bodies[2]
    assert record(10, "determinism", ok,
                  f"{len(bodies[0])} CSV files bit-identical across 2 repeats and threads 1/2")


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q", "-s"]))
