import math
import warnings

import numpy as np
import pytest
from scipy import integrate

from landau_nls.field import (Field, Grid, Potential, QuadratureWarning, SimParams, energy,
                              gaussian_profile, l2_error, make_initial, mass, sigma2_prime_norm)

GRID = Grid(128, 10.0)


def ground(tables, n=0, k=0, grid=GRID):
    return make_initial("single_mode", grid, tables, n=n, k=k,
                        profile=lambda z: np.exp(-z ** 2 / 2))


def test_grid_validation():
    with pytest.raises(ValueError):
        Grid(12)
    with pytest.raises(ValueError):
        Grid(16, 0.0)
    g = Grid(8, 4.0)
    assert g.dz == 1.0 and g.z[0] == -4.0 and g.z[-1] == 3.0
    assert Grid(1).is_2d and Grid(1).dz == 1.0


def test_potential_kinds():
    z = np.array([0.0, 1.0, 2.0])
    assert np.allclose(Potential.harmonic(2.0)(z), [0, 2, 8])
    assert np.allclose(Potential("cosine", (1.0, math.pi))(z), [1, -1, 1])
    assert np.allclose(Potential("polynomial2", (1, 2, 3))(z), [1, 6, 17])
    assert Potential().is_zero
    assert Potential.harmonic(1.0).second_derivative_bound(Grid(64, 10)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        Potential("quartic", (1.0,))
    with pytest.raises(ValueError):
        Potential("harmonic", ())


def test_simparams_validation():
    with pytest.raises(ValueError):
        SimParams(eps=0.0)
    with pytest.raises(ValueError):
        SimParams(eps=1.5)
    with pytest.raises(ValueError):
        SimParams(sigma=0)
    with pytest.raises(ValueError):
        SimParams(sigma=1.5)
    assert SimParams(sigma=2).nodes_for(2) == 18
    assert SimParams(eps=0.5, lam=2.0, sigma=1).beta == pytest.approx(0.5)


def test_field_shape_and_finiteness(small_tables):
    with pytest.raises(ValueError):
        Field(np.zeros((2, 3, 8)), Grid(8), small_tables)
    c = np.zeros((3, 3, 8), complex)
    c[0, 0, 0] = np.nan
    with pytest.raises(FloatingPointError):
        Field(c, Grid(8), small_tables)


def test_mass_examples(small_tables, make_random):
    f = ground(small_tables)
    assert mass(f) == pytest.approx(1.0, abs=1e-12)
    assert mass(Field.zeros(GRID, small_tables)) == 0.0
    u = make_random()
    alpha = 0.3 - 1.2j
    assert mass(u * alpha) == pytest.approx(abs(alpha) ** 2 * mass(u), rel=1e-13)


def test_mass_matches_physical_quadrature(small_tables, make_random):
    u = make_random(Grid(8, 4.0))
    phys = u.physical()
    assert np.sum(np.abs(phys) ** 2) * small_tables.weight * u.grid.dz == pytest.approx(mass(u), rel=1e-10)


def test_l2_error_metric(make_random):
    u, v, w = make_random(), make_random(), make_random()
    assert l2_error(u, u) == 0.0
    assert l2_error(u, u * 0) == pytest.approx(math.sqrt(mass(u)))
    assert l2_error(u, v) == pytest.approx(l2_error(v, u))
    assert l2_error(u, v) <= l2_error(u, w) + l2_error(w, v)


def test_l2_error_mismatch(small_tables, make_random):
    u = make_random(Grid(16, 8.0))
    v = make_random(Grid(32, 8.0))
    with pytest.raises(ValueError):
        l2_error(u, v)


def test_sigma2_prime_gaussian_oracle(small_tables):
    # |h|^2, |h''|^2 and |z^2 h|^2 for h = pi^-1/4 exp(-z^2/2) by quadrature
    h = lambda z: math.pi ** -0.25 * math.exp(-z * z / 2)
    hzz = lambda z: (z * z - 1) * h(z)
    parts = [integrate.quad(f, -np.inf, np.inf)[0] for f in
             (lambda z: h(z) ** 2, lambda z: hzz(z) ** 2, lambda z: (z * z * h(z)) ** 2)]
    expected = math.sqrt(parts[0] + 1.0 * parts[0] + parts[1] + parts[2])
    assert expected == pytest.approx(math.sqrt(3.5), abs=1e-12)
    assert sigma2_prime_norm(ground(small_tables)) == pytest.approx(expected, abs=1e-8)


def test_sigma2_prime_h0_weight(small_tables):
    # only the H0 term changes between modes: (n+k+1)^2 |h|^2
    base = sigma2_prime_norm(ground(small_tables)) ** 2
    assert sigma2_prime_norm(ground(small_tables, 2, 1)) ** 2 == pytest.approx(base - 1 + 16, abs=1e-8)


def test_sigma2_prime_lower_bound(make_random):
    for _ in range(5):
        u = make_random()
        assert sigma2_prime_norm(u) >= math.sqrt(mass(u))


def test_energy_harmonic_ground_state(small_tables):
    p = SimParams(lam=0.0, potential=Potential.harmonic(1.0))
    assert energy(ground(small_tables), p) == pytest.approx(0.5, abs=1e-8)
    # independent of the transverse mode when lam = 0
    for n, k in [(1, 0), (2, 2), (0, 1)]:
        assert energy(ground(small_tables, n, k), p) == pytest.approx(energy(ground(small_tables), p), abs=1e-10)


def test_energy_plane_wave(small_tables):
    g = Grid(64, 10.0)
    kz = g.z_wavenumbers[3]
    f = make_initial("single_mode", g, small_tables, n=0, k=0,
                     profile=lambda z: np.exp(1j * kz * z))
    assert energy(f, SimParams(lam=0.0)) == pytest.approx(kz ** 2 / 2, abs=1e-10)


def test_energy_theta_doubling(small_tables, make_random):
    u = make_random()
    p = SimParams(lam=0.7, sigma=1, potential=Potential.harmonic(1.0))
    J = p.nodes_for(2)
    e1 = energy(u, p)
    e2 = energy(u, SimParams(lam=0.7, sigma=1, potential=Potential.harmonic(1.0), theta_nodes=2 * J))
    assert abs(e1 - e2) <= 1e-13


def test_energy_warns_below_rule(make_random):
    u = make_random()
    with pytest.warns(QuadratureWarning):
        energy(u, SimParams(lam=1.0, theta_nodes=3))


def test_energy_nonlinear_oracle(small_tables):
    # lambda/(sigma+1) mean_theta int |u|^4 for a single mode: no theta dependence
    g = Grid(64, 10.0)
    f = make_initial("single_mode", g, small_tables, n=1, k=2,
                     profile=lambda z: np.exp(-z ** 2 / 2))
    h2 = np.abs(f.coefs[1, 2]) ** 2
    phi = small_tables.mode(1, 2)
    expect = 0.25 * np.sum(np.abs(phi) ** 4) * small_tables.weight * np.sum(h2 ** 2) * g.dz
    assert energy(f, SimParams(lam=0.5, potential=Potential())) - \
        0.5 * float(np.sum(g.z_wavenumbers ** 2 * np.abs(np.fft.fft(f.coefs[1, 2])) ** 2)) * g.dz / g.z_points \
        == pytest.approx(expect, rel=1e-12)


def test_global_phase_invariance(make_random):
    u = make_random()
    v = u * np.exp(0.7j)
    p = SimParams(lam=0.4, potential=Potential.harmonic(1.0))
    assert mass(v) == pytest.approx(mass(u), abs=1e-12)
    assert sigma2_prime_norm(v) == pytest.approx(sigma2_prime_norm(u), abs=1e-12)
    assert energy(v, p) == pytest.approx(energy(u, p), abs=1e-12)
    w = make_random()
    assert l2_error(v, w * np.exp(0.7j)) == pytest.approx(l2_error(u, w), abs=1e-12)


def test_make_initial_kinds(small_tables):
    g = Grid(32, 8.0)
    f = make_initial("single_mode", g, small_tables, n=0, k=0)
    assert mass(f) == pytest.approx(1, abs=1e-12)
    f = make_initial("level_packet", g, small_tables, n=2, coefficients=[1, 0.5j, -0.2])
    lm = f.level_masses()
    assert mass(f) == pytest.approx(1, abs=1e-12)
    assert lm[2] == pytest.approx(1, abs=1e-12) and lm[0] == 0 and lm[1] == 0
    f = make_initial("multi_level_packet", g, small_tables, coefficients=[[1, 0.5], [0.6j, 0, 0.3]],
                     profile=lambda z: gaussian_profile(z, 0.5, 1.0, 0.5))
    lm = f.level_masses()
    assert lm[0] + lm[1] == pytest.approx(1, abs=1e-12) and lm[2] == 0


def test_make_initial_errors(small_tables):
    g = Grid(16, 8.0)
    with pytest.raises(ValueError):
        make_initial("level_packet", g, small_tables, n=1, coefficients=[0, 0])
    with pytest.raises(ValueError):
        make_initial("single_mode", g, small_tables, n=3, k=0)
    with pytest.raises(ValueError):
        make_initial("level_packet", g, small_tables, n=0, coefficients=[1, 1, 1, 1])
    with pytest.raises(ValueError):
        make_initial("vortex", g, small_tables)


def test_field_arithmetic(make_random):
    u, v = make_random(), make_random()
    assert np.allclose((u + v - v).coefs, u.coefs)
    assert np.allclose((-u).coefs, -u.coefs)
    assert u.compatible(v)
