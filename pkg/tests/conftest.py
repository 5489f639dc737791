import numpy as np
import pytest

from landau_nls.basis import BasisSpec, build_basis
from landau_nls.field import Field, Grid, mass


@pytest.fixture(scope="session")
def small_tables():
    return build_basis(BasisSpec(2, 2, 32, 10.0))


@pytest.fixture(scope="session")
def default_tables():
    # default resolution with n, k <= 6; L = 12 is below the support rule there
    return build_basis(BasisSpec(6, 6, 128, 12.0, check_support=False))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_field(tables, grid, rng, levels=None):
    s = tables.spec
    shape = (s.n_max + 1, s.k_max + 1, grid.z_points)
    c = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    if grid.z_points > 1:
        # smooth and decaying in z so derivative-based norms stay tame
        c *= np.exp(-grid.z ** 2 / 2)[None, None, :]
    if levels is not None:
        keep = np.zeros(s.n_max + 1, bool)
        keep[list(levels)] = True
        c[~keep] = 0.0
    f = Field(c, grid, tables)
    return f * (1.0 / np.sqrt(mass(f)))


@pytest.fixture
def make_random(small_tables, rng):
    def _make(grid=None, levels=None, tables=None):
        return random_field(tables or small_tables, grid or Grid(16, 8.0), rng, levels)
    return _make


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[num])
