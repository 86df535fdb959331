import numpy as np
import pytest

from lpcalc.grid import Grid
from lpcalc.norms import build_cubes
from lpcalc.partition import build_alternative_resolution, build_resolution


@pytest.fixture(scope="session")
def grid1d():
    # Nyquist ~ 12.57; resolution with j_max = 4 covers the whole lattice
    return Grid(1, 256, 64.0)


@pytest.fixture(scope="session")
def resolution4():
    return build_resolution(4)


@pytest.fixture(scope="session")
def grid_fine():
    # Nyquist ~ 201; paired with j_max = 8 (2^8 = 256 covers the lattice)
    return Grid(1, 4096, 64.0)


@pytest.fixture(scope="session")
def resolution8():
    return build_resolution(8)


@pytest.fixture(scope="session")
def alt_resolution8():
    return build_alternative_resolution(8)


@pytest.fixture(scope="session")
def cubes_fine(grid_fine):
    return build_cubes(grid_fine)


@pytest.fixture(scope="session")
def grid2d():
    # Nyquist = 4*pi; a level-2 resolution fits under it
    return Grid(2, 32, 8.0)


def random_band_limited(grid, level, seed, decay=1.1):
    """Real random function with spectrum in {0 < |xi| <= 2^level} (plus DC)."""
    rng = np.random.default_rng([seed, 977])
    rho = grid.frequency_modulus()
    coeffs = (rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)) * (1.0 + rho**2) ** (
        -decay / 2.0
    )
    coeffs[rho > 2.0**level] = 0.0
    from lpcalc.grid import Spectrum, inverse_transform

    spec = Spectrum(grid, coeffs)
    f = inverse_transform(spec)
    from lpcalc.grid import GridFunction

    return GridFunction(grid, f.values + np.conj(f.values))
