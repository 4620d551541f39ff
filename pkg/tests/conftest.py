import numpy as np
import pytest

from fnls import Coefficients, Field, SpectralGrid, inverse_transform


def smooth_random_field(grid: SpectralGrid, seed: int, amplitude: float = 1.0,
                        bandwidth: float = 4.0) -> Field:
    """Gaussian-filtered random coefficients, rescaled to the given peak."""
    rng = np.random.default_rng(seed)
    c = rng.normal(size=grid.N) + 1j * rng.normal(size=grid.N)
    c *= np.exp(-((grid.wavenumbers / bandwidth) ** 2))
    vals = inverse_transform(Coefficients(c, grid)).values
    vals *= amplitude / np.max(np.abs(vals))
    return Field(vals, grid)


@pytest.fixture
def small_grid():
    return SpectralGrid(64, np.pi)
