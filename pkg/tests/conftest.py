import pytest

from chemostokes.grid import Grid, ScalarField, VectorField, apply_scalar_bc


@pytest.fixture
def unit_grid_16():
    return Grid((16, 16), (1.0 / 16, 1.0 / 16))


@pytest.fixture
def unit_grid_32():
    return Grid((32, 32), (1.0 / 32, 1.0 / 32))


@pytest.fixture
def unit_grid_64():
    return Grid((64, 64), (1.0 / 64, 1.0 / 64))


def random_scalar(grid, rng, low=0.0, high=1.0):
    f = ScalarField(grid, rng.uniform(low, high, size=grid.dims))
    return apply_scalar_bc(f)


def random_vector(grid, rng, scale=1.0):
    """Random face field with zero wall-normal components."""
    v = VectorField(grid)
    for a, comp in enumerate(v.components):
        comp[...] = rng.uniform(-scale, scale, size=comp.shape)
    v.enforce_no_slip()
    return v
