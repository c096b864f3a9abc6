import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from chemostokes.errors import DegenerateInputError, NotSolenoidalError
from chemostokes.grid import Grid, ScalarField, VectorField, apply_scalar_bc, integrate
from chemostokes.operators import (FluxSpec, advect, chemo_flux, divergence,
                                   gradient, laplacian, pm_flux)
from chemostokes.verification import barenblatt_profile, rotation_velocity

from conftest import random_scalar, random_vector


def field_from_profile(grid, profile_1d):
    arr = profile_1d[:, None] * np.ones((1, grid.dims[1]))
    return apply_scalar_bc(ScalarField(grid, arr))


class TestFluxSpec:
    def test_valid(self):
        spec = FluxSpec(m=1.5, chi=2.0, epsilon=0.5)
        assert spec.m == 1.5

    @pytest.mark.parametrize("kwargs", [
        dict(m=1.0, chi=1.0, epsilon=0.0),
        dict(m=2.0, chi=0.0, epsilon=0.0),
        dict(m=2.0, chi=1.0, epsilon=-0.1),
        dict(m=2.0, chi=1.0, epsilon=1.5),
    ])
    def test_rejects_out_of_range(self, kwargs):
        with pytest.raises(ValueError):
            FluxSpec(**kwargs)


class TestGradient:
    def test_constant_gives_zero(self, unit_grid_16):
        f = apply_scalar_bc(ScalarField(unit_grid_16,
                                        np.full(unit_grid_16.dims, 3.0)))
        g = gradient(f)
        for comp in g.components:
            assert np.all(comp == 0.0)

    def test_linear_gives_unit_interior(self):
        grid = Grid((8, 4), (0.125, 0.25))
        x = grid.cell_centers(0)
        f = field_from_profile(grid, x)
        g = gradient(f)
        np.testing.assert_allclose(g.components[0][1:-1, :], 1.0, atol=1e-13)
        # Neumann boundary faces carry zero normal component
        assert np.all(g.components[0][0, :] == 0.0)
        assert np.all(g.components[0][-1, :] == 0.0)

    def test_sine_second_order(self):
        errors = []
        for nx in (32, 64):
            grid = Grid((nx, 4), (1.0 / nx, 0.25))
            x = grid.cell_centers(0)
            f = field_from_profile(grid, np.sin(2 * np.pi * x))
            g = gradient(f)
            xf = grid.face_coords(0)[1:-1]
            exact = 2 * np.pi * np.cos(2 * np.pi * xf)
            errors.append(np.max(np.abs(g.components[0][1:-1, 0] - exact)))
        ratio = errors[0] / errors[1]
        assert ratio == pytest.approx(4.0, rel=0.10)


class TestDivergence:
    def test_constant_field_zero_interior(self, unit_grid_16):
        v = VectorField(unit_grid_16)
        for comp in v.components:
            comp[...] = 2.0
        d = divergence(v)
        assert np.max(np.abs(d.interior)) == 0.0

    def test_grad_of_mode_matches_eigenvalue(self):
        errs = []
        for nx in (32, 64):
            grid = Grid((nx, 4), (1.0 / nx, 0.25))
            x = grid.cell_centers(0)
            f = field_from_profile(grid, np.cos(np.pi * x))
            lap = divergence(gradient(f))
            exact = -(np.pi ** 2) * np.cos(np.pi * x)
            errs.append(np.max(np.abs(lap.interior[:, 0] - exact)))
        assert errs[1] < errs[0] / 3.0  # ~O(h^2)

    @given(seed=st.integers(0, 2 ** 31))
    @settings(max_examples=20, deadline=None)
    def test_adjoint_of_gradient(self, seed):
        grid = Grid((12, 10), (1.0 / 12, 1.0 / 10))
        rng = np.random.default_rng(seed)
        f = random_scalar(grid, rng)
        v = random_vector(grid, rng)
        vol = grid.cell_volume
        lhs = np.sum(divergence(v).interior * f.interior) * vol
        g = gradient(f)
        rhs = sum(np.sum(gc * vc) for gc, vc in
                  zip(g.components, v.components)) * vol
        scale = max(abs(lhs), abs(rhs), 1.0)
        assert abs(lhs + rhs) <= 1e-12 * scale


class TestLaplacian:
    def test_linear_gives_zero(self):
        grid = Grid((8, 8), (0.125, 0.125))
        x = grid.cell_centers(0)
        f = field_from_profile(grid, 2.0 * x + 1.0)
        lap = laplacian(f)
        assert np.max(np.abs(lap.interior[1:-1, :])) <= 1e-12

    def test_equals_div_grad_bitwise(self, unit_grid_16):
        rng = np.random.default_rng(5)
        f = random_scalar(unit_grid_16, rng)
        a = laplacian(f).interior
        b = divergence(gradient(f)).interior
        np.testing.assert_array_equal(a, b)


class TestPorousMediumFlux:
    def test_constant_zero_flux(self, unit_grid_16):
        n = apply_scalar_bc(ScalarField(unit_grid_16,
                                        np.full(unit_grid_16.dims, 2.0)))
        flux = pm_flux(n, FluxSpec(m=2.0, chi=1.0, epsilon=0.1))
        for comp in flux.components:
            assert np.all(comp == 0.0)

    def test_degenerate_outside_support(self):
        # epsilon = 0 and n = 0 in a region: the flux vanishes there even
        # where grad n is nonzero one cell inside the support edge
        grid = Grid((16, 4), (0.25, 0.25))
        arr = np.zeros(grid.dims)
        arr[6:10, :] = 1.0
        n = apply_scalar_bc(ScalarField(grid, arr))
        flux = pm_flux(n, FluxSpec(m=3.0, chi=1.0, epsilon=0.0))
        fx = flux.components[0]
        assert np.all(fx[:5, :] == 0.0)
        assert np.all(fx[12:, :] == 0.0)

    def test_rejects_negative_density(self, unit_grid_16):
        arr = np.full(unit_grid_16.dims, 1.0)
        arr[3, 3] = -1e-6
        n = apply_scalar_bc(ScalarField(unit_grid_16, arr))
        with pytest.raises(DegenerateInputError):
            pm_flux(n, FluxSpec(m=2.0, chi=1.0, epsilon=0.0))

    @pytest.mark.parametrize("eps_pair", [(0.0, 0.1), (0.1, 0.5), (0.5, 1.0)])
    def test_flux_magnitude_nondecreasing_in_epsilon(self, unit_grid_16,
                                                     eps_pair):
        rng = np.random.default_rng(2)
        n = random_scalar(unit_grid_16, rng, low=0.0, high=2.0)
        lo, hi = eps_pair
        f_lo = pm_flux(n, FluxSpec(m=1.5, chi=1.0, epsilon=lo))
        f_hi = pm_flux(n, FluxSpec(m=1.5, chi=1.0, epsilon=hi))
        for a, b in zip(f_lo.components, f_hi.components):
            assert np.all(np.abs(b) >= np.abs(a) - 1e-15)

    def test_barenblatt_residual_converges(self):
        # L1 error of div(pm_flux(n)) against the analytic time derivative.
        # The front kink limits this residual to first order (the
        # time-evolved solution itself converges much faster; see the
        # barenblatt convergence study).
        m, mass, t = 2.0, 0.25, 1.0
        spec = FluxSpec(m=m, chi=1.0, epsilon=0.0)
        errors = []
        for nx in (64, 128, 256):
            h = 4.0 / nx
            grid = Grid((nx, 4), (h, 0.25), origin=(-2.0, 0.0))
            x = grid.cell_centers(0)
            n = field_from_profile(grid, barenblatt_profile(x, t, m, mass))
            rate = divergence(pm_flux(n, spec))
            dt = 1e-7
            exact = (barenblatt_profile(x, t + dt, m, mass)
                     - barenblatt_profile(x, t - dt, m, mass)) / (2 * dt)
            errors.append(np.sum(np.abs(rate.interior[:, 0] - exact)) * h)
        order = np.polyfit(np.log([64, 128, 256]), np.log(errors), 1)[0]
        assert -order >= 0.8


class TestChemotaxisFlux:
    def test_flat_c_zero(self, unit_grid_16):
        rng = np.random.default_rng(1)
        n = random_scalar(unit_grid_16, rng, low=0.0, high=2.0)
        c = apply_scalar_bc(ScalarField(unit_grid_16,
                                        np.full(unit_grid_16.dims, 0.7)))
        flux = chemo_flux(n, c, FluxSpec(m=2.0, chi=3.0, epsilon=0.0))
        for comp in flux.components:
            assert np.all(comp == 0.0)

    def test_zero_density_zero(self, unit_grid_16):
        rng = np.random.default_rng(1)
        n = apply_scalar_bc(ScalarField(unit_grid_16))
        c = random_scalar(unit_grid_16, rng)
        flux = chemo_flux(n, c, FluxSpec(m=2.0, chi=3.0, epsilon=0.0))
        for comp in flux.components:
            assert np.all(comp == 0.0)

    def test_linear_c_interior_value(self):
        grid = Grid((16, 4), (1.0 / 16, 0.25))
        n = apply_scalar_bc(ScalarField(grid, np.ones(grid.dims)))
        x = grid.cell_centers(0)
        c = field_from_profile(grid, x)
        flux = chemo_flux(n, c, FluxSpec(m=2.0, chi=2.0, epsilon=0.0))
        np.testing.assert_allclose(flux.components[0][1:-1, :], 2.0,
                                   atol=1e-12)

    def test_zero_normal_boundary_flux(self, unit_grid_16):
        rng = np.random.default_rng(4)
        n = random_scalar(unit_grid_16, rng, low=0.0, high=1.0)
        c = random_scalar(unit_grid_16, rng)
        spec = FluxSpec(m=1.5, chi=1.0, epsilon=0.2)
        for flux in (chemo_flux(n, c, spec), pm_flux(n, spec)):
            for a, comp in enumerate(flux.components):
                lo = tuple(0 if b == a else slice(None) for b in range(2))
                hi = tuple(-1 if b == a else slice(None) for b in range(2))
                assert np.all(comp[lo] == 0.0)
                assert np.all(comp[hi] == 0.0)


class TestAdvect:
    def test_zero_velocity(self, unit_grid_16):
        rng = np.random.default_rng(8)
        q = random_scalar(unit_grid_16, rng)
        out = advect(q, VectorField(unit_grid_16))
        assert np.all(out.interior == 0.0)

    def test_constant_scalar_solenoidal_velocity(self, unit_grid_32):
        q = apply_scalar_bc(ScalarField(unit_grid_32,
                                        np.full(unit_grid_32.dims, 1.7)))
        u = rotation_velocity(unit_grid_32)
        out = advect(q, u)
        assert abs(integrate(out)) <= 1e-12

    def test_integral_vanishes_for_any_scalar(self, unit_grid_32):
        rng = np.random.default_rng(9)
        q = random_scalar(unit_grid_32, rng)
        u = rotation_velocity(unit_grid_32)
        assert abs(integrate(advect(q, u))) <= 1e-12

    def test_rejects_divergent_velocity(self, unit_grid_16):
        rng = np.random.default_rng(10)
        q = random_scalar(unit_grid_16, rng)
        u = random_vector(unit_grid_16, rng)  # not projected
        with pytest.raises(NotSolenoidalError):
            advect(q, u)
