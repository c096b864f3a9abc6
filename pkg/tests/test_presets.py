import numpy as np
import pytest

from chemostokes.grid import integrate
from chemostokes.operators import divergence
from chemostokes.presets import linear_potential, make_initial, mollify


class TestMakeInitial:
    def test_constant(self, unit_grid_16):
        ic = make_initial(unit_grid_16, "constant", n=2.0, c=0.5)
        assert np.all(ic.n0.interior == 2.0)
        assert np.all(ic.c0.interior == 0.5)
        assert ic.u0.max_norm() == 0.0

    def test_blob_mass_exact(self, unit_grid_32):
        ic = make_initial(unit_grid_32, "gaussian-blob", mass=0.7, sigma=0.1)
        assert np.min(ic.n0.interior) >= 0.0
        assert integrate(ic.n0) == pytest.approx(0.7, rel=1e-13)

    def test_stratified_ramp(self, unit_grid_16):
        ic = make_initial(unit_grid_16, "stratified-oxygen", n=1.0, c_top=2.0)
        col = ic.c0.interior[0, :]
        diffs = np.diff(col)
        assert np.all(diffs > 0)
        np.testing.assert_allclose(diffs, diffs[0])

    def test_random_seed_determinism(self, unit_grid_16):
        a = make_initial(unit_grid_16, "random-perturbed", seed=11,
                         u_amplitude=0.1)
        b = make_initial(unit_grid_16, "random-perturbed", seed=11,
                         u_amplitude=0.1)
        assert a.n0.interior.tobytes() == b.n0.interior.tobytes()
        assert a.c0.interior.tobytes() == b.c0.interior.tobytes()
        for ca, cb in zip(a.u0.components, b.u0.components):
            assert ca.tobytes() == cb.tobytes()

    def test_random_velocity_is_solenoidal(self, unit_grid_16):
        ic = make_initial(unit_grid_16, "random-perturbed", seed=3,
                          u_amplitude=0.5)
        div = divergence(ic.u0)
        assert np.max(np.abs(div.interior)) <= 1e-8

    def test_rejects_negative_amplitude(self, unit_grid_16):
        with pytest.raises(ValueError):
            make_initial(unit_grid_16, "constant", n=-1.0)
        with pytest.raises(ValueError):
            make_initial(unit_grid_16, "gaussian-blob", mass=-0.5)

    def test_rejects_unknown_preset_and_params(self, unit_grid_16):
        with pytest.raises(ValueError):
            make_initial(unit_grid_16, "vortex-sheet")
        with pytest.raises(ValueError):
            make_initial(unit_grid_16, "constant", wobble=3)


class TestLinearPotential:
    def test_constant_gradient(self, unit_grid_16):
        phi = linear_potential(unit_grid_16, (1.0, 0.0), 2.0)
        col = phi.interior[:, 0]
        np.testing.assert_allclose(np.diff(col), 2.0 / 16, atol=1e-14)

    def test_zero_direction_gives_zero(self, unit_grid_16):
        phi = linear_potential(unit_grid_16, (0.0, 0.0), 5.0)
        assert np.all(phi.interior == 0.0)

    def test_direction_normalized(self, unit_grid_16):
        a = linear_potential(unit_grid_16, (0.0, 1.0), 1.0)
        b = linear_potential(unit_grid_16, (0.0, 10.0), 1.0)
        np.testing.assert_allclose(a.interior, b.interior)


class TestMollify:
    def test_preserves_total(self):
        rng = np.random.default_rng(0)
        arr = rng.uniform(0.0, 1.0, (16, 16))
        out = mollify(arr, passes=3)
        assert np.sum(out) == pytest.approx(np.sum(arr), rel=1e-13)

    def test_smooths(self):
        arr = np.zeros((16, 16))
        arr[8, 8] = 1.0
        out = mollify(arr)
        assert out[8, 8] == pytest.approx(0.25)
        assert out[7, 8] == pytest.approx(0.125)
