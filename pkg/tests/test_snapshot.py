import numpy as np
import pytest

from chemostokes.grid import Grid, ScalarField
from chemostokes.snapshot import (read_snapshot, read_state_snapshot,
                                  write_snapshot, write_state_snapshot)
from chemostokes.timestepper import SimState

from conftest import random_vector


class TestRawSnapshot:
    def test_roundtrip_bit_exact(self, tmp_path, unit_grid_16):
        rng = np.random.default_rng(0)
        cell = rng.standard_normal(unit_grid_16.dims)
        face = rng.standard_normal(unit_grid_16.face_shape(1))
        path = tmp_path / "s.cstk"
        write_snapshot(path, unit_grid_16, 1.25,
                       [("a", 0, cell), ("u1", 2, face)])
        grid, time, fields = read_snapshot(path)
        assert grid == unit_grid_16
        assert time == 1.25
        (na, ta, aa), (nb, tb, ab) = fields
        assert (na, ta) == ("a", 0) and (nb, tb) == ("u1", 2)
        assert aa.tobytes() == cell.tobytes()
        assert ab.tobytes() == face.tobytes()

    def test_rejects_shape_mismatch(self, tmp_path, unit_grid_16):
        bad = np.zeros((3, 3))
        with pytest.raises(ValueError):
            write_snapshot(tmp_path / "x.cstk", unit_grid_16, 0.0,
                           [("a", 0, bad)])

    def test_rejects_bad_magic(self, tmp_path):
        path = tmp_path / "junk.cstk"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(ValueError):
            read_snapshot(path)

    def test_repeat_write_byte_identical(self, tmp_path, unit_grid_16):
        rng = np.random.default_rng(1)
        cell = rng.standard_normal(unit_grid_16.dims)
        a = tmp_path / "a.cstk"
        b = tmp_path / "b.cstk"
        for p in (a, b):
            write_snapshot(p, unit_grid_16, 0.5, [("n", 0, cell)])
        assert a.read_bytes() == b.read_bytes()

    def test_3d(self, tmp_path):
        grid = Grid((4, 6, 8), (0.25, 0.2, 0.125))
        rng = np.random.default_rng(2)
        face = rng.standard_normal(grid.face_shape(2))
        path = tmp_path / "v.cstk"
        write_snapshot(path, grid, 0.0, [("u2", 3, face)])
        g2, _, fields = read_snapshot(path)
        assert g2 == grid
        assert fields[0][2].shape == grid.face_shape(2)


class TestStateSnapshot:
    def test_roundtrip(self, tmp_path, unit_grid_16):
        rng = np.random.default_rng(3)
        state = SimState(
            ScalarField(unit_grid_16, rng.uniform(0, 1, unit_grid_16.dims)),
            ScalarField(unit_grid_16, rng.uniform(0, 1, unit_grid_16.dims)),
            random_vector(unit_grid_16, rng),
            ScalarField(unit_grid_16, rng.standard_normal(unit_grid_16.dims)),
            2.5)
        path = tmp_path / "state.cstk"
        write_state_snapshot(path, state)
        back = read_state_snapshot(path)
        assert back.t == 2.5
        np.testing.assert_array_equal(back.n.interior, state.n.interior)
        np.testing.assert_array_equal(back.c.interior, state.c.interior)
        np.testing.assert_array_equal(back.pi.interior, state.pi.interior)
        for a, b in zip(back.u.components, state.u.components):
            np.testing.assert_array_equal(a, b)
