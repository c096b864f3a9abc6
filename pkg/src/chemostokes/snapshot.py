"""Binary snapshot format.

Little-endian layout:
  magic "CSTK" | version u32 | ndim u32 | dims u32*ndim | spacing f64*ndim
  | time f64 | field_count u32
  | per field: name_len u32, name utf-8, staggering u32
  | raw f64 payloads in axis-major (C) order, in field order.

Staggering tags: 0 = cell-centered, 1+a = face-centered along axis a.
"""

from __future__ import annotations

import struct

import numpy as np

from .grid import Grid, ScalarField, VectorField
from .timestepper import SimState

__all__ = [
    "write_snapshot",
    "read_snapshot",
    "write_state_snapshot",
    "read_state_snapshot",
]

MAGIC = b"CSTK"
VERSION = 1


def write_snapshot(path, grid: Grid, time: float, fields):
    """Write named arrays; ``fields`` is a list of (name, tag, ndarray)."""
    with open(path, "wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<II", VERSION, grid.ndim))
        fh.write(struct.pack("<%dI" % grid.ndim, *grid.dims))
        fh.write(struct.pack("<%dd" % grid.ndim, *grid.spacing))
        fh.write(struct.pack("<d", time))
        fh.write(struct.pack("<I", len(fields)))
        for name, tag, arr in fields:
            raw = name.encode("utf-8")
            fh.write(struct.pack("<I", len(raw)))
            fh.write(raw)
            fh.write(struct.pack("<I", tag))
        for name, tag, arr in fields:
            expected = grid.dims if tag == 0 else grid.face_shape(tag - 1)
            arr = np.ascontiguousarray(arr, dtype="<f8")
            if arr.shape != expected:
                raise ValueError("field %r shape %s does not match tag %d"
                                 % (name, arr.shape, tag))
            fh.write(arr.tobytes())


def read_snapshot(path):
    """Read a snapshot; returns (grid, time, [(name, tag, array), ...])."""
    with open(path, "rb") as fh:
        if fh.read(4) != MAGIC:
            raise ValueError("%s: bad magic, not a snapshot file" % path)
        version, ndim = struct.unpack("<II", fh.read(8))
        if version != VERSION:
            raise ValueError("unsupported snapshot version %d" % version)
        dims = struct.unpack("<%dI" % ndim, fh.read(4 * ndim))
        spacing = struct.unpack("<%dd" % ndim, fh.read(8 * ndim))
        (time,) = struct.unpack("<d", fh.read(8))
        (count,) = struct.unpack("<I", fh.read(4))
        grid = Grid(dims, spacing)
        meta = []
        for _ in range(count):
            (name_len,) = struct.unpack("<I", fh.read(4))
            name = fh.read(name_len).decode("utf-8")
            (tag,) = struct.unpack("<I", fh.read(4))
            meta.append((name, tag))
        fields = []
        for name, tag in meta:
            shape = grid.dims if tag == 0 else grid.face_shape(tag - 1)
            n_vals = int(np.prod(shape))
            arr = np.frombuffer(fh.read(8 * n_vals), dtype="<f8").reshape(shape)
            fields.append((name, tag, arr.copy()))
    return grid, time, fields


def write_state_snapshot(path, state: SimState):
    g = state.n.grid
    fields = [("n", 0, state.n.interior),
              ("c", 0, state.c.interior),
              ("pi", 0, state.pi.interior)]
    for a in range(g.ndim):
        fields.append(("u%d" % a, 1 + a, state.u.components[a]))
    write_snapshot(path, g, state.t, fields)


def read_state_snapshot(path) -> SimState:
    grid, time, fields = read_snapshot(path)
    named = {name: (tag, arr) for name, tag, arr in fields}
    n = ScalarField(grid, named["n"][1])
    c = ScalarField(grid, named["c"][1])
    pi = ScalarField(grid, named["pi"][1])
    comps = [named["u%d" % a][1] for a in range(grid.ndim)]
    return SimState(n, c, VectorField(grid, comps), pi, time)
