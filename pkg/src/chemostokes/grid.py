"""Box domain, staggered field storage, boundary handling, discrete integration.

Layout (Arakawa C / MAC):
  - scalars live at cell centers; ScalarField arrays carry one ghost layer
    per side, filled by even reflection (homogeneous Neumann).
  - velocity components live on cell faces; component ``a`` has extent
    ``dims[a] + 1`` along its own axis and no ghost layer.  Boundary faces
    of a no-slip field hold exactly 0.

All boundary kinds are fixed at construction: scalars are no-flux,
velocities are no-slip.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Grid",
    "ScalarField",
    "VectorField",
    "InitialCondition",
    "integrate",
    "apply_scalar_bc",
]


class Grid:
    """Uniform Cartesian box in 2 or 3 dimensions.

    Cell centers sit at ``origin + (i + 1/2) * spacing`` per axis.
    """

    def __init__(self, dims, spacing, origin=None):
        dims = tuple(int(d) for d in dims)
        spacing = tuple(float(h) for h in spacing)
        if len(dims) not in (2, 3):
            raise ValueError("grid must have 2 or 3 axes, got %d" % len(dims))
        if len(spacing) != len(dims):
            raise ValueError("spacing must match dims in length")
        if any(d < 4 for d in dims):
            raise ValueError("each axis needs at least 4 cells, got %s" % (dims,))
        if any(not np.isfinite(h) or h <= 0.0 for h in spacing):
            raise ValueError("spacings must be positive and finite")
        if origin is None:
            origin = (0.0,) * len(dims)
        origin = tuple(float(x) for x in origin)
        if any(not np.isfinite(x) for x in origin):
            raise ValueError("origin must be finite")

        self.dims = dims
        self.spacing = spacing
        self.origin = origin

    @property
    def ndim(self):
        return len(self.dims)

    @property
    def cell_volume(self):
        return float(np.prod(self.spacing))

    @property
    def lengths(self):
        return tuple(d * h for d, h in zip(self.dims, self.spacing))

    @property
    def volume(self):
        return float(np.prod(self.lengths))

    def cell_centers(self, axis):
        """1-D coordinates of cell centers along ``axis``."""
        h = self.spacing[axis]
        return self.origin[axis] + (np.arange(self.dims[axis]) + 0.5) * h

    def face_coords(self, axis):
        """1-D coordinates of the faces normal to ``axis``."""
        h = self.spacing[axis]
        return self.origin[axis] + np.arange(self.dims[axis] + 1) * h

    def center_mesh(self):
        """Tuple of broadcastable coordinate arrays at cell centers."""
        return np.meshgrid(*[self.cell_centers(a) for a in range(self.ndim)],
                           indexing="ij", sparse=True)

    def face_shape(self, axis):
        """Array shape of the velocity component normal to ``axis``."""
        return tuple(d + 1 if a == axis else d
                     for a, d in enumerate(self.dims))

    def compatible(self, other):
        return (self.dims == other.dims and self.spacing == other.spacing
                and self.origin == other.origin)

    def __eq__(self, other):
        return isinstance(other, Grid) and self.compatible(other)

    def __repr__(self):
        return "Grid(dims=%r, spacing=%r, origin=%r)" % (
            self.dims, self.spacing, self.origin)


def _ghosted_shape(dims):
    return tuple(d + 2 for d in dims)


class ScalarField:
    """Cell-centered scalar with a one-cell ghost layer on every side."""

    def __init__(self, grid, interior=None):
        self.grid = grid
        self.values = np.zeros(_ghosted_shape(grid.dims))
        if interior is not None:
            interior = np.asarray(interior, dtype=float)
            if interior.shape != grid.dims:
                raise ValueError("interior shape %s does not match grid dims %s"
                                 % (interior.shape, grid.dims))
            if not np.all(np.isfinite(interior)):
                raise ValueError("scalar field values must be finite")
            self.interior[...] = interior

    @property
    def interior(self):
        core = tuple(slice(1, -1) for _ in self.grid.dims)
        return self.values[core]

    def copy(self):
        out = ScalarField(self.grid)
        out.values[...] = self.values
        return out

    def check_finite(self):
        if not np.all(np.isfinite(self.interior)):
            raise ValueError("scalar field contains NaN/Inf")
        return self

    def __repr__(self):
        return "ScalarField(grid=%r)" % (self.grid,)


class VectorField:
    """Face-centered vector field (one staggered component per axis)."""

    def __init__(self, grid, components=None):
        self.grid = grid
        if components is None:
            self.components = [np.zeros(grid.face_shape(a))
                               for a in range(grid.ndim)]
        else:
            if len(components) != grid.ndim:
                raise ValueError("need %d components" % grid.ndim)
            self.components = []
            for a, comp in enumerate(components):
                comp = np.asarray(comp, dtype=float)
                if comp.shape != grid.face_shape(a):
                    raise ValueError(
                        "component %d shape %s does not match staggered "
                        "extent %s" % (a, comp.shape, grid.face_shape(a)))
                if not np.all(np.isfinite(comp)):
                    raise ValueError("vector field values must be finite")
                self.components.append(comp.copy())

    def copy(self):
        return VectorField(self.grid, self.components)

    def enforce_no_slip(self):
        """Pin every boundary face of every component to exactly 0."""
        for a, comp in enumerate(self.components):
            # only faces normal to axis a lie on the wall; tangential
            # components sit half a cell inside and stay free
            lo = tuple(0 if c == a else slice(None)
                       for c in range(self.grid.ndim))
            hi = tuple(-1 if c == a else slice(None)
                       for c in range(self.grid.ndim))
            comp[lo] = 0.0
            comp[hi] = 0.0
        return self

    def max_norm(self):
        return max(float(np.max(np.abs(c))) if c.size else 0.0
                   for c in self.components)

    def check_finite(self):
        for comp in self.components:
            if not np.all(np.isfinite(comp)):
                raise ValueError("vector field contains NaN/Inf")
        return self

    def __repr__(self):
        return "VectorField(grid=%r)" % (self.grid,)


class InitialCondition:
    """Admissible initial data: n0, c0 >= 0, u0 discretely divergence-free."""

    def __init__(self, n0, c0, u0, div_tolerance=1e-10):
        if not (n0.grid.compatible(c0.grid) and n0.grid.compatible(u0.grid)):
            raise ValueError("initial fields must share one grid")
        if np.min(n0.interior) < 0.0:
            raise ValueError("n0 must be nonnegative")
        if np.min(c0.interior) < 0.0:
            raise ValueError("c0 must be nonnegative")
        n0.check_finite()
        c0.check_finite()
        u0.check_finite()
        from .operators import divergence  # local import avoids a cycle
        div = divergence(u0)
        dmax = float(np.max(np.abs(div.interior)))
        scale = max(u0.max_norm() / min(u0.grid.spacing), 1.0)
        if dmax > div_tolerance * scale:
            raise ValueError("u0 is not divergence-free: |div u0|_inf = %g" % dmax)
        self.n0 = n0
        self.c0 = c0
        self.u0 = u0


def integrate(f: ScalarField) -> float:
    """Discrete integral: sum of cell values times cell volume.

    Exact for cell-constant data (midpoint rule).
    """
    return float(np.sum(f.interior)) * f.grid.cell_volume


def apply_scalar_bc(f: ScalarField) -> ScalarField:
    """Fill the ghost layer by even reflection (homogeneous Neumann).

    Interior values are untouched; the operation is idempotent.  Corner
    ghosts are filled by applying the reflection axis by axis.
    """
    v = f.values
    for a in range(f.grid.ndim):
        lo_ghost = tuple(0 if c == a else slice(None) for c in range(v.ndim))
        lo_cell = tuple(1 if c == a else slice(None) for c in range(v.ndim))
        hi_ghost = tuple(-1 if c == a else slice(None) for c in range(v.ndim))
        hi_cell = tuple(-2 if c == a else slice(None) for c in range(v.ndim))
        v[lo_ghost] = v[lo_cell]
        v[hi_ghost] = v[hi_cell]
    return f
