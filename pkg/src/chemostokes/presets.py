"""Initial-condition presets and the gravitational potential builder."""

from __future__ import annotations

import numpy as np

from .grid import Grid, InitialCondition, ScalarField, VectorField
from .stokes import StokesWorkspace, project_div_free

__all__ = ["make_initial", "linear_potential", "mollify"]

PRESETS = ("constant", "gaussian-blob", "stratified-oxygen", "random-perturbed")


def linear_potential(grid: Grid, direction, magnitude: float) -> ScalarField:
    """phi = magnitude * (x . direction), i.e. constant gravity grad(phi)."""
    direction = np.asarray(direction, dtype=float)
    if direction.shape != (grid.ndim,):
        raise ValueError("direction must have %d components" % grid.ndim)
    norm = float(np.linalg.norm(direction))
    if norm == 0.0:
        return ScalarField(grid)
    direction = direction / norm
    mesh = grid.center_mesh()
    phi = np.zeros(grid.dims)
    for a in range(grid.ndim):
        phi = phi + magnitude * direction[a] * mesh[a]
    return ScalarField(grid, phi)


def mollify(arr, passes: int = 1):
    """Mass-preserving 3-point smoothing (kernel width 2h), reflecting walls."""
    out = np.array(arr, dtype=float)
    nd = out.ndim
    for _ in range(passes):
        for a in range(nd):
            p = np.pad(out, [(1, 1) if b == a else (0, 0) for b in range(nd)],
                       mode="symmetric")
            sl = lambda s: tuple(s if b == a else slice(None) for b in range(nd))
            out = 0.25 * p[sl(slice(None, -2))] + 0.5 * out + 0.25 * p[sl(slice(2, None))]
    return out


def _gaussian(grid, center, sigma):
    mesh = grid.center_mesh()
    r2 = np.zeros(grid.dims)
    for a in range(grid.ndim):
        r2 = r2 + (mesh[a] - center[a]) ** 2
    return np.exp(-0.5 * r2 / sigma ** 2)


def make_initial(grid: Grid, preset: str, **params) -> InitialCondition:
    """Build an admissible initial condition from a named preset.

    Presets:
      constant            n, c uniform (keys: n, c), fluid at rest
      gaussian-blob       n a Gaussian renormalized to a prescribed total
                          mass (keys: center, sigma, mass, c)
      stratified-oxygen   uniform n, c ramping linearly up the last axis
                          (keys: n, c_top)
      random-perturbed    seeded noise around uniform n, c plus a weak
                          solenoidal velocity; scalars get one mollification
                          pass of width 2h (keys: seed, n, c, amplitude,
                          u_amplitude)

    Negative amplitudes for n or c are rejected; the velocity is projected
    divergence-free before return.
    """
    if preset not in PRESETS:
        raise ValueError("unknown preset %r (choose from %s)" % (preset, PRESETS))

    u0 = VectorField(grid)

    if preset == "constant":
        n_amp = float(params.pop("n", 1.0))
        c_amp = float(params.pop("c", 1.0))
        _reject_unknown(params)
        _reject_negative(n=n_amp, c=c_amp)
        n0 = ScalarField(grid, np.full(grid.dims, n_amp))
        c0 = ScalarField(grid, np.full(grid.dims, c_amp))

    elif preset == "gaussian-blob":
        center = params.pop("center", tuple(o + 0.5 * L for o, L in
                                            zip(grid.origin, grid.lengths)))
        sigma = float(params.pop("sigma", min(grid.lengths) / 8.0))
        mass = float(params.pop("mass", 1.0))
        c_amp = float(params.pop("c", 1.0))
        _reject_unknown(params)
        _reject_negative(mass=mass, c=c_amp, sigma=sigma)
        blob = _gaussian(grid, center, sigma)
        blob *= mass / (np.sum(blob) * grid.cell_volume)
        n0 = ScalarField(grid, blob)
        c0 = ScalarField(grid, np.full(grid.dims, c_amp))

    elif preset == "stratified-oxygen":
        n_amp = float(params.pop("n", 1.0))
        c_top = float(params.pop("c_top", 1.0))
        _reject_unknown(params)
        _reject_negative(n=n_amp, c_top=c_top)
        axis = grid.ndim - 1
        frac = (grid.cell_centers(axis) - grid.origin[axis]) / grid.lengths[axis]
        shape = [1] * grid.ndim
        shape[axis] = grid.dims[axis]
        c0 = ScalarField(grid, np.broadcast_to(
            c_top * frac.reshape(shape), grid.dims).copy())
        n0 = ScalarField(grid, np.full(grid.dims, n_amp))

    else:  # random-perturbed
        seed = int(params.pop("seed", 0))
        n_amp = float(params.pop("n", 1.0))
        c_amp = float(params.pop("c", 1.0))
        rel = float(params.pop("amplitude", 0.1))
        u_amp = float(params.pop("u_amplitude", 0.0))
        _reject_unknown(params)
        _reject_negative(n=n_amp, c=c_amp)
        rng = np.random.default_rng(seed)
        n_arr = n_amp * (1.0 + rel * rng.uniform(-1.0, 1.0, grid.dims))
        c_arr = c_amp * (1.0 + rel * rng.uniform(-1.0, 1.0, grid.dims))
        n0 = ScalarField(grid, np.maximum(mollify(n_arr), 0.0))
        c0 = ScalarField(grid, np.maximum(mollify(c_arr), 0.0))
        if u_amp != 0.0:
            comps = [u_amp * rng.uniform(-1.0, 1.0, grid.face_shape(a))
                     for a in range(grid.ndim)]
            u0 = VectorField(grid, comps)

    ws = StokesWorkspace(grid)
    u0, _ = project_div_free(u0, ws)
    return InitialCondition(n0, c0, u0)


def _reject_negative(**named):
    for name, value in named.items():
        if value < 0.0:
            raise ValueError("preset parameter %r must be nonnegative, got %g"
                             % (name, value))


def _reject_unknown(params):
    if params:
        raise ValueError("unknown preset parameters: %s" % sorted(params))
