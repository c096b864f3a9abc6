"""Discrete differential operators and the nonlinear fluxes.

Everything is flux-form on the staggered layout: gradients live on faces,
divergences on cell centers, and every boundary-normal flux is exactly
zero, so total mass is invariant under any combination of these fluxes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateInputError, NotSolenoidalError
from .grid import ScalarField, VectorField

__all__ = [
    "FluxSpec",
    "gradient",
    "divergence",
    "laplacian",
    "pm_flux",
    "chemo_flux",
    "advect",
]

NEGATIVITY_TOL = 1e-12
DIV_TOL = 1e-8


@dataclass(frozen=True)
class FluxSpec:
    """Porous-medium exponent m, chemotactic sensitivity chi, regularization epsilon."""

    m: float
    chi: float
    epsilon: float = 0.0

    def __post_init__(self):
        if not self.m > 1.0:
            raise ValueError("diffusion exponent must satisfy m > 1, got %g" % self.m)
        if not self.chi > 0.0:
            raise ValueError("sensitivity must satisfy chi > 0, got %g" % self.chi)
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError("regularization must lie in [0, 1], got %g" % self.epsilon)


def _axis_pair(arr, axis):
    """(left, right) cell slabs adjacent to the interior faces along ``axis``."""
    nd = arr.ndim
    left = tuple(slice(None, -1) if a == axis else slice(None) for a in range(nd))
    right = tuple(slice(1, None) if a == axis else slice(None) for a in range(nd))
    return arr[left], arr[right]


def _interior_faces(shape_axis_len, axis, nd):
    return tuple(slice(1, -1) if a == axis else slice(None) for a in range(nd))


def gradient(f: ScalarField) -> VectorField:
    """Face-centered gradient; boundary-normal components are 0 (Neumann)."""
    g = f.grid
    out = VectorField(g)
    fi = f.interior
    for a in range(g.ndim):
        comp = out.components[a]
        inner = _interior_faces(None, a, g.ndim)
        comp[inner] = np.diff(fi, axis=a) / g.spacing[a]
    return out


def divergence(v: VectorField) -> ScalarField:
    """Cell-centered flux difference; discrete adjoint of -gradient."""
    g = v.grid
    out = ScalarField(g)
    acc = out.interior
    for a in range(g.ndim):
        acc += np.diff(v.components[a], axis=a) / g.spacing[a]
    return out


def laplacian(f: ScalarField) -> ScalarField:
    """Second-order Neumann Laplacian, literally divergence(gradient(f))."""
    return divergence(gradient(f))


def pm_flux(n: ScalarField, spec: FluxSpec) -> VectorField:
    """Regularized porous-medium flux m (eps + n)^(m-1) grad n on faces.

    The face mobility uses the arithmetic mean of the adjacent cells.
    Boundary-normal components are exactly zero.
    """
    if float(np.min(n.interior)) < -NEGATIVITY_TOL:
        raise DegenerateInputError(
            "density has negative values below -%g" % NEGATIVITY_TOL)
    g = n.grid
    ni = np.maximum(n.interior, 0.0)
    out = VectorField(g)
    for a in range(g.ndim):
        left, right = _axis_pair(ni, a)
        n_face = 0.5 * (left + right)
        mobility = spec.m * (spec.epsilon + n_face) ** (spec.m - 1.0)
        inner = _interior_faces(None, a, g.ndim)
        out.components[a][inner] = mobility * (right - left) / g.spacing[a]
    return out


def chemo_flux(n: ScalarField, c: ScalarField, spec: FluxSpec) -> VectorField:
    """Chemotactic drift flux chi * n_upwind * grad c on faces.

    The density is taken from the donor cell relative to the drift
    direction sign(grad c), which preserves positivity of n under the
    transport CFL.  Boundary-normal components are exactly zero, so the
    combined zero-flux condition holds discretely.
    """
    g = n.grid
    ni = n.interior
    ci = c.interior
    out = VectorField(g)
    for a in range(g.ndim):
        nl, nr = _axis_pair(ni, a)
        cl, cr = _axis_pair(ci, a)
        dc = (cr - cl) / g.spacing[a]
        n_up = np.where(dc > 0.0, nl, nr)
        inner = _interior_faces(None, a, g.ndim)
        out.components[a][inner] = spec.chi * n_up * dc
    return out


def advect(q: ScalarField, u: VectorField, div_tolerance: float = DIV_TOL) -> ScalarField:
    """Conservative upwind transport div(u q).

    Requires u discretely solenoidal and no-slip; then the discrete
    integral of the result is zero to rounding.
    """
    g = q.grid
    div_u = divergence(u)
    dmax = float(np.max(np.abs(div_u.interior)))
    scale = max(u.max_norm() / min(g.spacing), 1.0)
    if dmax > div_tolerance * scale:
        raise NotSolenoidalError(
            "|div u|_inf = %g exceeds tolerance %g" % (dmax, div_tolerance * scale))

    qi = q.interior
    out = ScalarField(g)
    acc = out.interior
    for a in range(g.ndim):
        ql, qr = _axis_pair(qi, a)
        uf = u.components[a][_interior_faces(None, a, g.ndim)]
        flux_inner = uf * np.where(uf > 0.0, ql, qr)
        flux = np.zeros(g.face_shape(a))
        flux[_interior_faces(None, a, g.ndim)] = flux_inner
        acc += np.diff(flux, axis=a) / g.spacing[a]
    return out
