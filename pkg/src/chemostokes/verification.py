"""Convergence studies against closed-form oracles.

Presets:
  heat-mode           Neumann cosine eigenmode of the oxygen diffusion;
                      the decay rate must approach (pi/L)^2 at second order.
  barenblatt          self-similar compactly supported porous-medium
                      profile advanced by the coupled stepper with the
                      drift and fluid switched off.
  stokes-manufactured steady forced Stokes flow with a closed-form
                      divergence-free velocity, run to steady state.
  rotation-advection  rigid-body rotation of a blob through one full
                      revolution; conservative upwind must conserve mass
                      to rounding.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import Grid, ScalarField, VectorField, integrate
from .operators import FluxSpec, advect
from .stokes import StokesWorkspace, project_div_free, stokes_step
from .timestepper import SimParams, SimState, stable_dt, step

__all__ = [
    "ConvergenceResult",
    "CONVERGENCE_PRESETS",
    "run_convergence",
    "barenblatt_profile",
    "heat_mode_study",
    "barenblatt_study",
    "stokes_manufactured_study",
    "rotation_advection_study",
]


@dataclass
class ConvergenceResult:
    preset: str
    resolutions: list
    errors: list
    order: float
    threshold: float
    extra: dict

    @property
    def passed(self):
        if self.preset == "rotation-advection":
            return all(e <= self.threshold for e in self.extra["mass_errors"])
        return self.order >= self.threshold

    def table(self):
        lines = ["preset=%s threshold=%g order=%.3f pass=%s"
                 % (self.preset, self.threshold, self.order,
                    str(self.passed).lower())]
        lines.append("resolution,error")
        for n, e in zip(self.resolutions, self.errors):
            lines.append("%d,%.6e" % (n, e))
        for key, vals in self.extra.items():
            lines.append("%s,%s" % (key, ",".join("%.6e" % v for v in vals)))
        return "\n".join(lines)


def _fit_order(resolutions, errors):
    if len(resolutions) < 2:
        return float("nan")
    logs_h = np.log(1.0 / np.asarray(resolutions, dtype=float))
    logs_e = np.log(np.asarray(errors, dtype=float))
    slope = np.polyfit(logs_h, logs_e, 1)[0]
    return float(slope)


# ---------------------------------------------------------------------------
# heat mode


def heat_mode_study(resolutions=(16, 32, 64), t_end=0.05):
    """Decay-rate error of c0 = 1 + A cos(pi x / L) under pure diffusion.

    Runs the full coupled stepper with n = 0 and u = 0, so only the
    implicit oxygen diffusion acts.  dt scales with h^2 so the implicit
    Euler rate error refines together with the spatial one.
    """
    L = 1.0
    rate_exact = (np.pi / L) ** 2
    errors = []
    rates = []
    for nx in resolutions:
        g = Grid((nx, 4), (L / nx, 0.25))
        x = g.cell_centers(0)
        mode = np.cos(np.pi * x / L)
        c0 = 1.0 + 0.5 * mode[:, None] * np.ones((1, 4))
        spec = FluxSpec(m=2.0, chi=1.0, epsilon=0.0)
        dt = 0.2 * (L / nx) ** 2
        params = SimParams(flux=spec, phi=ScalarField(g), t_end=t_end,
                           dt_init=dt, dt_max=dt)
        ws = StokesWorkspace(g)
        state = SimState(ScalarField(g), ScalarField(g, c0), VectorField(g),
                         ScalarField(g), 0.0)
        steps = int(round(t_end / dt))
        for _ in range(steps):
            state = step(state, params, ws, dt)
        amp0 = _mode_amplitude(1.0 + 0.5 * mode, mode)
        amp1 = _mode_amplitude(np.mean(state.c.interior, axis=1), mode)
        rate = np.log(amp0 / amp1) / (steps * dt)
        rates.append(float(rate))
        errors.append(abs(rate - rate_exact) / rate_exact)
    return ConvergenceResult("heat-mode", list(resolutions), errors,
                             _fit_order(resolutions, errors), 1.5,
                             {"rates": rates})


def _mode_amplitude(profile, mode):
    return float(np.dot(profile - np.mean(profile), mode) / np.dot(mode, mode))


# ---------------------------------------------------------------------------
# porous-medium self-similar front


def barenblatt_profile(x, t, m, mass, d=1):
    """Self-similar source solution of n_t = lap(n^m) in d dimensions."""
    alpha = d / (d * (m - 1.0) + 2.0)
    beta = alpha / d
    k = alpha * (m - 1.0) / (2.0 * d * m)
    xi = np.abs(x) / t ** beta
    # peak constant from the prescribed total mass (1-D closed form)
    if d != 1:
        raise NotImplementedError("only the 1-D profile is used as an oracle")
    p = 1.0 / (m - 1.0)
    # mass = t^{-alpha} * t^{beta} * C^{p+1/2} * k^{-1/2} * B(1/2, p+1)
    from scipy.special import beta as beta_fn
    big_c = (mass * np.sqrt(k) / beta_fn(0.5, p + 1.0)) ** (1.0 / (p + 0.5))
    core = np.maximum(big_c - k * xi ** 2, 0.0)
    return t ** (-alpha) * core ** p


def barenblatt_study(resolutions=(32, 64, 128), m=2.0, mass=0.25,
                     t0=1.0, t1=2.0):
    """L1 self-similarity error of the coupled stepper in the pure
    porous-medium limit (chi drift suppressed by c = 0, fluid at rest)."""
    errors = []
    for nx in resolutions:
        h = 4.0 / nx
        g = Grid((nx, 4), (h, 0.25), origin=(-2.0, 0.0))
        x = g.cell_centers(0)
        n0 = barenblatt_profile(x, t0, m, mass)[:, None] * np.ones((1, 4))
        spec = FluxSpec(m=m, chi=1.0, epsilon=0.0)
        params = SimParams(flux=spec, phi=ScalarField(g), t_end=t1 - t0,
                           dt_max=0.5)
        ws = StokesWorkspace(g)
        state = SimState(ScalarField(g, n0), ScalarField(g), VectorField(g),
                         ScalarField(g), 0.0)
        while state.t < (t1 - t0) - 1e-12:
            dt = min(stable_dt(state, params), (t1 - t0) - state.t)
            state = step(state, params, ws, dt)
        exact = barenblatt_profile(x, t1, m, mass)
        err = float(np.sum(np.abs(np.mean(state.n.interior, axis=1) - exact)) * h)
        errors.append(err)
    return ConvergenceResult("barenblatt", list(resolutions), errors,
                             _fit_order(resolutions, errors), 0.8, {})


# ---------------------------------------------------------------------------
# manufactured Stokes flow


def _manufactured_velocity():
    """Closed-form no-slip divergence-free field and its (-laplacian) forcing."""
    import sympy as sp

    x, y = sp.symbols("x y")
    psi = sp.sin(sp.pi * x) ** 2 * sp.sin(sp.pi * y) ** 2
    ux = sp.diff(psi, y)
    uy = -sp.diff(psi, x)
    fx = -(sp.diff(ux, x, 2) + sp.diff(ux, y, 2))
    fy = -(sp.diff(uy, x, 2) + sp.diff(uy, y, 2))
    fns = [sp.lambdify((x, y), expr, "numpy") for expr in (ux, uy, fx, fy)]
    return fns


def stokes_manufactured_study(resolutions=(16, 32, 64), dt=0.02, n_steps=120):
    """Spatial L2 convergence of the steady forced Stokes solve.

    The forcing -lap(u*) is fed through the buoyancy slot (n = 1,
    grad phi = f); iterating the implicit step converges to the discrete
    steady state, isolating the O(h^2) spatial error.
    """
    ux_fn, uy_fn, fx_fn, fy_fn = _manufactured_velocity()
    errors = []
    for nx in resolutions:
        g = Grid((nx, nx), (1.0 / nx, 1.0 / nx))
        ws = StokesWorkspace(g)
        n_one = ScalarField(g, np.ones(g.dims))
        forcing = VectorField(g)
        xf = g.face_coords(0)
        yc = g.cell_centers(1)
        forcing.components[0][...] = fx_fn(xf[:, None], yc[None, :])
        xc = g.cell_centers(0)
        yf = g.face_coords(1)
        forcing.components[1][...] = fy_fn(xc[:, None], yf[None, :])
        forcing.enforce_no_slip()

        u = VectorField(g)
        for _ in range(n_steps):
            u, _ = stokes_step(u, n_one, forcing, dt, ws)
        ex = ux_fn(xf[:, None], yc[None, :])
        ey = uy_fn(xc[:, None], yf[None, :])
        err2 = (np.sum((u.components[0] - ex) ** 2)
                + np.sum((u.components[1] - ey) ** 2)) * g.cell_volume
        errors.append(float(np.sqrt(err2)))
    return ConvergenceResult("stokes-manufactured", list(resolutions), errors,
                             _fit_order(resolutions, errors), 1.5, {})


# ---------------------------------------------------------------------------
# rigid rotation


def rotation_velocity(grid, omega=2.0 * np.pi, center=(0.5, 0.5)):
    """Rigid-body rotation on the staggered grid, walls zeroed, projected."""
    u = VectorField(grid)
    xf = grid.face_coords(0)
    yc = grid.cell_centers(1)
    u.components[0][...] = -omega * (yc[None, :] - center[1]) * np.ones((len(xf), 1))
    xc = grid.cell_centers(0)
    yf = grid.face_coords(1)
    u.components[1][...] = omega * (xc[:, None] - center[0]) * np.ones((1, len(yf)))
    ws = StokesWorkspace(grid)
    u, _ = project_div_free(u, ws)
    return u


def rotation_advection_study(resolutions=(32, 64, 128), cfl=0.5,
                             sigma=0.32, blob_center=(0.5, 0.56)):
    """Advect a blob through one revolution; mass must hold to rounding."""
    omega = 2.0 * np.pi
    errors = []
    mass_errors = []
    for nx in resolutions:
        g = Grid((nx, nx), (1.0 / nx, 1.0 / nx))
        u = rotation_velocity(g, omega)
        mesh = g.center_mesh()
        r2 = (mesh[0] - blob_center[0]) ** 2 + (mesh[1] - blob_center[1]) ** 2
        q0 = np.exp(-0.5 * r2 / sigma ** 2)
        q = ScalarField(g, q0.copy())
        mass0 = integrate(q)
        dt = cfl * min(g.spacing) / u.max_norm()
        t_total = 2.0 * np.pi / omega
        steps = int(np.ceil(t_total / dt))
        dt = t_total / steps
        for _ in range(steps):
            q = ScalarField(g, q.interior - dt * advect(q, u).interior)
        mass_errors.append(abs(integrate(q) - mass0) / mass0)
        err = float(np.sum(np.abs(q.interior - q0)) * g.cell_volume
                    / (np.sum(np.abs(q0)) * g.cell_volume))
        errors.append(err)
    return ConvergenceResult("rotation-advection", list(resolutions), errors,
                             _fit_order(resolutions, errors), 1e-12,
                             {"mass_errors": mass_errors})


CONVERGENCE_PRESETS = {
    "heat-mode": heat_mode_study,
    "barenblatt": barenblatt_study,
    "stokes-manufactured": stokes_manufactured_study,
    "rotation-advection": rotation_advection_study,
}


def run_convergence(preset: str) -> ConvergenceResult:
    if preset not in CONVERGENCE_PRESETS:
        raise ValueError("unknown preset %r (choose from %s)"
                         % (preset, sorted(CONVERGENCE_PRESETS)))
    return CONVERGENCE_PRESETS[preset]()
