"""Coupled time stepping for the density / oxygen / fluid system.

Splitting order within a step (all cross terms use beginning-of-step data):
  1. density: explicit conservative fluxes (nonlinear diffusion minus
     chemotactic drift minus advection), exactly mass conserving;
  2. oxygen: explicit upwind advection, implicit diffusion (exact
     transform solve), implicit pointwise consumption c/(1 + dt n),
     which keeps 0 <= c <= max(c) unconditionally;
  3. fluid: implicit viscous step plus projection.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PotentialBlowupError, StepRejectedError
from .grid import InitialCondition, ScalarField, VectorField, apply_scalar_bc
from .operators import FluxSpec, advect, chemo_flux, divergence, gradient, pm_flux
from .stokes import StokesWorkspace, stokes_step

__all__ = ["SimParams", "SimState", "RunHooks", "step", "stable_dt", "run"]

POSITIVITY_TOL = 1e-12
MAXPRINCIPLE_TOL = 1e-12


@dataclass
class SimParams:
    """Physics and run controls: fluxes, gravity potential, dt policy."""

    flux: FluxSpec
    phi: ScalarField
    t_end: float
    dt_init: float = 1e-4
    cfl_target: float = 0.9
    dt_min: float = 1e-9
    dt_max: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.cfl_target < 1.0):
            raise ValueError("cfl_target must lie in (0, 1)")
        if not (self.dt_min <= self.dt_init <= self.dt_max):
            raise ValueError("need dt_min <= dt_init <= dt_max")
        if self.t_end < 0.0:
            raise ValueError("t_end must be nonnegative")
        self.phi.check_finite()


@dataclass
class SimState:
    """One snapshot of the evolving fields."""

    n: ScalarField
    c: ScalarField
    u: VectorField
    pi: ScalarField
    t: float

    def copy(self):
        return SimState(self.n.copy(), self.c.copy(), self.u.copy(),
                        self.pi.copy(), self.t)


@dataclass
class RunHooks:
    """Output sinks invoked on a fixed time cadence (and at t=0, t_end)."""

    cadence: float
    on_sample: object = None          # callable(state)
    on_diagnostic: object = None      # callable(state, message) on aborts

    def __post_init__(self):
        if self.cadence <= 0.0:
            raise ValueError("cadence must be positive")


def stable_dt(state: SimState, params: SimParams) -> float:
    """Explicit stability bound scaled by the CFL target, clamped to limits.

    Diffusion: h^2 / (2 d m (eps+n)^(m-1)); transport: h / (chi |grad c|_inf
    + |u|_inf).  Either bound is infinite when its mechanism is absent.
    """
    g = state.n.grid
    spec = params.flux
    h_min = min(g.spacing)
    d = g.ndim

    n_max = float(np.max(state.n.interior))
    diffusivity = spec.m * (spec.epsilon + max(n_max, 0.0)) ** (spec.m - 1.0)
    bound_diff = np.inf if diffusivity == 0.0 else h_min ** 2 / (2.0 * d * diffusivity)

    gc = gradient(apply_scalar_bc(state.c))
    speed = spec.chi * gc.max_norm() + state.u.max_norm()
    bound_trans = np.inf if speed == 0.0 else h_min / speed

    dt = params.cfl_target * min(bound_diff, bound_trans)
    return float(min(max(dt, params.dt_min), params.dt_max))


def step(state: SimState, params: SimParams, ws: StokesWorkspace,
         dt: float, grad_phi: VectorField | None = None) -> SimState:
    """Advance one operator-split step of size dt.

    Raises StepRejectedError when the result would violate positivity of n
    or the maximum principle for c; the driver halves dt and retries.
    """
    if dt <= 0.0:
        raise ValueError("dt must be positive")
    g = state.n.grid
    spec = params.flux
    if grad_phi is None:
        grad_phi = gradient(apply_scalar_bc(params.phi))

    n = state.n
    c = apply_scalar_bc(state.c)
    u = state.u

    # 1. density, explicit flux form
    flux_n = pm_flux(n, spec)
    drift = chemo_flux(n, c, spec)
    for a in range(g.ndim):
        flux_n.components[a] -= drift.components[a]
    n_new = ScalarField(
        g, n.interior + dt * (divergence(flux_n).interior - advect(n, u).interior))
    n_min = float(np.min(n_new.interior))
    if not np.all(np.isfinite(n_new.interior)):
        raise StepRejectedError("density became non-finite")
    if n_min < -POSITIVITY_TOL:
        raise StepRejectedError("density positivity violated: min n = %g" % n_min)

    # 2. oxygen: advect, implicit diffusion, implicit consumption
    c_max_old = float(np.max(c.interior))
    c_adv = c.interior - dt * advect(c, u).interior
    c_diff = ws.solve_helmholtz_neumann(c_adv, dt)
    c_new = ScalarField(g, c_diff / (1.0 + dt * np.maximum(n_new.interior, 0.0)))
    c_lo = float(np.min(c_new.interior))
    c_hi = float(np.max(c_new.interior))
    if not np.all(np.isfinite(c_new.interior)):
        raise StepRejectedError("oxygen became non-finite")
    if c_lo < -MAXPRINCIPLE_TOL or c_hi > c_max_old + MAXPRINCIPLE_TOL:
        raise StepRejectedError(
            "oxygen maximum principle violated: range [%g, %g] vs max %g"
            % (c_lo, c_hi, c_max_old))

    # 3. fluid
    u_new, pi_new = stokes_step(u, n_new, grad_phi, dt, ws)

    return SimState(n_new, c_new, u_new, pi_new, state.t + dt)


def run(ic: InitialCondition, params: SimParams,
        ws: StokesWorkspace | None = None,
        hooks: RunHooks | None = None) -> SimState:
    """Advance the initial condition to t_end with adaptive dt.

    Sample hooks fire at t = 0, every cadence, and at t_end.  If dt
    underflows dt_min while steps keep getting rejected, the run aborts
    with a diagnostic callback and PotentialBlowupError (a finding about
    the trajectory, not a solver crash).  Deterministic for fixed inputs.
    """
    g = ic.n0.grid
    if ws is None:
        ws = StokesWorkspace(g)
    grad_phi = gradient(apply_scalar_bc(params.phi))

    state = SimState(ic.n0.copy(), ic.c0.copy(), ic.u0.copy(),
                     ScalarField(g), 0.0)
    if hooks and hooks.on_sample:
        hooks.on_sample(state)
    if params.t_end == 0.0:
        return state

    tiny = 1e-12 * max(1.0, params.t_end)

    targets = []
    if hooks:
        k = 1
        while k * hooks.cadence < params.t_end - tiny:
            targets.append(k * hooks.cadence)
            k += 1
    targets.append(params.t_end)

    for target in targets:
        while state.t < target - tiny:
            dt = min(stable_dt(state, params), target - state.t)
            while True:
                try:
                    state = step(state, params, ws, dt, grad_phi)
                    break
                except StepRejectedError as exc:
                    dt *= 0.5
                    if dt < params.dt_min:
                        msg = ("dt underflowed %g while rejecting steps "
                               "(%s); potential blow-up at t = %g"
                               % (params.dt_min, exc, state.t))
                        if hooks and hooks.on_diagnostic:
                            hooks.on_diagnostic(state, msg)
                        raise PotentialBlowupError(msg, state=state) from exc
        state.t = target
        if hooks and hooks.on_sample:
            hooks.on_sample(state)

    return state
