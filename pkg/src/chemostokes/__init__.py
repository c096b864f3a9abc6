"""Chemotaxis-Stokes simulator with porous-medium diffusion and an estimate auditor."""

from .errors import (
    ChemoStokesError,
    ConfigError,
    DegenerateInputError,
    InsufficientDataError,
    NoConvergenceError,
    NotSolenoidalError,
    PotentialBlowupError,
    StepRejectedError,
)
from .grid import (
    Grid,
    InitialCondition,
    ScalarField,
    VectorField,
    apply_scalar_bc,
    integrate,
)
from .operators import FluxSpec, advect, chemo_flux, divergence, gradient, laplacian, pm_flux
from .presets import linear_potential, make_initial
from .stokes import StokesWorkspace, kinetic_energy, project_div_free, stokes_step
from .timestepper import RunHooks, SimParams, SimState, run, stable_dt, step
from .auditor import (
    AuditVerdict,
    EnergyReport,
    audit_series,
    check_gradient_quartic_bound,
    check_hessian_identity,
    evaluate,
    write_audit_csv,
)
from .snapshot import read_state_snapshot, write_state_snapshot
from .verification import ConvergenceResult, run_convergence

__version__ = "0.1.0"
