"""Energy-functional evaluation and claim auditing along trajectories.

One quadrature convention for every functional: cell-centered values,
face-averaged gradients interpolated back to centers, and second
derivatives by composing that centered first-difference stencil.  Mixing
conventions would poison the cross-functional inequality checks, so
nothing here reuses the flux-form operators.

Divisions by the oxygen field are guarded by a floor (the continuum field
stays positive; the discrete one can touch zero).  Guard activations are
counted and reported, never silent.
"""

from __future__ import annotations

from dataclasses import dataclass, fields as dataclass_fields

import numpy as np
from scipy.special import xlogy

from .errors import InsufficientDataError
from .grid import ScalarField
from .operators import FluxSpec
from .stokes import kinetic_energy
from .timestepper import SimState

__all__ = [
    "EnergyReport",
    "AUDIT_COLUMNS",
    "evaluate",
    "audit_series",
    "AuditVerdict",
    "ClaimResult",
    "check_hessian_identity",
    "check_gradient_quartic_bound",
    "write_audit_csv",
    "format_report_row",
]

AUDIT_SCHEMA = "chemostokes-audit-1"

MASS_REL_TOL = 1e-10
MONOTONE_ABS_TOL = 1e-12
SUP_SLACK = 0.05
WINDOW_FACTOR = 2.0

# functionals whose running max must stabilize (claim c)
BOUNDED_FUNCTIONALS = (
    "linf_n", "linf_c", "fisher_c", "entropy_n", "ke_u", "lm_n",
    "grad_nm_l2", "w1inf_c", "w1inf_u",
)
# dissipation terms whose unit-window time integrals must stay bounded (claim d)
WINDOWED_DISSIPATIONS = ("d_hess_ln_c", "d_cross", "d_grad_u")


@dataclass
class EnergyReport:
    """All audited functionals at one time instant."""

    t: float
    mass_n: float
    linf_c: float
    fisher_c: float
    entropy_n: float
    ke_u: float
    lm_n: float
    grad_nm_l2: float
    grad_sqrt_n: float
    lap_c_l2: float
    grad_c_l4: float
    d_hess_ln_c: float
    d_cross: float
    d_grad_nm_half: float
    d_grad_u: float
    linf_n: float
    w1inf_c: float
    w1inf_u: float
    guard_c: int
    guard_n: int


AUDIT_COLUMNS = tuple(f.name for f in dataclass_fields(EnergyReport))


def _cgrad(arr, h, axis):
    """Centered first difference with reflecting walls.

    Identical to averaging the zero-flux face gradient back to centers,
    which is the package's one sanctioned gradient quadrature.
    """
    nd = arr.ndim
    p = np.pad(arr, [(1, 1) if b == axis else (0, 0) for b in range(nd)],
               mode="edge")
    sl = lambda s: tuple(s if b == axis else slice(None) for b in range(nd))
    return (p[sl(slice(2, None))] - p[sl(slice(None, -2))]) / (2.0 * h)


def _center_gradient(arr, grid):
    return [_cgrad(arr, grid.spacing[a], a) for a in range(grid.ndim)]


def _hessian(arr, grid):
    """Composed first-difference Hessian; first-order near walls."""
    first = _center_gradient(arr, grid)
    return [[_cgrad(first[i], grid.spacing[j], j) for j in range(grid.ndim)]
            for i in range(grid.ndim)]


def _grad_sq(grads):
    return sum(g * g for g in grads)


def _hess_sq(hess):
    return sum(hess[i][j] ** 2 for i in range(len(hess)) for j in range(len(hess)))


def _u_centers(u):
    g = u.grid
    out = []
    for a in range(g.ndim):
        comp = u.components[a]
        sl = lambda s: tuple(s if b == a else slice(None) for b in range(g.ndim))
        out.append(0.5 * (comp[sl(slice(None, -1))] + comp[sl(slice(1, None))]))
    return out


def evaluate(state: SimState, spec: FluxSpec,
             c_floor: float | None = None,
             n_floor: float | None = None) -> EnergyReport:
    """Compute every audited functional for one state.

    ``c_floor`` defaults to 1e-12 times the current max of c (pass the
    value derived from c0 when auditing a trajectory so the floor is
    constant along it); ``n_floor`` likewise for the density-weighted
    dissipation term.
    """
    g = state.n.grid
    vol = g.cell_volume
    n = np.maximum(state.n.interior, 0.0)
    c = state.c.interior
    m, eps = spec.m, spec.epsilon

    if c_floor is None:
        c_floor = 1e-12 * max(float(np.max(np.abs(c))), 1.0)
    if n_floor is None:
        n_floor = 1e-12 * max(float(np.max(n)), 1.0)

    guard_c = int(np.count_nonzero(c < c_floor))
    guard_n = int(np.count_nonzero(n < n_floor))
    c_hat = np.maximum(c, c_floor)
    n_hat = np.maximum(n, n_floor)

    gc = _center_gradient(c, g)
    gc2 = _grad_sq(gc)
    gn = _center_gradient(n, g)
    hess_c = _hessian(c, g)
    lap_c = sum(hess_c[i][i] for i in range(g.ndim))
    hess_ln_c = _hessian(np.log(c_hat), g)

    g_nm = _center_gradient((n + eps) ** m, g)
    g_nm_half = _center_gradient((n + eps) ** (0.5 * m), g)

    uc = _u_centers(state.u)
    gu2 = np.zeros(g.dims)
    for comp in uc:
        gu2 = gu2 + _grad_sq(_center_gradient(comp, g))
    u_mag = np.sqrt(sum(comp ** 2 for comp in uc))

    return EnergyReport(
        t=state.t,
        mass_n=float(np.sum(n)) * vol,
        linf_c=float(np.max(np.abs(c))),
        fisher_c=float(np.sum(gc2 / c_hat)) * vol,
        entropy_n=float(np.sum(xlogy(n, n))) * vol,
        ke_u=kinetic_energy(state.u),
        lm_n=float(np.sum(n ** m)) * vol,
        grad_nm_l2=float(np.sum(_grad_sq(g_nm))) * vol,
        grad_sqrt_n=float(np.sum(_grad_sq(gn) / np.maximum(n + eps, n_floor))) * vol,
        lap_c_l2=float(np.sum(lap_c ** 2)) * vol,
        grad_c_l4=float(np.sum(gc2 ** 2)) * vol,
        d_hess_ln_c=float(np.sum(c_hat * _hess_sq(hess_ln_c))) * vol,
        d_cross=float(np.sum((n / c_hat) * gc2)) * vol,
        d_grad_nm_half=float(np.sum(((n + eps) / n_hat) * _grad_sq(g_nm_half))) * vol,
        d_grad_u=float(np.sum(gu2)) * vol,
        linf_n=float(np.max(n)),
        w1inf_c=float(np.max(np.abs(c))) + float(np.max(np.sqrt(gc2))),
        w1inf_u=float(np.max(u_mag)) + float(np.max(np.sqrt(gu2))),
        guard_c=guard_c,
        guard_n=guard_n,
    )


# ---------------------------------------------------------------------------
# series auditing


@dataclass
class ClaimResult:
    name: str
    passed: bool
    witness_t: float | None
    detail: str


class AuditVerdict:
    """Pass/fail per claim with witness times."""

    def __init__(self, results):
        self.results = {r.name: r for r in results}

    @property
    def all_passed(self):
        return all(r.passed for r in self.results.values())

    def summary(self):
        lines = []
        for r in self.results.values():
            status = "PASS" if r.passed else "FAIL"
            where = "" if r.witness_t is None else " (witness t=%g)" % r.witness_t
            lines.append("%s %-28s %s%s" % (status, r.name, r.detail, where))
        lines.append("verdict: %s" % ("all claims pass" if self.all_passed
                                      else "claim failures present"))
        return "\n".join(lines)

    def key_value_block(self):
        lines = ["audit.schema=%s" % AUDIT_SCHEMA]
        for r in self.results.values():
            lines.append("claim.%s=%s" % (r.name, "pass" if r.passed else "fail"))
            if r.witness_t is not None:
                lines.append("claim.%s.witness_t=%.17g" % (r.name, r.witness_t))
        lines.append("audit.all_passed=%s" % str(self.all_passed).lower())
        return "\n".join(lines)


def audit_series(reports, claims=None, sup_slack=SUP_SLACK,
                 window=1.0, window_factor=WINDOW_FACTOR) -> AuditVerdict:
    """Check the time-series claims on a sequence of reports.

    Claims: (a) mass constancy, (b) monotone max of c, (c) stabilized
    running max of each sup-bounded functional, (d) bounded unit-window
    time integrals of the dissipation terms.
    """
    reports = list(reports)
    if len(reports) < 8:
        raise InsufficientDataError("need at least 8 reports, got %d" % len(reports))
    times = np.array([r.t for r in reports])
    if np.any(np.diff(times) <= 0.0):
        raise ValueError("reports must be strictly time-ordered")
    if claims is None:
        claims = ("mass", "max_principle", "sup_bounds", "dissipation_windows")

    results = []
    if "mass" in claims:
        results.append(_claim_mass(reports, times))
    if "max_principle" in claims:
        results.append(_claim_max_principle(reports, times))
    if "sup_bounds" in claims:
        results.extend(_claim_sup_bounds(reports, times, sup_slack))
    if "dissipation_windows" in claims:
        results.extend(_claim_windows(reports, times, window, window_factor))
    return AuditVerdict(results)


def _claim_mass(reports, times):
    m0 = reports[0].mass_n
    tol = MASS_REL_TOL * abs(m0)
    for r in reports:
        if abs(r.mass_n - m0) > tol:
            return ClaimResult("mass", False, r.t,
                               "drift %g exceeds %g" % (abs(r.mass_n - m0), tol))
    return ClaimResult("mass", True, None, "max drift within %g relative" % MASS_REL_TOL)


def _claim_max_principle(reports, times):
    for prev, cur in zip(reports, reports[1:]):
        if cur.linf_c > prev.linf_c + MONOTONE_ABS_TOL:
            return ClaimResult("max_principle", False, cur.t,
                               "|c|_inf rose by %g" % (cur.linf_c - prev.linf_c))
    return ClaimResult("max_principle", True, None, "|c|_inf non-increasing")


def _claim_sup_bounds(reports, times, slack):
    t_half = 0.5 * (times[0] + times[-1])
    first = [r for r in reports if r.t <= t_half]
    second = [r for r in reports if r.t > t_half]
    results = []
    for name in BOUNDED_FUNCTIONALS:
        m1 = max(getattr(r, name) for r in first)
        m2 = max(getattr(r, name) for r in second)
        bound = m1 * (1.0 + slack) if m1 > 0 else m1 * (1.0 - slack)
        ok = m2 <= bound + MONOTONE_ABS_TOL
        results.append(ClaimResult(
            "sup_bound.%s" % name, ok, None if ok else times[-1],
            "late max %g vs early max %g" % (m2, m1)))
    return results


def _claim_windows(reports, times, window, factor):
    results = []
    t_last = times[-1]
    n_windows = int(np.floor(t_last - window))
    if n_windows < 2:
        for name in WINDOWED_DISSIPATIONS:
            results.append(ClaimResult(
                "window.%s" % name, True, None,
                "horizon too short for windowed audit; vacuously satisfied"))
        return results
    for name in WINDOWED_DISSIPATIONS:
        values = np.array([getattr(r, name) for r in reports])
        integrals = []
        for k in range(1, n_windows + 1):
            lo, hi = float(k), float(k) + window
            msk = (times >= lo - 1e-12) & (times <= hi + 1e-12)
            if np.count_nonzero(msk) < 2:
                continue
            integrals.append(np.trapezoid(values[msk], times[msk]))
        first = integrals[0]
        ok = all(w <= factor * first + MONOTONE_ABS_TOL for w in integrals)
        witness = None
        if not ok:
            bad = next(i for i, w in enumerate(integrals)
                       if w > factor * first + MONOTONE_ABS_TOL)
            witness = 1.0 + bad
        results.append(ClaimResult(
            "window.%s" % name, ok, witness,
            "window integrals %s vs first %g" %
            (["%.3g" % w for w in integrals], first)))
    return results


# ---------------------------------------------------------------------------
# manufactured-field calculus checks


def check_hessian_identity(phi: ScalarField, h_exponent: float):
    """Both sides of the weighted Hessian/Laplacian identity for h(s)=s^p.

    For zero-flux phi on the box the boundary term vanishes, leaving
      int h'(phi)|grad phi|^2 lap phi + (2/3) int h |lap phi|^2
        = (2/3) int h |D^2 phi|^2 - (1/3) int h'' |grad phi|^4.
    Returns (lhs, rhs) under the module quadrature; the gap shrinks at
    least linearly under refinement for smooth positive data.
    """
    g = phi.grid
    vol = g.cell_volume
    p = float(h_exponent)
    arr = phi.interior
    if np.min(arr) <= 0.0:
        raise ValueError("phi must be strictly positive")
    grads = _center_gradient(arr, g)
    grad2 = _grad_sq(grads)
    hess = _hessian(arr, g)
    lap = sum(hess[i][i] for i in range(g.ndim))
    h = arr ** p
    h1 = p * arr ** (p - 1.0)
    h2 = p * (p - 1.0) * arr ** (p - 2.0)
    lhs = float(np.sum(h1 * grad2 * lap) + (2.0 / 3.0) * np.sum(h * lap ** 2)) * vol
    rhs = float((2.0 / 3.0) * np.sum(h * _hess_sq(hess))
                - (1.0 / 3.0) * np.sum(h2 * grad2 ** 2)) * vol
    return lhs, rhs


def check_gradient_quartic_bound(phi: ScalarField, h_exponent: float):
    """Both sides of the quartic gradient bound for h(s)=s^p, p > 0.

    With theta the antiderivative of 1/h,
      int (h'/h^3)|grad phi|^4 <= (2+sqrt(N))^2 int (h/h')|D^2 theta(phi)|^2,
    N the space dimension.  Returns (lhs, rhs) under the module quadrature.
    """
    g = phi.grid
    vol = g.cell_volume
    p = float(h_exponent)
    if p <= 0.0:
        raise ValueError("need h' > 0, i.e. a positive exponent")
    arr = phi.interior
    if np.min(arr) <= 0.0:
        raise ValueError("phi must be strictly positive")
    grad2 = _grad_sq(_center_gradient(arr, g))
    theta = np.log(arr) if p == 1.0 else (arr ** (1.0 - p) - 1.0) / (1.0 - p)
    hess_theta = _hessian(theta, g)
    lhs = float(p * np.sum(arr ** (-2.0 * p - 1.0) * grad2 ** 2)) * vol
    const = (2.0 + np.sqrt(g.ndim)) ** 2
    rhs = float(const * np.sum((arr / p) * _hess_sq(hess_theta))) * vol
    return lhs, rhs


# ---------------------------------------------------------------------------
# CSV output


def format_report_row(report: EnergyReport) -> str:
    parts = []
    for name in AUDIT_COLUMNS:
        value = getattr(report, name)
        if isinstance(value, int):
            parts.append(str(value))
        else:
            parts.append("%.17g" % value)
    return ",".join(parts)


def write_audit_csv(path, reports):
    """Write reports with the fixed, versioned column order (t first)."""
    with open(path, "w", newline="\n") as fh:
        fh.write("# %s\n" % AUDIT_SCHEMA)
        fh.write(",".join(AUDIT_COLUMNS) + "\n")
        for report in reports:
            fh.write(format_report_row(report) + "\n")
