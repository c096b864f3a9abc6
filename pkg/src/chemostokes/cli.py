"""Command-line front end: run, sweep-epsilon, convergence, audit.

Config files are flat ``key = value`` text, one pair per line, with
section prefixes ``grid.``, ``params.``, ``ic.``, ``run.``.  Unknown keys
are rejected with line context.  Exit codes: 0 all claims pass, 2 claim
failure, 1 error.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .auditor import audit_series, evaluate, write_audit_csv
from .errors import (ChemoStokesError, ConfigError, InsufficientDataError,
                     PotentialBlowupError)
from .grid import Grid
from .operators import FluxSpec
from .presets import PRESETS, linear_potential, make_initial
from .snapshot import read_state_snapshot, write_state_snapshot
from .stokes import StokesWorkspace
from .timestepper import RunHooks, SimParams, run
from .verification import CONVERGENCE_PRESETS, run_convergence

__all__ = ["RunConfig", "parse_config", "parse_config_text", "main",
           "cmd_run", "cmd_sweep_epsilon", "cmd_convergence", "cmd_audit"]


# ---------------------------------------------------------------------------
# configuration

_IC_KEYS = ("preset", "n", "c", "c_top", "mass", "sigma", "center", "seed",
            "amplitude", "u_amplitude")

_MISSING = object()


@dataclass
class RunConfig:
    dims: tuple
    lengths: tuple
    origin: tuple
    m: float
    chi: float
    epsilon: float
    gravity_direction: tuple
    gravity_magnitude: float
    ic_preset: str
    ic_params: dict
    t_end: float
    cadence: float
    out_dir: str | None = None
    cfl: float = 0.9
    dt_init: float = 1e-4
    dt_min: float = 1e-9
    dt_max: float = 1.0

    def to_text(self):
        """Canonical config echo; re-parses to an identical RunConfig."""
        lines = []
        lines.append("grid.dims = %s" % " ".join(str(d) for d in self.dims))
        lines.append("grid.lengths = %s" % _fmt_vec(self.lengths))
        lines.append("grid.origin = %s" % _fmt_vec(self.origin))
        lines.append("params.m = %.17g" % self.m)
        lines.append("params.chi = %.17g" % self.chi)
        lines.append("params.epsilon = %.17g" % self.epsilon)
        lines.append("params.gravity_direction = %s" % _fmt_vec(self.gravity_direction))
        lines.append("params.gravity_magnitude = %.17g" % self.gravity_magnitude)
        lines.append("ic.preset = %s" % self.ic_preset)
        for key in sorted(self.ic_params):
            value = self.ic_params[key]
            if isinstance(value, tuple):
                lines.append("ic.%s = %s" % (key, _fmt_vec(value)))
            elif key == "seed":
                lines.append("ic.%s = %d" % (key, value))
            else:
                lines.append("ic.%s = %.17g" % (key, value))
        lines.append("run.t_end = %.17g" % self.t_end)
        lines.append("run.cadence = %.17g" % self.cadence)
        if self.out_dir is not None:
            lines.append("run.out_dir = %s" % self.out_dir)
        lines.append("run.cfl = %.17g" % self.cfl)
        lines.append("run.dt_init = %.17g" % self.dt_init)
        lines.append("run.dt_min = %.17g" % self.dt_min)
        lines.append("run.dt_max = %.17g" % self.dt_max)
        return "\n".join(lines) + "\n"

    # -- builders ------------------------------------------------------

    def build_grid(self):
        spacing = tuple(L / d for L, d in zip(self.lengths, self.dims))
        return Grid(self.dims, spacing, self.origin)

    def build_flux(self):
        return FluxSpec(m=self.m, chi=self.chi, epsilon=self.epsilon)

    def build_params(self, grid):
        phi = linear_potential(grid, self.gravity_direction, self.gravity_magnitude)
        return SimParams(flux=self.build_flux(), phi=phi, t_end=self.t_end,
                         dt_init=self.dt_init, cfl_target=self.cfl,
                         dt_min=self.dt_min, dt_max=self.dt_max)

    def build_initial(self, grid):
        return make_initial(grid, self.ic_preset, **self.ic_params)


def _fmt_vec(values):
    return " ".join("%.17g" % v for v in values)


def parse_config(path) -> RunConfig:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    return parse_config_text(text, source=str(path))


def parse_config_text(text, source="<config>") -> RunConfig:
    entries = {}
    lines = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError("%s:%d: expected 'key = value', got %r"
                              % (source, lineno, raw.strip()))
        key, value = (part.strip() for part in line.split("=", 1))
        if key in entries:
            raise ConfigError("%s:%d: duplicate key %r" % (source, lineno, key))
        entries[key] = value
        lines[key] = lineno

    def take(key, parser, default=_MISSING):
        if key in entries:
            value = entries.pop(key)
            try:
                return parser(value)
            except (ValueError, TypeError) as exc:
                raise ConfigError("%s:%d: bad value for %s: %s"
                                  % (source, lines[key], key, exc))
        if default is _MISSING:
            raise ConfigError("%s: missing required key %r" % (source, key))
        return default

    dims = take("grid.dims", _parse_ints)
    lengths = take("grid.lengths", _parse_floats)
    origin = take("grid.origin", _parse_floats, (0.0,) * len(dims))
    if len(lengths) != len(dims):
        raise ConfigError("%s: grid.lengths must have %d entries" % (source, len(dims)))
    if len(origin) != len(dims):
        raise ConfigError("%s: grid.origin must have %d entries" % (source, len(dims)))

    m = take("params.m", float)
    chi = take("params.chi", float)
    epsilon = take("params.epsilon", float, 0.0)
    gdir = take("params.gravity_direction", _parse_floats, (0.0,) * (len(dims) - 1) + (-1.0,))
    gmag = take("params.gravity_magnitude", float, 0.0)
    if len(gdir) != len(dims):
        raise ConfigError("%s: params.gravity_direction must have %d entries"
                          % (source, len(dims)))

    preset = take("ic.preset", str)
    if preset not in PRESETS:
        raise ConfigError("%s:%d: unknown ic.preset %r (choose from %s)"
                          % (source, lines.get("ic.preset", 0), preset, PRESETS))
    ic_params = {}
    for key in list(entries):
        if key.startswith("ic."):
            name = key[3:]
            if name not in _IC_KEYS:
                raise ConfigError("%s:%d: unknown key %r" % (source, lines[key], key))
            if name == "center":
                ic_params[name] = _parse_floats(entries.pop(key))
            elif name == "seed":
                ic_params[name] = int(entries.pop(key))
            else:
                ic_params[name] = float(entries.pop(key))

    t_end = take("run.t_end", float)
    cadence = take("run.cadence", float)
    out_dir = take("run.out_dir", str, None)
    cfl = take("run.cfl", float, 0.9)
    dt_init = take("run.dt_init", float, 1e-4)
    dt_min = take("run.dt_min", float, 1e-9)
    dt_max = take("run.dt_max", float, 1.0)

    if entries:
        key = sorted(entries, key=lambda k: lines[k])[0]
        raise ConfigError("%s:%d: unknown key %r" % (source, lines[key], key))

    cfg = RunConfig(dims=dims, lengths=lengths, origin=origin, m=m, chi=chi,
                    epsilon=epsilon, gravity_direction=gdir,
                    gravity_magnitude=gmag, ic_preset=preset,
                    ic_params=ic_params, t_end=t_end, cadence=cadence,
                    out_dir=out_dir, cfl=cfl, dt_init=dt_init,
                    dt_min=dt_min, dt_max=dt_max)
    _validate(cfg, source)
    return cfg


def _parse_ints(value):
    return tuple(int(tok) for tok in value.split())


def _parse_floats(value):
    return tuple(float(tok) for tok in value.split())


def _validate(cfg, source):
    """Re-check every domain constraint so errors surface before any run."""
    try:
        grid = cfg.build_grid()
        cfg.build_flux()
        cfg.build_params(grid)
    except ValueError as exc:
        raise ConfigError("%s: %s" % (source, exc))
    if cfg.cadence <= 0.0:
        raise ConfigError("%s: run.cadence must be positive" % source)


# ---------------------------------------------------------------------------
# manifest


def write_manifest(path, cfg):
    with open(path, "w", newline="\n") as fh:
        fh.write("# chemostokes manifest\n")
        fh.write("# version: %s\n" % __version__)
        fh.write(cfg.to_text())


def read_manifest(path) -> RunConfig:
    with open(path) as fh:
        return parse_config_text(fh.read(), source=str(path))


# ---------------------------------------------------------------------------
# commands


def _floors_from_ic(ic):
    c_floor = 1e-12 * max(float(np.max(ic.c0.interior)), 1e-300)
    n_floor = 1e-12 * max(float(np.max(ic.n0.interior)), 1e-300)
    return c_floor, n_floor


def cmd_run(config_path, out_dir=None, cadence=None):
    cfg = parse_config(config_path)
    if cadence is not None:
        cfg.cadence = float(cadence)
        _validate(cfg, str(config_path))
    out = out_dir or cfg.out_dir
    if out is None:
        raise ConfigError("no output directory: set run.out_dir or pass --out")
    os.makedirs(out, exist_ok=True)

    grid = cfg.build_grid()
    params = cfg.build_params(grid)
    ic = cfg.build_initial(grid)
    spec = cfg.build_flux()
    ws = StokesWorkspace(grid)
    c_floor, n_floor = _floors_from_ic(ic)

    reports = []
    counter = {"i": 0}

    def on_sample(state):
        write_state_snapshot(os.path.join(out, "snap_%06d.cstk" % counter["i"]),
                             state)
        counter["i"] += 1
        reports.append(evaluate(state, spec, c_floor=c_floor, n_floor=n_floor))

    def on_diagnostic(state, message):
        write_state_snapshot(os.path.join(out, "diagnostic.cstk"), state)
        with open(os.path.join(out, "diagnostic.txt"), "w") as fh:
            fh.write(message + "\n")

    write_manifest(os.path.join(out, "manifest.txt"), cfg)
    hooks = RunHooks(cadence=cfg.cadence, on_sample=on_sample,
                     on_diagnostic=on_diagnostic)
    run(ic, params, ws=ws, hooks=hooks)

    write_audit_csv(os.path.join(out, "audit.csv"), reports)
    try:
        verdict = audit_series(reports)
    except InsufficientDataError as exc:
        print("audit skipped: %s" % exc, file=sys.stderr)
        return 1
    with open(os.path.join(out, "verdict.txt"), "w", newline="\n") as fh:
        fh.write(verdict.summary() + "\n\n" + verdict.key_value_block() + "\n")
    print(verdict.summary())
    return 0 if verdict.all_passed else 2


def cmd_sweep_epsilon(config_path, epsilons, out_dir=None):
    if len(epsilons) < 2:
        raise ConfigError("need >= 2 epsilon values")
    if any(not (0.0 < e <= 1.0) for e in epsilons):
        raise ConfigError("epsilon values must lie in (0, 1]")
    if any(b >= a for a, b in zip(epsilons, epsilons[1:])):
        raise ConfigError("epsilon list must be strictly decreasing")

    cfg = parse_config(config_path)
    out = out_dir or cfg.out_dir
    if out is None:
        raise ConfigError("no output directory: set run.out_dir or pass --out")
    os.makedirs(out, exist_ok=True)

    grid = cfg.build_grid()
    ic = cfg.build_initial(grid)
    finals = []
    for eps in epsilons:
        spec = FluxSpec(m=cfg.m, chi=cfg.chi, epsilon=eps)
        params = SimParams(flux=spec,
                           phi=linear_potential(grid, cfg.gravity_direction,
                                                cfg.gravity_magnitude),
                           t_end=cfg.t_end, dt_init=cfg.dt_init,
                           cfl_target=cfg.cfl, dt_min=cfg.dt_min,
                           dt_max=cfg.dt_max)
        final = run(ic, params, ws=StokesWorkspace(grid))
        finals.append(final.n.interior.copy())

    vol = grid.cell_volume
    distances = [float(np.sqrt(np.sum((a - b) ** 2) * vol))
                 for a, b in zip(finals, finals[1:])]
    lines = ["eps_a,eps_b,l2_distance"]
    for (ea, eb), dist in zip(zip(epsilons, epsilons[1:]), distances):
        lines.append("%.17g,%.17g,%.17g" % (ea, eb, dist))
    decreasing = all(d1 > d2 for d1, d2 in zip(distances, distances[1:]))
    lines.append("cauchy_trend=%s" % ("pass" if decreasing else "fail"))
    table = "\n".join(lines) + "\n"
    with open(os.path.join(out, "epsilon_sweep.csv"), "w", newline="\n") as fh:
        fh.write(table)
    print(table, end="")
    return 0 if decreasing else 2


def cmd_convergence(preset, out_dir=None):
    result = run_convergence(preset)
    table = result.table() + "\n"
    if out_dir:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "convergence_%s.txt" % preset),
                  "w", newline="\n") as fh:
            fh.write(table)
    print(table, end="")
    return 0 if result.passed else 2


def cmd_audit(run_dir):
    manifest = os.path.join(run_dir, "manifest.txt")
    if not os.path.exists(manifest):
        raise ConfigError("no manifest.txt in %s" % run_dir)
    cfg = read_manifest(manifest)
    spec = cfg.build_flux()
    snaps = sorted(name for name in os.listdir(run_dir)
                   if name.startswith("snap_") and name.endswith(".cstk"))
    if not snaps:
        raise ConfigError("no snapshots in %s" % run_dir)
    states = [read_state_snapshot(os.path.join(run_dir, name)) for name in snaps]
    c_floor = 1e-12 * max(float(np.max(states[0].c.interior)), 1e-300)
    n_floor = 1e-12 * max(float(np.max(states[0].n.interior)), 1e-300)
    reports = [evaluate(state, spec, c_floor=c_floor, n_floor=n_floor)
               for state in states]
    write_audit_csv(os.path.join(run_dir, "audit.csv"), reports)
    verdict = audit_series(reports)
    with open(os.path.join(run_dir, "verdict.txt"), "w", newline="\n") as fh:
        fh.write(verdict.summary() + "\n\n" + verdict.key_value_block() + "\n")
    print(verdict.summary())
    return 0 if verdict.all_passed else 2


# ---------------------------------------------------------------------------
# argument parsing


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="chemostokes",
        description="Chemotaxis-Stokes simulator and estimate auditor")
    parser.add_argument("--threads", type=int, default=1,
                        help="worker threads (currently informational; "
                             "runs are single-threaded for determinism)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a simulation from a config file")
    p_run.add_argument("--config", required=True)
    p_run.add_argument("--out", default=None)
    p_run.add_argument("--cadence", type=float, default=None)

    p_sweep = sub.add_parser("sweep-epsilon",
                             help="run a decreasing-epsilon sweep from one IC")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--epsilons", required=True,
                         help="comma-separated strictly decreasing values")

    p_conv = sub.add_parser("convergence", help="run a named convergence study")
    p_conv.add_argument("preset", choices=sorted(CONVERGENCE_PRESETS))
    p_conv.add_argument("--out", default=None)

    p_audit = sub.add_parser("audit", help="re-audit snapshots in a run directory")
    p_audit.add_argument("run_dir")
    return parser


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        if args.command == "run":
            return cmd_run(args.config, out_dir=args.out, cadence=args.cadence)
        if args.command == "sweep-epsilon":
            epsilons = [float(tok) for tok in args.epsilons.split(",") if tok.strip()]
            return cmd_sweep_epsilon(args.config, epsilons, out_dir=args.out)
        if args.command == "convergence":
            return cmd_convergence(args.preset, out_dir=args.out)
        if args.command == "audit":
            return cmd_audit(args.run_dir)
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    except PotentialBlowupError as exc:
        print("aborted: %s" % exc, file=sys.stderr)
        return 1
    except ChemoStokesError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    return 1


if __name__ == "__main__":
    sys.exit(main())
