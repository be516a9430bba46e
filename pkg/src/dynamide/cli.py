"""Command-line batch runner.

    dynamide <command> --config <path> [--output-dir <path>]

The JSON config names the command and its parameters as flat keys.  Every
run writes its CSV tables and a ``report.json`` into the output directory.
Exit codes: 0 success, 1 a check failed, 2 configuration or usage error.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional

import numpy as np

from . import emission as em
from . import fields as fl
from . import lattice as lt
from . import radiation as rad
from . import verify
from .constants import SpringParams, UnitSystem, make_constants
from .tables import write_json, write_table
from .verify import CheckResult

__all__ = ["ConfigError", "RunConfig", "RunReport", "COMMANDS", "load_config", "parse_config", "run_command", "main"]

EXIT_OK, EXIT_CHECK, EXIT_CONFIG = 0, 1, 2

COMMANDS = ("verify", "dispersion", "emission", "resonance", "dielectric", "fields", "sweep")

# required keys, then optional keys with defaults (None: derived at run time)
_SCHEMA: Dict[str, tuple] = {
    "verify": ((), {}),
    "dispersion": (("chi", "chi_tilde"), {"theta": None, "q_samples": 64, "spacing": 1.0}),
    "emission": (("A", "t_span"), {"dt": None, "omega_c": 1.0, "stride": 10, "lam0": None}),
    "resonance": ((), {"omega_c": 1.0, "tau": None, "e_amp": 1.0, "omega_min": None, "omega_max": None,
                       "n_points": 401, "omegas": None}),
    "dielectric": (("density",), {"omega_c": 1.0, "m": None, "tau": None, "omega_min": None, "omega_max": None,
                                  "n_points": 100, "omegas": None}),
    "fields": (("modes",), {"cell_volume": 1.0, "n_cells": 1, "times": [0.0], "positions": [[0.0, 0.0, 0.0]],
                            "fields": list(fl.FIELD_ORDER)}),
    "sweep": (("base", "parameter", "values"), {"workers": 1}),
}
_COMMON = ("command", "output_dir", "unit_system")


class ConfigError(ValueError):
    """Invalid configuration; maps to exit code 2."""


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: Dict[str, Any]
    output_dir: Path
    unit_system: UnitSystem = UnitSystem.NATURAL


@dataclass
class RunReport:
    command: str
    inputs: Dict[str, Any]
    files: List[str] = field(default_factory=list)
    checks: List[CheckResult] = field(default_factory=list)
    wall_time: float = 0.0
    subruns: List["RunReport"] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and all(s.passed for s in self.subruns)

    @property
    def exit_code(self) -> int:
        return EXIT_OK if self.passed else EXIT_CHECK

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": self.inputs,
            "files": list(self.files),
            "checks": [
                {"name": c.name, "measured": _json_float(c.measured), "tolerance": c.tolerance, "passed": c.passed}
                for c in self.checks
            ],
            "passed": self.passed,
            "wall_time": self.wall_time,
            "subruns": [s.to_dict() for s in self.subruns],
        }


def _json_float(x: float):
    return x if math.isfinite(x) else str(x)


# -- configuration ------------------------------------------------------------

def parse_config(raw: dict, output_dir: Optional[str] = None, command: Optional[str] = None) -> RunConfig:
    """Validate a config mapping and fill defaults."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    cmd = raw.get("command", command)
    if cmd is None:
        raise ConfigError("missing required key 'command'")
    if cmd not in COMMANDS:
        raise ConfigError(f"unknown command {cmd!r}; expected one of {', '.join(COMMANDS)}")
    if command is not None and command != cmd:
        raise ConfigError(f"command line asks for {command!r} but the config is for {cmd!r}")
    required, optional = _SCHEMA[cmd]
    for key in required:
        if key not in raw:
            raise ConfigError(f"missing required key {key!r} for command {cmd!r}")
    unknown = sorted(set(raw) - set(required) - set(optional) - set(_COMMON))
    if unknown:
        raise ConfigError(f"unknown key(s) for command {cmd!r}: {', '.join(unknown)}")
    try:
        units = UnitSystem(raw.get("unit_system", "natural"))
    except ValueError:
        raise ConfigError(f"unknown unit_system {raw.get('unit_system')!r}; expected 'natural' or 'si'") from None
    params = dict(optional)
    params.update({k: v for k, v in raw.items() if k not in _COMMON})
    out = output_dir if output_dir is not None else raw.get("output_dir", "dynamide_out")
    config = RunConfig(cmd, params, Path(out), units)
    _validate(config)
    return config


def load_config(path, output_dir: Optional[str] = None, command: Optional[str] = None) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            raw = json.load(fh)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from None
    return parse_config(raw, output_dir, command)


def _number(params: dict, key: str, positive: bool = False, allow_none: bool = True) -> Optional[float]:
    value = params.get(key)
    if value is None and allow_none:
        return None
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise ConfigError(f"{key!r} must be a finite number")
    if positive and not value > 0:
        raise ConfigError(f"{key!r} must be positive")
    return float(value)


def _validate(config: RunConfig) -> None:
    p = config.params
    cmd = config.command
    if cmd == "dispersion":
        for key in ("chi", "chi_tilde"):
            if _number(p, key, allow_none=False) < 0:
                raise ConfigError(f"{key!r} must be non-negative")
        _number(p, "theta", positive=True)
        _number(p, "spacing", positive=True)
        if not isinstance(p["q_samples"], int) or p["q_samples"] < 2:
            raise ConfigError("'q_samples' must be an integer >= 2")
    elif cmd == "emission":
        rate = _number(p, "A", positive=True, allow_none=False)
        _number(p, "t_span", positive=True, allow_none=False)
        _number(p, "omega_c", positive=True)
        dt = _number(p, "dt", positive=True)
        if dt is not None and dt * rate > em.MAX_STEP_RATE * (1 + 1e-12):
            raise ConfigError(f"dt = {dt} violates the step rule dt <= 1e-3/A = {em.MAX_STEP_RATE / rate}")
        if not isinstance(p["stride"], int) or p["stride"] < 1:
            raise ConfigError("'stride' must be an integer >= 1")
        if p["lam0"] is not None:
            lam = _complex_vector(p["lam0"], "lam0")
            if lam.size != 2 or abs(np.sum(np.abs(lam) ** 2) - 1.0) > em.NORM_TOL:
                raise ConfigError("'lam0' must be a normalized pair of coefficients")
    elif cmd in ("resonance", "dielectric"):
        _number(p, "omega_c", positive=True)
        _number(p, "tau")
        if p.get("tau") is not None and p["tau"] < 0:
            raise ConfigError("'tau' must be non-negative")
        if cmd == "dielectric":
            if _number(p, "density", allow_none=False) < 0:
                raise ConfigError("'density' must be non-negative")
            _number(p, "m", positive=True)
        _frequency_grid(p)
    elif cmd == "fields":
        _number(p, "cell_volume", positive=True, allow_none=False)
        if not isinstance(p["n_cells"], int) or p["n_cells"] < 1:
            raise ConfigError("'n_cells' must be an integer >= 1")
        if not isinstance(p["modes"], list):
            raise ConfigError("'modes' must be a list of mode objects")
        _mode_set(p, make_constants(config.unit_system))
        bad = sorted(set(p["fields"]) - set(fl.FIELD_ORDER))
        if bad:
            raise ConfigError(f"unknown field name(s): {', '.join(bad)}")
    elif cmd == "sweep":
        base = p["base"]
        if not isinstance(base, dict) or base.get("command") in (None, "sweep"):
            raise ConfigError("'base' must be a config object for a non-sweep command")
        if not isinstance(p["values"], list) or not p["values"]:
            raise ConfigError("'values' must be a non-empty list")
        if not isinstance(p["workers"], int) or p["workers"] < 1:
            raise ConfigError("'workers' must be an integer >= 1")
        for value in p["values"]:
            parse_config({**base, p["parameter"]: value}, output_dir=str(config.output_dir))


def _complex_vector(value, name: str) -> np.ndarray:
    try:
        out = []
        for x in value:
            if isinstance(x, (list, tuple)):
                re, im = x
                out.append(complex(float(re), float(im)))
            else:
                out.append(complex(float(x)))
        return np.array(out)
    except (TypeError, ValueError):
        raise ConfigError(f"{name!r} must be a list of numbers or [re, im] pairs") from None


def _frequency_grid(p: dict) -> np.ndarray:
    if p.get("omegas") is not None:
        grid = np.asarray(p["omegas"], dtype=np.float64)
    else:
        wc = float(p.get("omega_c") or 1.0)
        lo = _number(p, "omega_min", positive=True) or 0.5 * wc
        hi = _number(p, "omega_max", positive=True) or 1.5 * wc
        n = p.get("n_points")
        if not isinstance(n, int) or n < 2:
            raise ConfigError("'n_points' must be an integer >= 2")
        grid = np.linspace(lo, hi, n)
    if grid.ndim != 1 or grid.size < 1 or np.any(grid <= 0) or np.any(np.diff(grid) <= 0):
        raise ConfigError("frequency grid must be positive and strictly ascending")
    return grid


def _mode_set(p: dict, k) -> fl.ModeSet:
    modes = []
    for i, spec in enumerate(p["modes"]):
        try:
            alpha = spec.get("alpha", 0.0)
            if isinstance(alpha, (list, tuple)):
                alpha = complex(alpha[0], alpha[1])
            modes.append(fl.FieldMode.along(spec["q"], spec["polarization"], k.c, complex(alpha), spec.get("n", 0)))
        except KeyError as exc:
            raise ConfigError(f"mode {i} is missing key {exc}") from None
        except (TypeError, ValueError, AttributeError) as exc:
            raise ConfigError(f"mode {i} is invalid: {exc}") from None
    try:
        return fl.ModeSet(tuple(modes), k, float(p["cell_volume"]), int(p["n_cells"]))
    except ValueError as exc:
        raise ConfigError(f"mode set is invalid: {exc}") from None


# -- commands -------------------------------------------------------------------

def _run_verify(config: RunConfig, report: RunReport) -> None:
    report.checks.extend(verify.run_checks())
    path = write_table([c.row() for c in report.checks], ("name", "measured", "tolerance", "status"),
                       config.output_dir / "checks.csv")
    report.files.append(path.name)


def _run_dispersion(config: RunConfig, report: RunReport) -> None:
    p = config.params
    k = make_constants(config.unit_system)
    theta = k.theta if p["theta"] is None else float(p["theta"])
    springs = SpringParams(float(p["chi"]), float(p["chi_tilde"]), theta)
    cfg = lt.LatticeConfig(max(2, p["q_samples"]), springs, float(p["spacing"]))
    table = lt.mode_frequencies(cfg, p["q_samples"])
    path = write_table(table.rows(), table.columns, config.output_dir / "dispersion.csv")
    report.files.append(path.name)
    _, ac0, op0 = table.row_at(0.0)
    expect = (2.0 * springs.chi_tilde + springs.chi) / theta
    report.checks.append(CheckResult("dispersion.acoustic_q0", abs(ac0), 0.0))
    report.checks.append(CheckResult("dispersion.optical_q0", abs(op0**2 - expect) / max(expect, 1e-300), 1e-10))
    # rows whose mirror -q is also on the grid (the lone -pi/a point has none)
    pairs = [(i, j) for i, qi in enumerate(table.q) for j, qj in enumerate(table.q) if abs(qi + qj) <= 1e-12 * np.ptp(table.q)]
    both = np.column_stack([table.omega_acoustic, table.omega_optical])
    mirror = max(float(np.max(np.abs(both[i] - both[j]))) for i, j in pairs)
    report.checks.append(CheckResult("dispersion.q_symmetry", mirror / max(float(both.max()), 1e-300), 1e-12))


def _run_emission(config: RunConfig, report: RunReport) -> None:
    p = config.params
    k = make_constants(config.unit_system)
    rate = float(p["A"])
    dt = 1e-3 / rate if p["dt"] is None else float(p["dt"])
    params = em.EmissionParams.from_rate(rate, k, float(p["omega_c"]))
    lam0 = np.array([1.0, 1.0]) / math.sqrt(2.0) if p["lam0"] is None else _complex_vector(p["lam0"], "lam0")
    traj = em.integrate_symmetric(params, em.TwoLevelState(lam0, 0.0), 0.5 * float(p["t_span"]), dt, p["stride"])
    path = write_table(traj.rows(), traj.columns, config.output_dir / "emission.csv")
    report.files.append(path.name)
    pops = traj.populations
    report.checks.append(CheckResult("emission.norm", traj.norm_error, 1e-10))
    if p["lam0"] is None:
        p1, _ = em.analytic_populations(traj.times, rate)
        centre = int(np.argmin(np.abs(traj.times)))
        report.checks.append(CheckResult("emission.logistic_oracle", float(np.max(np.abs(pops[:, 0] - p1))), 1e-8))
        report.checks.append(CheckResult("emission.envelope_peak", abs(float(traj.envelope[centre]) - 0.5), 1e-10))
        peak_at = float(abs(int(np.argmax(traj.envelope)) - centre))
        report.checks.append(CheckResult("emission.envelope_peak_row", peak_at, 0.0))


def _drive_from(p: dict, k) -> rad.DriveSpec:
    tau = k.friction_time if p.get("tau") is None else float(p["tau"])
    return rad.DriveSpec(p["e_amp"], float(p["omega_c"]), float(p["omega_c"]), tau, k.m, k.e)


def _run_resonance(config: RunConfig, report: RunReport) -> None:
    p = config.params
    k = make_constants(config.unit_system)
    drive = _drive_from(p, k)
    grid = _frequency_grid(p)
    rows = rad.resonance_scan(drive, grid)
    path = write_table(rows, ("omega", "value"), config.output_dir / "resonance.csv")
    report.files.append(path.name)
    amps = np.array([a for _, a in rows])
    report.checks.append(CheckResult("resonance.finite", float(np.sum(~np.isfinite(amps))), 0.0))
    wc = drive.omega_c
    if drive.tau * wc <= 1e-3 and grid[0] < wc < grid[-1]:
        nearest = int(np.argmin(np.abs(grid - wc)))
        report.checks.append(CheckResult("resonance.peak_index_offset", float(abs(int(np.argmax(amps)) - nearest)), 0.0))


def _run_dielectric(config: RunConfig, report: RunReport) -> None:
    p = config.params
    k = make_constants(config.unit_system)
    tau = k.friction_time if p["tau"] is None else float(p["tau"])
    m = k.m if p["m"] is None else float(p["m"])
    wc = float(p["omega_c"])
    rows = rad.dielectric_sweep(float(p["density"]), _frequency_grid(p), wc, m, tau)
    path = write_table(rows, ("omega", "value"), config.output_dir / "dielectric.csv")
    report.files.append(path.name)
    if float(p["density"]) > 0:
        wrong = sum(1 for w, eps in rows if np.sign(eps - 1.0) != np.sign(w - wc))
        report.checks.append(CheckResult("dielectric.sign_rule", float(wrong), 0.0))
    else:
        report.checks.append(CheckResult("dielectric.vacuum", max(abs(eps - 1.0) for _, eps in rows), 0.0))


def _run_fields(config: RunConfig, report: RunReport) -> None:
    p = config.params
    k = make_constants(config.unit_system)
    ms = _mode_set(p, k)
    columns, rows = fl.field_scan(ms, [float(t) for t in p["times"]], p["positions"], p["fields"])
    path = write_table(rows, columns, config.output_dir / "fields.csv")
    report.files.append(path.name)
    if len(ms):
        e_rel, h_rel = verify.field_identity_errors(ms)
        report.checks.append(CheckResult("fields.E_equals_minus_dA_dt", e_rel, 1e-6))
        report.checks.append(CheckResult("fields.mu0H_equals_curl_A", h_rel, 1e-6))


def _subrun(args) -> dict:
    raw, out = args
    config = parse_config(raw, output_dir=out)
    return run_command(config).to_dict()


def _report_from_dict(d: dict) -> RunReport:
    checks = [CheckResult(c["name"], float(c["measured"]), c["tolerance"]) for c in d["checks"]]
    subs = [_report_from_dict(s) for s in d["subruns"]]
    return RunReport(d["command"], d["inputs"], d["files"], checks, d["wall_time"], subs)


def _run_sweep(config: RunConfig, report: RunReport) -> None:
    p = config.params
    jobs = []
    width = len(str(len(p["values"]) - 1))
    for i, value in enumerate(p["values"]):
        sub = config.output_dir / f"{p['parameter']}_{i:0{width}d}"
        raw = {**p["base"], p["parameter"]: value}
        raw.setdefault("unit_system", config.unit_system.value)
        jobs.append((raw, str(sub)))
    if p["workers"] > 1:
        with ProcessPoolExecutor(max_workers=p["workers"]) as pool:
            results = list(pool.map(_subrun, jobs))
    else:
        results = [_subrun(job) for job in jobs]
    for (raw, sub), res in zip(jobs, results):
        child = _report_from_dict(res)
        report.subruns.append(child)
        name = Path(sub).name
        report.files.extend(f"{name}/{f}" for f in child.files)
    rows = [(i, json.dumps(v, sort_keys=True), "pass" if r.passed else "fail") for i, (v, r) in enumerate(zip(p["values"], report.subruns))]
    path = write_table(rows, ("index", "value", "status"), config.output_dir / "sweep.csv")
    report.files.append(path.name)


_RUNNERS = {
    "verify": _run_verify,
    "dispersion": _run_dispersion,
    "emission": _run_emission,
    "resonance": _run_resonance,
    "dielectric": _run_dielectric,
    "fields": _run_fields,
    "sweep": _run_sweep,
}


def run_command(config: RunConfig) -> RunReport:
    """Dispatch ``config``, write its tables and ``report.json``, and return the report."""
    start = time.perf_counter()
    inputs = {"command": config.command, "unit_system": config.unit_system.value, **config.params}
    report = RunReport(config.command, inputs)
    config.output_dir.mkdir(parents=True, exist_ok=True)
    _RUNNERS[config.command](config, report)
    report.wall_time = time.perf_counter() - start
    write_json(report.to_dict(), config.output_dir / "report.json")
    return report


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="dynamide", description="Batch runs and invariant checks for the dynamide model.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="JSON config file (optional for verify)")
    ap.add_argument("--output-dir", help="directory for CSV tables and report.json")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    try:
        if args.config is None:
            if args.command != "verify":
                raise ConfigError(f"--config is required for {args.command!r}")
            config = parse_config({"command": "verify"}, args.output_dir)
        else:
            config = load_config(args.config, args.output_dir, args.command)
        report = run_command(config)
    except ConfigError as exc:
        print(f"dynamide: config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"dynamide: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    for c in report.checks:
        print(f"{'PASS' if c.passed else 'FAIL'} {c.name} measured={c.measured:.3e} tol={c.tolerance:.1e}")
    for sub in report.subruns:
        print(f"{'PASS' if sub.passed else 'FAIL'} subrun {sub.inputs.get(config.params.get('parameter'), '')}")
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
