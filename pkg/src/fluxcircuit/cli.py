"""Command-line front end.

Subcommands: spectrum, potential, transitions, report, converge,
print-config.  Parameters come from an INI config file (sections circuit,
basis, sweep, output) overridden by command-line flags; unknown keys are
rejected.  Tabular output is CSV with a single '#' metadata line, LF line
endings and floats printed to 12 significant digits, so identical configs
produce byte-identical files.  Exit codes: 0 success, 2 configuration
error, 3 solver failure.
"""

from __future__ import annotations

import argparse
import configparser
import json
import math
import sys
from dataclasses import dataclass, fields

import numpy as np

from . import __version__
from .analysis import (
    adiabatic_check,
    classify_levels,
    compare_two_level,
    extract_qubit,
)
from .circuit import (
    CircuitParams,
    Variant,
    find_minima,
    oscillator_frequency,
    potential_3j,
    potential_4j,
)
from .spectrum import (
    BasisSpec,
    Cube,
    Ellipsoid,
    SolverError,
    converge,
    sweep_flux,
    sweep_transitions,
)


class ConfigError(ValueError):
    """Invalid configuration (unknown key, bad value, bad combination)."""


@dataclass
class RunConfig:
    variant: str = "4j"
    alpha: float = 1.0
    beta: float | None = 0.6
    ej_over_ec: float = 50.0
    f_e: float = 0.5
    capacitance_ff: float | None = None
    inductance_ph: float | None = None
    ec_ghz: float | None = None
    cutoff: str = "cube"
    k_max: int = 8
    e_cut: float | None = None
    f_start: float = 0.40
    f_end: float = 0.60
    f_steps: int = 81
    levels: int = 6
    jobs: int = 1
    solver_tol: float = 1e-10
    conv_tol: float = 1e-6
    grid_n: int = 101
    phi3: float = 0.0
    path: str | None = None
    format: str = "csv"


_SCHEMA = {
    "circuit": {
        "variant": str,
        "alpha": float,
        "beta": float,
        "ej_over_ec": float,
        "f_e": float,
        "capacitance_ff": float,
        "inductance_ph": float,
        "ec_ghz": float,
    },
    "basis": {"cutoff": str, "k_max": int, "e_cut": float},
    "sweep": {
        "f_start": float,
        "f_end": float,
        "f_steps": int,
        "levels": int,
        "jobs": int,
        "solver_tol": float,
        "conv_tol": float,
        "grid_n": int,
        "phi3": float,
    },
    "output": {"path": str, "format": str},
}

def fmt(x) -> str:
    """Shortest fixed formatting: 12 significant digits."""
    if isinstance(x, float):
        if math.isnan(x) or math.isinf(x):
            return str(x)
        return f"{x:.12g}"
    return str(x)


def _coerce(raw: str, typ, section: str, key: str):
    raw = raw.strip()
    if raw.lower() in ("none", ""):
        return None
    try:
        if typ is int:
            return int(raw)
        if typ is float:
            return float(raw)
        return raw
    except ValueError as exc:
        raise ConfigError(f"bad value for [{section}] {key}: {raw!r}") from exc


def load_config(path: str | None, overrides: dict) -> RunConfig:
    """Read the INI file (if any), apply flag overrides, validate."""
    cfg = RunConfig()
    provided: set[str] = set()
    if path is not None:
        parser = configparser.ConfigParser(strict=True, interpolation=None)
        try:
            with open(path) as fh:
                parser.read_file(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        except configparser.Error as exc:
            raise ConfigError(f"malformed config file {path}: {exc}") from exc
        for section in parser.sections():
            if section not in _SCHEMA:
                raise ConfigError(f"unknown config section [{section}]")
            for key, raw in parser.items(section):
                if key not in _SCHEMA[section]:
                    raise ConfigError(f"unknown config key [{section}] {key}")
                setattr(cfg, key, _coerce(raw, _SCHEMA[section][key], section, key))
                provided.add(key)
    for key, value in overrides.items():
        if value is not None:
            setattr(cfg, key, value)
            provided.add(key)
    _validate(cfg, provided)
    return cfg


def _validate(cfg: RunConfig, provided: set[str] = frozenset()) -> None:
    if cfg.variant not in ("3j", "4j"):
        raise ConfigError(f"variant must be '3j' or '4j', got {cfg.variant!r}")
    if cfg.variant == "3j":
        if "beta" in provided and cfg.beta is not None:
            raise ConfigError("three-junction circuit takes no beta")
        cfg.beta = None  # drop the four-junction default
    if cfg.cutoff not in ("cube", "ellipsoid"):
        raise ConfigError(f"cutoff must be 'cube' or 'ellipsoid', got {cfg.cutoff!r}")
    if cfg.format not in ("csv", "json"):
        raise ConfigError(f"format must be 'csv' or 'json', got {cfg.format!r}")
    if cfg.cutoff == "ellipsoid" and cfg.e_cut is None:
        raise ConfigError("ellipsoid cutoff requires e_cut")
    if cfg.f_steps < 1:
        raise ConfigError("f_steps must be at least 1")
    if cfg.f_start > cfg.f_end:
        raise ConfigError("f_start must not exceed f_end")
    if cfg.levels < 1:
        raise ConfigError("levels must be at least 1")
    if cfg.jobs < 1:
        raise ConfigError("jobs must be at least 1")
    if cfg.grid_n < 2:
        raise ConfigError("grid_n must be at least 2")
    try:
        circuit_params(cfg)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def circuit_params(cfg: RunConfig) -> CircuitParams:
    return CircuitParams(
        variant=Variant(cfg.variant),
        alpha=cfg.alpha,
        beta=cfg.beta,
        ej_over_ec=cfg.ej_over_ec,
        f_e=cfg.f_e,
        capacitance=None if cfg.capacitance_ff is None else cfg.capacitance_ff * 1e-15,
        inductance=None if cfg.inductance_ph is None else cfg.inductance_ph * 1e-12,
    )


def basis_spec(cfg: RunConfig) -> BasisSpec:
    dim = 3 if cfg.variant == "4j" else 2
    if cfg.cutoff == "cube":
        return BasisSpec(dim, Cube(cfg.k_max))
    return BasisSpec(dim, Ellipsoid(cfg.e_cut))


def f_grid(cfg: RunConfig) -> np.ndarray:
    if cfg.f_steps == 1:
        return np.array([cfg.f_start])
    return np.linspace(cfg.f_start, cfg.f_end, cfg.f_steps)


def _meta_line(cfg: RunConfig, command: str) -> str:
    parts = [
        f"fluxcircuit {__version__} {command}",
        f"variant={cfg.variant} alpha={fmt(cfg.alpha)}"
        + (f" beta={fmt(cfg.beta)}" if cfg.beta is not None else "")
        + f" ej_over_ec={fmt(cfg.ej_over_ec)} f_e={fmt(cfg.f_e)}",
        f"basis={cfg.cutoff} "
        + (f"k_max={cfg.k_max}" if cfg.cutoff == "cube" else f"e_cut={fmt(cfg.e_cut)}"),
        f"levels={cfg.levels}",
    ]
    return "# " + " | ".join(parts)


def _emit(cfg: RunConfig, text: str) -> None:
    if cfg.path is None:
        sys.stdout.write(text)
    else:
        with open(cfg.path, "w", newline="") as fh:
            fh.write(text)


def _table_text(cfg: RunConfig, command: str, columns: list[str], rows) -> str:
    if cfg.format == "csv":
        lines = [_meta_line(cfg, command), ",".join(columns)]
        lines.extend(",".join(fmt(x) for x in row) for row in rows)
        return "\n".join(lines) + "\n"
    doc = {
        "meta": _meta_line(cfg, command)[2:],
        "columns": columns,
        "rows": [[_json_value(x) for x in row] for row in rows],
    }
    return json.dumps(doc, indent=2) + "\n"


def _json_value(x):
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isnan(x) or math.isinf(x):
            return None
        return float(fmt(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.bool_,)):
        return bool(x)
    return x


def _json_clean(obj):
    if isinstance(obj, dict):
        return {k: _json_clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_json_clean(v) for v in obj.tolist()]
    return _json_value(obj)


def cmd_spectrum(cfg: RunConfig) -> str:
    params = circuit_params(cfg)
    basis = basis_spec(cfg)
    table = sweep_flux(
        params, f_grid(cfg), cfg.levels, basis, tol=cfg.solver_tol, jobs=cfg.jobs
    )
    columns = ["f_e"] + [f"E{i}" for i in range(cfg.levels)]
    rows = [[f] + list(row) for f, row in zip(table.f_values, table.energies)]
    return _table_text(cfg, "spectrum", columns, rows)


def cmd_potential(cfg: RunConfig) -> str:
    params = circuit_params(cfg)
    grid = np.linspace(-math.pi, math.pi, cfg.grid_n, endpoint=False)
    rows = []
    for p1 in grid:
        for p2 in grid:
            if params.variant is Variant.FOUR_JUNCTION:
                u = potential_4j((p1, p2, cfg.phi3), params.alpha, params.beta, cfg.f_e)
            else:
                u = potential_3j((p1, p2), params.alpha, cfg.f_e)
            rows.append([p1, p2, float(u)])
    return _table_text(cfg, "potential", ["phi1", "phi2", "U_over_EJ"], rows)


def cmd_transitions(cfg: RunConfig) -> str:
    if cfg.levels < 3:
        raise ConfigError("transitions require levels >= 3")
    params = circuit_params(cfg)
    basis = basis_spec(cfg)
    table = sweep_transitions(
        params, f_grid(cfg), basis, m=cfg.levels, tol=cfg.solver_tol
    )
    columns = ["f_e", "t01", "t02", "t12"]
    rows = [
        [f, table.magnitudes[(0, 1)][i], table.magnitudes[(0, 2)][i], table.magnitudes[(1, 2)][i]]
        for i, f in enumerate(table.f_values)
    ]
    return _table_text(cfg, "transitions", columns, rows)


def cmd_converge(cfg: RunConfig) -> str:
    params = circuit_params(cfg)
    report = converge(params, min(cfg.levels, 4), cfg.conv_tol, tol_solver=cfg.solver_tol)
    columns = ["k_max", "delta"] + [f"E{i}" for i in range(report.energies.shape[1])]
    rows = []
    for i, k in enumerate(report.k_values):
        delta = report.deltas[i - 1] if i > 0 else float("nan")
        rows.append([k, delta] + list(report.energies[i]))
    if cfg.format == "csv":
        text = _table_text(cfg, "converge", columns, rows)
        text += f"# converged_k_max={report.converged_k_max}" + (
            "" if report.monotone_ground_state else " non-monotone-ground-state"
        ) + "\n"
        return text
    doc = {
        "meta": _meta_line(cfg, "converge")[2:],
        "columns": columns,
        "rows": [[_json_value(x) for x in row] for row in rows],
        "converged_k_max": report.converged_k_max,
        "monotone_ground_state": report.monotone_ground_state,
    }
    return json.dumps(doc, indent=2) + "\n"


def cmd_report(cfg: RunConfig) -> str:
    params = circuit_params(cfg)
    basis = basis_spec(cfg)
    doc: dict = {
        "schema_version": 1,
        "tool": f"fluxcircuit {__version__}",
        "params": {
            "variant": cfg.variant,
            "alpha": cfg.alpha,
            "beta": cfg.beta,
            "ej_over_ec": cfg.ej_over_ec,
            "f_e": cfg.f_e,
            "basis": f"{cfg.cutoff} "
            + (f"k_max={cfg.k_max}" if cfg.cutoff == "cube" else f"e_cut={cfg.e_cut}"),
        },
    }
    errors: list[dict] = []

    def section(name, builder):
        try:
            doc[name] = builder()
        except SolverError as exc:
            errors.append({"section": name, "error": str(exc)})
        except (ValueError, RuntimeError, MemoryError) as exc:
            errors.append({"section": name, "error": str(exc)})

    def build_qubit():
        q = extract_qubit(params, basis, tol=cfg.solver_tol)
        deviation = compare_two_level(params, basis, q=q, tol=cfg.solver_tol)
        return {
            "delta_ec": q.delta,
            "i_p_ic": q.i_p,
            "epsilon_slope_ec": q.epsilon_slope,
            "two_level_max_rel_dev": deviation,
        }

    def build_wells():
        report = find_minima(params)
        return {
            "regime": report.regime.value,
            "minima": [m.phases for m in report.minima],
            "potential_at_minima_ej": report.potential_at_minima,
            "barrier_estimate_ej": report.barrier_estimate,
        }

    def build_oscillator():
        osc = oscillator_frequency(params)
        out = {"omega_rad_s": osc.omega, "freq_ghz": osc.frequency_hz / 1e9}
        if cfg.ec_ghz is not None:
            adiabatic = adiabatic_check(
                params,
                ec_ghz=cfg.ec_ghz,
                basis=basis,
            )
            out["adiabatic_ratio"] = adiabatic.ratio
            out["adiabatic_valid"] = adiabatic.valid
            out["adiabatic_borderline"] = adiabatic.borderline
        return out

    def build_classification():
        m = max(cfg.levels, 4)
        grid = f_grid(cfg)
        sweep = sweep_flux(params, grid, m, basis, tol=cfg.solver_tol, jobs=cfg.jobs)
        transitions = sweep_transitions(params, grid, basis, m=m, tol=cfg.solver_tol)
        cls = classify_levels(sweep, transitions)
        return {
            "f_values": cls.f_values,
            "labels": cls.labels,
            "xi_threshold": cls.xi_threshold,
            "leakage_figure": cls.leakage_figure,
            "verdict": cls.verdict,
        }

    def build_convergence():
        report = converge(params, min(cfg.levels, 4), cfg.conv_tol, tol_solver=cfg.solver_tol)
        return {
            "k_values": report.k_values,
            "deltas": report.deltas,
            "converged_k_max": report.converged_k_max,
            "monotone_ground_state": report.monotone_ground_state,
        }

    section("qubit", build_qubit)
    section("wells", build_wells)
    section("oscillator", build_oscillator)
    section("classification", build_classification)
    section("convergence", build_convergence)
    doc["errors"] = errors
    return json.dumps(_json_clean(doc), indent=2) + "\n"


def cmd_print_config(cfg: RunConfig) -> str:
    lines = []
    for section, keys in _SCHEMA.items():
        lines.append(f"[{section}]")
        for key in keys:
            value = getattr(cfg, key)
            if value is None:
                continue
            lines.append(f"{key} = {fmt(value)}")
        lines.append("")
    return "\n".join(lines)


_COMMANDS = {
    "spectrum": cmd_spectrum,
    "potential": cmd_potential,
    "transitions": cmd_transitions,
    "converge": cmd_converge,
    "report": cmd_report,
    "print-config": cmd_print_config,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fluxcircuit",
        description="Spectra, currents and transition elements of flux circuits.",
    )
    parser.add_argument("--version", action="version", version=f"fluxcircuit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", metavar="PATH", help="INI config file")
        p.add_argument("--variant", choices=["3j", "4j"])
        p.add_argument("--alpha", type=float)
        p.add_argument("--beta", type=float)
        p.add_argument("--ej-over-ec", dest="ej_over_ec", type=float)
        p.add_argument("--fe", dest="f_e", type=float, help="static flux for single-point commands")
        p.add_argument("--fe-start", dest="f_start", type=float)
        p.add_argument("--fe-end", dest="f_end", type=float)
        p.add_argument("--fe-steps", dest="f_steps", type=int)
        p.add_argument("--levels", type=int)
        p.add_argument("--kmax", dest="k_max", type=int)
        p.add_argument("--e-cut", dest="e_cut", type=float)
        p.add_argument("--cutoff", choices=["cube", "ellipsoid"])
        p.add_argument("--jobs", type=int)
        p.add_argument("--grid-n", dest="grid_n", type=int)
        p.add_argument("--phi3", type=float)
        p.add_argument("--ec-ghz", dest="ec_ghz", type=float)
        p.add_argument("--capacitance-ff", dest="capacitance_ff", type=float)
        p.add_argument("--inductance-ph", dest="inductance_ph", type=float)
        p.add_argument("--out", dest="path", metavar="PATH")
        p.add_argument("--format", choices=["csv", "json"])
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    overrides = {
        f.name: getattr(args, f.name)
        for f in fields(RunConfig)
        if hasattr(args, f.name)
    }
    try:
        cfg = load_config(args.config, overrides)
        if args.command == "report" and cfg.format == "csv":
            cfg.format = "json"  # report is a JSON document
        text = _COMMANDS[args.command](cfg)
        _emit(cfg, text)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"error: cannot write output: {exc}", file=sys.stderr)
        return 2
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3
    return 0


if __name__ == "__main__":
    sys.exit(main())
