"""Command-line front end.

Subcommands: ``validate``, ``spectrum``, ``map``, ``carve``, ``repro``.
Exit codes: 0 ok, 2 usage/validation error, 3 protocol extinguished,
4 solver failure.  Options may also be supplied through a flat
``key = value`` config file (``--config``); explicit command-line flags
override file values, and unknown config keys are rejected.  The output
directory for ``repro`` defaults to the ``CHIRALCAV_OUTDIR`` environment
variable when set.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import carving, spectrum, tables
from .errors import (
    DipNotFoundError,
    ProtocolExtinguishedError,
    SolverError,
    ValidationError,
)
from .params import SystemParams, validate
from .tables import DataTable

OUTDIR_ENV = "CHIRALCAV_OUTDIR"

_SYSTEM_OPTIONS = {
    "n_atoms": ("--n", int, 2, "number of cavity-coupled atoms"),
    "gamma_l": ("--gamma-l", float, 1.0, "left-propagating decay rate (units of gamma)"),
    "gamma_r": ("--gamma-r", float, None, "right-propagating decay rate (default 1 - gamma_L)"),
    "xi": ("--xi", float, 0.0, "interatomic phase k_s d in radians"),
    "g": ("--g", float, 20.0, "atom-photon coupling (units of gamma)"),
    "kappa_wg": ("--kappa-wg", float, 100.0, "cavity decay to the waveguide"),
    "kappa_sc": ("--kappa-sc", float, 300.0, "cavity scattering loss"),
    "gamma_mhz": ("--gamma-mhz", float, None, "optional display scale for gamma"),
}

_OUTPUT_OPTIONS = {
    "output": ("--output", str, None, "output file (default: stdout)"),
    "format": ("--format", str, "csv", "output format: csv or json"),
    "precision": ("--precision", int, tables.DEFAULT_DIGITS, "significant digits"),
}

_COMMAND_OPTIONS: dict[str, dict[str, tuple[str, type, object, str]]] = {
    "validate": dict(_SYSTEM_OPTIONS),
    "spectrum": {
        **_SYSTEM_OPTIONS,
        **_OUTPUT_OPTIONS,
        "delta_min": ("--delta-min", float, -3.0, "lower edge of the detuning grid"),
        "delta_max": ("--delta-max", float, 3.0, "upper edge of the detuning grid"),
        "points": ("--points", int, spectrum.DIP_POINTS, "number of grid points"),
        "prominence": ("--prominence", float, spectrum.PROMINENCE_MIN, "feature prominence threshold"),
    },
    "map": {
        **_SYSTEM_OPTIONS,
        **_OUTPUT_OPTIONS,
        "xi_min": ("--xi-min", float, 0.0, "lower edge of the xi grid"),
        "xi_max": ("--xi-max", float, 2.0 * math.pi, "upper edge of the xi grid"),
        "xi_points": ("--xi-points", int, 161, "xi grid size"),
        "gamma_l_min": ("--gamma-l-min", float, 0.0, "lower edge of the gamma_L grid"),
        "gamma_l_max": ("--gamma-l-max", float, 1.0, "upper edge of the gamma_L grid"),
        "gamma_l_points": ("--gamma-l-points", int, 41, "gamma_L grid size"),
    },
    "carve": {
        **{k: v for k, v in _SYSTEM_OPTIONS.items() if k != "n_atoms"},
        **_OUTPUT_OPTIONS,
        "m": ("--m", int, 2, "total number of register atoms"),
        "reps": ("--reps", int, 1, "measurement repetitions per plan step"),
        "dip_sign": ("--dip-sign", int, +1, "sign of the dip detunings used (+1 or -1)"),
    },
    "repro": {
        "outdir": ("--outdir", str, None, "output directory (default: $CHIRALCAV_OUTDIR or .)"),
        "format": ("--format", str, "csv", "output format: csv or json"),
        "precision": ("--precision", int, tables.DEFAULT_DIGITS, "significant digits"),
    },
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="chiralcav",
        description="Reflectivity spectra and state carving for a chirally coupled atom-cavity system",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for command, options in _COMMAND_OPTIONS.items():
        p = sub.add_parser(command)
        p.add_argument("--config", type=str, default=None, help="flat key = value config file")
        if command == "repro":
            p.add_argument("figure", type=str, help="dataset id: fig2, fig3, fig3_2 or fig4")
        for dest, (flag, typ, _default, help_text) in options.items():
            p.add_argument(flag, dest=dest, type=typ, default=argparse.SUPPRESS, help=help_text)
    return parser


def _load_config(path: str) -> dict[str, str]:
    values: dict[str, str] = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValidationError(f"malformed config line: {raw!r}")
        key, _, val = line.partition("=")
        values[key.strip()] = val.strip()
    return values


def _merge_options(args: argparse.Namespace, command: str) -> dict:
    """defaults < config file < explicit flags, rejecting unknown keys."""
    options = _COMMAND_OPTIONS[command]
    merged = {dest: default for dest, (_f, _t, default, _h) in options.items()}
    if getattr(args, "config", None):
        for key, text in _load_config(args.config).items():
            if key not in options:
                raise ValidationError(f"unknown config key: {key!r}")
            merged[key] = options[key][1](text)
    for dest in options:
        if hasattr(args, dest):
            merged[dest] = getattr(args, dest)
    return merged


def _system_params(opt: dict) -> SystemParams:
    params = SystemParams(
        n_atoms=opt.get("n_atoms", 0),
        gamma_L=opt["gamma_l"],
        gamma_R=opt["gamma_r"],
        g=opt["g"],
        kappa_wg=opt["kappa_wg"],
        kappa_sc=opt["kappa_sc"],
        xi=opt["xi"],
        gamma_mhz=opt["gamma_mhz"],
    )
    report = validate(params)
    if not report.ok:
        raise ValidationError("; ".join(report.violations))
    return params


def _emit(table: DataTable, opt: dict) -> None:
    fmt_name = opt["format"]
    if fmt_name not in ("csv", "json"):
        raise ValidationError(f"unknown output format: {fmt_name!r}")
    digits = opt["precision"]
    if opt.get("output"):
        tables.write_table(table, opt["output"], fmt_name, digits)
    else:
        render = tables.render_csv if fmt_name == "csv" else tables.render_json
        sys.stdout.write(render(table, digits))


def _cmd_validate(args: argparse.Namespace) -> int:
    opt = _merge_options(args, "validate")
    params = SystemParams(
        n_atoms=opt["n_atoms"],
        gamma_L=opt["gamma_l"],
        gamma_R=opt["gamma_r"],
        g=opt["g"],
        kappa_wg=opt["kappa_wg"],
        kappa_sc=opt["kappa_sc"],
        xi=opt["xi"],
        gamma_mhz=opt["gamma_mhz"],
    )
    report = validate(params)
    if report.ok:
        print("ok")
        return 0
    for violation in report.violations:
        print(f"violation: {violation}")
    return 2


def _cmd_spectrum(args: argparse.Namespace) -> int:
    opt = _merge_options(args, "spectrum")
    params = _system_params(opt)
    spec = spectrum.sweep_delta(params, opt["delta_min"], opt["delta_max"], opt["points"])
    features = spectrum.find_features(spec, opt["prominence"])
    rows = np.column_stack([spec.deltas, spec.values])
    table = DataTable(
        name="spectrum",
        columns=("delta_over_gamma", "R"),
        rows=rows,
        meta=spectrum.table_meta(params, "spectrum", "spectrum", delta_c="locked"),
        features=tuple((f.kind, f.delta, f.value, f.width) for f in features),
    )
    _emit(table, opt)
    return 0


def _cmd_map(args: argparse.Namespace) -> int:
    opt = _merge_options(args, "map")
    params = _system_params(opt)
    if opt["gamma_l_min"] < 0 or opt["gamma_l_max"] > 1:
        raise ValidationError("gamma_L grid must lie inside [0, 1]")
    xi_grid = np.linspace(opt["xi_min"], opt["xi_max"], opt["xi_points"])
    gl_grid = np.linspace(opt["gamma_l_min"], opt["gamma_l_max"], opt["gamma_l_points"])
    map2d = spectrum.sweep_2d(params, xi_grid, gl_grid)
    rows = np.column_stack(
        [
            np.repeat(map2d.xi_grid, map2d.gamma_L_grid.size),
            np.tile(map2d.gamma_L_grid, map2d.xi_grid.size),
            map2d.values.ravel(),
        ]
    )
    table = DataTable(
        name="map",
        columns=("xi", "gamma_L", "R"),
        rows=rows,
        meta=spectrum.table_meta(params, "map", "map", delta="0"),
    )
    _emit(table, opt)
    return 0


def _cmd_carve(args: argparse.Namespace) -> int:
    opt = _merge_options(args, "carve")
    template = SystemParams(
        n_atoms=opt["m"],
        gamma_L=opt["gamma_l"],
        gamma_R=opt["gamma_r"],
        g=opt["g"],
        kappa_wg=opt["kappa_wg"],
        kappa_sc=opt["kappa_sc"],
        xi=opt["xi"],
        gamma_mhz=opt["gamma_mhz"],
    )
    result = carving.run_protocol(
        opt["m"], template, repetitions_per_step=opt["reps"], dip_sign=opt["dip_sign"]
    )
    rows = np.array(
        [
            [rec.step, rec.delta, rec.herald_probability, rec.cumulative_probability, rec.fidelity]
            for rec in result.trace
        ]
    )
    meta = spectrum.table_meta(template, "carve", f"M{opt['m']}")
    meta.update(
        {
            "m": str(opt["m"]),
            "repetitions_per_step": str(opt["reps"]),
            "target": result.plan.target,
            "plan_deltas": " ".join(tables.fmt(d) for d in result.plan.steps),
            "cumulative_herald_probability": tables.fmt(result.cumulative_herald_probability),
            "final_fidelity": tables.fmt(result.fidelity_vs_step[-1]),
        }
    )
    table = DataTable(
        name=f"carve_M{opt['m']}",
        columns=("step", "delta", "herald_prob", "cumulative_prob", "fidelity"),
        rows=rows,
        meta=meta,
    )
    _emit(table, opt)
    return 0


def _cmd_repro(args: argparse.Namespace) -> int:
    opt = _merge_options(args, "repro")
    try:
        data = spectrum.figure_data(args.figure)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    outdir = Path(opt["outdir"] or os.environ.get(OUTDIR_ENV) or ".")
    outdir.mkdir(parents=True, exist_ok=True)
    suffix = "csv" if opt["format"] == "csv" else "json"
    for table in data:
        tables.write_table(
            table, outdir / f"{table.name}.{suffix}", opt["format"], opt["precision"]
        )
        print(outdir / f"{table.name}.{suffix}")
    return 0


_HANDLERS = {
    "validate": _cmd_validate,
    "spectrum": _cmd_spectrum,
    "map": _cmd_map,
    "carve": _cmd_carve,
    "repro": _cmd_repro,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ProtocolExtinguishedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (SolverError, DipNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    raise SystemExit(main())
