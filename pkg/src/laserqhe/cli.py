"""Command-line front end: steady states, sweeps, optimisation, universality
reports and the data behind the power-vs-p and EMP-vs-p figures.

Every command produces a table (column names plus rows) and a metadata
record, written as CSV or JSON. Exit codes: 0 success, 1 configuration
error, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field

import numpy as np

from .closed_forms import (
    FluxKind,
    clamp_optimal_p,
    emp_fixed_wh,
    emp_low_t,
    optimal_p,
    optimal_xy_low_t,
    taylor_one_parameter,
)
from .exceptions import EngineError
from .liouvillian import solve_steady_full, solve_steady_reduced
from .observables import observables, power_closed_form, power_from_state
from .optimize import POWER_MODELS, SCHEMES, _check_compatible, optimize_power
from .params import FIG2_PARAMS, FIG3_PARAMS, EngineParams, validate
from .universality import (
    emp_second_order,
    emp_second_order_direct,
    extract_emp_series,
    solve_alpha,
    symmetry_defect,
)

COMMANDS = ("steady", "power-sweep", "optimize", "universality", "fig2", "fig3")

# flag name -> EngineParams field
PARAM_FLAGS = {
    "omega-c": "omega_c",
    "omega-h": "omega_h",
    "gamma-c": "gamma_c",
    "gamma-h": "gamma_h",
    "lambda": "lam",
    "p": "p",
    "t-hot": "t_h",
    "t-cold": "t_c",
}
OPTION_KEYS = ("scheme", "model", "kind", "tol", "sweep", "format", "output")

FIG2_LAMBDAS = (0.1, 0.2, 0.3)
FIG2_POINTS = 101
FIG3_PS = (-0.9, 0.0, 0.9)
FIG3_ETAS = tuple(float(v) for v in np.linspace(0.0, 0.99, 100))
DEFAULT_SWEEP = "p:-1:1:101"
ABS_FLOOR = 1e-12


class ConfigError(Exception):
    pass


def _norm(key):
    return key.strip().lower().replace("-", "").replace("_", "")


# Config keys are flag names without dashes; field names are accepted too.
_PARAM_KEYS = {_norm(flag): name for flag, name in PARAM_FLAGS.items()}
_PARAM_KEYS.update({_norm(name): name for name in PARAM_FLAGS.values()})
_OPTION_KEYS = {_norm(k): k for k in OPTION_KEYS}


@dataclass
class RunConfig:
    command: str
    params: EngineParams
    sweep: tuple[str, float, float, int] | None = None
    output: str | None = None
    fmt: str = "csv"
    scheme: str | None = None
    model: str | None = None
    kind: str | None = None
    tol: float | None = None


@dataclass
class Table:
    columns: list[str]
    rows: list[list]
    meta: dict = field(default_factory=dict)


def _to_float(key, text):
    try:
        value = float(text)
    except (TypeError, ValueError):
        raise ConfigError(f"{key}: expected a number, got {text!r}") from None
    if not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite, got {text!r}")
    return value


def read_config(path: str) -> dict:
    """Parse a flat ``key = value`` file with ``#`` comments."""
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc.strerror}") from None
    values = {}
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        norm = _norm(key)
        if norm in _PARAM_KEYS:
            values[_PARAM_KEYS[norm]] = _to_float(key, value)
        elif norm in _OPTION_KEYS:
            values[_OPTION_KEYS[norm]] = value
        else:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
    return values


def parse_sweep(text: str) -> tuple[str, float, float, int]:
    parts = text.split(":")
    if len(parts) != 4:
        raise ConfigError(f"sweep must look like VAR:LO:HI:N, got {text!r}")
    var, lo, hi, n = parts
    name = _PARAM_KEYS.get(_norm(var))
    if name is None:
        raise ConfigError(f"sweep variable {var!r} is not an engine parameter")
    try:
        count = int(n)
    except ValueError:
        raise ConfigError(f"sweep count must be an integer, got {n!r}") from None
    if count < 1:
        raise ConfigError("sweep needs at least one point")
    return name, _to_float("sweep", lo), _to_float("sweep", hi), count


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="laserqhe", description="Four-level laser heat engine with noise-induced coherence.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", help="flat key = value file; flags override it")
    for flag, name in PARAM_FLAGS.items():
        ap.add_argument(f"--{flag}", dest=name, type=float, default=None)
    ap.add_argument("--sweep", help="VAR:LO:HI:N, e.g. p:-1:1:101")
    ap.add_argument("--output", help="output file (default: stdout)")
    ap.add_argument("--format", dest="format", choices=("csv", "json"))
    ap.add_argument("--scheme", choices=SCHEMES)
    ap.add_argument("--model", choices=POWER_MODELS)
    ap.add_argument("--kind", choices=[k.value for k in FluxKind])
    ap.add_argument("--tol", type=float, help="optimiser tolerance override")
    return ap


def make_config(argv=None) -> RunConfig:
    """Merge defaults, config file and flags, in increasing precedence."""
    args = build_parser().parse_args(argv)
    from_file = read_config(args.config) if args.config else {}

    base = FIG3_PARAMS if args.command == "fig3" else FIG2_PARAMS
    values = base.as_dict()
    for name in PARAM_FLAGS.values():
        if name in from_file:
            values[name] = from_file[name]
        if getattr(args, name) is not None:
            values[name] = getattr(args, name)
    params = EngineParams(**values)
    report = validate(params, mode="unrestricted")
    if not report.ok:
        raise ConfigError("; ".join(report.violations))

    def option(key):
        value = getattr(args, key)
        return value if value is not None else from_file.get(key)

    sweep = option("sweep")
    fmt = option("format") or ("csv" if args.command in ("power-sweep", "fig2", "fig3") else "json")
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")
    scheme, model, kind = option("scheme"), option("model"), option("kind")
    if scheme is not None and scheme not in SCHEMES:
        raise ConfigError(f"unknown scheme {scheme!r}")
    if model is not None and model not in POWER_MODELS:
        raise ConfigError(f"unknown model {model!r}")
    if kind is not None and kind not in [k.value for k in FluxKind]:
        raise ConfigError(f"unknown flux kind {kind!r}")
    tol = option("tol")
    if tol is not None:
        tol = _to_float("tol", tol)
        if not tol > 0:
            raise ConfigError("tol must be positive")

    config = RunConfig(
        command=args.command,
        params=params,
        sweep=parse_sweep(sweep) if sweep else None,
        output=option("output"),
        fmt=fmt,
        scheme=scheme,
        model=model,
        kind=kind,
        tol=tol,
    )
    if config.sweep is not None:
        name, lo, hi, _ = config.sweep
        for bound in (lo, hi):
            bad = validate(params.replace(**{name: bound}), mode="unrestricted")
            if not bad.ok:
                raise ConfigError("sweep bound invalid: " + "; ".join(bad.violations))
    return config


def _rel_diff(a, b):
    scale = max(abs(a), abs(b))
    if scale <= ABS_FLOOR:
        return 0.0
    return abs(a - b) / scale


def _matrix_rows(label, rho):
    rows = []
    for i in range(rho.shape[0]):
        for j in range(rho.shape[1]):
            rows.append([f"{label}_re[{i},{j}]", float(rho[i, j].real)])
            rows.append([f"{label}_im[{i},{j}]", float(rho[i, j].imag)])
    return rows


def cmd_steady(config: RunConfig) -> Table:
    params = config.params
    red = solve_steady_reduced(params)
    full = solve_steady_full(params)
    obs = observables(params, full.state)
    closed = power_closed_form(params)
    rows = [
        ["power", obs.power],
        ["power_reduced", power_from_state(params, red.state)],
        ["power_closed_form", closed],
        ["hot_heat_flux", obs.hot_heat_flux],
        ["efficiency", obs.efficiency],
        ["coherence_current", obs.coherence_current],
        ["residual_reduced", red.residual],
        ["residual_full", full.residual],
    ]
    rows += _matrix_rows("rho_reduced", red.state)
    rows += _matrix_rows("rho_full", full.state)
    return Table(["quantity", "value"], rows)


def cmd_power_sweep(config: RunConfig) -> Table:
    name, lo, hi, count = config.sweep or parse_sweep(DEFAULT_SWEEP)
    rows = []
    for value in np.linspace(lo, hi, count):
        value = float(value)
        point = config.params.replace(**{name: value})
        report = validate(point, mode="unrestricted")
        if not report.ok:
            rows.append([value, math.nan, math.nan, math.nan, "invalid: " + "; ".join(report.violations)])
            continue
        try:
            closed = power_closed_form(point)
            numeric = power_from_state(point, solve_steady_full(point).state)
        except EngineError as exc:
            rows.append([value, math.nan, math.nan, math.nan, f"{type(exc).__name__}: {exc}"])
            continue
        rows.append([value, closed, numeric, _rel_diff(closed, numeric), "ok"])
    return Table(
        [name, "power_closed_form", "power_numeric", "rel_diff", "flag"],
        rows,
        {"sweep": {"variable": name, "lo": lo, "hi": hi, "count": count}},
    )


def _analytic_rows(config, opt):
    params, scheme, model = config.params, config.scheme, opt.model
    if scheme == "over_p":
        p_star = optimal_p(params)
        clamped, advice = clamp_optimal_p(params)
        rows = [["analytic_p", p_star], ["analytic_advice", advice]]
        if advice == "interior":
            rows.append(["argmax_diff", abs(opt.p - clamped)])
        return rows
    if scheme == "two_param" and model == "low_t":
        eta = params.carnot
        x, y = optimal_xy_low_t(eta)
        return [
            ["analytic_x", x],
            ["analytic_y", y],
            ["x_diff", abs(opt.omega_c / params.t_c - x)],
            ["y_diff", abs(opt.omega_h / params.t_h - y)],
            ["analytic_emp", emp_low_t(eta)],
            ["emp_diff", abs(opt.emp - emp_low_t(eta))],
        ]
    if scheme == "fixed_wh" and model == "strong_ht":
        exact = emp_fixed_wh(params.carnot, params)
        return [["analytic_emp", exact], ["emp_diff", abs(opt.emp - exact)]]
    return []


def cmd_optimize(config: RunConfig) -> Table:
    if config.scheme is None:
        raise ConfigError("optimize needs --scheme")
    model = config.model or "full"
    try:
        _check_compatible(config.scheme, model)
    except (ValueError, EngineError) as exc:
        raise ConfigError(str(exc)) from None
    opt = optimize_power(config.params, config.scheme, model, tol=config.tol)
    res = opt.result
    rows = [["argmax_" + str(i), v] for i, v in enumerate(res.argmax)]
    rows += [
        ["max_value", res.max_value],
        ["evaluations", res.evaluations],
        ["converged", res.converged],
        ["omega_c", opt.omega_c],
        ["omega_h", opt.omega_h],
        ["p", opt.p],
        ["emp", opt.emp],
    ]
    rows += _analytic_rows(config, opt)
    return Table(
        ["quantity", "value"],
        rows,
        {"scheme": config.scheme, "model": model, "warnings": list(opt.notes)},
    )


# Power model and optimisation scheme whose EMP series belongs to each flux.
_SERIES_FOR_KIND = {
    FluxKind.LOW_T: ("two_param", "low_t"),
    FluxKind.GENERAL: ("two_param", "full"),
    FluxKind.STRONG_COUPLING_HIGH_T: ("fixed_wh", "strong_ht"),
    FluxKind.HIGH_T: None,
}


def _check(rows, name, ok):
    rows.append([f"check:{name}", "pass" if ok else "fail"])


def cmd_universality(config: RunConfig) -> Table:
    kind = FluxKind(config.kind or "general")
    params = config.params
    symmetric = params.gamma_c == params.gamma_h
    defect, pair = symmetry_defect(kind, params)
    alpha = solve_alpha(params, kind)
    c2 = emp_second_order(params, kind, alpha)
    rows = [
        ["symmetry_defect", defect],
        ["worst_x", pair[0]],
        ["worst_y", pair[1]],
        ["alpha", alpha],
        ["c2_flux_formula", c2],
        ["c2_direct", emp_second_order_direct(params, kind, alpha)],
    ]
    series_for = _SERIES_FOR_KIND[kind]
    if config.scheme is not None or config.model is not None:
        series_for = (config.scheme or "two_param", config.model or "full")
    series = None
    if series_for is not None:
        series = extract_emp_series(params, *series_for, tol=config.tol)
        rows += [
            ["series_scheme", series_for[0]],
            ["series_model", series_for[1]],
            ["series_c1", series.c1],
            ["series_c2", series.c2],
            ["series_c3", series.c3],
            ["series_residual", series.residual],
        ]

    if kind is FluxKind.HIGH_T and symmetric:
        expected = (1 + params.p) / (4 * (2 + params.p))
        if params.p == 0:
            _check(rows, "antisymmetric", defect <= 1e-12)
        _check(rows, "c2_high_t", abs(c2 - expected) <= 1e-3)
    elif kind is FluxKind.GENERAL and symmetric and params.p == 0:
        _check(rows, "not_antisymmetric", defect > 1e-6)
        _check(rows, "c2_not_universal", abs(c2 - 0.125) > 1e-3)
    elif kind is FluxKind.LOW_T:
        _check(rows, "alpha_two", abs(alpha - 2.0) <= 1e-9)
        if series is not None:
            _check(rows, "series_c2", abs(series.c2 - 0.125) <= 5e-3)
    if series is not None and series_for[1] == "strong_ht" and series_for[0] in (
        "fixed_wh",
        "fixed_wc",
        "sum_constraint",
    ):
        expected = taylor_one_parameter(series_for[0], params).c2
        _check(rows, "series_c2", abs(series.c2 - expected) <= 5e-3)
    return Table(["quantity", "value"], rows, {"kind": kind.value})


def cmd_fig2(config: RunConfig) -> Table:
    ps = np.linspace(-1.0, 1.0, FIG2_POINTS)
    rows, argmax = [], {}
    for lam in FIG2_LAMBDAS:
        best = (-math.inf, None)
        for p in ps:
            power = power_closed_form(config.params.replace(lam=lam, p=float(p)))
            rows.append([lam, float(p), power])
            if power > best[0]:
                best = (power, float(p))
        argmax[str(lam)] = best[1]
    return Table(["lambda", "p", "power"], rows, {"grid_argmax_p": argmax})


def cmd_fig3(config: RunConfig) -> Table:
    rows = []
    for p in FIG3_PS:
        point = config.params.replace(p=p)
        for eta in FIG3_ETAS:
            rows.append([p, eta, 0.0 if eta == 0.0 else emp_fixed_wh(eta, point)])
    return Table(["p", "eta_c", "emp"], rows)


HANDLERS = {
    "steady": cmd_steady,
    "power-sweep": cmd_power_sweep,
    "optimize": cmd_optimize,
    "universality": cmd_universality,
    "fig2": cmd_fig2,
    "fig3": cmd_fig3,
}


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format(value, ".12g")
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _json_value(value):
    if isinstance(value, (bool, str)) or value is None:
        return value
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if not math.isfinite(value):
            return None
        return float(format(value, ".12g"))
    if isinstance(value, dict):
        return {k: _json_value(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_json_value(v) for v in value]
    return str(value)


def _param_line(config):
    parts = [f"command={config.command}"]
    parts += [f"{k}={_fmt(float(v))}" for k, v in config.params.as_dict().items()]
    for key in ("scheme", "model", "kind", "tol"):
        value = getattr(config, key)
        if value is not None:
            parts.append(f"{key}={_fmt(value)}")
    if config.sweep is not None:
        parts.append("sweep=" + ":".join(_fmt(v) for v in config.sweep))
    return " ".join(parts)


def render(config: RunConfig, table: Table) -> str:
    if config.fmt == "json":
        meta = {"command": config.command, "params": config.params.as_dict()}
        meta.update(table.meta)
        doc = {
            "meta": _json_value(meta),
            "rows": [_json_value(dict(zip(table.columns, row))) for row in table.rows],
        }
        return json.dumps(doc, indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    buf.write("# " + _param_line(config) + "\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    for row in table.rows:
        writer.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _error(code, kind, message):
    record = {"error": kind, "message": message, "exit_code": code}
    sys.stderr.write(json.dumps(record) + "\n")
    return code


def main(argv=None) -> int:
    try:
        config = make_config(argv)
        table = HANDLERS[config.command](config)
    except ConfigError as exc:
        return _error(1, "config", str(exc))
    except (EngineError, ArithmeticError, np.linalg.LinAlgError) as exc:
        return _error(2, type(exc).__name__, str(exc))
    text = render(config, table)
    if config.output:
        try:
            with open(config.output, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            return _error(1, "config", f"cannot write {config.output!r}: {exc.strerror}")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
