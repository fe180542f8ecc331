"""Batch front end: JSON-configured scenarios, machine-readable reports.

Subcommands
-----------
factor   compute the fluctuation factor of one scenario by each requested
         method and report pairwise deviations.
verify   split the interval at one or more junction times and report the
         recombination residuals.
sweep    tabulate |F| and phase over a cartesian grid of one or two
         scalar parameters (CSV).
models   list the builtin model tags and their parameters.

Exit codes: 0 success, 1 config error (nothing is written), 2 numerical
failure (the error name lands in the report).  Reports are byte-stable:
floats are rendered with 17 significant digits and keys are sorted.
"""

from __future__ import annotations

import argparse
import io
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .analytic import (free_particle_factor, harmonic_constant_factor,
                       magnetic_factor, one_dim_dalembert_factor)
from .composition import verify_composition
from .dynamics import DEFAULT_N_STEPS, ClassicalPath, solve_bvp, state_at
from .errors import ConfigError, VanVleckError
from .expressions import compile_potential, parse_expression
from .fluctuation import (FluctuationFactor, energy_hessian_factor,
                          general_factor, short_time_factor, vvpm_factor)
from .gelfand_yaglom import (gy_fluctuation_factor, solve_B_direct,
                             solve_B_neumann, solve_B_time_ordered)
from .hessian import action_hessian_jacobi, frequency_matrix_along_path
from .models import BUILTIN_TAGS, LagrangianModel, builtin_model, metric_solve

METHOD_IDS = ("vvpm", "general", "energy-hessian", "gelfand-yaglom",
              "short-time", "dalembert", "analytic")
PATH_METHODS = {"vvpm", "general", "energy-hessian", "gelfand-yaglom",
                "dalembert"}
GY_SOLVERS = ("direct", "neumann", "time-ordered")

NUMERICS_DEFAULTS = {
    "n_steps": DEFAULT_N_STEPS,
    "tol": 1e-10,
    "max_iter": 50,
    "fd_step": None,
    "series_order": 8,
    "quad_points": 64,
    "n_slices": 2000,
    "gy_solver": "direct",
}

MAX_SERIALIZED_SAMPLES = 256


# ---------------------------------------------------------------------------
# canonical JSON


def _canon(obj):
    if isinstance(obj, dict):
        return {str(k): _canon(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_canon(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _canon(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if obj is None or isinstance(obj, str):
        return obj
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def format_float(value: float) -> str:
    """17 significant digits, enough to round-trip a double, byte-stable."""
    if not np.isfinite(value):
        raise ValueError("reports must not contain non-finite numbers")
    return format(float(value), ".17g")


def _write_json(out: io.StringIO, obj, level: int) -> None:
    pad = "  " * level
    if obj is None:
        out.write("null")
    elif obj is True:
        out.write("true")
    elif obj is False:
        out.write("false")
    elif isinstance(obj, int):
        out.write(str(obj))
    elif isinstance(obj, float):
        out.write(format_float(obj))
    elif isinstance(obj, str):
        out.write(json.dumps(obj, ensure_ascii=False))
    elif isinstance(obj, list):
        if not obj:
            out.write("[]")
            return
        out.write("[")
        for i, item in enumerate(obj):
            if i:
                out.write(", ")
            _write_json(out, item, level)
        out.write("]")
    elif isinstance(obj, dict):
        if not obj:
            out.write("{}")
            return
        out.write("{\n")
        keys = sorted(obj)
        for i, key in enumerate(keys):
            out.write(pad + "  " + json.dumps(key, ensure_ascii=False) + ": ")
            _write_json(out, obj[key], level + 1)
            out.write(",\n" if i + 1 < len(keys) else "\n")
        out.write(pad + "}")
    else:  # pragma: no cover - _canon rejects everything else first
        raise TypeError(type(obj).__name__)


def dumps_canonical(obj) -> str:
    out = io.StringIO()
    _write_json(out, _canon(obj), 0)
    out.write("\n")
    return out.getvalue()


def _emit(text: str, out_path: Optional[str]) -> None:
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as handle:
            handle.write(text)


# ---------------------------------------------------------------------------
# config parsing


def _check_keys(cfg: dict, allowed, where: str) -> None:
    if not isinstance(cfg, dict):
        raise ConfigError(f"{where} must be a JSON object")
    for key in cfg:
        if key not in allowed:
            raise ConfigError(f"unknown key {key!r} in {where}")


def _vector(value, name: str) -> np.ndarray:
    if isinstance(value, (int, float)):
        return np.array([float(value)])
    if isinstance(value, list) and all(isinstance(v, (int, float)) for v in value):
        return np.asarray(value, dtype=float)
    raise ConfigError(f"{name} must be a number or a list of numbers")


def _scalar(cfg: dict, key: str, where: str, default=None) -> float:
    if key not in cfg:
        if default is None:
            raise ConfigError(f"missing key {key!r} in {where}")
        return float(default)
    value = cfg[key]
    if not isinstance(value, (int, float)) or isinstance(value, bool):
        raise ConfigError(f"{key} must be a number")
    return float(value)


def _time_expression(text: str):
    node = parse_expression(text)
    if node.uses_x:
        raise ConfigError("a time-dependent frequency may not depend on x")
    return lambda t: node.evaluate(0.0, t)


def _parse_numerics(cfg: dict) -> dict:
    _check_keys(cfg, set(NUMERICS_DEFAULTS), "numerics")
    numerics = dict(NUMERICS_DEFAULTS)
    for key, value in cfg.items():
        if key == "gy_solver":
            if value not in GY_SOLVERS:
                raise ConfigError(f"gy_solver must be one of {GY_SOLVERS}")
            numerics[key] = value
        elif key in ("n_steps", "max_iter", "series_order", "quad_points",
                     "n_slices"):
            if not isinstance(value, int) or isinstance(value, bool) or value < 0:
                raise ConfigError(f"{key} must be a nonnegative integer")
            numerics[key] = value
        else:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"{key} must be a number")
            numerics[key] = float(value)
    return numerics


def build_model(model_cfg: dict, hbar: float):
    """Instantiate a builtin from its config block.

    Returns the model plus the coerced parameter dict (used by the
    closed-form dispatch, which needs the raw numbers back).
    """
    _check_keys(model_cfg, {"tag", "params"}, "model")
    tag = model_cfg.get("tag")
    if tag not in BUILTIN_TAGS:
        raise ConfigError(
            f"unknown model tag {tag!r}; available: {sorted(BUILTIN_TAGS)}")
    params = model_cfg.get("params", {})
    _check_keys(params, set(BUILTIN_TAGS[tag]["params"]),
                f"model.params for {tag!r}")
    coerced = {}
    for key, value in params.items():
        if key == "potential":
            if not isinstance(value, str):
                raise ConfigError("potential must be an expression string")
            v, dv, d2v = compile_potential(value)
            coerced["potential"] = v
            coerced["potential_grad"] = dv
            coerced["potential_hess"] = d2v
        elif key == "omega2" and isinstance(value, str):
            coerced[key] = _time_expression(value)
        elif key in ("mass", "stiffness") and isinstance(value, list):
            coerced[key] = np.asarray(value, dtype=float)
        elif key == "dim":
            if not isinstance(value, int) or isinstance(value, bool):
                raise ConfigError("dim must be an integer")
            coerced[key] = value
        else:
            if not isinstance(value, (int, float)) or isinstance(value, bool):
                raise ConfigError(f"model parameter {key!r} must be a number")
            coerced[key] = float(value)
    try:
        model = builtin_model(tag, hbar=hbar, **coerced)
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"cannot build model {tag!r}: {exc}") from exc
    return model, coerced


@dataclass(frozen=True)
class Scenario:
    """One validated factor scenario; ``raw`` is the config verbatim."""

    raw: dict
    model: LagrangianModel
    tag: str
    params: dict
    x_a: np.ndarray
    x_b: np.ndarray
    t_a: float
    t_b: float
    hbar: float
    methods: tuple
    numerics: dict
    output: Optional[str]

    @property
    def duration(self) -> float:
        return self.t_b - self.t_a


def serialize_scenario(scenario: Scenario) -> dict:
    return json.loads(json.dumps(scenario.raw))


_SCENARIO_KEYS = {"model", "x_a", "x_b", "t_a", "t_b", "hbar", "methods",
                  "numerics", "output"}


def parse_scenario(cfg: dict, require_methods: bool = True,
                   extra_keys=()) -> Scenario:
    _check_keys(cfg, _SCENARIO_KEYS | set(extra_keys), "config")
    if "model" not in cfg:
        raise ConfigError("missing key 'model' in config")
    hbar = _scalar(cfg, "hbar", "config", default=1.0)
    if hbar <= 0.0:
        raise ConfigError("hbar must be positive")
    model, params = build_model(cfg["model"], hbar)
    x_a = _vector(cfg.get("x_a", [0.0] * model.dim), "x_a")
    x_b = _vector(cfg.get("x_b", [0.0] * model.dim), "x_b")
    if x_a.shape != (model.dim,) or x_b.shape != (model.dim,):
        raise ConfigError(
            f"endpoints must have {model.dim} components for this model")
    t_a = _scalar(cfg, "t_a", "config", default=0.0)
    t_b = _scalar(cfg, "t_b", "config")
    if not t_b > t_a:
        raise ConfigError("t_b must be larger than t_a")
    numerics = _parse_numerics(cfg.get("numerics", {}))
    output = cfg.get("output")
    if output is not None and not isinstance(output, str):
        raise ConfigError("output must be a path string")

    methods = cfg.get("methods", [])
    if require_methods:
        if (not isinstance(methods, list) or not methods
                or not all(isinstance(m, str) for m in methods)):
            raise ConfigError("methods must be a nonempty list of strings")
        for method in methods:
            if method not in METHOD_IDS:
                raise ConfigError(
                    f"unknown method {method!r}; available: {METHOD_IDS}")
        tag = cfg["model"]["tag"]
        if "dalembert" in methods and model.dim != 1:
            raise ConfigError("method 'dalembert' needs a one-dimensional model")
        if "analytic" in methods:
            if tag == "one_dim_potential":
                raise ConfigError(
                    "method 'analytic' has no closed form for expression "
                    "potentials")
            if tag == "harmonic_oscillator" and callable(params.get("omega2")):
                raise ConfigError(
                    "method 'analytic' needs a constant frequency")
        if "gelfand-yaglom" in methods and tag == "magnetic_field":
            raise ConfigError(
                "method 'gelfand-yaglom' needs a vanishing vector potential")
    return Scenario(raw=json.loads(json.dumps(cfg)), model=model,
                    tag=cfg["model"]["tag"], params=params, x_a=x_a, x_b=x_b,
                    t_a=t_a, t_b=t_b, hbar=hbar, methods=tuple(methods),
                    numerics=numerics, output=output)


# ---------------------------------------------------------------------------
# factor computation


def _solve_scenario_path(scenario: Scenario) -> ClassicalPath:
    numerics = scenario.numerics
    return solve_bvp(scenario.model, scenario.x_a, scenario.x_b,
                     scenario.t_a, scenario.t_b,
                     n_steps=numerics["n_steps"], tol=numerics["tol"],
                     max_iter=numerics["max_iter"])


def _gy_factor(scenario: Scenario, path: ClassicalPath) -> FluctuationFactor:
    model = scenario.model
    frequency_matrix_along_path(path, path.t_a)  # validates zero potential a

    def omega2(t):
        x, _ = state_at(path, t)
        return metric_solve(model, x, t,
                            np.asarray(model.potential_hess(x, t), float))

    numerics = scenario.numerics
    solver = numerics["gy_solver"]
    if solver == "direct":
        sol = solve_B_direct(omega2, path.t_a, path.t_b,
                             n_steps=numerics["n_steps"])
    elif solver == "neumann":
        sol = solve_B_neumann(omega2, path.t_a, path.t_b,
                              order=numerics["series_order"],
                              quad_points=numerics["quad_points"])
    else:
        sol = solve_B_time_ordered(omega2, path.t_a, path.t_b,
                                   n_slices=numerics["n_slices"])
    mass = np.asarray(model.metric(path.x_a, path.t_a), dtype=float)
    return gy_fluctuation_factor(sol, mass, hbar=scenario.hbar)


def _analytic_result(scenario: Scenario):
    mass = np.asarray(scenario.model.metric(scenario.x_a, scenario.t_a),
                      dtype=float)
    if scenario.tag == "free_particle":
        return free_particle_factor(mass, scenario.duration, scenario.hbar,
                                    x_a=scenario.x_a, x_b=scenario.x_b)
    if scenario.tag == "harmonic_oscillator":
        if "stiffness" in scenario.params:
            omega2 = np.linalg.solve(mass, scenario.params["stiffness"])
        else:
            omega2 = scenario.params["omega2"]
        return harmonic_constant_factor(mass, omega2, scenario.duration,
                                        scenario.hbar, x_a=scenario.x_a,
                                        x_b=scenario.x_b)
    return magnetic_factor(scenario.params.get("mass", 1.0),
                           scenario.params.get("omega", 1.0),
                           scenario.model.dim, scenario.duration,
                           scenario.hbar, x_a=scenario.x_a, x_b=scenario.x_b)


def compute_factors(scenario: Scenario):
    """All requested factors, the path (if one was needed), analytic extras."""
    path = None
    if PATH_METHODS & set(scenario.methods):
        path = _solve_scenario_path(scenario)
    factors = {}
    analytic_extras = None
    for method in scenario.methods:
        if method == "vvpm":
            factors[method] = vvpm_factor(action_hessian_jacobi(path),
                                          hbar=scenario.hbar)
        elif method == "general":
            factors[method] = general_factor(path)
        elif method == "energy-hessian":
            factors[method] = energy_hessian_factor(
                scenario.model, path, h=scenario.numerics["fd_step"])
        elif method == "gelfand-yaglom":
            factors[method] = _gy_factor(scenario, path)
        elif method == "short-time":
            factors[method] = short_time_factor(
                scenario.model, scenario.x_a, scenario.t_a, scenario.duration)
        elif method == "dalembert":
            result = one_dim_dalembert_factor(path, hbar=scenario.hbar)
            factors[method] = result.factor
        else:
            result = _analytic_result(scenario)
            factors[method] = result.factor
            analytic_extras = {"action": result.action,
                               "aux": {k: v for k, v in result.aux.items()}}
    return factors, path, analytic_extras


def pairwise_deviations(factors: dict) -> dict:
    out = {}
    names = sorted(factors)
    for i, first in enumerate(names):
        for second in names[i + 1:]:
            a, b = factors[first].value, factors[second].value
            out[f"{first}|{second}"] = abs(a - b) / max(abs(a), abs(b))
    return out


def path_to_dict(path: ClassicalPath, full_grid: bool) -> dict:
    n = len(path.times)
    if full_grid or n <= MAX_SERIALIZED_SAMPLES:
        idx = np.arange(n)
    else:
        idx = np.unique(np.round(
            np.linspace(0, n - 1, MAX_SERIALIZED_SAMPLES)).astype(int))
    return {
        "t": path.times[idx],
        "x": path.positions[idx],
        "v": path.velocities[idx],
        "action": path.action,
        "p_a": path.p_a,
        "p_b": path.p_b,
        "energy_a": path.energy_a,
        "bvp_residual": path.bvp_residual,
        "n_steps": path.n_steps,
    }


def _error_report(command: str, cfg: dict, exc: Exception) -> dict:
    return {"command": command, "config": cfg,
            "error": {"name": type(exc).__name__, "message": str(exc)}}


_NUMERICAL_ERRORS = (VanVleckError, ValueError, ZeroDivisionError,
                     FloatingPointError, np.linalg.LinAlgError)


def run_factor(scenario: Scenario, full_grid: bool = False) -> dict:
    factors, path, analytic_extras = compute_factors(scenario)
    report = {
        "command": "factor",
        "config": serialize_scenario(scenario),
        "factors": {name: f.as_dict() for name, f in factors.items()},
        "pairwise_deviations": pairwise_deviations(factors),
        "path": path_to_dict(path, full_grid) if path is not None else None,
    }
    if analytic_extras is not None:
        report["analytic"] = analytic_extras
    return report


def cmd_factor(cfg: dict, out_path: Optional[str], full_grid: bool) -> int:
    scenario = parse_scenario(cfg)
    out_path = out_path or scenario.output
    try:
        report = run_factor(scenario, full_grid)
    except _NUMERICAL_ERRORS as exc:
        _emit(dumps_canonical(_error_report("factor", scenario.raw, exc)),
              out_path)
        return 2
    _emit(dumps_canonical(report), out_path)
    return 0


# ---------------------------------------------------------------------------
# verify


_VERIFY_KEYS = {"t_mid", "thresholds", "midpoint_offset"}


def cmd_verify(cfg: dict, out_path: Optional[str]) -> int:
    scenario = parse_scenario(cfg, require_methods=False,
                              extra_keys=_VERIFY_KEYS)
    out_path = out_path or scenario.output
    if "t_mid" not in cfg:
        raise ConfigError("missing key 't_mid' in config")
    t_mid_values = cfg["t_mid"]
    if isinstance(t_mid_values, (int, float)):
        t_mid_values = [t_mid_values]
    if not isinstance(t_mid_values, list) or not t_mid_values:
        raise ConfigError("t_mid must be a number or a nonempty list")
    for t_mid in t_mid_values:
        if not isinstance(t_mid, (int, float)) or isinstance(t_mid, bool):
            raise ConfigError("t_mid entries must be numbers")
        if not scenario.t_a < t_mid < scenario.t_b:
            raise ConfigError(
                f"t_mid={t_mid} must lie strictly between t_a and t_b")
    thresholds_cfg = cfg.get("thresholds", {})
    _check_keys(thresholds_cfg, {"factor", "momentum"}, "thresholds")
    factor_tol = _scalar(thresholds_cfg, "factor", "thresholds", default=1e-6)
    momentum_tol = _scalar(thresholds_cfg, "momentum", "thresholds",
                           default=1e-8)
    offset = cfg.get("midpoint_offset")
    if offset is not None:
        offset = _vector(offset, "midpoint_offset")
        if offset.shape != (scenario.model.dim,):
            raise ConfigError("midpoint_offset must match the model dimension")

    reports = []
    try:
        for t_mid in t_mid_values:
            rep = verify_composition(
                scenario.model, scenario.x_a, scenario.x_b, scenario.t_a,
                scenario.t_b, float(t_mid), tol=factor_tol,
                n_steps=scenario.numerics["n_steps"],
                momentum_tol=momentum_tol, midpoint_offset=offset)
            reports.append({
                "t_mid": rep.t_mid,
                "x_mid": rep.x_mid,
                "momentum_mismatch": rep.momentum_mismatch,
                "action_additivity_residual": rep.action_additivity_residual,
                "factor_residual": rep.factor_residual,
                "jacobian_identity_residual": rep.jacobian_identity_residual,
                "thresholds": rep.thresholds,
                "passed": rep.passed,
                "diagnostic": rep.diagnostic,
            })
    except _NUMERICAL_ERRORS as exc:
        _emit(dumps_canonical(_error_report("verify", scenario.raw, exc)),
              out_path)
        return 2
    diagnostic_mode = offset is not None
    all_passed = all(rep["passed"] for rep in reports)
    report = {
        "command": "verify",
        "config": serialize_scenario(scenario),
        "reports": reports,
        "all_passed": all_passed,
        "diagnostic_mode": diagnostic_mode,
    }
    _emit(dumps_canonical(report), out_path)
    return 0 if all_passed or diagnostic_mode else 2


# ---------------------------------------------------------------------------
# sweep


_SWEEP_PARAM_KEYS = {"name", "start", "stop", "count"}


def _parse_sweep_block(cfg: dict) -> list:
    _check_keys(cfg, {"parameters"}, "sweep")
    parameters = cfg.get("parameters")
    if not isinstance(parameters, list) or not 1 <= len(parameters) <= 2:
        raise ConfigError("sweep.parameters must list one or two parameters")
    parsed = []
    for block in parameters:
        _check_keys(block, _SWEEP_PARAM_KEYS, "sweep parameter")
        name = block.get("name")
        if not isinstance(name, str) or not name:
            raise ConfigError("sweep parameter needs a name")
        if name not in ("T", "hbar") and not name.startswith("model."):
            raise ConfigError(
                f"cannot sweep {name!r}; use 'T', 'hbar' or 'model.<param>'")
        start = _scalar(block, "start", "sweep parameter")
        stop = _scalar(block, "stop", "sweep parameter")
        count = block.get("count")
        if not isinstance(count, int) or isinstance(count, bool) or count < 1:
            raise ConfigError("sweep parameter count must be a positive integer")
        parsed.append((name, np.linspace(start, stop, count)))
    return parsed


def _apply_overrides(cfg: dict, overrides) -> dict:
    patched = json.loads(json.dumps(cfg))
    patched.pop("sweep", None)
    patched.pop("output", None)
    for name, value in overrides:
        if name == "T":
            patched["t_b"] = patched.get("t_a", 0.0) + value
        elif name == "hbar":
            patched["hbar"] = value
        else:
            patched.setdefault("model", {}).setdefault("params", {})[
                name[len("model."):]] = value
    return patched


def _sweep_row(payload) -> dict:
    cfg, overrides = payload
    row = {name: value for name, value in overrides}
    try:
        scenario = parse_scenario(_apply_overrides(cfg, overrides))
        factors, path, _ = compute_factors(scenario)
    except (ConfigError,) + _NUMERICAL_ERRORS as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
        return row
    for name, factor in factors.items():
        row[f"{name}_magnitude"] = factor.magnitude
        row[f"{name}_phase"] = factor.phase
    deviations = pairwise_deviations(factors)
    row["max_deviation"] = max(deviations.values()) if deviations else 0.0
    row["action"] = path.action if path is not None else None
    row["error"] = ""
    return row


def cmd_sweep(cfg: dict, out_path: Optional[str], threads: int) -> int:
    if "sweep" not in cfg:
        raise ConfigError("missing key 'sweep' in config")
    sweep_params = _parse_sweep_block(cfg["sweep"])
    base = json.loads(json.dumps(cfg))
    base.pop("sweep")
    scenario = parse_scenario(base, extra_keys=())  # validate before running
    out_path = out_path or scenario.output

    names = [name for name, _ in sweep_params]
    grids = [grid for _, grid in sweep_params]
    combos = [[(names[0], float(v))] for v in grids[0]]
    if len(grids) == 2:
        combos = [first + [(names[1], float(w))]
                  for first in combos for w in grids[1]]
    payloads = [(base, combo) for combo in combos]

    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(_sweep_row, payloads))
    else:
        rows = [_sweep_row(payload) for payload in payloads]

    method_columns = []
    for method in sorted(scenario.methods):
        method_columns += [f"{method}_magnitude", f"{method}_phase"]
    header = names + method_columns + ["max_deviation", "action", "error"]
    lines = [",".join(header)]
    for row in rows:
        cells = []
        for column in header:
            value = row.get(column, "")
            if isinstance(value, float):
                cells.append(format_float(value))
            elif value is None:
                cells.append("")
            else:
                cells.append(str(value).replace(",", ";"))
        lines.append(",".join(cells))
    _emit("\n".join(lines) + "\n", out_path)
    return 0


# ---------------------------------------------------------------------------
# models


def cmd_models(out_path: Optional[str]) -> int:
    report = {"builtins": {
        tag: {"params": dict(entry["params"])}
        for tag, entry in BUILTIN_TAGS.items()
    }}
    _emit(dumps_canonical(report), out_path)
    return 0


# ---------------------------------------------------------------------------
# entry point


def _load_config(path: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            cfg = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path!r} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be a JSON object")
    return cfg


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="vanvleck",
        description="Semiclassical fluctuation factors from JSON scenarios.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_factor = sub.add_parser("factor", help="compute fluctuation factors")
    p_factor.add_argument("--config", required=True)
    p_factor.add_argument("--out", default=None)
    p_factor.add_argument("--full-grid", action="store_true",
                          help="serialize every trajectory sample")

    p_verify = sub.add_parser("verify", help="check the splitting identity")
    p_verify.add_argument("--config", required=True)
    p_verify.add_argument("--out", default=None)

    p_sweep = sub.add_parser("sweep", help="tabulate factors over a grid")
    p_sweep.add_argument("--config", required=True)
    p_sweep.add_argument("--out", default=None)
    p_sweep.add_argument("--threads", type=int, default=1)

    p_models = sub.add_parser("models", help="list builtin model tags")
    p_models.add_argument("--out", default=None)

    args = parser.parse_args(argv)
    try:
        if args.command == "factor":
            return cmd_factor(_load_config(args.config), args.out,
                              args.full_grid)
        if args.command == "verify":
            return cmd_verify(_load_config(args.config), args.out)
        if args.command == "sweep":
            return cmd_sweep(_load_config(args.config), args.out, args.threads)
        return cmd_models(args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1


def entry() -> None:
    sys.exit(main())
