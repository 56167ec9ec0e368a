"""Command-line entry point.

Commands
--------
build       construct a spline, a scaled summand, or a recursive partial
            sum, and serialize it with a human summary
solve       run one minimax approximation (free or shape-constrained)
experiment  run a named certification experiment and write its report

Every run writes into one directory: config-echo.json (the exact
resolved configuration, replayable), artifacts/*.json, report.json,
tables/*.csv, and plots/*.dat.  Config values come from an optional JSON
file (--config) overridden by command-line flags.

Exit codes: 0 success, 1 a declared assertion failed, 2 numerical
failure (solver breakdown, unrepresentable plan level), 64 usage or
validation error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import os
import re
import sys
from fractions import Fraction
from pathlib import Path

import jsonschema
import numpy as np

from .counterexample import (RealizabilityError, build_partial_sum,
                             build_summand, canonical_sign_set,
                             plan_recursion)
from .experiments import EXPERIMENT_NAMES, run_experiment
from .grids import Interval, SOLVER_GRID
from .ledger import ConstantsLedger, EpsGrowthError
from .minimax import best_approx, best_co_q_monotone
from .mollifier import build_mollifier_table
from .reports import write_json, write_report_files
from .signsets import (SignChangeSet, delta_q_membership,
                       delta_q_membership_by_convexity)
from .simplex import LPError
from .smooth import SmoothSpline, build_smooth_spline, spline_distance
from .splines import IdealSpline, abs_power, build_ideal_spline, step_offset

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_NUMERICAL = 2
EXIT_USAGE = 64

OUT_ROOT_ENV = "COTRIG_OUT_ROOT"

_POS_INT = {"type": "integer", "minimum": 1}
_Q_INT = {"type": "integer", "minimum": 3}
_NUMBER = {"type": "number", "exclusiveMinimum": 0}
_FRACTIONABLE = {"type": ["number", "string"]}
_INT_LIST = {"type": "array", "items": _POS_INT, "minItems": 1}
_NUM_LIST = {"type": "array", "items": {"type": "number"}, "minItems": 1}
_STRING = {"type": "string", "minLength": 1}


def _schema(required, extra=None, **props):
    props.update({"out": _STRING, "seed": {"type": "integer", "minimum": 0},
                  "jobs": _POS_INT})
    doc = {"type": "object", "properties": props, "required": list(required),
           "additionalProperties": False}
    if extra:
        doc.update(extra)
    return doc


SCHEMAS = {
    ("build", "ideal"): _schema(["r", "b"], r=_POS_INT, b=_NUMBER),
    ("build", "smooth"): _schema(["r", "d", "lam"], r=_POS_INT, d=_NUMBER,
                                 lam=_FRACTIONABLE),
    ("build", "fnb"): _schema(["ledger", "n", "b"], ledger=_STRING,
                              n=_POS_INT, b=_FRACTIONABLE, d=_FRACTIONABLE),
    ("build", "partial-sum"): _schema(
        ["ledger", "K"], ledger=_STRING, K=_POS_INT, d=_FRACTIONABLE,
        eps_rule=_STRING, max_bits=_POS_INT),
    ("solve", None): _schema(
        ["target", "degree"],
        extra={"dependencies": {"q": ["y_points"], "y_points": ["q"]}},
        target=_STRING, degree=_POS_INT,
        domain={"type": "array", "items": {"type": "number"},
                "minItems": 2, "maxItems": 2},
        q=_Q_INT, y_points=_NUM_LIST, points_per_degree=_POS_INT),
    ("experiment", "bernstein"): _schema(["b", "n_list"], b=_NUMBER,
                                         n_list=_INT_LIST, trials=_POS_INT),
    ("experiment", "lemma-mod"): _schema(["b_list", "n_list"],
                                         b_list=_NUM_LIST, n_list=_INT_LIST),
    ("experiment", "lemma-3111"): _schema(["q", "b"], q=_Q_INT, b=_NUMBER,
                                          trials=_POS_INT),
    ("experiment", "lemma-22"): _schema(["q"], q=_Q_INT, knots=_POS_INT),
    ("experiment", "thm-12"): _schema(["q", "y_points", "n_list"], q=_Q_INT,
                                      y_points=_NUM_LIST, n_list=_INT_LIST),
    ("experiment", "thm-13"): _schema(["q", "y_points", "n_list"], q=_Q_INT,
                                      y_points=_NUM_LIST, n_list=_INT_LIST),
    ("experiment", "lemma-aux"): _schema(
        ["n_list", "b", "q", "p", "ledger"], n_list=_INT_LIST,
        b=_FRACTIONABLE, q=_Q_INT, p=_Q_INT, ledger=_STRING, d=_FRACTIONABLE),
    ("experiment", "calibrate"): _schema(["q", "p", "d"], q=_Q_INT, p=_Q_INT,
                                         d=_NUMBER),
}


class _Parser(argparse.ArgumentParser):
    """argparse parser whose usage errors exit with code 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _fraction(value) -> Fraction:
    """Exact rational from a JSON number or a string like "1/4"."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        return Fraction(value)
    return Fraction(value)


def _load_ledger(path: str) -> ConstantsLedger:
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    if "constants" not in doc and "extras" in doc:
        doc = doc["extras"].get("ledger", doc)
    return ConstantsLedger.from_dict(doc)


def _print(lines) -> None:
    for line in lines:
        print(line)


# ---------------------------------------------------------------------------
# build


def _ideal_summary(spline: IdealSpline, r: int, b: float) -> dict:
    gamma = step_offset(b)
    coeffs, defect = spline.residual_poly()
    ys = SignChangeSet((-b, 0.0))
    member = delta_q_membership_by_convexity(
        lambda x: spline.derivative_values(max(r - 1, 0), x), ys)
    return {
        "r": r, "b": b,
        "window": [spline.window.lo, spline.window.hi],
        "top_derivative_sup": spline.top_derivative_sup(),
        "expected_top_derivative_sup": 1.0 + gamma,
        "step_offset": gamma,
        "residual_poly_coeffs": list(coeffs),
        "residual_poly_defect": defect,
        "membership_q": r + 1,
        "membership": bool(member),
    }


def cmd_build_ideal(cfg: dict, out_dir: Path) -> int:
    r, b = cfg["r"], float(cfg["b"])
    spline = build_ideal_spline(r, b)
    summary = _ideal_summary(spline, r, b)
    artifact = {"kind": "ideal", "params": {"r": r, "b": b},
                "summary": summary, "function": spline.to_dict()}
    write_json(out_dir / "artifacts" / "ideal.json", artifact)
    _print([
        f"ideal spline r={r} b={b:.12g}",
        f"  sup|f^({r})| = {summary['top_derivative_sup']:.12g} "
        f"(expected {summary['expected_top_derivative_sup']:.12g})",
        f"  residual polynomial defect = {summary['residual_poly_defect']:.3e}",
        f"  class membership (q={r + 1}): {summary['membership']}",
    ])
    return EXIT_OK


def cmd_build_smooth(cfg: dict, out_dir: Path) -> int:
    r, d, lam = cfg["r"], float(cfg["d"]), float(_fraction(cfg["lam"]))
    table = build_mollifier_table()
    spline = build_smooth_spline(r, d, lam, table=table)
    ideal = build_ideal_spline(r, d)
    dist = spline_distance(ideal, spline, spline.window,
                           seeds=spline.seed_points())
    norms = {str(j): spline.sup_derivative(j)
             for j in range(min(r + 3, table.max_order + r))}
    summary = {
        "r": r, "d": d, "lam": lam,
        "window": [spline.window.lo, spline.window.hi],
        "zones": [list(z) for z in spline.zones()],
        "derivative_sups": norms,
        "distance_to_ideal": dist,
    }
    artifact = {"kind": "smooth",
                "params": {"r": r, "d": d, "lam": lam},
                "summary": summary, "function": spline.to_dict()}
    write_json(out_dir / "artifacts" / "smooth.json", artifact)
    _print([
        f"mollified spline r={r} d={d:.12g} lam={lam:.12g}",
        f"  distance to ideal = {dist:.6e}",
        f"  sup|f^({r})| = {norms[str(r)]:.12g}",
    ])
    return EXIT_OK


def cmd_build_fnb(cfg: dict, out_dir: Path) -> int:
    ledger = _load_ledger(cfg["ledger"])
    n = cfg["n"]
    b = _fraction(cfg["b"])
    d = _fraction(cfg["d"]) if "d" in cfg else \
        Fraction(ledger.provenance.get("gap", "0"))
    if d <= 0:
        raise ValueError("no gap in the ledger provenance; pass d")
    table = build_mollifier_table()
    summand = build_summand(ledger, n, b, d, table=table)
    top = ledger.r + ledger.m
    ys = canonical_sign_set(float(d))
    member, margin = delta_q_membership(
        lambda x: summand.derivative_values(ledger.q, x), ys,
        extra_points=summand.seed_points(), return_margin=True)
    summary = {
        "n": n, "b": str(b), "d": str(d),
        "width": str(summand.width), "width_float": float(summand.width),
        "amplitude_float": float(summand.amplitude),
        "sup_top_derivative": summand.sup_derivative(top),
        "sup_value": summand.sup_derivative(0),
        "membership": bool(member), "membership_margin": margin,
    }
    artifact = {"kind": "fnb",
                "params": {"n": n, "b": str(b), "d": str(d)},
                "ledger": ledger.to_dict(),
                "summary": summary, "function": summand.to_dict()}
    write_json(out_dir / "artifacts" / "fnb.json", artifact)
    _print([
        f"scaled summand n={n} b={b} (width {float(summand.width):.3e})",
        f"  sup|f^({top})| = {summary['sup_top_derivative']:.9g} (cap 1)",
        f"  class membership (q={ledger.q}): {summary['membership']}",
    ])
    return EXIT_OK


def cmd_build_partial_sum(cfg: dict, out_dir: Path) -> int:
    ledger = _load_ledger(cfg["ledger"])
    K = cfg["K"]
    d = _fraction(cfg["d"]) if "d" in cfg else \
        Fraction(ledger.provenance.get("gap", "0"))
    if d <= 0:
        raise ValueError("no gap in the ledger provenance; pass d")
    eps_rule = cfg.get("eps_rule", "log")
    kwargs = {"max_bits": cfg["max_bits"]} if "max_bits" in cfg else {}
    plan = plan_recursion(ledger, d, K + 1, eps_rule=eps_rule, **kwargs)
    table = build_mollifier_table()
    partial = build_partial_sum(plan, K, table=table)
    member, margin = partial.membership_margin()
    checks = plan.verify()
    summary = {
        "K": K, "d": str(d), "eps_rule": eps_rule,
        "tail_bound": str(partial.tail_bound),
        "tail_bound_float": float(partial.tail_bound),
        "plan_satisfied": plan.all_satisfied(),
        "sup_top_derivative": partial.sup_derivative(ledger.p),
        "membership": bool(member), "membership_margin": margin,
        "head_window_residual": partial.window_polynomial_residual(),
    }
    artifact = {"kind": "partial-sum",
                "params": {"K": K, "d": str(d), "eps_rule": eps_rule},
                "ledger": ledger.to_dict(),
                "plan_checks": checks,
                "summary": summary, "function": partial.to_dict()}
    write_json(out_dir / "artifacts" / "partial_sum.json", artifact)
    _print([
        f"partial sum K={K}, eps rule {eps_rule}, gap {d}",
        f"  plan degrees: {', '.join(str(n) for n in plan.n[1:K + 1])}",
        f"  tail bound = {summary['tail_bound_float']:.6e}",
        f"  sup|f^({ledger.p})| = {summary['sup_top_derivative']:.9g} (cap 1)",
        f"  class membership (q={ledger.q}): {summary['membership']}",
        f"  plan inequalities satisfied: {summary['plan_satisfied']}",
    ])
    return EXIT_OK


_BUILDERS = {
    "ideal": cmd_build_ideal,
    "smooth": cmd_build_smooth,
    "fnb": cmd_build_fnb,
    "partial-sum": cmd_build_partial_sum,
}


# ---------------------------------------------------------------------------
# solve


def _function_from_artifact(path: str):
    with open(path, encoding="utf-8") as fh:
        art = json.load(fh)
    kind = art.get("kind")
    params = art.get("params", {})
    if kind == "ideal":
        return build_ideal_spline(params["r"], float(params["b"])), None
    if kind == "smooth":
        return SmoothSpline.from_dict(art["function"]), None
    if kind == "fnb":
        ledger = ConstantsLedger.from_dict(art["ledger"])
        return build_summand(ledger, params["n"], Fraction(params["b"]),
                             Fraction(params["d"])), None
    if kind == "partial-sum":
        ledger = ConstantsLedger.from_dict(art["ledger"])
        plan = plan_recursion(ledger, Fraction(params["d"]),
                              params["K"] + 1,
                              eps_rule=params.get("eps_rule", "log"))
        return build_partial_sum(plan, params["K"]), None
    raise ValueError(f"artifact {path} has unknown kind {kind!r}")


def _resolve_target(spec: str):
    """Named builtin or artifact path -> (callable, description, domain)."""
    if spec == "cos":
        return np.cos, "cos", None
    match = re.fullmatch(r"F(\d+)", spec)
    if match:
        r = int(match.group(1))
        if r < 1:
            raise ValueError("F targets need a positive order")
        return (lambda x: abs_power(r, x)), spec, None
    match = re.fullmatch(r"ideal:(\d+):([0-9.eE+-]+)", spec)
    if match:
        r, b = int(match.group(1)), float(match.group(2))
        return build_ideal_spline(r, b), spec, None
    if Path(spec).is_file():
        fn, domain = _function_from_artifact(spec)
        return fn, spec, domain
    raise ValueError(
        f"unknown target {spec!r}; use cos, F<r>, ideal:<r>:<b>, or the "
        f"path of a build artifact")


def cmd_solve(cfg: dict, out_dir: Path) -> int:
    target, desc, _ = _resolve_target(cfg["target"])
    degree = cfg["degree"]
    grid = None
    if "points_per_degree" in cfg:
        grid = dataclasses.replace(SOLVER_GRID,
                                   points_per_degree=cfg["points_per_degree"])
    if "y_points" in cfg:
        ys = SignChangeSet(tuple(sorted(float(v) for v in cfg["y_points"])))
        result = best_co_q_monotone(target, degree, cfg["q"], ys,
                                    objective_grid=grid)
        mode = f"co-{cfg['q']}-monotone"
    else:
        domain = Interval(*cfg["domain"]) if "domain" in cfg else None
        result = best_approx(target, degree, domain=domain, grid=grid)
        mode = "unconstrained"
    solution = {
        "target": desc, "degree": degree, "mode": mode,
        "coefficients": result.approximant.to_dict(),
        "error": result.error,
        "post_check_error": result.post_check_error,
        "constraint_violation": result.constraint_violation,
        "alternation_count": result.alternation_count,
        "iterations": result.iterations,
        "duality_gap": result.duality_gap,
    }
    if result.extra_coefficients is not None:
        solution["extra_coefficients"] = list(result.extra_coefficients)
    write_json(out_dir / "artifacts" / "solution.json", solution)
    lines = [
        f"{mode} approximation of {desc} at degree {degree}",
        f"  grid error       = {result.error:.12e}",
        f"  post-check error = {result.post_check_error:.12e}",
        f"  alternations = {result.alternation_count}",
    ]
    if result.constraint_violation is not None:
        lines.insert(3,
                     f"  constraint violation = "
                     f"{result.constraint_violation:.3e}")
    _print(lines)
    return EXIT_OK


# ---------------------------------------------------------------------------
# experiment


def cmd_experiment(name: str, cfg: dict, out_dir: Path) -> int:
    params = {k: v for k, v in cfg.items() if k != "out"}
    if "ledger" in params:
        params["ledger"] = _load_ledger(params["ledger"])
    report = run_experiment(name, **params)
    write_report_files(report, out_dir)
    if name == "calibrate":
        write_json(out_dir / "artifacts" / "empirical_ledger.json",
                   report.extras["ledger"])
    _print(report.summary_lines())
    if not report.passed:
        for item in report.assertions:
            if not item.passed:
                print(f"FAILED assertion {item.name}: {item.detail}",
                      file=sys.stderr)
        return EXIT_ASSERTION
    return EXIT_OK


# ---------------------------------------------------------------------------
# plumbing


_FLAGS = {
    "r": ("--r", {"type": int, "help": "spline order"}),
    "b": ("--b", {"help": "window or cut parameter"}),
    "d": ("--d", {"help": "sign-change gap"}),
    "lam": ("--lam", {"help": "mollification width"}),
    "n": ("--n", {"type": int, "help": "summand degree"}),
    "K": ("--K", {"type": int, "help": "partial-sum level count"}),
    "q": ("--q", {"type": int, "help": "monotonicity order"}),
    "p": ("--p", {"type": int, "help": "smoothness order"}),
    "target": ("--target",
               {"help": "cos, F<r>, ideal:<r>:<b>, or artifact path"}),
    "degree": ("--degree", {"type": int, "help": "trigonometric degree"}),
    "domain": ("--domain", {"type": float, "nargs": 2,
                            "metavar": ("LO", "HI"),
                            "help": "interval endpoints"}),
    "ledger": ("--ledger", {"help": "constants ledger JSON path"}),
    "eps_rule": ("--eps-rule", {"help": "decay rule: log, linear, "
                                        "power:a, geometric:B, tower:B:e"}),
    "max_bits": ("--max-bits",
                 {"type": int, "help": "cap on planned integer sizes"}),
    "n_list": ("--n", {"type": int, "nargs": "+",
                       "help": "trigonometric degrees"}),
    "b_list": ("--b-list", {"type": float, "nargs": "+",
                            "help": "window parameters"}),
    "y_points": ("--Y", {"type": float, "nargs": "+",
                         "help": "sign-change points (even count)"}),
    "trials": ("--trials", {"type": int, "help": "random draws per cell"}),
    "knots": ("--knots", {"type": int, "help": "hinge knots per side"}),
    "points_per_degree": ("--points-per-degree",
                          {"type": int, "help": "objective grid density"}),
}


def _add_flags(parser, schema_key) -> None:
    parser.add_argument("--config", help="JSON config file; flags win")
    parser.add_argument("--out", help="output directory for this run")
    parser.add_argument("--seed", type=int, help="base random seed")
    parser.add_argument("--jobs", type=int, help="worker cap for grid cells")
    for key in SCHEMAS[schema_key]["properties"]:
        if key in ("out", "seed", "jobs"):
            continue
        flag, kwargs = _FLAGS[key]
        parser.add_argument(flag, dest=key, **kwargs)


def _build_parser() -> _Parser:
    parser = _Parser(prog="cotrig",
                     description="co-q-monotone approximation workbench")
    sub = parser.add_subparsers(dest="command", required=True)

    build = sub.add_parser("build", help="construct and serialize a function")
    build_sub = build.add_subparsers(dest="kind", required=True)
    for kind in _BUILDERS:
        bp = build_sub.add_parser(kind)
        _add_flags(bp, ("build", kind))
        bp.set_defaults(schema_key=("build", kind), run_name=f"build-{kind}")

    solve = sub.add_parser("solve", help="one minimax approximation")
    _add_flags(solve, ("solve", None))
    solve.set_defaults(schema_key=("solve", None), run_name="solve")

    exp = sub.add_parser("experiment", help="run a certification experiment")
    exp_sub = exp.add_subparsers(dest="name", required=True)
    for name in EXPERIMENT_NAMES:
        ep = exp_sub.add_parser(name)
        _add_flags(ep, ("experiment", name))
        ep.set_defaults(schema_key=("experiment", name),
                        run_name=f"experiment-{name}")
    return parser


def _coerce_flag(key: str, value):
    if key in ("b", "d", "lam") and isinstance(value, str):
        try:
            return float(value)
        except ValueError:
            return value
    return value


def _resolve_config(args) -> dict:
    cfg = {}
    if getattr(args, "config", None):
        with open(args.config, encoding="utf-8") as fh:
            loaded = json.load(fh)
        if not isinstance(loaded, dict):
            raise ValueError("config file must hold a JSON object")
        cfg.update(loaded)
    for key in SCHEMAS[args.schema_key]["properties"]:
        value = getattr(args, key, None)
        if value is not None:
            cfg[key] = _coerce_flag(key, value)
    return cfg


def _out_dir(args, cfg: dict) -> Path:
    if cfg.get("out"):
        return Path(cfg["out"])
    root = os.environ.get(OUT_ROOT_ENV, "runs")
    return Path(root) / args.run_name


def _dispatch(args, cfg: dict, out_dir: Path) -> int:
    if args.command == "build":
        return _BUILDERS[args.kind](cfg, out_dir)
    if args.command == "solve":
        return cmd_solve(cfg, out_dir)
    return cmd_experiment(args.name, cfg, out_dir)


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _resolve_config(args)
        jsonschema.validate(cfg, SCHEMAS[args.schema_key])
        out_dir = _out_dir(args, cfg)
        cfg["out"] = str(out_dir)
        out_dir.mkdir(parents=True, exist_ok=True)
        echo = {"command": args.command}
        if args.command == "build":
            echo["kind"] = args.kind
        elif args.command == "experiment":
            echo["name"] = args.name
        echo.update(cfg)
        write_json(out_dir / "config-echo.json", echo)
        return _dispatch(args, cfg, out_dir)
    except (EpsGrowthError, RealizabilityError, LPError,
            FloatingPointError, OverflowError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except jsonschema.ValidationError as exc:
        print(f"invalid configuration: {exc.message}", file=sys.stderr)
        return EXIT_USAGE
    except (ValueError, OSError, json.JSONDecodeError, KeyError) as exc:
        print(f"invalid configuration: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
