"""``hypercon-lab``: run experiment descriptors and write CSV/JSON reports.

Exit codes: 0 success, 2 invalid descriptor, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import copy
import csv
import io
import json
import logging
import math
import os
import sys
import time
from pathlib import Path

import jsonschema
import numpy as np

from . import __version__, kernels
from .adm_discrete import (DiscreteSystem, control_admissibility, lower_bound_constant,
                           obs_gramian, resolvent_sup, weiss_ratio)
from .errors import HyperconLabError
from .generators import CLASSES, random_observation, random_operator
from .hankel import HankelSymbol, rkt_experiment
from .hypercon import DEFAULT_R_GRID, gamma_threshold, gamma_verdict, is_n_hypercontraction
from .operator_core import op_norm
from .semigroup import (ContinuousSystem, bridge, cont_obs_gramian,
                        continuous_lower_bound_constant, resolvent_sup_halfplane,
                        two_hypercontractive_tests)

log = logging.getLogger("hypercon_lab")

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3

KINDS = ("hypercheck", "gamma-threshold", "adm-discrete", "resolvent-disc", "rkt",
         "semigroup-equiv", "adm-continuous", "bridge", "weiss-ratio")

_MATRIX = {
    "type": "object",
    "required": ["rows", "cols", "data"],
    "properties": {
        "rows": {"type": "integer", "minimum": 1},
        "cols": {"type": "integer", "minimum": 1},
        "data": {"type": "array",
                 "items": {"type": "array", "items": {"type": "number"},
                           "minItems": 2, "maxItems": 2}},
    },
    "additionalProperties": False,
}

_SOURCE = {
    "oneOf": [
        {"type": "object", "required": ["type", "matrix"],
         "properties": {"type": {"const": "inline-matrix"}, "matrix": _MATRIX},
         "additionalProperties": False},
        {"type": "object", "required": ["type", "seed", "dim", "class"],
         "properties": {"type": {"const": "random"},
                        "seed": {"type": "integer", "minimum": 0},
                        "dim": {"type": "integer", "minimum": 1, "maximum": 512},
                        "class": {"enum": list(CLASSES)}},
         "additionalProperties": False},
        {"type": "object", "required": ["type", "path"],
         "properties": {"type": {"const": "file"}, "path": {"type": "string"}},
         "additionalProperties": False},
    ]
}

_NUM_LIST = {"type": "array", "items": {"type": "number"}, "minItems": 1}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["kind", "operator_source", "output_path"],
    "properties": {
        "kind": {"enum": list(KINDS)},
        "operator_source": _SOURCE,
        "observation": _SOURCE,
        "control": _SOURCE,
        "output_path": {"type": "string", "minLength": 1},
        "parameters": {
            "type": "object",
            "properties": {
                "beta": {"type": "number", "exclusiveMinimum": -1},
                "gamma": {"type": "number", "minimum": 1},
                "alpha": {"type": "number", "exclusiveMinimum": -1},
                "n": {"type": "integer", "minimum": 1, "maximum": 64},
                "gamma_max": {"type": "number", "minimum": 1},
                "bracket_tol": {"type": "number", "exclusiveMinimum": 0},
                "r_grid": _NUM_LIST,
                "r_list": _NUM_LIST,
                "truncations": {"type": "array", "minItems": 1,
                                "items": {"type": "integer", "minimum": 1, "maximum": 512}},
                "tol": {"type": "number", "exclusiveMinimum": 0},
                "observation_rows": {"type": "integer", "minimum": 1},
                "t_grid": _NUM_LIST,
                "waive_hypercontractivity": {"type": "boolean"},
            },
            "additionalProperties": False,
        },
    },
    "additionalProperties": False,
}

# parameter columns per kind, in schema order, followed by result columns
COLUMNS = {
    "hypercheck": (["order", "r"], ["min_eigenvalue", "passes"]),
    "gamma-threshold": (["gamma_max", "bracket_tol"],
                        ["gamma_star", "bracket_width", "capped", "iterations"]),
    "adm-discrete": (["beta"], ["constant", "terms_used", "tail_bound", "converged",
                                "control_constant"]),
    "resolvent-disc": (["beta"], ["sup_value", "argmax_re", "argmax_im",
                                  "lower_bound_constant"]),
    "rkt": (["alpha", "beta", "truncation"],
            ["kernel_sup", "truncated_norm", "ratio", "grid_size"]),
    "semigroup-equiv": ([], ["semigroup_2hc", "convexity", "quadratic_form", "cogenerator_2hc",
                             "margin_semigroup", "margin_convexity", "margin_form",
                             "margin_cogenerator", "borderline", "agree"]),
    "adm-continuous": (["beta"], ["constant", "quadrature_error_estimate", "tail_bound",
                                  "resolvent_sup", "ratio", "lower_bound_holds"]),
    "bridge": (["beta"], ["max_deviation", "mobius_deviation", "grid_size",
                          "cogenerator_norm"]),
    "weiss-ratio": (["beta", "r"], ["adm_constant", "resolvent_sup", "ratio",
                                    "lower_bound_holds"]),
}

DEFAULTS = {
    "hypercheck": {"r_grid": list(DEFAULT_R_GRID)},
    "gamma-threshold": {"gamma_max": 8.0, "bracket_tol": 1e-6},
    "adm-discrete": {"beta": 1.0, "tol": 1e-12},
    "resolvent-disc": {"beta": 1.0},
    "rkt": {"alpha": 0.0, "beta": 1.0, "truncations": [16, 32, 64]},
    "semigroup-equiv": {},
    "adm-continuous": {"beta": 1.0, "tol": 1e-12},
    "bridge": {"beta": 1.0},
    "weiss-ratio": {"beta": 1.0, "r_list": [0.9, 0.99, 0.999]},
}


class DescriptorError(Exception):
    pass


# ---------------------------------------------------------------------------
# matrices


def matrix_to_json(M):
    M = np.atleast_2d(np.asarray(M, dtype=complex))
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]),
            "data": [[float(z.real), float(z.imag)] for z in M.ravel()]}


def matrix_from_json(obj):
    try:
        jsonschema.validate(obj, _MATRIX)
    except jsonschema.ValidationError as exc:
        raise DescriptorError(f"matrix: {exc.message}") from exc
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if len(data) != rows * cols:
        raise DescriptorError(f"matrix has {len(data)} entries, expected {rows}x{cols}")
    arr = np.array([complex(re, im) for re, im in data]).reshape(rows, cols)
    if not np.all(np.isfinite(arr)):
        raise DescriptorError("matrix entries must be finite")
    return arr


def _load_source(src, base):
    if src["type"] == "inline-matrix":
        return matrix_from_json(src["matrix"])
    if src["type"] == "file":
        p = Path(src["path"])
        p = p if p.is_absolute() else base / p
        if not p.exists():
            raise DescriptorError(f"matrix file not found: {p}")
        try:
            obj = json.loads(p.read_text())
        except json.JSONDecodeError as exc:
            raise DescriptorError(f"matrix file {p} is not valid JSON: {exc}") from exc
        return matrix_from_json(obj)
    return random_operator(src["class"], src["seed"], src["dim"])


def validate_descriptor(desc, base=Path(".")):
    """Schema check plus the cross-field rules the schema cannot express."""
    try:
        jsonschema.validate(desc, SCHEMA)
    except jsonschema.ValidationError as exc:
        raise DescriptorError(f"schema: {exc.message} at {list(exc.absolute_path)}") from exc
    params = desc.get("parameters", {})
    kind = desc["kind"]
    if kind in ("weiss-ratio", "bridge") and params.get("beta", 1.0) <= 0:
        raise DescriptorError(f"{kind} needs beta > 0")
    if kind == "hypercheck" and ("n" in params) == ("gamma" in params):
        raise DescriptorError("hypercheck needs exactly one of n or gamma")
    if any(not 0 < r < 1 for r in params.get("r_grid", [])):
        raise DescriptorError("r_grid values must lie in (0, 1)")
    if any(not 0 < r <= 1 for r in params.get("r_list", [])):
        raise DescriptorError("r_list values must lie in (0, 1]")
    for role in ("operator_source", "observation", "control"):
        src = desc.get(role)
        if src and src["type"] != "random":
            M = _load_source(src, base)
            if role == "operator_source" and kind != "rkt" and M.shape[0] != M.shape[1]:
                raise DescriptorError("operator matrix must be square")


def with_defaults(desc):
    out = copy.deepcopy(desc)
    params = dict(DEFAULTS[desc["kind"]])
    params.update(out.get("parameters", {}))
    out["parameters"] = params
    return out


# ---------------------------------------------------------------------------
# experiments: each returns (rows, summary)


def _observation(desc, dim, base):
    p = desc["parameters"]
    if "observation" in desc:
        src = desc["observation"]
        if src["type"] == "random":
            return random_observation(src["seed"], p.get("observation_rows", 1), dim)
        F = _load_source(src, base)
    else:
        src = desc["operator_source"]
        if src["type"] == "random":
            return random_observation(src["seed"], p.get("observation_rows", 1), dim)
        F = np.ones((p.get("observation_rows", 1), dim))
    if F.shape[1] != dim:
        raise DescriptorError(f"observation has {F.shape[1]} columns, state dim is {dim}")
    return F


def _control(desc, dim, base):
    if "control" not in desc:
        return None
    src = desc["control"]
    if src["type"] == "random":
        return random_observation(src["seed"], desc["parameters"].get("observation_rows", 1),
                                  dim).conj().T
    return _load_source(src, base)


def _run_hypercheck(T, desc, base):
    p = desc["parameters"]
    if "n" in p:
        res = is_n_hypercontraction(T, p["n"], p.get("tol"))
        rows = [{"order": m, "r": 1.0, "min_eigenvalue": rep.min_eigenvalue,
                 "passes": rep.is_psd} for m, rep in enumerate(res.reports, 1)]
        return rows, {"passes": res.passes}
    v = gamma_verdict(T, p["gamma"], p["r_grid"], p.get("tol"))
    rows = [{"order": p["gamma"], "r": r, "min_eigenvalue": rep.min_eigenvalue,
             "passes": rep.is_psd} for r, rep in zip(v.r_grid, v.reports)]
    return rows, {"passes": v.passes, "worst_r": v.worst_r}


def _run_gamma_threshold(T, desc, base):
    p = desc["parameters"]
    g = gamma_threshold(T, p["gamma_max"], p["bracket_tol"])
    return [{"gamma_max": p["gamma_max"], "bracket_tol": p["bracket_tol"],
             "gamma_star": g.gamma_star, "bracket_width": g.bracket_width,
             "capped": g.capped, "iterations": g.iterations}], {}


def _run_adm_discrete(T, desc, base):
    p = desc["parameters"]
    E = _control(desc, T.shape[0], base)
    sys_ = DiscreteSystem(T, _observation(desc, T.shape[0], base), E)
    _, rep = obs_gramian(sys_, p["beta"], p["tol"])
    ctrl = control_admissibility(sys_, p["beta"], p["tol"]).constant if E is not None else 0.0
    return [{"beta": p["beta"], "constant": rep.constant, "terms_used": rep.terms_used,
             "tail_bound": rep.tail_bound, "converged": rep.converged,
             "control_constant": ctrl}], {"has_control": E is not None}


def _run_resolvent_disc(T, desc, base):
    p = desc["parameters"]
    sys_ = DiscreteSystem(T, _observation(desc, T.shape[0], base))
    scan = resolvent_sup(sys_, p["beta"])
    return [{"beta": p["beta"], "sup_value": scan.sup_value,
             "argmax_re": scan.argmax_z.real, "argmax_im": scan.argmax_z.imag,
             "lower_bound_constant": lower_bound_constant(p["beta"])}], \
        {"grid": scan.grid_description}


def _symbol(desc, base):
    src = desc["operator_source"]
    if src["type"] == "random":
        rng = np.random.default_rng(src["seed"])
        c = rng.standard_normal(src["dim"]) + 1j * rng.standard_normal(src["dim"])
        return HankelSymbol(c)
    M = _load_source(src, base)
    return HankelSymbol(M.reshape(M.shape[0], 1, M.shape[1]))


def _run_rkt(_T, desc, base):
    p = desc["parameters"]
    C = _symbol(desc, base)
    rows = []
    for M in p["truncations"]:
        r = rkt_experiment(C, p["alpha"], p["beta"], M=M)
        rows.append({"alpha": p["alpha"], "beta": p["beta"], "truncation": M,
                     "kernel_sup": r.kernel_sup, "truncated_norm": r.truncated_norm,
                     "ratio": r.ratio, "grid_size": r.grid_size})
    ratios = [r["ratio"] for r in rows]
    return rows, {"max_relative_drift": float(max(ratios) / min(ratios) - 1)
                  if min(ratios) > 0 else 0.0}


def _run_semigroup_equiv(A, desc, base):
    p = desc["parameters"]
    kw = {"t_grid": p["t_grid"]} if "t_grid" in p else {}
    r = two_hypercontractive_tests(A, tol=p.get("tol"), **kw)
    names = ["semigroup_2hc", "convexity", "quadratic_form", "cogenerator_2hc"]
    row = dict(zip(names, r.verdicts))
    row.update(zip(["margin_semigroup", "margin_convexity", "margin_form",
                    "margin_cogenerator"], r.margins))
    row.update(borderline=r.borderline, agree=r.agree)
    return [row], {"form_identity_defect": r.form_identity_defect,
                   "dissipation": r.dissipation}


def _run_adm_continuous(A, desc, base):
    p = desc["parameters"]
    sys_ = ContinuousSystem(A, _observation(desc, A.shape[0], base))
    _, rep = cont_obs_gramian(sys_, p["beta"], p["tol"])
    res = resolvent_sup_halfplane(sys_, p["beta"]).sup_value
    ratio = 1.0 if rep.constant == 0 and res == 0 else rep.constant / res
    holds = res <= continuous_lower_bound_constant(p["beta"]) * rep.constant * (1 + 1e-9)
    return [{"beta": p["beta"], "constant": rep.constant,
             "quadrature_error_estimate": rep.quadrature_error_estimate,
             "tail_bound": rep.tail_bound, "resolvent_sup": res, "ratio": ratio,
             "lower_bound_holds": bool(holds)}], {"t_max": rep.t_max, "panels": rep.panels}


def _run_bridge(A, desc, base):
    p = desc["parameters"]
    sys_ = ContinuousSystem(A, _observation(desc, A.shape[0], base))
    r = bridge(sys_, p["beta"])
    return [{"beta": p["beta"], "max_deviation": r.max_deviation,
             "mobius_deviation": r.mobius_deviation, "grid_size": r.grid_size,
             "cogenerator_norm": op_norm(r.pair.T_cog)}], \
        {"max_deviation": r.max_deviation, "mobius_deviation": r.mobius_deviation}


def _run_weiss_ratio(T, desc, base):
    p = desc["parameters"]
    sys_ = DiscreteSystem(T, _observation(desc, T.shape[0], base))
    rows_ = weiss_ratio(sys_, p["beta"], p["r_list"],
                        waive_hypercontractivity=p.get("waive_hypercontractivity", False))
    c = lower_bound_constant(p["beta"])
    rows = [{"beta": p["beta"], "r": w.r, "adm_constant": w.adm_constant,
             "resolvent_sup": w.resolvent_sup, "ratio": w.ratio,
             "lower_bound_holds": bool(w.resolvent_sup <= c * w.adm_constant * (1 + 1e-9))}
            for w in rows_]
    ratios = [r["ratio"] for r in rows]
    return rows, {"ratio_spread": float(max(ratios) / min(ratios)) if min(ratios) > 0 else 0.0}


RUNNERS = {
    "hypercheck": _run_hypercheck, "gamma-threshold": _run_gamma_threshold,
    "adm-discrete": _run_adm_discrete, "resolvent-disc": _run_resolvent_disc,
    "rkt": _run_rkt, "semigroup-equiv": _run_semigroup_equiv,
    "adm-continuous": _run_adm_continuous, "bridge": _run_bridge,
    "weiss-ratio": _run_weiss_ratio,
}


# ---------------------------------------------------------------------------
# output


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if not math.isfinite(v):
        raise ArithmeticError(f"non-finite value {v} in report")
    return "%.17g" % v


def render_csv(kind, rows):
    pcols, rcols = COLUMNS[kind]
    header = ["experiment_id", "kind"] + pcols + rcols
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i, row in enumerate(rows):
        w.writerow([f"{kind}-{i:04d}", kind] + [_fmt(row[c]) for c in pcols + rcols])
    return buf.getvalue()


def _output_paths(output_path):
    p = Path(output_path)
    csv_path = p if p.suffix == ".csv" else p.with_name(p.name + ".csv")
    return csv_path, csv_path.with_suffix(".json")


def run_descriptor(desc, base=Path("."), output_path=None):
    """Validate, run and write reports.  Returns ``(csv_path, json_path)``."""
    validate_descriptor(desc, base)
    full = with_defaults(desc)
    kind = full["kind"]
    T = None if kind == "rkt" else _load_source(full["operator_source"], base)
    t0 = time.perf_counter()
    rows, summary = RUNNERS[kind](T, full, base)
    wall = time.perf_counter() - t0
    text = render_csv(kind, rows)
    csv_path, json_path = _output_paths(output_path or full["output_path"])
    if not csv_path.is_absolute():
        csv_path, json_path = Path.cwd() / csv_path, Path.cwd() / json_path
    csv_path.parent.mkdir(parents=True, exist_ok=True)
    csv_path.write_text(text)
    sidecar = {"descriptor": full, "library_version": __version__,
               "kernel_backend": kernels.BACKEND, "rows": len(rows),
               "summary": _jsonable(summary), "wall_time_s": wall,
               "csv": csv_path.name}
    json_path.write_text(json.dumps(sidecar, indent=2, sort_keys=True) + "\n")
    return csv_path, json_path


def _jsonable(x):
    if isinstance(x, dict):
        return {k: _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (np.floating, float)):
        return float(x)
    if isinstance(x, complex):
        return [x.real, x.imag]
    return x


DEMOS = {
    "hypercheck": {"operator_source": {"type": "inline-matrix",
                                       "matrix": matrix_to_json(np.eye(2))},
                   "parameters": {"n": 3}},
    "gamma-threshold": {"operator_source": {"type": "random", "seed": 7, "dim": 4,
                                            "class": "strict-contraction"},
                        "parameters": {"gamma_max": 8.0, "bracket_tol": 1e-4}},
    "adm-discrete": {"operator_source": {"type": "inline-matrix",
                                         "matrix": matrix_to_json(np.diag([0.95, 0.5]))},
                     "observation": {"type": "inline-matrix",
                                     "matrix": matrix_to_json([[1, 1]])},
                     "parameters": {"beta": 1.0}},
    "resolvent-disc": {"operator_source": {"type": "random", "seed": 3, "dim": 4,
                                           "class": "normal"},
                       "parameters": {"beta": 1.0}},
    "rkt": {"operator_source": {"type": "random", "seed": 11, "dim": 7,
                                "class": "normal"},
            "parameters": {"alpha": 0.0, "beta": 1.0, "truncations": [16, 32, 64]}},
    "semigroup-equiv": {"operator_source": {"type": "random", "seed": 5, "dim": 6,
                                            "class": "dissipative"}},
    "adm-continuous": {"operator_source": {"type": "inline-matrix",
                                           "matrix": matrix_to_json(-np.diag([1.0, 10.0]))},
                       "observation": {"type": "inline-matrix",
                                       "matrix": matrix_to_json([[1, 1]])},
                       "parameters": {"beta": 1.0}},
    "bridge": {"operator_source": {"type": "inline-matrix", "matrix": matrix_to_json([[-1]])},
               "observation": {"type": "inline-matrix", "matrix": matrix_to_json([[1]])},
               "parameters": {"beta": 1.0}},
    "weiss-ratio": {"operator_source": {"type": "random", "seed": 42, "dim": 4,
                                        "class": "normal"},
                    "parameters": {"beta": 1.0}},
}


def demo_descriptor(kind):
    d = {"kind": kind}
    d.update(copy.deepcopy(DEMOS[kind]))
    d["output_path"] = f"out/{kind}"
    return d


# ---------------------------------------------------------------------------


def _read_descriptor(path):
    p = Path(path)
    if not p.exists():
        raise DescriptorError(f"descriptor not found: {p}")
    try:
        return json.loads(p.read_text()), p.resolve().parent
    except json.JSONDecodeError as exc:
        raise DescriptorError(f"descriptor is not valid JSON: {exc}") from exc


def main(argv=None):
    ap = argparse.ArgumentParser(prog="hypercon-lab", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="cmd", required=True)
    r = sub.add_parser("run", help="run a descriptor and write CSV + JSON")
    r.add_argument("descriptor")
    r.add_argument("-o", "--output", help="override output_path")
    r.add_argument("--threads", type=int, help="sets HYPERCONLAB_THREADS")
    v = sub.add_parser("validate", help="check a descriptor without running it")
    v.add_argument("descriptor")
    d = sub.add_parser("demo", help="print a canned descriptor")
    d.add_argument("kind", choices=KINDS)
    d.add_argument("-o", "--output", help="write the descriptor to this file")
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")

    if args.cmd == "demo":
        text = json.dumps(demo_descriptor(args.kind), indent=2) + "\n"
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK

    try:
        desc, base = _read_descriptor(args.descriptor)
        if args.cmd == "validate":
            validate_descriptor(desc, base)
            print("ok")
            return EXIT_OK
    except DescriptorError as exc:
        print(f"invalid descriptor: {exc}", file=sys.stderr)
        return EXIT_INVALID

    if args.threads:
        os.environ["HYPERCONLAB_THREADS"] = str(args.threads)
    try:
        csv_path, json_path = run_descriptor(desc, base, args.output)
    except DescriptorError as exc:
        print(f"invalid descriptor: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (HyperconLabError, ArithmeticError, ValueError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"wrote {csv_path} and {json_path}")
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
