"""Command-line entry point: experiment commands, config files, CSV/JSON
emission, and the certificate runner.

Exit codes: 0 success, 1 certificate failure, 2 configuration error,
3 solver error, 4 unreadable or malformed input file.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import json
import os
import sys

import numpy as np

from .harness import (
    CmeConfig,
    build_cme_problem,
    build_maxcut_problem,
    gen_cme_instance,
    gen_er_graph,
    laplacian,
    load_gset,
    metrics_cme,
    metrics_maxcut,
)
from .model import LinearMap, PrimalPoint, ProblemSpec, SmoothTerm
from .oracles import (
    BoxIndicator,
    DiagOnesIndicator,
    L1BallIndicator,
    NuclearBallIndicator,
    NuclearNormReg,
    OracleError,
    PolytopeIndicator,
    PolytopeState,
    ProductComponent,
    SimplexIndicator,
    SpectrahedronIndicator,
    ZeroReg,
    hypercube_lmo,
    scaled_simplex_lmo,
)
from .solver import SolverConfig, SolverError, run
from .certify import run_suites

EXIT_OK = 0
EXIT_CERT = 1
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4

CSV_HEADER = "trial,t,objective,feasibility,al_value,eta_used,elapsed_seconds,variant"

# Practical penalty values by variant and block count for the full-size
# covariance preset; the desk default is rho = 1.
CME_RHO_TABLE = {
    "last": {5: 25.0, 10: 5.0, 20: 1.0},
    "mean": {5: 5.0, 10: 5.0, 20: 1.0},
}

PRESETS = {
    # rho None = look it up per variant in CME_RHO_TABLE
    "paper-cme": {
        "d": 400, "r": 5, "iters": 2000, "trials": 20, "mu": 0.2, "rho": None,
        "step_policy": "line_search", "svd_tol": 0.01, "variant": "both",
    },
    "paper-maxcut": {
        "iters": 2000, "mu": 0.2, "eta": 0.2, "rho": 1.0,
        "step_policy": "fixed", "svd_tol": 0.01, "variant": "both",
    },
}

CME_DEFAULTS = {
    "d": 40, "r": 3, "noise_sigma": 0.6, "entry_threshold": 0.9,
    "iters": 200, "trials": 1, "mu": 0.2, "rho": 1.0, "eta": None,
    "step_policy": "line_search", "variant": "both", "rank": None,
    "svd_tol": 1e-9, "seed": 0, "jobs": 1, "outdir": "out",
    "preset": None,
}

MAXCUT_DEFAULTS = {
    "graph": None, "random_n": 30, "random_p": 0.2, "iters": 200,
    "trials": 1, "mu": 0.2, "rho": 1.0, "eta": 0.2,
    "step_policy": "fixed", "variant": "both", "rank": 5,
    "svd_tol": 1e-9, "seed": 0, "jobs": 1, "outdir": "out",
    "preset": None,
}

GENERIC_DEFAULTS = {
    "iters": None, "rho": None, "mu": None, "eta": None,
    "step_policy": None, "variant": None, "seed": 0, "outdir": "out",
}


class ConfigError(ValueError):
    pass


class GraphFileError(RuntimeError):
    pass


def _fmt(v):
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return f"{float(v):.17g}"


def _merge_params(defaults, preset_name, config_path, cli_values):
    """defaults < preset < config file < explicit flags; unknown config-file
    keys are rejected."""
    params = dict(defaults)
    if preset_name is not None:
        if preset_name not in PRESETS:
            raise ConfigError(f"unknown preset {preset_name!r}")
        for k, v in PRESETS[preset_name].items():
            if k in params:
                params[k] = v
    if config_path is not None:
        try:
            with open(config_path, "r", encoding="utf-8") as fh:
                doc = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read config file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(
                f"{config_path}: invalid JSON at line {exc.lineno} column {exc.colno}"
            ) from exc
        if not isinstance(doc, dict):
            raise ConfigError(f"{config_path}: expected a JSON object")
        unknown = sorted(set(doc) - set(params))
        if unknown:
            raise ConfigError(f"{config_path}: unknown keys {unknown}")
        params.update(doc)
    for k, v in cli_values.items():
        if v is not None:
            params[k] = v
    return params


def _write_csv(path, rows):
    with open(path, "w", encoding="ascii") as fh:
        fh.write(CSV_HEADER + "\n")
        for trial, t, obj, feas, al, eta, elapsed, variant in rows:
            fh.write(
                f"{trial},{t},{_fmt(obj)},{_fmt(feas)},{_fmt(al)},"
                f"{_fmt(eta)},{_fmt(elapsed)},{variant}\n"
            )


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=1, sort_keys=True)
        fh.write("\n")


PLOT_STUB = """\
# Plotting stub (generated): reads the trace CSV next to this file and plots
# the logged quantities per variant. Requires matplotlib; the solver package
# itself has no plotting dependency.
import csv
from collections import defaultdict

import matplotlib.pyplot as plt

curves = defaultdict(lambda: defaultdict(list))
with open("trace.csv") as fh:
    for row in csv.DictReader(fh):
        key = (row["variant"], int(row["trial"]))
        curves[key]["t"].append(int(row["t"]))
        curves[key]["objective"].append(float(row["objective"]))
        curves[key]["feasibility"].append(float(row["feasibility"]))

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for (variant, trial), data in sorted(curves.items()):
    axes[0].plot(data["t"], data["objective"], label=f"{variant}/{trial}")
    axes[1].semilogy(data["t"], data["feasibility"], label=f"{variant}/{trial}")
axes[0].set_xlabel("iteration"); axes[0].set_ylabel("objective")
axes[1].set_xlabel("iteration"); axes[1].set_ylabel("feasibility")
axes[0].legend(fontsize=6)
fig.tight_layout()
fig.savefig("trace.png", dpi=150)
"""


def _emit_outputs(outdir, rows, summary):
    os.makedirs(outdir, exist_ok=True)
    _write_csv(os.path.join(outdir, "trace.csv"), rows)
    _write_json(os.path.join(outdir, "summary.json"), summary)
    with open(os.path.join(outdir, "plot_stub.py"), "w", encoding="ascii") as fh:
        fh.write(PLOT_STUB)


def _rows_from_log(log, trial, variants):
    rows = []
    for variant in variants:
        for rec in log.records:
            if variant == "last":
                rows.append((trial, rec.t, rec.objective, rec.feasibility,
                             rec.al_value, rec.eta_used, rec.elapsed, "last"))
            else:
                rows.append((trial, rec.t, rec.mean_objective,
                             rec.mean_feasibility, rec.mean_al_value,
                             rec.eta_used, rec.elapsed, "mean"))
    return rows


def _mean_curves(rows, iters):
    """Across-trial arithmetic-mean curves per variant, from the row tuples."""
    groups = {}
    for trial, t, obj, feas, al, _eta, _el, variant in rows:
        groups.setdefault(variant, {}).setdefault(t, []).append((obj, feas, al))
    curves = {}
    for variant, by_t in groups.items():
        ts = sorted(by_t)
        curves[variant] = {
            "t": ts,
            "objective": [float(np.mean([v[0] for v in by_t[t]])) for t in ts],
            "feasibility": [float(np.mean([v[1] for v in by_t[t]])) for t in ts],
            "al_value": [float(np.mean([v[2] for v in by_t[t]])) for t in ts],
        }
    return curves


# ---------------------------------------------------------------------------
# covariance-estimation command


def _cme_plan(params):
    """(variant, rho) pairs to run; rho None means look the per-variant value
    up in the tabulated penalties (the full-size preset behavior)."""
    variants = ["mean", "last"] if params["variant"] == "both" else [params["variant"]]
    if params["rho"] is None:
        plan = []
        r = params["r"]
        for v in variants:
            table = CME_RHO_TABLE[v]
            if r not in table:
                raise ConfigError(
                    f"no tabulated rho for r={r}; pass --rho explicitly"
                )
            plan.append((v, table[r]))
        return plan
    return [(v, params["rho"]) for v in variants]


def _cme_trial(args):
    params, plan, trial = args
    cfg = CmeConfig(
        d=params["d"], r=params["r"], noise_sigma=params["noise_sigma"],
        entry_threshold=params["entry_threshold"],
        seed=params["seed"] + trial,
    )
    Sigma, SigmaHat, tau, s = gen_cme_instance(cfg)
    k_hat = params["rank"] if params["rank"] is not None else params["r"]
    rows, finals = [], []
    # group variants sharing a rho into one run
    by_rho = {}
    for variant, rho in plan:
        by_rho.setdefault(rho, []).append(variant)
    for rho, variants in sorted(by_rho.items()):
        spec, q0, w0 = build_cme_problem(SigmaHat, tau, s, k_hat,
                                         svd_tol=params["svd_tol"])
        config = SolverConfig(
            rho=rho, mu=params["mu"], iters=params["iters"],
            step_policy=params["step_policy"], eta=params["eta"],
            variant="both" if len(variants) > 1 else variants[0],
            seed=params["seed"] + trial,
            trace_mean="mean" in variants,
        )
        log = run(spec, q0, w0, config)
        rows.extend(_rows_from_log(log, trial, variants))
        for variant in variants:
            point = log.mean_point if variant == "mean" else log.last_point
            m = metrics_cme(point.x.reshape(params["d"], params["d"]),
                            Sigma, SigmaHat, s)
            finals.append((variant, {
                "rho": rho,
                "normalized_objective": m.normalized_objective,
                "feasibility_distance": m.feasibility_distance,
                "recovery_error": m.recovery_error,
                "wall_time": log.records[-1].elapsed,
            }))
    return trial, rows, finals


def cmd_cme(params):
    plan = _cme_plan(params)
    tasks = [(params, plan, trial) for trial in range(params["trials"])]
    results = _map_trials(_cme_trial, tasks, params["jobs"])

    rows, finals = [], {}
    for trial, trial_rows, trial_finals in results:
        rows.extend(trial_rows)
        for variant, m in trial_finals:
            finals.setdefault(variant, []).append(m)
    summary = {
        "command": "cme",
        "config": {k: v for k, v in params.items() if not k.startswith("_")},
        "plan": [{"variant": v, "rho": r} for v, r in plan],
        "curves": _mean_curves(rows, params["iters"]),
        "final_metrics": {
            variant: {
                "per_trial": ms,
                "mean": {k: float(np.mean([m[k] for m in ms]))
                         for k in ms[0] if k != "rho"},
            }
            for variant, ms in finals.items()
        },
    }
    _emit_outputs(params["outdir"], rows, summary)
    return EXIT_OK


# ---------------------------------------------------------------------------
# max-cut command


def _resolve_graph_path(path):
    if os.path.exists(path):
        return path
    data_dir = os.environ.get("WPMM_DATA_DIR")
    if data_dir:
        candidate = os.path.join(data_dir, path)
        if os.path.exists(candidate):
            return candidate
    raise FileNotFoundError(f"graph file {path!r} not found "
                            "(also searched WPMM_DATA_DIR)")


def _maxcut_trial(args):
    params, graph, trial = args
    if graph is None:
        graph = gen_er_graph(params["random_n"], params["random_p"],
                             seed=params["seed"] + trial)
    C = laplacian(graph)
    d = graph.n
    spec, q0, w0 = build_maxcut_problem(C, params["rank"],
                                        svd_tol=params["svd_tol"])
    variants = ["mean", "last"] if params["variant"] == "both" else [params["variant"]]
    config = SolverConfig(
        rho=params["rho"], mu=params["mu"], iters=params["iters"],
        step_policy=params["step_policy"], eta=params["eta"],
        variant=params["variant"], seed=params["seed"] + trial,
        trace_mean="mean" in variants,
    )
    log = run(spec, q0, w0, config)
    rows = _rows_from_log(log, trial, variants)
    finals = []
    for variant in variants:
        point = log.mean_point if variant == "mean" else log.last_point
        m = metrics_maxcut(point.x.reshape(d, d), C)
        finals.append((variant, {
            "objective": m.objective,
            "diag_feasibility": m.diag_feasibility,
            "wall_time": log.records[-1].elapsed,
        }))
    return trial, rows, finals


def cmd_maxcut(params):
    graph = None
    if params["graph"] is not None:
        try:
            path = _resolve_graph_path(params["graph"])
            graph = load_gset(path)
        except (OSError, ValueError) as exc:
            raise GraphFileError(str(exc)) from exc
    tasks = [(params, graph, trial) for trial in range(params["trials"])]
    results = _map_trials(_maxcut_trial, tasks, params["jobs"])

    rows, finals = [], {}
    for trial, trial_rows, trial_finals in results:
        rows.extend(trial_rows)
        for variant, m in trial_finals:
            finals.setdefault(variant, []).append(m)
    summary = {
        "command": "maxcut",
        "config": {k: v for k, v in params.items() if not k.startswith("_")},
        "curves": _mean_curves(rows, params["iters"]),
        "final_metrics": {
            variant: {
                "per_trial": ms,
                "mean": {k: float(np.mean([m[k] for m in ms])) for k in ms[0]},
            }
            for variant, ms in finals.items()
        },
    }
    _emit_outputs(params["outdir"], rows, summary)
    return EXIT_OK


def _map_trials(fn, tasks, jobs):
    if jobs <= 1 or len(tasks) <= 1:
        return [fn(t) for t in tasks]
    with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, tasks))


# ---------------------------------------------------------------------------
# declarative problems


def _build_smooth(doc):
    kind = doc.get("kind")
    if kind == "quadratic":
        return SmoothTerm.quadratic(np.asarray(doc["Q"], dtype=float),
                                    doc.get("b"), doc.get("c0", 0.0))
    if kind == "half_sq_distance":
        return SmoothTerm.half_sq_distance(np.asarray(doc["target"], dtype=float))
    if kind == "linear":
        return SmoothTerm.linear(np.asarray(doc["g"], dtype=float))
    if kind == "least_squares":
        # f(x) = 0.5 ||M x - b||^2 declared by its data
        M = np.asarray(doc["M"], dtype=float)
        b = np.asarray(doc["b"], dtype=float)
        return SmoothTerm.quadratic(M.T @ M, -(M.T @ b), 0.5 * float(b @ b))
    raise ConfigError(f"unsupported smooth-term kind {kind!r}")


def _build_map(doc):
    kind = doc.get("kind")
    if kind == "identity":
        return LinearMap.identity(int(doc["dim"]))
    if kind == "dense":
        return LinearMap.from_dense(np.asarray(doc["entries"], dtype=float))
    if kind == "diagonal":
        return LinearMap.diagonal(np.asarray(doc["entries"], dtype=float))
    if kind == "stacked_identity":
        return LinearMap.stacked_identity(int(doc["dim"]), int(doc["copies"]))
    raise ConfigError(f"unsupported linear-map kind {kind!r}")


def _build_component(doc):
    kind = doc.get("kind")
    if kind == "zero":
        return ZeroReg(int(doc["dim"]))
    if kind == "l1_ball":
        return L1BallIndicator(int(doc["dim"]), float(doc["radius"]))
    if kind == "simplex":
        return SimplexIndicator(int(doc["dim"]), float(doc["radius"]))
    if kind == "box":
        return BoxIndicator(int(doc["dim"]), doc.get("lo", 0.0), doc.get("hi", 1.0))
    if kind == "diag_ones":
        return DiagOnesIndicator(int(doc["n"]))
    if kind == "nuclear_reg":
        return NuclearNormReg((int(doc["rows"]), int(doc["cols"])),
                              float(doc["nu"]), int(doc["rank"]),
                              svd_tol=float(doc.get("svd_tol", 1e-9)))
    if kind == "nuclear_ball":
        return NuclearBallIndicator((int(doc["rows"]), int(doc["cols"])),
                                    float(doc["radius"]), int(doc["rank"]),
                                    svd_tol=float(doc.get("svd_tol", 1e-9)))
    if kind == "spectrahedron":
        return SpectrahedronIndicator(int(doc["n"]), float(doc["radius"]),
                                      int(doc["rank"]),
                                      svd_tol=float(doc.get("svd_tol", 1e-9)))
    if kind == "hypercube_polytope":
        dim = int(doc["dim"])
        lo, hi = float(doc.get("lo", 0.0)), float(doc.get("hi", 1.0))
        start = np.full(dim, lo)
        return PolytopeIndicator(
            dim, hypercube_lmo(lo, hi), PolytopeState.at_vertex(start),
            lam=doc.get("lambda", 1.0),
            dist_fn=lambda v, lo=lo, hi=hi: float(
                np.linalg.norm(v - np.clip(v, lo, hi))),
        )
    if kind == "simplex_polytope":
        dim = int(doc["dim"])
        radius = float(doc.get("radius", 1.0))
        start = np.zeros(dim)
        start[0] = radius
        from .linalg import project_simplex

        return PolytopeIndicator(
            dim, scaled_simplex_lmo(radius, dim), PolytopeState.at_vertex(start),
            lam=doc.get("lambda", 1.0),
            dist_fn=lambda v, r=radius: float(
                np.linalg.norm(v - project_simplex(v, r))),
        )
    if kind == "product":
        return ProductComponent([_build_component(p) for p in doc["parts"]])
    raise ConfigError(f"unsupported regularizer kind {kind!r}")


def _default_start(component):
    """A feasible starting block for each supported regularizer kind."""
    if isinstance(component, ProductComponent):
        return np.concatenate([_default_start(p) for p in component.parts])
    if isinstance(component, PolytopeIndicator):
        return component._state0.point()
    if isinstance(component, BoxIndicator):
        return np.clip(np.zeros(component.dim), component.lo, component.hi)
    if isinstance(component, SimplexIndicator):
        return np.full(component.dim, component.radius / component.dim)
    if isinstance(component, DiagOnesIndicator):
        return np.eye(component.n).ravel()
    if isinstance(component, SpectrahedronIndicator):
        n = component.shape[0]
        return (component.tau / n * np.eye(n)).ravel()
    return np.zeros(component.dim)


def _load_problem(path):
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read problem file: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}"
        ) from exc
    for key in ("f", "A", "rx", "ry"):
        if key not in doc:
            raise ConfigError(f"{path}: missing required section {key!r}")
    f = _build_smooth(doc["f"])
    A = _build_map(doc["A"])
    rx = _build_component(doc["rx"])
    ry = _build_component(doc["ry"])
    spec = ProblemSpec(f=f, A=A, rx=rx, ry=ry,
                       pqg_alpha=doc.get("pqg_alpha"))
    x0 = (np.asarray(doc["x0"], dtype=float) if "x0" in doc
          else _default_start(rx))
    if "y0" in doc:
        y0 = np.asarray(doc["y0"], dtype=float)
    elif isinstance(ry, PolytopeIndicator) or isinstance(ry, ProductComponent):
        y0 = _default_start(ry)
    else:
        prox = getattr(ry, "prox", None)
        y0 = prox(spec.A.apply(x0), 1.0) if prox else _default_start(ry)
    w0 = (np.asarray(doc["w0"], dtype=float) if "w0" in doc
          else np.zeros(A.dim_out))
    solver = doc.get("solver", {})
    return spec, PrimalPoint(x0, y0), w0, solver


def cmd_generic(params, problem_path):
    spec, q0, w0, solver_doc = _load_problem(problem_path)
    merged = dict(solver_doc)
    for k in ("iters", "rho", "mu", "eta", "step_policy", "variant", "seed"):
        if params.get(k) is not None:
            merged[k] = params[k]
    merged.setdefault("iters", 200)
    merged.setdefault("rho", 1.0)
    merged.setdefault("mu", 0.2)
    merged.setdefault("variant", "both")
    merged.setdefault("step_policy",
                      "theoretical" if (spec.pqg_alpha or spec.f.alpha)
                      else "fixed")
    if merged["step_policy"] == "fixed":
        merged.setdefault("eta", 0.2)
    try:
        config = SolverConfig(
            rho=float(merged["rho"]), mu=float(merged["mu"]),
            iters=int(merged["iters"]), step_policy=merged["step_policy"],
            eta=merged.get("eta"), variant=merged["variant"],
            lam=float(merged.get("lam", 1.0)),
            seed=int(merged.get("seed", 0)),
            trace_mean=merged["variant"] in ("mean", "both"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc
    variants = (["mean", "last"] if config.variant == "both"
                else [config.variant])
    log = run(spec, q0, w0, config)
    rows = _rows_from_log(log, 0, variants)
    final = {}
    for variant in variants:
        point = log.mean_point if variant == "mean" else log.last_point
        rec = log.records[-1]
        final[variant] = {
            "objective": rec.mean_objective if variant == "mean" else rec.objective,
            "feasibility": float(np.linalg.norm(spec.A.apply(point.x) - point.y)),
        }
    summary = {
        "command": "generic",
        "problem": problem_path,
        "config": dict(merged),
        "curves": _mean_curves(rows, config.iters),
        "final": final,
    }
    _emit_outputs(params["outdir"], rows, summary)
    return EXIT_OK


# ---------------------------------------------------------------------------
# certificate runner


def cmd_certify(suite, seed):
    ok, certs = run_suites(suite, seed=seed)
    width = max(len(c.name) for c in certs)
    for c in certs:
        status = "PASS" if c.passed else ("N/A " if not c.applicable else "FAIL")
        print(f"{c.name:<{width}}  {status}  {c.details}")
    print(f"{'all':<{width}}  {'PASS' if ok else 'FAIL'}")
    return EXIT_OK if ok else EXIT_CERT


# ---------------------------------------------------------------------------
# argument parsing


# every flag defaults to None so explicit values can be told apart from the
# defaults table when merging with presets and config files


def _add_solver_flags(sub):
    sub.add_argument("--config", default=None,
                     help="JSON file with parameter overrides")
    sub.add_argument("--iters", type=int, default=None, help="iteration budget")
    sub.add_argument("--trials", type=int, default=None,
                     help="independent repetitions (seed + trial index)")
    sub.add_argument("--rho", type=float, default=None, help="penalty parameter")
    sub.add_argument("--mu", type=float, default=None, help="dual step size")
    sub.add_argument("--eta", type=float, default=None,
                     help="primal step (fixed policy / line-search base)")
    sub.add_argument("--step-policy", default=None,
                     choices=["theoretical", "line_search", "fixed"])
    sub.add_argument("--variant", default=None,
                     choices=["mean", "last", "both"])
    sub.add_argument("--rank", type=int, default=None,
                     help="oracle rank estimate")
    sub.add_argument("--svd-tol", type=float, default=None,
                     help="truncated decomposition tolerance")
    sub.add_argument("--seed", type=int, default=None)
    sub.add_argument("--jobs", type=int, default=None,
                     help="worker processes for the trial loop")
    sub.add_argument("--outdir", default=None)
    sub.add_argument("--preset", default=None,
                     help="named parameter bundle (paper-cme, paper-maxcut)")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="wpmm",
        description="Projection-free augmented Lagrangian solver experiments",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    cme = subs.add_parser("cme", help="covariance-estimation experiment")
    cme.add_argument("--d", type=int, default=None, help="matrix dimension")
    cme.add_argument("--r", type=int, default=None, help="ground-truth blocks")
    cme.add_argument("--noise-sigma", type=float, default=None)
    cme.add_argument("--entry-threshold", type=float, default=None)
    _add_solver_flags(cme)

    mc = subs.add_parser("maxcut", help="Max Cut SDP experiment")
    mc.add_argument("--graph", default=None,
                    help="Gset-format graph file (WPMM_DATA_DIR searched)")
    mc.add_argument("--random-n", type=int, default=None,
                    help="random-graph node count when no file is given")
    mc.add_argument("--random-p", type=float, default=None,
                    help="random-graph edge probability")
    _add_solver_flags(mc)

    gen = subs.add_parser("generic", help="solve a problem declared in JSON")
    gen.add_argument("problem", help="problem JSON file")
    gen.add_argument("--config", default=None)
    gen.add_argument("--iters", type=int, default=None)
    gen.add_argument("--rho", type=float, default=None)
    gen.add_argument("--mu", type=float, default=None)
    gen.add_argument("--eta", type=float, default=None)
    gen.add_argument("--step-policy", default=None,
                     choices=["theoretical", "line_search", "fixed"])
    gen.add_argument("--variant", default=None,
                     choices=["mean", "last", "both"])
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--outdir", default=None)

    cert = subs.add_parser("certify", help="run convergence certificates")
    cert.add_argument("suite", nargs="?", default="all",
                      choices=["oracles", "decay", "ergodic", "all"])
    cert.add_argument("--seed", type=int, default=0)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK

    try:
        if ns.command == "certify":
            return cmd_certify(ns.suite, ns.seed)

        cli_values = {k: v for k, v in vars(ns).items()
                      if k not in ("command", "config", "problem", "graph")}
        if ns.command == "cme":
            params = _merge_params(CME_DEFAULTS, ns.preset, ns.config, cli_values)
            return cmd_cme(params)
        if ns.command == "maxcut":
            params = _merge_params(MAXCUT_DEFAULTS, ns.preset, ns.config, cli_values)
            if ns.graph is not None:
                params["graph"] = ns.graph
            return cmd_maxcut(params)
        if ns.command == "generic":
            params = _merge_params(GENERIC_DEFAULTS, None, ns.config, cli_values)
            return cmd_generic(params, ns.problem)
        raise ConfigError(f"unknown command {ns.command!r}")
    except (ConfigError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except GraphFileError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SolverError, OracleError) as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
