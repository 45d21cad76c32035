"""Primal-dual solver loop with weak proximal oracle primal updates.

One iteration: query both block oracles at the current point with the
linearization vectors and the step coefficient eta*(beta_S + 2 mu (||A||+1)^2),
move the primal point by a convex combination toward the oracle output, then
ascend the multiplier along the constraint residual. Step sizes come either
from the curvature-based formulas, from a fixed user value, or from an exact
line search over the combination parameter.

Also houses the runtime convergence certificates: per-iteration linear decay
of the augmented-Lagrangian gap, the objective/feasibility split, and the
ergodic O(1/T) bound.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np

from .model import (
    PrimalPoint,
    alpha_S_strongly_convex,
    beta_S,
    indicator_tol,
    k_apply,
)
from .oracles import beta_hat

__all__ = [
    "SolverError",
    "LineSearchError",
    "SolverConfig",
    "IterateState",
    "RunRecord",
    "RunLog",
    "Certificate",
    "theoretical_eta",
    "max_dual_step",
    "ergodic_bound",
    "line_search_eta",
    "wpmm_step",
    "init_state",
    "run",
    "check_linear_decay",
    "check_obj_feas_split",
]


class SolverError(RuntimeError):
    """A solver step failed; carries the iteration index and, when raised
    from ``run``, the partial log accumulated so far."""

    def __init__(self, message, iteration=None, partial_log=None):
        super().__init__(message)
        self.iteration = iteration
        self.partial_log = partial_log


class LineSearchError(RuntimeError):
    """Line search preconditions violated (regularizer not constant on the
    candidate segment)."""


# ---------------------------------------------------------------------------
# step-size formulas


def theoretical_eta(alpha_s, beta_s, lam, mu, norm_a):
    """Curvature-based primal step size
    alpha_s / (2*lam*(beta_s + 2*mu*(norm_a+1)^2)), guaranteed in (0, 1]."""
    if alpha_s <= 0 or beta_s <= 0 or mu <= 0:
        raise ValueError("alpha_s, beta_s and mu must be positive")
    if lam < 1:
        raise ValueError("lam must be >= 1")
    if norm_a < 0:
        raise ValueError("norm_a must be nonnegative")
    eta = alpha_s / (2.0 * lam * (beta_s + 2.0 * mu * (norm_a + 1.0) ** 2))
    if eta > 1.0:
        raise ValueError(
            f"step size {eta:g} > 1 signals inconsistent curvature constants"
        )
    return eta


def max_dual_step(alpha_s, beta_s, lam, norm_a):
    """Largest dual step admitted by the rate guarantee:
    (sqrt(lam*alpha_s^2 + lam^2*beta_s^2) - lam*beta_s) / (4*lam*(norm_a+1)^2)."""
    if alpha_s <= 0 or beta_s <= 0:
        raise ValueError("alpha_s and beta_s must be positive")
    if lam < 1:
        raise ValueError("lam must be >= 1")
    if norm_a < 0:
        raise ValueError("norm_a must be nonnegative")
    root = math.sqrt(lam * alpha_s**2 + lam**2 * beta_s**2)
    # rationalized form of (root - lam*beta_s) / (4*lam*(norm_a+1)^2):
    # avoids the cancellation that would round the bound down to zero when
    # alpha_s << beta_s
    return (lam * alpha_s**2 /
            ((root + lam * beta_s) * 4.0 * lam * (norm_a + 1.0) ** 2))


def ergodic_bound(c, w0_norm, d1, beta, rho, mu, norm_a, alpha_s):
    """Constant of the O(1/T) ergodic guarantee:
    (c + ||w0||)^2/(2 mu) + max{0, 2 d1 (beta + (rho+2mu)(norm_a+1)^2)/alpha_s}
    for any c >= twice the norm of a dual optimum."""
    if c <= 0 or mu <= 0 or alpha_s <= 0:
        raise ValueError("c, mu and alpha_s must be positive")
    head = (c + w0_norm) ** 2 / (2.0 * mu)
    tail = 2.0 * d1 * (beta + (rho + 2.0 * mu) * (norm_a + 1.0) ** 2) / alpha_s
    return head + max(0.0, tail)


# ---------------------------------------------------------------------------
# configuration and state


@dataclass
class SolverConfig:
    """Run parameters.

    step_policy is one of "theoretical" (eta from the curvature formula, mu
    checked against max_dual_step), "fixed" (eta required), or "line_search"
    (oracle still receives the base eta -- the configured value, or the
    theoretical one when available -- and the combination parameter is then
    optimized exactly over [0, 1]).
    """

    rho: float
    mu: float
    iters: int
    step_policy: str = "theoretical"
    eta: Optional[float] = None
    variant: str = "both"  # mean | last | both
    lam: float = 1.0
    c_dual_bound: Optional[float] = None
    seed: int = 0
    keep_iterates: bool = False
    trace_mean: bool = False

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.mu <= 0:
            raise ValueError("mu must be positive")
        if self.iters < 0:
            raise ValueError("iters must be nonnegative")
        if self.step_policy not in ("theoretical", "line_search", "fixed"):
            raise ValueError(f"unknown step policy {self.step_policy!r}")
        if self.step_policy == "fixed":
            if self.eta is None or not 0.0 < self.eta <= 1.0:
                raise ValueError("fixed policy needs eta in (0, 1]")
        if self.eta is not None and not 0.0 < self.eta <= 1.0:
            raise ValueError("eta must lie in (0, 1]")
        if self.variant not in ("mean", "last", "both"):
            raise ValueError(f"unknown variant {self.variant!r}")
        if self.lam < 1:
            raise ValueError("lam must be >= 1")


@dataclass
class IterateState:
    """Mutable per-run state: current pair, ergodic accumulator, iteration
    counter, and the run-owned oracle instances."""

    q: PrimalPoint
    w: np.ndarray
    running_sum: PrimalPoint
    t: int = 0
    rx: Optional[object] = None
    ry: Optional[object] = None


@dataclass
class RunRecord:
    t: int
    objective: float
    objective_flagged: bool
    feasibility: float
    al_value: float
    eta_used: float
    eta_fallback: bool
    elapsed: float
    mean_objective: Optional[float] = None
    mean_feasibility: Optional[float] = None
    mean_al_value: Optional[float] = None


@dataclass
class RunLog:
    """Per-iteration trace plus the final Mean/Last outputs."""

    records: list
    last_point: PrimalPoint
    mean_point: Optional[PrimalPoint]
    w_final: np.ndarray
    config: SolverConfig
    iterates: Optional[list] = None

    def to_json_dict(self):
        cfg = asdict(self.config)
        doc = {
            "config": cfg,
            "records": [asdict(r) for r in self.records],
            "last_x": self.last_point.x.tolist(),
            "last_y": self.last_point.y.tolist(),
            "w_final": self.w_final.tolist(),
        }
        if self.mean_point is not None:
            doc["mean_x"] = self.mean_point.x.tolist()
            doc["mean_y"] = self.mean_point.y.tolist()
        return doc


@dataclass
class Certificate:
    """Outcome of a runtime convergence check."""

    name: str
    passed: bool
    applicable: bool = True
    details: str = ""
    data: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# step machinery


@dataclass
class _StepContext:
    rho: float
    mu: float
    lam: float
    base_eta: float
    coeff: float
    beta_s: float
    alpha_s: Optional[float]
    policy: str
    rx: object
    ry: object


def _resolve_alpha_s(spec, config, norm_a):
    if spec.pqg_alpha is not None:
        return spec.pqg_alpha
    if spec.f.alpha is not None and spec.f.alpha > 0:
        return alpha_S_strongly_convex(spec.f.alpha, config.rho, norm_a)
    return None


def _build_context(spec, config, rx=None, ry=None):
    norm_a = spec.A.norm_bound
    bs = beta_S(spec.f.beta, config.rho, norm_a)
    alpha_s = _resolve_alpha_s(spec, config, norm_a)
    policy = config.step_policy

    if policy == "fixed":
        base = config.eta
    elif policy == "theoretical":
        if alpha_s is None:
            raise ValueError(
                "theoretical step policy needs a curvature parameter "
                "(pqg_alpha or a strongly convex smooth term)"
            )
        mu_cap = max_dual_step(alpha_s, bs, config.lam, norm_a)
        if config.mu > mu_cap * (1.0 + 1e-12):
            raise ValueError(
                f"mu={config.mu:g} exceeds the dual step bound {mu_cap:g} "
                "required by the theoretical policy"
            )
        base = theoretical_eta(alpha_s, bs, config.lam, config.mu, norm_a)
    else:  # line_search
        if config.eta is not None:
            base = config.eta
        elif alpha_s is not None:
            base = theoretical_eta(alpha_s, bs, config.lam, config.mu, norm_a)
        else:
            raise ValueError(
                "line_search policy needs either eta or a curvature parameter "
                "for the oracle's base step"
            )

    coeff = base * beta_hat(bs, config.mu, norm_a)
    return _StepContext(
        rho=config.rho,
        mu=config.mu,
        lam=config.lam,
        base_eta=base,
        coeff=coeff,
        beta_s=bs,
        alpha_s=alpha_s,
        policy=policy,
        rx=rx if rx is not None else spec.rx,
        ry=ry if ry is not None else spec.ry,
    )


def line_search_eta(spec, q, v, w, mu, rho, base_eta=None):
    """Exact step over the segment q -> v for the merit
    mu ||K q(eta)||^2 + L_rho(q(eta), w), eta in [0, 1].

    Requires both endpoints inside every indicator domain so the regularizer
    is constant along the segment. For quadratic (or linear) f the merit is
    an exact quadratic in eta, minimized in closed form; otherwise golden
    section narrows [0, 1] to width 1e-6. Endpoints (and the optional base
    step) always compete with the interior candidate.
    """
    for comp, a, b in ((spec.rx, q.x, v.x), (spec.ry, q.y, v.y)):
        if not comp.constant_on_segments:
            raise LineSearchError(
                f"{type(comp).__name__} is not constant along segments"
            )
        if comp.is_indicator:
            for pt in (a, b):
                if comp.distance(pt) > indicator_tol(pt):
                    raise LineSearchError("segment endpoint outside an indicator domain")

    dx = v.x - q.x
    dy = v.y - q.y
    kq = k_apply(spec, q)
    kd = spec.A.apply(dx) - dy
    pen = mu + 0.5 * rho

    def merit(eta):
        ke = kq + eta * kd
        return float(spec.f.value(q.x + eta * dx)) + float(w @ ke) + pen * float(ke @ ke)

    candidates = [0.0, 1.0]
    if base_eta is not None and 0.0 < base_eta <= 1.0:
        candidates.append(float(base_eta))

    if spec.f.is_quadratic:
        gf = spec.f.gradient(q.x)
        lin = float(gf @ dx) + float(w @ kd) + 2.0 * pen * float(kq @ kd)
        curv_f = float(spec.f.value(q.x + dx)) - float(spec.f.value(q.x)) - float(gf @ dx)
        curv = curv_f + pen * float(kd @ kd)
        if curv > 0.0:
            candidates.append(min(1.0, max(0.0, -lin / (2.0 * curv))))
    else:
        inv_phi = (math.sqrt(5.0) - 1.0) / 2.0
        lo, hi = 0.0, 1.0
        a = hi - inv_phi * (hi - lo)
        b = lo + inv_phi * (hi - lo)
        fa, fb = merit(a), merit(b)
        while hi - lo > 1e-6:
            if fa <= fb:
                hi, b, fb = b, a, fa
                a = hi - inv_phi * (hi - lo)
                fa = merit(a)
            else:
                lo, a, fa = a, b, fb
                b = lo + inv_phi * (hi - lo)
                fb = merit(b)
        candidates.append(0.5 * (lo + hi))

    best = min(sorted(candidates), key=merit)
    return best


def init_state(spec, q0, w0):
    """Fresh iterate state with run-owned oracle instances."""
    zero = PrimalPoint(np.zeros_like(q0.x), np.zeros_like(q0.y))
    return IterateState(
        q=q0.copy(),
        w=np.asarray(w0, dtype=float).copy(),
        running_sum=zero,
        t=0,
        rx=spec.rx.for_run(q0.x),
        ry=spec.ry.for_run(q0.y),
    )


def _step(spec, state, ctx):
    q, w = state.q, state.w
    kq = spec.A.apply(q.x) - q.y
    r = w + (ctx.rho + 2.0 * ctx.mu) * kq
    px = spec.f.gradient(q.x) + spec.A.adjoint(r)
    py = -r

    try:
        vx = ctx.rx.compute(q.x, px, ctx.coeff)
        vy = ctx.ry.compute(q.y, py, ctx.coeff)
    except Exception as exc:
        raise SolverError(
            f"oracle failure at iteration {state.t}: {exc}", iteration=state.t
        ) from exc
    v = PrimalPoint(np.asarray(vx, dtype=float), np.asarray(vy, dtype=float))

    eta = ctx.base_eta
    fallback = False
    if ctx.policy == "line_search":
        try:
            eta = line_search_eta(spec, q, v, w, ctx.mu, ctx.rho,
                                  base_eta=ctx.base_eta)
        except LineSearchError:
            eta = ctx.base_eta
            fallback = True

    xn = (1.0 - eta) * q.x + eta * v.x
    yn = (1.0 - eta) * q.y + eta * v.y
    ctx.rx.commit(eta)
    ctx.ry.commit(eta)
    kqn = spec.A.apply(xn) - yn
    state.q = PrimalPoint(xn, yn)
    state.w = w + ctx.mu * kqn
    state.running_sum.x += xn
    state.running_sum.y += yn
    state.t += 1
    info = {"eta": eta, "fallback": fallback,
            "k_norm": float(np.linalg.norm(kqn))}
    return state, info


def wpmm_step(spec, state, config):
    """One full primal + dual update on the given state (advanced in place
    and returned). The oracles are invoked exactly once with the
    linearization vectors and the coefficient base_eta * beta_hat."""
    ctx = _build_context(spec, config, rx=state.rx, ry=state.ry)
    state, _ = _step(spec, state, ctx)
    return state


def _log_eval(spec, q, w, rho):
    """(objective, flagged, al_value) computed with one regularizer
    evaluation per block; numerically identical to objective_h_logged and
    al_value for feasible iterates."""
    fval = float(spec.f.value(q.x))
    vx, fx = spec.rx.logged_value(q.x)
    vy, fy = spec.ry.logged_value(q.y)
    flagged = fx or fy
    obj = fval + vx + vy
    if flagged:
        return obj, True, float("inf")
    kq = k_apply(spec, q)
    al = fval + float(w @ kq) + 0.5 * rho * float(kq @ kq) + vx + vy
    return obj, False, al


def _check_domain(spec, q0):
    for comp, block, name in ((spec.rx, q0.x, "x0"), (spec.ry, q0.y, "y0")):
        dist = comp.distance(block)
        if dist > indicator_tol(block):
            raise ValueError(
                f"{name} lies outside the regularizer domain (distance {dist:g})"
            )


def run(spec, q0, w0, config):
    """Execute ``config.iters`` solver steps from (q0, w0) and log every
    iteration. The Mean output is the average of the post-step iterates, the
    Last output is the final iterate; both are recorded regardless of which
    variant the caller plans to read, except that an empty run has no mean."""
    _check_domain(spec, q0)
    w0 = np.asarray(w0, dtype=float)
    T = config.iters
    if T == 0:
        if config.variant in ("mean", "both"):
            raise ValueError("mean output undefined for an empty run")
        return RunLog([], q0.copy(), None, w0.copy(), config,
                      iterates=[] if config.keep_iterates else None)

    state = init_state(spec, q0, w0)
    ctx = _build_context(spec, config, rx=state.rx, ry=state.ry)
    records = []
    iterates = [] if config.keep_iterates else None
    start = time.perf_counter()
    try:
        for _ in range(T):
            state, info = _step(spec, state, ctx)
            obj, flagged, alv = _log_eval(spec, state.q, state.w, config.rho)
            rec = RunRecord(
                t=state.t,
                objective=obj,
                objective_flagged=flagged,
                feasibility=info["k_norm"],
                al_value=alv,
                eta_used=info["eta"],
                eta_fallback=info["fallback"],
                elapsed=time.perf_counter() - start,
            )
            if config.trace_mean:
                qb = PrimalPoint(state.running_sum.x / state.t,
                                 state.running_sum.y / state.t)
                mobj, _, mal = _log_eval(spec, qb, state.w, config.rho)
                rec.mean_objective = mobj
                rec.mean_feasibility = float(np.linalg.norm(k_apply(spec, qb)))
                rec.mean_al_value = mal
            records.append(rec)
            if iterates is not None:
                iterates.append(state.q.copy())
    except SolverError as exc:
        exc.partial_log = RunLog(records, state.q.copy(), None,
                                 state.w.copy(), config, iterates=iterates)
        raise

    mean_point = PrimalPoint(state.running_sum.x / T, state.running_sum.y / T)
    return RunLog(records, state.q.copy(), mean_point, state.w.copy(), config,
                  iterates=iterates)


# ---------------------------------------------------------------------------
# certificates


def check_linear_decay(al_values, l_star, eta, rtol=1e-8):
    """Certificate for per-iteration linear decay of the AL gap.

    With d_t = al_values[t] - l_star, checks d_{t+1} <= (1 - eta) d_t + tol
    for every consecutive pair, tol = rtol * (1 + |d_1|). Passes iff every
    iteration passes; the first offending index is reported.
    """
    d = [float(a) - l_star for a in al_values]
    if len(d) < 2:
        return Certificate("linear_decay", True, details="fewer than two points")
    tol = rtol * (1.0 + abs(d[0]))
    first_bad = None
    worst = -math.inf
    for i in range(len(d) - 1):
        slack = d[i + 1] - ((1.0 - eta) * d[i] + tol)
        worst = max(worst, slack)
        if slack > 0 and first_bad is None:
            first_bad = i + 1
    passed = first_bad is None
    details = ("all iterations decay" if passed
               else f"decay violated first at t={first_bad}")
    return Certificate("linear_decay", passed, details=details,
                       data={"d1": d[0], "checked": len(d) - 1,
                             "first_failure": first_bad, "worst_slack": worst})


def check_obj_feas_split(h_gap, c, rho, k_norm, delta):
    """Certificate for the objective/feasibility split: given
    h_gap + c*||Kq|| + (rho/2)*||Kq||^2 <= delta, both h_gap <= delta and
    ||Kq|| <= 2*delta/c must hold. Reports not-applicable when the antecedent
    fails."""
    if c <= 0:
        raise ValueError("c must be positive")
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    guard = 1e-12 * (1.0 + abs(delta))
    lhs = h_gap + c * k_norm + 0.5 * rho * k_norm**2
    if lhs > delta + guard:
        return Certificate(
            "obj_feas_split", False, applicable=False,
            details=f"antecedent not satisfied ({lhs:.6g} > {delta:.6g})",
            data={"lhs": lhs, "delta": delta},
        )
    ok = (h_gap <= delta + guard) and (k_norm <= 2.0 * delta / c + guard)
    return Certificate(
        "obj_feas_split", ok,
        details="both consequents hold" if ok else "a consequent fails",
        data={"h_gap": h_gap, "k_norm": k_norm, "delta": delta,
              "feasibility_bound": 2.0 * delta / c},
    )
