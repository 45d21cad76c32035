"""Experiment harness: instance generation, problem builders, metrics, and a
high-accuracy reference-solution oracle.

Covers two desk-scale studies: covariance estimation over the spectrahedron
intersected with an l1 ball (synthetic low-rank + sparse ground truth), and
the Max Cut semidefinite relaxation over Gset-format graphs or random
Erdos-Renyi substitutes.
"""

from __future__ import annotations

import json
import warnings
from dataclasses import asdict, dataclass

import numpy as np

from .linalg import project_l1_ball
from .model import (
    LinearMap,
    PrimalPoint,
    ProblemSpec,
    SmoothTerm,
    al_value,
    objective_h,
)
from .oracles import (
    BoxIndicator,
    DiagOnesIndicator,
    L1BallIndicator,
    SpectrahedronIndicator,
)
from .solver import (
    SolverConfig,
    _build_context,
    _step,
    init_state,
    max_dual_step,
    theoretical_eta,
)
from .model import alpha_S_strongly_convex, beta_S

__all__ = [
    "CmeConfig",
    "GsetGraph",
    "CmeMetrics",
    "MaxcutMetrics",
    "ReferenceSolution",
    "gen_cme_instance",
    "save_cme_instance",
    "load_cme_instance",
    "load_gset",
    "save_gset",
    "gen_er_graph",
    "laplacian",
    "build_cme_problem",
    "build_maxcut_problem",
    "build_box_toy",
    "metrics_cme",
    "metrics_maxcut",
    "reference_solution",
]


@dataclass
class CmeConfig:
    """Covariance-estimation instance parameters. Defaults follow the
    original experimental protocol; tests use smaller d and r."""

    d: int = 400
    r: int = 5
    noise_sigma: float = 0.6
    entry_threshold: float = 0.9
    seed: int = 0

    def __post_init__(self):
        if not self.d >= self.r >= 1:
            raise ValueError("need d >= r >= 1")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")


@dataclass
class GsetGraph:
    """Weighted undirected graph in Gset conventions (1-based vertices)."""

    n: int
    edges: list  # (u, v, weight) tuples, u <= v, no self-loops


@dataclass
class CmeMetrics:
    normalized_objective: float
    feasibility_distance: float
    recovery_error: float


@dataclass
class MaxcutMetrics:
    objective: float
    diag_feasibility: float


@dataclass
class ReferenceSolution:
    q: PrimalPoint
    w: np.ndarray
    h_value: float
    al_value: float
    iterations: int
    k_norm: float


# ---------------------------------------------------------------------------
# instance generation


def gen_cme_instance(cfg):
    """Synthetic covariance instance.

    The ground truth is block diagonal with r rank-one blocks u u^T where u
    is uniform on [-1, 1] and entries with |u_i| below the threshold are
    zeroed before the outer product (no renormalization). Observations are
    Gaussian draws from the truth plus entrywise noise; the empirical
    second-moment matrix, the trace radius and the entrywise-l1 radius of the
    truth are returned alongside it.

    Returns ``(Sigma, SigmaHat, tau, s)``.
    """
    rng = np.random.default_rng(cfg.seed)
    d, r = cfg.d, cfg.r
    sizes = [d // r + (1 if i < d % r else 0) for i in range(r)]
    Sigma = np.zeros((d, d))
    pos = 0
    for bs in sizes:
        u = None
        for _ in range(100):
            cand = rng.uniform(-1.0, 1.0, size=bs)
            cand = np.where(np.abs(cand) > cfg.entry_threshold, cand, 0.0)
            if np.any(cand != 0.0):
                u = cand
                break
        if u is None:
            raise RuntimeError(
                "degenerate block: all entries thresholded away in 100 attempts"
            )
        Sigma[pos:pos + bs, pos:pos + bs] = np.outer(u, u)
        pos += bs

    # jitter makes the factorization well-posed; Sigma is rank deficient
    L = np.linalg.cholesky(Sigma + 1e-12 * np.eye(d))
    Z = L @ rng.standard_normal((d, d))
    Z += cfg.noise_sigma * rng.standard_normal((d, d))
    SigmaHat = (Z @ Z.T) / d
    SigmaHat = 0.5 * (SigmaHat + SigmaHat.T)

    tau = float(np.trace(Sigma))  # nuclear norm of a PSD matrix
    s = float(np.abs(Sigma).sum())
    return Sigma, SigmaHat, tau, s


def save_cme_instance(path, cfg, Sigma, SigmaHat, tau, s):
    """Dump a generated instance as JSON: config echo plus dense matrices as
    nested arrays."""
    doc = {
        "config": asdict(cfg),
        "Sigma": np.asarray(Sigma).tolist(),
        "SigmaHat": np.asarray(SigmaHat).tolist(),
        "tau": float(tau),
        "s": float(s),
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)


def load_cme_instance(path):
    """Inverse of save_cme_instance; returns (cfg, Sigma, SigmaHat, tau, s)."""
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    cfg = CmeConfig(**doc["config"])
    return (cfg, np.array(doc["Sigma"]), np.array(doc["SigmaHat"]),
            doc["tau"], doc["s"])


def load_gset(path):
    """Parse a Gset-format graph file: first line ``n m``, then m lines
    ``u v w`` with 1-based vertices and integer weights. Self-loops are
    dropped with a warning, duplicate edges are summed with a warning."""
    with open(path, "r", encoding="ascii") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise ValueError(f"{path}: empty file")
    head = lines[0].split()
    if len(head) != 2:
        raise ValueError(f"{path}:1: expected 'n m' header, got {lines[0]!r}")
    try:
        n, m = int(head[0]), int(head[1])
    except ValueError as exc:
        raise ValueError(f"{path}:1: malformed header {lines[0]!r}") from exc

    acc = {}
    parsed = 0
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split()
        if len(parts) != 3:
            raise ValueError(f"{path}:{lineno}: expected 'u v w', got {raw!r}")
        try:
            u, v, w = int(parts[0]), int(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ValueError(f"{path}:{lineno}: malformed edge {raw!r}") from exc
        if not (1 <= u <= n and 1 <= v <= n):
            raise ValueError(f"{path}:{lineno}: vertex out of range in {raw!r}")
        parsed += 1
        if u == v:
            warnings.warn(f"{path}:{lineno}: dropping self-loop on vertex {u}")
            continue
        key = (min(u, v), max(u, v))
        if key in acc:
            warnings.warn(f"{path}:{lineno}: duplicate edge {key}, weights summed")
            acc[key] += w
        else:
            acc[key] = w
    if parsed != m:
        raise ValueError(f"{path}: header declares {m} edges, found {parsed}")
    edges = [(u, v, w) for (u, v), w in acc.items()]
    return GsetGraph(n=n, edges=edges)


def save_gset(graph, path):
    """Write a graph in the exact Gset text format."""
    with open(path, "w", encoding="ascii") as fh:
        fh.write(f"{graph.n} {len(graph.edges)}\n")
        for u, v, w in graph.edges:
            fh.write(f"{u} {v} {int(w)}\n")


def gen_er_graph(n, p, seed=0, weight=1):
    """Erdos-Renyi G(n, p) with constant integer edge weights."""
    rng = np.random.default_rng(seed)
    edges = []
    for u in range(1, n + 1):
        for v in range(u + 1, n + 1):
            if rng.random() < p:
                edges.append((u, v, weight))
    return GsetGraph(n=n, edges=edges)


def laplacian(graph):
    """Combinatorial Laplacian D - W; symmetric with zero row sums."""
    n = graph.n
    W = np.zeros((n, n))
    for u, v, w in graph.edges:
        W[u - 1, v - 1] += w
        W[v - 1, u - 1] += w
    return np.diag(W.sum(axis=1)) - W


# ---------------------------------------------------------------------------
# problem builders


def build_cme_problem(SigmaHat, tau, s, k_hat, svd_tol=1e-9):
    """Covariance estimation: least squares to the noisy observation over
    {PSD, trace tau} for x, intersected through the identity coupling with
    the entrywise l1 ball of radius s for y.

    x starts at the spectrahedron projection of the observation, y at its l1
    projection, the multiplier at zero. Returns ``(spec, q0, w0)``.
    """
    SigmaHat = np.asarray(SigmaHat, dtype=float)
    d = SigmaHat.shape[0]
    if tau <= 0 or s <= 0 or k_hat < 1:
        raise ValueError("need tau > 0, s > 0, k_hat >= 1")
    target = SigmaHat.ravel()
    f = SmoothTerm.half_sq_distance(target)
    A = LinearMap.identity(d * d)
    rx = SpectrahedronIndicator(d, tau, k_hat, svd_tol=svd_tol)
    ry = L1BallIndicator(d * d, s)
    spec = ProblemSpec(f=f, A=A, rx=rx, ry=ry)
    x0 = rx.project(target)
    y0 = project_l1_ball(target, s)
    return spec, PrimalPoint(x0, y0), np.zeros(d * d)


def build_maxcut_problem(C, k_hat, svd_tol=1e-9, beta_floor=1e-6):
    """Max Cut semidefinite relaxation: minimize -<C, S> over {PSD, trace d}
    for x coupled through the identity with the unit-diagonal affine set for
    y. The objective is linear, so no curvature parameter is available and
    the solver must be driven with fixed or line-search steps.

    Starts at the identity matrix with a zero multiplier.
    """
    C = np.asarray(C, dtype=float)
    d = C.shape[0]
    if C.shape != (d, d):
        raise ValueError("C must be square")
    if float(np.abs(C - C.T).max()) > 1e-10 * max(1.0, float(np.abs(C).max())):
        raise ValueError("C must be symmetric")
    f = SmoothTerm.linear(-C.ravel(), beta_floor=beta_floor)
    A = LinearMap.identity(d * d)
    rx = SpectrahedronIndicator(d, float(d), k_hat, svd_tol=svd_tol)
    ry = DiagOnesIndicator(d)
    spec = ProblemSpec(f=f, A=A, rx=rx, ry=ry)
    x0 = np.eye(d).ravel()
    return spec, PrimalPoint(x0.copy(), x0.copy()), np.zeros(d * d)


def build_box_toy(a, lo=0.0, hi=1.0, start=None):
    """Strongly convex toy: f = 0.5 ||x - a||^2, identity coupling, box
    indicators on both blocks. Starts at the lower corner unless told
    otherwise (the box projection of a would already be optimal)."""
    a = np.asarray(a, dtype=float).ravel()
    n = a.size
    f = SmoothTerm.half_sq_distance(a)
    A = LinearMap.identity(n)
    rx = BoxIndicator(n, lo, hi)
    ry = BoxIndicator(n, lo, hi)
    spec = ProblemSpec(f=f, A=A, rx=rx, ry=ry)
    if start is None:
        x0 = rx.lo.copy()
    else:
        x0 = np.asarray(start, dtype=float).ravel().copy()
    return spec, PrimalPoint(x0.copy(), x0.copy()), np.zeros(n)


# ---------------------------------------------------------------------------
# metrics


def metrics_cme(S, Sigma, SigmaHat, s):
    """Normalized objective, l1-feasibility distance and recovery error."""
    S = np.asarray(S, dtype=float)
    if S.shape != SigmaHat.shape or S.shape != Sigma.shape:
        raise ValueError("shape mismatch")
    nhat = float(np.linalg.norm(SigmaHat)) ** 2
    ntrue = float(np.linalg.norm(Sigma)) ** 2
    if nhat == 0.0 or ntrue == 0.0:
        raise ValueError("zero-norm reference matrix")
    feas = float(np.linalg.norm(S.ravel() - project_l1_ball(S.ravel(), s)))
    return CmeMetrics(
        normalized_objective=float(np.linalg.norm(S - SigmaHat)) ** 2 / (2 * nhat),
        feasibility_distance=feas,
        recovery_error=float(np.linalg.norm(S - Sigma)) ** 2 / (2 * ntrue),
    )


def metrics_maxcut(S, C):
    """Objective -tr(C S) and the diagonal feasibility gap ||diag(S) - 1||."""
    S = np.asarray(S, dtype=float)
    C = np.asarray(C, dtype=float)
    if S.shape != C.shape:
        raise ValueError("shape mismatch")
    return MaxcutMetrics(
        objective=-float(np.trace(C @ S)),
        diag_feasibility=float(np.linalg.norm(np.diag(S) - 1.0)),
    )


# ---------------------------------------------------------------------------
# reference oracle


def _objective_fast(spec, q):
    # iterates of the reference loop stay feasible by construction; skip the
    # indicator distance checks and sum only finite regularizer parts
    val = float(spec.f.value(q.x))
    for comp, block in ((spec.rx, q.x), (spec.ry, q.y)):
        if not comp.is_indicator:
            val += comp.value(block)
    return val


def reference_solution(spec, tol, *, q0, w0=None, rho=1.0, mu=None, eta=None,
                       policy=None, max_iters=1_000_000, check_every=1):
    """High-accuracy reference point via the same solver loop with exact
    full-decomposition prox oracles (lam = 1).

    By default the steps come from the curvature-based formulas when the
    problem carries a curvature parameter (policy "theoretical") and fall
    back to fixed eta = mu = 0.2 otherwise (e.g. a linear objective). Passing
    policy "line_search" or "fixed" with an explicit mu trades the
    conservative theoretical dual step for much faster convergence on larger
    instances; the stopping criterion is unchanged either way. Stops once the
    constraint residual and the successive objective change both drop below
    ``tol``; raises after ``max_iters`` iterations otherwise.

    Returns a ReferenceSolution carrying the point, the converged multiplier,
    the objective value and the augmented-Lagrangian value at the pair.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    spec_e = ProblemSpec(f=spec.f, A=spec.A, rx=spec.rx.exact(),
                         ry=spec.ry.exact(), pqg_alpha=spec.pqg_alpha)
    norm_a = spec_e.A.norm_bound
    alpha_s = spec_e.pqg_alpha
    if alpha_s is None and spec_e.f.alpha is not None and spec_e.f.alpha > 0:
        alpha_s = alpha_S_strongly_convex(spec_e.f.alpha, rho, norm_a)
    bs = beta_S(spec_e.f.beta, rho, norm_a)
    if policy is None:
        policy = "theoretical" if alpha_s is not None else "fixed"
    if policy == "theoretical":
        if alpha_s is None:
            raise ValueError("theoretical reference steps need curvature")
        if mu is None:
            mu = max_dual_step(alpha_s, bs, 1.0, norm_a)
        if eta is None:
            eta = theoretical_eta(alpha_s, bs, 1.0, mu, norm_a)
        config = SolverConfig(rho=rho, mu=mu, iters=1, step_policy="fixed",
                              eta=eta, variant="last")
    elif policy == "fixed":
        mu = 0.2 if mu is None else mu
        eta = 0.2 if eta is None else eta
        config = SolverConfig(rho=rho, mu=mu, iters=1, step_policy="fixed",
                              eta=eta, variant="last")
    elif policy == "line_search":
        mu = 0.2 if mu is None else mu
        config = SolverConfig(rho=rho, mu=mu, iters=1,
                              step_policy="line_search", eta=eta,
                              variant="last")
    else:
        raise ValueError(f"unknown reference policy {policy!r}")

    if w0 is None:
        w0 = np.zeros(spec_e.A.dim_out)
    state = init_state(spec_e, q0, w0)
    ctx = _build_context(spec_e, config, rx=state.rx, ry=state.ry)

    h_prev = _objective_fast(spec_e, state.q)
    k_norm = np.inf
    for it in range(1, max_iters + 1):
        state, info = _step(spec_e, state, ctx)
        k_norm = info["k_norm"]
        if it % check_every == 0:
            h_cur = _objective_fast(spec_e, state.q)
            if k_norm <= tol and abs(h_cur - h_prev) <= tol:
                return ReferenceSolution(
                    q=state.q.copy(),
                    w=state.w.copy(),
                    h_value=objective_h(spec_e, state.q),
                    al_value=al_value(spec_e, state.q, state.w, rho),
                    iterations=it,
                    k_norm=k_norm,
                )
            h_prev = h_cur
    raise RuntimeError(
        f"reference solve did not converge in {max_iters} iterations "
        f"(constraint residual {k_norm:.3e})"
    )
