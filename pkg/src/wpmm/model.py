"""Problem model: smooth-plus-composite objective with an affine coupling.

The problem is  min f(x) + R_x(x) + R_y(y)  subject to  A x = y,  over a pair
of flat real vectors (matrix variables are vectorized with explicit shape
metadata carried by their regularizer components). The constraint map is
K q = A x - y for q = (x, y); this module provides K and its adjoint, the
augmented Lagrangian and its smooth part, their gradients, and the smoothness
and curvature constants the solver's step-size formulas consume.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .linalg import operator_norm_bound

__all__ = [
    "INDICATOR_RTOL",
    "indicator_tol",
    "LinearMap",
    "SmoothTerm",
    "PrimalPoint",
    "ProblemSpec",
    "k_apply",
    "k_adjoint",
    "al_value",
    "smooth_value",
    "smooth_grad",
    "beta_S",
    "alpha_S_strongly_convex",
    "objective_h",
    "objective_h_logged",
]

# A point counts as inside an indicator set when its distance to the set is
# at most INDICATOR_RTOL * (1 + ||point||); convex-combination steps produce
# iterates that drift from exact membership at roundoff level.
INDICATOR_RTOL = 1e-9


def indicator_tol(v):
    return INDICATOR_RTOL * (1.0 + float(np.linalg.norm(v)))


@dataclass
class LinearMap:
    """Linear operator with its adjoint and a certified upper bound on its norm.

    ``norm_bound`` must satisfy norm_bound >= ||A||; step-size formulas rely
    on it being an upper bound, never an estimate from below.
    """

    apply: Callable[[np.ndarray], np.ndarray]
    adjoint: Callable[[np.ndarray], np.ndarray]
    dim_in: int
    dim_out: int
    norm_bound: float

    @classmethod
    def identity(cls, dim):
        return cls(lambda v: v, lambda w: w, dim, dim, 1.0)

    @classmethod
    def zero(cls, dim_in, dim_out):
        z_out = np.zeros(dim_out)
        z_in = np.zeros(dim_in)
        return cls(lambda v: z_out.copy(), lambda w: z_in.copy(), dim_in, dim_out, 0.0)

    @classmethod
    def diagonal(cls, diag):
        diag = np.asarray(diag, dtype=float)
        n = diag.size
        bound = float(np.abs(diag).max()) if n else 0.0
        return cls(lambda v: diag * v, lambda w: diag * w, n, n, bound)

    @classmethod
    def from_dense(cls, entries):
        arr = np.asarray(entries, dtype=float)
        if arr.ndim != 2:
            raise ValueError("dense map needs a 2-D array")
        bound = float(np.linalg.norm(arr, 2)) * (1.0 + 1e-10) if arr.size else 0.0
        return cls(
            lambda v, a=arr: a @ v,
            lambda w, a=arr: a.T @ w,
            arr.shape[1],
            arr.shape[0],
            bound,
        )

    @classmethod
    def stacked_identity(cls, dim, copies):
        """Maps v -> (v, v, ..., v); adjoint sums the blocks."""
        if copies < 1:
            raise ValueError("copies must be >= 1")

        def apply(v):
            return np.tile(v, copies)

        def adjoint(w):
            return w.reshape(copies, dim).sum(axis=0)

        return cls(apply, adjoint, dim, dim * copies, float(np.sqrt(copies)))

    @classmethod
    def from_callables(cls, apply, adjoint, dim_in, dim_out, norm_bound=None,
                       iters=100, seed=0):
        """Wrap callables; estimates the norm bound by power iteration when
        it is not supplied."""
        if norm_bound is None:
            probe = cls(apply, adjoint, dim_in, dim_out, np.inf)
            norm_bound = operator_norm_bound(probe, iters=iters, seed=seed)
        return cls(apply, adjoint, dim_in, dim_out, float(norm_bound))


@dataclass
class SmoothTerm:
    """Convex smooth part f with value/gradient access and its constants.

    beta is a smoothness (gradient Lipschitz) constant, alpha an optional
    strong-convexity constant. ``is_quadratic`` marks f as an (at most)
    quadratic polynomial, which lets the line search minimize in closed form.
    """

    value: Callable[[np.ndarray], float]
    gradient: Callable[[np.ndarray], np.ndarray]
    beta: float
    alpha: Optional[float] = None
    is_quadratic: bool = False

    @classmethod
    def half_sq_distance(cls, target):
        """f(x) = 0.5 ||x - target||^2; alpha = beta = 1."""
        target = np.asarray(target, dtype=float).ravel()

        def value(x, t=target):
            d = x - t
            return 0.5 * float(d @ d)

        return cls(value, lambda x, t=target: x - t, beta=1.0, alpha=1.0,
                   is_quadratic=True)

    @classmethod
    def linear(cls, g, beta_floor=1e-6):
        """f(x) = <g, x>. beta has no meaning for a linear map; a small
        positive floor keeps the smoothness-based formulas finite."""
        g = np.asarray(g, dtype=float).ravel()
        return cls(lambda x: float(g @ x), lambda x: g.copy(), beta=beta_floor,
                   alpha=None, is_quadratic=True)

    @classmethod
    def quadratic(cls, Q, b=None, c0=0.0):
        """f(x) = 0.5 x^T Q x + <b, x> + c0 for symmetric PSD Q."""
        Q = np.asarray(Q, dtype=float)
        n = Q.shape[0]
        b = np.zeros(n) if b is None else np.asarray(b, dtype=float).ravel()
        Qs = 0.5 * (Q + Q.T)
        evals = np.linalg.eigvalsh(Qs)
        if evals[0] < -1e-10 * max(1.0, abs(evals[-1])):
            raise ValueError("quadratic form is not positive semidefinite")
        beta = max(float(evals[-1]) * (1 + 1e-12), 1e-12)
        alpha = float(evals[0]) if evals[0] > 1e-12 * max(1.0, evals[-1]) else None

        def value(x):
            return 0.5 * float(x @ (Qs @ x)) + float(b @ x) + c0

        return cls(value, lambda x: Qs @ x + b, beta=beta, alpha=alpha,
                   is_quadratic=True)


@dataclass
class PrimalPoint:
    """The primal pair q = (x, y) as flat float arrays."""

    x: np.ndarray
    y: np.ndarray

    def copy(self):
        return PrimalPoint(self.x.copy(), self.y.copy())

    def blend(self, other, eta):
        """(1 - eta) * self + eta * other."""
        return PrimalPoint(
            (1.0 - eta) * self.x + eta * other.x,
            (1.0 - eta) * self.y + eta * other.y,
        )

    def norm(self):
        return float(np.sqrt(self.x @ self.x + self.y @ self.y))


@dataclass
class ProblemSpec:
    """The full problem: smooth term, constraint map, two oracle blocks.

    ``pqg_alpha`` is the primal-quadratic-gap curvature parameter. When it is
    absent and f carries a strong-convexity constant, the solver derives it
    from alpha_S_strongly_convex at its penalty value. For polytope problems
    the underlying Hoffman-type constant is not computable in general, so it
    must be supplied by the user here (or step sizes must be fixed).
    """

    f: SmoothTerm
    A: LinearMap
    rx: "object"
    ry: "object"
    pqg_alpha: Optional[float] = None

    def __post_init__(self):
        if self.rx.dim != self.A.dim_in:
            raise ValueError(
                f"x-block dimension {self.rx.dim} != A.dim_in {self.A.dim_in}"
            )
        if self.ry.dim != self.A.dim_out:
            raise ValueError(
                f"y-block dimension {self.ry.dim} != A.dim_out {self.A.dim_out}"
            )
        if self.pqg_alpha is not None and self.pqg_alpha <= 0:
            raise ValueError("pqg_alpha must be positive when supplied")


def _check_point(spec, q):
    if q.x.shape != (spec.A.dim_in,) or q.y.shape != (spec.A.dim_out,):
        raise ValueError(
            f"point shapes {q.x.shape}/{q.y.shape} do not match problem "
            f"dimensions ({spec.A.dim_in},)/({spec.A.dim_out},)"
        )


def k_apply(spec, q):
    """Constraint map K q = A x - y (zero exactly on feasible points)."""
    _check_point(spec, q)
    return spec.A.apply(q.x) - q.y


def k_adjoint(spec, w):
    """Adjoint of the constraint map: K^T w = (A^T w, -w)."""
    w = np.asarray(w, dtype=float)
    if w.shape != (spec.A.dim_out,):
        raise ValueError(f"multiplier shape {w.shape} != ({spec.A.dim_out},)")
    return spec.A.adjoint(w), -w


def smooth_value(spec, q, w, rho):
    """Smooth part of the augmented Lagrangian:
    f(x) + <w, Kq> + (rho/2) ||Kq||^2. Always finite for finite inputs."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    kq = k_apply(spec, q)
    return float(spec.f.value(q.x)) + float(w @ kq) + 0.5 * rho * float(kq @ kq)


def smooth_grad(spec, q, w, rho):
    """Gradient of the smooth part w.r.t. q, as an (x-part, y-part) pair:
    (grad f(x) + A^T (w + rho Kq), -(w + rho Kq))."""
    if rho < 0:
        raise ValueError("rho must be nonnegative")
    kq = k_apply(spec, q)
    r = w + rho * kq
    return spec.f.gradient(q.x) + spec.A.adjoint(r), -r


def al_value(spec, q, w, rho):
    """Augmented Lagrangian value; +inf when an indicator regularizer is
    violated beyond its feasibility tolerance."""
    rq = spec.rx.value(q.x) + spec.ry.value(q.y)
    if not np.isfinite(rq):
        return float("inf")
    return smooth_value(spec, q, w, rho) + rq


def objective_h(spec, q):
    """Objective value h(q) = f(x) + R_x(x) + R_y(y) (extended real)."""
    rq = spec.rx.value(q.x) + spec.ry.value(q.y)
    if not np.isfinite(rq):
        return float("inf")
    return float(spec.f.value(q.x)) + rq


def objective_h_logged(spec, q):
    """Objective for logging: indicators that are violated beyond tolerance
    contribute their distance to the set instead of +inf. Returns
    ``(value, flagged)`` where flagged marks any such substitution."""
    vx, fx = spec.rx.logged_value(q.x)
    vy, fy = spec.ry.logged_value(q.y)
    return float(spec.f.value(q.x)) + vx + vy, (fx or fy)


def beta_S(beta, rho, norm_a):
    """Smoothness constant of the smooth augmented-Lagrangian part:
    beta + rho * (norm_a + 1)^2."""
    if beta <= 0:
        raise ValueError("beta must be positive")
    if rho < 0 or norm_a < 0:
        raise ValueError("rho and norm_a must be nonnegative")
    return beta + rho * (norm_a + 1.0) ** 2


def alpha_S_strongly_convex(alpha, rho, norm_a):
    """Primal-quadratic-gap parameter when f is alpha-strongly convex:
    min(alpha/2, alpha*rho / (alpha + 2*rho*norm_a^2)). Strictly positive."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if rho <= 0:
        raise ValueError("rho must be positive")
    if norm_a < 0:
        raise ValueError("norm_a must be nonnegative")
    return min(0.5 * alpha, alpha * rho / (alpha + 2.0 * rho * norm_a**2))
