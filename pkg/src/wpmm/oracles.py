"""Weak proximal oracle constructions.

Every regularizer block is a WpoComponent: given a linearization vector p, a
center and a step coefficient c, it returns a candidate v aiming at

    Phi_1(v) = R(v) + <v, p> + (c/2) ||v - center||^2.

An exact prox minimizes Phi_1 (declared parameter lam = 1); the low-rank
matrix oracles reach the same minimizer whenever the minimizer's rank is at
most their budget k; the polytope oracle trades exactness for a single LMO
call plus a small simplex QP, with a geometry-dependent lam.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .model import PrimalPoint, indicator_tol, k_apply

__all__ = [
    "OracleError",
    "WpoComponent",
    "ZeroReg",
    "L1BallIndicator",
    "SimplexIndicator",
    "BoxIndicator",
    "DiagOnesIndicator",
    "NuclearNormReg",
    "NuclearBallIndicator",
    "SpectrahedronIndicator",
    "PolytopeState",
    "PolytopeIndicator",
    "ProductComponent",
    "p_vector_x",
    "p_vector_y",
    "prox_exact",
    "wpo_nuclear_reg",
    "wpo_nuclear_ball",
    "wpo_spectrahedron",
    "simplex_qp",
    "wpo_polytope",
    "wpo_compose",
    "prox_diag_ones",
    "beta_hat",
    "phi_value",
    "hypercube_lmo",
    "scaled_simplex_lmo",
]


class OracleError(RuntimeError):
    """An oracle could not produce a candidate block."""


# ---------------------------------------------------------------------------
# linearization vectors and shared helpers


def p_vector_x(spec, q, w, mu, rho):
    """Linearization vector fed to the x-block oracle:
    grad_x S(q, w) + 2*mu*A^T(Kq) = grad f(x) + A^T(w + (rho + 2 mu) Kq)."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    kq = k_apply(spec, q)
    return spec.f.gradient(q.x) + spec.A.adjoint(w + (rho + 2.0 * mu) * kq)


def p_vector_y(spec, q, w, mu, rho):
    """Linearization vector fed to the y-block oracle:
    grad_y S(q, w) - 2*mu*Kq = -(w + (rho + 2 mu) Kq)."""
    if mu <= 0:
        raise ValueError("mu must be positive")
    return -(w + (rho + 2.0 * mu) * k_apply(spec, q))


def beta_hat(beta_s, mu, norm_a):
    """Oracle curvature coefficient beta_s + 2*mu*(norm_a + 1)^2.

    The (norm_a + 1)^2 factor is the cheap upper bound on the squared norm of
    the constraint map; using it keeps every step-size formula conservative.
    """
    if mu < 0:
        raise ValueError("mu must be nonnegative")
    out = beta_s + 2.0 * mu * (norm_a + 1.0) ** 2
    assert out >= beta_s
    return out


def phi_value(reg_value, v, p, center, c, lam=1.0):
    """Prox-style objective R(v) + <v, p> + lam*(c/2)*||v - center||^2,
    given the regularizer value at v."""
    d = v - center
    return reg_value + float(v @ p) + 0.5 * lam * c * float(d @ d)


def prox_exact(component, center, p, c):
    """Exact minimizer of Phi_1 for a proximal-friendly regularizer:
    prox_{R/c}(center - p/c). Declared lam = 1."""
    if c <= 0:
        raise ValueError("step coefficient must be positive")
    prox = getattr(component, "prox", None)
    if prox is None:
        raise OracleError(
            f"{type(component).__name__} has no exact prox routine"
        )
    return prox(center - p / c, c)


# ---------------------------------------------------------------------------
# component base class


class WpoComponent:
    """One regularizer block together with its weak proximal oracle.

    Attributes
    ----------
    dim : flat dimension of the block.
    lam : declared oracle parameter (>= 1; 1 means exact-prox quality).
    is_indicator : True when R is a set indicator (value 0 / +inf).
    constant_on_segments : True when R is constant along segments inside its
        domain (indicators and the zero regularizer); required by line search.
    """

    lam = 1.0
    is_indicator = False
    constant_on_segments = False

    def __init__(self, dim):
        self.dim = int(dim)

    def compute(self, center, p, coeff):
        """Return a candidate block for the objective Phi_1 at this center."""
        raise NotImplementedError

    def value(self, v):
        """Regularizer value at v (extended real; indicator tolerance applies)."""
        raise NotImplementedError

    def distance(self, v):
        """Euclidean distance from v to the regularizer's domain."""
        return 0.0

    def logged_value(self, v):
        """(value, flagged) for logging: a violated indicator contributes its
        distance to the set instead of +inf, with flagged = True."""
        if self.is_indicator:
            dist = self.distance(v)
            if dist <= indicator_tol(v):
                return 0.0, False
            return dist, True
        return self.value(v), False

    def commit(self, eta):
        """Hook called after the solver commits a primal step of size eta."""

    def for_run(self, block0):
        """Per-run instance; stateful components return a fresh copy."""
        return self

    def exact(self):
        """Exact-prox equivalent (full decompositions); raises if none exists."""
        raise OracleError(f"{type(self).__name__} has no exact-prox equivalent")


class _IndicatorComponent(WpoComponent):
    """Indicator of a set with an exactly computable projection."""

    is_indicator = True
    constant_on_segments = True

    def project(self, v):
        raise NotImplementedError

    def prox(self, point, scale):
        return self.project(point)

    def compute(self, center, p, coeff):
        return prox_exact(self, center, p, coeff)

    def distance(self, v):
        return float(np.linalg.norm(v - self.project(v)))

    def value(self, v):
        if self.distance(v) <= indicator_tol(v):
            return 0.0
        return float("inf")

    def exact(self):
        return self


class ZeroReg(WpoComponent):
    """R = 0: the prox is the identity on the shifted center."""

    constant_on_segments = True

    def compute(self, center, p, coeff):
        return prox_exact(self, center, p, coeff)

    def prox(self, point, scale):
        return np.asarray(point, dtype=float)

    def value(self, v):
        return 0.0

    def exact(self):
        return self


class L1BallIndicator(_IndicatorComponent):
    def __init__(self, dim, radius):
        super().__init__(dim)
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)

    def project(self, v):
        return linalg.project_l1_ball(v, self.radius)


class SimplexIndicator(_IndicatorComponent):
    def __init__(self, dim, radius):
        super().__init__(dim)
        if radius <= 0:
            raise ValueError("radius must be positive")
        self.radius = float(radius)

    def project(self, v):
        return linalg.project_simplex(v, self.radius)


class BoxIndicator(_IndicatorComponent):
    def __init__(self, dim, lo, hi):
        super().__init__(dim)
        self.lo = np.broadcast_to(np.asarray(lo, dtype=float), (dim,)).copy()
        self.hi = np.broadcast_to(np.asarray(hi, dtype=float), (dim,)).copy()
        if np.any(self.lo > self.hi):
            raise ValueError("box bounds must satisfy lo <= hi")

    def project(self, v):
        return np.clip(v, self.lo, self.hi)


class DiagOnesIndicator(_IndicatorComponent):
    """Indicator of the affine set of square matrices with unit diagonal."""

    def __init__(self, n):
        super().__init__(n * n)
        self.n = int(n)

    def project(self, v):
        return prox_diag_ones(v.reshape(self.n, self.n)).ravel()

    def distance(self, v):
        d = np.diag(v.reshape(self.n, self.n)) - 1.0
        return float(np.linalg.norm(d))


# ---------------------------------------------------------------------------
# matrix oracles (rank-truncated decompositions)


def _check_square_symmetric(M, name):
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got {M.shape}")
    scale = max(1.0, float(np.abs(M).max()))
    if float(np.abs(M - M.T).max()) > 1e-10 * scale:
        raise ValueError(f"{name} is asymmetric beyond tolerance")


def wpo_nuclear_reg(center, p, c, nu, k, tol=1e-9, seed=0):
    """Rank-k candidate for the nuclear-norm regularizer nu*||.||_nuc.

    Computes the top-k SVD of M = center - p/c and soft-thresholds the
    retained singular values by nu/c. Exact (lam = 1) whenever the true prox
    minimizer has rank <= k.
    """
    if c <= 0 or nu <= 0:
        raise ValueError("c and nu must be positive")
    M = np.asarray(center, dtype=float) - np.asarray(p, dtype=float) / c
    fac = linalg.truncated_svd(M, k, tol, seed=seed)
    kept = np.maximum(fac.sigma - nu / c, 0.0)
    return (fac.U * kept) @ fac.V.T


def wpo_nuclear_ball(center, p, c, tau, k, tol=1e-9, seed=0):
    """Rank-k candidate for the indicator of the nuclear-norm ball of radius
    tau: top-k singular values of M = center - p/c are replaced by their l1
    projection at radius tau."""
    if c <= 0 or tau <= 0:
        raise ValueError("c and tau must be positive")
    M = np.asarray(center, dtype=float) - np.asarray(p, dtype=float) / c
    fac = linalg.truncated_svd(M, k, tol, seed=seed)
    sig = linalg.project_l1_ball(fac.sigma, tau)
    return (fac.U * sig) @ fac.V.T


def wpo_spectrahedron(center, p, c, tau, k, tol=1e-9, seed=0):
    """Rank-k candidate for the indicator of the spectrahedron
    {X PSD, tr X = tau}: top-k eigenvalues of M = center - p/c are replaced
    by their simplex projection at radius tau. Output is PSD with trace tau."""
    if c <= 0 or tau <= 0:
        raise ValueError("c and tau must be positive")
    center = np.asarray(center, dtype=float)
    p = np.asarray(p, dtype=float)
    _check_square_symmetric(center, "center")
    _check_square_symmetric(p, "p")
    M = center - p / c
    U, lam = linalg.truncated_eigh(M, k, tol, seed=seed)
    w = linalg.project_simplex(lam, tau)
    return (U * w) @ U.T


def prox_diag_ones(center):
    """Exact prox (projection) onto matrices with a diagonal of ones: copy
    the input and overwrite the diagonal. Off-diagonal entries unchanged."""
    center = np.asarray(center, dtype=float)
    if center.ndim != 2 or center.shape[0] != center.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {center.shape}")
    out = center.copy()
    np.fill_diagonal(out, 1.0)
    return out


class _MatrixComponent(WpoComponent):
    """Shared plumbing for the rank-truncated matrix oracles.

    ``dense=True`` switches the decomposition backend from the Lanczos
    kernels to full dense factorizations (used by exact-prox clones).
    """

    def __init__(self, shape, k, svd_tol=1e-9, seed=0, dense=False):
        rows, cols = shape
        super().__init__(rows * cols)
        if not 1 <= k <= min(rows, cols):
            raise ValueError(f"k={k} out of range for shape {shape}")
        self.shape = (int(rows), int(cols))
        self.k = int(k)
        self.svd_tol = float(svd_tol)
        self.seed = int(seed)
        self.dense = bool(dense)

    def _mat(self, v):
        return np.asarray(v, dtype=float).reshape(self.shape)

    def _top_svd(self, M):
        if self.dense:
            U, s, Vt = np.linalg.svd(M, full_matrices=False)
            return U[:, : self.k], s[: self.k], Vt[: self.k].T
        fac = linalg.truncated_svd(M, self.k, self.svd_tol, seed=self.seed)
        return fac.U, fac.sigma, fac.V

    def _top_eigh(self, M):
        if self.dense:
            lam, U = np.linalg.eigh(0.5 * (M + M.T))
            idx = np.argsort(lam)[::-1][: self.k]
            return U[:, idx], lam[idx]
        return linalg.truncated_eigh(M, self.k, self.svd_tol, seed=self.seed)


class NuclearNormReg(_MatrixComponent):
    """nu * ||X||_nuc with a rank-k weak proximal oracle."""

    def __init__(self, shape, nu, k, svd_tol=1e-9, seed=0, dense=False):
        super().__init__(shape, k, svd_tol, seed, dense)
        if nu <= 0:
            raise ValueError("nu must be positive")
        self.nu = float(nu)

    def compute(self, center, p, coeff):
        M = self._mat(center) - self._mat(p) / coeff
        U, s, V = self._top_svd(M)
        kept = np.maximum(s - self.nu / coeff, 0.0)
        return ((U * kept) @ V.T).ravel()

    def prox(self, point, scale):
        # full soft-thresholding; only meaningful for the dense/exact clone
        M = self._mat(point)
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
        kept = np.maximum(s - self.nu / scale, 0.0)
        return ((U * kept) @ Vt).ravel()

    def value(self, v):
        s = np.linalg.svd(self._mat(v), compute_uv=False)
        return self.nu * float(s.sum())

    def exact(self):
        return NuclearNormReg(self.shape, self.nu, min(self.shape),
                              self.svd_tol, self.seed, dense=True)


class NuclearBallIndicator(_MatrixComponent):
    """Indicator of {X : ||X||_nuc <= tau} with a rank-k oracle."""

    is_indicator = True
    constant_on_segments = True

    def __init__(self, shape, tau, k, svd_tol=1e-9, seed=0, dense=False):
        super().__init__(shape, k, svd_tol, seed, dense)
        if tau <= 0:
            raise ValueError("tau must be positive")
        self.tau = float(tau)

    def compute(self, center, p, coeff):
        M = self._mat(center) - self._mat(p) / coeff
        U, s, V = self._top_svd(M)
        sig = linalg.project_l1_ball(s, self.tau)
        return ((U * sig) @ V.T).ravel()

    def project(self, v):
        M = self._mat(v)
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
        sig = linalg.project_l1_ball(s, self.tau)
        return ((U * sig) @ Vt).ravel()

    def prox(self, point, scale):
        return self.project(point)

    def distance(self, v):
        return float(np.linalg.norm(v - self.project(v)))

    def value(self, v):
        if self.distance(v) <= indicator_tol(v):
            return 0.0
        return float("inf")

    def exact(self):
        return NuclearBallIndicator(self.shape, self.tau, min(self.shape),
                                    self.svd_tol, self.seed, dense=True)


class SpectrahedronIndicator(_MatrixComponent):
    """Indicator of {X PSD, tr X = tau} with a rank-k oracle."""

    is_indicator = True
    constant_on_segments = True

    def __init__(self, n, tau, k, svd_tol=1e-9, seed=0, dense=False):
        super().__init__((n, n), k, svd_tol, seed, dense)
        if tau <= 0:
            raise ValueError("tau must be positive")
        self.tau = float(tau)

    def compute(self, center, p, coeff):
        M = self._mat(center) - self._mat(p) / coeff
        # the prox over symmetric matrices only sees the symmetric part of
        # the shifted center; this also sheds roundoff-level asymmetry that
        # accumulates over many iterations
        M = 0.5 * (M + M.T)
        U, lam = self._top_eigh(M)
        w = linalg.project_simplex(lam, self.tau)
        return ((U * w) @ U.T).ravel()

    def project(self, v):
        M = self._mat(v)
        lam, U = np.linalg.eigh(0.5 * (M + M.T))
        w = linalg.project_simplex(lam, self.tau)
        return ((U * w) @ U.T).ravel()

    def prox(self, point, scale):
        return self.project(point)

    def distance(self, v):
        return float(np.linalg.norm(v - self.project(v)))

    def value(self, v):
        if self.distance(v) <= indicator_tol(v):
            return 0.0
        return float("inf")

    def exact(self):
        n = self.shape[0]
        return SpectrahedronIndicator(n, self.tau, n, self.svd_tol,
                                      self.seed, dense=True)


# ---------------------------------------------------------------------------
# polytope oracle: one LMO call plus a convex QP over the simplex


@dataclass
class PolytopeState:
    """Explicit convex-combination representation of a polytope point."""

    vertices: list = field(default_factory=list)
    weights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def point(self):
        M = np.column_stack(self.vertices)
        return M @ self.weights

    def copy(self):
        return PolytopeState([v.copy() for v in self.vertices],
                             np.array(self.weights, dtype=float))

    def validate(self):
        w = np.asarray(self.weights, dtype=float)
        if len(self.vertices) != w.size or w.size == 0:
            raise ValueError("state needs matching, nonempty vertices/weights")
        if w.min() < 0 or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("weights must be a point of the unit simplex")

    @classmethod
    def at_vertex(cls, vertex):
        return cls([np.asarray(vertex, dtype=float)], np.array([1.0]))


def simplex_qp(M, p, center, c, tol=1e-12, max_iters=10000, init=None):
    """Minimize <M g, p> + (c/2) ||M g - center||^2 over the unit simplex.

    Accelerated projected gradient with step 1/L for L = c*||M||^2, stopped
    when the Frank-Wolfe gap drops below ``tol * max(1, |objective|)`` or
    after ``max_iters`` iterations. Columns of M are polytope vertices.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[1] == 0:
        raise ValueError("vertex matrix must be 2-D with at least one column")
    if c <= 0:
        raise ValueError("step coefficient must be positive")
    t1 = M.shape[1]
    if t1 == 1:
        return np.array([1.0])

    Mp = M.T @ np.asarray(p, dtype=float)
    G = M.T @ M
    Mc = M.T @ np.asarray(center, dtype=float)
    cc = 0.5 * c * float(center @ center)
    L = max(c * float(np.linalg.norm(M, 2)) ** 2, 1e-30)

    def grad(g):
        return Mp + c * (G @ g - Mc)

    def objective(g):
        return float(g @ Mp) + 0.5 * c * float(g @ (G @ g)) - c * float(g @ Mc) + cc

    if init is not None:
        gamma = linalg.project_simplex(np.asarray(init, dtype=float), 1.0)
    else:
        gamma = np.full(t1, 1.0 / t1)
    prev = gamma
    tk = 1.0
    for _ in range(max_iters):
        gr = grad(gamma)
        gap = float(gr @ gamma) - float(gr.min())
        if gap <= tol * max(1.0, abs(objective(gamma))):
            break
        tk_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * tk * tk))
        mom = (tk - 1.0) / tk_next
        y = gamma + mom * (gamma - prev)
        prev = gamma
        gamma = linalg.project_simplex(y - grad(y) / L, 1.0)
        tk = tk_next
    return gamma


PRUNE_TOL = 1e-12


def wpo_polytope(state, p, center, c, lmo):
    """Polytope weak proximal oracle: one LMO call plus a simplex QP.

    ``state`` must represent ``center`` as an explicit convex combination of
    polytope vertices. The vertex returned by ``lmo(p)`` is appended, the QP
    over the enlarged support is solved, and the candidate M @ gamma* is
    returned together with a state representing it (pruned of weights below
    1e-12). The support grows by at most one vertex per call.
    """
    state.validate()
    center = np.asarray(center, dtype=float)
    rep = state.point()
    if np.linalg.norm(rep - center) > 1e-9 * (1.0 + np.linalg.norm(center)):
        raise OracleError("polytope state does not represent the center")
    try:
        z = np.asarray(lmo(p), dtype=float)
    except Exception as exc:  # noqa: BLE001 - report LMO failures uniformly
        raise OracleError(f"LMO callback failed: {exc}") from exc
    if z.shape != center.shape:
        raise OracleError(f"LMO returned shape {z.shape}, expected {center.shape}")

    vertices = [v for v in state.vertices] + [z]
    M = np.column_stack(vertices)
    init = np.append(state.weights, 0.0)
    gamma = simplex_qp(M, p, center, c, init=init)
    v = M @ gamma

    keep = gamma > PRUNE_TOL
    if not keep.any():
        keep[int(np.argmax(gamma))] = True
    kept_w = gamma[keep]
    new_state = PolytopeState(
        [vertices[i] for i in np.nonzero(keep)[0]], kept_w / kept_w.sum()
    )
    return v, new_state


class PolytopeIndicator(WpoComponent):
    """Indicator of a compact polytope accessed through an LMO callback.

    The LMO must return one vertex minimizing the given linear objective,
    breaking ties deterministically. ``lam`` is the geometry constant of the
    oracle guarantee; it is instance-dependent and must be configured -- the
    default of 1.0 is used with a warning otherwise. ``dist_fn`` optionally
    supplies the distance to the polytope for feasibility checks (without it
    the component reports distance 0, which is correct for points maintained
    as convex combinations by the solver).
    """

    is_indicator = True
    constant_on_segments = True

    def __init__(self, dim, lmo, state0, lam=None, dist_fn=None):
        super().__init__(dim)
        if lam is None:
            warnings.warn(
                "polytope oracle used without a configured lam; defaulting to "
                "1.0, which is only valid for especially well-conditioned "
                "geometries",
                stacklevel=2,
            )
            lam = 1.0
        if lam < 1:
            raise ValueError("lam must be >= 1")
        self.lam = float(lam)
        self.lmo = lmo
        state0.validate()
        self._state0 = state0.copy()
        self.state = state0.copy()
        self.dist_fn = dist_fn
        self._pending = None

    def for_run(self, block0):
        clone = PolytopeIndicator(self.dim, self.lmo, self._state0,
                                  lam=self.lam, dist_fn=self.dist_fn)
        rep = clone.state.point()
        if np.linalg.norm(rep - block0) > 1e-9 * (1.0 + np.linalg.norm(block0)):
            raise OracleError(
                "polytope initial state does not represent the starting block"
            )
        return clone

    def compute(self, center, p, coeff):
        v, new_state = wpo_polytope(self.state, p, center, coeff, self.lmo)
        self._pending = new_state
        return v

    def commit(self, eta):
        if self._pending is None:
            return
        merged = {}
        for vert, w in zip(self.state.vertices, self.state.weights):
            merged[vert.tobytes()] = [vert, (1.0 - eta) * w]
        for vert, w in zip(self._pending.vertices, self._pending.weights):
            key = vert.tobytes()
            if key in merged:
                merged[key][1] += eta * w
            else:
                merged[key] = [vert, eta * w]
        verts = [item[0] for item in merged.values()]
        weights = np.array([item[1] for item in merged.values()])
        keep = weights > PRUNE_TOL
        if not keep.any():
            keep[int(np.argmax(weights))] = True
        verts = [v for v, k in zip(verts, keep) if k]
        weights = weights[keep]
        self.state = PolytopeState(verts, weights / weights.sum())
        self._pending = None

    def distance(self, v):
        if self.dist_fn is not None:
            return float(self.dist_fn(v))
        return 0.0

    def value(self, v):
        if self.distance(v) <= indicator_tol(v):
            return 0.0
        return float("inf")


def hypercube_lmo(lo, hi):
    """LMO of the box [lo, hi]^d: picks lo where the objective is positive,
    hi elsewhere (deterministic tie-breaking toward hi)."""
    def lmo(p):
        p = np.asarray(p, dtype=float)
        return np.where(p > 0.0, lo, hi).astype(float)

    return lmo


def scaled_simplex_lmo(radius, dim):
    """LMO of {v >= 0, sum v = radius}: radius * e_i at the smallest
    objective entry, lowest index on ties."""
    def lmo(p):
        p = np.asarray(p, dtype=float)
        out = np.zeros(dim)
        out[int(np.argmin(p))] = radius
        return out

    return lmo


# ---------------------------------------------------------------------------
# block composition


def wpo_compose(vx, lx, vy, ly):
    """Combine per-block candidates into a primal point; the composed oracle
    parameter is max(lx, ly)."""
    if lx < 1 or ly < 1:
        raise ValueError("oracle parameters must be >= 1")
    return PrimalPoint(np.asarray(vx, dtype=float), np.asarray(vy, dtype=float)), max(lx, ly)


class ProductComponent(WpoComponent):
    """Cartesian product of blocks, each with its own component.

    The prox objective separates across the blocks, so the product oracle is
    the concatenation of the per-block oracles with lam = max over parts.
    """

    def __init__(self, parts):
        if not parts:
            raise ValueError("product needs at least one part")
        super().__init__(sum(p.dim for p in parts))
        self.parts = list(parts)
        offs = np.cumsum([0] + [p.dim for p in parts])
        self.slices = [slice(int(a), int(b)) for a, b in zip(offs[:-1], offs[1:])]
        self.lam = max(p.lam for p in parts)
        self.is_indicator = all(p.is_indicator for p in parts)
        self.constant_on_segments = all(p.constant_on_segments for p in parts)

    def compute(self, center, p, coeff):
        return np.concatenate(
            [part.compute(center[s], p[s], coeff)
             for part, s in zip(self.parts, self.slices)]
        )

    def value(self, v):
        return float(sum(part.value(v[s]) for part, s in zip(self.parts, self.slices)))

    def distance(self, v):
        return float(np.sqrt(sum(part.distance(v[s]) ** 2
                                 for part, s in zip(self.parts, self.slices))))

    def logged_value(self, v):
        total, flagged = 0.0, False
        for part, s in zip(self.parts, self.slices):
            val, fl = part.logged_value(v[s])
            total += val
            flagged = flagged or fl
        return total, flagged

    def commit(self, eta):
        for part in self.parts:
            part.commit(eta)

    def for_run(self, block0):
        clones = [part.for_run(block0[s]) for part, s in zip(self.parts, self.slices)]
        if all(c is p for c, p in zip(clones, self.parts)):
            return self
        return ProductComponent(clones)

    def exact(self):
        return ProductComponent([p.exact() for p in self.parts])
