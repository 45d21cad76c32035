"""Desk-scale certificate suites: oracle contract audits, linear decay of the
augmented-Lagrangian gap, and the ergodic O(1/T) bounds, each checked on
instances with independently computed reference optima.
"""

from __future__ import annotations

from itertools import product

import numpy as np

from .harness import build_box_toy, reference_solution
from .model import PrimalPoint, alpha_S_strongly_convex, beta_S, k_apply, objective_h
from .oracles import (
    PolytopeState,
    hypercube_lmo,
    phi_value,
    scaled_simplex_lmo,
    wpo_nuclear_ball,
    wpo_nuclear_reg,
    wpo_polytope,
    wpo_spectrahedron,
)
from .linalg import project_l1_ball, project_simplex
from .solver import (
    Certificate,
    SolverConfig,
    check_linear_decay,
    check_obj_feas_split,
    ergodic_bound,
    max_dual_step,
    run,
    theoretical_eta,
)

__all__ = ["suite_oracles", "suite_decay", "suite_ergodic", "run_suites",
           "SUITES"]


# ---------------------------------------------------------------------------
# oracle audits


def _rank_targeted_instance(rng, m, n, kind):
    """Random matrix plus a parameter placing the full-prox optimum at a
    known rank j; returns (center, p, c, param, j)."""
    center = rng.standard_normal((m, n))
    p = rng.standard_normal((m, n))
    if kind == "spectrahedron":
        center = 0.5 * (center + center.T)
        p = 0.5 * (p + p.T)
    c = 10 ** rng.uniform(-0.5, 0.5)
    M = center - p / c
    if kind == "spectrahedron":
        vals = np.sort(np.linalg.eigvalsh(0.5 * (M + M.T)))[::-1]
    else:
        vals = np.linalg.svd(M, compute_uv=False)
    j = int(rng.integers(1, 5))
    theta = 0.5 * (vals[j - 1] + vals[j])  # rank-j surviving threshold
    if kind == "nuclear_reg":
        param = theta * c  # nu so that nu/c = theta
    else:
        # radius making the l1/simplex projection of the spectrum equal the
        # soft threshold at theta, hence supported on exactly j values
        param = float(np.maximum(vals[:j] - theta, 0.0).sum())
    return center, p, c, param, j


def _full_prox(kind, center, p, c, param):
    M = center - p / c
    if kind == "nuclear_reg":
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
        kept = np.maximum(s - param / c, 0.0)
        return (U * kept) @ Vt, param * kept.sum()
    if kind == "nuclear_ball":
        U, s, Vt = np.linalg.svd(M, full_matrices=False)
        sig = project_l1_ball(s, param)
        return (U * sig) @ Vt, 0.0
    lam, U = np.linalg.eigh(0.5 * (M + M.T))
    w = project_simplex(lam, param)
    return (U * w) @ U.T, 0.0


def _oracle_output(kind, center, p, c, param, k):
    if kind == "nuclear_reg":
        out = wpo_nuclear_reg(center, p, c, param, k)
        return out, param * np.linalg.svd(out, compute_uv=False).sum()
    if kind == "nuclear_ball":
        return wpo_nuclear_ball(center, p, c, param, k), 0.0
    return wpo_spectrahedron(center, p, c, param, k), 0.0


def matrix_oracle_audit(kind, trials=30, shape=(12, 10), seed=0,
                        fro_tol=1e-6, phi_tol=1e-8):
    """Rank-k oracle output vs the full-decomposition prox on instances whose
    prox optimum has known rank <= k."""
    rng = np.random.default_rng(seed)
    m, n = shape if kind != "spectrahedron" else (max(shape), max(shape))
    worst_fro, worst_phi = 0.0, -np.inf
    for _ in range(trials):
        center, p, c, param, j = _rank_targeted_instance(rng, m, n, kind)
        full, full_reg = _full_prox(kind, center, p, c, param)
        out, out_reg = _oracle_output(kind, center, p, c, param, j)
        scale = max(1.0, float(np.linalg.norm(full)))
        worst_fro = max(worst_fro, float(np.linalg.norm(out - full)) / scale)
        phi_out = phi_value(out_reg, out.ravel(), p.ravel(), center.ravel(), c)
        phi_full = phi_value(full_reg, full.ravel(), p.ravel(), center.ravel(), c)
        worst_phi = max(worst_phi, phi_out - phi_full)
    passed = worst_fro <= fro_tol and worst_phi <= phi_tol
    return Certificate(
        f"oracle_vs_prox[{kind}]", passed,
        details=f"worst Frobenius gap {worst_fro:.2e}, worst Phi gap {worst_phi:.2e}",
        data={"worst_fro": worst_fro, "worst_phi": worst_phi, "trials": trials},
    )


def polytope_audit(kind="hypercube", trials=25, seed=0, lam_cap=10.0):
    """Oracle condition on an enumerable polytope: Phi_1 at the output must
    not exceed Phi_lam at any vertex for some finite lam <= lam_cap; the
    smallest sufficient lam is reported."""
    rng = np.random.default_rng(seed)
    if kind == "hypercube":
        vertices = [np.array(v, dtype=float) for v in product([0.0, 1.0], repeat=3)]
        lmo = hypercube_lmo(0.0, 1.0)
        dim = 3
    elif kind == "simplex":
        vertices = [np.eye(4)[i] for i in range(4)]
        lmo = scaled_simplex_lmo(1.0, 4)
        dim = 4
    else:
        raise ValueError(f"unknown polytope kind {kind!r}")

    lam_measured = 1.0
    for _ in range(trials):
        nsup = int(rng.integers(1, min(3, len(vertices)) + 1))
        idx = rng.choice(len(vertices), size=nsup, replace=False)
        wts = rng.dirichlet(np.ones(nsup))
        support = [vertices[i].copy() for i in idx]
        center = sum(w * v for w, v in zip(wts, support))
        state = PolytopeState(support, wts)
        p = rng.standard_normal(dim)
        c = 10 ** rng.uniform(-1.5, 1.5)
        v, _ = wpo_polytope(state, p, center, c, lmo)
        phi1 = phi_value(0.0, v, p, center, c)
        for u in vertices:
            d2 = float((u - center) @ (u - center))
            lin = float(u @ p)
            if d2 < 1e-14:
                if phi1 > lin + 1e-10:
                    lam_measured = np.inf
            else:
                lam_measured = max(lam_measured, (phi1 - lin) / (0.5 * c * d2))
    passed = lam_measured <= lam_cap
    return Certificate(
        f"polytope_wpo[{kind}]", passed,
        details=f"measured lam {lam_measured:.4f} (cap {lam_cap})",
        data={"lam_measured": lam_measured, "trials": trials},
    )


def suite_oracles(seed=0):
    certs = [
        matrix_oracle_audit("nuclear_reg", seed=seed),
        matrix_oracle_audit("nuclear_ball", seed=seed + 1),
        matrix_oracle_audit("spectrahedron", seed=seed + 2),
        polytope_audit("hypercube", seed=seed + 3),
        polytope_audit("simplex", seed=seed + 4),
    ]
    return certs


# ---------------------------------------------------------------------------
# decay and ergodic suites on the strongly convex toy


def _toy_setup(rho=1.0, iters=300, ref_tol=1e-10):
    spec, q0, w0 = build_box_toy([1.5, 0.7])
    norm_a = spec.A.norm_bound
    a_s = alpha_S_strongly_convex(spec.f.alpha, rho, norm_a)
    b_s = beta_S(spec.f.beta, rho, norm_a)
    mu = max_dual_step(a_s, b_s, 1.0, norm_a)
    eta = theoretical_eta(a_s, b_s, 1.0, mu, norm_a)
    ref = reference_solution(spec, ref_tol, q0=q0, w0=w0, rho=rho)
    config = SolverConfig(rho=rho, mu=mu, iters=iters,
                          step_policy="theoretical", keep_iterates=True)
    log = run(spec, q0, w0, config)
    return spec, q0, ref, log, dict(rho=rho, mu=mu, eta=eta, a_s=a_s,
                                    b_s=b_s, norm_a=norm_a)


def suite_decay(seed=0, iters=300):
    spec, q0, ref, log, c = _toy_setup(iters=iters)
    cert = check_linear_decay([r.al_value for r in log.records],
                              ref.h_value, c["eta"])
    return [cert]


def suite_ergodic(seed=0, iters=300, c_dual=None):
    spec, q0, ref, log, c = _toy_setup(iters=iters)
    # honor an explicitly declared dual bound, else derive c >= 2||w*|| from
    # the reference run's converged multiplier
    if c_dual is None:
        c_dual = log.config.c_dual_bound
    cdual = (float(c_dual) if c_dual is not None
             else 2.0 * float(np.linalg.norm(ref.w)) + 0.1)
    d1 = log.records[0].al_value - ref.h_value
    bound = ergodic_bound(cdual, 0.0, d1, spec.f.beta, c["rho"], c["mu"],
                          c["norm_a"], c["a_s"])

    worst_h, worst_k = -np.inf, -np.inf
    rs_x = np.zeros_like(q0.x)
    rs_y = np.zeros_like(q0.y)
    for i, q in enumerate(log.iterates, start=1):
        rs_x += q.x
        rs_y += q.y
        qbar = PrimalPoint(rs_x / i, rs_y / i)
        h_gap = objective_h(spec, qbar) - ref.h_value
        k_norm = float(np.linalg.norm(k_apply(spec, qbar)))
        worst_h = max(worst_h, h_gap - bound / i)
        worst_k = max(worst_k, k_norm - 2.0 * bound / (cdual * i))
    passed = worst_h <= 1e-8 and worst_k <= 1e-8
    ergodic_cert = Certificate(
        "ergodic_rate", passed,
        details=(f"worst objective slack {worst_h:.2e}, worst feasibility "
                 f"slack {worst_k:.2e} over T=1..{len(log.iterates)}"),
        data={"bound": bound, "c": cdual, "d1": d1,
              "worst_h_slack": worst_h, "worst_k_slack": worst_k},
    )

    # objective/feasibility split at the final ergodic point, with the
    # antecedent measured from the run itself
    qbar = PrimalPoint(rs_x / len(log.iterates), rs_y / len(log.iterates))
    h_gap = objective_h(spec, qbar) - ref.h_value
    k_norm = float(np.linalg.norm(k_apply(spec, qbar)))
    delta = max(h_gap + cdual * k_norm + 0.5 * c["rho"] * k_norm**2, 0.0)
    split_cert = check_obj_feas_split(h_gap, cdual, c["rho"], k_norm, delta)
    return [ergodic_cert, split_cert]


SUITES = {
    "oracles": suite_oracles,
    "decay": suite_decay,
    "ergodic": suite_ergodic,
}


def run_suites(name, seed=0):
    """Run one suite or all of them; returns (all_passed, certificates)."""
    if name == "all":
        names = list(SUITES)
    elif name in SUITES:
        names = [name]
    else:
        raise ValueError(f"unknown suite {name!r}; pick from "
                         f"{sorted(SUITES)} or 'all'")
    certs = []
    for n in names:
        certs.extend(SUITES[n](seed=seed))
    return all(c.passed for c in certs), certs
