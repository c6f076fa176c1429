"""Volume maximization, its dual curvature-prescription solve, and rigidity.

Primal: maximize the total hyperbolic volume over the assignment polytope
for a cone target ``k`` (a strictly concave problem on the free-variable
chart) by a log-barrier interior-point method with analytic gradients and
finite-difference Hessians.

Dual: minimize the convex C^1 energy ``sum_tet covolume - <k, l>`` over
metrics; its gradient is ``cone_angles(extended angles) - k``, so a
first-order method with gauge projection prescribes the cone angles.

The two meet through a Legendre-type identity: the dual minimum equals
twice the maximal volume, so ``min_dual_objective - 2 * max_volume``
vanishes at the solutions.  The dual minimizer is unique up to decoration
gauge, which ``rigidity_check`` probes with multiple random starts.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space

from ._kernels import (
    extended_angles_batch,
    phi_batch,
    volume2_batch,
    volume_gradient_batch,
)
from .errors import InadmissibleTarget, MaxIterations, NoInteriorStart
from .structures import (
    FeasibilityStatus,
    SLOT_COEF,
    SLOT_CONST,
    assemble,
    find_interior,
)
from .tetra import FLAT_PATTERNS
from .triangulation import (
    AngleAssignment,
    ConeTarget,
    GeneralizedMetric,
    admissibility_residual,
    gauge_project,
)

PI = math.pi


@dataclass
class PrimalReport:
    maximizer: AngleAssignment
    volume: float
    kkt_residual: float
    boundary_flags: list
    iterations: int
    objective_trace: list = field(default_factory=list, repr=False, compare=False)

    def to_json(self):
        return {
            "maximizer": self.maximizer.to_json(),
            "volume": self.volume,
            "kkt_residual": self.kkt_residual,
            "boundary_flags": list(self.boundary_flags),
            "iterations": self.iterations,
        }


@dataclass
class DualReport:
    metric: GeneralizedMetric
    residual: float
    diverged: bool
    objective: float
    iterations: int = 0
    objective_trace: list = field(default_factory=list, repr=False, compare=False)

    def to_json(self, T):
        return {
            "metric": self.metric.to_json(T),
            "residual": self.residual,
            "diverged": self.diverged,
            "objective": self.objective,
        }


@dataclass
class RigidityReport:
    n_starts: int
    pairwise_distance: float
    all_agree: bool
    seed: int
    failed_starts: list = field(default_factory=list)

    def to_json(self):
        return {
            "n_starts": self.n_starts,
            "pairwise_distance": self.pairwise_distance,
            "all_agree": self.all_agree,
            "seed": self.seed,
            "failed_starts": list(self.failed_starts),
        }


def _near_flat_flags(angles, tol=1e-6):
    flags = []
    for row in angles:
        d = min(float(np.max(np.abs(row - p))) for p in FLAT_PATTERNS)
        flags.append(d <= tol)
    return flags


def maximize_volume(T, k, tol=1e-8, max_inner=150, u0=None):
    """Log-barrier maximization of total volume over the polytope for ``k``.

    Needs a strictly interior start: ``u0`` (three free angles per
    tetrahedron) when given, otherwise the max-slack feasibility LP
    witness.  On success the KKT residual -- the max of the projected
    stationarity norm and the final barrier weight (= complementarity) --
    is at most ``tol``.
    """
    cs = assemble(T, k)
    n = T.n_tetrahedra
    if u0 is not None:
        u = np.asarray(u0, dtype=np.float64).reshape(3 * n).copy()
        if float(np.max(np.abs(cs.a_eq @ u - cs.b_eq))) > 1e-8:
            raise NoInteriorStart("u0 violates the edge equations")
        # land exactly on the equality manifold before the barrier runs
        u -= np.linalg.lstsq(cs.a_eq, cs.a_eq @ u - cs.b_eq, rcond=None)[0]
        if np.any(cs.constraint_values(u) <= 0.0):
            raise NoInteriorStart("u0 is not strictly interior")
    else:
        fr = find_interior(T, k)
        if fr.status is not FeasibilityStatus.INTERIOR_FOUND:
            raise NoInteriorStart(f"feasibility status: {fr.status.value}")
        u = fr.witness.values[:, :3].ravel().copy()

    Z = null_space(cs.a_eq)
    if Z.shape[1] == 0:
        ang = cs.expand(u)
        vol = 0.5 * float(volume2_batch(ang.values).sum())
        return PrimalReport(ang, vol, 0.0, _near_flat_flags(ang.values), 0, [vol])

    ones3 = np.ones((3, 3))

    def angles_of(U):
        return U @ SLOT_COEF.T + SLOT_CONST

    def f_and_grad(u_vec):
        U = u_vec.reshape(n, 3)
        A = angles_of(U)
        val = 0.5 * float(volume2_batch(A).sum())
        grad = volume_gradient_batch(A).ravel()
        return val, grad

    def cons_and_slack(u_vec):
        U = u_vec.reshape(n, 3)
        slack = PI - U.sum(axis=1)
        return np.concatenate([u_vec, slack]), slack

    def barrier_grad(u_vec, slack):
        return 1.0 / u_vec - np.repeat(1.0 / slack, 3)

    def f_hessian(u_vec, slack):
        # block-diagonal FD Hessian of the volume in the free chart,
        # with a step that keeps the stencil strictly feasible
        U = u_vec.reshape(n, 3)
        h = np.minimum(1e-5, 0.2 * np.minimum(U.min(axis=1), slack))
        H = np.zeros((3 * n, 3 * n))
        for d in range(3):
            Up = U.copy()
            Um = U.copy()
            Up[:, d] += h
            Um[:, d] -= h
            col = (
                volume_gradient_batch(angles_of(Up))
                - volume_gradient_batch(angles_of(Um))
            ) / (2.0 * h)[:, None]
            for t in range(n):
                H[3 * t : 3 * t + 3, 3 * t + d] = col[t]
        return 0.5 * (H + H.T)

    def barrier_hessian(u_vec, slack):
        H = np.diag(-1.0 / u_vec**2)
        for t in range(n):
            H[3 * t : 3 * t + 3, 3 * t : 3 * t + 3] -= ones3 / slack[t] ** 2
        return H

    mu_final = max(tol / 10.0, 1e-13)
    mus = []
    m = 1e-1
    while m > mu_final * 1.0000001:
        mus.append(m)
        m *= 0.1
    mus.append(mu_final)

    iterations = 0
    trace = []
    cvals, slack = cons_and_slack(u)
    for mu in mus:
        inner_tol = max(0.1 * mu, 1e-13)
        for _ in range(max_inner):
            fval, gf = f_and_grad(u)
            gB = barrier_grad(u, slack)
            g_full = gf + mu * gB
            g_y = Z.T @ g_full
            if np.max(np.abs(g_y)) <= inner_tol:
                break
            H = f_hessian(u, slack) + mu * barrier_hessian(u, slack)
            H_y = Z.T @ H @ Z
            dy = None
            try:
                dy = np.linalg.solve(H_y, -g_y)
            except np.linalg.LinAlgError:
                dy = None
            if dy is None or not np.all(np.isfinite(dy)) or float(g_y @ dy) <= 0.0:
                dy = g_y  # projected steepest ascent fallback
            du = Z @ dy
            dcons = np.concatenate([du, -du.reshape(n, 3).sum(axis=1)])
            shrink = dcons < 0.0
            a_max = 1.0
            if np.any(shrink):
                a_max = min(
                    1.0, float(np.min(0.995 * cvals[shrink] / -dcons[shrink]))
                )
            a = a_max
            slope = float(g_y @ dy)
            F0 = fval + mu * float(np.sum(np.log(cvals)))
            accepted = False
            for _ls in range(60):
                u_try = u + a * du
                c_try, s_try = cons_and_slack(u_try)
                if np.all(c_try > 0.0):
                    f_try = 0.5 * float(
                        volume2_batch(angles_of(u_try.reshape(n, 3))).sum()
                    )
                    F_try = f_try + mu * float(np.sum(np.log(c_try)))
                    if F_try >= F0 + 1e-4 * a * slope:
                        u, cvals, slack = u_try, c_try, s_try
                        accepted = True
                        break
                a *= 0.5
            iterations += 1
            if not accepted:
                break
        fval, _ = f_and_grad(u)
        trace.append(fval)

    fval, gf = f_and_grad(u)
    g_y = Z.T @ (gf + mu_final * barrier_grad(u, slack))
    kkt = max(float(np.max(np.abs(g_y))), mu_final)
    if kkt > tol:
        raise MaxIterations(
            f"barrier maximization stalled at residual {kkt:.3e}", residual=kkt
        )
    ang = cs.expand(u)
    return PrimalReport(
        ang,
        fval,
        kkt,
        _near_flat_flags(ang.values),
        iterations,
        trace,
    )


def solve_cone_angles(T, k, tol=1e-8, x0=None, max_iter=50000):
    """Prescribe cone angles by minimizing the convex metric energy.

    Barzilai-Borwein steps with Armijo backtracking and gauge projection
    each iteration; succeeds when the cone angles of the iterate match
    ``k`` to ``tol`` in max norm.  A run that escapes the trust region
    without its gradient shrinking is flagged diverged, never reported as
    a solution.
    """
    k_vals = k.values if isinstance(k, ConeTarget) else np.asarray(k, dtype=np.float64)
    resid = admissibility_residual(T, k_vals)
    if resid > 1e-9 * max(1.0, float(np.max(np.abs(k_vals)))):
        raise InadmissibleTarget(
            f"cone target violates the counting identity by {resid:.3e}"
        )
    P = T.gauge_projector
    slot_class = T.slot_class
    n_edges = T.n_edge_classes

    def evaluate(x):
        L = np.ascontiguousarray(x[slot_class])
        A = extended_angles_batch(L)
        obj = float(volume2_batch(A).sum() + np.sum(A * L)) - float(k_vals @ x)
        cone = np.bincount(
            slot_class.ravel(), weights=A.ravel(), minlength=n_edges
        )
        g_raw = cone - k_vals
        return obj, P @ g_raw, g_raw

    def newton_polish(x, obj, g, g_raw, rounds=6):
        # terminal refinement in the smooth basin: Newton on the analytic
        # gradient map, with an FD Jacobian and gradient-norm backtracking
        for _ in range(rounds):
            res = float(np.max(np.abs(g_raw)))
            if res <= tol:
                break
            # keep the Jacobian stencil on one side of the degeneration
            # walls, whose distance is roughly the cosine-extension margin
            margin = float(
                np.min(1.0 - np.abs(phi_batch(np.ascontiguousarray(x[slot_class]))))
            )
            h = min(1e-6, max(0.02 * abs(margin), 1e-9))
            J = np.empty((n_edges, n_edges))
            for d in range(n_edges):
                e = np.zeros(n_edges)
                e[d] = h
                _, gp, _ = evaluate(x + e)
                _, gm, _ = evaluate(x - e)
                J[:, d] = (gp - gm) / (2.0 * h)
            dx = P @ np.linalg.lstsq(J, -g, rcond=1e-10)[0]
            moved = False
            for _bt in range(25):
                obj_t, g_t, g_raw_t = evaluate(x + dx)
                if (
                    float(np.max(np.abs(g_raw_t))) < res
                    and obj_t <= obj + 1e-12 * (1.0 + abs(obj))
                ):
                    x, obj, g, g_raw = x + dx, obj_t, g_t, g_raw_t
                    moved = True
                    break
                dx *= 0.5
            if not moved:
                break
        return x, obj, g, g_raw

    if x0 is None:
        x = np.zeros(n_edges)
    else:
        x0 = np.asarray(x0, dtype=np.float64)
        if x0.shape != (n_edges,) or not np.all(np.isfinite(x0)):
            raise ValueError("x0 must be a finite vector over the edge classes")
        x = P @ x0
    obj, g, g_raw = evaluate(x)
    step = 1e-2 / max(1.0, float(np.linalg.norm(g)))
    grad_hist = []
    trace = [obj]
    diverged = False
    polishes = 0

    it = 0
    while it < max_iter:
        res = float(np.max(np.abs(g_raw)))
        grad_hist.append(res)
        if res <= tol:
            break
        if (
            float(np.max(np.abs(x))) > 1e3
            and len(grad_hist) > 100
            and grad_hist[-1] > 0.9 * grad_hist[-101]
        ):
            diverged = True
            break
        plateau = (
            res <= 1e-4
            and len(grad_hist) > 200
            and grad_hist[-1] > 0.5 * grad_hist[-201]
        )
        if plateau and polishes < 3:
            polishes += 1
            x, obj, g, g_raw = newton_polish(x, obj, g, g_raw)
            trace.append(obj)
            it += 1
            continue
        gnorm2 = float(g @ g)
        a = step
        accepted = False
        for _ls in range(70):
            x_try = x - a * g
            obj_try, g_try, g_raw_try = evaluate(x_try)
            # near the optimum the objective decrease falls below float
            # noise while the analytic gradient is still trustworthy, so a
            # large gradient contraction also counts as acceptance
            if obj_try <= obj - 1e-4 * a * gnorm2 or (
                float(np.max(np.abs(g_raw_try))) <= 0.5 * res
            ):
                accepted = True
                break
            a *= 0.5
        if not accepted:
            if res <= 1e-4 and polishes < 3:
                polishes += 1
                x, obj, g, g_raw = newton_polish(x, obj, g, g_raw)
                trace.append(obj)
                it += 1
                if float(np.max(np.abs(g_raw))) < res:
                    continue
            raise MaxIterations(
                f"dual line search stalled at residual "
                f"{float(np.max(np.abs(g_raw))):.3e}",
                residual=float(np.max(np.abs(g_raw))),
            )
        dx = x_try - x
        dg = g_try - g
        denom = float(dx @ dg)
        step = float(dx @ dx) / denom if denom > 1e-300 else 1.0
        step = min(max(step, 1e-10), 1e4)
        x, obj, g, g_raw = x_try, obj_try, g_try, g_raw_try
        trace.append(obj)
        it += 1
    else:
        raise MaxIterations(
            f"dual solve hit the iteration cap at residual "
            f"{float(np.max(np.abs(g_raw))):.3e}",
            residual=float(np.max(np.abs(g_raw))),
        )

    metric = gauge_project(T, x)
    return DualReport(
        metric,
        float(np.max(np.abs(g_raw))),
        diverged,
        obj,
        it,
        trace,
    )


def duality_gap(T, k, tol=1e-8):
    """Difference (min dual objective) - 2 * (max volume).

    At the optimum the dual energy equals twice the maximal volume, so the
    raw signed difference certifies the conjugacy of the two problems.
    """
    primal = maximize_volume(T, k, tol=tol)
    dual = solve_cone_angles(T, k, tol=tol)
    return dual.objective - 2.0 * primal.volume


def rigidity_check(T, k, n_starts=5, tol=1e-6, seed=0):
    """Solve the dual from several random starts and compare the results.

    The gauge-projected solutions must coincide (the metric is determined
    by its curvature up to decorations); ``all_agree`` records whether the
    max pairwise distance stays within ``tol``.
    """
    if n_starts < 2:
        raise ValueError("rigidity check needs at least two starts")
    rng = np.random.default_rng(seed)
    solutions = []
    failed = []
    last_error = None
    for s in range(n_starts):
        x0 = T.gauge_projector @ rng.uniform(-1.0, 1.0, T.n_edge_classes)
        try:
            rep = solve_cone_angles(T, k, tol=tol * 1e-2, x0=x0)
        except MaxIterations as exc:
            failed.append(s)
            last_error = exc
            continue
        if rep.diverged:
            failed.append(s)
            continue
        solutions.append(rep.metric.values)
    if len(solutions) < 2:
        if last_error is not None:
            raise last_error
        raise MaxIterations("fewer than two rigidity starts converged")
    dist = 0.0
    for i in range(len(solutions)):
        for j in range(i + 1, len(solutions)):
            dist = max(dist, float(np.max(np.abs(solutions[i] - solutions[j]))))
    return RigidityReport(n_starts, dist, dist <= tol, seed, failed)
