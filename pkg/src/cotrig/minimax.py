"""Discretised Chebyshev (minimax) approximation by trigonometric polynomials.

The continuous problem min_T max_t |g(t) - T(t)|, optionally subject to the
sign pattern sigma_l * T^(q) >= 0 on prescribed gaps, is sampled on
Chebyshev-clustered grids and solved as a linear program.  The LP is
assembled in dual standard form, whose basis dimension is the number of
coefficients plus one regardless of grid size; the primal coefficients are
recovered from the simplex multipliers.  Grids are then refined at the
residual maxima (and, for constrained problems, densified where the sign
pattern fails) until the discrete error and a finer post-check agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .grids import FULL_PERIOD, SOLVER_GRID, GridSpec, Interval, chebyshev_points
from .signsets import SignChangeSet
from .simplex import solve_lp
from .trigpoly import TrigPoly, coeffs_from_vector, trig_basis, trig_derivative_basis


@dataclass
class MinimaxProblem:
    """Declarative description of one approximation problem."""

    degree: int
    domain: Interval | None = None
    q: int | None = None
    sign_changes: SignChangeSet | None = None
    objective_grid: GridSpec = field(default_factory=lambda: SOLVER_GRID)
    constraint_grid: GridSpec = field(default_factory=lambda: SOLVER_GRID)

    @property
    def constrained(self) -> bool:
        return self.q is not None and self.sign_changes is not None


@dataclass
class ApproxResult:
    approximant: TrigPoly
    error: float
    post_check_error: float
    constraint_violation: float | None
    iterations: int
    duality_gap: float
    alternation_count: int
    rounds: list = field(default_factory=list)
    extra_coefficients: np.ndarray | None = None

    def to_dict(self) -> dict:
        return {
            "approximant": self.approximant.to_dict(),
            "error": self.error,
            "post_check_error": self.post_check_error,
            "constraint_violation": self.constraint_violation,
            "iterations": self.iterations,
            "duality_gap": self.duality_gap,
            "alternation_count": self.alternation_count,
            "rounds": self.rounds,
        }


def _minimax_lp(Bw, Cw, vw, nonneg_idx, p):
    """Dual-form LP for one working set of points and constraint rows."""
    mw = Bw.shape[0]
    lw = Cw.shape[0]
    A = np.zeros((p + 1, 2 * mw + lw + nonneg_idx.size))
    A[:p, :mw] = Bw.T
    A[:p, mw:2 * mw] = -Bw.T
    if lw:
        A[:p, 2 * mw:2 * mw + lw] = -Cw.T
    for slot, j in enumerate(nonneg_idx):
        A[j, 2 * mw + lw + slot] = -1.0
    A[p, :mw] = -1.0
    A[p, mw:2 * mw] = -1.0
    rhs = np.zeros(p + 1)
    rhs[p] = -1.0
    cost = np.concatenate([vw, -vw, np.zeros(lw + nonneg_idx.size)])
    return A, rhs, cost


def _violation_peaks(scores, tol, cap):
    """Isolated local maxima of a violation profile, capped at the worst few.

    Adding one index per extremum cluster (rather than a block of adjacent
    grid points) keeps the working-set columns well separated, which is what
    keeps the simplex bases well conditioned.
    """
    n = scores.size
    if n == 0:
        return np.zeros(0, dtype=int)
    peak = np.ones(n, dtype=bool)
    if n > 1:
        peak[1:] &= scores[1:] >= scores[:-1]
        peak[:-1] &= scores[:-1] >= scores[1:]
    idx = np.flatnonzero(peak & (scores > tol))
    if idx.size > cap:
        idx = idx[np.argsort(scores[idx])[::-1][:cap]]
    return idx


def solve_grid_minimax(values, columns, cons_matrix=None, nonneg=None,
                       max_iterations: int = 20000):
    """Best linear minimax fit on a fixed grid via the dual simplex route.

    Minimises max_i |values_i - (columns theta)_i| over theta, subject to
    (cons_matrix theta)_l >= 0 and theta_j >= 0 for flagged j.  Returns
    (theta, error, info).  Column scaling keeps narrow-interval trig bases
    workable; it is undone before returning.

    Dense grids are handled by exchange: the LP is solved on a spread-out
    working subset of rows, the worst violated points and sign constraints
    join the subset, and the solve repeats until nothing violates.  Feeding
    every grid point to one LP would hand the simplex thousands of nearly
    parallel columns (adjacent grid points differ by O(h)), whose bases are
    numerically singular; the working set sidesteps that entirely.
    """
    values = np.asarray(values, dtype=float)
    columns = np.asarray(columns, dtype=float)
    M, p = columns.shape
    if cons_matrix is None:
        cons_matrix = np.zeros((0, p))
    cons_matrix = np.asarray(cons_matrix, dtype=float)
    L = cons_matrix.shape[0]
    nonneg_idx = np.flatnonzero(np.asarray(nonneg, dtype=bool)) if nonneg is not None \
        else np.zeros(0, dtype=int)

    # normalize the target so the solver tolerances are scale-free: the
    # scaled summands of the nested construction have sups around 1e-13,
    # far below any absolute reduced-cost tolerance
    vscale = float(np.abs(values).max()) if M else 1.0
    if not vscale > 0.0:
        vscale = 1.0

    scale = np.maximum(np.abs(columns).max(axis=0),
                       np.abs(cons_matrix).max(axis=0) if L else 0.0)
    scale = np.where(scale > 0, scale, 1.0)
    Bs = columns / scale
    Cs = cons_matrix / scale if L else cons_matrix
    vals = values / vscale

    def spread(total, count):
        if total == 0:
            return np.zeros(0, dtype=int)
        return np.unique(np.linspace(0, total - 1, min(total, count))
                         .round().astype(int))

    work_pts = spread(M, max(2 * p + 5, 33))
    work_cons = spread(L, max(p + 5, 17))
    cap = p + 5

    total_iters = 0
    theta_s = np.zeros(p)
    t = 0.0
    residual = vals.copy()
    sol = None
    rounds = 0
    while rounds < 60:
        rounds += 1
        A, rhs, cost = _minimax_lp(Bs[work_pts], Cs[work_cons],
                                   vals[work_pts], nonneg_idx, p)
        sol = solve_lp(A, rhs, cost, max_iterations=max_iterations)
        total_iters += sol.iterations
        theta_s = sol.duals[:p]
        t = -sol.objective
        residual = vals - Bs @ theta_s
        over = np.abs(residual) - t
        under = -(Cs @ theta_s) if L else np.zeros(0)
        tol = max(1e-9, 50.0 * abs(sol.duality_gap))
        if (over.max(initial=0.0) <= tol and under.max(initial=0.0) <= tol):
            break
        add_p = _violation_peaks(over, tol, cap)
        add_c = _violation_peaks(under, tol, cap)
        if over.max(initial=0.0) > tol:
            add_p = np.union1d(add_p, [int(np.argmax(over))])
        if under.max(initial=0.0) > tol:
            add_c = np.union1d(add_c, [int(np.argmax(under))])
        new_pts = np.union1d(work_pts, add_p)
        new_cons = np.union1d(work_cons, add_c)
        if new_pts.size == work_pts.size and new_cons.size == work_cons.size:
            break
        work_pts, work_cons = new_pts, new_cons

    # certify against the whole grid, not just the final working set
    error = max(t, float(np.abs(residual).max()) if M else t) * vscale
    theta = theta_s / scale * vscale
    mw = work_pts.size
    info = {
        "iterations": total_iters,
        "duality_gap": sol.duality_gap,
        "t_multiplier": float(sol.duals[p]),
        "active_high": work_pts[np.flatnonzero(sol.x[:mw] > 1e-12)],
        "active_low": work_pts[np.flatnonzero(sol.x[mw:2 * mw] > 1e-12)],
        "outer_rounds": rounds,
        "working_points": int(mw),
    }
    return theta, float(error), info


def count_alternations(xs, residuals, level: float, rel_drop: float = 1e-6) -> int:
    """Number of alternating near-extreme residual points at the given level."""
    if level <= 0:
        return 0
    xs = np.asarray(xs)
    res = np.asarray(residuals)
    order = np.argsort(xs)
    res = res[order]
    big = np.abs(res) >= (1.0 - rel_drop) * level
    signs = np.sign(res[big])
    signs = signs[signs != 0]
    if signs.size == 0:
        return 0
    flips = int(np.count_nonzero(np.diff(signs)))
    return flips + 1


def _split_points(subintervals, total: int, minimum: int = 33):
    widths = np.asarray([iv.width for iv in subintervals])
    counts = np.maximum(minimum, np.ceil(total * widths / widths.sum()).astype(int))
    pts = [chebyshev_points(iv, c) for iv, c in zip(subintervals, counts)]
    return np.unique(np.concatenate(pts))


def _local_maxima(xs, vals):
    keep = np.zeros(xs.size, dtype=bool)
    keep[0] = keep[-1] = True
    keep[1:-1] = (vals[1:-1] >= vals[:-2]) & (vals[1:-1] >= vals[2:])
    return xs[keep]


def _constraint_rows(ys: SignChangeSet, degree: int, q: int, per_gap: int):
    pts = []
    signs = []
    for lo, hi, sigma in ys.intervals():
        gap_pts = chebyshev_points(Interval(lo, hi), per_gap, open_ends=True)
        pts.append(gap_pts)
        signs.append(np.full(gap_pts.size, sigma, dtype=float))
    pts = np.concatenate(pts)
    signs = np.concatenate(signs)
    rows = trig_derivative_basis(pts, degree, q) * signs[:, None]
    return pts, signs, rows


def _signed_min(tp: TrigPoly, ys: SignChangeSet, q: int, per_gap: int):
    """Worst signed value of sigma * T^(q) over a dense constraint grid."""
    dq = tp.derivative(q)
    worst = np.inf
    top = 0.0
    for lo, hi, sigma in ys.intervals():
        pts = chebyshev_points(Interval(lo, hi), per_gap, open_ends=True)
        vals = sigma * dq(pts)
        worst = min(worst, float(vals.min()))
        top = max(top, float(np.abs(vals).max()))
    return worst, top


def _refinement_loop(target, degree: int, subintervals, grid: GridSpec,
                     cons_builder=None, cons_check=None):
    """Shared solve-refine loop.  cons_builder() -> (rows matrix, densify_fn)."""
    total = max(grid.points_per_degree * max(degree, 1), 512)
    points = _split_points(subintervals, total)
    fine = _split_points(subintervals, 4 * total)
    scale = float(np.abs(np.asarray(target(fine))).max())
    floor = 1e-12 * max(1.0, scale)

    rounds = []
    best = None
    for round_idx in range(max(grid.max_refinements, 1) + 1):
        values = np.asarray(target(points), dtype=float)
        columns = trig_basis(points, degree)
        cons_matrix = cons_builder() if cons_builder is not None else None
        theta, error, info = solve_grid_minimax(values, columns, cons_matrix)
        tp = coeffs_from_vector(theta, degree)

        fine_all = np.unique(np.concatenate([fine, points]))
        residual = np.asarray(target(fine_all)) - tp(fine_all)
        post = float(np.abs(residual).max())
        cons_ok, violation = True, None
        if cons_check is not None:
            violation, cons_ok = cons_check(tp, round_idx)
        rounds.append({"grid_points": int(points.size), "error": error,
                       "post_check_error": post,
                       "constraint_violation": violation})
        best = (tp, error, post, info, residual, fine_all, violation)
        gap_ok = (post - error) <= grid.refinement_tolerance * max(error, floor) \
            or post <= floor
        if gap_ok and cons_ok:
            break
        if not gap_ok:
            add = _local_maxima(fine_all, np.abs(residual))
            points = np.unique(np.concatenate([points, add]))
    tp, error, post, info, residual, fine_all, violation = best
    # post is a sup estimate and error a grid max: clamp 1-ulp inversions
    post = max(post, error)
    level = max(error, post)
    alternations = count_alternations(fine_all, residual, error if error > 0 else level)
    return ApproxResult(approximant=tp, error=error, post_check_error=post,
                        constraint_violation=violation,
                        iterations=info["iterations"],
                        duality_gap=info["duality_gap"],
                        alternation_count=alternations, rounds=rounds)


def best_approx(target, degree: int, domain: Interval | None = None,
                grid: GridSpec | None = None) -> ApproxResult:
    """Best unconstrained trig approximation on the domain (default: period)."""
    g = grid or SOLVER_GRID
    iv = domain or FULL_PERIOD
    return _refinement_loop(target, degree, [iv], g)


def best_co_q_monotone(target, degree: int, q: int, ys: SignChangeSet,
                       objective_grid: GridSpec | None = None,
                       constraint_grid: GridSpec | None = None) -> ApproxResult:
    """Best approximation whose q-th derivative obeys the sign pattern of ys.

    Both grids refine independently: the objective grid at residual maxima,
    the constraint grid by doubling wherever the continuous sign check
    fails between grid points (up to three doublings).
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    og = objective_grid or SOLVER_GRID
    cg = constraint_grid or SOLVER_GRID
    per_gap = max(cg.points_per_degree * max(degree, 1), 512)
    lo = ys.points[0]
    subintervals = [Interval(a, b) for a, b, _ in ys.intervals()]

    state = {"per_gap": per_gap, "densify": 0}

    def cons_builder():
        _, _, rows = _constraint_rows(ys, degree, q, state["per_gap"])
        return rows

    def cons_check(tp: TrigPoly, round_idx: int):
        worst, top = _signed_min(tp, ys, q, 10 * state["per_gap"])
        tol = 1e-8 * max(top, 1.0)
        ok = worst >= -tol
        if not ok and state["densify"] < 3:
            state["per_gap"] *= 2
            state["densify"] += 1
            return max(0.0, -worst), False
        return max(0.0, -worst), True

    return _refinement_loop(target, degree, subintervals, og,
                            cons_builder=cons_builder, cons_check=cons_check)


def solve_problem(target, problem: MinimaxProblem) -> ApproxResult:
    if problem.constrained:
        return best_co_q_monotone(target, problem.degree, problem.q,
                                  problem.sign_changes,
                                  objective_grid=problem.objective_grid,
                                  constraint_grid=problem.constraint_grid)
    return best_approx(target, problem.degree, domain=problem.domain,
                       grid=problem.objective_grid)
