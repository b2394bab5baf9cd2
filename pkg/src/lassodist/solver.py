"""Weighted-Lasso solver, optimality certificates, solution-set description.

Objective convention used everywhere in this package:

    L(b) = ||y - X b||^2  +  2 * sum_j lam_j |b_j|

Note the factor 2 on the penalty; most libraries scale differently, so the
soft-threshold level for coordinate j here is lam_j / (X'X)_jj. A vector b
minimizes L iff, with g = X'y - X'Xb,

    g_j = sgn(b_j) lam_j        where b_j != 0,
    |g_j| <= lam_j              where b_j == 0,

which is what is_solution certifies and what the coordinate-descent loop uses
as its convergence criterion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError, InputError
from .model import ZERO_TOL, DesignProblem, TuningVector
from .simplex import feasible

DEFAULT_TOL = 1e-10
DEFAULT_MAX_ITER = 100_000


@dataclass(frozen=True, eq=False)
class LassoSolution:
    b: np.ndarray
    fit: np.ndarray
    objective: float
    kkt_residual: float
    active_model: tuple


@dataclass(frozen=True, eq=False)
class KKTReport:
    """Verdict of the first-order conditions plus the worst violation."""

    ok: bool
    max_violation: float
    worst_index: int

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True, eq=False)
class SolutionSetDescription:
    """The full solution set at one response y.

    Every solution shares `fit`; solutions differ from the anchor by null
    space directions only. equicorrelation_signs classifies g = X'y - X'Xb
    per index: +1 at the upper boundary g_j = +lam_j, -1 at the lower, 0
    strictly inside (which forces b'_j = 0 in every solution). For lam_j = 0
    both boundaries coincide and the index is reported at +1.
    """

    fit: np.ndarray
    anchor: LassoSolution
    equicorrelation_signs: tuple
    is_unique_at_y: bool


def _soft(u, t):
    return np.sign(u) * np.maximum(np.abs(u) - t, 0.0)


def _kkt_violation(g, b, lam, zero_tol):
    active = np.abs(b) > zero_tol
    return np.where(active, np.abs(g - np.sign(b) * lam), np.maximum(np.abs(g) - lam, 0.0))


def _check_inputs(problem, y, tuning):
    y = np.asarray(y, dtype=float).ravel()
    if y.shape[0] != problem.n:
        raise InputError(f"y must have length n={problem.n}")
    if not np.all(np.isfinite(y)):
        raise InputError("y has non-finite entries")
    if tuning.p != problem.p:
        raise InputError("tuning vector length does not match the design")
    return y


def solve(
    problem: DesignProblem,
    y,
    tuning: TuningVector,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
) -> LassoSolution:
    """Cyclic coordinate descent from b = 0, coordinates in order 1..p.

    Deterministic in its inputs. Convergence is declared on the first-order
    residual (not on objective decrease), so the output always passes
    is_solution at the same tol.
    """
    y = _check_inputs(problem, y, tuning)
    if tol <= 0:
        raise InputError("tol must be positive")
    gram, lam = problem.gram, tuning.lam
    p = problem.p
    diag = np.diag(gram).copy()
    c = problem.X.T @ y
    b = np.zeros(p)
    best_resid, best_b = np.inf, b.copy()
    for _ in range(max_iter):
        for j in range(p):
            if diag[j] <= 0.0:
                continue  # zero column: coefficient pinned at 0
            rho = c[j] - gram[j] @ b + diag[j] * b[j]
            b[j] = _soft(rho, lam[j]) / diag[j]
        g = c - gram @ b
        resid = float(np.max(_kkt_violation(g, b, lam, 0.0))) if p else 0.0
        if resid < best_resid:
            best_resid, best_b = resid, b.copy()
        if resid <= tol:
            return _package(problem, y, tuning, b, resid)
    raise ConvergenceError(
        f"coordinate descent did not reach tol={tol:g} within {max_iter} sweeps "
        f"(best residual {best_resid:.3e})",
        b=best_b,
        kkt_residual=best_resid,
    )


def _package(problem, y, tuning, b, resid):
    fit = problem.X @ b
    r = y - fit
    objective = float(r @ r + 2.0 * tuning.lam @ np.abs(b))
    active = tuple(int(j) for j in np.flatnonzero(np.abs(b) > ZERO_TOL))
    return LassoSolution(
        b=b.copy(), fit=fit, objective=objective, kkt_residual=float(resid), active_model=active
    )


def solve_many(
    problem: DesignProblem,
    Y,
    tuning: TuningVector,
    tol: float = DEFAULT_TOL,
    max_iter: int = DEFAULT_MAX_ITER,
):
    """Solve one Lasso per row of Y (m x n). Returns (B, residuals).

    Same update rule and sweep order as solve(); rows are frozen as soon as
    they satisfy the first-order conditions. Rows still above tol after
    max_iter sweeps are returned as-is with their residuals, so callers can
    count failures instead of dying mid-batch.
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    if Y.shape[1] != problem.n:
        raise InputError(f"responses must have {problem.n} columns")
    if tuning.p != problem.p:
        raise InputError("tuning vector length does not match the design")
    gram, lam = problem.gram, tuning.lam
    m, p = Y.shape[0], problem.p
    diag = np.diag(gram).copy()
    C = Y @ problem.X
    B = np.zeros((m, p))
    resids = np.full(m, np.inf)
    open_rows = np.arange(m)
    for _ in range(max_iter):
        if open_rows.size == 0:
            break
        Ba, Ca = B[open_rows], C[open_rows]
        for j in range(p):
            if diag[j] <= 0.0:
                continue
            rho = Ca[:, j] - Ba @ gram[:, j] + diag[j] * Ba[:, j]
            Ba[:, j] = _soft(rho, lam[j]) / diag[j]
        G = Ca - Ba @ gram
        active = np.abs(Ba) > 0.0
        viol = np.where(active, np.abs(G - np.sign(Ba) * lam), np.maximum(np.abs(G) - lam, 0.0))
        r = viol.max(axis=1) if p else np.zeros(len(open_rows))
        B[open_rows], resids[open_rows] = Ba, r
        open_rows = open_rows[r > tol]
    return B, resids


def is_solution(
    problem: DesignProblem,
    y,
    tuning: TuningVector,
    b,
    tol: float = 1e-8,
    zero_tol: float = ZERO_TOL,
) -> KKTReport:
    """Certify b against the first-order conditions at tolerance tol."""
    y = _check_inputs(problem, y, tuning)
    b = np.asarray(b, dtype=float).ravel()
    if b.shape[0] != problem.p:
        raise InputError(f"b must have length p={problem.p}")
    g = problem.X.T @ y - problem.gram @ b
    viol = _kkt_violation(g, b, tuning.lam, zero_tol)
    worst = int(np.argmax(viol))
    return KKTReport(ok=bool(viol[worst] <= tol), max_violation=float(viol[worst]), worst_index=worst)


def kernel_sign_cone_nonempty(problem, boundary, constrained, constrained_signs, tol=1e-9):
    """Does {h != 0 : supp(h) in boundary, Xh = 0, s_k h_{c_k} >= 0} exist?

    `boundary` are the indices allowed to move, `constrained` a subset of them
    whose movement must respect the given signs. Decided exactly by a rank
    test on the sign-free columns plus a phase-1 LP over the sign cone
    (normalized by sum_k s_k h_{c_k} = 1, valid since the cone is scale
    invariant).
    """
    boundary = list(boundary)
    constrained = list(constrained)
    signs = np.asarray(constrained_signs, dtype=float).ravel()
    if not boundary:
        return False
    free = [j for j in boundary if j not in set(constrained)]
    X = problem.X
    if free:
        cols = X[:, free]
        s = np.linalg.svd(cols, compute_uv=False)
        smax = float(s[0]) if s.size else 0.0
        rank = int(np.sum(s > max(cols.shape) * smax * 1e-12))
        if rank < len(free):
            return True
    if not constrained:
        return False
    pos = {j: k for k, j in enumerate(boundary)}
    a_eq = np.vstack([X[:, boundary], np.zeros((1, len(boundary)))])
    for j, sj in zip(constrained, signs):
        a_eq[-1, pos[j]] = sj
    b_eq = np.concatenate([np.zeros(X.shape[0]), [1.0]])
    a_ub = np.zeros((len(constrained), len(boundary)))
    for k, (j, sj) in enumerate(zip(constrained, signs)):
        a_ub[k, pos[j]] = -sj
    b_ub = np.zeros(len(constrained))
    return feasible(a_eq, b_eq, a_ub, b_ub, n_free=len(boundary), tol=tol)


def describe_solution_set(
    problem: DesignProblem,
    y,
    tuning: TuningVector,
    tol: float = DEFAULT_TOL,
    zero_tol: float = ZERO_TOL,
) -> SolutionSetDescription:
    """Solve, classify the equicorrelation structure, decide uniqueness at y."""
    anchor = solve(problem, y, tuning, tol=tol)
    y = np.asarray(y, dtype=float).ravel()
    g = problem.X.T @ y - problem.gram @ anchor.b
    lam = tuning.lam
    class_tol = max(100.0 * tol, 1e-8)
    interior = lam - np.abs(g) > class_tol
    interior &= np.abs(anchor.b) <= zero_tol  # an active coordinate is never interior
    signs = np.where(interior, 0, np.where(g >= 0, 1, -1))
    unique = _unique_at_y(problem, tuning, anchor.b, g, interior, class_tol, zero_tol)
    return SolutionSetDescription(
        fit=anchor.fit,
        anchor=anchor,
        equicorrelation_signs=tuple(int(v) for v in signs),
        is_unique_at_y=unique,
    )


def _unique_at_y(problem, tuning, b, g, interior, class_tol, zero_tol):
    if problem.rank_x == problem.p:
        return True  # strictly convex objective
    lam = tuning.lam
    boundary = [int(j) for j in np.flatnonzero(~interior)]
    constrained, signs = [], []
    for j in boundary:
        # zero coefficient pinned at a strict boundary +-lam_j: movement must
        # respect sgn(g_j); lam_j = 0 (or lam_j below the classification
        # noise) leaves the coordinate sign-free
        if abs(b[j]) <= zero_tol and lam[j] > 0 and abs(g[j]) > class_tol:
            constrained.append(j)
            signs.append(1.0 if g[j] > 0 else -1.0)
    return not kernel_sign_cone_nonempty(problem, boundary, constrained, signs)
