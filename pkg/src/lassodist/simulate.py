"""Monte-Carlo oracle: empirical distributions of the Lasso and comparison reports.

Replicates are drawn in fixed-size chunks whose RNG streams are keyed by
(seed, chunk index), so a summary depends only on (seed, n_rep) and never on
how the chunks would be scheduled across workers.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .distribution import RegionProbability
from .errors import ConvergenceError, InputError
from .model import ZERO_TOL, DesignProblem, GaussianModel, SignVector, TuningVector
from .rng import gaussian_chunks
from .solver import DEFAULT_TOL, kernel_sign_cone_nonempty, solve_many


@dataclass(frozen=True)
class SimulationConfig:
    n_rep: int = 100_000
    seed: int = 0
    zero_tol: float = ZERO_TOL
    solver_tol: float = DEFAULT_TOL
    ecdf_points: int = 21
    ecdf_span: float = 4.0

    def __post_init__(self):
        if int(self.n_rep) != self.n_rep or self.n_rep < 1:
            raise InputError("n_rep must be a positive integer")
        if int(self.seed) != self.seed or self.seed < 0:
            raise InputError("seed must be a nonnegative integer")
        if not (self.zero_tol > 0 and self.solver_tol > 0):
            raise InputError("tolerances must be positive")
        if self.ecdf_points < 2 or not self.ecdf_span > 0:
            raise InputError("ecdf grid needs >= 2 points and a positive span")


@dataclass(frozen=True, eq=False)
class EmpiricalSummary:
    """Counters over n_rep solved replicates.

    ecdf_grid is axis-major: ecdf_grid[j] is a tuple of (z, Fhat_j(z)) pairs
    for the estimator coordinate b_j on a grid centered at beta_j.
    """

    n_rep: int
    seed: int
    sign_pattern_freq: dict = field(default_factory=dict)
    support_freq: dict = field(default_factory=dict)
    ecdf_grid: tuple = ()
    nonunique_count: int = 0
    convergence_failures: int = 0


def _ecdf_axes(problem: DesignProblem, model: GaussianModel, config: SimulationConfig):
    pinv_diag = np.diag(np.linalg.pinv(problem.gram))
    grids = []
    for j in range(problem.p):
        sd = model.sigma * math.sqrt(max(float(pinv_diag[j]), 0.0))
        if sd < 1e-12:
            sd = model.sigma  # coordinate invisible to the design; arbitrary plot scale
        grids.append(np.linspace(
            model.beta[j] - config.ecdf_span * sd,
            model.beta[j] + config.ecdf_span * sd,
            config.ecdf_points,
        ))
    return grids


def run_simulation(
    problem: DesignProblem,
    model: GaussianModel,
    tuning: TuningVector,
    config: SimulationConfig,
) -> EmpiricalSummary:
    """Sample y = mu + sigma*eps, solve each replicate, count what happened.

    Per replicate: the sign pattern of b at zero_tol, its support, whether the
    solution set at that y is a single point, and per-axis ECDF counts. Fails
    with ConvergenceError when more than 0.1% of replicates miss solver_tol.
    """
    if tuning.p != problem.p or model.beta.shape[0] != problem.p:
        raise InputError("model/tuning dimensions do not match the design")
    sign_counts: Counter = Counter()
    support_counts: Counter = Counter()
    grids = _ecdf_axes(problem, model, config)
    ecdf_hits = [np.zeros(config.ecdf_points, dtype=np.int64) for _ in range(problem.p)]
    nonunique = 0
    fails = 0
    gram, lam = problem.gram, tuning.lam
    class_tol = max(100.0 * config.solver_tol, 1e-8)
    always_unique = problem.rank_x == problem.p
    cone_cache: dict = {}

    for _start, _count, Z in gaussian_chunks(config.seed, config.n_rep, problem.n):
        Y = model.mu + model.sigma * Z
        B, resids = solve_many(problem, Y, tuning, tol=config.solver_tol)
        fails += int(np.sum(resids > config.solver_tol))

        s_class = np.where(B > config.zero_tol, 1, np.where(B < -config.zero_tol, -1, 0))
        patterns, counts = np.unique(s_class, axis=0, return_counts=True)
        for row, cnt in zip(patterns, counts):
            key = SignVector(d=tuple(int(v) for v in row))
            sign_counts[key] += int(cnt)
            support_counts[tuple(int(j) for j in np.flatnonzero(row))] += int(cnt)

        for j in range(problem.p):
            ecdf_hits[j] += np.count_nonzero(B[:, j][:, None] <= grids[j][None, :], axis=0)

        if not always_unique:
            nonunique += _count_nonunique(
                problem, Y, B, gram, lam, class_tol, config.zero_tol, cone_cache
            )

    if fails > 0.001 * config.n_rep:
        raise ConvergenceError(
            f"{fails} of {config.n_rep} replicates failed to reach solver_tol"
        )
    ecdf_grid = tuple(
        tuple((float(z), int(h) / config.n_rep) for z, h in zip(grids[j], ecdf_hits[j]))
        for j in range(problem.p)
    )
    return EmpiricalSummary(
        n_rep=config.n_rep,
        seed=config.seed,
        sign_pattern_freq=dict(sign_counts),
        support_freq=dict(support_counts),
        ecdf_grid=ecdf_grid,
        nonunique_count=nonunique,
        convergence_failures=fails,
    )


def _count_nonunique(problem, Y, B, gram, lam, class_tol, zero_tol, cache):
    """Uniqueness-at-y test for a whole chunk, one cone test per distinct pattern.

    The verdict depends on y only through which coordinates are interior
    (lam_j - |g_j| > class_tol with b_j = 0) and which boundary zeros carry a
    sign constraint, so rows sharing that classification share the answer.
    """
    G_all = Y @ problem.X - B @ gram
    interior = (lam[None, :] - np.abs(G_all) > class_tol) & (np.abs(B) <= zero_tol)
    zeroish = np.abs(B) <= zero_tol
    constrained = (~interior) & zeroish & (lam > 0)[None, :] & (np.abs(G_all) > class_tol)
    signed = np.where(G_all >= 0, 1, -1) * constrained
    key_mat = np.where(interior, 2, signed).astype(np.int8)
    patterns, counts = np.unique(key_mat, axis=0, return_counts=True)
    total = 0
    for row, cnt in zip(patterns, counts):
        key = row.tobytes()
        verdict = cache.get(key)
        if verdict is None:
            boundary = np.flatnonzero(row != 2)
            constrained_idx = np.flatnonzero((row == 1) | (row == -1))
            signs = row[constrained_idx].astype(float)
            verdict = kernel_sign_cone_nonempty(problem, boundary, constrained_idx, signs)
            cache[key] = verdict
        if verdict:
            total += int(cnt)
    return total


def estimate_nonuniqueness_probability(
    problem: DesignProblem,
    model: GaussianModel,
    tuning: TuningVector,
    config: SimulationConfig,
) -> RegionProbability:
    """Fraction of replicates whose solution set is not a single point."""
    summary = run_simulation(problem, model, tuning, config)
    ph = summary.nonunique_count / config.n_rep
    return RegionProbability(
        estimate=float(ph),
        std_error=float(math.sqrt(ph * (1.0 - ph) / config.n_rep)),
        method="monte-carlo",
        n_samples=int(config.n_rep),
        seed=int(config.seed),
        quad_tol=0.0,
    )


@dataclass(frozen=True, eq=False)
class ComparisonReport:
    analytic: RegionProbability
    empirical: RegionProbability
    discrepancy: float
    tolerance: float
    passed: bool


def compare_analytic_empirical(
    analytic: RegionProbability, empirical: RegionProbability
) -> ComparisonReport:
    """Check two estimates of one event against their combined uncertainty.

    Tolerance is 3*sqrt(se1^2 + se2^2) plus both quadrature error bounds, so
    a pair of exact quadrature results must agree to quad_tol and a pair of
    MC results to 3 combined standard errors.
    """
    disc = abs(analytic.estimate - empirical.estimate)
    tol = (
        3.0 * math.sqrt(analytic.std_error**2 + empirical.std_error**2)
        + analytic.quad_tol
        + empirical.quad_tol
    )
    return ComparisonReport(
        analytic=analytic,
        empirical=empirical,
        discrepancy=float(disc),
        tolerance=float(tol),
        passed=bool(disc <= tol),
    )
