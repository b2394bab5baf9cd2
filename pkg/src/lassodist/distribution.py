"""Exact finite-sample distribution of the weighted Lasso under Gaussian noise.

Everything here works in the estimation-error coordinates u = bhat - beta.
The distribution of u is a mixture of parts indexed by sign vectors d: on the
coordinates in D0 the estimator is pinned at 0 (u_j = -beta_j, an atom
direction), and on D+- it moves continuously. Each part's mass is an integral
of the p-dimensional Gaussian N(0, sigma^2 X'X) evaluated at

    X'X m  +  s,     m_j in {integration variable (D+-), -beta_j (D0)},
                     s_j in {-lam_j (D-), +lam_j (D+), integration var in
                             [-lam_j, lam_j] (D0)},

which is the first-order-conditions change of variables from X'eps to (m, s);
its Jacobian contributes a factor |det (X'X)_{A,A}| with A = D- union D+ (the
principal minor on the moving block), without which the sign-pattern parts do
not sum to one. Quadrature paths need full column rank (the Gaussian is
singular otherwise); rank-deficient designs go through the reduced-rank
representation (rank-1 analytically, any rank by Monte Carlo over the
solver).

Event-threshold convention: a threshold z_j = -beta_j on a D+- coordinate is
accepted and yields the open event {bhat_j < 0} (resp. > 0); thresholds
strictly on the wrong side of -beta_j are rejected. Under this convention the
3^p orthant events at z = -beta partition R^p, so their probabilities sum
to one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import product

import numpy as np
from scipy import integrate
from scipy.linalg import solve_triangular
from scipy.stats import norm, qmc

from .errors import (
    ConditioningError,
    ConvergenceError,
    DimensionLimitError,
    InputError,
)
from .model import ZERO_TOL, DesignProblem, GaussianModel, SignVector, TuningVector
from .rng import gaussian_chunks
from .solver import solve_many

QUAD_DIM_LIMIT = 6
CDF_P_LIMIT = 4
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)
_EVENT_SIDE_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class RegionProbability:
    """A probability estimate together with how it was obtained.

    Quadrature-class results carry std_error = 0 and a quad_tol error bound;
    Monte Carlo results carry the binomial standard error and quad_tol = 0.
    """

    estimate: float
    std_error: float
    method: str
    n_samples: int
    seed: int | None
    quad_tol: float


@dataclass(frozen=True, eq=False)
class OrthantEvent:
    """Thresholds z (error coordinates) with the orthant signs d.

    The event reads: u_j <= z_j and bhat_j < 0 on D-, u_j >= z_j and
    bhat_j > 0 on D+, bhat_j = 0 on D0 (which requires z_j = -beta_j).
    """

    z: np.ndarray
    d: SignVector


def error_orthant_event(z, d) -> OrthantEvent:
    z = np.asarray(z, dtype=float).ravel()
    if not isinstance(d, SignVector):
        d = SignVector(d=tuple(int(v) for v in d))
    if z.shape[0] != d.p:
        raise InputError("thresholds and sign vector must have equal length")
    return OrthantEvent(z=z, d=d)


def estimator_orthant_event(model: GaussianModel, z, d=None) -> OrthantEvent:
    """Build the event {bhat_j <= z_j (D-), >= z_j (D+), = 0 (D0)}.

    z is in estimator coordinates; d defaults to sgn(z) with exact zeros
    mapped to D0. Internally the event is stored in error coordinates
    (z - beta on D+-, -beta on D0).
    """
    z = np.asarray(z, dtype=float).ravel()
    if d is None:
        d = SignVector(d=tuple(int(v) for v in np.sign(z)))
    elif not isinstance(d, SignVector):
        d = SignVector(d=tuple(int(v) for v in d))
    if z.shape[0] != d.p or z.shape[0] != model.beta.shape[0]:
        raise InputError("thresholds, sign vector and model must have equal length")
    z_err = z - model.beta
    for j in d.d_zero:
        if abs(z[j]) > _EVENT_SIDE_TOL:
            raise InputError(f"D0 coordinate {j} needs threshold 0, got {z[j]!r}")
        z_err[j] = -model.beta[j]
    return OrthantEvent(z=z_err, d=d)


def _validate_event(event: OrthantEvent, model: GaussianModel, p: int):
    z, d = event.z, event.d
    if z.shape[0] != p or d.p != p or model.beta.shape[0] != p:
        raise InputError("event does not match the problem dimension")
    if not np.all(np.isfinite(z)):
        raise InputError("event thresholds must be finite")
    zb = z + model.beta  # threshold positions relative to the orthant split
    for j in d.d_minus:
        if zb[j] > _EVENT_SIDE_TOL:
            raise InputError(
                f"coordinate {j}: threshold lies strictly on the positive side "
                "but the sign vector says D-"
            )
    for j in d.d_plus:
        if zb[j] < -_EVENT_SIDE_TOL:
            raise InputError(
                f"coordinate {j}: threshold lies strictly on the negative side "
                "but the sign vector says D+"
            )
    for j in d.d_zero:
        if abs(zb[j]) > _EVENT_SIDE_TOL:
            raise InputError(f"coordinate {j}: D0 requires z_j = -beta_j")


def _check_shapes(problem: DesignProblem, model: GaussianModel, tuning: TuningVector):
    if tuning.p != problem.p or model.beta.shape[0] != problem.p:
        raise InputError("model/tuning dimensions do not match the design")


class _CenteredGaussian:
    """log-density of N(0, cov) with the covariance factored once."""

    def __init__(self, cov):
        self.chol = np.linalg.cholesky(cov)
        self.log_norm = -cov.shape[0] * _LOG_SQRT_2PI - float(
            np.sum(np.log(np.diag(self.chol)))
        )

    def logpdf(self, x):
        w = solve_triangular(self.chol, x, lower=True)
        return self.log_norm - 0.5 * float(w @ w)

    def pdf(self, x):
        return math.exp(self.logpdf(x))


def _nested_quad(axes, f, eps):
    """Tensor-nested adaptive quadrature; one scipy.integrate.quad per axis.

    Axis kinds: ("finite", lo, hi), ("tail_low", ub, scale) for (-inf, ub],
    ("tail_high", lb, scale) for [lb, inf). Tails are mapped through the
    normal quantile, m = edge -+ scale*|q|, q = Phi^{-1}(t/2), t in (0,1];
    the 1/(2 phi(q)) Jacobian is applied in log space so underflowing
    integrands come out as clean zeros.
    """
    vals = [0.0] * len(axes)

    def level(i):
        if i == len(axes):
            return f(vals)
        kind = axes[i][0]
        if kind == "finite":
            lo, hi = axes[i][1], axes[i][2]
            if hi <= lo:
                return 0.0

            def g(x, _i=i):
                vals[_i] = x
                return level(_i + 1)

            return integrate.quad(g, lo, hi, epsabs=eps, epsrel=1e-10, limit=100)[0]

        edge, scale = axes[i][1], axes[i][2]
        toward = -1.0 if kind == "tail_low" else 1.0

        def g(t, _i=i, _edge=edge, _scale=scale, _toward=toward):
            if t <= 0.0:
                return 0.0
            q = norm.ppf(0.5 * t)  # q <= 0, -> -inf as t -> 0
            if not np.isfinite(q):
                return 0.0
            vals[_i] = _edge + _toward * _scale * (-q) if _toward > 0 else _edge + _scale * q
            inner = level(_i + 1)
            if inner <= 0.0:
                return 0.0
            log_phi_q = -0.5 * q * q - _LOG_SQRT_2PI
            return math.exp(math.log(inner) - log_phi_q + math.log(_scale) - math.log(2.0))

        return integrate.quad(g, 0.0, 1.0, epsabs=eps, epsrel=1e-10, limit=100)[0]

    return level(0)


def _moving_minor(gram, moving) -> float:
    # Jacobian of (m, s) -> X'X m + s on the moving block
    if len(moving) == 0:
        return 1.0
    sub = gram[np.ix_(moving, moving)]
    return abs(float(np.linalg.det(sub)))


def _quad_scales(problem: DesignProblem, model: GaussianModel):
    # twice the marginal Gaussian scale guarantees the transformed tail
    # integrand decays: sigma^2 (X'X)^{-1}_jj is the widest variance any
    # partially-integrated slice can show along axis j
    inv_diag = np.diag(np.linalg.inv(problem.gram))
    return 2.0 * model.sigma * np.sqrt(np.maximum(inv_diag, 0.0))


def _gaussian_slice(problem, model, tuning, d: SignVector, m_template, s_template, slots):
    """Integrand over the nested-quad axis values for one sign pattern d."""
    density = _CenteredGaussian(model.sigma**2 * problem.gram)
    gram = problem.gram
    m = np.array(m_template, dtype=float)
    s = np.array(s_template, dtype=float)

    def f(vals):
        for (kind, j), v in zip(slots, vals):
            if kind == "m":
                m[j] = v
            else:
                s[j] = v
        return density.pdf(gram @ m + s)

    return f


def _require_quad(problem, dim):
    if problem.rank_x < problem.p:
        raise InputError(
            "quadrature needs full column rank (the Gaussian on X'y is singular); "
            "use method='mc'"
        )
    if dim > QUAD_DIM_LIMIT:
        raise DimensionLimitError(
            f"integration dimension {dim} exceeds {QUAD_DIM_LIMIT}; use method='mc'"
        )


def prob_orthant_event(
    problem: DesignProblem,
    model: GaussianModel,
    tuning: TuningVector,
    event: OrthantEvent,
    method: str = "quad",
    *,
    n_samples: int = 100_000,
    seed: int = 0,
    quad_tol: float = 1e-5,
    zero_tol: float = ZERO_TOL,
    solver_tol: float = 1e-10,
) -> RegionProbability:
    """P(u_j <= z_j on D-, u_j >= z_j on D+, bhat_j = 0 on D0)."""
    _check_shapes(problem, model, tuning)
    _validate_event(event, model, problem.p)
    z, d = event.z, event.d
    lam, beta = tuning.lam, model.beta

    if method == "mc":
        return _mc_probability(
            problem, model, tuning,
            _event_indicator(z, d, beta, zero_tol),
            n_samples, seed, solver_tol,
        )
    if method != "quad":
        raise InputError("method must be 'quad' or 'mc'")

    _require_quad(problem, problem.p)
    if any(lam[j] == 0.0 for j in d.d_zero):
        # an unpenalized coordinate carries no atom at zero
        return RegionProbability(0.0, 0.0, "quadrature", 0, None, 0.0)

    scales = _quad_scales(problem, model)
    axes, slots = [], []
    m_template = np.zeros(problem.p)
    s_template = np.zeros(problem.p)
    for j, dj in enumerate(d.d):
        if dj == -1:
            axes.append(("tail_low", float(z[j]), float(scales[j])))
            slots.append(("m", j))
            s_template[j] = -lam[j]
        elif dj == 1:
            axes.append(("tail_high", float(z[j]), float(scales[j])))
            slots.append(("m", j))
            s_template[j] = lam[j]
        else:
            axes.append(("finite", -float(lam[j]), float(lam[j])))
            slots.append(("s", j))
            m_template[j] = -beta[j]
    f = _gaussian_slice(problem, model, tuning, d, m_template, s_template, slots)
    jac = _moving_minor(problem.gram, sorted(d.d_minus + d.d_plus))
    value = jac * _nested_quad(axes, f, quad_tol / max(1, len(axes)) / max(jac, 1.0))
    return RegionProbability(
        estimate=float(min(max(value, 0.0), 1.0)),
        std_error=0.0,
        method="quadrature",
        n_samples=0,
        seed=None,
        quad_tol=quad_tol,
    )


def _event_indicator(z, d: SignVector, beta, zero_tol):
    zb = z + beta  # thresholds in estimator coordinates
    dm, dp, d0 = d.d_minus, d.d_plus, d.d_zero

    def indicator(B):
        ok = np.ones(B.shape[0], dtype=bool)
        for j in dm:
            ok &= (B[:, j] < -zero_tol) & (B[:, j] <= zb[j])
        for j in dp:
            ok &= (B[:, j] > zero_tol) & (B[:, j] >= zb[j])
        for j in d0:
            ok &= np.abs(B[:, j]) <= zero_tol
        return ok

    return indicator


def _mc_probability(problem, model, tuning, indicator, n_samples, seed, solver_tol):
    hits = 0
    fails = 0
    for _start, _count, Z in gaussian_chunks(seed, n_samples, problem.n):
        Y = model.mu + model.sigma * Z
        B, resids = solve_many(problem, Y, tuning, tol=solver_tol)
        fails += int(np.sum(resids > solver_tol))
        hits += int(np.count_nonzero(indicator(B)))
    if fails > 0.001 * n_samples:
        raise ConvergenceError(
            f"{fails} of {n_samples} Monte Carlo replicates failed to converge"
        )
    ph = hits / n_samples
    return RegionProbability(
        estimate=float(ph),
        std_error=float(math.sqrt(ph * (1.0 - ph) / n_samples)),
        method="monte-carlo",
        n_samples=int(n_samples),
        seed=int(seed),
        quad_tol=0.0,
    )


def prob_all_zero(
    problem: DesignProblem,
    model: GaussianModel,
    tuning: TuningVector,
    method: str = "quad",
    *,
    n_samples: int = 100_000,
    seed: int = 0,
    zero_tol: float = ZERO_TOL,
    solver_tol: float = 1e-10,
) -> RegionProbability:
    """P(bhat = 0) = P(X'y inside the lambda-box).

    Full column rank: a Gaussian rectangle probability (mean X'X beta,
    covariance sigma^2 X'X). Rank one: exact interval reduction along the
    row-space coordinate. Other rank-deficient designs: Monte Carlo.
    """
    _check_shapes(problem, model, tuning)
    if method == "mc":
        def all_zero(B, _tol=zero_tol):
            return np.all(np.abs(B) <= _tol, axis=1)

        return _mc_probability(problem, model, tuning, all_zero, n_samples, seed, solver_tol)
    if method != "quad":
        raise InputError("method must be 'quad' or 'mc'")
    if problem.rank_x == problem.p:
        return mvn_box_probability(
            mean=problem.gram @ model.beta,
            cov=model.sigma**2 * problem.gram,
            lower=-tuning.lam,
            upper=tuning.lam,
            seed=seed,
            n_samples=max(8192, n_samples // 8),
        )
    if problem.rank_x == 1:
        return _rank1_zero_atom(problem, model, tuning)
    raise DimensionLimitError(
        f"no deterministic path for rank {problem.rank_x} < p = {problem.p} designs; "
        "use method='mc'"
    )


def _rank1_zero_atom(problem, model, tuning):
    # X'y = u t with t = u'X'y one-dimensional Gaussian; the lambda-box pulls
    # back to an interval in t, intersected over the coordinate constraints
    u = problem.row_space_basis[:, 0]
    t_mean = float(u @ (problem.gram @ model.beta))
    t_sd = model.sigma * math.sqrt(float(u @ problem.gram @ u))
    hi = math.inf
    for j in range(problem.p):
        a = abs(float(u[j]))
        if a > 1e-15:
            hi = min(hi, float(tuning.lam[j]) / a)
    if not math.isfinite(hi):  # unreachable: u has unit norm
        raise InputError("degenerate row-space basis")
    est = float(norm.cdf((hi - t_mean) / t_sd) - norm.cdf((-hi - t_mean) / t_sd))
    return RegionProbability(
        estimate=min(max(est, 0.0), 1.0),
        std_error=0.0,
        method="quadrature",
        n_samples=0,
        seed=None,
        quad_tol=1e-14,
    )


def orthant_mass(
    problem: DesignProblem,
    model: GaussianModel,
    tuning: TuningVector,
    d: SignVector,
    **kwargs,
) -> RegionProbability:
    """P(bhat in O^d): the orthant event with all thresholds at the boundary."""
    return prob_orthant_event(
        problem, model, tuning,
        OrthantEvent(z=-model.beta.copy(), d=d),
        **kwargs,
    )


def conditional_density(
    problem: DesignProblem,
    model: GaussianModel,
    tuning: TuningVector,
    d: SignVector,
    z_active,
    *,
    quad_tol: float = 1e-6,
) -> float:
    """Density of the error's D+- coordinates, conditional on bhat in O^d.

    z_active lists the error coordinates in the order of D- union D+
    (ascending index). Returns 0 outside the orthant indicator's support.
    """
    _check_shapes(problem, model, tuning)
    _require_quad(problem, problem.p)
    z_active = np.asarray(z_active, dtype=float).ravel()
    moving = sorted(d.d_minus + d.d_plus)
    if z_active.shape[0] != len(moving):
        raise InputError(f"z_active must have length ||d||_1 = {len(moving)}")
    if len(d.d_zero) > QUAD_DIM_LIMIT:
        raise DimensionLimitError(
            f"D0 box dimension {len(d.d_zero)} exceeds {QUAD_DIM_LIMIT}"
        )
    mass = orthant_mass(problem, model, tuning, d, quad_tol=quad_tol)
    if mass.estimate < 1e-12:
        raise ConditioningError(
            f"P(bhat in O^d) = {mass.estimate:.3e} is numerically zero for d = {d.d}"
        )
    z_err = np.empty(problem.p)
    for j, v in zip(moving, z_active):
        z_err[j] = v
    for j in d.d_zero:
        z_err[j] = -model.beta[j]
    # strict orthant indicator on the moving coordinates
    zb = z_err + model.beta
    for j in d.d_minus:
        if not zb[j] < 0.0:
            return 0.0
    for j in d.d_plus:
        if not zb[j] > 0.0:
            return 0.0
    jac = _moving_minor(problem.gram, moving)
    value = jac * _box_slice_integral(problem, model, tuning, d, z_err, quad_tol)
    return value / mass.estimate


def _box_slice_integral(problem, model, tuning, d: SignVector, z_err, quad_tol):
    """Integral of the Gaussian over the D0 box at fixed D+- coordinates."""
    lam = tuning.lam
    if any(lam[j] == 0.0 for j in d.d_zero):
        return 0.0
    axes, slots = [], []
    s_template = np.zeros(problem.p)
    for j, dj in enumerate(d.d):
        if dj == -1:
            s_template[j] = -lam[j]
        elif dj == 1:
            s_template[j] = lam[j]
        else:
            axes.append(("finite", -float(lam[j]), float(lam[j])))
            slots.append(("s", j))
    f = _gaussian_slice(problem, model, tuning, d, z_err, s_template, slots)
    if not axes:
        return f([])
    return _nested_quad(axes, f, quad_tol / max(1, len(axes)))


def cdf(
    problem: DesignProblem,
    model: GaussianModel,
    tuning: TuningVector,
    z,
    *,
    coords: str = "error",
    quad_tol: float = 1e-5,
) -> float:
    """F(z) = P(u <= z componentwise), error coordinates by default.

    Sums the 3^p sign-pattern parts; each is a nested integral (tails for D-,
    the interval (-beta_j, z_j] for D+, the lambda-box for D0) of the same
    Gaussian slice as everywhere else, with the part dropped whenever its own
    constraint set is empty (z_j < -beta_j on D0, z_j <= -beta_j on D+).
    """
    _check_shapes(problem, model, tuning)
    _require_quad(problem, problem.p)
    if problem.p > CDF_P_LIMIT:
        raise DimensionLimitError(
            f"cdf sums 3^p quadratures; p = {problem.p} > {CDF_P_LIMIT}. "
            "Use the simulation module's empirical CDF instead."
        )
    z = np.asarray(z, dtype=float).ravel()
    if z.shape[0] != problem.p:
        raise InputError("z must have length p")
    if coords == "estimator":
        z = z - model.beta
    elif coords != "error":
        raise InputError("coords must be 'error' or 'estimator'")
    beta, lam = model.beta, tuning.lam
    scales = _quad_scales(problem, model)
    total = 0.0
    for pattern in product((-1, 0, 1), repeat=problem.p):
        total += _cdf_term(problem, model, tuning, pattern, z, beta, lam, scales, quad_tol)
    return float(min(max(total, 0.0), 1.0))


def _cdf_term(problem, model, tuning, pattern, z, beta, lam, scales, quad_tol):
    axes, slots = [], []
    m_template = np.zeros(problem.p)
    s_template = np.zeros(problem.p)
    for j, dj in enumerate(pattern):
        if dj == 0:
            if z[j] < -beta[j] or lam[j] == 0.0:
                return 0.0  # atom at u_j = -beta_j misses the event or is massless
            axes.append(("finite", -float(lam[j]), float(lam[j])))
            slots.append(("s", j))
            m_template[j] = -beta[j]
        elif dj == -1:
            axes.append(("tail_low", float(min(z[j], -beta[j])), float(scales[j])))
            slots.append(("m", j))
            s_template[j] = -lam[j]
        else:
            if z[j] <= -beta[j]:
                return 0.0  # the interval (-beta_j, z_j] is empty
            axes.append(("finite", float(-beta[j]), float(z[j])))
            slots.append(("m", j))
            s_template[j] = lam[j]
    d = SignVector(d=tuple(pattern))
    f = _gaussian_slice(problem, model, tuning, d, m_template, s_template, slots)
    jac = _moving_minor(problem.gram, sorted(d.d_minus + d.d_plus))
    return jac * _nested_quad(axes, f, quad_tol / max(1, len(axes)) / max(jac, 1.0))


def error_density(problem: DesignProblem, model: GaussianModel, tuning: TuningVector, z) -> float:
    """Density of the full-support continuous part of the error at z.

    Nonzero only where every coordinate of z + beta has a strict sign d_j;
    there it equals |det X'X| times the Gaussian at X'X z + d*lam.
    Lower-dimensional parts carry no p-dimensional density and report 0.
    """
    _check_shapes(problem, model, tuning)
    _require_quad(problem, problem.p)
    z = np.asarray(z, dtype=float).ravel()
    if z.shape[0] != problem.p:
        raise InputError("z must have length p")
    d = np.sign(z + model.beta)
    if np.any(d == 0.0):
        return 0.0
    density = _CenteredGaussian(model.sigma**2 * problem.gram)
    jac = abs(float(np.linalg.det(problem.gram)))
    return jac * density.pdf(problem.gram @ z + d * tuning.lam)


def region_support_includes(j: int, zero_tol: float = ZERO_TOL):
    """Predicate factory: solutions whose coordinate j is active."""

    def region(B):
        return np.abs(B[:, j]) > zero_tol

    return region


def region_below(z):
    """Predicate factory: solutions componentwise <= z (estimator coordinates)."""
    z = np.asarray(z, dtype=float).ravel()

    def region(B):
        return np.all(B <= z, axis=1)

    return region


def prob_region_high(
    problem: DesignProblem,
    model: GaussianModel,
    tuning: TuningVector,
    region,
    method: str = "mc",
    *,
    n_samples: int = 100_000,
    seed: int = 0,
    solver_tol: float = 1e-10,
) -> RegionProbability:
    """P(bhat in B) for an arbitrary vectorized solution predicate, any rank.

    Monte Carlo over the solver. The estimate depends on the model only
    through mu = X beta, so fiber-equivalent parameter vectors give
    bit-identical results at the same seed.
    """
    _check_shapes(problem, model, tuning)
    if method != "mc":
        raise InputError(
            "prob_region_high is Monte Carlo only; prob_all_zero/prob_orthant_event "
            "have the deterministic paths"
        )
    return _mc_probability(problem, model, tuning, region, n_samples, seed, solver_tol)


def mvn_box_probability(
    mean, cov, lower, upper, *, n_samples: int = 8192, seed: int = 0, n_shifts: int = 8
) -> RegionProbability:
    """P(lower <= x <= upper) for x ~ N(mean, cov), bounds may be infinite.

    Nonsingular covariance: separation-of-variables transform evaluated on a
    scrambled Sobol set, with n_shifts independent scramblings; the spread of
    the per-shift means gives the reported error bound. Singular covariance:
    plain Monte Carlo through a reduced-rank factor.
    """
    mean = np.asarray(mean, dtype=float).ravel()
    lower = np.asarray(lower, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    cov = np.atleast_2d(np.asarray(cov, dtype=float))
    p = mean.shape[0]
    if cov.shape != (p, p) or lower.shape[0] != p or upper.shape[0] != p:
        raise InputError("mean/cov/bounds dimensions are inconsistent")
    if np.any(lower > upper):
        raise InputError("lower bound exceeds upper bound")
    sym = 0.5 * (cov + cov.T)
    if not np.allclose(cov, sym, rtol=1e-8, atol=1e-12):
        raise InputError("covariance must be symmetric")
    eigs = np.linalg.eigvalsh(sym)
    if eigs[0] < -1e-10 * max(1.0, eigs[-1]):
        raise InputError("covariance is not positive semidefinite")

    a = lower - mean
    b = upper - mean
    try:
        chol = np.linalg.cholesky(sym)
    except np.linalg.LinAlgError:
        return _mvn_box_singular(sym, mean, lower, upper, n_samples, seed)

    if p == 1:
        est = float(norm.cdf(b[0] / chol[0, 0]) - norm.cdf(a[0] / chol[0, 0]))
        return RegionProbability(min(max(est, 0.0), 1.0), 0.0, "quadrature", 0, None, 1e-14)

    per_shift = 2 ** int(np.clip(np.ceil(np.log2(max(n_samples // n_shifts, 64))), 6, 16))
    estimates = np.empty(n_shifts)
    for k in range(n_shifts):
        gen = np.random.Generator(np.random.Philox(np.random.SeedSequence((seed, k))))
        sob = qmc.Sobol(d=p - 1, scramble=True, seed=gen)
        w = sob.random_base2(int(np.log2(per_shift)))
        estimates[k] = _genz_estimate(chol, a, b, w)
    est = float(estimates.mean())
    spread = float(estimates.std(ddof=1) / math.sqrt(n_shifts))
    return RegionProbability(
        estimate=min(max(est, 0.0), 1.0),
        std_error=0.0,
        method="quadrature",
        n_samples=int(n_shifts * per_shift),
        seed=int(seed),
        quad_tol=3.0 * spread + 1e-12,
    )


def _genz_estimate(chol, a, b, w):
    m, p = w.shape[0], a.shape[0]
    with np.errstate(invalid="ignore"):
        dlo = float(norm.cdf(a[0] / chol[0, 0]))
        dhi = float(norm.cdf(b[0] / chol[0, 0]))
    f = np.full(m, max(dhi - dlo, 0.0))
    ys = np.empty((m, p - 1))
    lo, hi = np.full(m, dlo), np.full(m, dhi)
    for i in range(1, p):
        u = lo + w[:, i - 1] * (hi - lo)
        ys[:, i - 1] = norm.ppf(np.clip(u, 1e-16, 1.0 - 1e-16))
        center = ys[:, :i] @ chol[i, :i]
        lo = norm.cdf((a[i] - center) / chol[i, i])
        hi = norm.cdf((b[i] - center) / chol[i, i])
        f *= np.maximum(hi - lo, 0.0)
    return float(f.mean())


def _mvn_box_singular(sym, mean, lower, upper, n_samples, seed):
    eigs, vecs = np.linalg.eigh(sym)
    keep = eigs > max(1e-300, eigs[-1]) * sym.shape[0] * 1e-12
    factor = vecs[:, keep] * np.sqrt(eigs[keep])
    rank = factor.shape[1]
    slack_lo = lower - 1e-12 * (1.0 + np.abs(lower))
    slack_hi = upper + 1e-12 * (1.0 + np.abs(upper))
    hits = 0
    for _start, count, Z in gaussian_chunks(seed, n_samples, rank):
        x = mean + Z @ factor.T
        hits += int(np.count_nonzero(np.all((x >= slack_lo) & (x <= slack_hi), axis=1)))
    ph = hits / n_samples
    return RegionProbability(
        estimate=float(ph),
        std_error=float(math.sqrt(ph * (1.0 - ph) / n_samples)),
        method="monte-carlo",
        n_samples=int(n_samples),
        seed=int(seed),
        quad_tol=0.0,
    )
