"""Polyhedral geometry of the weighted Lasso.

Faces of the lambda-box and their intersection with the row space col(X')
decide which models are selectable, which coordinates the structural set
keeps, and (through the faces one rank above rk(X)) whether the solution is
unique for every response. All intersection questions reduce to small LP
feasibility problems in z (the n response-space variables), solved by the
phase-1 simplex.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from .errors import CombinatorialLimitError, InputError, NumericalError
from .model import ZERO_TOL, DesignProblem, TuningVector, sign_partition
from .simplex import feasible_point
from .solver import LassoSolution, solve

UNIQUENESS_LIMIT = 14
SELECTABLE_LIMIT = 30
GENERAL_POSITION_LIMIT = 12


@dataclass(frozen=True, eq=False)
class FaceBox:
    """A fully sign-resolved face of the box prod_j [-lam_j, lam_j].

    fixed_sign[j] in {-1, 0, +1}: nonzero pins coordinate j at
    fixed_sign[j] * lam_j, zero leaves the full interval. Coordinates with
    lam_j = 0 that belong to the face's model are stored with sign +1 and pin
    the (degenerate) value 0.
    """

    lam: np.ndarray
    fixed_sign: np.ndarray

    @property
    def model(self) -> tuple:
        return tuple(int(j) for j in np.flatnonzero(self.fixed_sign != 0))

    def contains(self, v, tol: float = 1e-9) -> bool:
        v = np.asarray(v, dtype=float).ravel()
        if v.shape[0] != self.lam.shape[0]:
            raise InputError("probe vector has the wrong length")
        fixed = self.fixed_sign != 0
        if np.any(np.abs(v[fixed] - self.fixed_sign[fixed] * self.lam[fixed]) > tol):
            return False
        return bool(np.all(np.abs(v[~fixed]) <= self.lam[~fixed] + tol))


def face_box(tuning: TuningVector, model, signs) -> FaceBox:
    model = tuple(int(j) for j in model)
    signs = tuple(int(s) for s in signs)
    if len(model) != len(signs) or any(s not in (-1, 1) for s in signs):
        raise InputError("each model index needs a sign in {-1, +1}")
    if len(set(model)) != len(model):
        raise InputError("model indices must be distinct")
    fixed = np.zeros(tuning.p, dtype=int)
    for j, s in zip(model, signs):
        if not 0 <= j < tuning.p:
            raise InputError(f"model index {j} out of range")
        fixed[j] = 1 if tuning.lam[j] == 0.0 else s
    return FaceBox(lam=tuning.lam, fixed_sign=fixed)


def _sign_patterns(tuning, model, fix_first=False):
    """All sign resolutions of a face family, lam_j = 0 slots collapsed to +1.

    fix_first pins the first positively-penalized index at +1; valid whenever
    the caller's feasibility question is invariant under v -> -v (col(X') is
    a subspace and the box is symmetric), which halves the enumeration.
    """
    slots = []
    fixed_one = fix_first
    for j in model:
        if tuning.lam[j] == 0.0:
            slots.append((1,))
        elif fixed_one:
            slots.append((1,))
            fixed_one = False
        else:
            slots.append((1, -1))
    return product(*slots)


@dataclass(frozen=True, eq=False)
class RowSpacePoint:
    """A point v = X'z of the row space, with its certificate z."""

    v: np.ndarray
    z: np.ndarray


def face_intersects_row_space(problem: DesignProblem, face: FaceBox, tol: float = 1e-9):
    """Find v = X'z inside the face, or None if col(X') misses it.

    LP feasibility in z: (X'z)_j pinned on the face's model, boxed elsewhere.
    Boundary-touching points count as intersecting (the face is closed).
    """
    if face.lam.shape[0] != problem.p:
        raise InputError("face does not match the design dimension")
    X = problem.X
    fixed = face.fixed_sign != 0
    a_eq = X[:, fixed].T
    b_eq = (face.fixed_sign[fixed] * face.lam[fixed]).astype(float)
    free_cols = X[:, ~fixed].T
    a_ub = np.vstack([free_cols, -free_cols])
    b_ub = np.concatenate([face.lam[~fixed], face.lam[~fixed]])
    z = feasible_point(a_eq, b_eq, a_ub, b_ub, n_free=problem.n, tol=tol)
    if z is None:
        return None
    return RowSpacePoint(v=X.T @ z, z=z)


def selectable(problem: DesignProblem, tuning: TuningVector, model, tol: float = 1e-9) -> bool:
    """Can some response make the Lasso select exactly this model?

    True iff some sign resolution of the face family B_model meets col(X').
    """
    model = sorted({int(j) for j in model})
    if tuning.p != problem.p:
        raise InputError("tuning vector length does not match the design")
    if any(not 0 <= j < problem.p for j in model):
        raise InputError("model indices out of range")
    if len(model) > SELECTABLE_LIMIT:
        raise CombinatorialLimitError(
            f"model has {len(model)} indices; sign enumeration capped at {SELECTABLE_LIMIT}"
        )
    if not model:
        return True  # v = 0 lies in every lambda-box and in col(X')
    for signs in _sign_patterns(tuning, model, fix_first=True):
        if face_intersects_row_space(problem, face_box(tuning, model, signs), tol) is not None:
            return True
    return False


def structural_set(problem: DesignProblem, tuning: TuningVector, tol: float = 1e-9) -> tuple:
    """Indices that appear in some Lasso solution for some response.

    By v -> -v symmetry only the +1 face of each index needs an LP; indices
    with lam_j = 0 are always members (z = 0 certifies them).
    """
    if tuning.p != problem.p:
        raise InputError("tuning vector length does not match the design")
    members = []
    for j in range(problem.p):
        if tuning.lam[j] == 0.0:
            members.append(j)
            continue
        face = face_box(tuning, (j,), (1,))
        if face_intersects_row_space(problem, face, tol) is not None:
            members.append(j)
    return tuple(members)


@dataclass(frozen=True, eq=False)
class NonuniquenessWitness:
    y: np.ndarray
    b: np.ndarray
    b_tilde: np.ndarray


@dataclass(frozen=True, eq=False)
class ViolatingFace:
    model: tuple
    signs: tuple
    v: np.ndarray


@dataclass(frozen=True, eq=False)
class UniquenessVerdict:
    unique: bool
    witness: NonuniquenessWitness | None
    violating_face: ViolatingFace | None


def check_uniqueness(problem: DesignProblem, tuning: TuningVector, tol: float = 1e-9) -> UniquenessVerdict:
    """Is the Lasso solution unique for every response y?

    Unique iff col(X') misses every face B_M with |M| > rk(X); by face
    nesting it suffices to scan |M| = rk(X)+1. The first face found to
    intersect (models in lexicographic order, signs with the leading
    positively-penalized index pinned at +1) is returned with a constructed
    two-solution witness.
    """
    if tuning.p != problem.p:
        raise InputError("tuning vector length does not match the design")
    if problem.p > UNIQUENESS_LIMIT:
        raise CombinatorialLimitError(
            f"p={problem.p} exceeds the enumeration limit {UNIQUENESS_LIMIT}; "
            "general_position() is a sufficient-only fallback for uniform tuning"
        )
    rank = problem.rank_x
    if rank >= problem.p:
        return UniquenessVerdict(unique=True, witness=None, violating_face=None)
    for model in combinations(range(problem.p), rank + 1):
        for signs in _sign_patterns(tuning, model, fix_first=True):
            face = face_box(tuning, model, signs)
            point = face_intersects_row_space(problem, face, tol)
            if point is None:
                continue
            witness = construct_nonuniqueness_witness(
                problem, tuning, model, point.v, z=point.z
            )
            return UniquenessVerdict(
                unique=False,
                witness=witness,
                violating_face=ViolatingFace(model=model, signs=tuple(signs), v=point.v),
            )
    return UniquenessVerdict(unique=True, witness=None, violating_face=None)


def construct_nonuniqueness_witness(
    problem: DesignProblem, tuning: TuningVector, model, v, z=None
) -> NonuniquenessWitness:
    """Turn a face certificate v = X'z (|model| > rk X) into two solutions.

    If the face contains an unpenalized zero column the witness is immediate
    (that coefficient is arbitrary). Otherwise some column of X_model depends
    on the others; splitting the dependency across the two solutions keeps
    X b = X b_tilde and g = X'y - X'Xb = v, so both satisfy the first-order
    conditions at y = z + Xb while differing in coordinate j by 1/(2c).
    """
    model = sorted(int(j) for j in model)
    v = np.asarray(v, dtype=float).ravel()
    if v.shape[0] != problem.p:
        raise InputError("v must have length p")
    if len(model) <= problem.rank_x:
        raise InputError("witness construction needs |model| > rank(X)")
    X, lam = problem.X, tuning.lam
    if z is None:
        z, *_ = np.linalg.lstsq(X.T, v, rcond=None)
    z = np.asarray(z, dtype=float).ravel()
    if np.max(np.abs(X.T @ z - v)) > 1e-8 * (1.0 + np.max(np.abs(v))):
        raise InputError("v is not a row-space point (no z with X'z = v)")

    for j in model:
        if lam[j] == 0.0 and not np.any(X[:, j]):
            b = np.zeros(problem.p)
            b_tilde = np.zeros(problem.p)
            b_tilde[j] = 1.0
            return NonuniquenessWitness(y=z.copy(), b=b, b_tilde=b_tilde)

    col_scale = max(1.0, float(np.max(np.abs(X[:, model]))))
    for j in model:
        others = [l for l in model if l != j]
        if not others:
            break
        d = float(np.sign(v[j])) if lam[j] > 0 else 1.0
        if d == 0.0:
            d = 1.0
        coef, *_ = np.linalg.lstsq(X[:, others], d * X[:, j], rcond=None)
        if np.max(np.abs(X[:, others] @ coef - d * X[:, j])) > 1e-8 * col_scale:
            continue  # X_j independent of the rest; try the next index
        c = float(np.max(np.abs(coef)))
        if c <= 1e-12:
            continue  # zero column with lam_j > 0 cannot sit on this face
        b = np.zeros(problem.p)
        b[others] = np.sign(v[others])
        b[j] = d / (2.0 * c)
        y = z + X @ b
        b_tilde = np.zeros(problem.p)
        b_tilde[others] = np.sign(v[others]) + coef / (2.0 * c)
        return NonuniquenessWitness(y=y, b=b, b_tilde=b_tilde)
    raise NumericalError(
        "no dependent column found over the face's model; certificate inconsistent "
        "with |model| > rank(X)"
    )


def general_position(problem: DesignProblem) -> bool:
    """No k-dim affine subspace (k < min(n,p)) holds k+2 of the signed columns.

    Checked exhaustively: every choice of k+2 distinct column indices and
    signs (first sign pinned to +1; a global flip preserves affine
    dependence) must span a full (k+1)-dimensional affine hull. Sufficient
    for uniqueness under uniform tuning, not necessary.
    """
    if problem.p > GENERAL_POSITION_LIMIT:
        raise CombinatorialLimitError(
            f"p={problem.p} exceeds the general-position enumeration limit "
            f"{GENERAL_POSITION_LIMIT}"
        )
    X = problem.X
    for k in range(min(problem.n, problem.p)):
        size = k + 2
        if size > problem.p:
            break
        for idx in combinations(range(problem.p), size):
            cols = X[:, idx]
            for signs in product((1.0, -1.0), repeat=size - 1):
                pts = cols * np.concatenate(([1.0], signs))
                diffs = pts[:, 1:] - pts[:, [0]]
                if np.linalg.matrix_rank(diffs) <= k:
                    return False
    return True


@dataclass(frozen=True, eq=False)
class ShrinkageSet:
    """All points mapped to the Lasso output b.

    domain == "xty": membership of v means v in X'Xb + prod_j B_j(b_j), the
    set of X'y values producing b (any rank). domain == "ls_estimate":
    membership of z means the least-squares estimate z is mapped to b (full
    column rank; the probe is gram @ z).
    """

    center: np.ndarray
    box: FaceBox
    b: np.ndarray
    gram: np.ndarray
    domain: str

    def contains(self, point, tol: float = 1e-9) -> bool:
        point = np.asarray(point, dtype=float).ravel()
        probe = self.gram @ point if self.domain == "ls_estimate" else point
        return self.box.contains(probe - self.center, tol=tol)


def _signed_box(problem, tuning, b, zero_tol):
    d = sign_partition(b, zero_tol)
    model = tuple(j for j in range(problem.p) if d.d[j] != 0)
    signs = tuple(d.d[j] for j in model)
    return face_box(tuning, model, signs)


def shrinkage_set_high(
    problem: DesignProblem, tuning: TuningVector, b, zero_tol: float = ZERO_TOL
) -> ShrinkageSet:
    """The X'y values whose Lasso solution set contains b (any rank)."""
    b = np.asarray(b, dtype=float).ravel()
    if b.shape[0] != problem.p:
        raise InputError("b must have length p")
    return ShrinkageSet(
        center=problem.gram @ b,
        box=_signed_box(problem, tuning, b, zero_tol),
        b=b.copy(),
        gram=problem.gram,
        domain="xty",
    )


def shrinkage_set_low(
    problem: DesignProblem, tuning: TuningVector, b, zero_tol: float = ZERO_TOL
) -> ShrinkageSet:
    """The least-squares estimates mapped to Lasso output b (full column rank)."""
    if problem.rank_x < problem.p:
        raise InputError("design is rank deficient; use shrinkage_set_high")
    b = np.asarray(b, dtype=float).ravel()
    if b.shape[0] != problem.p:
        raise InputError("b must have length p")
    return ShrinkageSet(
        center=problem.gram @ b,
        box=_signed_box(problem, tuning, b, zero_tol),
        b=b.copy(),
        gram=problem.gram,
        domain="ls_estimate",
    )


def shrinkage_singleton(problem: DesignProblem, tuning: TuningVector, b) -> np.ndarray:
    """The unique LS point mapped to an all-active b:  b + (X'X)^{-1}(sgn(b) lam)."""
    if problem.rank_x < problem.p:
        raise InputError("design is rank deficient; the singleton needs full column rank")
    b = np.asarray(b, dtype=float).ravel()
    if np.any(b == 0.0):
        raise InputError("singleton form requires every coefficient nonzero")
    return b + np.linalg.solve(problem.gram, np.sign(b) * tuning.lam)


def map_ls_to_lasso(
    problem: DesignProblem, tuning: TuningVector, z_ls, tol: float = 1e-10
) -> LassoSolution:
    """The unique b whose shrinkage area contains the given LS estimate.

    Computed by solving the Lasso at y = X z_ls; the output is cross-checked
    by shrinkage-area membership before returning.
    """
    if problem.rank_x < problem.p:
        raise InputError("design is rank deficient; the LS map needs full column rank")
    z_ls = np.asarray(z_ls, dtype=float).ravel()
    if z_ls.shape[0] != problem.p:
        raise InputError("z_ls must have length p")
    sol = solve(problem, problem.X @ z_ls, tuning, tol=tol)
    area = shrinkage_set_low(problem, tuning, sol.b)
    if not area.contains(z_ls, tol=max(1e-7, 1e3 * tol)):
        raise NumericalError("solver output failed the shrinkage-area membership cross-check")
    return sol
