"""Deterministic conic geometry predicates built on small dense LPs.

Every simulation in this package reduces to four questions about a finite
set of unit generators: do they fit in an open halfspace, does a subset
span a face, does the cone contain a direction, does it meet a subspace.
Each is decided by a linear program solved with Bland's rule, so repeated
evaluation of the same input gives the same answer bit for bit.

General-position inputs (the almost-sure case for the distributions used
here) are decided cleanly; inputs within tolerance of a measure-zero
configuration raise :class:`DegenerateInputError` instead of guessing.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import _kernels
from .errors import DegenerateInputError, DomainError, SolverError

STRICT_TOL = 1e-9
RESIDUAL_TOL = 1e-9
RANK_TOL = 1e-9
NORM_TOL = 1e-12
ORTHO_TOL = 1e-10

__all__ = [
    "PointSet",
    "SubspaceBasis",
    "strict_halfspace_feasible",
    "is_face",
    "cone_contains",
    "cone_meets_subspace",
    "orthonormal_complement",
]


def _as_unit_rows(vectors, what: str) -> np.ndarray:
    arr = np.array(vectors, dtype=np.float64, order="C")
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DomainError(f"{what} must be a nonempty 2-d array of vectors")
    if not np.all(np.isfinite(arr)):
        raise DomainError(f"{what} contains non-finite coordinates")
    norms = np.linalg.norm(arr, axis=1)
    if np.any(norms < NORM_TOL):
        raise DegenerateInputError(f"{what} contains a vector of norm < {NORM_TOL}")
    return arr / norms[:, None]


@dataclass(eq=False)
class PointSet:
    """An ordered set of generators in R^d, normalized to unit length on ingest."""

    dimension: int
    points: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.points = _as_unit_rows(self.points, "point set")
        if self.points.shape[1] != self.dimension:
            raise DomainError(
                f"points have {self.points.shape[1]} coordinates, expected {self.dimension}"
            )

    @classmethod
    def from_vectors(cls, vectors) -> "PointSet":
        arr = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
        return cls(arr.shape[1], arr)

    def __len__(self) -> int:
        return self.points.shape[0]


@dataclass(eq=False)
class SubspaceBasis:
    """Orthonormal basis (rows) of an m-dimensional subspace of R^d; m may be 0."""

    dimension: int
    basis: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.basis = np.array(self.basis, dtype=np.float64, order="C").reshape(
            -1, self.dimension
        )
        m = self.basis.shape[0]
        if m:
            gram = self.basis @ self.basis.T
            if np.max(np.abs(gram - np.eye(m))) > ORTHO_TOL:
                raise DomainError("basis rows are not orthonormal within 1e-10")

    @property
    def subspace_dimension(self) -> int:
        return self.basis.shape[0]


def _strict_feasible_raw(points: np.ndarray, tol_strict: float) -> bool:
    """Decision core shared by the public predicate and the hot loops.

    The margin LP maximizes t over <u, p_j> + t <= 0 with u in a unit box;
    u = 0 is always admissible, so the optimum is >= 0, is bounded away
    from 0 for strictly separable general-position inputs, and equals 0
    exactly when the points positively span.  A positive verdict needs
    t* > tol; a negative verdict additionally requires the positive-span
    certificate (the origin in the convex hull) to hold within tolerance,
    otherwise the input is declared degenerate.

    A stalled margin solve (degenerate churn at the optimum) still yields a
    primal feasible, hence one-sided, margin: t* > tol remains a sound
    positive verdict, and the certificate decides the rest.
    """
    status, t_star = _kernels.max_margin_lp(np.ascontiguousarray(points))
    if status == 1:
        raise SolverError("margin LP exceeded its iteration cap")
    if status == 2:
        raise SolverError("margin LP broke down numerically")
    if t_star > tol_strict:
        return True
    m, n = points.shape[1], points.shape[0]
    hull = np.empty((m + 1, n))
    hull[:m] = points.T
    hull[m] = 1.0
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    status, infeas = _kernels.phase1_infeasibility(hull, rhs)
    if status == 1:
        raise SolverError("certificate LP exceeded its iteration cap")
    if status == 2 or not infeas <= RESIDUAL_TOL:
        raise DegenerateInputError(
            f"margin {t_star:.3e} below tolerance and no positive-span certificate"
        )
    return False


def strict_halfspace_feasible(points: PointSet, tol_strict: float = STRICT_TOL) -> bool:
    """True iff some u has <u, p> < 0 for every generator p, i.e. the points
    fit in an open halfspace bounded by a hyperplane through the origin."""
    return _strict_feasible_raw(points.points, tol_strict)


def _feasibility(system: np.ndarray, rhs: np.ndarray) -> bool:
    status, infeas = _kernels.phase1_infeasibility(
        np.ascontiguousarray(system), np.ascontiguousarray(rhs)
    )
    if status == 1:
        raise SolverError("feasibility LP exceeded its iteration cap")
    if status == 2:
        raise SolverError("feasibility LP broke down numerically")
    if status == 3 and infeas > RESIDUAL_TOL:
        # The phase-1 objective only ever decreases, so a stall that already
        # reached the tolerance certifies feasibility; a stall above it does
        # not certify anything.
        raise SolverError("feasibility LP stalled before reaching a verdict")
    return bool(infeas <= RESIDUAL_TOL)


def cone_contains(points: PointSet, y) -> bool:
    """True iff y is a nonnegative combination of the generators."""
    vec = np.asarray(y, dtype=np.float64).reshape(-1)
    if vec.shape[0] != points.dimension:
        raise DomainError(f"direction has {vec.shape[0]} coordinates, expected {points.dimension}")
    if not np.all(np.isfinite(vec)):
        raise DomainError("direction contains non-finite coordinates")
    norm = np.linalg.norm(vec)
    if norm < NORM_TOL:
        return True  # the origin belongs to every cone
    return _feasibility(points.points.T, vec / norm)


def cone_meets_subspace(points: PointSet, subspace: SubspaceBasis) -> bool:
    """True iff the cone intersects the subspace in more than the origin.

    Decided by feasibility of a unit-mass nonnegative combination whose
    projection onto the orthogonal complement of the subspace vanishes.
    """
    if subspace.dimension != points.dimension:
        raise DomainError("subspace and points live in different dimensions")
    if subspace.subspace_dimension < 1:
        raise DomainError("subspace must have dimension >= 1")
    if subspace.subspace_dimension == points.dimension:
        return True
    span_rank, Q = _kernels.span_and_complement(
        np.ascontiguousarray(subspace.basis), RANK_TOL
    )
    complement = Q[span_rank:]
    coords = points.points @ complement.T  # (n, d-m)
    r = coords.shape[1]
    system = np.empty((r + 1, len(points)))
    system[:r] = coords.T
    system[r] = 1.0
    rhs = np.zeros(r + 1)
    rhs[r] = 1.0
    return _feasibility(system, rhs)


def orthonormal_complement(vectors) -> SubspaceBasis:
    """Orthonormal basis of the orthogonal complement of span(vectors).

    Rank is decided by modified Gram-Schmidt with reorthogonalization at
    relative threshold 1e-9 against the largest input norm; rank-deficient
    input is handled (the complement just gets larger).
    """
    arr = np.atleast_2d(np.asarray(vectors, dtype=np.float64))
    if arr.size == 0 or arr.ndim != 2:
        raise DomainError("need a nonempty list of vectors")
    if not np.all(np.isfinite(arr)):
        raise DomainError("vectors contain non-finite coordinates")
    scale = float(np.max(np.linalg.norm(arr, axis=1)))
    tol = RANK_TOL * max(scale, 1.0)
    span_rank, Q = _kernels.span_and_complement(
        np.ascontiguousarray(arr, dtype=np.float64), tol
    )
    return SubspaceBasis(arr.shape[1], Q[span_rank:].copy())


def _face_indices(n: int, subset: Iterable[int]) -> np.ndarray:
    idx = np.asarray(list(subset), dtype=np.intp)
    if idx.size == 0:
        raise DomainError("subset must be nonempty")
    if len(set(idx.tolist())) != idx.size:
        raise DomainError("subset indices must be distinct")
    if idx.min() < 0 or idx.max() >= n:
        raise DomainError(f"subset indices out of range for {n} points")
    return idx


def is_face(points: PointSet, subset: Sequence[int]) -> bool:
    """True iff the positive hull of the chosen generators is a face of the cone.

    The subset must have full rank, and the remaining generators, projected
    onto the orthogonal complement of the subset's span, must fit in an
    open halfspace (the supporting-hyperplane characterization in general
    position).  With no remaining generators the answer is True.
    """
    arr = points.points
    n, d = arr.shape
    idx = _face_indices(n, subset)
    k = idx.size
    if k > d:
        raise DomainError(f"subset of size {k} cannot span a face in dimension {d}")
    span_rank, Q = _kernels.span_and_complement(
        np.ascontiguousarray(arr[idx]), RANK_TOL
    )
    if span_rank < k:
        return False
    mask = np.ones(n, dtype=bool)
    mask[idx] = False
    rest = arr[mask]
    if rest.shape[0] == 0:
        return True
    if span_rank == d:
        return False  # zero-dimensional complement admits no strict separation
    projected = rest @ Q[span_rank:].T
    norms = np.linalg.norm(projected, axis=1)
    if np.any(norms < NORM_TOL):
        raise DegenerateInputError(
            "a non-subset generator lies in the subset's span"
        )
    return _strict_feasible_raw(projected / norms[:, None], STRICT_TOL)
