"""LP-backed cone predicates against independent oracles."""

import itertools
import math

import numpy as np
import pytest

from conic_phase.errors import DegenerateInputError, DomainError
from conic_phase.geometry import (
    PointSet,
    SubspaceBasis,
    cone_contains,
    cone_meets_subspace,
    is_face,
    orthonormal_complement,
    strict_halfspace_feasible,
)

from oracles import (
    cone_member_scipy,
    planar_cone_member,
    planar_extreme_indices,
    planar_strictly_separable,
    strictly_separable_scipy,
)


def _random_unit_rows(rng, n, d):
    pts = rng.standard_normal((n, d))
    return pts / np.linalg.norm(pts, axis=1)[:, None]


class TestPointSet:
    def test_normalizes_on_ingest(self):
        ps = PointSet.from_vectors([[3.0, 0.0], [0.0, 0.2]])
        assert np.allclose(np.linalg.norm(ps.points, axis=1), 1.0, atol=1e-12)

    def test_rejects_zero_vector(self):
        with pytest.raises(DegenerateInputError):
            PointSet.from_vectors([[1.0, 0.0], [0.0, 0.0]])

    def test_rejects_non_finite(self):
        with pytest.raises(DomainError):
            PointSet.from_vectors([[1.0, math.inf]])


class TestStrictHalfspaceFeasible:
    def test_quarter_plane(self):
        assert strict_halfspace_feasible(PointSet.from_vectors([[1, 0], [0, 1]]))

    def test_coordinate_cross_spans(self):
        ps = PointSet.from_vectors([[1, 0], [-1, 0], [0, 1], [0, -1]])
        assert not strict_halfspace_feasible(ps)

    def test_antipodal_pair_not_strictly_separable(self):
        # The pair spans only a line, but it fits in no open halfplane.
        assert not strict_halfspace_feasible(PointSet.from_vectors([[1, 0], [-1, 0]]))

    def test_single_point(self):
        assert strict_halfspace_feasible(PointSet.from_vectors([[0.6, 0.8]]))

    def test_wendel_frequency(self):
        # 4 Gaussian points in the plane separate with probability 1/2.
        rng = np.random.default_rng(5)
        trials = 4000
        hits = sum(
            strict_halfspace_feasible(PointSet(2, _random_unit_rows(rng, 4, 2)))
            for _ in range(trials)
        )
        sigma = math.sqrt(0.25 / trials)
        assert abs(hits / trials - 0.5) < 4 * sigma

    def test_against_scipy_oracle(self):
        rng = np.random.default_rng(42)
        for _ in range(400):
            d = int(rng.integers(1, 6))
            n = int(rng.integers(1, 12))
            pts = _random_unit_rows(rng, n, d)
            assert strict_halfspace_feasible(PointSet(d, pts)) == strictly_separable_scipy(pts)

    def test_against_planar_oracle(self):
        rng = np.random.default_rng(43)
        for _ in range(500):
            n = int(rng.integers(2, 9))
            pts = _random_unit_rows(rng, n, 2)
            assert strict_halfspace_feasible(PointSet(2, pts)) == planar_strictly_separable(pts)

    def test_deterministic(self):
        rng = np.random.default_rng(1)
        pts = _random_unit_rows(rng, 7, 3)
        ps = PointSet(3, pts)
        results = {strict_halfspace_feasible(ps) for _ in range(25)}
        assert len(results) == 1


class TestIsFace:
    def test_planar_extremes_against_angular_oracle(self):
        rng = np.random.default_rng(17)
        checked = 0
        while checked < 200:
            pts = _random_unit_rows(rng, 4, 2)
            if not planar_strictly_separable(pts):
                continue
            ps = PointSet(2, pts)
            extremes = planar_extreme_indices(pts)
            faces = {i for i in range(4) if is_face(ps, [i])}
            assert faces == extremes
            assert len(faces) == 2
            checked += 1

    def test_simplicial_all_subsets(self):
        rng = np.random.default_rng(23)
        pts = _random_unit_rows(rng, 4, 4)
        ps = PointSet(4, pts)
        for k in range(1, 5):
            for subset in itertools.combinations(range(4), k):
                assert is_face(ps, subset)

    def test_interior_generator_not_a_face(self):
        ps = PointSet.from_vectors([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]])
        assert not is_face(ps, [3])
        for i in range(3):
            assert is_face(ps, [i])

    def test_rank_deficient_subset(self):
        ps = PointSet.from_vectors([[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, 0, 1]])
        assert not is_face(ps, [0, 1])

    def test_faces_of_faces_are_faces(self):
        rng = np.random.default_rng(31)
        for _ in range(40):
            d = int(rng.integers(2, 5))
            n = int(rng.integers(d, 9))
            pts = _random_unit_rows(rng, n, d)
            ps = PointSet(d, pts)
            for k in range(2, d + 1):
                for subset in itertools.combinations(range(n), k):
                    if not is_face(ps, subset):
                        continue
                    for smaller in range(1, k):
                        for sub in itertools.combinations(subset, smaller):
                            assert is_face(ps, sub)

    def test_index_validation(self):
        ps = PointSet.from_vectors([[1, 0], [0, 1]])
        with pytest.raises(DomainError):
            is_face(ps, [])
        with pytest.raises(DomainError):
            is_face(ps, [0, 0])
        with pytest.raises(DomainError):
            is_face(ps, [5])
        with pytest.raises(DomainError):
            is_face(ps, [0, 1, 0, 1, 1])  # duplicates and size > d


class TestConeContains:
    def test_generator_and_negated_sum(self):
        ps = PointSet.from_vectors([[1, 0], [0, 1]])
        assert cone_contains(ps, [1, 0])
        assert not cone_contains(ps, [-1, -1])

    def test_origin(self):
        ps = PointSet.from_vectors([[1, 0], [0, 1]])
        assert cone_contains(ps, [0.0, 0.0])

    def test_against_scipy(self):
        rng = np.random.default_rng(77)
        for _ in range(300):
            d = int(rng.integers(2, 5))
            n = int(rng.integers(2, 9))
            pts = _random_unit_rows(rng, n, d)
            y = rng.standard_normal(d)
            assert cone_contains(PointSet(d, pts), y) == cone_member_scipy(pts, y / np.linalg.norm(y))

    def test_planar_arc_oracle(self):
        rng = np.random.default_rng(78)
        checked = 0
        while checked < 200:
            pts = _random_unit_rows(rng, 3, 2)
            if not planar_strictly_separable(pts):
                continue
            y = rng.standard_normal(2)
            assert cone_contains(PointSet(2, pts), y) == planar_cone_member(pts, y)
            checked += 1


class TestConeMeetsSubspace:
    def test_span_of_generator(self):
        ps = PointSet.from_vectors([[1, 0], [0, 1]])
        assert cone_meets_subspace(ps, SubspaceBasis(2, [[1.0, 0.0]]))

    def test_line_outside_pointed_cone(self):
        ps = PointSet.from_vectors([[1, 0], [0, 1]])
        direction = np.array([-1.0, 1.0]) / math.sqrt(2)
        assert not cone_meets_subspace(ps, SubspaceBasis(2, [direction]))

    def test_planar_line_oracle(self):
        # A line meets a pointed planar cone iff one of its two directions
        # lies in the cone.
        rng = np.random.default_rng(4)
        checked = 0
        while checked < 200:
            pts = _random_unit_rows(rng, 3, 2)
            if not planar_strictly_separable(pts):
                continue
            ps = PointSet(2, pts)
            v = rng.standard_normal(2)
            v /= np.linalg.norm(v)
            expected = planar_cone_member(pts, v) or planar_cone_member(pts, -v)
            assert cone_meets_subspace(ps, SubspaceBasis(2, [v])) == expected
            checked += 1

    def test_full_space_subspace(self):
        ps = PointSet.from_vectors([[1, 0], [0, 1]])
        assert cone_meets_subspace(ps, SubspaceBasis(2, np.eye(2)))

    def test_orthonormality_enforced(self):
        with pytest.raises(DomainError):
            SubspaceBasis(2, [[1.0, 1.0]])


class TestOrthonormalComplement:
    def test_coordinate_axis(self):
        basis = orthonormal_complement([[1.0, 0.0, 0.0]])
        assert basis.subspace_dimension == 2
        assert np.max(np.abs(basis.basis @ np.array([1.0, 0.0, 0.0]))) < 1e-10
        gram = basis.basis @ basis.basis.T
        assert np.max(np.abs(gram - np.eye(2))) < 1e-10

    def test_full_rank_gives_empty(self):
        basis = orthonormal_complement(np.eye(3))
        assert basis.subspace_dimension == 0

    def test_diagonal_direction(self):
        v = np.array([1.0, 1.0, 0.0]) / math.sqrt(2)
        basis = orthonormal_complement([v])
        assert basis.subspace_dimension == 2
        assert np.max(np.abs(basis.basis @ v)) < 1e-10

    def test_rank_deficient_input(self):
        vecs = [[1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]
        basis = orthonormal_complement(vecs)
        assert basis.subspace_dimension == 2

    def test_projection_orthogonality_random(self):
        rng = np.random.default_rng(6)
        for _ in range(50):
            d = int(rng.integers(2, 7))
            k = int(rng.integers(1, d))
            vecs = _random_unit_rows(rng, k, d)
            comp = orthonormal_complement(vecs)
            assert comp.subspace_dimension == d - k
            assert np.max(np.abs(comp.basis @ vecs.T)) < 1e-10
