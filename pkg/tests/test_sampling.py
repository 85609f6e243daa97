"""Samplers and Monte Carlo estimators against exact references."""

import math

import numpy as np
import pytest

from conic_phase.errors import (
    AcceptanceTooSmallError,
    DomainError,
)
from conic_phase.exact import expected_face_ratio, schlafli_count, wendel_probability
from conic_phase.sampling import (
    SampleConfig,
    duality_check,
    estimate_grassmann,
    estimate_solid_angle,
    sample_cover_efron,
    sample_directions,
    sample_schlafli,
    simulate_face_counts,
)

from oracles import count_cells_scipy


class TestSampleConfig:
    def test_validation(self):
        with pytest.raises(DomainError):
            SampleConfig(dimension=0, sample_count=3)
        with pytest.raises(DomainError):
            SampleConfig(dimension=2, sample_count=3, distribution="cauchy")
        with pytest.raises(DomainError):
            SampleConfig(dimension=2, sample_count=3, distribution="anisotropic_gaussian")
        with pytest.raises(DomainError):
            SampleConfig(dimension=2, sample_count=3, scales=(1.0, 2.0))
        SampleConfig(dimension=2, sample_count=3, distribution="anisotropic_gaussian", scales=(3.0, 1.0))


class TestSampleDirections:
    def test_unit_norm_and_shape(self):
        config = SampleConfig(dimension=3, sample_count=5, seed=1)
        ps = sample_directions(config, 20)
        assert ps.points.shape == (20, 3)
        assert np.allclose(np.linalg.norm(ps.points, axis=1), 1.0, atol=1e-12)

    def test_evenness_of_coordinate_means(self):
        config = SampleConfig(dimension=3, sample_count=5, seed=2)
        rng = np.random.default_rng(2)
        draws = sample_directions(config, 20_000, rng).points
        means = draws.mean(axis=0)
        assert np.all(np.abs(means) < 4.0 / math.sqrt(20_000))

    def test_distribution_free_wendel(self):
        # Separation frequency approximately C(4,2)/2^4 = 1/2 for all three
        # admissible distributions.
        from conic_phase.geometry import PointSet, strict_halfspace_feasible

        for dist, scales in (
            ("gaussian", None),
            ("uniform_sphere", None),
            ("anisotropic_gaussian", (3.0, 1.0)),
        ):
            config = SampleConfig(
                dimension=2, sample_count=4, distribution=dist, scales=scales, seed=3
            )
            rng = np.random.default_rng(10)
            trials = 3000
            hits = 0
            for _ in range(trials):
                ps = sample_directions(config, 4, rng)
                if strict_halfspace_feasible(ps):
                    hits += 1
            sigma = math.sqrt(0.25 / trials)
            assert abs(hits / trials - 0.5) < 4 * sigma, dist


class TestCoverEfron:
    def test_accepted_sample_is_conditioned(self):
        from conic_phase.geometry import strict_halfspace_feasible

        config = SampleConfig(dimension=3, sample_count=6, seed=9)
        gs = sample_cover_efron(config)
        assert strict_halfspace_feasible(gs.points)
        assert gs.rejections_used >= 0

    def test_simplicial_always_accepts(self):
        config = SampleConfig(dimension=4, sample_count=4, seed=9)
        assert wendel_probability(4, 4) == 1
        gs = sample_cover_efron(config)
        assert gs.rejections_used == 0

    def test_acceptance_rate_matches_wendel(self):
        config = SampleConfig(dimension=3, sample_count=5, seed=21)
        report = simulate_face_counts(config, [1], trials=2000)
        p = float(wendel_probability(3, 5))
        sigma = math.sqrt(p * (1 - p) / report.acceptance_attempts)
        assert abs(report.acceptance_rate - p) < 3 * sigma

    def test_refuses_tiny_acceptance(self):
        config = SampleConfig(dimension=3, sample_count=30, seed=1)
        assert float(wendel_probability(3, 30)) < 1e-6
        with pytest.raises(AcceptanceTooSmallError):
            sample_cover_efron(config)

    def test_unconditioned_mode_rejected(self):
        config = SampleConfig(dimension=3, sample_count=5, mode="unconditioned")
        with pytest.raises(DomainError):
            sample_cover_efron(config)


class TestSimulateFaceCounts:
    def test_planar_zero_variance(self):
        config = SampleConfig(dimension=2, sample_count=4, seed=5)
        report = simulate_face_counts(config, [1], trials=400)
        fs = report.face_stats[0]
        assert fs.mean_ratio == fs.exact_ratio == 0.5
        assert fs.se_ratio == 0.0
        assert fs.z_score == 0.0

    def test_three_five_within_three_sigma(self):
        config = SampleConfig(dimension=3, sample_count=5, seed=6)
        report = simulate_face_counts(config, [1, 2], trials=2000)
        for fs in report.face_stats:
            assert abs(fs.z_score) < 3.0

    def test_simplicial_all_faces(self):
        config = SampleConfig(dimension=4, sample_count=4, seed=7)
        report = simulate_face_counts(config, [1, 2, 3], trials=50)
        for fs in report.face_stats:
            assert fs.mean_ratio == 1.0
            assert fs.complete_fraction == 1.0

    def test_unconditioned_reference(self):
        # Unconditioned draws score zero faces when they span; the mean
        # ratio then estimates the unconditioned expectation P_{d-k, n-k}.
        config = SampleConfig(dimension=2, sample_count=4, mode="unconditioned", seed=8)
        report = simulate_face_counts(config, [1], trials=3000)
        fs = report.face_stats[0]
        assert fs.exact_ratio == pytest.approx(float(wendel_probability(1, 3)))
        assert fs.exact_ratio == 0.25
        assert abs(fs.z_score) < 3.0

    def test_enumeration_guard(self):
        config = SampleConfig(dimension=5, sample_count=70, seed=1)
        with pytest.raises(DomainError):
            simulate_face_counts(config, [1], trials=1)
        with pytest.raises(DomainError):
            simulate_face_counts(SampleConfig(dimension=3, sample_count=5), [4], trials=1)

    def test_reproducible(self):
        config = SampleConfig(dimension=3, sample_count=5, seed=123)
        r1 = simulate_face_counts(config, [1, 2], trials=60)
        r2 = simulate_face_counts(config, [1, 2], trials=60)
        assert r1 == r2


class TestAngleEstimators:
    def test_grassmann_two_three(self):
        config = SampleConfig(dimension=2, sample_count=3, seed=10)
        report = estimate_grassmann(config, 1, trials=3000)
        st = report.angle_stats[0]
        assert st.exact == pytest.approx(2.0 / 3.0)
        assert abs(st.z_score) < 3.0

    def test_grassmann_simplicial_three(self):
        config = SampleConfig(dimension=3, sample_count=3, seed=11)
        report = estimate_grassmann(config, 1, trials=3000)
        st = report.angle_stats[0]
        assert st.exact == pytest.approx(0.25)
        assert abs(st.z_score) < 3.0

    def test_solid_angle_consistency_with_grassmann(self):
        config = SampleConfig(dimension=2, sample_count=3, seed=12)
        grassmann = estimate_grassmann(config, 1, trials=2500).angle_stats[0]
        solid = estimate_solid_angle(config, trials=2500).angle_stats[0]
        assert solid.exact == pytest.approx(grassmann.exact / 2.0)
        diff = grassmann.estimate - 2.0 * solid.estimate
        joint_se = math.sqrt(grassmann.se**2 + 4.0 * solid.se**2)
        assert abs(diff) < 3.0 * joint_se

    def test_solid_angle_halfspace_cap(self):
        # Conditioned cones lie in a halfspace, so per-trial hit fractions
        # must stay consistent with solid angle <= 1/2.
        config = SampleConfig(dimension=2, sample_count=3, seed=13)
        report = estimate_solid_angle(config, trials=800, directions_per_trial=8)
        st = report.angle_stats[0]
        assert st.estimate <= 0.5 + 3.0 * st.se

    def test_domain(self):
        config = SampleConfig(dimension=3, sample_count=5)
        with pytest.raises(DomainError):
            estimate_grassmann(config, 3, trials=10)
        with pytest.raises(DomainError):
            estimate_solid_angle(SampleConfig(dimension=1, sample_count=2), trials=10)


class TestSchlafli:
    def test_planar_three_lines(self):
        config = SampleConfig(dimension=2, sample_count=3, seed=14)
        cell = sample_schlafli(config, 3)
        assert cell.cell_count == 6 == schlafli_count(3, 2)
        assert len(cell.sign_pattern) == 3
        assert set(cell.sign_pattern) <= {-1, 1}

    def test_four_planes(self):
        config = SampleConfig(dimension=3, sample_count=4, seed=15)
        cell = sample_schlafli(config, 4)
        assert cell.cell_count == 14

    @pytest.mark.parametrize("d,n", [(3, 2), (4, 3), (5, 5)])
    def test_few_hyperplanes(self, d, n):
        config = SampleConfig(dimension=d, sample_count=n, seed=16)
        cell = sample_schlafli(config, n)
        assert cell.cell_count == 2**n

    def test_counts_match_scipy_enumeration(self):
        config = SampleConfig(dimension=3, sample_count=6, seed=17)
        rng = np.random.default_rng(600)
        cell = sample_schlafli(config, 6, rng)
        rng2 = np.random.default_rng(600)
        normals = sample_directions(config, 6, rng2).points
        assert np.allclose(normals, cell.hyperplane_normals)
        assert count_cells_scipy(normals) == cell.cell_count

    def test_guard(self):
        config = SampleConfig(dimension=7, sample_count=3, seed=1)
        with pytest.raises(DomainError):
            sample_schlafli(config, 3)
        with pytest.raises(DomainError):
            sample_schlafli(SampleConfig(dimension=2, sample_count=3), 15)


class TestDuality:
    def test_planar_polar_is_pointed_wedge(self):
        config = SampleConfig(dimension=2, sample_count=3, seed=18)
        report = duality_check(config, 3, trials=300)
        fs = report.face_stats[0]
        assert fs.mean_count == 2.0
        assert fs.z_score == 0.0

    def test_two_lines_simplicial_polar(self):
        config = SampleConfig(dimension=2, sample_count=2, seed=19)
        report = duality_check(config, 2, trials=200)
        fs = report.face_stats[0]
        assert fs.mean_ratio == 1.0  # f_1 = 2 of 2 subsets

    def test_three_dims_five_planes(self):
        config = SampleConfig(dimension=3, sample_count=5, seed=20)
        report = duality_check(config, 5, trials=1500, k_list=[1, 2])
        for fs in report.face_stats:
            assert fs.exact_ratio == pytest.approx(float(expected_face_ratio(3, 5, fs.k)))
            assert abs(fs.z_score) < 3.0

    def test_reproducible(self):
        config = SampleConfig(dimension=2, sample_count=3, seed=21)
        assert duality_check(config, 3, trials=50) == duality_check(config, 3, trials=50)


class TestDistributionInvariance:
    def test_gaussian_vs_anisotropic_face_ratio(self):
        trials = 1500
        base = SampleConfig(dimension=3, sample_count=5, seed=22)
        skew = SampleConfig(
            dimension=3,
            sample_count=5,
            distribution="anisotropic_gaussian",
            scales=(3.0, 1.0, 0.5),
            seed=23,
        )
        r1 = simulate_face_counts(base, [1], trials=trials).face_stats[0]
        r2 = simulate_face_counts(skew, [1], trials=trials).face_stats[0]
        joint = math.sqrt(r1.se_ratio**2 + r2.se_ratio**2)
        assert abs(r1.mean_ratio - r2.mean_ratio) < 3.0 * joint


class TestWorkers:
    def test_worker_pool_matches_serial(self):
        config = SampleConfig(dimension=3, sample_count=5, seed=24)
        serial = simulate_face_counts(config, [1], trials=40, workers=1)
        pooled = simulate_face_counts(config, [1], trials=40, workers=2)
        assert serial == pooled
