"""Samplers and Monte Carlo estimators for conditioned random cones.

Two dual constructions are implemented: the conditioned cone (positive hull
of i.i.d. symmetric unit vectors, conditioned on not filling the space,
sampled by rejection) and the tessellation cell (a uniformly chosen
full-dimensional chamber of a central hyperplane arrangement, whose polar
has the conditioned-cone distribution).  Estimators count faces by
exhaustive lexicographic subset enumeration and estimate angles by
subspace- and direction-hit frequencies, always alongside the exact
reference values from :mod:`conic_phase.exact`.

Reproducibility contract: trial t draws everything from a generator seeded
by (seed, t), and aggregation is an ordered reduction over trial indices,
so results are bit-identical for a fixed config regardless of worker count.
"""

from __future__ import annotations

import itertools
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from multiprocessing import get_context
from typing import Callable, Sequence

import numpy as np

from .errors import (
    AcceptanceTooSmallError,
    DegenerateInputError,
    DomainError,
    InvariantViolationError,
    SamplingError,
    SolverError,
)
from .exact import binomial, expected_face_ratio, expected_grassmann_angle, schlafli_count, wendel_probability
from .geometry import PointSet, SubspaceBasis, _strict_feasible_raw, is_face, cone_contains, cone_meets_subspace

ACCEPTANCE_FLOOR = 1e-6
MAX_ENUMERATED_SUBSETS = 10**6
MAX_GENERATORS = 64
SCHLAFLI_MAX_DIM = 6
SCHLAFLI_MAX_PLANES = 14

DISTRIBUTIONS = ("gaussian", "uniform_sphere", "anisotropic_gaussian")
MODES = ("conditioned", "unconditioned")

__all__ = [
    "SampleConfig",
    "GeneratorSet",
    "SchlafliCell",
    "FaceStats",
    "AngleStats",
    "SimulationReport",
    "sample_directions",
    "sample_cover_efron",
    "simulate_face_counts",
    "estimate_grassmann",
    "estimate_solid_angle",
    "sample_schlafli",
    "duality_check",
]


@dataclass(frozen=True)
class SampleConfig:
    """Everything needed to reproduce a sampling run bit for bit.

    All built-in distributions are even and assign no mass to hyperplanes
    through the origin, which is what the exact formulas require.
    """

    dimension: int
    sample_count: int
    distribution: str = "gaussian"
    scales: tuple[float, ...] | None = None
    mode: str = "conditioned"
    seed: int = 0
    max_rejections: int = 100_000

    def __post_init__(self):
        if self.dimension < 1:
            raise DomainError(f"dimension must be >= 1, got {self.dimension}")
        if self.sample_count < 1:
            raise DomainError(f"sample_count must be >= 1, got {self.sample_count}")
        if self.distribution not in DISTRIBUTIONS:
            raise DomainError(f"unknown distribution {self.distribution!r}")
        if self.mode not in MODES:
            raise DomainError(f"unknown mode {self.mode!r}")
        if self.distribution == "anisotropic_gaussian":
            if not self.scales or len(self.scales) != self.dimension:
                raise DomainError("anisotropic_gaussian needs one positive scale per coordinate")
            if any(not (s > 0 and math.isfinite(s)) for s in self.scales):
                raise DomainError("scales must be positive and finite")
        elif self.scales is not None:
            raise DomainError("scales are only meaningful for anisotropic_gaussian")
        if self.seed < 0:
            raise DomainError("seed must be a nonnegative integer")
        if self.max_rejections < 1:
            raise DomainError("max_rejections must be >= 1")


@dataclass(eq=False)
class GeneratorSet:
    """An accepted draw: generators plus how much rejection it cost."""

    config: SampleConfig
    points: PointSet
    rejections_used: int


@dataclass(eq=False)
class SchlafliCell:
    """One full-dimensional chamber of a central arrangement, drawn uniformly.

    ``cell_count`` is the exact chamber count, asserted against the closed
    form during enumeration.
    """

    hyperplane_normals: np.ndarray
    sign_pattern: tuple[int, ...]
    cell_count: int


@dataclass(frozen=True)
class FaceStats:
    k: int
    subsets: int
    mean_count: float
    mean_ratio: float
    se_ratio: float
    complete_fraction: float
    exact_ratio: float
    z_score: float


@dataclass(frozen=True)
class AngleStats:
    kind: str
    k: int | None
    samples_per_trial: int
    estimate: float
    se: float
    exact: float
    z_score: float


@dataclass(frozen=True)
class SimulationReport:
    config: SampleConfig
    kind: str
    requested_trials: int
    trials: int
    failed_trials: int
    acceptance_attempts: int
    acceptance_rate: float
    expected_acceptance: float
    face_stats: tuple[FaceStats, ...] = ()
    angle_stats: tuple[AngleStats, ...] = ()
    elapsed_seconds: float = field(default=0.0, compare=False)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["config"]["scales"] = list(self.config.scales) if self.config.scales else None
        return out


def _trial_rng(config: SampleConfig, trial: int) -> np.random.Generator:
    return np.random.default_rng((config.seed, trial))


def _draw_unit_rows(config: SampleConfig, n: int, rng: np.random.Generator) -> np.ndarray:
    raw = rng.standard_normal((n, config.dimension))
    if config.distribution == "anisotropic_gaussian":
        raw = raw * np.asarray(config.scales)
    # uniform_sphere and gaussian coincide in law: normalized isotropic
    # Gaussians are exactly uniform on the sphere.
    norms = np.linalg.norm(raw, axis=1)
    while np.any(norms < 1e-12):  # pragma: no cover - probability zero
        bad = norms < 1e-12
        raw[bad] = rng.standard_normal((int(bad.sum()), config.dimension))
        if config.distribution == "anisotropic_gaussian":
            raw[bad] *= np.asarray(config.scales)
        norms = np.linalg.norm(raw, axis=1)
    return raw / norms[:, None]


def sample_directions(config: SampleConfig, n: int, rng: np.random.Generator | None = None) -> PointSet:
    """n i.i.d. unit directions with the configured symmetric distribution."""
    if n < 1:
        raise DomainError(f"n must be >= 1, got {n}")
    if rng is None:
        rng = _trial_rng(config, 0)
    return PointSet(config.dimension, _draw_unit_rows(config, n, rng))


def _acceptance_probability(config: SampleConfig) -> Fraction:
    return wendel_probability(config.dimension, config.sample_count)


def sample_cover_efron(config: SampleConfig, rng: np.random.Generator | None = None) -> GeneratorSet:
    """Rejection-sample generators until they fit in an open halfspace.

    Expected rejections are 1/P - 1 with the exact acceptance probability P;
    if P < 1e-6 the call refuses up front instead of looping.
    """
    if config.mode != "conditioned":
        raise DomainError("conditioned sampling requires mode='conditioned'")
    p = _acceptance_probability(config)
    if p < Fraction(ACCEPTANCE_FLOOR):
        raise AcceptanceTooSmallError(
            f"acceptance probability {float(p):.3e} below {ACCEPTANCE_FLOOR:g}"
        )
    if rng is None:
        rng = _trial_rng(config, 0)
    for attempt in range(config.max_rejections + 1):
        arr = _draw_unit_rows(config, config.sample_count, rng)
        if _strict_feasible_raw(arr, 1e-9):
            points = PointSet(config.dimension, arr)
            return GeneratorSet(config, points, attempt)
    raise SamplingError(
        f"no acceptance within {config.max_rejections} rejections (P = {float(p):.3e})"
    )


# ---------------------------------------------------------------------------
# Trial runners.


def _run_trials(worker: Callable[[int], tuple], trials: int, workers: int) -> list[tuple]:
    if trials < 1:
        raise DomainError(f"trials must be >= 1, got {trials}")
    if workers <= 1:
        return [worker(t) for t in range(trials)]
    with get_context("fork").Pool(workers) as pool:
        return pool.map(worker, range(trials), chunksize=max(1, trials // (8 * workers)))


def _int_mean_se(values: Sequence[int], scale: int) -> tuple[float, float]:
    """Mean and standard error of values[i]/scale, via exact integer sums.

    Integer moments make constant samples yield a variance of exactly zero,
    so the planar zero-variance cases really come out with se = 0.
    """
    n = len(values)
    s1 = sum(values)
    mean = s1 / (n * scale)
    if n < 2:
        return mean, 0.0
    num = n * sum(v * v for v in values) - s1 * s1  # n(n-1) * biased variance
    if num <= 0:
        return mean, 0.0
    var = num / (n * (n - 1))
    return mean, math.sqrt(var / n) / scale


def _z_score(mean: float, se: float, exact: float) -> float:
    if se > 0.0:
        return (mean - exact) / se
    if mean == exact:
        return 0.0
    return math.copysign(math.inf, mean - exact)


def _draw_cone_points(config: SampleConfig, rng: np.random.Generator) -> tuple[np.ndarray | None, int]:
    """One conditioned draw (points, attempts); unconditioned draws return
    (None, 1) when the generators positively span the space."""
    if config.mode == "conditioned":
        for attempt in range(config.max_rejections + 1):
            arr = _draw_unit_rows(config, config.sample_count, rng)
            if _strict_feasible_raw(arr, 1e-9):
                return arr, attempt + 1
        raise SamplingError(f"no acceptance within {config.max_rejections} rejections")
    arr = _draw_unit_rows(config, config.sample_count, rng)
    if _strict_feasible_raw(arr, 1e-9):
        return arr, 1
    return None, 1


def _face_counts_for(arr: np.ndarray, dimension: int, k_list: Sequence[int]) -> list[int]:
    ps = PointSet(dimension, arr)
    n = len(ps)
    counts = []
    for k in k_list:
        count = 0
        for subset in itertools.combinations(range(n), k):
            if is_face(ps, subset):
                count += 1
        counts.append(count)
    return counts


def _face_trial(config: SampleConfig, k_list: tuple[int, ...], trial: int):
    rng = _trial_rng(config, trial)
    try:
        arr, attempts = _draw_cone_points(config, rng)
        if arr is None:
            return True, attempts, False, [0] * len(k_list)
        return True, attempts, True, _face_counts_for(arr, config.dimension, k_list)
    except (SolverError, DegenerateInputError):
        return False, 0, False, None


def _check_enumeration_guard(n: int, k_list: Sequence[int], d: int) -> None:
    if n > MAX_GENERATORS:
        raise DomainError(f"subset enumeration capped at {MAX_GENERATORS} generators, got {n}")
    for k in k_list:
        if not 1 <= k <= d - 1:
            raise DomainError(f"face index k={k} outside 1..{d - 1}")
        if binomial(n, k) > MAX_ENUMERATED_SUBSETS:
            raise DomainError(
                f"binom({n},{k}) exceeds the enumeration guard of {MAX_ENUMERATED_SUBSETS}"
            )


def simulate_face_counts(
    config: SampleConfig,
    k_list: Sequence[int],
    trials: int,
    workers: int = 1,
) -> SimulationReport:
    """Count k-faces of sampled cones by applying the face predicate to every
    k-subset in lexicographic order, and compare against the exact ratios.

    In unconditioned mode, draws whose positive hull is the whole space
    contribute zero faces for every k < d; the exact reference in that mode
    is the unconditioned face ratio P_{d-k, n-k}.
    """
    d, n = config.dimension, config.sample_count
    k_list = tuple(dict.fromkeys(int(k) for k in k_list))
    _check_enumeration_guard(n, k_list, d)
    if config.mode == "conditioned" and _acceptance_probability(config) < Fraction(ACCEPTANCE_FLOOR):
        raise AcceptanceTooSmallError("acceptance probability below refusal threshold")

    start = time.perf_counter()
    results = _run_trials(_FaceWorker(config, k_list), trials, workers)

    per_k_counts: dict[int, list[int]] = {k: [] for k in k_list}
    attempts_total = 0
    accepted = 0
    failed = 0
    for ok, attempts, accepted_flag, counts in results:
        if not ok:
            failed += 1
            continue
        attempts_total += attempts
        accepted += 1 if accepted_flag else 0
        for k, count in zip(k_list, counts):
            per_k_counts[k].append(count)

    good = trials - failed
    stats = []
    for k in k_list:
        subsets = binomial(n, k)
        if config.mode == "conditioned":
            exact = float(expected_face_ratio(d, n, k))
        else:
            exact = float(wendel_probability(d - k, n - k))
        counts = per_k_counts[k]
        mean_ratio, se = _int_mean_se(counts, subsets) if counts else (math.nan, 0.0)
        complete = sum(1 for c in counts if c == subsets) / good if good else math.nan
        stats.append(
            FaceStats(
                k=k,
                subsets=subsets,
                mean_count=mean_ratio * subsets if good else math.nan,
                mean_ratio=mean_ratio,
                se_ratio=se,
                complete_fraction=complete,
                exact_ratio=exact,
                z_score=_z_score(mean_ratio, se, exact) if good else math.nan,
            )
        )
    return SimulationReport(
        config=config,
        kind="face_counts",
        requested_trials=trials,
        trials=good,
        failed_trials=failed,
        acceptance_attempts=attempts_total,
        acceptance_rate=accepted / attempts_total if attempts_total else math.nan,
        expected_acceptance=float(_acceptance_probability(config)),
        face_stats=tuple(stats),
        elapsed_seconds=time.perf_counter() - start,
    )


class _FaceWorker:
    """Picklable trial callable for worker pools."""

    def __init__(self, config: SampleConfig, k_list: tuple[int, ...]):
        self.config = config
        self.k_list = k_list

    def __call__(self, trial: int):
        return _face_trial(self.config, self.k_list, trial)


def _grassmann_trial(config: SampleConfig, k: int, per_trial: int, trial: int):
    rng = _trial_rng(config, trial)
    try:
        arr, attempts = _draw_cone_points(config, rng)
        ps = PointSet(config.dimension, arr)
        hits = 0
        for _ in range(per_trial):
            mat = rng.standard_normal((config.dimension, k))
            q, _ = np.linalg.qr(mat)
            basis = SubspaceBasis(config.dimension, np.ascontiguousarray(q.T))
            if cone_meets_subspace(ps, basis):
                hits += 1
        return True, attempts, hits
    except (SolverError, DegenerateInputError):
        return False, 0, -1


class _GrassmannWorker:
    def __init__(self, config, k, per_trial):
        self.config, self.k, self.per_trial = config, k, per_trial

    def __call__(self, trial: int):
        return _grassmann_trial(self.config, self.k, self.per_trial, trial)


def estimate_grassmann(
    config: SampleConfig,
    k: int,
    trials: int,
    subspaces_per_trial: int = 1,
    workers: int = 1,
) -> SimulationReport:
    """Estimate the expected doubled Grassmann angle of index d-k as the
    frequency with which independent uniform k-dimensional subspaces meet
    the sampled cone nontrivially."""
    d, n = config.dimension, config.sample_count
    if not 1 <= k <= d - 1:
        raise DomainError(f"need 1 <= k <= d-1, got k={k}, d={d}")
    if subspaces_per_trial < 1:
        raise DomainError("subspaces_per_trial must be >= 1")
    if config.mode != "conditioned":
        raise DomainError("angle estimation is defined for conditioned cones")
    if _acceptance_probability(config) < Fraction(ACCEPTANCE_FLOOR):
        raise AcceptanceTooSmallError("acceptance probability below refusal threshold")

    start = time.perf_counter()
    worker = _GrassmannWorker(config, k, subspaces_per_trial)
    results = _run_trials(worker, trials, workers)
    hit_counts = [h for ok, _, h in results if ok]
    attempts_total = sum(a for ok, a, _ in results if ok)
    failed = len(results) - len(hit_counts)
    exact = float(expected_grassmann_angle(d, n, k))
    mean, se = (
        _int_mean_se(hit_counts, subspaces_per_trial) if hit_counts else (math.nan, 0.0)
    )
    return SimulationReport(
        config=config,
        kind="grassmann",
        requested_trials=trials,
        trials=len(hit_counts),
        failed_trials=failed,
        acceptance_attempts=attempts_total,
        acceptance_rate=len(hit_counts) / attempts_total if attempts_total else math.nan,
        expected_acceptance=float(_acceptance_probability(config)),
        angle_stats=(
            AngleStats(
                kind="grassmann",
                k=k,
                samples_per_trial=subspaces_per_trial,
                estimate=mean,
                se=se,
                exact=exact,
                z_score=_z_score(mean, se, exact),
            ),
        ),
        elapsed_seconds=time.perf_counter() - start,
    )


def _solid_angle_trial(config: SampleConfig, per_trial: int, trial: int):
    rng = _trial_rng(config, trial)
    try:
        arr, attempts = _draw_cone_points(config, rng)
        ps = PointSet(config.dimension, arr)
        dirs = rng.standard_normal((per_trial, config.dimension))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        hits = sum(1 for w in dirs if cone_contains(ps, w))
        return True, attempts, hits
    except (SolverError, DegenerateInputError):
        return False, 0, -1


class _SolidAngleWorker:
    def __init__(self, config, per_trial):
        self.config, self.per_trial = config, per_trial

    def __call__(self, trial: int):
        return _solid_angle_trial(self.config, self.per_trial, trial)


def estimate_solid_angle(
    config: SampleConfig,
    trials: int,
    directions_per_trial: int = 1,
    workers: int = 1,
) -> SimulationReport:
    """Estimate the expected solid angle as the membership frequency of
    uniform directions; consistent with the Grassmann estimate at k = 1
    through solid angle = half the doubled Grassmann angle of index d-1."""
    d, n = config.dimension, config.sample_count
    if d < 2:
        raise DomainError("solid-angle estimation needs dimension >= 2")
    if directions_per_trial < 1:
        raise DomainError("directions_per_trial must be >= 1")
    if config.mode != "conditioned":
        raise DomainError("angle estimation is defined for conditioned cones")
    if _acceptance_probability(config) < Fraction(ACCEPTANCE_FLOOR):
        raise AcceptanceTooSmallError("acceptance probability below refusal threshold")

    start = time.perf_counter()
    worker = _SolidAngleWorker(config, directions_per_trial)
    results = _run_trials(worker, trials, workers)
    hit_counts = [h for ok, _, h in results if ok]
    attempts_total = sum(a for ok, a, _ in results if ok)
    failed = len(results) - len(hit_counts)
    exact = float(expected_grassmann_angle(d, n, 1)) / 2.0
    mean, se = (
        _int_mean_se(hit_counts, directions_per_trial) if hit_counts else (math.nan, 0.0)
    )
    return SimulationReport(
        config=config,
        kind="solid_angle",
        requested_trials=trials,
        trials=len(hit_counts),
        failed_trials=failed,
        acceptance_attempts=attempts_total,
        acceptance_rate=len(hit_counts) / attempts_total if attempts_total else math.nan,
        expected_acceptance=float(_acceptance_probability(config)),
        angle_stats=(
            AngleStats(
                kind="solid_angle",
                k=None,
                samples_per_trial=directions_per_trial,
                estimate=mean,
                se=se,
                exact=exact,
                z_score=_z_score(mean, se, exact),
            ),
        ),
        elapsed_seconds=time.perf_counter() - start,
    )


# ---------------------------------------------------------------------------
# Tessellation cells and duality.


def sample_schlafli(config: SampleConfig, n: int, rng: np.random.Generator | None = None) -> SchlafliCell:
    """Draw a uniform full-dimensional cell of a random central arrangement.

    All 2**n sign patterns are classified (antipodal patterns share their
    verdict); the number of nonempty-interior cells must equal the closed
    form exactly, otherwise the tessellation oracle is broken and an
    invariant violation is raised.
    """
    d = config.dimension
    if d > SCHLAFLI_MAX_DIM or n > SCHLAFLI_MAX_PLANES:
        raise DomainError(
            f"cell enumeration capped at d <= {SCHLAFLI_MAX_DIM}, n <= {SCHLAFLI_MAX_PLANES}"
        )
    if n < 1:
        raise DomainError(f"need n >= 1, got {n}")
    if rng is None:
        rng = _trial_rng(config, 0)
    normals = _draw_unit_rows(config, n, rng)

    full = (1 << n) - 1
    verdict = np.zeros(1 << n, dtype=bool)
    kept: list[int] = []
    for code in range(1 << n):
        anti = full ^ code
        if anti < code:
            verdict[code] = verdict[anti]
        else:
            signs = np.array([1.0 if (code >> i) & 1 else -1.0 for i in range(n)])
            verdict[code] = _strict_feasible_raw(-signs[:, None] * normals, 1e-9)
        if verdict[code]:
            kept.append(code)
    if len(kept) != schlafli_count(n, d):
        raise InvariantViolationError(
            f"tessellation oracle: found {len(kept)} cells, expected {schlafli_count(n, d)}"
        )
    code = kept[int(rng.integers(len(kept)))]
    pattern = tuple(1 if (code >> i) & 1 else -1 for i in range(n))
    return SchlafliCell(normals, pattern, len(kept))


def _polar_generators(cell: SchlafliCell) -> np.ndarray:
    signs = np.asarray(cell.sign_pattern, dtype=np.float64)
    return -signs[:, None] * cell.hyperplane_normals


def _duality_trial(config: SampleConfig, n: int, k_list: tuple[int, ...], trial: int):
    rng = _trial_rng(config, trial)
    try:
        cell = sample_schlafli(config, n, rng)
        counts = _face_counts_for(_polar_generators(cell), config.dimension, k_list)
        return True, counts
    except (SolverError, DegenerateInputError):
        return False, None


class _DualityWorker:
    def __init__(self, config, n, k_list):
        self.config, self.n, self.k_list = config, n, k_list

    def __call__(self, trial: int):
        return _duality_trial(self.config, self.n, self.k_list, trial)


def duality_check(
    config: SampleConfig,
    n: int,
    trials: int,
    k_list: Sequence[int] | None = None,
    workers: int = 1,
) -> SimulationReport:
    """Sample tessellation cells, count the k-faces of their polar cones and
    compare against the exact conditioned-cone face expectations.

    The polar of the chamber {x : s_i <h_i, x> >= 0} is the positive hull
    of the flipped normals -s_i h_i, so its face counts must match the
    conditioned cone on n generators in distribution.
    """
    d = config.dimension
    if k_list is None:
        k_list = tuple(range(1, min(d, n)))
    k_list = tuple(dict.fromkeys(int(k) for k in k_list))
    for k in k_list:
        if not 1 <= k <= min(d - 1, n):
            raise DomainError(f"face index k={k} outside 1..{min(d - 1, n)}")

    start = time.perf_counter()
    worker = _DualityWorker(config, n, k_list)
    results = _run_trials(worker, trials, workers)
    failed = sum(1 for ok, _ in results if not ok)
    good = trials - failed

    stats = []
    for pos, k in enumerate(k_list):
        subsets = binomial(n, k)
        counts = [counts[pos] for ok, counts in results if ok]
        exact = float(expected_face_ratio(d, n, k)) if n >= d else 1.0
        mean_ratio, se = _int_mean_se(counts, subsets) if counts else (math.nan, 0.0)
        complete = sum(1 for c in counts if c == subsets) / good if good else math.nan
        stats.append(
            FaceStats(
                k=k,
                subsets=subsets,
                mean_count=mean_ratio * subsets if good else math.nan,
                mean_ratio=mean_ratio,
                se_ratio=se,
                complete_fraction=complete,
                exact_ratio=exact,
                z_score=_z_score(mean_ratio, se, exact) if good else math.nan,
            )
        )
    return SimulationReport(
        config=config,
        kind="duality",
        requested_trials=trials,
        trials=good,
        failed_trials=failed,
        acceptance_attempts=good,
        acceptance_rate=1.0 if good else math.nan,
        expected_acceptance=1.0,
        face_stats=tuple(stats),
        elapsed_seconds=time.perf_counter() - start,
    )
