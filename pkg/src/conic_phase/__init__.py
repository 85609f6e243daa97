"""Face numbers and Grassmann angles of conditioned random cones.

The package has three layers that check each other:

* :mod:`conic_phase.exact` evaluates every closed-form quantity with
  arbitrary-precision rationals, plus a log-space path for huge dimensions.
* :mod:`conic_phase.asymptotics` provides the limit laws, threshold curves
  and the normal-CDF surrogate that the exact ratios converge to.
* :mod:`conic_phase.geometry` and :mod:`conic_phase.sampling` simulate the
  cones themselves with LP-based predicates, so that every formula can be
  cross-validated by Monte Carlo.

The ``conic-phase`` command line tool (:mod:`conic_phase.cli`) orchestrates
the standard experiments and writes machine-readable tables.
"""

from .asymptotics import (
    PROPORTIONAL,
    LimitPrediction,
    RootResult,
    ThresholdPoint,
    binary_entropy,
    critical_rate,
    entropy_gap_base,
    entropy_gap_ratio,
    face_factor_base,
    gaussian_ratio_approximation,
    normal_cdf,
    normal_tail,
    predicted_face_limit,
    predicted_grassmann_limit,
    strong_threshold,
    threshold_exponent,
    weak_threshold,
)
from .errors import (
    AcceptanceTooSmallError,
    AtThresholdError,
    ConicPhaseError,
    DegenerateInputError,
    DomainError,
    InvariantViolationError,
    SamplingError,
    SolverError,
)
from .exact import (
    FaceRatioDecomposition,
    LogRatios,
    LogReal,
    OkamotoTailBound,
    TailRatioBounds,
    binomial,
    binomial_partial_sum,
    binomial_tail_ratio,
    expected_face_ratio,
    expected_grassmann_angle,
    face_ratio_decomposition,
    log_space_ratios,
    okamoto_tail_bound,
    schlafli_count,
    tail_ratio_bounds,
    wendel_probability,
)
from .geometry import (
    PointSet,
    SubspaceBasis,
    cone_contains,
    cone_meets_subspace,
    is_face,
    orthonormal_complement,
    strict_halfspace_feasible,
)
from .sampling import (
    AngleStats,
    FaceStats,
    GeneratorSet,
    SampleConfig,
    SchlafliCell,
    SimulationReport,
    duality_check,
    estimate_grassmann,
    estimate_solid_angle,
    sample_cover_efron,
    sample_directions,
    sample_schlafli,
    simulate_face_counts,
)

__version__ = "0.1.0"
