"""Limit laws and phase thresholds for face ratios under proportional growth.

The quantities here are the continuum side of :mod:`conic_phase.exact`: as
the dimension d, generator count n and face index k grow with d/n -> delta
and k/d -> rho, the exact ratios converge to step functions of (delta, rho).
This module evaluates the entropy-type exponent governing that convergence,
the two threshold curves, the limiting values themselves, and the normal-CDF
surrogate that predicts the face ratio at finite parameters.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import AtThresholdError, DomainError, SolverError

SQRT_PI = math.sqrt(math.pi)
LN2 = math.log(2.0)

#: Sentinel accepted by the limit predictors for the k/d -> rho > 0 regime.
PROPORTIONAL = "proportional"

__all__ = [
    "PROPORTIONAL",
    "ThresholdPoint",
    "RootResult",
    "LimitPrediction",
    "binary_entropy",
    "threshold_exponent",
    "face_factor_base",
    "entropy_gap_base",
    "entropy_gap_ratio",
    "weak_threshold",
    "strong_threshold",
    "predicted_face_limit",
    "predicted_grassmann_limit",
    "critical_rate",
    "gaussian_ratio_approximation",
    "normal_cdf",
    "normal_tail",
]


@dataclass(frozen=True)
class ThresholdPoint:
    """A limit regime: delta = lim d/n in (0,1), rho = lim k/d in [0,1)."""

    delta: float
    rho: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.delta < 1.0:
            raise DomainError(f"delta must lie in (0,1), got {self.delta}")
        if not 0.0 <= self.rho < 1.0:
            raise DomainError(f"rho must lie in [0,1), got {self.rho}")


@dataclass(frozen=True)
class RootResult:
    """A bracketed root: |residual| <= 1e-12 and the bracket straddles a sign change."""

    root: float
    residual: float
    bracket: tuple[float, float]
    iterations: int


@dataclass(frozen=True)
class LimitPrediction:
    """A limiting ratio value; ``boundary`` marks the delta = 1/2 fixed-k case,
    where the value is only known along specific parameter sequences."""

    value: float
    boundary: bool = False


def binary_entropy(x: float) -> float:
    """H(x) = -x log x - (1-x) log(1-x), natural log, with 0 log 0 = 0."""
    if not 0.0 <= x <= 1.0:
        raise DomainError(f"entropy argument must lie in [0,1], got {x}")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log(x) - (1.0 - x) * math.log1p(-x)


def threshold_exponent(delta: float, rho: float) -> float:
    """G(delta, rho) = H(delta) + delta*H(rho) - (1 - rho*delta) log 2.

    Negative iff the expected number of non-face k-subsets decays
    exponentially in n.  Satisfies the product identity
    exp(-G) = (1-delta)^(1-delta) delta^delta (1-rho)^(delta(1-rho))
              rho^(delta*rho) 2^(1-delta*rho).
    """
    if not (0.0 <= delta <= 1.0 and 0.0 <= rho <= 1.0):
        raise DomainError(f"need (delta, rho) in [0,1]^2, got ({delta}, {rho})")
    return binary_entropy(delta) + delta * binary_entropy(rho) - (1.0 - rho * delta) * LN2


def face_factor_base(a: float, b: float) -> float:
    """Per-n exponential base of 2^k binom(d,k)/binom(n,k) with d = a*n, k = b*d:

        (2a)^(ab) (1-ab)^(1-ab) / (1-b)^(a(1-b))

    Equals 1 at b = 0; evaluated in log space.
    """
    if not (0.0 < a < 1.0 and 0.0 <= b < 1.0):
        raise DomainError(f"need a in (0,1) and b in [0,1), got a={a}, b={b}")
    ab = a * b
    log_value = -a * (1.0 - b) * math.log1p(-b)
    if ab > 0.0:
        log_value += ab * math.log(2.0 * a) + (1.0 - ab) * math.log1p(-ab)
    return math.exp(log_value)


def entropy_gap_base(a: float) -> float:
    """g(a) = 2 a^a (1-a)^(1-a) = exp(log 2 - H(a)).

    The per-n base by which 2**n outgrows binom(n, a*n); equals 1 at a = 1/2
    and is strictly increasing on (1/2, 1).
    """
    if not 0.0 < a < 1.0:
        raise DomainError(f"need a in (0,1), got {a}")
    return math.exp(LN2 - binary_entropy(a))


def entropy_gap_ratio(a: float, b: float) -> float:
    """K(a, b) = g(a) / g(a(1-b)); equals 1 at b = 0 and, for a >= 1/2,
    also at b = 2 - 1/a."""
    if not (0.0 < a < 1.0 and 0.0 <= b < 1.0):
        raise DomainError(f"need a in (0,1) and b in [0,1), got a={a}, b={b}")
    return math.exp(binary_entropy(a * (1.0 - b)) - binary_entropy(a))


def weak_threshold(delta: float) -> float:
    """rho_W(delta) = max(0, 2 - 1/delta), the face-ratio phase boundary."""
    if not 0.0 < delta < 1.0:
        raise DomainError(f"delta must lie in (0,1), got {delta}")
    return max(0.0, 2.0 - 1.0 / delta)


_ROOT_TOL = 1e-12
_ROOT_MAX_ITER = 200


def strong_threshold(delta: float) -> RootResult:
    """rho_S(delta): the unique zero of x -> G(delta, x) for delta in (1/2, 1).

    Located by bisection on [eps, min(2/3, 2 - 1/delta)]; the zero always
    lies strictly inside that interval and below the weak threshold.
    """
    if not 0.5 < delta < 1.0:
        raise DomainError(f"strong threshold defined for delta in (1/2,1), got {delta}")
    hi = min(2.0 / 3.0, 2.0 - 1.0 / delta)
    lo = 1e-12
    g_lo = threshold_exponent(delta, lo)
    # G(delta, 0) < 0, but for delta barely above 1/2 the sign change sits
    # below the default eps; shrink until the bracket is genuine.
    while g_lo >= 0.0 and lo > 1e-250:
        lo *= 1e-4
        g_lo = threshold_exponent(delta, lo)
    g_hi = threshold_exponent(delta, hi)
    if not (g_lo < 0.0 < g_hi):
        raise SolverError(
            f"no sign change on the threshold bracket for delta={delta}"
        )
    a, b = lo, hi
    root = 0.5 * (a + b)
    residual = threshold_exponent(delta, root)
    iterations = 0
    while iterations < _ROOT_MAX_ITER:
        iterations += 1
        root = 0.5 * (a + b)
        residual = threshold_exponent(delta, root)
        if residual < 0.0:
            a = root
        elif residual > 0.0:
            b = root
        else:
            break
        if abs(residual) <= _ROOT_TOL and (b - a) <= 1e-15 * max(1.0, root):
            break
    if abs(residual) > _ROOT_TOL:
        raise SolverError(
            f"threshold root residual {residual:.3e} above tolerance at delta={delta}"
        )
    return RootResult(root, residual, (a, b), iterations)


def _split_regime(point: ThresholdPoint, k: int | str) -> bool:
    """True for the fixed-k regime, False for proportional; validates k."""
    if k == PROPORTIONAL:
        if point.rho <= 0.0:
            raise DomainError("proportional regime needs rho > 0")
        return False
    if isinstance(k, bool) or not isinstance(k, int):
        raise DomainError(f"k must be a positive integer or {PROPORTIONAL!r}, got {k!r}")
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if point.rho != 0.0:
        raise DomainError("fixed-k regime needs rho = 0")
    return True


def predicted_face_limit(point: ThresholdPoint, k: int | str) -> LimitPrediction:
    """Limiting value of E f_k / binom(n, k).

    Fixed k: (2 delta)^k below delta = 1/2, and 1 above; at delta = 1/2 the
    limit is 1 along n = 2d (flagged as boundary).  Proportional k: a 0/1
    step across the weak threshold, undefined exactly on it.
    """
    if _split_regime(point, k):
        if point.delta < 0.5:
            return LimitPrediction((2.0 * point.delta) ** k)
        if point.delta == 0.5:
            return LimitPrediction(1.0, boundary=True)
        return LimitPrediction(1.0)
    rho_w = weak_threshold(point.delta)
    if point.rho == rho_w:
        raise AtThresholdError(
            f"face limit undefined at rho = rho_W({point.delta}) = {rho_w}"
        )
    return LimitPrediction(1.0 if point.rho < rho_w else 0.0)


def predicted_grassmann_limit(point: ThresholdPoint, k: int | str) -> LimitPrediction:
    """Limiting value of E 2U_{d-k}.

    Fixed k: 1 - (delta/(1-delta))^k below delta = 1/2, and 0 above; at
    delta = 1/2 the limit is 0 along n = 2d (boundary flag).  Proportional
    k: a 0/1 step across half the weak threshold.
    """
    if _split_regime(point, k):
        if point.delta < 0.5:
            return LimitPrediction(1.0 - (point.delta / (1.0 - point.delta)) ** k)
        if point.delta == 0.5:
            return LimitPrediction(0.0, boundary=True)
        return LimitPrediction(0.0)
    half_rho_w = 0.5 * weak_threshold(point.delta)
    if point.rho == half_rho_w:
        raise AtThresholdError(
            f"angle limit undefined at rho = rho_W({point.delta})/2 = {half_rho_w}"
        )
    return LimitPrediction(0.0 if point.rho < half_rho_w else 1.0)


def critical_rate(k: int) -> float:
    """k / sqrt(pi): the limit of sqrt(d)(1 - E f_k/binom) and of
    sqrt(d) E U_{d-k} along n = 2d."""
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    return k / SQRT_PI


def normal_cdf(x: float) -> float:
    """Standard normal distribution function via the complementary error
    function; absolute error well below 1e-12."""
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def normal_tail(x: float) -> float:
    """1 - Phi(x) without cancellation; satisfies the lower bound
    Phi'(x) / (2x) for x >= 1 used in the dense-regime rate argument."""
    return 0.5 * math.erfc(x / math.sqrt(2.0))


def gaussian_ratio_approximation(d: int, n: int, k: int) -> float:
    """Normal-CDF surrogate for the expected face ratio:

        Phi((2d-n-k-1)/sqrt(n-k-1)) / Phi((2d-n-1)/sqrt(n-1))

    A cheap predictor whose error against the exact ratio decays like
    1/sqrt(n).
    """
    if not 1 <= k < d < n:
        raise DomainError(f"need 1 <= k < d < n, got d={d}, n={n}, k={k}")
    num = normal_cdf((2.0 * d - n - k - 1.0) / math.sqrt(n - k - 1.0))
    den = normal_cdf((2.0 * d - n - 1.0) / math.sqrt(n - 1.0))
    return num / den
