"""Exact combinatorics of central hyperplane tessellations and conditioned cones.

Everything here is computed either with arbitrary-precision integers and
reduced rationals (``int`` / ``fractions.Fraction``), so that identities can
be checked as exact equalities, or in a log-space companion representation
(:class:`LogReal`) that evaluates the same ratios for dimensions far beyond
what exact arithmetic needs to touch (d up to about 10**6).

Notation used throughout the docstrings:

    C(n, d)   = 2 * sum_{i<=d-1} binom(n-1, i)   Schlafli chamber count
    P_{d,n}   = C(n, d) / 2**n                   Wendel probability
    S(n, t)   = sum_{i<=t} binom(n, i)           partial row sum

``binom(a, b)`` is zero whenever ``b < 0`` or ``b > a``, and empty sums are
zero; those conventions are applied globally so every function is total on
its stated domain.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InvariantViolationError

# Type aliases: arbitrary-precision counts and gcd-reduced ratios are exactly
# what the Python built-ins provide, so no wrapper classes are needed.
ExactCount = int
ExactRatio = Fraction

LN2 = math.log(2.0)

__all__ = [
    "ExactCount",
    "ExactRatio",
    "LogReal",
    "LogRatios",
    "TailRatioBounds",
    "FaceRatioDecomposition",
    "OkamotoTailBound",
    "binomial",
    "binomial_partial_sum",
    "schlafli_count",
    "wendel_probability",
    "expected_face_ratio",
    "expected_grassmann_angle",
    "log_space_ratios",
    "binomial_tail_ratio",
    "tail_ratio_bounds",
    "face_ratio_decomposition",
    "okamoto_tail_bound",
]


def binomial(n: int, k: int) -> int:
    """binom(n, k) with the zero convention outside 0 <= k <= n."""
    if k < 0 or k > n:
        return 0
    return math.comb(n, k)


@lru_cache(maxsize=None)
def binomial_partial_sum(n: int, t: int) -> int:
    """S(n, t) = sum of binom(n, i) for i = 0..t, exactly.

    Empty for t < 0; the full row 2**n once t >= n.
    """
    if n < 0:
        raise DomainError(f"row index must be nonnegative, got n={n}")
    if t < 0:
        return 0
    if t >= n:
        return 1 << n
    # Running product is cheaper than t+1 independent binomials.
    term = 1
    total = 1
    for i in range(1, t + 1):
        term = term * (n - i + 1) // i
        total += term
    return total


@lru_cache(maxsize=None)
def schlafli_count(n: int, d: int) -> int:
    """Number of d-dimensional chambers cut from R^d by n generic central hyperplanes.

    C(n, d) = 2 * S(n-1, d-1).  For n <= d the partial sum covers the whole
    row of Pascal's triangle and the count is 2**n.
    """
    if n < 1 or d < 1:
        raise DomainError(f"need n >= 1 and d >= 1, got n={n}, d={d}")
    return 2 * binomial_partial_sum(n - 1, d - 1)


@lru_cache(maxsize=None)
def wendel_probability(d: int, n: int) -> Fraction:
    """P_{d,n} = C(n, d) / 2**n, the probability that n i.i.d. symmetric
    vectors in R^d do *not* positively span the whole space.

    Total on d, n >= 1; in particular P_{d,n} = 1 for n <= d even though the
    interesting regime has n >= d.
    """
    return Fraction(schlafli_count(n, d), 1 << n)


def _check_face_params(d: int, n: int, k: int, k_min: int) -> None:
    if not (k_min <= k <= d - 1 <= n - 1):
        raise DomainError(
            f"need {k_min} <= k <= d-1 <= n-1, got d={d}, n={n}, k={k}"
        )


def expected_face_ratio(d: int, n: int, k: int) -> Fraction:
    """Expected fraction of k-element generator subsets that span a k-face
    of the conditioned cone on n generators in R^d.

    Equal to 2**k * C(n-k, d-k) / C(n, d) and to P_{d-k,n-k} / P_{d,n};
    both forms are evaluated and must agree exactly.  k = 0 gives 1.
    """
    _check_face_params(d, n, k, k_min=0)
    via_counts = Fraction((1 << k) * schlafli_count(n - k, d - k), schlafli_count(n, d))
    via_wendel = wendel_probability(d - k, n - k) / wendel_probability(d, n)
    if via_counts != via_wendel:
        raise InvariantViolationError(
            f"face-ratio forms disagree at d={d}, n={n}, k={k}"
        )
    return via_counts


def expected_grassmann_angle(d: int, n: int, k: int) -> Fraction:
    """Expected doubled Grassmann angle of index d-k of the conditioned cone:
    the probability that an independent uniform k-dimensional subspace meets
    the cone nontrivially.

    Equal to (C(n, d) - C(n, d-k)) / C(n, d).  An equivalent form built from
    partial row sums normalized by binom(n-1, d-1) is evaluated as well and
    must agree exactly.
    """
    _check_face_params(d, n, k, k_min=1)
    c_full = schlafli_count(n, d)
    via_counts = Fraction(c_full - schlafli_count(n, d - k), c_full)

    # Same quantity written over row n-1: both numerator and denominator are
    # 1 + (partial sum) / binom(n-1, d-1), with empty sums equal to zero.
    pivot = binomial(n - 1, d - 1)
    num = 1 + Fraction(
        binomial_partial_sum(n - 1, d - 2) - binomial_partial_sum(n - 1, d - k - 1),
        pivot,
    )
    den = 1 + Fraction(binomial_partial_sum(n - 1, d - 2), pivot)
    via_row = num / den
    if via_counts != via_row:
        raise InvariantViolationError(
            f"grassmann-angle forms disagree at d={d}, n={n}, k={k}"
        )
    return via_counts


# ---------------------------------------------------------------------------
# Log-space companion path.


@dataclass(frozen=True)
class LogReal:
    """A real number stored as sign and natural log of its magnitude.

    ``log_magnitude`` is -inf when the value is zero.  Round-trips with
    exact rationals agree to relative error <= 1e-12.
    """

    sign: int
    log_magnitude: float

    @classmethod
    def from_fraction(cls, value: Fraction) -> "LogReal":
        num, den = value.numerator, value.denominator
        if num == 0:
            return cls(0, float("-inf"))
        sign = 1 if num > 0 else -1
        # math.log accepts arbitrarily large ints without float conversion.
        return cls(sign, math.log(abs(num)) - math.log(den))

    @classmethod
    def from_float(cls, value: float) -> "LogReal":
        if value == 0.0:
            return cls(0, float("-inf"))
        return cls(1 if value > 0 else -1, math.log(abs(value)))

    def to_float(self) -> float:
        if self.sign == 0:
            return 0.0
        return self.sign * math.exp(self.log_magnitude)


class LogRatios(NamedTuple):
    face_ratio: LogReal
    grassmann: LogReal


def _log_row_range_sum(n: int, lo: int, hi: int) -> float:
    """log( sum_{i=lo..hi} binom(n, i) ) for 0 <= lo <= hi.

    Vectorized log-gamma evaluation; the exponentials are accumulated from
    the smallest magnitude upward so the result keeps close to full double
    precision even across ~10**6 terms.
    """
    hi = min(hi, n)
    if hi < lo:
        return float("-inf")
    if lo == 0 and hi == n:
        return n * LN2
    i = np.arange(lo, hi + 1, dtype=np.float64)
    terms = gammaln(n + 1.0) - gammaln(i + 1.0) - gammaln(n - i + 1.0)
    peak = float(terms.max())
    scaled = np.exp(terms - peak)
    scaled.sort()
    return peak + math.log(float(scaled.sum()))


def log_partial_row_sum(n: int, t: int) -> float:
    """log S(n, t) as a float; -inf for t < 0, n*log(2) once t >= n."""
    if t < 0:
        return float("-inf")
    if t >= n:
        return n * LN2
    return _log_row_range_sum(n, 0, t)


def log_space_ratios(d: int, n: int, k: int) -> LogRatios:
    """Log-space evaluation of the expected face ratio and doubled Grassmann
    angle, intended for d far beyond the exact-arithmetic test window.

    Matches the exact rationals to relative error <= 1e-9 wherever both are
    computed (cross-checked for d <= 200 in the test suite).
    """
    _check_face_params(d, n, k, k_min=1)
    if d == n:
        face = LogReal(1, 0.0)
    else:
        log_face = (
            log_partial_row_sum(n - k - 1, d - k - 1)
            - log_partial_row_sum(n - 1, d - 1)
            + k * LN2
        )
        face = LogReal(1, log_face)
    log_grassmann = _log_row_range_sum(n - 1, d - k, d - 1) - log_partial_row_sum(
        n - 1, d - 1
    )
    return LogRatios(face, LogReal(1, log_grassmann))


# ---------------------------------------------------------------------------
# Partial-sum ratios and their sandwich bounds.


def binomial_tail_ratio(n: int, m: int) -> Fraction:
    """S(n, m) / binom(n, m+1), exactly.

    Undefined at m = n where the denominator vanishes.
    """
    if not (0 <= m <= n):
        raise DomainError(f"need 0 <= m <= n, got n={n}, m={m}")
    if m == n:
        raise DomainError(f"ratio undefined at m = n = {n}: denominator binom(n, n+1) = 0")
    return Fraction(binomial_partial_sum(n, m), binomial(n, m + 1))


@dataclass(frozen=True)
class TailRatioBounds:
    """Exact sandwich around S(n, m) / binom(n, m+1).

    ``upper_kind`` records which upper estimate applies: "strict" for
    2m < n+1, "boundary" for 2m = n+1.  ``lower_geometric`` is present only
    when a truncation depth was supplied.
    """

    ratio: Fraction
    lower_simple: Fraction
    upper: Fraction
    upper_kind: str
    lower_geometric: Fraction | None = None


def tail_ratio_bounds(n: int, m: int, depth: int | None = None) -> TailRatioBounds:
    """Two-sided bounds for the partial-sum ratio S(n, m) / binom(n, m+1).

    Requires 2m <= n+1 (and m < n so the ratio exists).  The upper bound
    sums a dominating geometric series; at the boundary 2m = n+1 the series
    argument degenerates and the bound becomes (m+1)**2 / (n-m).  The simple
    lower bound keeps two terms of the sum; the optional geometric lower
    bound keeps ``depth + 1`` terms and needs 2 <= depth <= m.

    Every bound is verified against the exact ratio before returning.
    """
    if n < 1 or m < 0:
        raise DomainError(f"need n >= 1 and m >= 0, got n={n}, m={m}")
    if 2 * m > n + 1:
        raise DomainError(f"hypothesis 2m <= n+1 fails: n={n}, m={m}")
    ratio = binomial_tail_ratio(n, m)

    if 2 * m < n + 1:
        q0 = Fraction(m, n - m + 1)
        upper = (
            Fraction(m + 1, n - m)
            * Fraction(n - m + 1, n - 2 * m + 1)
            * (1 - q0 ** (m + 1))
        )
        upper_kind = "strict"
    else:
        upper = Fraction((m + 1) ** 2, n - m)
        upper_kind = "boundary"

    lower_simple = Fraction(m + 1, n - m) * Fraction(n + 1, n + 1 - m)

    lower_geometric: Fraction | None = None
    if depth is not None:
        if not (2 <= depth <= m):
            raise DomainError(
                f"hypothesis 2 <= depth <= m fails: m={m}, depth={depth}"
            )
        q1 = Fraction(m - depth + 1, n - m + depth)
        lower_geometric = Fraction(m - depth + 1, n - 2 * m + 2 * depth - 1) * (
            1 - q1 ** (depth + 1)
        )

    if not (lower_simple <= ratio <= upper):
        raise InvariantViolationError(f"tail-ratio sandwich failed at n={n}, m={m}")
    if lower_geometric is not None and lower_geometric > ratio:
        raise InvariantViolationError(
            f"geometric lower bound exceeded ratio at n={n}, m={m}, depth={depth}"
        )
    return TailRatioBounds(ratio, lower_simple, upper, upper_kind, lower_geometric)


@dataclass(frozen=True)
class FaceRatioDecomposition:
    """P_{d,n} / P_{d-k,n-k} written as 1 + excess, together with a lower
    bound for P_{d-k,n-k} itself (one half minus a central-strip correction
    that is empty when n - 2d + k - 1 < 0)."""

    excess: Fraction
    wendel_lower: Fraction


def face_ratio_decomposition(d: int, n: int, k: int) -> FaceRatioDecomposition:
    """Decompose the inverse face ratio as 1 + excess, exactly.

    excess = [ sum_{j=1..k} binom(k,j) * S_j ] / (2**(n-1) * P_{d-k,n-k})
    where S_j = sum_{m<j} binom(n-k-1, d-k+m).  The identity
    P_{d,n} / P_{d-k,n-k} = 1 + excess is verified before returning, as is
    the lower bound P_{d-k,n-k} >= wendel_lower.
    """
    if not (1 <= k <= d - 1 and d <= n):
        raise DomainError(f"need 1 <= k <= d-1 and d <= n, got d={d}, n={n}, k={k}")
    row = n - k - 1
    prefix = 0
    weighted = 0
    for j in range(1, k + 1):
        prefix += binomial(row, d - k + j - 1)
        weighted += binomial(k, j) * prefix
    p_small = wendel_probability(d - k, n - k)
    excess = Fraction(weighted, 1 << (n - 1)) / p_small

    if wendel_probability(d, n) / p_small != 1 + excess:
        raise InvariantViolationError(
            f"excess decomposition failed at d={d}, n={n}, k={k}"
        )

    strip = sum(binomial(row, d - k + r) for r in range(0, n - 2 * d + k))
    wendel_lower = Fraction(1, 2) - Fraction(strip, 1 << (n - k))
    if p_small < wendel_lower:
        raise InvariantViolationError(
            f"wendel lower bound failed at d={d}, n={n}, k={k}"
        )
    return FaceRatioDecomposition(excess, wendel_lower)


@dataclass(frozen=True)
class OkamotoTailBound:
    """Exact binomial upper-tail probability and its sub-Gaussian bound."""

    exact_tail: Fraction
    bound: float


def okamoto_tail_bound(d: int, n: int) -> OkamotoTailBound:
    """P(xi_{n-1} >= d) for xi binomial(n-1, 1/2), with the exponential
    bound exp(-2 * (d/(n-1) - 1/2)**2 * (n-1)).

    Requires d/(n-1) >= 1/2; the exact tail never exceeds the bound.
    """
    if n < 2:
        raise DomainError(f"need n >= 2, got n={n}")
    if 2 * d < n - 1:
        raise DomainError(
            f"hypothesis d/(n-1) >= 1/2 fails: d={d}, n={n}"
        )
    rows = n - 1
    tail = Fraction((1 << rows) - binomial_partial_sum(rows, d - 1), 1 << rows)
    bound = math.exp(-2.0 * (d / rows - 0.5) ** 2 * rows)
    if tail > Fraction(bound):
        raise InvariantViolationError(f"tail bound failed at d={d}, n={n}")
    return OkamotoTailBound(tail, bound)
