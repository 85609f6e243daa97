"""Exception types shared across the package.

The command line tool maps these onto exit codes, so the hierarchy is part
of the public surface: domain errors (bad parameters) are distinct from
solver failures and from refusals to start hopeless rejection sampling.
"""


class ConicPhaseError(Exception):
    """Base class for all package errors."""


class DomainError(ConicPhaseError, ValueError):
    """Arguments outside the mathematical domain of an operation."""


class AtThresholdError(DomainError):
    """A limit was requested exactly at a phase boundary, where no value exists."""


class SolverError(ConicPhaseError):
    """The LP solver hit its iteration cap or broke down numerically."""


class DegenerateInputError(ConicPhaseError):
    """Geometric input too close to a measure-zero configuration to classify."""


class SamplingError(ConicPhaseError):
    """Rejection sampling exhausted its attempt budget."""


class AcceptanceTooSmallError(ConicPhaseError):
    """Exact acceptance probability below the refusal threshold; sampling not started."""


class InvariantViolationError(ConicPhaseError):
    """A machine-checked internal identity failed; indicates a bug, not bad input."""
