"""Exception types shared across the package.

The CLI maps these onto exit codes: invalid input or configuration -> 2,
numerical failures -> 3, size-cap refusals -> 4.
"""


class InvalidInputError(ValueError):
    """Malformed data: bad shapes, empty sets, non-finite entries."""


class InvalidConfigError(ValueError):
    """A configuration value violates its documented constraints."""


class DomainError(ValueError):
    """Arguments outside the domain where a formula is valid."""


class SizeCapError(ValueError):
    """Instance too large for an exact (enumeration-based) routine."""


class RankDeficiencyError(RuntimeError):
    """Design matrix is numerically rank deficient.

    Carries the detected numerical rank in ``rank``.
    """

    def __init__(self, rank, cols):
        super().__init__(f"rank deficient design: numerical rank {rank} < {cols} columns")
        self.rank = rank
        self.cols = cols


class NumericalError(RuntimeError):
    """Non-finite values encountered mid-computation.

    ``iteration`` records where the solver was when it happened (or None).
    """

    def __init__(self, message, iteration=None):
        super().__init__(message)
        self.iteration = iteration
