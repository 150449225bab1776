"""Exception hierarchy for cwlab.

Every numerical failure raised by the library derives from ``NumericalError``;
the CLI maps those to exit code 1.
"""


class NumericalError(Exception):
    """Base class for numerical failures."""


class PrecisionMismatchError(NumericalError, ValueError):
    """Operands carry different working precisions."""


class OracleRangeError(NumericalError, ValueError):
    """Brute-force oracle requested outside its supported size."""


class DomainError(NumericalError, ValueError):
    """Arguments lie outside the region where an operation is defined."""


class PoleError(NumericalError):
    """Evaluation too close to a zero of cosh (a pole of the landscape)."""


class DegenerateSaddleError(NumericalError):
    """beta == 1, where the three critical points of h merge."""


class NoSaddleError(NumericalError):
    """Newton iteration for the nontrivial saddle failed or left its disc."""


class BranchAmbiguityError(NumericalError):
    """Square-root branch cannot be fixed by continuity."""


class SingularityProximityError(NumericalError):
    """Evaluation too close to beta == 1."""


class ZeroProximityError(NumericalError):
    """The partition function vanishes at working precision."""


class BracketError(NumericalError):
    """A root bracket does not show the required sign change."""


class ContinuationError(NumericalError):
    """Path continuation could not be completed."""


class CoverageError(NumericalError):
    """A traced curve does not cover the requested region."""


class AccuracyError(NumericalError):
    """Adaptive refinement did not reach the requested accuracy.

    The best available estimate is attached as ``best``.
    """

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
