"""Error taxonomy for certified finite-precision computations.

Every exception here means "the requested certificate cannot be produced",
never "the answer is probably wrong". Callers that can work at a lower
certification floor may catch and retry.
"""


class CertificationError(Exception):
    """Base class for all certification failures."""


class DivisionByIndistinguishableZero(CertificationError):
    """Divisor is numerically zero at its stated precision."""


class AmbiguousValuation(CertificationError):
    """Valuation requested for a value indistinguishable from zero."""


class NotAOneUnit(CertificationError):
    """Logarithm series argument is not congruent to 1 modulo the maximal ideal."""


class ChartMismatch(CertificationError):
    """Operands live on different charts or have incompatible degrees."""


class TaintedWindow(CertificationError):
    """A certificate was requested for data that overflowed its monomial window."""


class AmbiguousPivot(CertificationError):
    """All pivot candidates are indistinguishable from zero below the certification floor."""


class AmbiguousSolve(CertificationError):
    """Consistency of a linear system cannot be decided at the working precision."""


class NotACoboundary(CertificationError):
    """A coboundary witness was requested for a class with a certified obstruction."""

    def __init__(self, message: str, obstruction=None):
        super().__init__(message)
        self.obstruction = obstruction


class NotInSpan(CertificationError):
    """A class does not lie in the span of the requested basis modulo coboundaries."""


class NotNilpotent(CertificationError):
    """A unipotent exponential was requested for a matrix without a certified vanishing power."""
