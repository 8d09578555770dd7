"""Exception types raised across the package."""


class MCEError(Exception):
    """Base class for every error raised by hullmce."""


class ZeroInverse(MCEError, ZeroDivisionError):
    pass


class DuplicateAbscissa(MCEError, ValueError):
    pass


class Singular(MCEError, ValueError):
    pass


class DimensionMismatch(MCEError, ValueError):
    pass


class RetryExhausted(MCEError, RuntimeError):
    pass


class NotSquare(MCEError, ValueError):
    pass


class DimensionDrop(MCEError):
    """C A^T lost dimension: A has a nonzero kernel on C.  A skip signal, not a failure."""


class HullNotOneDim(MCEError, ValueError):
    pass


class UnexpectedCoefficient(MCEError, ArithmeticError):
    pass


class ZeroScalar(MCEError, ValueError):
    pass


class ZeroTuple(MCEError, ValueError):
    pass


class TooLarge(MCEError, ValueError):
    pass


class NotConjugate(MCEError):
    pass


class NoSolution(MCEError):
    pass


class Indeterminate(MCEError):
    """The linearized system has a solution space of dimension > 1."""


class BaseFieldDescentFailed(NoSolution):
    pass


class OutOfRange(MCEError, ValueError):
    pass


class Exhausted(MCEError):
    pass


class NoInvertibleElement(MCEError):
    pass


class ParseError(MCEError, ValueError):
    pass


class ValidationError(MCEError, ValueError):
    pass


class AttackFailure(MCEError):
    """Raised by :func:`hullmce.attack.attack`; ``phase`` tells where it gave up."""

    def __init__(self, phase, message="", stats=None):
        super().__init__(f"{phase}: {message}" if message else phase)
        self.phase = phase
        self.message = message
        self.stats = stats
