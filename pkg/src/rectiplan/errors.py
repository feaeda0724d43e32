"""Exception hierarchy shared by every rectiplan module."""


class RectiplanError(Exception):
    """Base class for all package errors."""


class MalformedProgram(RectiplanError, ValueError):
    pass


class NumericalFailure(RectiplanError, ArithmeticError):
    pass


class InfeasibleProblem(RectiplanError):
    """Raised by the rectifier solvers when the LP has no feasible point."""

    def __init__(self, message, lp=None):
        super().__init__(message)
        self.lp = lp


class BadN(RectiplanError, ValueError):
    pass


class AliasedHarmonic(RectiplanError, ValueError):
    pass


class SpecInvalid(RectiplanError, ValueError):
    pass


class LengthMismatch(RectiplanError, ValueError):
    pass


class NonpositiveLoad(RectiplanError, ValueError):
    pass


class OutOfRange(RectiplanError, ValueError):
    pass


class DegenerateRow(RectiplanError, ValueError):
    pass


class EmptySignal(RectiplanError, ValueError):
    pass


class ZeroSignal(RectiplanError, ValueError):
    pass


class ZeroDesired(RectiplanError, ValueError):
    pass


class NonpositiveParams(RectiplanError, ValueError):
    pass


class TooLarge(RectiplanError, ValueError):
    pass


class ConfigInvalid(RectiplanError, ValueError):
    pass


class BadCsv(RectiplanError, ValueError):
    pass
