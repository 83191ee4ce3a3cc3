"""Exception hierarchy.

Two families matter to callers: :class:`ParameterError` for inputs that are
out of a formula's domain, and :class:`NumericalError` for computations that
ran but could not meet their accuracy contract. The CLI maps them to exit
codes 2 and 3.
"""


class EtsError(Exception):
    """Base class for every error raised by the library."""


class ParameterError(EtsError, ValueError):
    """Invalid input parameters."""


class DomainError(ParameterError):
    pass


class PoleError(DomainError):
    """Argument sits on a pole of a Gamma factor."""


class NotPositiveDefinite(ParameterError):
    pass


class SingularTransform(ParameterError):
    pass


class NumericalError(EtsError, ArithmeticError):
    """A numerical procedure failed its accuracy or budget contract."""


class NonConvergence(NumericalError):
    pass


class MassDeficit(NumericalError):
    pass


class AliasingSuspected(NumericalError):
    pass


class CoverageError(NumericalError):
    pass


class BudgetExceeded(NumericalError):
    pass


class StabilityViolation(NumericalError):
    pass


class TruncationTooCoarse(NumericalError):
    pass


class SeriesOverflow(NumericalError, OverflowError):
    pass
