"""Exception hierarchy shared by all modules."""


class QuarticHeckeError(Exception):
    """Base class for computation errors (CLI exit status 1)."""


class ZeroError(QuarticHeckeError, ZeroDivisionError):
    pass


class NormEven(QuarticHeckeError, ValueError):
    pass


class NotPrimary(QuarticHeckeError, ValueError):
    pass


class NotSquarefree(QuarticHeckeError, ValueError):
    pass


class NotCoprime(QuarticHeckeError, ValueError):
    pass


class BudgetExceeded(QuarticHeckeError):
    pass


class TrivialCharacter(QuarticHeckeError, ValueError):
    pass


class NotPrimitive(QuarticHeckeError, ValueError):
    pass


class NotInFamily(QuarticHeckeError, ValueError):
    pass


class NonPositiveArgument(QuarticHeckeError, ValueError):
    pass


class EvenPrime(QuarticHeckeError, ValueError):
    pass


class RegionError(QuarticHeckeError, ValueError):
    pass


class HypothesisViolated(QuarticHeckeError, ValueError):
    pass


class CorruptCache(QuarticHeckeError):
    pass
