"""Exception hierarchy shared by every stage of the pipeline."""


class TRCError(Exception):
    """Base class for all errors raised by this package."""


class ValidationError(TRCError):
    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__("; ".join(self.violations) or "invalid network")


class NotComplete(TRCError):
    pass


class TooLarge(TRCError):
    pass


class DomainError(TRCError, ValueError):
    pass


class TooManyParents(TRCError):
    pass


class UnknownVariable(TRCError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class SameVariable(TRCError, ValueError):
    pass


class UncoveredFactor(TRCError):
    pass


class InvalidInput(TRCError, ValueError):
    pass


class NumericalFailure(TRCError, ArithmeticError):
    pass


class NotConverged(TRCError):
    pass


class SupportMismatch(TRCError, ValueError):
    pass


class FormatError(TRCError, ValueError):
    pass
