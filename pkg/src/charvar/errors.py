"""Exception hierarchy shared by all charvar modules."""


class CharVarError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class NotDivisible(CharVarError):
    pass


class NotASquare(CharVarError):
    pass


class MissingVariable(CharVarError):
    pass


class ZeroAtLaurentVariable(CharVarError):
    pass


class NotUnimodular(CharVarError):
    pass


class DomainViolation(CharVarError):
    pass


class DivisionByZeroInContinuedFraction(CharVarError):
    pass


class InvalidFraction(CharVarError):
    pass


class NotAKnot(CharVarError):
    pass


class InvalidSignVector(CharVarError):
    pass


class ConventionMismatch(CharVarError):
    pass


class ReconstructionFailure(CharVarError):
    pass


class NoConvergence(CharVarError):
    pass


class SingularJacobian(CharVarError):
    pass


class ParseError(CharVarError):
    """Malformed knot specification (CLI exit code 2)."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position
