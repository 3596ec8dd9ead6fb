"""Exception hierarchy shared across valuon modules."""


class ValuonError(Exception):
    """Base class for domain errors (CLI exit code 1)."""


class DomainMismatchError(ValuonError):
    pass


class BrokenInstanceError(ValuonError):
    """A semiring instance disagrees with itself, e.g. 1+1=1 but a+a != a."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class InvalidCongruenceError(ValuonError):
    pass


class RingValidationError(ValuonError):
    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness


class ConstructionError(ValuonError):
    pass


class ResourceBoundError(ValuonError):
    pass


class NonConvergenceError(ValuonError):
    def __init__(self, message, entry=None):
        super().__init__(message)
        self.entry = entry


class ValidationError(ValuonError):
    pass


class ArgumentError(ValuonError, ValueError):
    """Bad argument value (CLI exit code 2)."""


class ParseError(ArgumentError):
    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} at position {position}"
        super().__init__(message)
        self.position = position
