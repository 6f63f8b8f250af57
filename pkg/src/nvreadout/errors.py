"""Exception hierarchy shared by all nvreadout modules."""


class NVReadoutError(Exception):
    """Base class for every error raised by this package."""


class InvalidInput(NVReadoutError, ValueError):
    pass


class NegativeRate(InvalidInput):
    pass


class NonFiniteInput(InvalidInput):
    pass


class InvalidProbability(InvalidInput):
    pass


class InvalidCombination(InvalidInput):
    pass


class DimensionMismatch(InvalidInput):
    pass


class OutOfRange(InvalidInput):
    pass


class InvariantViolation(InvalidInput):
    """A domain object was constructed with data breaking one of its invariants."""

    def __init__(self, message, field=None, row=None):
        super().__init__(message)
        self.field = field
        self.row = row


class ParseError(NVReadoutError, ValueError):
    """Malformed input file; ``line`` is 1-based when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class NotConverged(NVReadoutError, RuntimeError):
    pass


class IllConditioned(NVReadoutError, RuntimeError):
    pass


class NoPeakFound(NVReadoutError, RuntimeError):
    pass
