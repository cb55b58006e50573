"""Exception hierarchy shared by every module."""


class SparseLAEError(Exception):
    """Base class for all package errors."""


class InvalidInputError(SparseLAEError, ValueError):
    """Input data is malformed (non-finite entries, wrong shape, ...)."""


class InvalidArgumentError(SparseLAEError, ValueError):
    """A parameter is outside its admissible range."""


class ConfigError(InvalidArgumentError):
    """An experiment configuration is inconsistent."""


class ParseError(InvalidInputError):
    """A matrix file could not be parsed."""

    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        parts = [str(path)] if path is not None else []
        if line is not None:
            parts.append(f"line {line}")
        super().__init__(": ".join(parts + [message]))


class NumericalError(SparseLAEError, ArithmeticError):
    """A factorization failed or produced an unusable result."""


class RankDeficiencyError(NumericalError):
    """A matrix that must have full column rank does not."""

    def __init__(self, message, index):
        self.index = index
        super().__init__(f"{message} (column {index})")


class DegenerateSelectionError(NumericalError):
    """Selected columns span fewer than k independent directions."""
