"""Exception hierarchy shared by all modules."""


class DsrError(Exception):
    """Base class for every error raised by dsrfilter."""


class DomainError(DsrError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class UsageError(DsrError, ValueError):
    """An operation was called with structurally invalid arguments."""


class SingularConversionError(DsrError, ArithmeticError):
    pass


class NonInvertibleError(DsrError, ArithmeticError):
    pass


class ParseError(DsrError, ValueError):
    """Malformed input text. ``lineno`` is 1-based, or None if unknown."""

    def __init__(self, message, lineno=None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


class MetricsError(DsrError):
    pass


class ConfigError(DsrError, ValueError):
    pass
