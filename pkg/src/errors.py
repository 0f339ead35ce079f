"""
Exception hierarchy shared by the numerical modules and the CLI.
"""


class MobiusError(Exception):
    """Root of every error raised by mobiuscs."""


class DomainError(MobiusError, ValueError):
    """A value lies outside the mathematical domain of an operation (r >= 1, a <= 0, ...)."""


class ArgumentError(MobiusError, ValueError):
    """An argument is well-typed but not acceptable for the call (n < 2, unknown id, ...)."""


class UndefinedMomentsError(MobiusError, ArithmeticError):
    """Expectation values were requested on the zero state."""


class ConfigError(MobiusError):
    """The run configuration (flags or config file) is malformed."""
