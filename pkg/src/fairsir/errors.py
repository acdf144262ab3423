"""Exceptions shared across the package, mapped to CLI exit codes."""


class ConfigurationError(ValueError):
    """Invalid parameters, dimensions or config files (CLI exit code 2)."""


class NumericError(ArithmeticError):
    """Non-finite values or failed numerics at runtime (CLI exit code 3)."""


EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3
