"""Exception taxonomy shared across the package and the CLI exit codes."""

__all__ = ["ConfigError", "GraphFileError", "BudgetError", "HardCheckError"]


class ConfigError(ValueError):
    """Invalid configuration or command-line input (CLI exit code 2)."""


class GraphFileError(ConfigError):
    """Malformed graph/assignment file (a kind of input error)."""


class BudgetError(RuntimeError):
    """An enumeration or sampling budget would be exceeded (CLI exit code 3)."""


class HardCheckError(AssertionError):
    """A hard runtime assertion failed (CLI exit code 4)."""
