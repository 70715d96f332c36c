"""Exception hierarchy shared by the library and the CLI.

The CLI maps these onto exit codes: ConfigError -> 2, DataError -> 3,
NumericalError -> 4.
"""


class ConfigError(ValueError):
    """A parameter, grid, or configuration value is invalid."""


class DataError(ValueError):
    """Input data is malformed, inconsistent, or insufficient."""


class ParseError(DataError):
    """A text input failed to parse. Carries the 1-based line number."""

    def __init__(self, message, line_number=None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class NumericalError(RuntimeError):
    """A computation is degenerate or failed to converge."""
