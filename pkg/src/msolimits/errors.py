"""Exception types shared across the package.

The service layer maps these onto HTTP error codes and the CLI onto exit
codes, so everything below the API boundary raises one of them.
"""


class InputError(ValueError):
    """Malformed or precondition-violating input (CLI exit code 2)."""


class InfeasibleError(RuntimeError):
    """A size/rank bound was exceeded (CLI exit code 4)."""


class InconclusiveError(RuntimeError):
    """An empirical mode could not reach a confident verdict (CLI exit code 3)."""
