"""Exception hierarchy shared across the package.

The CLI maps these onto process exit codes: ParseError -> 2 (malformed
input data), ValidationError and ConvergenceError -> 3 (semantically
invalid request or failed optimization). Usage errors are handled by the
argument parser itself and exit with 1.
"""


class GestureKitError(Exception):
    """Base class for all package errors."""


class ParseError(GestureKitError):
    """Malformed input file (bad header, non-numeric cell, bad interval...)."""


class ValidationError(GestureKitError):
    """Structurally valid input that violates a precondition."""


class ConvergenceError(GestureKitError):
    """An iterative solver exhausted its iteration budget."""
