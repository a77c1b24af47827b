"""Exception types shared across the package.

The CLI maps these onto exit codes: validation/parse problems exit with 2,
pipeline/solver failures with 3.
"""


class ValidationError(ValueError):
    """An input violates a documented precondition or invariant."""


class ParseError(ValidationError):
    """A file could not be parsed; the message carries the line number."""


class SolverError(RuntimeError):
    """An iterative numerical routine failed to meet its tolerance."""


class PipelineError(RuntimeError):
    """A pipeline stage cannot proceed (too-small giant component, allocation, ...)."""
