"""Exception types shared across the package.

Each class carries the process exit code the command-line front end uses
when it surfaces the error.
"""


class BrownslitError(Exception):
    exit_code = 1


class ParameterError(BrownslitError, ValueError):
    """A scenario or call argument lies outside its valid domain."""

    exit_code = 1


class GridError(BrownslitError, ValueError):
    """A sampling grid is too small or too coarse for the requested quantity."""

    exit_code = 1


class UnsupportedRegimeError(BrownslitError, ValueError):
    """The requested operation has no implementation in this parameter regime."""

    exit_code = 1


class ConvergenceError(BrownslitError, RuntimeError):
    """Numerical quadrature did not reach its tolerance within budget."""

    exit_code = 2

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error
