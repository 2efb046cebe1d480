"""Exception types raised by pelastica.

Every error the library raises derives from PelasticaError. The subclasses
also inherit from the matching builtin (ValueError or RuntimeError) so that
callers catching builtins keep working.

Usage:
    try:
        roots = solve_roots(params)
    except CircleDegenerateError:
        data = circle(params.p, params.space)

Author:
    Jake Meador <jameador13@gmail.com>
"""

__author__ = 'Jake Meador <jameador13@gmail.com>'
__all__ = [
    'PelasticaError',
    'DomainError',
    'CircleDegenerateError',
    'BracketError',
    'ConvergenceError',
    'UsageError',
    'ConfigError',
    'EXIT_OK',
    'EXIT_CHECK_FAILED',
    'EXIT_USAGE',
    'EXIT_DOMAIN',
    'EXIT_CONVERGENCE',
    'EXIT_IO',
    'exit_code_for',
]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_CONVERGENCE = 4
EXIT_IO = 5


class PelasticaError(Exception):
    """Base class for all pelastica errors."""


class DomainError(PelasticaError, ValueError):
    """Input lies outside the domain where the operation is defined."""


class CircleDegenerateError(DomainError):
    """The integration constant sits on the circle end of the window.

    Raised instead of returning two nearly coincident curvature roots. The
    circle solution is the right object there.
    """

    def __init__(self, p: float, a: float, a_star: float) -> None:
        self.p = p
        self.a = a
        self.a_star = a_star
        super().__init__(
            f'circle-degenerate: a={a!r} is within {abs(a - a_star):.3e} of a_*={a_star!r} (p={p!r})'
        )


class BracketError(PelasticaError, RuntimeError):
    """A sign change could not be bracketed.

    Attributes:
        lower: Lower bracket endpoint that was tried
        upper: Upper bracket endpoint that was tried
        values: Function values observed at the endpoints
    """

    def __init__(self, message: str, lower: float, upper: float,
                 values: tuple[float, float] | None = None) -> None:
        self.lower = lower
        self.upper = upper
        self.values = values
        super().__init__(message)


class ConvergenceError(PelasticaError, RuntimeError):
    """An iterative method stopped before reaching its tolerance."""


class UsageError(PelasticaError, ValueError):
    """Invalid command-line or API usage."""


class ConfigError(UsageError):
    """Invalid configuration value or file."""


def exit_code_for(error: BaseException) -> int:
    """Map an exception to the CLI exit code."""
    if isinstance(error, UsageError):
        return EXIT_USAGE
    if isinstance(error, DomainError):
        return EXIT_DOMAIN
    if isinstance(error, (BracketError, ConvergenceError)):
        return EXIT_CONVERGENCE
    if isinstance(error, OSError):
        return EXIT_IO
    return EXIT_CHECK_FAILED
