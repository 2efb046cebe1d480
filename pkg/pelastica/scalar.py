"""Pointwise functions of the curvature.

Covers the admissibility window (a_*, 0) for the integration constant, the
function f_{p,a} whose two positive roots bound the curvature, the interior
maximizer kappa_c, and a bisection solver for the curvature extrema.

Real powers are always evaluated as exp(q * log(kappa)) behind a kappa > 0
guard, since p is generically irrational.

Usage:
    from pelastica.lorentz import HYPERBOLIC
    from pelastica.scalar import make_params, solve_roots

    params = make_params(2.0, -1.0, HYPERBOLIC)
    roots = solve_roots(params)      # beta ~ 0.517638, alpha ~ 1.931852

Author:
    Jake Meador <jameador13@gmail.com>
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy import optimize

from .exceptions import BracketError, CircleDegenerateError, ConvergenceError, DomainError
from .lorentz import DE_SITTER, HYPERBOLIC, SpaceForm

__author__ = 'Jake Meador <jameador13@gmail.com>'
__all__ = [
    'ElasticaParams',
    'RootData',
    'DEFAULT_ROOT_TOL',
    'CIRCLE_DEGENERATE_FRACTION',
    'space_from_name',
    'check_admissible_p',
    'make_params',
    'a_star',
    'power',
    'power_delta',
    'f_pa',
    'f_pa_prime',
    'kappa_c',
    'q_critical',
    'solve_roots',
]

logger = logging.getLogger('pelastica.scalar')

DEFAULT_ROOT_TOL = 1e-13
CIRCLE_DEGENERATE_FRACTION = 1e-14
_MAX_BRACKET_STEPS = 1100
_MAX_BISECTIONS = 400
_NEWTON_STEPS = 3


def space_from_name(name: str) -> SpaceForm:
    """Resolve 'h2' or 'h12' to a SpaceForm."""
    spaces = {'h2': HYPERBOLIC, 'h12': DE_SITTER}
    try:
        return spaces[name.lower()]
    except KeyError:
        raise DomainError(f'Unknown space {name!r} (expected one of: {", ".join(spaces)})') from None


def check_admissible_p(p: float, space: SpaceForm) -> None:
    """Raise DomainError unless p > 1 on the hyperbolic plane or p < 0 on de Sitter."""
    if not math.isfinite(p):
        raise DomainError(f'p must be finite, got {p!r}')
    if space.epsilon == 0 and not p > 1:
        raise DomainError(f'p={p!r} is inadmissible for {space.label}: closed convex curves need p > 1')
    if space.epsilon == 1 and not p < 0:
        raise DomainError(f'p={p!r} is inadmissible for {space.label}: space-like solutions need p < 0')


def a_star(p: float, space: SpaceForm) -> float:
    """Lower end of the admissible window for the integration constant.

    a_* = -(s p)^p (s (p - 1))^(1 - p) with s = (-1)^epsilon, evaluated through
    logarithms of the two positive bases.
    """
    check_admissible_p(p, space)
    sign = -1.0 if space.epsilon else 1.0
    return -math.exp(p * math.log(sign * p) + (1.0 - p) * math.log(sign * (p - 1.0)))


@dataclass(frozen=True)
class ElasticaParams:
    """Exponent p and integration constant a on a given space form."""

    space: SpaceForm
    p: float
    a: float

    def __post_init__(self) -> None:
        lower = a_star(self.p, self.space)
        if not (lower < self.a < 0):
            raise DomainError(
                f'a={self.a!r} outside the admissible window ({lower!r}, 0) for p={self.p!r} on {self.space.label}'
            )

    @property
    def a_star(self) -> float:
        return a_star(self.p, self.space)

    @property
    def eps2(self) -> int:
        return self.space.eps2


@dataclass(frozen=True)
class RootData:
    """Curvature extrema beta < alpha and the maximizer kappa_c of f between them."""

    beta: float
    alpha: float
    kappa_c: float

    @property
    def width(self) -> float:
        return self.alpha - self.beta


def make_params(p: float, a: float, space: SpaceForm) -> ElasticaParams:
    """Build validated parameters.

    a >= 0 is rejected here as well: those curves carry inflection points and
    never close.
    """
    if a >= 0:
        raise DomainError(f'a={a!r} must be negative; a >= 0 gives non-convex, non-closing curves')
    return ElasticaParams(space=space, p=float(p), a=float(a))


def _check_positive(kappa: NDArray[np.float64]) -> None:
    if np.any(~(kappa > 0)):
        raise DomainError('curvature must be strictly positive')


def power(kappa: ArrayLike, q: float) -> NDArray[np.float64]:
    """kappa ** q as exp(q log kappa) for kappa > 0."""
    k = np.asarray(kappa, dtype=float)
    _check_positive(k)
    return np.exp(q * np.log(k))


def power_delta(base: ArrayLike, shift: ArrayLike, q: float) -> NDArray[np.float64]:
    """(base + shift) ** q - base ** q without cancellation for small shifts."""
    b = np.asarray(base, dtype=float)
    w = np.asarray(shift, dtype=float)
    return power(b, q) * np.expm1(q * np.log1p(w / b))


def f_pa(kappa: ArrayLike, params: ElasticaParams) -> NDArray[np.float64] | float:
    """f_{p,a}(kappa) = a - eps2 (p-1)^2 kappa^(2p) + eps2 p^2 kappa^(2(p-1)).

    Raises:
        DomainError: If any kappa <= 0
    """
    p, eps2 = params.p, params.eps2
    k = np.asarray(kappa, dtype=float)
    value = params.a - eps2 * (p - 1.0) ** 2 * power(k, 2.0 * p) + eps2 * p * p * power(k, 2.0 * p - 2.0)
    return float(value) if value.ndim == 0 else value


def f_pa_prime(kappa: ArrayLike, params: ElasticaParams) -> NDArray[np.float64] | float:
    """d f_{p,a} / d kappa = 2 eps2 p (p-1) kappa^(2p-3) (p - (p-1) kappa^2)."""
    p, eps2 = params.p, params.eps2
    k = np.asarray(kappa, dtype=float)
    value = 2.0 * eps2 * p * (p - 1.0) * power(k, 2.0 * p - 3.0) * (p - (p - 1.0) * k * k)
    return float(value) if value.ndim == 0 else value


def kappa_c(p: float) -> float:
    """Interior maximizer sqrt(p / (p - 1)) of f_{p,a}, valid on both branches."""
    if 0 <= p <= 1:
        raise DomainError(f'kappa_c is undefined for p={p!r} in [0, 1]')
    return math.sqrt(p / (p - 1.0))


def q_critical(params: ElasticaParams) -> float:
    """Critical point ((1 - p) / (-a)) ** (-1 / 2p) of the de Sitter auxiliary polynomial."""
    if params.space.epsilon != 1:
        raise DomainError('q_critical is only defined on the de Sitter plane')
    p = params.p
    return math.exp(-math.log((1.0 - p) / (-params.a)) / (2.0 * p))


def _bisect(func, lower: float, upper: float, tol: float) -> float:
    rtol = max(tol, 4.0 * np.finfo(float).eps)
    root, info = optimize.bisect(
        func, lower, upper,
        xtol=np.finfo(float).tiny, rtol=rtol, maxiter=_MAX_BISECTIONS,
        full_output=True, disp=False,
    )
    if not info.converged:
        raise ConvergenceError(f'bisection on [{lower!r}, {upper!r}] stopped after {info.iterations} iterations')
    logger.debug(f'bisection on [{lower:.6g}, {upper:.6g}] -> {root!r} in {info.iterations} iterations')
    return float(root)


def _polish(func, fprime, root: float, lower: float, upper: float) -> float:
    """Newton steps from a bisection root; kept only if they stay in the bracket and shrink |f|."""
    with np.errstate(over='ignore', invalid='ignore', divide='ignore'):
        polished, _ = optimize.newton(
            func, root, fprime=fprime,
            tol=4.0 * np.finfo(float).eps * root, maxiter=_NEWTON_STEPS,
            full_output=True, disp=False,
        )
        polished = float(polished)
        if not (math.isfinite(polished) and lower <= polished <= upper):
            return root
        if abs(func(polished)) > abs(func(root)):
            return root
    return polished


def solve_roots(params: ElasticaParams, tol: float = DEFAULT_ROOT_TOL) -> RootData:
    """Find the two positive roots beta < alpha of f_{p,a}.

    The lower bracket is found by halving from kappa_c until f < 0, the upper
    one by doubling; each root is then refined by bisection and polished with
    a few Newton steps on the analytic derivative, so f vanishes at the
    returned roots to rounding rather than to the bisection width.

    Args:
        params: Admissible parameters
        tol: Relative bracket width at termination

    Returns:
        RootData with beta < kappa_c < alpha

    Raises:
        CircleDegenerateError: If a is within 1e-14 |a_*| of a_*
        BracketError: If no sign change is found on either side
        ConvergenceError: If bisection does not reach tol
    """
    if tol <= 0:
        raise ValueError(f'tol must be positive, got {tol}')

    lower_end = params.a_star
    if params.a - lower_end < CIRCLE_DEGENERATE_FRACTION * abs(lower_end):
        raise CircleDegenerateError(params.p, params.a, lower_end)

    center = kappa_c(params.p)

    def func(kappa: float) -> float:
        return f_pa(kappa, params)

    with np.errstate(over='ignore', invalid='ignore'):
        lo = center
        for _ in range(_MAX_BRACKET_STEPS):
            lo *= 0.5
            if lo == 0.0:
                raise BracketError(f'lower bracket underflowed below kappa_c={center!r}', lo, center)
            if func(lo) < 0:
                break
        else:
            raise BracketError(f'no sign change of f below kappa_c={center!r}', lo, center)

        hi = center
        for _ in range(_MAX_BRACKET_STEPS):
            hi *= 2.0
            if not math.isfinite(hi):
                raise BracketError(f'upper bracket overflowed above kappa_c={center!r}', center, hi)
            if func(hi) < 0:
                break
        else:
            raise BracketError(f'no sign change of f above kappa_c={center!r}', center, hi)

    if not func(center) > 0:
        raise BracketError(f'f(kappa_c) = {func(center)!r} is not positive', lo, hi,
                           (func(lo), func(hi)))

    def slope(kappa: float) -> float:
        return f_pa_prime(kappa, params)

    beta = _polish(func, slope, _bisect(func, lo, center, tol), lo, center)
    alpha = _polish(func, slope, _bisect(func, center, hi, tol), center, hi)
    return RootData(beta=beta, alpha=alpha, kappa_c=center)
