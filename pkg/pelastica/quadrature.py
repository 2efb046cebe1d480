"""Integrals over one curvature half-period.

The rotation angle per period Lambda_p(a), the curvature period rho(a) and the
energy Theta_p all integrate over [beta, alpha] with square-root singularities
at both roots of f_{p,a}. The substitution kappa(t) = beta + (alpha - beta)
sin^2 t, t in [0, pi/2], turns d kappa / sqrt((kappa - beta)(alpha - kappa))
into 2 dt and leaves the smooth factor g = f / ((kappa - beta)(alpha - kappa)).

g and the rotation norm a eps2 + p^2 kappa^(2p-2) are evaluated from
differences anchored at the nearer root, so both stay accurate when the
roots are far apart and the integrand develops a narrow peak next to beta.
The peak is resolved by composite Gauss–Legendre on panels graded
geometrically toward both ends of [0, pi/2], with the node count doubled
until successive estimates agree.

Usage:
    from pelastica.quadrature import QuadratureConfig, lambda_p, period

    cfg = QuadratureConfig(base_nodes=64)
    lambda_p(params, cfg)      # in (pi, sqrt(2) pi)
    period(params, cfg)

Author:
    Jake Meador <jameador13@gmail.com>
"""

import functools
import logging
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.polynomial import legendre
from numpy.typing import NDArray

from .exceptions import ConfigError, ConvergenceError, DomainError
from .scalar import ElasticaParams, RootData, f_pa_prime, power, power_delta, solve_roots

__author__ = 'Jake Meador <jameador13@gmail.com>'
__all__ = [
    'QuadratureConfig',
    'QuadratureResult',
    'HalfPeriod',
    'REDUCED_CONFIDENCE_FRACTION',
    'gauss_legendre',
    'graded_panels',
    'integrate_half_period',
    'is_reduced_confidence',
    'lambda_p',
    'period',
    'energy',
    'energy_limit',
    'quadrature_report',
]

logger = logging.getLogger('pelastica.quadrature')

REDUCED_CONFIDENCE_FRACTION = 1e-8

Density = Callable[[NDArray[np.float64]], NDArray[np.float64]]


@dataclass(frozen=True)
class QuadratureConfig:
    """Gauss–Legendre settings shared by every half-period integral.

    Attributes:
        base_nodes: Nodes per panel on the first pass
        max_doublings: How many times the node count may double
        rel_tol: Relative agreement required between successive passes
        panel_levels: Number of geometrically shrinking panels toward each end
        panel_ratio: Width ratio between neighbouring graded panels
    """

    base_nodes: int = 64
    max_doublings: int = 6
    rel_tol: float = 1e-11
    panel_levels: int = 16
    panel_ratio: float = 0.1

    def __post_init__(self) -> None:
        if self.base_nodes < 16:
            raise ConfigError(f'base_nodes must be >= 16, got {self.base_nodes}')
        if self.max_doublings < 1:
            raise ConfigError(f'max_doublings must be >= 1, got {self.max_doublings}')
        if not self.rel_tol > 0:
            raise ConfigError(f'rel_tol must be positive, got {self.rel_tol}')
        if self.panel_levels < 0:
            raise ConfigError(f'panel_levels must be >= 0, got {self.panel_levels}')
        if not 0 < self.panel_ratio < 1:
            raise ConfigError(f'panel_ratio must lie in (0, 1), got {self.panel_ratio}')


@dataclass(frozen=True)
class QuadratureResult:
    """Value of a half-period integral with the effort it took."""

    value: float
    nodes: int
    doublings: int
    estimate_change: float


@functools.lru_cache(maxsize=32)
def gauss_legendre(n: int) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    """Nodes and weights of the n-point Gauss–Legendre rule on [-1, 1]."""
    nodes, weights = legendre.leggauss(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


@functools.lru_cache(maxsize=32)
def graded_panels(levels: int, ratio: float) -> NDArray[np.float64]:
    """Panel boundaries on [0, pi/2], shrinking by `ratio` toward both ends."""
    quarter = math.pi / 4
    left = quarter * ratio ** np.arange(levels, -1, -1, dtype=float)
    right = (math.pi / 2 - left)[::-1]
    bounds = np.concatenate([[0.0], left, right[1:], [math.pi / 2]])
    bounds.setflags(write=False)
    return bounds


def _composite(density: Density, bounds: NDArray[np.float64], n: int) -> float:
    nodes, weights = gauss_legendre(n)
    half = 0.5 * np.diff(bounds)
    mid = 0.5 * (bounds[1:] + bounds[:-1])
    t = mid[:, np.newaxis] + half[:, np.newaxis] * nodes[np.newaxis, :]
    values = density(t.ravel()).reshape(t.shape)
    return float(np.sum(half * (values @ weights)))


def integrate_half_period(density: Density, cfg: QuadratureConfig) -> QuadratureResult:
    """Integrate a density in the substitution angle t over [0, pi/2].

    Raises:
        ConvergenceError: If successive estimates still differ after
            max_doublings doublings
    """
    bounds = graded_panels(cfg.panel_levels, cfg.panel_ratio)
    n = cfg.base_nodes
    previous = _composite(density, bounds, n)
    change = math.inf
    for doubling in range(1, cfg.max_doublings + 1):
        n *= 2
        current = _composite(density, bounds, n)
        change = abs(current - previous)
        if change <= cfg.rel_tol * abs(current):
            logger.debug(f'half-period integral converged with {n} nodes/panel ({doubling} doublings)')
            return QuadratureResult(value=current, nodes=n, doublings=doubling, estimate_change=change)
        previous = current
    raise ConvergenceError(
        f'half-period integral not converged after {cfg.max_doublings} doublings '
        f'(last change {change:.3e}, rel_tol {cfg.rel_tol:.1e})'
    )


class HalfPeriod:
    """Integrand densities in t for one sweep of the curvature from beta to alpha."""

    def __init__(self, params: ElasticaParams, roots: RootData) -> None:
        self.params = params
        self.roots = roots
        self.p = params.p
        self.a = params.a
        self.eps2 = params.eps2
        self.beta = roots.beta
        self.alpha = roots.alpha
        self.width = roots.alpha - roots.beta
        self._sqrt_minus_a = math.sqrt(-params.a)

    def split(self, t: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64], NDArray[np.float64]]:
        """Curvature and its distances u = kappa - beta, v = alpha - kappa at angles t."""
        t = np.asarray(t, dtype=float)
        u = self.width * np.sin(t) ** 2
        v = self.width * np.cos(t) ** 2
        kappa = np.where(u <= v, self.beta + u, self.alpha - v)
        return kappa, u, v

    def kappa(self, t: NDArray[np.float64]) -> NDArray[np.float64]:
        return self.split(t)[0]

    def g(self, t: NDArray[np.float64]) -> NDArray[np.float64]:
        """Smooth factor f / (u v), taking one-sided limits at the roots."""
        p, eps2 = self.p, self.eps2
        kappa, u, v = self.split(t)
        near_beta = u <= v
        # both branches are evaluated everywhere; the far one may overflow and is discarded
        with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
            f_beta = eps2 * (p * p * power_delta(self.beta, u, 2.0 * p - 2.0)
                             - (p - 1.0) ** 2 * power_delta(self.beta, u, 2.0 * p))
            f_alpha = eps2 * (p * p * power_delta(self.alpha, -v, 2.0 * p - 2.0)
                              - (p - 1.0) ** 2 * power_delta(self.alpha, -v, 2.0 * p))
            f = np.where(near_beta, f_beta, f_alpha)
            g = f / (u * v)
        g = np.where(u == 0, f_pa_prime(self.beta, self.params) / self.width, g)
        g = np.where(v == 0, -f_pa_prime(self.alpha, self.params) / self.width, g)
        return g

    def rotation_norm(self, kappa: NDArray[np.float64], u: NDArray[np.float64]) -> NDArray[np.float64]:
        """<J, J> = eps2 a + p^2 kappa^(2p-2), positive along every admissible curve."""
        p = self.p
        if self.params.space.epsilon == 0:
            return (p - 1.0) ** 2 * power(self.beta, 2.0 * p) + p * p * power_delta(self.beta, u, 2.0 * p - 2.0)
        return -self.a + p * p * power(kappa, 2.0 * p - 2.0)

    def ds_dt(self, t: NDArray[np.float64]) -> NDArray[np.float64]:
        p = self.p
        kappa = self.kappa(t)
        return 2.0 * p * (p - 1.0) * power(kappa, p - 2.0) / np.sqrt(self.g(t))

    def dtheta_dt(self, t: NDArray[np.float64]) -> NDArray[np.float64]:
        p = self.p
        kappa, u, _ = self.split(t)
        coeff = 2.0 * self.eps2 * p * (p - 1.0) ** 2 * self._sqrt_minus_a
        return coeff * power(kappa, 2.0 * p - 2.0) / (self.rotation_norm(kappa, u) * np.sqrt(self.g(t)))

    def denergy_dt(self, t: NDArray[np.float64]) -> NDArray[np.float64]:
        p = self.p
        kappa = self.kappa(t)
        return 2.0 * p * (p - 1.0) * power(kappa, 2.0 * p - 2.0) / np.sqrt(self.g(t))

    def theta_rate(self, kappa: NDArray[np.float64], u: NDArray[np.float64]) -> NDArray[np.float64]:
        """d theta / ds = eps2 (p-1) sqrt(-a) kappa^p / <J, J>."""
        p = self.p
        return self.eps2 * (p - 1.0) * self._sqrt_minus_a * power(kappa, p) / self.rotation_norm(kappa, u)

    def kappa_prime(self, t: NDArray[np.float64]) -> NDArray[np.float64]:
        """d kappa / ds on the rising sweep, from the first integral."""
        p = self.p
        kappa, u, v = self.split(t)
        return np.sqrt(np.maximum(self.g(t) * u * v, 0.0)) / (p * (p - 1.0) * power(kappa, p - 2.0))


def is_reduced_confidence(params: ElasticaParams) -> bool:
    """True when a lies within 1e-8 |a_*| of either end of the window."""
    margin = REDUCED_CONFIDENCE_FRACTION * abs(params.a_star)
    return params.a - params.a_star < margin or -params.a < margin


def _half_period(params: ElasticaParams, roots: Optional[RootData]) -> HalfPeriod:
    if is_reduced_confidence(params):
        logger.warning(f'reduced confidence: a={params.a!r} is within 1e-8|a_*| of the window edge (p={params.p!r})')
    return HalfPeriod(params, roots if roots is not None else solve_roots(params))


def lambda_p(params: ElasticaParams, cfg: Optional[QuadratureConfig] = None,
             roots: Optional[RootData] = None) -> float:
    """Angle advanced around the rotation axis over one curvature period.

    Args:
        params: Admissible parameters
        cfg: Quadrature settings (defaults when omitted)
        roots: Precomputed curvature extrema, solved when omitted

    Returns:
        Lambda_p(a), which lies in (pi, sqrt(2) pi)
    """
    half = _half_period(params, roots)
    return 2.0 * integrate_half_period(half.dtheta_dt, cfg or QuadratureConfig()).value


def period(params: ElasticaParams, cfg: Optional[QuadratureConfig] = None,
           roots: Optional[RootData] = None) -> float:
    """Arc length between successive curvature minima."""
    half = _half_period(params, roots)
    return 2.0 * integrate_half_period(half.ds_dt, cfg or QuadratureConfig()).value


def energy(params: ElasticaParams, m: int, cfg: Optional[QuadratureConfig] = None,
           roots: Optional[RootData] = None) -> float:
    """Value of the p-elastic functional on a curve closing after m periods.

    Both space forms reduce to 2 m p (p-1) int kappa^(2p-2) / sqrt(f) d kappa;
    the de Sitter form with the auxiliary polynomial differs only by pulling
    kappa^(p-1) out of the square root.
    """
    if m < 1:
        raise DomainError(f'm must be a positive integer, got {m}')
    half = _half_period(params, roots)
    return 2.0 * m * integrate_half_period(half.denergy_dt, cfg or QuadratureConfig()).value


def energy_limit(params: ElasticaParams, m: int) -> float:
    """Energy of the m-fold covered circle reached as a -> a_*: sqrt(-2 a_*) m pi."""
    if m < 1:
        raise DomainError(f'm must be a positive integer, got {m}')
    return math.sqrt(-2.0 * params.a_star) * m * math.pi


def quadrature_report(params: ElasticaParams, cfg: Optional[QuadratureConfig] = None) -> dict:
    """Lambda_p, period and bookkeeping for one parameter point."""
    cfg = cfg or QuadratureConfig()
    half = _half_period(params, None)
    rotation = integrate_half_period(half.dtheta_dt, cfg)
    length = integrate_half_period(half.ds_dt, cfg)
    return {
        'p': params.p,
        'a': params.a,
        'lambda': 2.0 * rotation.value,
        'period': 2.0 * length.value,
        'beta': half.beta,
        'alpha': half.alpha,
        'nodes': max(rotation.nodes, length.nodes),
        'doublings': max(rotation.doublings, length.doublings),
        'reduced_confidence': is_reduced_confidence(params),
    }
