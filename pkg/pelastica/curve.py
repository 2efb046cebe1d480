"""Curvature profiles, explicit curves and closed solutions.

A p-elastic curve with parameters (p, a) is rebuilt from quadrature alone:
s(kappa) and theta(kappa) are integrated over one half-period in the
substitution angle t, the other half follows by reflection, and further
periods by translation. The curve in L^3 is then

    gamma = (R cos theta, R sin theta, Z),
    R = sqrt(eps2 a + p^2 kappa^(2p-2)) / sqrt(-a),  Z = p kappa^(p-1) / sqrt(-a).

gamma(0) sits at the curvature minimum beta with theta(0) = 0, which fixes
the rigid-motion freedom. Closed curves come from bisection on
Lambda_p(a) = 2 pi n / m.

Usage:
    from pelastica.curve import solve_closure, trace
    from pelastica.lorentz import HYPERBOLIC

    result = solve_closure(1.5, HYPERBOLIC, n=2, m=3)
    curve = trace(make_params(1.5, result.a_q, HYPERBOLIC), m=3)

Author:
    Jake Meador <jameador13@gmail.com>
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Literal, NamedTuple, Optional, Sequence

import numpy as np
from numpy.typing import NDArray
from scipy import optimize, signal

from .exceptions import BracketError, ConvergenceError, DomainError, PelasticaError
from .lorentz import SpaceForm, poincare_project, punctured_project
from .quadrature import HalfPeriod, QuadratureConfig, gauss_legendre, graded_panels, lambda_p
from .scalar import (DEFAULT_ROOT_TOL, ElasticaParams, RootData, a_star, check_admissible_p,
                     kappa_c, make_params, power, solve_roots)

__author__ = 'Jake Meador <jameador13@gmail.com>'
__all__ = [
    'CurveSample',
    'CurvatureProfile',
    'Trace',
    'ClosureResult',
    'CircleData',
    'EvolutionMember',
    'Spacing',
    'DEFAULT_SAMPLES',
    'DEFAULT_SEGMENT_NODES',
    'DEFAULT_CLOSURE_TOL',
    'circle',
    'circle_family',
    'circle_trace',
    'curvature_profile',
    'resample_uniform',
    'trace',
    'bounding_parallels',
    'check_closure_pair',
    'closure_pairs',
    'solve_closure',
    'family_evolution',
    'winding_number',
    'lobe_count',
    'disk_extent',
]

logger = logging.getLogger('pelastica.curve')

Spacing = Literal['chebyshev', 'uniform']

DEFAULT_SAMPLES = 256
DEFAULT_SEGMENT_NODES = 16
DEFAULT_CLOSURE_TOL = 1e-10
_NEWTON_STEPS = 8
_LOWER_BRACKET_EXPONENTS = (8, 10, 12, 13)
_UPPER_BRACKET_EXPONENTS = (8, 10, 12, 14, 16, 20, 25, 30)
_MONOTONE_SLACK = 1e-9


# ============================================================================
# Domain types
# ============================================================================

@dataclass(frozen=True)
class CurveSample:
    """One arc-length sample of a traced curve."""

    s: float
    kappa: float
    kappa_prime: float
    theta: float
    gamma: tuple[float, float, float]


class CurvatureProfile(NamedTuple):
    """Arc length, curvature and its derivative sampled along a curve."""

    s: NDArray[np.float64]
    kappa: NDArray[np.float64]
    kappa_prime: NDArray[np.float64]


@dataclass
class Trace:
    """Samples of a p-elastic curve over m curvature periods.

    params is None for circle traces, whose integration constant a_* lies on
    the edge of the open window; p, a and space are always set.
    """

    p: float
    a: float
    space: SpaceForm
    params: Optional[ElasticaParams]
    roots: RootData
    period_rho: float
    m: int
    s: NDArray[np.float64]
    kappa: NDArray[np.float64]
    kappa_prime: NDArray[np.float64]
    theta: NDArray[np.float64]
    gamma: NDArray[np.float64]
    tangent: NDArray[np.float64]
    spacing: Spacing = 'chebyshev'

    def __len__(self) -> int:
        return len(self.s)

    @property
    def samples(self) -> list[CurveSample]:
        return [
            CurveSample(float(s), float(k), float(kp), float(th), tuple(float(c) for c in g))
            for s, k, kp, th, g in zip(self.s, self.kappa, self.kappa_prime, self.theta, self.gamma)
        ]

    @property
    def profile(self) -> CurvatureProfile:
        return CurvatureProfile(self.s, self.kappa, self.kappa_prime)

    @property
    def closure_defect(self) -> float:
        """Max-norm distance between the first and last points."""
        return float(np.max(np.abs(self.gamma[-1] - self.gamma[0])))


@dataclass
class ClosureResult:
    """Solved integration constant for a closed curve of type (n, m)."""

    p: float
    space: str
    n: int
    m: int
    q: float
    a_q: float
    lambda_at_aq: float
    closure_defect: float
    monotone_bracket: bool = True
    evaluations: int = 0
    trace: Optional[Trace] = field(default=None, repr=False, compare=False)

    def to_dict(self) -> dict:
        return {
            'p': self.p,
            'space': self.space,
            'n': self.n,
            'm': self.m,
            'q': self.q,
            'a_q': self.a_q,
            'lambda_at_aq': self.lambda_at_aq,
            'closure_defect': self.closure_defect,
            'monotone_bracket': self.monotone_bracket,
            'evaluations': self.evaluations,
        }


@dataclass(frozen=True)
class CircleData:
    """Circle solution: constant curvature on a parallel of the quadric."""

    p: float
    space: str
    kappa: float
    radius_L3: float
    height_z: float


@dataclass
class EvolutionMember:
    """One exponent of a family; closure and trace are None when solving failed."""

    p: float
    closure: Optional[ClosureResult] = None
    trace: Optional[Trace] = field(default=None, repr=False)
    error: Optional[str] = None


# ============================================================================
# Circles
# ============================================================================

def circle(p: float, space: SpaceForm) -> CircleData:
    """Circle solution for exponent p.

    Curvature sqrt(p/(p-1)), radius sqrt((-1)^eps (p-1)) in L^3 and height
    with z^2 = (-1)^eps p; z < 0 on de Sitter.
    """
    check_admissible_p(p, space)
    sign = -1.0 if space.epsilon else 1.0
    height = math.sqrt(sign * p)
    return CircleData(
        p=p,
        space=space.name,
        kappa=kappa_c(p),
        radius_L3=math.sqrt(sign * (p - 1.0)),
        height_z=-height if space.epsilon else height,
    )


def circle_family(space: SpaceForm, p_list: Sequence[float]) -> list[CircleData]:
    """Circles for each exponent, in the order given."""
    return [circle(p, space) for p in p_list]


def circle_trace(p: float, space: SpaceForm, n_samples: int = DEFAULT_SAMPLES) -> Trace:
    """The circle solution sampled uniformly in arc length over one turn."""
    data = circle(p, space)
    r, z = data.radius_L3, data.height_z
    length = 2.0 * math.pi * r
    s = np.linspace(0.0, length, 2 * n_samples + 1)
    theta = s / r
    gamma = np.stack([r * np.cos(theta), r * np.sin(theta), np.full_like(s, z)], axis=-1)
    tangent = np.stack([-np.sin(theta), np.cos(theta), np.zeros_like(s)], axis=-1)
    kappa = np.full_like(s, data.kappa)
    return Trace(
        p=p, a=a_star(p, space), space=space, params=None,
        roots=RootData(beta=data.kappa, alpha=data.kappa, kappa_c=data.kappa),
        period_rho=length, m=1, s=s, kappa=kappa, kappa_prime=np.zeros_like(s),
        theta=theta, gamma=gamma, tangent=tangent, spacing='uniform',
    )


# ============================================================================
# Half-period tables
# ============================================================================

@dataclass
class _HalfTable:
    half: HalfPeriod
    t: NDArray[np.float64]
    s: NDArray[np.float64]
    theta: NDArray[np.float64]
    segment_nodes: int

    @property
    def rho(self) -> float:
        return 2.0 * float(self.s[-1])

    @property
    def rotation(self) -> float:
        return 2.0 * float(self.theta[-1])


def _segment_integrals(density, lower: NDArray[np.float64], upper: NDArray[np.float64],
                       n_nodes: int) -> NDArray[np.float64]:
    nodes, weights = gauss_legendre(n_nodes)
    half = 0.5 * (upper - lower)
    mid = 0.5 * (upper + lower)
    t = mid[:, np.newaxis] + half[:, np.newaxis] * nodes[np.newaxis, :]
    values = density(t.ravel()).reshape(t.shape)
    return half * (values @ weights)


def _half_table(half: HalfPeriod, n_samples: int, segment_nodes: int,
                cfg: Optional[QuadratureConfig] = None) -> _HalfTable:
    """Cumulative s and theta at Chebyshev angles t_j = (pi/4)(1 - cos(j pi / n)).

    Segments are split further at the graded quadrature panels so the narrow
    peak next to beta is resolved when the roots are far apart.
    """
    if n_samples < 8:
        raise DomainError(f'need at least 8 samples per half-period, got {n_samples}')
    cfg = cfg or QuadratureConfig()
    j = np.arange(n_samples + 1, dtype=float)
    t = 0.25 * math.pi * (1.0 - np.cos(j * math.pi / n_samples))
    t[0], t[-1] = 0.0, 0.5 * math.pi
    bounds = np.union1d(t, graded_panels(cfg.panel_levels, cfg.panel_ratio))
    at_grid = np.searchsorted(bounds, t)
    ds = _segment_integrals(half.ds_dt, bounds[:-1], bounds[1:], segment_nodes)
    dtheta = _segment_integrals(half.dtheta_dt, bounds[:-1], bounds[1:], segment_nodes)
    s = np.concatenate([[0.0], np.cumsum(ds)])[at_grid]
    theta = np.concatenate([[0.0], np.cumsum(dtheta)])[at_grid]
    return _HalfTable(half=half, t=t, s=s, theta=theta, segment_nodes=segment_nodes)


def _unfold(forward: NDArray[np.float64], backward: NDArray[np.float64], shift: float,
            m: int) -> NDArray[np.float64]:
    one = np.concatenate([forward, backward[:-1]])
    blocks = [one + k * shift for k in range(m)]
    blocks.append(np.array([forward[0] + m * shift]))
    return np.concatenate(blocks)


def _invert_arc_length(table: _HalfTable, sigma: NDArray[np.float64]) -> NDArray[np.float64]:
    """Angles t with s(t) = sigma on the rising half-period, by Newton iteration."""
    half, t_grid, s_grid = table.half, table.t, table.s
    sigma = np.clip(sigma, 0.0, s_grid[-1])
    idx = np.clip(np.searchsorted(s_grid, sigma, side='right') - 1, 0, len(t_grid) - 2)
    t_lo, t_hi = t_grid[idx], t_grid[idx + 1]
    s_lo, s_hi = s_grid[idx], s_grid[idx + 1]
    t = t_lo + (sigma - s_lo) / (s_hi - s_lo) * (t_hi - t_lo)
    for _ in range(_NEWTON_STEPS):
        s_at = s_lo + _segment_integrals(half.ds_dt, t_lo, t, table.segment_nodes)
        t = np.clip(t - (s_at - sigma) / half.ds_dt(t), t_lo, t_hi)
    return t


def _resample(table: _HalfTable, s: NDArray[np.float64]) -> tuple[NDArray[np.float64], ...]:
    half = table.half
    rho, rotation = table.rho, table.rotation
    s = np.asarray(s, dtype=float)
    k = np.floor(s / rho)
    r = s - k * rho
    rising = r <= 0.5 * rho
    sigma = np.where(rising, r, rho - r)
    t = _invert_arc_length(table, sigma)

    idx = np.clip(np.searchsorted(table.t, t, side='right') - 1, 0, len(table.t) - 2)
    theta_half = table.theta[idx] + _segment_integrals(half.dtheta_dt, table.t[idx], t, table.segment_nodes)
    kappa, u, _ = half.split(t)
    kappa_prime = half.kappa_prime(t)

    theta = k * rotation + np.where(rising, theta_half, rotation - theta_half)
    return kappa, np.where(rising, kappa_prime, -kappa_prime), theta, u


def resample_uniform(params: ElasticaParams, roots: Optional[RootData], s: NDArray[np.float64],
                     n_samples: int = DEFAULT_SAMPLES, cfg: Optional[QuadratureConfig] = None,
                     segment_nodes: int = DEFAULT_SEGMENT_NODES) -> tuple[NDArray[np.float64], ...]:
    """Curvature, its derivative and theta at arbitrary arc lengths.

    s(t) is inverted on the rising half-period by Newton iteration from a
    table of n_samples segments; other arc lengths follow by reflection and
    periodicity.

    Returns:
        Tuple (kappa, kappa_prime, theta)
    """
    half = HalfPeriod(params, roots or solve_roots(params))
    table = _half_table(half, n_samples, segment_nodes, cfg)
    kappa, kappa_prime, theta, _ = _resample(table, s)
    return kappa, kappa_prime, theta


# ============================================================================
# Profiles and traces
# ============================================================================

def curvature_profile(params: ElasticaParams, roots: Optional[RootData] = None,
                      n_samples: int = DEFAULT_SAMPLES, cfg: Optional[QuadratureConfig] = None,
                      m: int = 1, segment_nodes: int = DEFAULT_SEGMENT_NODES) -> CurvatureProfile:
    """Curvature kappa(s) over m periods, starting at the minimum beta."""
    curve = trace(params, m=m, n_samples=n_samples, cfg=cfg, roots=roots, segment_nodes=segment_nodes)
    return curve.profile


def _embed(half: HalfPeriod, kappa: NDArray[np.float64], u: NDArray[np.float64],
           kappa_prime: NDArray[np.float64], theta: NDArray[np.float64]) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    p, a, eps2 = half.p, half.a, half.eps2
    sqrt_minus_a = math.sqrt(-a)
    norm = eps2 * a + p * p * power(kappa, 2.0 * p - 2.0)
    if np.any(~(norm > 0)):
        worst = int(np.argmin(norm))
        raise ConvergenceError(
            f'<J,J> = {norm[worst]!r} <= 0 at kappa={kappa[worst]!r}: Killing field lost its space-like character'
        )
    root_norm = np.sqrt(norm)
    radius = root_norm / sqrt_minus_a
    height = p * power(kappa, p - 1.0) / sqrt_minus_a
    d_radius = p * p * (p - 1.0) * power(kappa, 2.0 * p - 3.0) / (sqrt_minus_a * root_norm)
    d_height = p * (p - 1.0) * power(kappa, p - 2.0) / sqrt_minus_a
    theta_prime = half.theta_rate(kappa, u)

    cos_t, sin_t = np.cos(theta), np.sin(theta)
    gamma = np.stack([radius * cos_t, radius * sin_t, height], axis=-1)
    radial = d_radius * kappa_prime
    tangent = np.stack([
        radial * cos_t - radius * theta_prime * sin_t,
        radial * sin_t + radius * theta_prime * cos_t,
        d_height * kappa_prime,
    ], axis=-1)
    return gamma, tangent


def trace(params: ElasticaParams, m: int = 1, n_samples: int = DEFAULT_SAMPLES,
          cfg: Optional[QuadratureConfig] = None, roots: Optional[RootData] = None,
          spacing: Spacing = 'chebyshev',
          segment_nodes: int = DEFAULT_SEGMENT_NODES) -> Trace:
    """Sample the curve with parameters (p, a) over m curvature periods.

    Args:
        params: Admissible parameters
        m: Number of curvature periods
        n_samples: Samples per half-period
        cfg: Panel grading shared with the quadrature module
        roots: Precomputed extrema
        spacing: 'chebyshev' clusters samples at the turning points in the
            substitution angle; 'uniform' spaces them evenly in arc length
        segment_nodes: Gauss–Legendre nodes per table segment

    Returns:
        Trace with 2 m n_samples + 1 samples

    Raises:
        ConvergenceError: If <J, J> is not positive at some sample
    """
    if m < 1:
        raise DomainError(f'm must be a positive integer, got {m}')
    roots = roots or solve_roots(params)
    half = HalfPeriod(params, roots)
    table = _half_table(half, n_samples, segment_nodes, cfg)
    rho, rotation = table.rho, table.rotation

    if spacing == 'uniform':
        s = np.linspace(0.0, m * rho, 2 * m * n_samples + 1)
        kappa, kappa_prime, theta, u = _resample(table, s)
    elif spacing == 'chebyshev':
        kappa_half, u_half, _ = half.split(table.t)
        kp_half = half.kappa_prime(table.t)
        s = _unfold(table.s, rho - table.s[::-1][1:], rho, m)
        kappa = _unfold(kappa_half, kappa_half[::-1][1:], 0.0, m)
        u = _unfold(u_half, u_half[::-1][1:], 0.0, m)
        kappa_prime = _unfold(kp_half, -kp_half[::-1][1:], 0.0, m)
        theta = _unfold(table.theta, rotation - table.theta[::-1][1:], rotation, m)
    else:
        raise ValueError(f'Unknown spacing: {spacing}')

    gamma, tangent = _embed(half, kappa, u, kappa_prime, theta)
    logger.debug(f'traced p={params.p!r} a={params.a!r}: {len(s)} samples, rho={rho:.12g}, Lambda={rotation:.12g}')
    return Trace(
        p=params.p, a=params.a, space=params.space, params=params, roots=roots,
        period_rho=rho, m=m, s=s, kappa=kappa, kappa_prime=kappa_prime, theta=theta,
        gamma=gamma, tangent=tangent, spacing=spacing,
    )


def bounding_parallels(params: ElasticaParams, roots: Optional[RootData] = None) -> tuple[float, float]:
    """Heights p kappa^(p-1) / sqrt(-a) of the parallels touched at kappa = beta and alpha."""
    roots = roots or solve_roots(params)
    scale = params.p / math.sqrt(-params.a)
    heights = sorted(float(scale * power(k, params.p - 1.0)) for k in (roots.beta, roots.alpha))
    return heights[0], heights[1]


# ============================================================================
# Closure
# ============================================================================

def check_closure_pair(n: int, m: int) -> None:
    """Raise DomainError unless n, m are coprime with m < 2n < sqrt(2) m."""
    if n < 1 or m < 1:
        raise DomainError(f'n and m must be positive integers, got n={n}, m={m}')
    if math.gcd(n, m) != 1:
        raise DomainError(f'n={n} and m={m} are not relatively prime')
    if not (m < 2 * n and 4 * n * n < 2 * m * m):
        raise DomainError(f'(n, m) = ({n}, {m}) violates m < 2n < sqrt(2) m')


def closure_pairs(max_m: int) -> list[tuple[int, int]]:
    """Every admissible (n, m) with m <= max_m, sorted by m then n."""
    pairs = []
    for m in range(1, max_m + 1):
        for n in range(1, m + 1):
            if math.gcd(n, m) == 1 and m < 2 * n and 4 * n * n < 2 * m * m:
                pairs.append((n, m))
    return pairs


def solve_closure(p: float, space: SpaceForm, n: int, m: int,
                  cfg: Optional[QuadratureConfig] = None, tol: float = DEFAULT_CLOSURE_TOL,
                  n_samples: int = DEFAULT_SAMPLES, root_tol: float = DEFAULT_ROOT_TOL,
                  with_trace: bool = True) -> ClosureResult:
    """Find a_q with Lambda_p(a_q) = 2 pi n / m and trace the closed curve.

    Raises:
        DomainError: If p or (n, m) is inadmissible
        BracketError: If the target is not straddled near the window ends
        ConvergenceError: If the solved a_q misses the target by more than tol
    """
    check_admissible_p(p, space)
    check_closure_pair(n, m)
    cfg = cfg or QuadratureConfig()
    lower_end = a_star(p, space)
    target = 2.0 * math.pi * n / m
    samples: dict[float, float] = {}

    def residual(a: float) -> float:
        params = make_params(p, a, space)
        value = lambda_p(params, cfg, solve_roots(params, root_tol))
        samples[a] = value
        return value - target

    lo = hi = None
    for exponent in _LOWER_BRACKET_EXPONENTS:
        candidate = lower_end + 10.0 ** -exponent * abs(lower_end)
        if residual(candidate) > 0:
            lo = candidate
            break
    for exponent in _UPPER_BRACKET_EXPONENTS:
        candidate = -(10.0 ** -exponent) * abs(lower_end)
        if residual(candidate) < 0:
            hi = candidate
            break
    if lo is None or hi is None:
        edge = sorted(samples.items())
        raise BracketError(
            f'target 2*pi*{n}/{m} not straddled for p={p!r}: '
            f'Lambda={edge[0][1]!r} near a_*, {edge[-1][1]!r} near 0',
            edge[0][0], edge[-1][0], (edge[0][1], edge[-1][1]),
        )

    a_q, info = optimize.bisect(
        residual, lo, hi, xtol=np.finfo(float).tiny, rtol=1e-14, maxiter=200,
        full_output=True, disp=False,
    )
    if not info.converged:
        raise ConvergenceError(f'closure bisection on [{lo!r}, {hi!r}] stopped after {info.iterations} iterations')
    a_q = float(a_q)
    params = make_params(p, a_q, space)
    roots = solve_roots(params, root_tol)
    value = lambda_p(params, cfg, roots)
    if abs(value - target) > tol:
        raise ConvergenceError(f'|Lambda(a_q) - 2 pi n/m| = {abs(value - target):.3e} exceeds {tol:.1e}')

    ordered = [v for _, v in sorted(samples.items())]
    monotone = all(later < earlier + _MONOTONE_SLACK for earlier, later in zip(ordered, ordered[1:]))
    if not monotone:
        logger.warning(f'non-monotone Lambda samples while closing (n, m) = ({n}, {m}) at p={p!r}; a_q may not be unique')

    curve = trace(params, m=m, n_samples=n_samples, cfg=cfg, roots=roots) if with_trace else None
    defect = curve.closure_defect if curve is not None else math.nan
    logger.info(f'closed (n, m) = ({n}, {m}) at p={p!r}: a_q={a_q!r}, defect={defect:.3e}')
    return ClosureResult(
        p=p, space=space.name, n=n, m=m, q=n / m, a_q=a_q, lambda_at_aq=value,
        closure_defect=defect, monotone_bracket=monotone, evaluations=len(samples), trace=curve,
    )


def family_evolution(space: SpaceForm, n: int, m: int, p_list: Sequence[float],
                     cfg: Optional[QuadratureConfig] = None, n_samples: int = DEFAULT_SAMPLES,
                     workers: int = 1) -> list[EvolutionMember]:
    """Closed curves of one type (n, m) for several exponents.

    Failures are recorded on the member instead of aborting the batch. The
    output order follows p_list regardless of workers.
    """
    check_closure_pair(n, m)

    def solve(p: float) -> EvolutionMember:
        try:
            result = solve_closure(p, space, n, m, cfg=cfg, n_samples=n_samples)
        except PelasticaError as e:
            logger.warning(f'family member p={p!r} failed: {e}')
            return EvolutionMember(p=p, error=str(e))
        return EvolutionMember(p=p, closure=result, trace=result.trace)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(solve, p_list))
    return [solve(p) for p in p_list]


# ============================================================================
# Shape descriptors
# ============================================================================

def winding_number(curve: Trace) -> int:
    """Turns around the rotation axis over the whole trace."""
    return int(round((curve.theta[-1] - curve.theta[0]) / (2.0 * math.pi)))


def lobe_count(curve: Trace) -> int:
    """Number of curvature maxima over the trace."""
    peaks, _ = signal.find_peaks(curve.kappa)
    return len(peaks)


def disk_extent(curve: Trace) -> float:
    """Largest distance from the origin in the curve's disk model."""
    project = punctured_project if curve.space.epsilon else poincare_project
    return float(np.max(np.linalg.norm(project(curve.gamma), axis=-1)))
