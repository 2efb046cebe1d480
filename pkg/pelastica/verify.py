"""Residual checks and independent oracles for traced p-elastic curves.

Every check returns a VerificationReport whose `passed` flag is exactly
max_residual <= threshold. Negative controls (run_suite with perturb=True)
scale the curvature and the curve by 1.01 and must fail.

Usage:
    from pelastica.verify import run_suite

    for report in run_suite(params):
        print(report.check_name, report.max_residual, report.passed)

Author:
    Jake Meador <jameador13@gmail.com>
"""

import dataclasses
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
from numpy.typing import NDArray

from . import lorentz
from .curve import CurvatureProfile, Trace, resample_uniform, trace
from .elliptic import A_STAR_32, lambda_32_closed
from .exceptions import ConvergenceError, DomainError
from .lorentz import SpaceForm, cross, minkowski_inner
from .quadrature import QuadratureConfig, energy, energy_limit, is_reduced_confidence, lambda_p, period
from .scalar import ElasticaParams, RootData, a_star, check_admissible_p, f_pa, make_params, power, solve_roots

__author__ = 'Jake Meador <jameador13@gmail.com>'
__all__ = [
    'VerificationReport',
    'Thresholds',
    'PERTURBATION',
    'ScanRow',
    'OracleResult',
    'el_residual',
    'conservation_residual',
    'momentum',
    'killing_norm',
    'unit_speed',
    'quadric_residual',
    'curvature_consistency',
    'theta_monotone',
    'half_space',
    'limit_checks',
    'scan_grid',
    'monotonicity_scan',
    'ode_oracle',
    'oracle_check',
    'energy_checks',
    'run_suite',
]

logger = logging.getLogger('pelastica.verify')

PERTURBATION = 1.01
_LIMIT_EXPONENTS = range(2, 9)


@dataclass(frozen=True)
class Thresholds:
    """Pass thresholds for each check."""

    quadric: float = 1e-9
    unit_speed: float = 1e-8
    conservation: float = 1e-8
    el: float = 1e-6
    momentum: float = 1e-6
    killing: float = 1e-9
    curvature: float = 1e-5
    oracle: float = 1e-7
    drift: float = 1e-6
    sqrt2_limit: float = 5e-3
    pi_limit: float = 5e-2
    energy_limit: float = 1e-3


@dataclass
class VerificationReport:
    """Outcome of one check."""

    check_name: str
    max_residual: float
    threshold: float
    metadata: dict[str, Any] = field(default_factory=dict)
    passed: bool = field(init=False)

    def __post_init__(self) -> None:
        self.passed = bool(self.max_residual <= self.threshold)


@dataclass(frozen=True)
class ScanRow:
    """One grid point of a Lambda_p scan; `decreasing` compares with the previous row."""

    a: float
    lambda_p: float
    period: float
    decreasing: bool
    reduced_confidence: bool
    energy: Optional[float] = None
    energy_limit: Optional[float] = None


@dataclass
class OracleResult:
    """Curvature from fixed-step integration of the Euler–Lagrange equation."""

    s: NDArray[np.float64]
    kappa: NDArray[np.float64]
    kappa_prime: NDArray[np.float64]
    minima: NDArray[np.float64]
    drift: float

    @property
    def period(self) -> float:
        if len(self.minima) == 0:
            raise ConvergenceError('integration did not reach a second curvature minimum')
        return float(self.minima[0])


# ============================================================================
# Finite differences
# ============================================================================

def _uniform_step(s: NDArray[np.float64]) -> float:
    steps = np.diff(s)
    if len(s) < 5:
        raise DomainError(f'finite differences need at least 5 samples, got {len(s)}')
    h = float(np.mean(steps))
    if not np.allclose(steps, h, rtol=1e-9, atol=0.0):
        raise DomainError('finite differences need samples uniformly spaced in arc length')
    return h


def _first_difference(values: NDArray[np.float64], h: float) -> NDArray[np.float64]:
    """Fourth-order centred first derivative at interior samples 2..N-3."""
    return (-values[4:] + 8.0 * values[3:-1] - 8.0 * values[1:-3] + values[:-4]) / (12.0 * h)


def _second_difference(values: NDArray[np.float64], h: float) -> NDArray[np.float64]:
    """Fourth-order centred second derivative at interior samples 2..N-3."""
    return (-values[4:] + 16.0 * values[3:-1] - 30.0 * values[2:-2] + 16.0 * values[1:-3] - values[:-4]) / (12.0 * h * h)


def _curvature_power(kappa: NDArray[np.float64], q: float) -> NDArray[np.float64]:
    # kappa = 0 is only meaningful for non-negative integer exponents (geodesics)
    if np.all(kappa > 0):
        return power(kappa, q)
    if q >= 0 and float(q).is_integer():
        return np.asarray(kappa, dtype=float) ** int(q)
    raise DomainError(f'kappa^{q} needs kappa > 0')


# ============================================================================
# Curvature profile checks
# ============================================================================

def el_residual(profile: CurvatureProfile, p: float, space: SpaceForm,
                threshold: float = Thresholds.el) -> VerificationReport:
    """Euler–Lagrange residual p (kappa^(p-1))'' + eps1 eps2 (p-1) kappa^(p+1) - eps2 p kappa^(p-1).

    The second derivative is a centred difference, so the profile must be
    sampled uniformly in arc length. The maximum is normalised by max kappa^(p+1).
    """
    h = _uniform_step(profile.s)
    kappa = np.asarray(profile.kappa, dtype=float)
    eps1, eps2 = space.eps1, space.eps2
    k_pm1 = _curvature_power(kappa, p - 1.0)
    k_pp1 = _curvature_power(kappa, p + 1.0)
    residual = (p * _second_difference(k_pm1, h)
                + eps1 * eps2 * (p - 1.0) * k_pp1[2:-2]
                - eps2 * p * k_pm1[2:-2])
    scale = float(np.max(np.abs(k_pp1))) or 1.0
    value = float(np.max(np.abs(residual))) / scale
    return VerificationReport('el_residual', value, threshold, {'step': h, 'samples': len(kappa)})


def conservation_residual(profile: CurvatureProfile, p: float, a: float, space: SpaceForm,
                          threshold: float = Thresholds.conservation) -> VerificationReport:
    """max |p^2 (p-1)^2 kappa^(2p-4) kappa'^2 + eps2 (p-1)^2 kappa^(2p) - eps2 p^2 kappa^(2p-2) - a| / |a|."""
    kappa = np.asarray(profile.kappa, dtype=float)
    kappa_prime = np.asarray(profile.kappa_prime, dtype=float)
    eps2 = space.eps2
    lhs = (p * p * (p - 1.0) ** 2 * power(kappa, 2.0 * p - 4.0) * kappa_prime ** 2
           + eps2 * (p - 1.0) ** 2 * power(kappa, 2.0 * p)
           - eps2 * p * p * power(kappa, 2.0 * p - 2.0))
    value = float(np.max(np.abs(lhs - a))) / abs(a)
    return VerificationReport('conservation_residual', value, threshold, {'a': a})


# ============================================================================
# Trace checks
# ============================================================================

def momentum(curve: Trace, threshold: float = Thresholds.momentum) -> VerificationReport:
    """Constancy of xi = rho p kappa^(p-1) gamma + p (kappa^(p-1))' gamma' + (1-p) kappa^p gamma x gamma'.

    Both cross-product variants are tried. A variant counts as conserved when
    its componentwise deviation from the mean and |<xi, xi> - a| are both
    below threshold; exactly one variant must qualify.
    """
    p, kappa, gamma, tangent = curve.p, curve.kappa, curve.gamma, curve.tangent
    rho = curve.space.rho
    position = (rho * p * power(kappa, p - 1.0))[:, np.newaxis]
    velocity = (p * (p - 1.0) * power(kappa, p - 2.0) * curve.kappa_prime)[:, np.newaxis]
    binormal = ((1.0 - p) * power(kappa, p))[:, np.newaxis]

    metadata: dict[str, Any] = {'rho': rho, 'a': curve.a}
    conserved = []
    errors = {}
    for variant in ('euclidean', 'lorentzian'):
        xi = position * gamma + velocity * tangent + binormal * cross(gamma, tangent, variant)
        mean = xi.mean(axis=0)
        deviation = float(np.max(np.abs(xi - mean)))
        norm = minkowski_inner(mean, mean)
        norm_error = abs(norm - curve.a)
        metadata[variant] = {'xi': mean.tolist(), 'deviation': deviation, 'norm': norm, 'norm_error': norm_error}
        errors[variant] = max(deviation, norm_error)
        if deviation <= threshold and norm_error <= threshold:
            conserved.append(variant)

    if len(conserved) == 1:
        variant = conserved[0]
        metadata['variant'] = variant
        metadata['timelike'] = metadata[variant]['norm'] < 0
        value = errors[variant]
    else:
        metadata['variant'] = None
        logger.warning(f'momentum: {len(conserved)} cross-product variants conserved xi (expected exactly one)')
        value = math.inf
    return VerificationReport('momentum', value, threshold, metadata)


def killing_norm(curve: Trace, threshold: float = Thresholds.killing) -> VerificationReport:
    """<J, J> from the frame, (p-1)^2 kappa^(2p) + eps2 p^2 ((kappa^(p-1))')^2, against eps2 a + p^2 kappa^(2p-2).

    The residual is the relative disagreement; any non-positive value fails.
    """
    p, kappa, eps2 = curve.p, curve.kappa, curve.space.eps2
    derivative = (p - 1.0) * power(kappa, p - 2.0) * curve.kappa_prime
    frame = (p - 1.0) ** 2 * power(kappa, 2.0 * p) + eps2 * p * p * derivative ** 2
    closed = eps2 * curve.a + p * p * power(kappa, 2.0 * p - 2.0)
    minimum = float(min(frame.min(), closed.min()))
    value = float(np.max(np.abs(frame - closed)) / np.max(np.abs(closed)))
    if not minimum > 0:
        value = math.inf
    return VerificationReport('killing_norm', value, threshold, {'min_norm': minimum})


def unit_speed(curve: Trace, threshold: float = Thresholds.unit_speed) -> VerificationReport:
    """|<gamma', gamma'> - 1| from the analytic tangent.

    Uniform traces also report the centred finite-difference value at interior
    samples under metadata['finite_difference'].
    """
    speed = np.atleast_1d(minkowski_inner(curve.tangent, curve.tangent))
    value = float(np.max(np.abs(speed - 1.0)))
    metadata: dict[str, Any] = {}
    if curve.spacing == 'uniform':
        h = _uniform_step(curve.s)
        fd_tangent = _first_difference(curve.gamma, h)
        fd_speed = np.atleast_1d(minkowski_inner(fd_tangent, fd_tangent))
        metadata['finite_difference'] = float(np.max(np.abs(fd_speed - 1.0)))
    return VerificationReport('unit_speed', value, threshold, metadata)


def quadric_residual(curve: Trace, threshold: float = Thresholds.quadric) -> VerificationReport:
    residual = lorentz.quadric_residual(curve.gamma, curve.space)
    return VerificationReport('quadric_residual', float(residual.max()), threshold,
                              {'quadric_value': curve.space.quadric_value})


def curvature_consistency(curve: Trace, threshold: float = Thresholds.curvature) -> VerificationReport:
    """Geodesic curvature |<gamma'', gamma x_L gamma'>| from second differences against kappa(s)."""
    h = _uniform_step(curve.s)
    acceleration = _second_difference(curve.gamma, h)
    normal = cross(curve.gamma[2:-2], curve.tangent[2:-2], 'lorentzian')
    recovered = np.abs(np.atleast_1d(minkowski_inner(acceleration, normal)))
    value = float(np.max(np.abs(recovered - curve.kappa[2:-2])))
    return VerificationReport('curvature_consistency', value, threshold, {'step': h})


def theta_monotone(curve: Trace) -> VerificationReport:
    """Counts steps where theta fails to increase strictly."""
    steps = np.diff(curve.theta)
    failures = int(np.count_nonzero(~(steps > 0)))
    return VerificationReport('theta_monotone', float(failures), 0.0, {'min_step': float(steps.min())})


def half_space(curve: Trace) -> VerificationReport:
    """de Sitter traces stay in z < 0; hyperbolic ones avoid the pole (0, 0, 1)."""
    z = curve.gamma[:, 2]
    if curve.space.epsilon:
        failures = int(np.count_nonzero(~(z < 0)))
        metadata = {'max_z': float(z.max())}
    else:
        planar = np.hypot(curve.gamma[:, 0], curve.gamma[:, 1])
        failures = int(np.count_nonzero(~(planar > 0)) + np.count_nonzero(~(z > 0)))
        metadata = {'min_planar_radius': float(planar.min())}
    return VerificationReport('half_space', float(failures), 0.0, metadata)


# ============================================================================
# Limits and scans
# ============================================================================

def limit_checks(p: float, space: SpaceForm, cfg: Optional[QuadratureConfig] = None,
                 thresholds: Thresholds = Thresholds()) -> VerificationReport:
    """Lambda_p near both ends of the window.

    At a = a_* + 1e-6 |a_*| Lambda must be within sqrt2_limit of sqrt(2) pi. At
    a = -10^-k |a_*|, k = 2..8, it must decrease toward pi and finish within
    pi_limit of it. For p = 3/2 on the hyperbolic plane both sweeps are also
    compared with the elliptic closed form. The reported residual is the
    larger of the two errors, each divided by its threshold, so the report
    threshold is 1.
    """
    lower = a_star(p, space)
    near_circle = []
    near_zero = []
    for k in _LIMIT_EXPONENTS:
        near_circle.append(lambda_p(make_params(p, lower + 10.0 ** -k * abs(lower), space), cfg))
        near_zero.append(lambda_p(make_params(p, -(10.0 ** -k) * abs(lower), space), cfg))

    sqrt2_error = abs(near_circle[6 - _LIMIT_EXPONENTS.start] - math.sqrt(2.0) * math.pi)
    pi_error = abs(near_zero[-1] - math.pi)
    trend = all(later < earlier for earlier, later in zip(near_zero, near_zero[1:]))
    above_pi = all(value > math.pi for value in near_zero)

    metadata: dict[str, Any] = {
        'p': p,
        'near_a_star': near_circle,
        'near_zero': near_zero,
        'sqrt2_error': sqrt2_error,
        'pi_error': pi_error,
        'decreasing_to_pi': trend and above_pi,
    }
    if p == 1.5 and space.epsilon == 0:
        closed_star = [lambda_32_closed(A_STAR_32 + 10.0 ** -k * abs(A_STAR_32)) for k in _LIMIT_EXPONENTS]
        closed_zero = [lambda_32_closed(-(10.0 ** -k) * abs(A_STAR_32)) for k in _LIMIT_EXPONENTS]
        metadata['closed_form_error_a_star'] = max(abs(x - y) for x, y in zip(closed_star, near_circle))
        metadata['closed_form_error_zero'] = max(abs(x - y) for x, y in zip(closed_zero, near_zero))
        metadata['closed_form_error'] = max(metadata['closed_form_error_a_star'],
                                            metadata['closed_form_error_zero'])

    value = max(sqrt2_error / thresholds.sqrt2_limit, pi_error / thresholds.pi_limit)
    if not (trend and above_pi):
        value = math.inf
    return VerificationReport('limit_checks', value, 1.0, metadata)


def scan_grid(p: float, space: SpaceForm, grid_size: int) -> NDArray[np.float64]:
    """Integration constants log-spaced toward both ends of (a_*, 0), increasing."""
    if grid_size < 16:
        raise DomainError(f'grid_size must be >= 16, got {grid_size}')
    lower = a_star(p, space)
    left = grid_size // 2
    near_star = lower + abs(lower) * np.geomspace(1e-8, 0.5, left)
    near_zero = -abs(lower) * np.geomspace(0.5, 1e-8, grid_size - left + 1)[1:]
    return np.concatenate([near_star, near_zero])


def monotonicity_scan(p: float, space: SpaceForm, grid_size: int = 100,
                      cfg: Optional[QuadratureConfig] = None, energy_m: Optional[int] = None,
                      workers: int = 1) -> list[ScanRow]:
    """Lambda_p (and optionally the energy for m periods) on a log-spaced grid."""
    check_admissible_p(p, space)
    cfg = cfg or QuadratureConfig()
    grid = scan_grid(p, space, grid_size)

    def evaluate(a: float) -> tuple[float, float, Optional[float]]:
        params = make_params(p, a, space)
        roots = solve_roots(params)
        values = (lambda_p(params, cfg, roots), period(params, cfg, roots))
        return (*values, energy(params, energy_m, cfg, roots) if energy_m else None)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(evaluate, grid))
    else:
        results = [evaluate(a) for a in grid]

    rows = []
    previous = math.inf
    for a, (value, length, work) in zip(grid, results):
        params = make_params(p, float(a), space)
        rows.append(ScanRow(
            a=float(a), lambda_p=value, period=length, decreasing=value < previous,
            reduced_confidence=is_reduced_confidence(params), energy=work,
            energy_limit=energy_limit(params, energy_m) if energy_m else None,
        ))
        previous = value
    if not all(row.decreasing for row in rows):
        logger.warning(f'Lambda_p scan for p={p!r} is not strictly decreasing')
    return rows


def energy_checks(p: float, space: SpaceForm, m: int, cfg: Optional[QuadratureConfig] = None,
                  threshold: float = Thresholds.energy_limit) -> VerificationReport:
    """Energy near the circle end against sqrt(-2 a_*) m pi."""
    lower = a_star(p, space)
    params = make_params(p, lower + 1e-6 * abs(lower), space)
    value = energy(params, m, cfg)
    limit = energy_limit(params, m)
    return VerificationReport('energy_limit', abs(value - limit) / limit, threshold,
                              {'energy': value, 'limit': limit, 'm': m})


# ============================================================================
# ODE oracle
# ============================================================================

def _el_rhs(kappa: float, kappa_prime: float, p: float, eps2: int) -> float:
    return eps2 * (kappa / (p - 1.0) - kappa ** 3 / p) - (p - 2.0) * kappa_prime * kappa_prime / kappa


def _rk4_step(kappa: float, kappa_prime: float, h: float, p: float, eps2: int) -> tuple[float, float]:
    a1 = _el_rhs(kappa, kappa_prime, p, eps2)
    k2, v2 = kappa + 0.5 * h * kappa_prime, kappa_prime + 0.5 * h * a1
    a2 = _el_rhs(k2, v2, p, eps2)
    k3, v3 = kappa + 0.5 * h * v2, kappa_prime + 0.5 * h * a2
    a3 = _el_rhs(k3, v3, p, eps2)
    k4, v4 = kappa + h * v3, kappa_prime + h * a3
    a4 = _el_rhs(k4, v4, p, eps2)
    return (kappa + h * (kappa_prime + 2.0 * v2 + 2.0 * v3 + v4) / 6.0,
            kappa_prime + h * (a1 + 2.0 * a2 + 2.0 * a3 + a4) / 6.0)


def ode_oracle(params: ElasticaParams, s_max: float, step: float, roots: Optional[RootData] = None,
               drift_tol: float = Thresholds.drift) -> OracleResult:
    """Integrate kappa'' = eps2 (kappa/(p-1) - kappa^3/p) - (p-2) kappa'^2 / kappa from (beta, 0).

    Classical fourth-order Runge–Kutta with a fixed step. Curvature minima are
    located from sign changes of kappa' and refined by Newton steps on the
    Runge–Kutta flow.

    Raises:
        ConvergenceError: If the first integral drifts by more than drift_tol
            relative to |a|
    """
    if not step > 0 or not s_max > step:
        raise DomainError(f'need 0 < step < s_max, got step={step!r}, s_max={s_max!r}')
    roots = roots or solve_roots(params)
    p, eps2 = params.p, params.eps2
    n_steps = int(math.ceil(s_max / step))

    kappa = np.empty(n_steps + 1)
    kappa_prime = np.empty(n_steps + 1)
    kappa[0], kappa_prime[0] = roots.beta, 0.0
    k, v = roots.beta, 0.0
    for i in range(1, n_steps + 1):
        k, v = _rk4_step(k, v, step, p, eps2)
        kappa[i], kappa_prime[i] = k, v
    s = step * np.arange(n_steps + 1)

    minima = []
    for i in np.flatnonzero((kappa_prime[:-1] < 0) & (kappa_prime[1:] >= 0)):
        h = step * -kappa_prime[i] / (kappa_prime[i + 1] - kappa_prime[i])
        for _ in range(4):
            k1, v1 = _rk4_step(kappa[i], kappa_prime[i], h, p, eps2)
            h -= v1 / _el_rhs(k1, v1, p, eps2)
        minima.append(s[i] + h)

    first_integral = p * p * (p - 1.0) ** 2 * power(kappa, 2.0 * p - 4.0) * kappa_prime ** 2
    drift = float(np.max(np.abs(first_integral - f_pa(kappa, params)))) / abs(params.a)
    logger.debug(f'ODE oracle: {n_steps} steps, {len(minima)} minima, drift {drift:.3e}')
    if drift > drift_tol:
        raise ConvergenceError(f'first-integral drift {drift:.3e} exceeds {drift_tol:.1e}; reduce the step')
    return OracleResult(s=s, kappa=kappa, kappa_prime=kappa_prime, minima=np.asarray(minima), drift=drift)


def oracle_check(params: ElasticaParams, cfg: Optional[QuadratureConfig] = None, periods: int = 2,
                 steps_per_period: int = 8192, stride: int = 8,
                 threshold: float = Thresholds.oracle) -> VerificationReport:
    """Quadrature-inverted curvature against the ODE oracle.

    The residual is the larger of max |kappa_ode - kappa_quadrature| and the
    relative period mismatch.
    """
    roots = solve_roots(params)
    rho = period(params, cfg, roots)
    result = ode_oracle(params, periods * rho, rho / steps_per_period, roots)
    s = result.s[::stride]
    kappa, _, _ = resample_uniform(params, roots, s, cfg=cfg)
    kappa_error = float(np.max(np.abs(result.kappa[::stride] - kappa)))
    period_error = abs(result.period - rho) / rho
    return VerificationReport('ode_oracle', max(kappa_error, period_error), threshold, {
        'kappa_error': kappa_error,
        'period_error': period_error,
        'period_quadrature': rho,
        'period_ode': result.period,
        'drift': result.drift,
    })


# ============================================================================
# Suite
# ============================================================================

def _perturbed(curve: Trace) -> Trace:
    return dataclasses.replace(curve, kappa=curve.kappa * PERTURBATION, gamma=curve.gamma * PERTURBATION)


def run_suite(params: ElasticaParams, cfg: Optional[QuadratureConfig] = None, perturb: bool = False,
              n_samples: int = 256, m: int = 1, thresholds: Thresholds = Thresholds(),
              oracle: bool = True) -> list[VerificationReport]:
    """Run every trace check on the curve with parameters (p, a).

    With perturb=True the curvature and positions are scaled by 1.01 before
    checking; the residual checks are then expected to fail.
    """
    roots = solve_roots(params)
    chebyshev = trace(params, m=m, n_samples=n_samples, cfg=cfg, roots=roots)
    uniform = trace(params, m=m, n_samples=n_samples, cfg=cfg, roots=roots, spacing='uniform')
    if perturb:
        logger.info('running negative controls: curvature and positions scaled by 1.01')
        chebyshev, uniform = _perturbed(chebyshev), _perturbed(uniform)

    reports = [
        el_residual(uniform.profile, params.p, params.space, thresholds.el),
        conservation_residual(chebyshev.profile, params.p, params.a, params.space, thresholds.conservation),
        momentum(chebyshev, thresholds.momentum),
        killing_norm(chebyshev, thresholds.killing),
        unit_speed(uniform, thresholds.unit_speed),
        quadric_residual(chebyshev, thresholds.quadric),
        curvature_consistency(uniform, thresholds.curvature),
        theta_monotone(chebyshev),
        half_space(chebyshev),
    ]
    if oracle:
        reports.append(oracle_check(params, cfg, threshold=thresholds.oracle))
    for report in reports:
        log = logger.info if report.passed else logger.warning
        log(f'{report.check_name}: {report.max_residual:.3e} (threshold {report.threshold:.1e}) '
            f'{"PASS" if report.passed else "FAIL"}')
    return reports
