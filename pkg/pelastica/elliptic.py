"""Elliptic integrals and the closed forms they give for special exponents.

Complete integrals of the first, second and third kind, the incomplete
integrals F and E, and Heuman's Lambda are all assembled from Carlson's
symmetric forms (scipy.special.elliprf / elliprd / elliprj). Moduli are
Legendre moduli zeta (not parameters m = zeta^2); the third kind uses the
characteristic chi in 1 / (1 - chi u^2).

The closed forms for p = 3/2 on the hyperbolic plane and p = -1 on the de
Sitter plane serve as independent oracles for the quadrature module.

Usage:
    from pelastica.elliptic import ellip_k, heuman_lambda, lambda_32_closed

    ellip_k(0.0)                 # pi / 2
    heuman_lambda(1.2, 0.0)      # sin(1.2)
    lambda_32_closed(-2.0)       # rotation angle per period for p = 3/2

Author:
    Jake Meador <jameador13@gmail.com>
"""

import logging
import math

import numpy as np
from scipy import optimize, special

from .exceptions import ConvergenceError, DomainError

__author__ = 'Jake Meador <jameador13@gmail.com>'
__all__ = [
    'carlson_rf',
    'carlson_rd',
    'carlson_rj',
    'ellip_k',
    'ellip_e',
    'ellip_pi',
    'ellip_f_inc',
    'ellip_e_inc',
    'heuman_lambda',
    'heuman_pi',
    'cubic_roots_32',
    'quartic_roots_m1',
    'lambda_32_closed',
    'theta_m1_closed',
    'theta_32_closed',
    'A_STAR_32',
    'A_STAR_M1',
]

logger = logging.getLogger('pelastica.elliptic')

A_STAR_32 = -1.5 * math.sqrt(3.0)
A_STAR_M1 = -4.0


# ============================================================================
# Carlson symmetric forms
# ============================================================================

def _check_symmetric_args(*args: float) -> None:
    if any(not math.isfinite(v) or v < 0 for v in args):
        raise DomainError(f'Carlson arguments must be finite and non-negative, got {args}')
    if sum(1 for v in args if v == 0) > 1:
        raise DomainError(f'at most one Carlson argument may be zero, got {args}')


def carlson_rf(x: float, y: float, z: float) -> float:
    """R_F(x, y, z) = 1/2 int_0^inf dt / sqrt((t+x)(t+y)(t+z))."""
    _check_symmetric_args(x, y, z)
    return float(special.elliprf(x, y, z))


def carlson_rd(x: float, y: float, z: float) -> float:
    """R_D(x, y, z), the degenerate R_J(x, y, z, z)."""
    _check_symmetric_args(x, y)
    if not z > 0:
        raise DomainError(f'R_D requires z > 0, got {z}')
    return float(special.elliprd(x, y, z))


def carlson_rj(x: float, y: float, z: float, w: float) -> float:
    """R_J(x, y, z, w); negative w gives the Cauchy principal value."""
    _check_symmetric_args(x, y, z)
    if w == 0 or not math.isfinite(w):
        raise DomainError(f'R_J requires finite w != 0, got {w}')
    return float(special.elliprj(x, y, z, w))


# ============================================================================
# Legendre forms
# ============================================================================

def _check_modulus(zeta: float) -> float:
    if not 0 <= zeta < 1:
        raise DomainError(f'modulus must satisfy 0 <= zeta < 1, got {zeta}')
    return (1.0 - zeta) * (1.0 + zeta)


def ellip_k(zeta: float) -> float:
    """Complete integral of the first kind K(zeta)."""
    comp = _check_modulus(zeta)
    return carlson_rf(0.0, comp, 1.0)


def ellip_e(zeta: float) -> float:
    """Complete integral of the second kind E(zeta)."""
    comp = _check_modulus(zeta)
    if zeta == 0:
        return math.pi / 2
    return carlson_rf(0.0, comp, 1.0) - zeta * zeta * carlson_rd(0.0, comp, 1.0) / 3.0


def ellip_pi(chi: float, zeta: float) -> float:
    """Complete integral of the third kind with characteristic chi < 1."""
    comp = _check_modulus(zeta)
    if not chi < 1:
        raise DomainError(f'characteristic must satisfy chi < 1, got {chi}')
    if chi == 0:
        return carlson_rf(0.0, comp, 1.0)
    return carlson_rf(0.0, comp, 1.0) + chi * carlson_rj(0.0, comp, 1.0, 1.0 - chi) / 3.0


def ellip_f_inc(phi: float, zeta: float) -> float:
    """Incomplete integral of the first kind F(phi, zeta), 0 <= phi <= pi/2."""
    s, c = math.sin(phi), math.cos(phi)
    return s * carlson_rf(c * c, 1.0 - (zeta * s) ** 2, 1.0)


def ellip_e_inc(phi: float, zeta: float) -> float:
    """Incomplete integral of the second kind E(phi, zeta), 0 <= phi <= pi/2."""
    s, c = math.sin(phi), math.cos(phi)
    if s == 0:
        return 0.0
    y = 1.0 - (zeta * s) ** 2
    return s * carlson_rf(c * c, y, 1.0) - zeta * zeta * s ** 3 * carlson_rd(c * c, y, 1.0) / 3.0


def heuman_lambda(phi: float, zeta: float) -> float:
    """Heuman's Lambda function.

    Lambda(phi, zeta) = (2/pi) [K E(phi, zeta') - (K - E) F(phi, zeta')] with
    K, E complete at zeta and zeta' = sqrt(1 - zeta^2).

    Raises:
        DomainError: Outside 0 <= phi <= pi/2, 0 <= zeta < 1
    """
    if not 0 <= phi <= math.pi / 2:
        raise DomainError(f'phi must lie in [0, pi/2], got {phi}')
    _check_modulus(zeta)
    if phi == math.pi / 2:
        return 1.0
    if zeta == 0:
        return math.sin(phi)
    k, e = ellip_k(zeta), ellip_e(zeta)
    comp = math.sqrt((1.0 - zeta) * (1.0 + zeta))
    return 2.0 / math.pi * (k * ellip_e_inc(phi, comp) - (k - e) * ellip_f_inc(phi, comp))


def heuman_pi(chi: float, zeta: float) -> float:
    """Complete third-kind integral through Heuman's Lambda (circular case zeta^2 < chi < 1)."""
    _check_modulus(zeta)
    if not zeta * zeta < chi < 1:
        raise DomainError(f'circular case needs zeta^2 < chi < 1, got chi={chi}, zeta={zeta}')
    z2 = zeta * zeta
    amplitude = math.asin(math.sqrt((chi - z2) / (chi * (1.0 - z2))))
    scale = math.sqrt(chi / ((1.0 - chi) * (chi - z2)))
    return math.pi / 2 * scale * heuman_lambda(amplitude, zeta)


# ============================================================================
# Closed forms
# ============================================================================

def cubic_roots_32(a: float) -> tuple[float, float, float]:
    """Roots alpha > beta > 0 > delta of -k^3 + 9k + 4a for A_STAR_32 < a < 0.

    alpha solves a = alpha (alpha^2 - 9) / 4 on (sqrt 3, 3), where it is
    increasing, so plain bisection suffices.
    """
    if not A_STAR_32 < a < 0:
        raise DomainError(f'a={a!r} outside ({A_STAR_32!r}, 0)')

    def residual(alpha: float) -> float:
        return alpha * (alpha * alpha - 9.0) / 4.0 - a

    alpha, info = optimize.bisect(
        residual, math.sqrt(3.0), 3.0,
        xtol=np.finfo(float).tiny, rtol=4.0 * np.finfo(float).eps, maxiter=200,
        full_output=True, disp=False,
    )
    if not info.converged:
        raise ConvergenceError(f'cubic root bisection did not converge for a={a!r}')
    beta = (math.sqrt(36.0 - 3.0 * alpha * alpha) - alpha) / 2.0
    return alpha, beta, -alpha - beta


def quartic_roots_m1(a: float) -> tuple[float, float]:
    """Positive roots alpha > beta of a k^4 + 4 k^2 - 1 for -4 < a < 0."""
    if not A_STAR_M1 < a < 0:
        raise DomainError(f'a={a!r} outside ({A_STAR_M1!r}, 0)')
    alpha2 = (2.0 + math.sqrt(4.0 + a)) / -a
    beta2 = 1.0 / (-a * alpha2)
    return math.sqrt(alpha2), math.sqrt(beta2)


def lambda_32_closed(a: float) -> float:
    """Rotation angle per curvature period for p = 3/2 on the hyperbolic plane."""
    alpha, beta, _ = cubic_roots_32(a)
    spread = alpha - beta
    zeta = math.sqrt(spread / (2.0 * alpha + beta))
    chi = 9.0 * spread / (9.0 * alpha - alpha * beta * (alpha + beta))
    z2 = zeta * zeta
    amplitude = math.asin(min(1.0, math.sqrt((chi - z2) / (chi * (1.0 - z2)))))
    first = 2.0 * math.sqrt(alpha * beta * (alpha + beta)) / (3.0 * math.sqrt(2.0 * alpha + beta))
    return first * ellip_k(zeta) + math.pi * heuman_lambda(amplitude, zeta)


def theta_m1_closed(a: float, m: int) -> float:
    """Energy of the p = -1 de Sitter curve closing after m periods."""
    if m < 1:
        raise DomainError(f'm must be a positive integer, got {m}')
    alpha, beta = quartic_roots_m1(a)
    zeta = math.sqrt((alpha - beta) * (alpha + beta)) / alpha
    return 4.0 * m * beta / (alpha * alpha) * ellip_pi(zeta * zeta, zeta)


def theta_32_closed(a: float, m: int) -> float:
    """Energy of the p = 3/2 hyperbolic curve closing after m periods."""
    if m < 1:
        raise DomainError(f'm must be a positive integer, got {m}')
    alpha, beta, _ = cubic_roots_32(a)
    zeta = math.sqrt((alpha - beta) / (2.0 * alpha + beta))
    root = math.sqrt(2.0 * alpha + beta)
    return 6.0 * m * (root * ellip_e(zeta) - (alpha + beta) / root * ellip_k(zeta))
