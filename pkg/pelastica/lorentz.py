"""Lorentz–Minkowski 3-space primitives.

Vectors are numpy arrays whose last axis has length 3, so every function here
works on a single vector or on a stack of samples. The metric has signature
(+, +, -). The two space forms are the upper sheet of x^2 + y^2 - z^2 = -1
(hyperbolic plane) and the one-sheeted x^2 + y^2 - z^2 = 1 (de Sitter plane).

Usage:
    from pelastica.lorentz import HYPERBOLIC, minkowski_inner, poincare_project

    minkowski_inner([1, 0, 2 ** 0.5], [1, 0, 2 ** 0.5])   # -1.0
    poincare_project([0.0, 0.0, 1.0])                      # (0.0, 0.0)

Author:
    Jake Meador <jameador13@gmail.com>
"""

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .exceptions import DomainError

__author__ = 'Jake Meador <jameador13@gmail.com>'
__all__ = [
    'Vec3L',
    'SpaceForm',
    'HYPERBOLIC',
    'DE_SITTER',
    'CrossVariant',
    'minkowski_inner',
    'cross',
    'on_quadric',
    'quadric_residual',
    'poincare_project',
    'poincare_embed',
    'punctured_project',
    'punctured_embed',
]

logger = logging.getLogger('pelastica.lorentz')

Vec3L = NDArray[np.float64]
CrossVariant = Literal['euclidean', 'lorentzian']

_METRIC = np.array([1.0, 1.0, -1.0])
_PROJECTION_TOL = 1e-8


@dataclass(frozen=True)
class SpaceForm:
    """One of the two quadrics, with the causal signs it forces.

    Only space-like curves are considered, so eps1 is always +1. The normal
    sign eps2 is +1 on the hyperbolic plane and -1 on the de Sitter plane.
    """

    epsilon: int

    def __post_init__(self) -> None:
        if self.epsilon not in (0, 1):
            raise DomainError(f'epsilon must be 0 or 1, got {self.epsilon!r}')

    @property
    def eps1(self) -> int:
        return 1

    @property
    def eps2(self) -> int:
        return -1 if self.epsilon else 1

    @property
    def rho(self) -> int:
        """Sectional curvature of the quadric."""
        return 1 if self.epsilon else -1

    @property
    def quadric_value(self) -> float:
        """Value of <v, v> on the quadric."""
        return float(-self.eps2)

    @property
    def name(self) -> str:
        return 'h12' if self.epsilon else 'h2'

    @property
    def label(self) -> str:
        return 'de Sitter H^2_1' if self.epsilon else 'hyperbolic H^2'


HYPERBOLIC = SpaceForm(0)
DE_SITTER = SpaceForm(1)


def minkowski_inner(u: ArrayLike, v: ArrayLike) -> NDArray[np.float64] | float:
    """Minkowski inner product u_x v_x + u_y v_y - u_z v_z along the last axis."""
    result = np.sum(np.asarray(u, dtype=float) * np.asarray(v, dtype=float) * _METRIC, axis=-1)
    return float(result) if np.ndim(result) == 0 else result


def cross(u: ArrayLike, v: ArrayLike, variant: CrossVariant = 'lorentzian') -> Vec3L:
    """Cross product of u and v.

    Args:
        u: First vector or stack of vectors
        v: Second vector or stack of vectors
        variant: 'euclidean' for the standard R^3 product, 'lorentzian' for its
            metric dual (last component negated), which is Minkowski-orthogonal
            to both factors

    Returns:
        Array with the broadcast shape of the inputs
    """
    result = np.cross(np.asarray(u, dtype=float), np.asarray(v, dtype=float))
    if variant == 'lorentzian':
        result = result * _METRIC
    elif variant != 'euclidean':
        raise ValueError(f'Unknown cross product variant: {variant}')
    return result


def on_quadric(v: ArrayLike, space: SpaceForm, tol: float = 1e-12) -> bool:
    """Check whether a single vector lies on the quadric of the given space form."""
    if tol <= 0:
        raise ValueError(f'tol must be positive, got {tol}')
    vec = np.asarray(v, dtype=float)
    if abs(minkowski_inner(vec, vec) - space.quadric_value) > tol:
        return False
    return space.epsilon == 1 or vec[2] > 0


def quadric_residual(points: ArrayLike, space: SpaceForm) -> NDArray[np.float64]:
    """Pointwise |<v, v> - (-eps2)| for a stack of points."""
    pts = np.asarray(points, dtype=float)
    return np.abs(np.atleast_1d(minkowski_inner(pts, pts)) - space.quadric_value)


def _as_points(v: ArrayLike) -> NDArray[np.float64]:
    pts = np.asarray(v, dtype=float)
    if pts.shape[-1] != 3:
        raise DomainError(f'expected vectors with 3 components, got shape {pts.shape}')
    return pts


def poincare_project(v: ArrayLike) -> NDArray[np.float64]:
    """Project points of the hyperbolic plane to the Poincaré disk.

    Raises:
        DomainError: If a point is off the upper sheet
    """
    pts = _as_points(v)
    norm = np.atleast_1d(minkowski_inner(pts, pts))
    z = pts[..., 2]
    scale = np.maximum(1.0, z * z)
    if np.any(z <= 0) or np.any(np.abs(norm + 1.0) > _PROJECTION_TOL * scale):
        raise DomainError('poincare_project requires points on the upper sheet <v,v> = -1, z > 0')
    return pts[..., :2] / (1.0 + z)[..., np.newaxis]


def poincare_embed(w: ArrayLike) -> NDArray[np.float64]:
    """Inverse of poincare_project for points of the open unit disk."""
    disk = np.asarray(w, dtype=float)
    r2 = np.sum(disk * disk, axis=-1)
    if np.any(r2 >= 1.0):
        raise DomainError('poincare_embed requires points in the open unit disk')
    denom = 1.0 - r2
    xy = 2.0 * disk / denom[..., np.newaxis]
    z = (1.0 + r2) / denom
    return np.concatenate([xy, z[..., np.newaxis]], axis=-1)


def punctured_project(v: ArrayLike) -> NDArray[np.float64]:
    """Project the bottom half of the de Sitter plane to the punctured disk.

    The map is (x, y) / (x^2 + y^2); the equator z = 0 is fixed.

    Raises:
        DomainError: If a point has z > 0 or is off the quadric
    """
    pts = _as_points(v)
    norm = np.atleast_1d(minkowski_inner(pts, pts))
    z = pts[..., 2]
    scale = np.maximum(1.0, z * z)
    if np.any(z > 0) or np.any(np.abs(norm - 1.0) > _PROJECTION_TOL * scale):
        raise DomainError('punctured_project requires points on <v,v> = 1 with z <= 0')
    planar = np.sum(pts[..., :2] ** 2, axis=-1)
    return pts[..., :2] / planar[..., np.newaxis]


def punctured_embed(w: ArrayLike) -> NDArray[np.float64]:
    """Inverse of punctured_project for points of the punctured closed disk."""
    disk = np.asarray(w, dtype=float)
    r2 = np.sum(disk * disk, axis=-1)
    if np.any(r2 > 1.0) or np.any(r2 == 0.0):
        raise DomainError('punctured_embed requires 0 < |w| <= 1')
    xy = disk / r2[..., np.newaxis]
    z = -np.sqrt(np.maximum(1.0 / r2 - 1.0, 0.0))
    return np.concatenate([xy, z[..., np.newaxis]], axis=-1)
