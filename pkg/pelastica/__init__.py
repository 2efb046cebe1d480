"""pelastica - p-elastic curves in the hyperbolic and de Sitter planes."""

__author__ = 'Jake Meador <jameador13@gmail.com>'
__version__ = '0.1.0'

from .curve import (ClosureResult, CircleData, Trace, circle, circle_family, closure_pairs,
                    family_evolution, solve_closure, trace)
from .exceptions import (BracketError, ConfigError, ConvergenceError, DomainError, PelasticaError,
                         UsageError)
from .lorentz import DE_SITTER, HYPERBOLIC, SpaceForm
from .quadrature import QuadratureConfig, energy, lambda_p, period
from .scalar import ElasticaParams, RootData, a_star, make_params, solve_roots
from .verify import VerificationReport, run_suite
from . import config

__all__ = [
    'BracketError',
    'CircleData',
    'ClosureResult',
    'ConfigError',
    'ConvergenceError',
    'DE_SITTER',
    'DomainError',
    'ElasticaParams',
    'HYPERBOLIC',
    'PelasticaError',
    'QuadratureConfig',
    'RootData',
    'SpaceForm',
    'Trace',
    'UsageError',
    'VerificationReport',
    'a_star',
    'circle',
    'circle_family',
    'closure_pairs',
    'config',
    'energy',
    'family_evolution',
    'lambda_p',
    'make_params',
    'period',
    'run_suite',
    'solve_closure',
    'solve_roots',
    'trace',
]
