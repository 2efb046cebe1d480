"""Shared fixtures for the pelastica test suite."""

import pytest

from pelastica.curve import solve_closure
from pelastica.lorentz import DE_SITTER, HYPERBOLIC

CLOSURE_PAIRS = [(2, 3), (3, 5), (4, 7), (5, 8), (5, 9), (6, 11)]
CLOSURE_EXPONENTS = [(1.5, HYPERBOLIC), (2.0, HYPERBOLIC), (-1.0, DE_SITTER)]
CLOSURE_CASES = [(p, space, n, m) for p, space in CLOSURE_EXPONENTS for n, m in CLOSURE_PAIRS]


def case_id(case) -> str:
    p, space, n, m = case
    return f'{space.name}-p{p}-{n}_{m}'


@pytest.fixture(scope='session')
def closed_curves():
    """Closed curves for every (p, space, n, m) case, solved once per session."""
    return {case: solve_closure(*case, n_samples=256) for case in CLOSURE_CASES}
