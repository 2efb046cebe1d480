"""Tests for the residual checks, scans and the ODE oracle."""

import math

import numpy as np
import pytest

from pelastica.curve import CurvatureProfile, circle, circle_trace, trace
from pelastica.elliptic import lambda_32_closed
from pelastica.exceptions import DomainError
from pelastica.lorentz import DE_SITTER, HYPERBOLIC
from pelastica.output import to_json
from pelastica.quadrature import period
from pelastica.scalar import make_params, solve_roots
from pelastica.verify import (Thresholds, VerificationReport, conservation_residual, curvature_consistency,
                              el_residual, energy_checks, half_space, killing_norm, limit_checks, momentum,
                              monotonicity_scan, ode_oracle, oracle_check, quadric_residual, run_suite,
                              scan_grid, theta_monotone, unit_speed)

from .conftest import CLOSURE_CASES, case_id

SQRT2_PI = math.sqrt(2) * math.pi


@pytest.fixture(scope='module')
def uniform_p2():
    return trace(make_params(2.0, -1.0, HYPERBOLIC), n_samples=256, spacing='uniform')


def constant_profile(value: float, n: int = 64) -> CurvatureProfile:
    s = np.linspace(0.0, 1.0, n)
    return CurvatureProfile(s=s, kappa=np.full(n, value), kappa_prime=np.zeros(n))


class TestReport:
    """VerificationReport bookkeeping."""

    def test_passed_is_computed(self):
        assert VerificationReport('x', 1e-9, 1e-8).passed
        assert not VerificationReport('x', 2e-8, 1e-8).passed
        assert VerificationReport('x', 0.0, 0.0).passed

    def test_infinite_residual_fails(self):
        assert not VerificationReport('x', math.inf, 1.0).passed

    def test_default_thresholds(self):
        thresholds = Thresholds()
        assert thresholds.quadric == 1e-9
        assert thresholds.pi_limit == 5e-2


class TestProfileChecks:
    """Euler–Lagrange and first-integral residuals."""

    @pytest.mark.parametrize('p, space', [(2.0, HYPERBOLIC), (1.5, HYPERBOLIC), (-1.0, DE_SITTER), (-4.0, DE_SITTER)])
    def test_circle_el_machine_precision(self, p, space):
        report = el_residual(constant_profile(circle(p, space).kappa), p, space)
        assert report.max_residual < 1e-13

    @pytest.mark.parametrize('p', [2.0, 3.0])
    def test_geodesic(self, p):
        report = el_residual(constant_profile(0.0), p, HYPERBOLIC)
        assert report.max_residual == 0.0

    def test_traced_el(self, uniform_p2):
        report = el_residual(uniform_p2.profile, 2.0, HYPERBOLIC)
        assert report.passed, report.max_residual

    def test_el_needs_uniform_spacing(self):
        curve = trace(make_params(2.0, -1.0, HYPERBOLIC), n_samples=32)
        with pytest.raises(DomainError):
            el_residual(curve.profile, 2.0, HYPERBOLIC)

    def test_conservation_at_turning_points(self):
        params = make_params(2.0, -1.0, HYPERBOLIC)
        roots = solve_roots(params)
        profile = CurvatureProfile(np.array([0.0, 1.0]), np.array([roots.beta, roots.alpha]), np.zeros(2))
        assert conservation_residual(profile, 2.0, -1.0, HYPERBOLIC).max_residual < 1e-10

    def test_conservation_traced(self):
        curve = trace(make_params(-1.0, -1.0, DE_SITTER), n_samples=128)
        assert conservation_residual(curve.profile, -1.0, -1.0, DE_SITTER).passed

    def test_conservation_perturbed(self):
        curve = trace(make_params(2.0, -1.0, HYPERBOLIC), n_samples=64)
        profile = CurvatureProfile(curve.s, curve.kappa * 1.01, curve.kappa_prime)
        assert conservation_residual(profile, 2.0, -1.0, HYPERBOLIC).max_residual > 1e-3


class TestTraceChecks:
    """Checks on the embedded curve."""

    @pytest.mark.parametrize('p, space', [(2.0, HYPERBOLIC), (-1.0, DE_SITTER), (1.5, HYPERBOLIC)])
    def test_circle_momentum(self, p, space):
        report = momentum(circle_trace(p, space, n_samples=64))
        assert report.passed
        assert report.metadata['variant'] == 'lorentzian'
        assert report.metadata['timelike'] is True

    def test_circle_momentum_values(self):
        report = momentum(circle_trace(2.0, HYPERBOLIC, n_samples=64))
        xi = report.metadata['lorentzian']['xi']
        np.testing.assert_allclose(xi, [0.0, 0.0, -2.0], atol=1e-12)
        assert report.metadata['euclidean']['norm'] == pytest.approx(-36.0)

    def test_uniform_trace_checks(self, uniform_p2):
        assert unit_speed(uniform_p2).passed
        assert unit_speed(uniform_p2).metadata['finite_difference'] < 1e-5
        assert curvature_consistency(uniform_p2).passed
        assert quadric_residual(uniform_p2).passed

    def test_curvature_consistency_needs_uniform_spacing(self):
        curve = trace(make_params(2.0, -1.0, HYPERBOLIC), n_samples=32)
        with pytest.raises(DomainError):
            curvature_consistency(curve)

    def test_killing_norm_positive(self):
        curve = trace(make_params(-1.0, -3.9, DE_SITTER), n_samples=64)
        report = killing_norm(curve)
        assert report.passed
        assert report.metadata['min_norm'] > 0

    def test_half_space(self):
        assert half_space(trace(make_params(-1.0, -1.0, DE_SITTER), n_samples=32)).passed
        assert half_space(trace(make_params(2.0, -1.0, HYPERBOLIC), n_samples=32)).passed

    def test_theta_monotone_detects_reversal(self, uniform_p2):
        assert theta_monotone(uniform_p2).passed
        reversed_curve = trace(make_params(2.0, -1.0, HYPERBOLIC), n_samples=16)
        reversed_curve.theta = reversed_curve.theta[::-1]
        report = theta_monotone(reversed_curve)
        assert report.max_residual == len(reversed_curve) - 1
        assert not report.passed


class TestClosedCurveInvariants:
    """Every reproduced closed curve satisfies the trace invariants and conserves xi."""

    @pytest.mark.slow
    @pytest.mark.parametrize('case', CLOSURE_CASES, ids=case_id)
    def test_invariants(self, closed_curves, case):
        p, space, n, m = case
        result = closed_curves[case]
        curve = result.trace
        assert quadric_residual(curve).max_residual < 1e-9
        assert unit_speed(curve).max_residual < 1e-8
        assert conservation_residual(curve.profile, p, result.a_q, space).max_residual < 1e-8
        assert theta_monotone(curve).passed
        assert killing_norm(curve).metadata['min_norm'] > 0
        assert half_space(curve).passed
        if space.epsilon:
            assert np.all(curve.gamma[:, 2] < 0)

        uniform = trace(make_params(p, result.a_q, space), m=m, n_samples=256, spacing='uniform')
        assert el_residual(uniform.profile, p, space).max_residual < 1e-6

    @pytest.mark.slow
    @pytest.mark.parametrize('case', CLOSURE_CASES, ids=case_id)
    def test_momentum(self, closed_curves, case):
        result = closed_curves[case]
        report = momentum(result.trace)
        assert report.passed
        variant = report.metadata['variant']
        assert report.metadata[variant]['deviation'] < 1e-6
        assert report.metadata[variant]['norm_error'] < 1e-6
        other = 'euclidean' if variant == 'lorentzian' else 'lorentzian'
        failed = report.metadata[other]
        assert failed['deviation'] >= 1e-6 or failed['norm_error'] >= 1e-6


class TestLimitsAndScans:
    """Window-end limits and monotonicity scans."""

    @pytest.mark.parametrize('p, space', [(2.0, HYPERBOLIC), (-1.0, DE_SITTER)])
    def test_limit_checks(self, p, space):
        report = limit_checks(p, space)
        assert report.passed
        assert report.metadata['decreasing_to_pi']

    def test_limit_checks_closed_form(self):
        report = limit_checks(1.5, HYPERBOLIC)
        assert report.metadata['closed_form_error'] < 1e-9

    def test_limit_checks_closed_form_both_ends(self):
        report = limit_checks(1.5, HYPERBOLIC)
        assert report.metadata['closed_form_error_a_star'] < 1e-9
        assert report.metadata['closed_form_error_zero'] < 1e-9
        assert report.metadata['closed_form_error'] == max(report.metadata['closed_form_error_a_star'],
                                                           report.metadata['closed_form_error_zero'])

    def test_limit_trend_large_p(self):
        report = limit_checks(7.0, HYPERBOLIC)
        assert report.metadata['decreasing_to_pi']
        assert report.metadata['sqrt2_error'] < 5e-3

    @pytest.mark.parametrize('p, space, m', [(-1.0, DE_SITTER, 1), (1.5, HYPERBOLIC, 2), (3.0, HYPERBOLIC, 1)])
    def test_energy_checks(self, p, space, m):
        assert energy_checks(p, space, m).passed

    def test_scan_grid(self):
        grid = scan_grid(-1.0, DE_SITTER, 40)
        assert len(grid) == 40
        assert np.all(np.diff(grid) > 0)
        assert grid[0] > -4.0
        assert grid[-1] < 0.0

    def test_scan_grid_minimum(self):
        with pytest.raises(DomainError):
            scan_grid(2.0, HYPERBOLIC, 8)

    @pytest.mark.slow
    def test_scan_de_sitter(self):
        rows = monotonicity_scan(-1.0, DE_SITTER, 200)
        assert len(rows) == 200
        assert all(row.decreasing for row in rows)
        assert all(math.pi < row.lambda_p < SQRT2_PI for row in rows)

    @pytest.mark.slow
    def test_scan_closed_form(self):
        rows = monotonicity_scan(1.5, HYPERBOLIC, 200, workers=2)
        assert all(row.decreasing for row in rows)
        assert all(math.pi < row.lambda_p < SQRT2_PI for row in rows)
        for row in rows:
            assert row.lambda_p == pytest.approx(lambda_32_closed(row.a), rel=1e-9)

    def test_scan_energy_columns(self):
        rows = monotonicity_scan(-1.0, DE_SITTER, 16, energy_m=1)
        assert all(row.energy is not None and row.energy_limit == pytest.approx(2 * math.sqrt(2) * math.pi)
                   for row in rows)


class TestOracle:
    """Fixed-step integration of the Euler–Lagrange equation."""

    @pytest.mark.parametrize('p, space', [(2.0, HYPERBOLIC), (-1.0, DE_SITTER)])
    def test_oracle_equivalence(self, p, space):
        report = oracle_check(make_params(p, -1.0, space))
        assert report.metadata['kappa_error'] < 1e-7
        assert report.metadata['period_error'] < 1e-7
        assert report.passed

    def test_oracle_minima(self):
        params = make_params(2.0, -1.0, HYPERBOLIC)
        rho = period(params)
        result = ode_oracle(params, 2.5 * rho, rho / 4096)
        assert result.kappa[0] == pytest.approx(solve_roots(params).beta)
        assert result.drift < 1e-6
        assert result.period == pytest.approx(rho, rel=1e-7)

    def test_oracle_rejects_step(self):
        with pytest.raises(DomainError):
            ode_oracle(make_params(2.0, -1.0, HYPERBOLIC), 1.0, 0.0)


class TestSuite:
    """run_suite and its negative controls."""

    def test_default_passes(self):
        reports = run_suite(make_params(2.0, -1.0, HYPERBOLIC))
        failed = [(r.check_name, r.max_residual) for r in reports if not r.passed]
        assert not failed
        names = {r.check_name for r in reports}
        assert {'el_residual', 'momentum', 'ode_oracle', 'quadric_residual'} <= names

    def test_perturbed_fails(self):
        reports = {r.check_name: r for r in run_suite(make_params(2.0, -1.0, HYPERBOLIC), perturb=True, oracle=False)}
        assert not reports['conservation_residual'].passed
        assert reports['conservation_residual'].max_residual > 1e-3
        assert not reports['quadric_residual'].passed
        assert not reports['momentum'].passed

    def test_de_sitter_suite(self):
        reports = run_suite(make_params(-1.0, -1.0, DE_SITTER), n_samples=128, oracle=False)
        assert all(r.passed for r in reports)

    def test_reports_deterministic(self):
        params = make_params(-1.0, -1.0, DE_SITTER)
        first = to_json(run_suite(params, n_samples=64, oracle=False))
        second = to_json(run_suite(params, n_samples=64, oracle=False))
        assert first == second
