"""CLI entry point for pelastica.

Subcommands compute, close, trace, scan and verify p-elastic curves on the
hyperbolic plane (--space h2) and the de Sitter plane (--space h12).

Usage:
    python -m pelastica roots --space h2 --p 2 --a -1
    python -m pelastica close --space h2 --p 1.5 --n 2 --m 3 --format json
    python -m pelastica close --list-pairs 11
    python -m pelastica trace --space h12 --p -1 --n 3 --m 5 --format svg --out curve.svg
    python -m pelastica scan --space h12 --p -1 --grid 200 --energy 1
    python -m pelastica evolve --space h2 --n 2 --m 3 --p-list 1.1,2,7,15 --quadric-csv cloud.csv
    python -m pelastica verify --space h2 --p 2 --a -1 [--perturb]
    python -m pelastica circle --space h12 --p-list=-9,-5,-2,-0.5
    python -m pelastica config --set "quadrature.base_nodes=128" --write pelastica.yaml

Exit codes:
    0 success, 1 a verification check failed, 2 usage or configuration error,
    3 domain error, 4 bracketing or convergence failure, 5 file could not be
    read or written

Author:
    Jake Meador <jameador13@gmail.com>
"""

import argparse
import logging
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import config as config_module
from .curve import (check_closure_pair, circle, circle_family, closure_pairs, disk_extent,
                    family_evolution, lobe_count, solve_closure, trace, winding_number)
from .elliptic import lambda_32_closed
from .exceptions import (EXIT_CHECK_FAILED, EXIT_CONVERGENCE, EXIT_OK, DomainError, PelasticaError,
                         UsageError, exit_code_for)
from .lorentz import SpaceForm
from .output import render_svg, rows_to_csv, to_json, trace_to_csv, write_quadric_csv, write_text
from .quadrature import QuadratureConfig
from .scalar import a_star, check_admissible_p, make_params, solve_roots, space_from_name
from .verify import monotonicity_scan, run_suite

__author__ = 'Jake Meador <jameador13@gmail.com>'
__all__ = ['main', 'run_logging']

logger = logging.getLogger('pelastica')


# ============================================================================
# Shared plumbing
# ============================================================================

def run_logging(debug: bool = False, log_file: Optional[str] = None, quiet: bool = False) -> None:
    """Configure root logging for a CLI run."""
    handlers: list[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file, encoding='utf-8'))

    level = logging.DEBUG if debug else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(
        level=level,
        format='%(asctime)s [%(levelname)s] %(message)s',
        handlers=handlers,
        force=True,
    )


def _load_settings(args: argparse.Namespace) -> dict:
    overrides: dict = {}
    if args.set:
        overrides = config_module.parse_set_string(args.set)
    for flag, key_path in (('nodes', 'quadrature.base_nodes'), ('tol', 'quadrature.rel_tol'),
                           ('samples', 'trace.samples'), ('workers', 'runtime.workers')):
        value = getattr(args, flag, None)
        if value is not None:
            config_module.apply_key_path(overrides, key_path, value)

    settings, config_file = config_module.load_config(args.config, overrides, os.environ)
    if config_file:
        logger.debug(f'Using config file {config_file}')
    return settings


def _space(args: argparse.Namespace) -> SpaceForm:
    try:
        return space_from_name(args.space)
    except DomainError as e:
        raise UsageError(str(e)) from e


def _admissible(p: float, space: SpaceForm) -> None:
    try:
        check_admissible_p(p, space)
    except DomainError as e:
        raise UsageError(str(e)) from e


def _closure_pair(n: Optional[int], m: Optional[int]) -> tuple[int, int]:
    if n is None or m is None:
        raise UsageError('both --n and --m are required')
    try:
        check_closure_pair(n, m)
    except DomainError as e:
        raise UsageError(str(e)) from e
    return n, m


def _parse_p_list(text: str) -> list[float]:
    try:
        return [float(item) for item in text.split(',') if item.strip()]
    except ValueError as e:
        raise UsageError(f'Invalid --p-list {text!r}: {e}') from e


def _emit(content: str, out: Optional[str]) -> None:
    if out:
        write_text(Path(out), content)
        logger.info(f'Wrote {out}')
    else:
        sys.stdout.write(content)


def _emit_record(record: dict[str, Any], fmt: str, out: Optional[str]) -> None:
    if fmt == 'json':
        _emit(to_json(record), out)
    elif fmt == 'csv':
        _emit(rows_to_csv(list(record), [list(record.values())]), out)
    else:
        width = max(len(key) for key in record)
        _emit(''.join(f'{key:<{width}}  {value}\n' for key, value in record.items()), out)


def _trace_settings(settings: dict) -> tuple[QuadratureConfig, int, int]:
    cfg = config_module.quadrature_config(settings)
    section = settings.get('trace', {})
    return cfg, int(section.get('samples', 256)), int(section.get('segment_nodes', 16))


# ============================================================================
# Subcommands
# ============================================================================

def cmd_roots(args: argparse.Namespace) -> int:
    """Print beta, alpha, kappa_c and a_*."""
    settings = _load_settings(args)
    space = _space(args)
    _admissible(args.p, space)
    params = make_params(args.p, args.a, space)
    roots = solve_roots(params, float(settings['roots']['tol']))
    record = {
        'space': space.name,
        'p': params.p,
        'a': params.a,
        'a_star': params.a_star,
        'beta': roots.beta,
        'alpha': roots.alpha,
        'kappa_c': roots.kappa_c,
    }
    _emit_record(record, args.format, args.out)
    return EXIT_OK


def cmd_close(args: argparse.Namespace) -> int:
    """Solve Lambda_p(a) = 2 pi n / m and report the closed curve."""
    if args.list_pairs is not None:
        pairs = closure_pairs(args.list_pairs)
        if args.format == 'json':
            _emit(to_json([{'n': n, 'm': m, 'q': n / m} for n, m in pairs]), args.out)
        else:
            _emit(rows_to_csv(['n', 'm', 'q'], [(n, m, n / m) for n, m in pairs]), args.out)
        return EXIT_OK

    n, m = _closure_pair(args.n, args.m)
    if args.p is None:
        raise UsageError('--p is required unless --list-pairs is given')
    settings = _load_settings(args)
    space = _space(args)
    _admissible(args.p, space)
    cfg, samples, _ = _trace_settings(settings)

    result = solve_closure(args.p, space, n, m, cfg=cfg, tol=float(settings['closure']['tol']),
                           n_samples=samples, root_tol=float(settings['roots']['tol']))
    record = result.to_dict()
    record['winding_number'] = winding_number(result.trace)
    record['lobes'] = lobe_count(result.trace)
    _emit_record(record, args.format, args.out)
    if args.svg:
        write_text(Path(args.svg), render_svg([result.trace], size=int(settings['output']['svg_size']),
                                              title=f'{space.name} p={args.p} q={n}/{m}'))
    return EXIT_OK


def cmd_trace(args: argparse.Namespace) -> int:
    """Write a traced curve as CSV, JSON or SVG."""
    settings = _load_settings(args)
    space = _space(args)
    _admissible(args.p, space)
    has_pair = args.n is not None or args.m is not None
    if (args.a is None) == (not has_pair):
        raise UsageError('give exactly one of --a or --n/--m')
    cfg, samples, segment_nodes = _trace_settings(settings)

    if args.a is not None:
        params = make_params(args.p, args.a, space)
        curve = trace(params, m=args.periods, n_samples=samples, cfg=cfg,
                      spacing=args.spacing, segment_nodes=segment_nodes)
    else:
        n, m = _closure_pair(args.n, args.m)
        result = solve_closure(args.p, space, n, m, cfg=cfg, tol=float(settings['closure']['tol']),
                               n_samples=samples, with_trace=False)
        curve = trace(make_params(args.p, result.a_q, space), m=m, n_samples=samples, cfg=cfg,
                      spacing=args.spacing, segment_nodes=segment_nodes)

    if args.format == 'svg':
        _emit(render_svg([curve], size=int(settings['output']['svg_size'])), args.out)
    elif args.format == 'json':
        _emit(to_json({
            'space': space.name, 'p': curve.p, 'a': curve.a, 'm': curve.m,
            'period_rho': curve.period_rho, 'roots': curve.roots, 'samples': curve.samples,
        }), args.out)
    else:
        _emit(trace_to_csv(curve), args.out)
    return EXIT_OK


def cmd_scan(args: argparse.Namespace) -> int:
    """Emit the Lambda_p(a) table, optionally with energies."""
    settings = _load_settings(args)
    space = _space(args)
    _admissible(args.p, space)
    cfg = config_module.quadrature_config(settings)
    rows = monotonicity_scan(args.p, space, args.grid, cfg, energy_m=args.energy,
                             workers=int(settings['runtime']['workers']))

    closed_form = args.p == 1.5 and space.epsilon == 0
    header = ['a', 'lambda_p', 'period', 'decreasing', 'reduced_confidence']
    if closed_form:
        header.append('lambda_closed')
    if args.energy:
        header += ['energy', 'energy_limit']

    table = []
    for row in rows:
        values: list[Any] = [row.a, row.lambda_p, row.period, row.decreasing, row.reduced_confidence]
        if closed_form:
            values.append(lambda_32_closed(row.a))
        if args.energy:
            values += [row.energy, row.energy_limit]
        table.append(values)

    if args.format == 'json':
        _emit(to_json([dict(zip(header, values)) for values in table]), args.out)
    else:
        _emit(rows_to_csv(header, table), args.out)
    if not all(row.decreasing for row in rows):
        logger.warning('scan is not strictly decreasing')
    return EXIT_OK


def cmd_evolve(args: argparse.Namespace) -> int:
    """Closed curves of one (n, m) type for a list of exponents."""
    settings = _load_settings(args)
    space = _space(args)
    p_list = _parse_p_list(args.p_list)
    for p in p_list:
        _admissible(p, space)
    n, m = _closure_pair(args.n, args.m)
    cfg, samples, _ = _trace_settings(settings)

    members = family_evolution(space, n, m, p_list, cfg=cfg, n_samples=samples,
                               workers=int(settings['runtime']['workers']))
    header = ['p', 'a_q', 'lambda_at_aq', 'closure_defect', 'disk_extent', 'error']
    table = []
    for member in members:
        if member.closure is None:
            table.append([member.p, None, None, None, None, member.error])
        else:
            table.append([member.p, member.closure.a_q, member.closure.lambda_at_aq,
                          member.closure.closure_defect, disk_extent(member.trace), None])

    if args.format == 'json':
        _emit(to_json([dict(zip(header, values)) for values in table]), args.out)
    else:
        _emit(rows_to_csv(header, table), args.out)

    traced = [member.trace for member in members if member.trace is not None]
    if args.svg and traced:
        write_text(Path(args.svg), render_svg(traced, size=int(settings['output']['svg_size']),
                                              title=f'{space.name} q={n}/{m}'))
    if args.quadric_csv:
        write_quadric_csv(members, f'{space.name}-{n}/{m}', Path(args.quadric_csv))

    failed = [member.p for member in members if member.error]
    if failed:
        logger.error(f'{len(failed)} family member(s) failed: {failed}')
        return EXIT_CONVERGENCE
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    """Run the verification suite and print a report table."""
    settings = _load_settings(args)
    space = _space(args)
    _admissible(args.p, space)
    cfg, samples, _ = _trace_settings(settings)
    params = make_params(args.p, args.a, space)
    reports = run_suite(params, cfg, perturb=args.perturb, n_samples=samples,
                        thresholds=config_module.verify_thresholds(settings), oracle=not args.no_oracle)

    if args.format == 'json':
        _emit(to_json(reports), args.out)
    else:
        header = ['check', 'max_residual', 'threshold', 'passed', 'variant']
        rows = [[r.check_name, r.max_residual, r.threshold, r.passed, r.metadata.get('variant', '')]
                for r in reports]
        _emit(rows_to_csv(header, rows), args.out)

    return EXIT_OK if all(report.passed for report in reports) else EXIT_CHECK_FAILED


def cmd_circle(args: argparse.Namespace) -> int:
    """Print circle solutions."""
    space = _space(args)
    if (args.p is None) == (args.p_list is None):
        raise UsageError('give exactly one of --p or --p-list')
    p_values = [args.p] if args.p is not None else _parse_p_list(args.p_list)
    for p in p_values:
        _admissible(p, space)

    circles = circle_family(space, p_values)
    if args.format == 'json':
        _emit(to_json(circles if args.p_list else circles[0]), args.out)
    elif args.format == 'csv' or args.p_list:
        _emit(rows_to_csv(['p', 'space', 'kappa', 'radius_L3', 'height_z'],
                          [[c.p, c.space, c.kappa, c.radius_L3, c.height_z] for c in circles]), args.out)
    else:
        data = circle(p_values[0], space)
        _emit_record({'p': data.p, 'space': data.space, 'kappa': data.kappa,
                      'radius_L3': data.radius_L3, 'height_z': data.height_z,
                      'a_star': a_star(data.p, space)}, 'text', args.out)
    return EXIT_OK


def cmd_config(args: argparse.Namespace) -> int:
    """Print the effective settings, optionally saving them as a config file."""
    settings = _load_settings(args)
    config_module.quadrature_config(settings)
    config_module.verify_thresholds(settings)

    if args.write:
        config_module.save_config_file(Path(args.write), settings)
        logger.info(f'Saved settings to {args.write}')
    _emit(config_module.dump_config(settings, args.format), args.out)
    return EXIT_OK


# ============================================================================
# Parser
# ============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, help='Path to config file (JSON or YAML)')
    common.add_argument('--set', type=str, metavar='KEY=VALUE ...',
                        help='Set config values, e.g. "quadrature.base_nodes=128 closure.tol=1e-11"')
    common.add_argument('--debug', action='store_true', help='Enable debug logging')
    common.add_argument('--quiet', action='store_true', help='Only log warnings and errors')
    common.add_argument('--log-file', type=str, help='Write logs to file')
    common.add_argument('--space', default='h2', help='h2 (hyperbolic plane) or h12 (de Sitter plane)')
    common.add_argument('--out', type=str, help='Write output to this file instead of stdout')
    common.add_argument('--nodes', type=int, help='Gauss–Legendre nodes per panel')
    common.add_argument('--tol', type=float, help='Relative quadrature tolerance')
    common.add_argument('--samples', type=int, help='Trace samples per half-period')
    common.add_argument('--workers', type=int, help='Worker threads for batch commands')

    parser = argparse.ArgumentParser(
        prog='pelastica',
        description='pelastica - p-elastic curves in the hyperbolic and de Sitter planes',
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    subparsers = parser.add_subparsers(dest='command', help='Subcommands')

    # ROOTS subcommand
    roots_parser = subparsers.add_parser('roots', parents=[common], help='Curvature extrema for (p, a)')
    roots_parser.add_argument('--p', type=float, required=True, help='Exponent p')
    roots_parser.add_argument('--a', type=float, required=True, help='Integration constant a')
    roots_parser.add_argument('--format', choices=['text', 'json', 'csv'], default='text')
    roots_parser.set_defaults(func=cmd_roots)

    # CLOSE subcommand
    close_parser = subparsers.add_parser('close', parents=[common], help='Solve the closure condition')
    close_parser.add_argument('--p', type=float, help='Exponent p')
    close_parser.add_argument('--n', type=int, help='Winding number')
    close_parser.add_argument('--m', type=int, help='Number of curvature periods')
    close_parser.add_argument('--list-pairs', type=int, metavar='M', help='List admissible (n, m) with m <= M')
    close_parser.add_argument('--svg', type=str, help='Also draw the closed curve to this SVG file')
    close_parser.add_argument('--format', choices=['text', 'json', 'csv'], default='text')
    close_parser.set_defaults(func=cmd_close)

    # TRACE subcommand
    trace_parser = subparsers.add_parser('trace', parents=[common], help='Sample a curve')
    trace_parser.add_argument('--p', type=float, required=True, help='Exponent p')
    trace_parser.add_argument('--a', type=float, help='Integration constant a')
    trace_parser.add_argument('--n', type=int, help='Winding number of a closed curve')
    trace_parser.add_argument('--m', type=int, help='Curvature periods of a closed curve')
    trace_parser.add_argument('--periods', type=int, default=1, help='Periods to trace with --a')
    trace_parser.add_argument('--spacing', choices=['chebyshev', 'uniform'], default='chebyshev')
    trace_parser.add_argument('--format', choices=['csv', 'json', 'svg'], default='csv')
    trace_parser.set_defaults(func=cmd_trace)

    # SCAN subcommand
    scan_parser = subparsers.add_parser('scan', parents=[common], help='Tabulate Lambda_p(a)')
    scan_parser.add_argument('--p', type=float, required=True, help='Exponent p')
    scan_parser.add_argument('--grid', type=int, default=100, help='Grid size (>= 16)')
    scan_parser.add_argument('--energy', type=int, metavar='M', help='Add energy columns for m = M')
    scan_parser.add_argument('--format', choices=['csv', 'json'], default='csv')
    scan_parser.set_defaults(func=cmd_scan)

    # EVOLVE subcommand
    evolve_parser = subparsers.add_parser('evolve', parents=[common], help='Closed curves across exponents')
    evolve_parser.add_argument('--n', type=int, required=True, help='Winding number')
    evolve_parser.add_argument('--m', type=int, required=True, help='Number of curvature periods')
    evolve_parser.add_argument('--p-list', type=str, required=True, help='Comma-separated exponents')
    evolve_parser.add_argument('--svg', type=str, help='Draw the family to this SVG file')
    evolve_parser.add_argument('--quadric-csv', type=str, help='Write the 3D point cloud to this CSV file')
    evolve_parser.add_argument('--format', choices=['csv', 'json'], default='csv')
    evolve_parser.set_defaults(func=cmd_evolve)

    # VERIFY subcommand
    verify_parser = subparsers.add_parser('verify', parents=[common], help='Run the verification suite')
    verify_parser.add_argument('--p', type=float, default=2.0, help='Exponent p')
    verify_parser.add_argument('--a', type=float, default=-1.0, help='Integration constant a')
    verify_parser.add_argument('--perturb', action='store_true', help='Run negative controls')
    verify_parser.add_argument('--no-oracle', action='store_true', help='Skip the ODE oracle')
    verify_parser.add_argument('--format', choices=['csv', 'json'], default='csv')
    verify_parser.set_defaults(func=cmd_verify)

    # CIRCLE subcommand
    circle_parser = subparsers.add_parser('circle', parents=[common], help='Circle solutions')
    circle_parser.add_argument('--p', type=float, help='Exponent p')
    circle_parser.add_argument('--p-list', type=str, help='Comma-separated exponents')
    circle_parser.add_argument('--format', choices=['text', 'json', 'csv'], default='text')
    circle_parser.set_defaults(func=cmd_circle)

    # CONFIG subcommand
    config_parser = subparsers.add_parser('config', parents=[common], help='Show or save the effective settings')
    config_parser.add_argument('--write', type=str, metavar='PATH', help='Save the settings to PATH (.json or .yaml)')
    config_parser.add_argument('--format', choices=['yaml', 'json'], default='yaml')
    config_parser.set_defaults(func=cmd_config)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> None:
    """Parse CLI arguments and execute subcommand."""
    parser = build_parser()
    args = parser.parse_args(argv)

    if not hasattr(args, 'func'):
        parser.print_help()
        sys.exit(2)

    run_logging(args.debug, args.log_file, args.quiet)

    try:
        code = args.func(args)
    except PelasticaError as e:
        logger.error(str(e))
        code = exit_code_for(e)
    except OSError as e:
        logger.error(f'I/O error: {e}')
        code = exit_code_for(e)

    sys.exit(code)


if __name__ == '__main__':
    main()
