"""Tests for the pelastica command line."""

import csv
import io
import json
import math

import pytest
import yaml

from pelastica.__main__ import build_parser, main
from pelastica.config import load_config_file
from pelastica.exceptions import (EXIT_CHECK_FAILED, EXIT_CONVERGENCE, EXIT_DOMAIN, EXIT_IO, EXIT_OK, EXIT_USAGE,
                                  BracketError, CircleDegenerateError, ConfigError, ConvergenceError,
                                  DomainError, PelasticaError, exit_code_for)

pytestmark = pytest.mark.integration


def run(capsys, *argv: str) -> tuple[int, str]:
    """Run the CLI and return (exit code, stdout)."""
    with pytest.raises(SystemExit) as excinfo:
        main(list(argv))
    return excinfo.value.code, capsys.readouterr().out


class TestExitCodes:
    """Exception to exit-code mapping."""

    @pytest.mark.parametrize('error, code', [
        (ConfigError('x'), EXIT_USAGE),
        (DomainError('x'), EXIT_DOMAIN),
        (CircleDegenerateError(2.0, -4.0, -4.0), EXIT_DOMAIN),
        (BracketError('x', -4.0, -1e-8), EXIT_CONVERGENCE),
        (ConvergenceError('x'), EXIT_CONVERGENCE),
        (PelasticaError('x'), EXIT_CHECK_FAILED),
        (OSError('disk full'), EXIT_IO),
        (NotADirectoryError('x'), EXIT_IO),
    ])
    def test_mapping(self, error, code):
        assert exit_code_for(error) == code

    def test_no_command(self, capsys):
        code, _ = run(capsys)
        assert code == EXIT_USAGE

    def test_unwritable_output(self, capsys, tmp_path):
        blocker = tmp_path / 'file.txt'
        blocker.write_text('not a directory', encoding='utf-8')
        code, _ = run(capsys, 'roots', '--p', '2', '--a', '-1', '--out', str(blocker / 'roots.txt'))
        assert code == EXIT_IO


class TestRoots:
    """roots subcommand."""

    def test_text(self, capsys):
        code, out = run(capsys, 'roots', '--space', 'h2', '--p', '2', '--a', '-1')
        assert code == EXIT_OK
        assert '0.5176380' in out
        assert '1.9318516' in out

    def test_de_sitter_json(self, capsys):
        code, out = run(capsys, 'roots', '--space', 'h12', '--p', '-1', '--a', '-1', '--format', 'json')
        assert code == EXIT_OK
        data = json.loads(out)
        assert data['beta'] == pytest.approx(0.517638, abs=1e-6)
        assert data['alpha'] == pytest.approx(1.931852, abs=1e-6)
        assert data['a_star'] == pytest.approx(-4.0)

    def test_outside_window(self, capsys):
        code, _ = run(capsys, 'roots', '--space', 'h2', '--p', '2', '--a', '-5')
        assert code == EXIT_DOMAIN

    def test_unknown_space(self, capsys):
        code, _ = run(capsys, 'roots', '--space', 's2', '--p', '2', '--a', '-1')
        assert code == EXIT_USAGE


class TestClose:
    """close subcommand."""

    def test_window_violated(self, capsys):
        code, _ = run(capsys, 'close', '--n', '1', '--m', '1')
        assert code == EXIT_USAGE

    def test_list_pairs(self, capsys):
        code, out = run(capsys, 'close', '--list-pairs', '11', '--format', 'json')
        assert code == EXIT_OK
        pairs = {(row['n'], row['m']) for row in json.loads(out)}
        assert {(2, 3), (3, 5), (4, 7), (5, 8), (5, 9), (6, 11)} <= pairs

    def test_json(self, capsys, tmp_path):
        svg = tmp_path / 'closed.svg'
        code, out = run(capsys, 'close', '--space', 'h2', '--p', '1.5', '--n', '2', '--m', '3',
                        '--format', 'json', '--samples', '64', '--svg', str(svg))
        assert code == EXIT_OK
        data = json.loads(out)
        assert data['lambda_at_aq'] == pytest.approx(4 * math.pi / 3, abs=1e-10)
        assert data['closure_defect'] < 1e-6
        assert data['winding_number'] == 2
        assert svg.read_text(encoding='utf-8').startswith('<?xml')

    @pytest.mark.slow
    def test_de_sitter_five_ninths(self, capsys):
        code, out = run(capsys, 'close', '--space', 'h12', '--p', '-1', '--n', '5', '--m', '9', '--format', 'json')
        assert code == EXIT_OK
        assert json.loads(out)['lambda_at_aq'] == pytest.approx(10 * math.pi / 9, abs=1e-10)


class TestTrace:
    """trace subcommand."""

    def test_csv_file(self, capsys, tmp_path):
        path = tmp_path / 'curve.csv'
        code, _ = run(capsys, 'trace', '--p', '2', '--a', '-1', '--samples', '16', '--out', str(path))
        assert code == EXIT_OK
        rows = list(csv.reader(io.StringIO(path.read_text(encoding='utf-8'))))
        assert rows[0] == ['s', 'kappa', 'kappa_prime', 'theta', 'x', 'y', 'z']
        assert len(rows) == 2 * 16 + 2

    def test_closed_svg(self, capsys):
        code, out = run(capsys, 'trace', '--space', 'h12', '--p', '-1', '--n', '3', '--m', '5',
                        '--samples', '32', '--format', 'svg')
        assert code == EXIT_OK
        assert 'class="puncture"' in out

    def test_uniform_json(self, capsys):
        code, out = run(capsys, 'trace', '--p', '2', '--a', '-1', '--samples', '8', '--spacing', 'uniform',
                        '--periods', '2', '--format', 'json')
        assert code == EXIT_OK
        data = json.loads(out)
        assert len(data['samples']) == 2 * 2 * 8 + 1
        assert data['m'] == 2

    @pytest.mark.parametrize('extra', [[], ['--a', '-1', '--n', '2', '--m', '3']])
    def test_needs_exactly_one_source(self, capsys, extra):
        code, _ = run(capsys, 'trace', '--p', '2', *extra)
        assert code == EXIT_USAGE


class TestScan:
    """scan subcommand."""

    def test_inadmissible_p(self, capsys):
        code, _ = run(capsys, 'scan', '--space', 'h2', '--p', '0.5')
        assert code == EXIT_USAGE

    def test_closed_form_column(self, capsys):
        code, out = run(capsys, 'scan', '--space', 'h2', '--p', '1.5', '--grid', '16')
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 16
        for row in rows:
            assert float(row['lambda_p']) == pytest.approx(float(row['lambda_closed']), rel=1e-9)
            assert row['decreasing'] == 'True'

    def test_energy_columns(self, capsys):
        code, out = run(capsys, 'scan', '--space', 'h12', '--p', '-1', '--grid', '16', '--energy', '1',
                        '--format', 'json')
        assert code == EXIT_OK
        rows = json.loads(out)
        assert all(row['energy'] > 0 for row in rows)
        assert rows[0]['energy_limit'] == pytest.approx(2 * math.sqrt(2) * math.pi)


class TestEvolve:
    """evolve subcommand."""

    def test_quadric_cloud(self, capsys, tmp_path):
        cloud = tmp_path / 'cloud.csv'
        code, out = run(capsys, 'evolve', '--space', 'h2', '--n', '2', '--m', '3', '--p-list', '2,3',
                        '--samples', '16', '--quadric-csv', str(cloud))
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert [float(row['p']) for row in rows] == [2.0, 3.0]
        assert cloud.read_text(encoding='utf-8').startswith('family,p,s,x,y,z')

    def test_inadmissible_member(self, capsys):
        code, _ = run(capsys, 'evolve', '--space', 'h2', '--n', '2', '--m', '3', '--p-list', '2,0.5')
        assert code == EXIT_USAGE


class TestVerify:
    """verify subcommand."""

    def test_default_run_passes(self, capsys):
        code, out = run(capsys, 'verify')
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert all(row['passed'] == 'True' for row in rows)

    def test_perturbed_fails(self, capsys):
        code, out = run(capsys, 'verify', '--perturb', '--no-oracle', '--format', 'json')
        assert code == EXIT_CHECK_FAILED
        reports = json.loads(out)
        assert any(not report['passed'] for report in reports)


class TestCircle:
    """circle subcommand."""

    def test_single(self, capsys):
        code, out = run(capsys, 'circle', '--space', 'h2', '--p', '2', '--format', 'json')
        assert code == EXIT_OK
        data = json.loads(out)
        assert data['radius_L3'] == pytest.approx(1.0)
        assert data['height_z'] == pytest.approx(math.sqrt(2))

    def test_family(self, capsys):
        code, out = run(capsys, 'circle', '--space', 'h12', '--p-list=-9,-5,-2,-0.5')
        assert code == EXIT_OK
        rows = list(csv.DictReader(io.StringIO(out)))
        assert len(rows) == 4
        assert all(float(row['height_z']) < 0 for row in rows)


class TestConfigCommand:
    """config subcommand."""

    def test_json_reflects_flags(self, capsys):
        code, out = run(capsys, 'config', '--nodes', '128', '--samples', '64', '--format', 'json')
        assert code == EXIT_OK
        settings = json.loads(out)
        assert settings['quadrature']['base_nodes'] == 128
        assert settings['trace']['samples'] == 64

    def test_write_then_reload(self, capsys, tmp_path):
        path = tmp_path / 'saved.yaml'
        code, out = run(capsys, 'config', '--set', 'closure.tol=1e-11', '--write', str(path))
        assert code == EXIT_OK
        saved = load_config_file(path)
        assert saved == yaml.safe_load(out)
        assert saved['closure']['tol'] == 1e-11

    def test_invalid_setting(self, capsys, tmp_path):
        path = tmp_path / 'bad.yaml'
        code, _ = run(capsys, 'config', '--nodes', '4', '--write', str(path))
        assert code == EXIT_USAGE
        assert not path.exists()


class TestSettings:
    """Config flags shared by every subcommand."""

    def test_bad_set(self, capsys):
        code, _ = run(capsys, 'roots', '--p', '2', '--a', '-1', '--set', 'quadrature.base_nodes')
        assert code == EXIT_USAGE

    def test_bad_quadrature_setting(self, capsys):
        code, _ = run(capsys, 'scan', '--p', '2', '--grid', '16', '--nodes', '4')
        assert code == EXIT_USAGE

    @pytest.mark.parametrize('argv', [
        ['roots', '--p', '2', '--a', '-1'],
        ['close', '--list-pairs', '5'],
        ['trace', '--p', '2', '--a', '-1'],
        ['scan', '--p', '2'],
        ['evolve', '--n', '2', '--m', '3', '--p-list=-2,-1', '--space', 'h12'],
        ['verify'],
        ['circle', '--p', '-1', '--space', 'h12'],
        ['config', '--format', 'json'],
    ])
    def test_parser_accepts(self, argv):
        args = build_parser().parse_args(argv)
        assert args.command == argv[0]
        assert callable(args.func)
