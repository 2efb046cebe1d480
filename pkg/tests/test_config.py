"""Tests for configuration loading, merging and overrides."""

import json
import tempfile
from pathlib import Path

import pytest
import yaml

from pelastica import config
from pelastica.exceptions import ConfigError, UsageError
from pelastica.quadrature import QuadratureConfig
from pelastica.verify import Thresholds


# ============================================================================
# Fixtures
# ============================================================================

@pytest.fixture
def temp_config():
    """Create temporary YAML config with quadrature and closure sections."""
    with tempfile.TemporaryDirectory() as tmpdir:
        config_path = Path(tmpdir) / 'pelastica.yaml'
        data = {
            'quadrature': {'base_nodes': 32, 'rel_tol': 1e-10},
            'closure': {'tol': 1e-9},
        }
        with open(config_path, 'w', encoding='utf-8') as f:
            yaml.dump(data, f)
        yield config_path


# ============================================================================
# Loading
# ============================================================================

def test_defaults_without_file(monkeypatch, tmp_path):
    """Package defaults apply when no file or environment is present."""
    monkeypatch.chdir(tmp_path)
    settings, path = config.load_config(environ={})
    assert settings['quadrature']['base_nodes'] == 64
    assert settings['trace']['samples'] == 256
    assert path is None or path.name == 'pelastica.yaml'


def test_packaged_yaml_matches_defaults():
    """The shipped pelastica.yaml restates DEFAULT_CONFIG."""
    packaged = Path(config.__file__).parent / 'pelastica.yaml'
    assert config.load_config_file(packaged) == config.DEFAULT_CONFIG


def test_file_overrides_defaults(temp_config):
    settings, path = config.load_config(str(temp_config), environ={})
    assert path == temp_config
    assert settings['quadrature']['base_nodes'] == 32
    assert settings['quadrature']['max_doublings'] == 6
    assert settings['closure']['tol'] == 1e-9


def test_json_file(tmp_path):
    path = tmp_path / 'settings.json'
    path.write_text(json.dumps({'trace': {'samples': 128}}), encoding='utf-8')
    settings, _ = config.load_config(str(path), environ={})
    assert settings['trace']['samples'] == 128


def test_missing_file():
    with pytest.raises(ConfigError):
        config.load_config('/nonexistent/pelastica.yaml')


def test_unparseable_file(tmp_path):
    path = tmp_path / 'broken.yaml'
    path.write_text('quadrature: [1, 2\n', encoding='utf-8')
    with pytest.raises(ConfigError):
        config.load_config_file(path)


def test_non_mapping_file(tmp_path):
    path = tmp_path / 'list.yaml'
    path.write_text('- 1\n- 2\n', encoding='utf-8')
    with pytest.raises(ConfigError):
        config.load_config_file(path)


def test_save_and_reload(tmp_path):
    path = tmp_path / 'saved.yaml'
    config.save_config_file(path, {'roots': {'tol': 1e-12}})
    assert config.load_config_file(path) == {'roots': {'tol': 1e-12}}


def test_save_json_by_suffix(tmp_path):
    path = tmp_path / 'saved.json'
    config.save_config_file(path, config.DEFAULT_CONFIG)
    assert json.loads(path.read_text(encoding='utf-8')) == config.DEFAULT_CONFIG


def test_dump_config_unknown_format():
    with pytest.raises(ConfigError, match='toml'):
        config.dump_config({'roots': {'tol': 1e-12}}, 'toml')


# ============================================================================
# Precedence
# ============================================================================

def test_environment_shortcuts():
    overrides = config.environment_overrides({'PELASTICA_NODES': '128', 'PELASTICA_TOL': '1e-12', 'HOME': '/root'})
    assert overrides == {'quadrature': {'base_nodes': 128, 'rel_tol': 1e-12}}


def test_environment_sections():
    overrides = config.environment_overrides({'PELASTICA_TRACE__SAMPLES': '64'})
    assert overrides == {'trace': {'samples': 64}}


def test_precedence(temp_config):
    """overrides > environment > file > defaults."""
    settings, _ = config.load_config(
        str(temp_config),
        overrides={'closure': {'tol': 1e-11}},
        environ={'PELASTICA_NODES': '48', 'PELASTICA_CLOSURE__TOL': '1e-8'},
    )
    assert settings['quadrature']['base_nodes'] == 48
    assert settings['quadrature']['rel_tol'] == 1e-10
    assert settings['closure']['tol'] == 1e-11


def test_defaults_not_mutated():
    config.load_config(overrides={'quadrature': {'base_nodes': 999}}, environ={})
    assert config.DEFAULT_CONFIG['quadrature']['base_nodes'] == 64


def test_merge_dicts():
    merged = config.merge_dicts({'a': {'x': 1, 'y': 2}, 'b': 1}, {'a': {'y': 3}, 'c': 4})
    assert merged == {'a': {'x': 1, 'y': 3}, 'b': 1, 'c': 4}


# ============================================================================
# --set parsing
# ============================================================================

def test_parse_set_string():
    overrides = config.parse_set_string('quadrature.base_nodes=128 closure.tol=1e-11 output.svg_size=800')
    assert overrides == {
        'quadrature': {'base_nodes': 128},
        'closure': {'tol': 1e-11},
        'output': {'svg_size': 800},
    }


def test_parse_override_needs_equals():
    with pytest.raises(ConfigError):
        config.parse_override_arg('quadrature.base_nodes')


def test_config_error_is_usage_error():
    assert issubclass(ConfigError, UsageError)


# ============================================================================
# Typed sections
# ============================================================================

def test_quadrature_config():
    settings, _ = config.load_config(overrides={'quadrature': {'base_nodes': 32}}, environ={})
    cfg = config.quadrature_config(settings)
    assert cfg == QuadratureConfig(base_nodes=32)


def test_quadrature_config_coerces_types():
    cfg = config.quadrature_config({'quadrature': {'base_nodes': 32.0, 'rel_tol': '1e-9'}})
    assert cfg.base_nodes == 32
    assert cfg.rel_tol == 1e-9


def test_quadrature_config_unknown_key():
    with pytest.raises(ConfigError, match='nodes_per_panel'):
        config.quadrature_config({'quadrature': {'nodes_per_panel': 32}})


def test_quadrature_config_out_of_range():
    with pytest.raises(ConfigError):
        config.quadrature_config({'quadrature': {'base_nodes': 4}})


def test_verify_thresholds():
    thresholds = config.verify_thresholds({'verify': {'el': 1e-5}})
    assert thresholds.el == 1e-5
    assert thresholds.quadric == Thresholds().quadric
