"""Configuration system for pelastica.

Handles loading, merging and persistence of numerical settings. Supports
JSON and YAML files, PELASTICA_* environment variables and CLI overrides,
applied in that order of increasing precedence on top of DEFAULT_CONFIG.

Usage:
    config, config_file = load_config(
        config_path='pelastica.yaml',
        overrides={'quadrature': {'base_nodes': 128}},
    )
    cfg = quadrature_config(config)

Author:
    Jake Meador <jameador13@gmail.com>
"""

import contextlib
import copy
import dataclasses
import json
import logging
import os
from pathlib import Path
from typing import Any, Mapping, Optional

import yaml

from .exceptions import ConfigError
from .quadrature import QuadratureConfig
from .verify import Thresholds

__author__ = 'Jake Meador <jameador13@gmail.com>'
__all__ = [
    'DEFAULT_CONFIG',
    'ENV_PREFIX',
    'ENV_SHORTCUTS',
    'merge_dicts',
    'find_config_file',
    'load_config_file',
    'dump_config',
    'save_config_file',
    'environment_overrides',
    'load_config',
    'parse_override_arg',
    'apply_key_path',
    'parse_set_string',
    'quadrature_config',
    'verify_thresholds',
]

logger = logging.getLogger('pelastica.config')

DEFAULT_CONFIG: dict[str, dict[str, Any]] = {
    'quadrature': {
        'base_nodes': 64,
        'max_doublings': 6,
        'rel_tol': 1e-11,
        'panel_levels': 16,
        'panel_ratio': 0.1,
    },
    'roots': {'tol': 1e-13},
    'closure': {'tol': 1e-10},
    'trace': {'samples': 256, 'segment_nodes': 16},
    'verify': {
        'quadric': 1e-9,
        'unit_speed': 1e-8,
        'conservation': 1e-8,
        'el': 1e-6,
        'momentum': 1e-6,
        'killing': 1e-9,
        'curvature': 1e-5,
        'oracle': 1e-7,
        'drift': 1e-6,
        'sqrt2_limit': 5e-3,
        'pi_limit': 5e-2,
        'energy_limit': 1e-3,
    },
    'output': {'svg_size': 1000},
    'runtime': {'workers': 1},
}

ENV_PREFIX = 'PELASTICA_'
ENV_SHORTCUTS = {
    'PELASTICA_NODES': 'quadrature.base_nodes',
    'PELASTICA_TOL': 'quadrature.rel_tol',
}


def merge_dicts(base: dict, override: dict) -> dict:
    """Recursively merge two dictionaries."""
    result = base.copy()

    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = merge_dicts(result[key], value)
        else:
            result[key] = value

    return result


def find_config_file(custom_path: Optional[str] = None) -> Optional[Path]:
    """Find config file in order: custom, CWD pelastica.{json,yaml}, package pelastica.yaml."""
    if custom_path:
        path = Path(custom_path)
        if not path.exists():
            raise ConfigError(f'Config file not found: {custom_path}')
        return path

    cwd = Path.cwd()
    if (json_config := cwd / 'pelastica.json').exists():
        return json_config

    if (yaml_config := cwd / 'pelastica.yaml').exists():
        return yaml_config

    package_dir = Path(__file__).parent
    if (package_config := package_dir / 'pelastica.yaml').exists():
        return package_config

    return None


def load_config_file(path: Path) -> dict:
    """Load config file (JSON or YAML)."""
    content = path.read_text(encoding='utf-8')

    try:
        if path.suffix.lower() == '.json':
            data = json.loads(content)
        else:
            data = yaml.safe_load(content)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f'Could not parse {path}: {e}') from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f'{path} must contain a mapping at the top level')
    return data


def dump_config(config: dict, fmt: str = 'yaml') -> str:
    """Render settings as 'yaml' or 'json' text."""
    if fmt == 'json':
        return json.dumps(config, indent=2) + '\n'
    if fmt == 'yaml':
        return yaml.safe_dump(config, default_flow_style=False, sort_keys=False)
    raise ConfigError(f'Unknown config format {fmt!r} (expected yaml or json)')


def save_config_file(path: Path, config: dict) -> None:
    """Save config file (JSON or YAML, chosen by suffix)."""
    fmt = 'json' if path.suffix.lower() == '.json' else 'yaml'
    path.write_text(dump_config(config, fmt), encoding='utf-8')


def _coerce(value: str) -> Any:
    with contextlib.suppress(json.JSONDecodeError, ValueError):
        return json.loads(value)
    return value


def environment_overrides(environ: Optional[Mapping[str, str]] = None) -> dict:
    """Overrides from PELASTICA_NODES, PELASTICA_TOL and PELASTICA_<SECTION>__<KEY>."""
    environ = os.environ if environ is None else environ
    overrides: dict = {}

    for name, raw in environ.items():
        if name in ENV_SHORTCUTS:
            key_path = ENV_SHORTCUTS[name]
        elif name.startswith(ENV_PREFIX) and '__' in name:
            section, _, key = name[len(ENV_PREFIX):].lower().partition('__')
            key_path = f'{section}.{key}'
        else:
            continue
        logger.debug(f'Environment override {name} -> {key_path}')
        apply_key_path(overrides, key_path, _coerce(raw))

    return overrides


def load_config(
    config_path: Optional[str] = None,
    overrides: Optional[dict] = None,
    environ: Optional[Mapping[str, str]] = None,
) -> tuple[dict, Optional[Path]]:
    """Load configuration: defaults < config file < environment < overrides."""
    config = copy.deepcopy(DEFAULT_CONFIG)
    config_file = find_config_file(config_path)

    if config_file:
        logger.debug(f'Loading config: {config_file}')
        config = merge_dicts(config, load_config_file(config_file))
    else:
        logger.debug('No config file found, using defaults')

    if env := environment_overrides(environ):
        config = merge_dicts(config, env)

    if overrides:
        logger.debug(f'Applying overrides: {overrides}')
        config = merge_dicts(config, overrides)

    return config, config_file


def parse_override_arg(arg: str) -> tuple[str, Any]:
    """Parse config override argument (key.path=value)."""
    if '=' not in arg:
        raise ConfigError(f'Invalid override format (expected key=value): {arg}')

    key_path, value = arg.split('=', 1)
    return key_path, _coerce(value)


def apply_key_path(config: dict, key_path: str, value: Any) -> dict:
    """Apply value to nested key path."""
    keys = key_path.split('.')
    current = config

    for key in keys[:-1]:
        if key not in current or not isinstance(current[key], dict):
            current[key] = {}
        current = current[key]

    current[keys[-1]] = value
    return config


def parse_set_string(set_string: str) -> dict[str, Any]:
    """Parse space-separated section.key=value pairs."""
    overrides: dict[str, Any] = {}

    for pair in set_string.split():
        key_path, value = parse_override_arg(pair)
        apply_key_path(overrides, key_path, value)

    return overrides


def _section_dataclass(config: dict, section: str, cls: type) -> Any:
    values = dict(config.get(section) or {})
    fields = {f.name: f for f in dataclasses.fields(cls)}
    if unknown := sorted(set(values) - set(fields)):
        raise ConfigError(f'Unknown {section} setting(s): {", ".join(unknown)}')
    try:
        return cls(**{name: fields[name].type(value) for name, value in values.items()})
    except (TypeError, ValueError) as e:
        raise ConfigError(f'Invalid {section} setting: {e}') from e


def quadrature_config(config: dict) -> QuadratureConfig:
    """Validated QuadratureConfig from the 'quadrature' section.

    Raises:
        ConfigError: On unknown keys or out-of-range values
    """
    return _section_dataclass(config, 'quadrature', QuadratureConfig)


def verify_thresholds(config: dict) -> Thresholds:
    return _section_dataclass(config, 'verify', Thresholds)
