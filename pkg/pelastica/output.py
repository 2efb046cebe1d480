"""CSV, JSON and SVG emitters.

Floats are written with repr(), which is locale-independent and round-trips
exactly, so identical runs produce byte-identical files. Every file is
written to a temporary sibling first and moved into place with os.replace.

Usage:
    from pelastica.output import render_svg, write_text, write_trace_csv

    write_trace_csv(curve, Path('curve.csv'))
    write_text(Path('curve.svg'), render_svg([curve]))

Author:
    Jake Meador <jameador13@gmail.com>
"""

import contextlib
import csv
import dataclasses
import io
import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence

import numpy as np

from .curve import EvolutionMember, Trace
from .lorentz import poincare_project, punctured_project

__author__ = 'Jake Meador <jameador13@gmail.com>'
__all__ = [
    'TRACE_COLUMNS',
    'QUADRIC_COLUMNS',
    'SVG_SIZE',
    'format_float',
    'write_text',
    'rows_to_csv',
    'trace_to_csv',
    'write_trace_csv',
    'read_trace_csv',
    'to_jsonable',
    'to_json',
    'render_svg',
    'quadric_rows',
    'write_quadric_csv',
]

logger = logging.getLogger('pelastica.output')

TRACE_COLUMNS = ('s', 'kappa', 'kappa_prime', 'theta', 'x', 'y', 'z')
QUADRIC_COLUMNS = ('family', 'p', 's', 'x', 'y', 'z')
SVG_SIZE = 1000
_DISK_STROKE = 1
_PALETTE = ('#1f4e79', '#b03a2e', '#1e8449', '#7d3c98', '#b9770e', '#2e4053')


def format_float(value: float) -> str:
    """Shortest decimal string that reads back to the same double."""
    return repr(float(value))


def write_text(path: Path, content: str) -> Path:
    """Write content atomically: temporary file in the same directory, then os.replace."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    temp_fd, temp_path = tempfile.mkstemp(dir=path.parent, prefix=f'.{path.name}.', suffix='.tmp')
    try:
        with os.fdopen(temp_fd, 'w', encoding='utf-8', newline='') as handle:
            handle.write(content)
        os.replace(temp_path, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(temp_path)
        raise
    logger.debug(f'Wrote {path}')
    return path


# ============================================================================
# CSV
# ============================================================================

def _cell(value: Any) -> str:
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    if value is None:
        return ''
    return str(value)


def rows_to_csv(header: Sequence[str], rows: Iterable[Sequence[Any]]) -> str:
    """Render a header row and data rows as CSV with '\\n' line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator='\n')
    writer.writerow(header)
    for row in rows:
        writer.writerow([_cell(v) for v in row])
    return buffer.getvalue()


def trace_to_csv(curve: Trace) -> str:
    rows = zip(curve.s, curve.kappa, curve.kappa_prime, curve.theta,
               curve.gamma[:, 0], curve.gamma[:, 1], curve.gamma[:, 2])
    return rows_to_csv(TRACE_COLUMNS, rows)


def write_trace_csv(curve: Trace, path: Path) -> Path:
    return write_text(path, trace_to_csv(curve))


def read_trace_csv(path: Path) -> dict[str, np.ndarray]:
    """Read a trace CSV back into one array per column."""
    with open(path, encoding='utf-8', newline='') as handle:
        reader = csv.reader(handle)
        header = next(reader)
        values = np.array([[float(v) for v in row] for row in reader])
    return {name: values[:, i] for i, name in enumerate(header)}


def quadric_rows(members: Sequence[EvolutionMember], family: str) -> list[tuple]:
    rows = []
    for member in members:
        if member.trace is None:
            continue
        curve = member.trace
        for s, (x, y, z) in zip(curve.s, curve.gamma):
            rows.append((family, member.p, s, x, y, z))
    return rows


def write_quadric_csv(members: Sequence[EvolutionMember], family: str, path: Path) -> Path:
    """Point cloud of every traced family member on its quadric, for external 3D plotting."""
    return write_text(path, rows_to_csv(QUADRIC_COLUMNS, quadric_rows(members, family)))


# ============================================================================
# JSON
# ============================================================================

def to_jsonable(obj: Any) -> Any:
    """Convert dataclasses, numpy values and containers to plain JSON types."""
    if hasattr(obj, 'to_dict'):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, np.generic):
        return obj.item()
    return obj


def to_json(obj: Any) -> str:
    return json.dumps(to_jsonable(obj), indent=2) + '\n'


# ============================================================================
# SVG
# ============================================================================

def _disk_points(curve: Trace) -> np.ndarray:
    if curve.space.epsilon:
        return punctured_project(curve.gamma)
    return poincare_project(curve.gamma)


def _polyline(points: np.ndarray, center: float, radius: float, color: str) -> str:
    coords = ' '.join(f'{center + radius * u:.4f},{center - radius * v:.4f}' for u, v in points)
    return f'  <polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>'


def render_svg(curves: Sequence[Trace], size: int = SVG_SIZE, title: Optional[str] = None) -> str:
    """Draw curves in the disk model of their space form.

    The unit circle is inscribed in a size x size viewport. Hyperbolic plots
    mark the pole at the centre; de Sitter plots mark the puncture.
    """
    if not curves:
        raise ValueError('render_svg needs at least one curve')
    space = curves[0].space
    if any(c.space != space for c in curves):
        raise ValueError('all curves in one plot must share a space form')

    center = size / 2
    radius = size / 2 - _DISK_STROKE
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{size}" height="{size}" '
        f'viewBox="0 0 {size} {size}">',
    ]
    if title:
        lines.append(f'  <title>{title}</title>')
    lines.append(f'  <rect x="0" y="0" width="{size}" height="{size}" fill="white"/>')
    lines.append(f'  <circle class="boundary" cx="{center}" cy="{center}" r="{radius}" fill="none" stroke="black" '
                 f'stroke-width="{_DISK_STROKE}"/>')
    if space.epsilon:
        lines.append(f'  <circle class="puncture" cx="{center}" cy="{center}" r="4" fill="white" stroke="black"/>')
    else:
        lines.append(f'  <circle class="pole" cx="{center}" cy="{center}" r="3" fill="black"/>')

    for i, curve in enumerate(curves):
        lines.append(_polyline(_disk_points(curve), center, radius, _PALETTE[i % len(_PALETTE)]))
    lines.append('</svg>')
    return '\n'.join(lines) + '\n'

