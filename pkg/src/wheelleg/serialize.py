"""Deterministic text serialization helpers.

All file outputs (CSV, JSON) go through these so that identical inputs
produce byte-identical files regardless of platform or worker count.
"""

import json

import numpy as np


def fmt(x):
    """Shortest round-trip decimal representation of a scalar."""
    return repr(float(x))


def csv_line(values):
    return ",".join(fmt(v) for v in values)


def csv_text(header, rows):
    """Build a CSV document; rows is an iterable of float sequences."""
    lines = [",".join(header)]
    lines.extend(csv_line(row) for row in rows)
    return "\n".join(lines) + "\n"


def _pyify(obj):
    if isinstance(obj, dict):
        return {str(k): _pyify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_pyify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_pyify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


def json_text(payload):
    """Deterministic JSON: sorted keys, two-space indent, trailing newline."""
    return json.dumps(_pyify(payload), sort_keys=True, indent=2) + "\n"
