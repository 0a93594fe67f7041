"""Machine-readable report records.

Every CLI subcommand emits line-delimited JSON with a stable field set:
keys are sorted, tuples become arrays, exact rationals become "p/q"
strings, and numpy scalars are unwrapped to plain Python numbers.  The
same inputs (and seeds) therefore produce byte-identical output lines.
Wall-clock fields are stripped by default for exactly that reason; the
CLI exposes --timing for humans who want them back.
"""

from __future__ import annotations

import dataclasses
import json
from fractions import Fraction

import numpy as np


def to_jsonable(obj):
    """Recursively convert report objects to JSON-encodable structures."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        return obj
    if isinstance(obj, Fraction):
        return f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, complex):
        return {"re": obj.real, "im": obj.imag}
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: to_jsonable(getattr(obj, f.name))
                for f in dataclasses.fields(obj)}
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        seq = sorted(obj) if isinstance(obj, (set, frozenset)) else obj
        return [to_jsonable(v) for v in seq]
    raise TypeError(f"cannot serialize {type(obj).__name__} into a record")


def record_line(kind: str, payload, drop: tuple = ()) -> str:
    """One report as a single JSON line.

    `payload` is a dataclass or a dict; `drop` removes volatile fields
    (recursively), which keeps records byte-identical across reruns.
    """
    doc = to_jsonable(payload)
    if not isinstance(doc, dict):
        raise TypeError("record payload must convert to an object")
    if drop:
        doc = _strip(doc, set(drop))
    doc["record"] = kind
    return json.dumps(doc, sort_keys=True, allow_nan=True)


def _strip(doc, names: set):
    if isinstance(doc, dict):
        return {k: _strip(v, names) for k, v in doc.items()
                if k not in names}
    if isinstance(doc, list):
        return [_strip(v, names) for v in doc]
    return doc


def write_records(lines, out_path=None) -> None:
    """Write record lines to a file, or stdout when no path is given."""
    text = "".join(line + "\n" for line in lines)
    if out_path is None:
        import sys
        sys.stdout.write(text)
    else:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
