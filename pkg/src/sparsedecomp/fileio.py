"""Reading and writing the CSV/JSON files used by the command line."""
import csv
import json
from pathlib import Path

import numpy as np


class InputError(ValueError):
    """A malformed input file; the message names the file and location."""


def _load_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None


def _numbers(values, where):
    out = []
    for i, x in enumerate(values):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise InputError(f"{where}[{i}]: expected a number, got {x!r}")
        out.append(float(x))
    arr = np.array(out, dtype=np.float64)
    if not np.all(np.isfinite(arr)):
        raise InputError(f"{where}: entries must be finite")
    return arr


def read_vector(path):
    """A JSON array of numbers, or an object holding one under ``"v"``."""
    data = _load_json(path)
    if isinstance(data, dict):
        if "v" not in data:
            raise InputError(f"{path}: object has no field 'v'")
        data = data["v"]
        where = f"{path}: field 'v'"
    else:
        where = str(path)
    if not isinstance(data, list) or not data:
        raise InputError(f"{where}: expected a non-empty JSON array of numbers")
    return _numbers(data, where)


def read_matrix(path):
    """CSV (one row per line, no header) or JSON ``{"rows", "cols", "data"}``."""
    path = Path(path)
    if path.suffix.lower() == ".json":
        return _matrix_from_json(path)
    rows = []
    try:
        with open(path, newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or all(not f.strip() for f in row):
                    continue
                vals = []
                for col, field in enumerate(row, start=1):
                    try:
                        vals.append(float(field))
                    except ValueError:
                        raise InputError(
                            f"{path}: line {lineno}, field {col}: cannot parse {field.strip()!r}"
                        ) from None
                if rows and len(vals) != len(rows[0]):
                    raise InputError(
                        f"{path}: line {lineno}: expected {len(rows[0])} fields, got {len(vals)}")
                rows.append(vals)
    except OSError as exc:
        raise InputError(f"{path}: {exc.strerror}") from None
    if not rows:
        raise InputError(f"{path}: no matrix rows found")
    A = np.array(rows, dtype=np.float64)
    if not np.all(np.isfinite(A)):
        raise InputError(f"{path}: entries must be finite")
    return A


def _matrix_from_json(path):
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: expected an object with rows, cols, data")
    for key in ("rows", "cols", "data"):
        if key not in data:
            raise InputError(f"{path}: missing field {key!r}")
    n, p = data["rows"], data["cols"]
    if not (isinstance(n, int) and isinstance(p, int) and n >= 1 and p >= 1):
        raise InputError(f"{path}: fields 'rows' and 'cols' must be positive integers")
    if not isinstance(data["data"], list):
        raise InputError(f"{path}: field 'data' must be an array")
    flat = _numbers(data["data"], f"{path}: field 'data'")
    if flat.size != n * p:
        raise InputError(f"{path}: field 'data' has {flat.size} entries, expected {n * p}")
    return flat.reshape(n, p)


def write_matrix_csv(path, A):
    np.savetxt(path, np.asarray(A), delimiter=",", fmt="%.17g")


def dumps(obj):
    return json.dumps(obj, indent=2, sort_keys=True)


def write_json(path, obj):
    Path(path).write_text(dumps(obj) + "\n")
