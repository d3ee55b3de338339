"""File formats and deterministic JSON output.

Matrix JSON::

    {"N": 4, "n": 2, "entries": [[{"re": 1.0, "im": 0.0}, ...], ...]}

Matrix CSV: one row per line, entries written as ``a+bi`` (``3``, ``-i``,
``0.5-2e-3i`` are all accepted).
"""

import csv
import json
import math
from pathlib import Path

import numpy as np

from .definetti import ExchangeableModel
from .errors import DomainError
from .validation import check_matrix

SIG_DIGITS = 12


def parse_complex(text):
    s = text.strip().replace(" ", "")
    if not s:
        raise DomainError("empty matrix entry")
    try:
        return complex(s.replace("i", "j").replace("I", "j"))
    except ValueError as exc:
        raise DomainError(f"cannot parse complex entry {text!r}") from exc


def format_complex(z):
    z = complex(z)
    re, im = _round(z.real), _round(z.imag)
    sign = "-" if math.copysign(1.0, im) < 0 else "+"
    return f"{re!r}{sign}{abs(im)!r}i"


def matrix_from_dict(data):
    try:
        N, n, rows = int(data["N"]), int(data["n"]), data["entries"]
        Z = np.array([[complex(float(e["re"]), float(e.get("im", 0.0))) for e in row] for row in rows])
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed matrix JSON: {exc}") from exc
    if Z.shape != (N, n):
        raise DomainError(f"declared shape {N}x{n} does not match entries {Z.shape}")
    return check_matrix(Z)


def matrix_to_dict(Z):
    Z = np.asarray(Z, dtype=np.complex128)
    return {
        "N": Z.shape[0],
        "n": Z.shape[1],
        "entries": [[{"re": _round(z.real), "im": _round(z.imag)} for z in row] for row in Z],
    }


def read_matrix(path):
    """Load a matrix from a ``.json`` or ``.csv`` file (chosen by extension)."""
    path = Path(path)
    text = path.read_text()
    if path.suffix.lower() == ".csv":
        rows = [r for r in csv.reader(text.splitlines()) if any(c.strip() for c in r)]
        if not rows or len({len(r) for r in rows}) != 1:
            raise DomainError("CSV matrix rows must be nonempty and of equal length")
        return check_matrix([[parse_complex(c) for c in r] for r in rows])
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON in {path}: {exc}") from exc
    return matrix_from_dict(data)


def write_matrix(path, Z):
    path = Path(path)
    if path.suffix.lower() == ".csv":
        lines = [",".join(format_complex(z) for z in row) for row in np.asarray(Z)]
        path.write_text("\n".join(lines) + "\n")
    else:
        path.write_text(dumps(matrix_to_dict(Z)) + "\n")


def read_model(path):
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise DomainError(f"invalid JSON in {path}: {exc}") from exc
    return ExchangeableModel.from_dict(data)


def _round(x):
    x = float(x)
    if not math.isfinite(x):
        return None
    return float(f"{x:.{SIG_DIGITS}g}")


def to_jsonable(obj):
    """Convert numbers, arrays and nested containers for :func:`json.dumps`.

    Floats are rounded to 12 significant digits and complex numbers become
    ``{"re": ..., "im": ...}``.
    """
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        return _round(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": _round(obj.real), "im": _round(obj.imag)}
    return obj


def dumps(obj):
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=False)
