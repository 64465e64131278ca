"""JSON file formats.

Marginals file::

    {"pairs": {"13": [[p_pp, p_pm], [p_mp, p_mm]], "14": ..., "23": ..., "24": ...},
     "tolerance": 1e-10}

Row index is the first spin of the pair (+ then -), column index the second.
Three-spin files use the keys "12", "13", "23" instead.

Witness file::

    {"order": "lexicographic +1-first", "p": [16 numbers]}

(8 numbers for a three-spin witness). Floats are written with ``repr`` so
they read back bit-for-bit.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .moments import PairMarginals, check_table

ORDER = "lexicographic +1-first"
DEFAULT_TOLERANCE = 1e-10
FOUR_SPIN_KEYS = ("13", "14", "23", "24")
THREE_SPIN_KEYS = ("12", "13", "23")


class FileFormatError(ValidationError):
    """Malformed input file; the message names the file and line."""


def _line_of(text, needle):
    for n, line in enumerate(text.splitlines(), start=1):
        if needle in line:
            return n
    return 1


def _load(path):
    text = Path(path).read_text()
    try:
        return text, json.loads(text)
    except json.JSONDecodeError as exc:
        raise FileFormatError(f"{path}:{exc.lineno}:{exc.colno}: invalid JSON: {exc.msg}") from None


def read_tables(path, keys, tolerance=None):
    """Parse a pair-table file. Returns ``({(i, j): table}, tolerance)``.

    Every table is checked for shape, non-negativity and normalization against
    the effective tolerance (``tolerance`` argument, else the file's declared
    value, else :data:`DEFAULT_TOLERANCE`).
    """
    text, data = _load(path)
    if not isinstance(data, dict) or not isinstance(data.get("pairs"), dict):
        raise FileFormatError(f"{path}:1: expected an object with a \"pairs\" object")
    declared = data.get("tolerance", DEFAULT_TOLERANCE)
    if not isinstance(declared, (int, float)) or not declared > 0:
        line = _line_of(text, '"tolerance"')
        raise FileFormatError(f"{path}:{line}: tolerance must be a positive number")
    tol = float(declared if tolerance is None else tolerance)

    pairs = data["pairs"]
    extra = sorted(set(pairs) - set(keys))
    if extra:
        line = _line_of(text, f'"{extra[0]}"')
        raise FileFormatError(f"{path}:{line}: unexpected table {extra[0]!r}")
    tables = {}
    for key in keys:
        line = _line_of(text, f'"{key}"')
        if key not in pairs:
            raise FileFormatError(f"{path}:1: missing table {key!r}")
        try:
            t = np.array(pairs[key], dtype=float)
        except (TypeError, ValueError):
            raise FileFormatError(f"{path}:{line}: table {key!r} must contain numbers") from None
        if t.shape != (2, 2):
            raise FileFormatError(f"{path}:{line}: table {key!r} must be 2x2, got shape {t.shape}")
        try:
            check_table(t, key, tol)
        except ValidationError as exc:
            raise FileFormatError(f"{path}:{line}: {exc}") from None
        tables[(int(key[0]), int(key[1]))] = t
    return tables, tol


def read_marginals(path, tolerance=None):
    """Four-spin marginals file -> ``(PairMarginals, tolerance)``."""
    tables, tol = read_tables(path, FOUR_SPIN_KEYS, tolerance)
    return PairMarginals(*(tables[(int(k[0]), int(k[1]))] for k in FOUR_SPIN_KEYS)), tol


def marginals_document(pm: PairMarginals, tolerance=DEFAULT_TOLERANCE) -> dict:
    return {"pairs": {k: pm.table(int(k[0]), int(k[1])).tolist() for k in FOUR_SPIN_KEYS},
            "tolerance": tolerance}


def tables_document(tables: dict, tolerance=DEFAULT_TOLERANCE) -> dict:
    return {"pairs": {f"{i}{j}": np.asarray(t, float).tolist() for (i, j), t in sorted(tables.items())},
            "tolerance": tolerance}


def witness_document(p, **extra) -> dict:
    doc = {"order": ORDER, "p": [float(x) for x in p]}
    doc.update(extra)
    return doc


def read_witness(path) -> np.ndarray:
    text, data = _load(path)
    if not isinstance(data, dict) or data.get("order") != ORDER:
        line = _line_of(text, '"order"')
        raise FileFormatError(f"{path}:{line}: order must be {ORDER!r}")
    p = np.array(data.get("p"), dtype=float)
    if p.shape not in ((16,), (8,)):
        line = _line_of(text, '"p"')
        raise FileFormatError(f"{path}:{line}: expected 16 or 8 probabilities")
    return p


def dumps(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


def write_json(path, doc):
    Path(path).write_text(dumps(doc))
