"""Text formats: edge lists, family configs, function files, CSV and JSON reports."""

from __future__ import annotations

import csv
import json
import math
import sys
from pathlib import Path
from typing import Iterable, TextIO

import numpy as np

from .errors import ConstructionError, ParseError
from .graph import FamilySpec, FiniteGraph

CONFIG_KEYS = ("family", "alpha", "beta", "epsilon", "start", "shift", "table", "path")


def _tokens(line: str):
    """Split on whitespace, keeping 1-based column numbers; drops ``#`` comments."""
    body = line.split("#", 1)[0]
    out = []
    i = 0
    while i < len(body):
        if body[i].isspace():
            i += 1
            continue
        j = i
        while j < len(body) and not body[j].isspace():
            j += 1
        out.append((body[i:j], i + 1))
        i = j
    return out


def _vertex(tok, lineno):
    text, col = tok
    try:
        v = int(text)
    except ValueError:
        raise ParseError(f"expected a vertex id, got {text!r}", lineno, col) from None
    if v < 0:
        raise ParseError(f"vertex ids must be non-negative, got {v}", lineno, col)
    return v


def _positive(tok, lineno):
    text, col = tok
    try:
        x = float(text)
    except ValueError:
        raise ParseError(f"expected a number, got {text!r}", lineno, col) from None
    if not (x > 0 and math.isfinite(x)):
        raise ParseError(f"expected a positive finite number, got {text}", lineno, col)
    return x


def parse_edge_list(text: str) -> FiniteGraph:
    """Lines ``u v c`` (edges) and ``w u omega`` (vertex weights)."""
    edges = {}
    seen = {}
    weights = []
    verts = set()
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = _tokens(line)
        if not toks:
            continue
        if len(toks) != 3:
            col = toks[3][1] if len(toks) > 3 else len(line.rstrip()) + 1
            raise ParseError(f"expected three fields, got {len(toks)}", lineno, col)
        if toks[0][0] == "w":
            weights.append((_vertex(toks[1], lineno), _positive(toks[2], lineno), lineno, toks[1][1]))
            continue
        u, v = _vertex(toks[0], lineno), _vertex(toks[1], lineno)
        c = _positive(toks[2], lineno)
        if u == v:
            raise ParseError(f"self-loop at vertex {u}", lineno, toks[0][1])
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge {{{u},{v}}} (first on line {seen[key]})", lineno, toks[0][1])
        seen[key] = lineno
        edges[key] = c
        verts.update(key)
    omega = {}
    for u, w, lineno, col in weights:
        if u not in verts:
            raise ParseError(f"weight given for unknown vertex {u}", lineno, col)
        if u in omega:
            raise ParseError(f"second weight for vertex {u}", lineno, col)
        omega[u] = w
    try:
        return FiniteGraph(verts, edges, omega)
    except ConstructionError as exc:  # pragma: no cover - caught above
        raise ParseError(str(exc), 0, 0) from exc


def read_edge_list(path) -> FiniteGraph:
    return parse_edge_list(Path(path).read_text(encoding="utf-8"))


def _parse_table(value: str, lineno: int, col: int) -> tuple:
    rows = []
    offset = col
    for chunk in value.split(";"):
        first = offset + len(chunk) - len(chunk.lstrip())
        parts = chunk.split()
        if len(parts) != 2:
            raise ParseError("table rows are 'omega c' pairs separated by ';'", lineno, first)
        rows.append(tuple(_positive((p, first), lineno) for p in parts))
        offset += len(chunk) + 1
    return tuple(rows)


def parse_family_config(text: str) -> FamilySpec:
    """``key = value`` lines; keys are listed in :data:`CONFIG_KEYS`."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        if "=" not in body:
            raise ParseError("expected 'key = value'", lineno, len(body) - len(body.lstrip()) + 1)
        key, _, value = body.partition("=")
        kcol = len(key) - len(key.lstrip()) + 1
        vcol = len(key) + 2 + len(value) - len(value.lstrip())
        key, value = key.strip(), value.strip()
        if key not in CONFIG_KEYS:
            raise ParseError(f"unknown key {key!r}", lineno, kcol)
        if key in values:
            raise ParseError(f"key {key!r} given twice", lineno, kcol)
        if not value:
            raise ParseError(f"missing value for {key!r}", lineno, vcol)
        try:
            if key in ("alpha", "beta", "epsilon", "shift"):
                x = float(value)
                if not math.isfinite(x):
                    raise ValueError
                values[key] = x
            elif key == "start":
                values[key] = int(value)
            elif key == "table":
                values[key] = _parse_table(value, lineno, vcol)
            else:
                values[key] = value
        except ParseError:
            raise
        except ValueError:
            raise ParseError(f"bad value {value!r} for {key!r}", lineno, vcol) from None
    if "family" not in values:
        raise ParseError("missing 'family' key", max(1, len(text.splitlines())), 1)
    kind = values.pop("family")
    try:
        return FamilySpec(kind=kind, **values)
    except ValueError as exc:
        raise ParseError(str(exc), 1, 1) from exc


def parse_config(text: str):
    """Family config when any line has ``=``, otherwise an edge list."""
    for line in text.splitlines():
        body = line.split("#", 1)[0]
        if body.strip():
            return parse_family_config(text) if "=" in body else parse_edge_list(text)
    raise ParseError("empty config", 1, 1)


def parse_function(text: str) -> dict[int, float]:
    """Lines ``vertex value``."""
    f = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        toks = _tokens(line)
        if not toks:
            continue
        if len(toks) != 2:
            raise ParseError(f"expected 'vertex value', got {len(toks)} fields", lineno, toks[0][1])
        v = _vertex(toks[0], lineno)
        try:
            x = float(toks[1][0])
        except ValueError:
            raise ParseError(f"expected a number, got {toks[1][0]!r}", lineno, toks[1][1]) from None
        if v in f:
            raise ParseError(f"vertex {v} given twice", lineno, toks[0][1])
        f[v] = x
    return f


def format_function(f) -> str:
    return "".join(f"{x} {fmt_float(f[x])}\n" for x in sorted(f))


# ---------------------------------------------------------------------------
# reports


def fmt_float(x) -> str:
    """17 significant digits, so CSV output round-trips and is byte-stable."""
    return format(float(x), ".17g")


def _cell(x):
    if isinstance(x, (float, np.floating)):
        return fmt_float(x)
    return x


def write_csv(out: TextIO, header: Iterable[str], rows: Iterable[Iterable]):
    w = csv.writer(out, lineterminator="\n")
    w.writerow(list(header))
    for row in rows:
        w.writerow([_cell(x) for x in row])


def to_jsonable(obj):
    """Plain JSON types; non-finite floats become the strings ``inf``, ``-inf``, ``nan``."""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else str(x)
    return obj


def dump_json(obj) -> str:
    return json.dumps(to_jsonable(obj), indent=2, sort_keys=True) + "\n"


def open_output(path):
    """``None`` or ``-`` selects standard output."""
    if path in (None, "-"):
        return _Stdout()
    return open(path, "w", encoding="utf-8", newline="")


class _Stdout:
    def __enter__(self):
        return sys.stdout

    def __exit__(self, *exc):
        sys.stdout.flush()
        return False
