"""Reading and writing point sets in plain text interchange formats.

Supported formats: XYZ (whitespace separated), CSV (optional header row,
auto-detected), and ASCII PLY (3-D only; binary PLY is rejected).  Output is
deterministic text with 17 significant digits, so write/read round-trips are
exact for float64.
"""

from __future__ import annotations

import os

import numpy as np

from .core import PointSet
from .errors import (
    IoError,
    MixedDimensions,
    ParseError,
    UnsupportedDimension,
    UnsupportedFormat,
)

XYZ = "xyz"
CSV = "csv"
PLY = "ply"

_EXTENSIONS = {".xyz": XYZ, ".txt": XYZ, ".csv": CSV, ".ply": PLY}


def infer_format(path: str) -> str:
    ext = os.path.splitext(path)[1].lower()
    try:
        return _EXTENSIONS[ext]
    except KeyError:
        raise UnsupportedFormat(f"cannot infer format from extension {ext!r}") from None


def _parse_float(token: str, lineno: int) -> float:
    try:
        return float(token)
    except ValueError:
        raise ParseError(f"not a number: {token!r}", line=lineno) from None


def _rows_to_points(rows: list[tuple[int, list[float]]]) -> PointSet:
    if not rows:
        raise ParseError("file contains no points")
    dim = len(rows[0][1])
    for lineno, row in rows:
        if len(row) != dim:
            raise MixedDimensions(
                f"expected {dim} coordinates, got {len(row)}", line=lineno
            )
    return PointSet(np.array([r for _, r in rows], dtype=np.float64))


def _read_xyz(lines: list[str]) -> PointSet:
    rows = []
    for lineno, line in enumerate(lines, start=1):
        body = line.split("#", 1)[0].strip()
        if not body:
            continue
        rows.append((lineno, [_parse_float(t, lineno) for t in body.split()]))
    return _rows_to_points(rows)


def _read_csv(lines: list[str]) -> PointSet:
    numbered = [(i, line.strip()) for i, line in enumerate(lines, start=1) if line.strip()]
    rows = []
    for pos, (lineno, body) in enumerate(numbered):
        fields = [f.strip() for f in body.split(",")]
        if pos == 0:
            # first row is a header iff any field fails numeric parse
            try:
                rows.append((lineno, [float(f) for f in fields]))
            except ValueError:
                pass
            continue
        rows.append((lineno, [_parse_float(f, lineno) for f in fields]))
    return _rows_to_points(rows)


def _read_ply(lines: list[str]) -> PointSet:
    if not lines or lines[0].strip() != "ply":
        raise ParseError("missing 'ply' magic line", line=1)
    elements: list[tuple[str, int, list[str]]] = []
    lineno = 1
    fmt_seen = False
    for lineno, line in enumerate(lines[1:], start=2):
        tokens = line.split()
        if not tokens:
            continue
        if tokens[0] == "format":
            if tokens[1] != "ascii":
                raise UnsupportedFormat(f"binary PLY not supported ({tokens[1]})")
            fmt_seen = True
        elif tokens[0] == "element":
            elements.append((tokens[1], int(tokens[2]), []))
        elif tokens[0] == "property":
            if not elements:
                raise ParseError("property before any element", line=lineno)
            elements[-1][2].append(tokens[-1])
        elif tokens[0] == "end_header":
            break
        elif tokens[0] == "comment":
            continue
    else:
        raise ParseError("missing end_header")
    if not fmt_seen:
        raise ParseError("missing format line")

    body = lines[lineno:]
    cursor = 0
    pts = None
    for name, count, props in elements:
        if name == "vertex":
            try:
                cols = [props.index(axis) for axis in ("x", "y", "z")]
            except ValueError:
                raise ParseError("vertex element lacks x/y/z properties") from None
            rows = []
            for i in range(count):
                ln = lineno + cursor + i + 1
                if cursor + i >= len(body):
                    raise ParseError("unexpected end of file", line=ln)
                tokens = body[cursor + i].split()
                if len(tokens) < len(props):
                    raise ParseError(
                        f"expected {len(props)} fields, got {len(tokens)}", line=ln
                    )
                rows.append((ln, [_parse_float(tokens[c], ln) for c in cols]))
            pts = _rows_to_points(rows)
        cursor += count
    if pts is None:
        raise ParseError("no vertex element found")
    return pts


def read_points(path: str, fmt: str | None = None) -> PointSet:
    """Read a point set from a file, inferring the format from its extension."""
    fmt = fmt or infer_format(path)
    try:
        with open(path, "r", encoding="ascii") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise IoError(str(exc)) from exc
    if fmt == XYZ:
        return _read_xyz(lines)
    if fmt == CSV:
        return _read_csv(lines)
    if fmt == PLY:
        return _read_ply(lines)
    raise UnsupportedFormat(f"unknown format {fmt!r}")


def _fmt_row(row, sep: str) -> str:
    return sep.join(f"{v:.17g}" for v in row)


def write_points(ps: PointSet, path: str, fmt: str | None = None) -> None:
    """Write a point set as deterministic text (17 significant digits)."""
    fmt = fmt or infer_format(path)
    if fmt == PLY and ps.dim != 3:
        raise UnsupportedDimension(f"PLY requires 3-D points, got {ps.dim}-D")
    lines = []
    if fmt == XYZ:
        lines = [_fmt_row(row, " ") for row in ps.points]
    elif fmt == CSV:
        lines = [_fmt_row(row, ",") for row in ps.points]
    elif fmt == PLY:
        lines = [
            "ply",
            "format ascii 1.0",
            f"element vertex {len(ps)}",
            "property float x",
            "property float y",
            "property float z",
            "end_header",
        ] + [_fmt_row(row, " ") for row in ps.points]
    else:
        raise UnsupportedFormat(f"unknown format {fmt!r}")
    try:
        with open(path, "w", encoding="ascii", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as exc:
        raise IoError(str(exc)) from exc
