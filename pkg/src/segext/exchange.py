"""Plain-text geometry exchange format.

One record per line, comma separated, ``#`` starts a comment::

    S,dim,p1,...,pn,q1,...,qn        closed segment
    L,dim,a1,...,a(n-1),b1,...,b(n-1) line l(a, b)
    G,dim,base1,...,basen,dir1,...,dirn  any other line

Reals are written with 17 significant digits so floats round-trip.
"""

from __future__ import annotations

import io
import os
from typing import Iterable, TextIO, Union

from .geometry import (
    GeneralLine,
    GeometryError,
    ParamLine,
    Segment,
    SegmentFamily,
)

__all__ = [
    "ParseError",
    "format_real",
    "format_record",
    "parse_numbered",
    "parse_records",
    "read_records",
    "read_segments",
    "write_records",
    "dumps",
]

Record = Union[Segment, ParamLine, GeneralLine]


class ParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


def format_real(x) -> str:
    return format(float(x), ".17g")


def format_record(rec: Record) -> str:
    if isinstance(rec, Segment):
        tag, dim, values = "S", rec.dim, rec.p + rec.q
    elif isinstance(rec, ParamLine):
        tag, dim, values = "L", rec.dim, rec.a + rec.b
    elif isinstance(rec, GeneralLine):
        if rec.is_param_representable:
            tag, dim, values = "L", rec.dim, rec.dir[1:] + rec.base[1:]
        else:
            tag, dim, values = "G", rec.dim, rec.base + rec.dir
    else:
        raise TypeError(f"cannot serialize {type(rec).__name__}")
    return ",".join([tag, str(dim)] + [format_real(v) for v in values])


def _parse_line(fields: list[str], lineno: int) -> Record:
    tag = fields[0].strip()
    if tag not in ("S", "L", "G"):
        raise ParseError(lineno, f"unknown record type {tag!r}")
    if len(fields) < 2:
        raise ParseError(lineno, "missing dimension field")
    try:
        dim = int(fields[1])
    except ValueError:
        raise ParseError(lineno, f"bad dimension {fields[1]!r}") from None
    if dim < 2:
        raise ParseError(lineno, f"dimension must be >= 2, got {dim}")
    expected = 2 * dim if tag in ("S", "G") else 2 * (dim - 1)
    values = fields[2:]
    if len(values) != expected:
        raise ParseError(lineno, f"{tag} record in dimension {dim} needs {expected} values, got {len(values)}")
    try:
        nums = [float(v) for v in values]
    except ValueError as exc:
        raise ParseError(lineno, str(exc)) from None
    half = expected // 2
    try:
        if tag == "S":
            return Segment(tuple(nums[:half]), tuple(nums[half:]))
        if tag == "L":
            return ParamLine(tuple(nums[:half]), tuple(nums[half:]))
        return GeneralLine(tuple(nums[:half]), tuple(nums[half:]))
    except GeometryError as exc:
        raise ParseError(lineno, str(exc)) from None


def parse_numbered(stream: TextIO) -> list[tuple[int, Record]]:
    """Parse records, pairing each with its 1-based line number."""
    records = []
    dim = None
    for lineno, raw in enumerate(stream, start=1):
        text = raw.split("#", 1)[0].strip()
        if not text:
            continue
        rec = _parse_line(text.split(","), lineno)
        if dim is None:
            dim = rec.dim
        elif rec.dim != dim:
            raise ParseError(lineno, f"dimension {rec.dim} differs from earlier records ({dim})")
        records.append((lineno, rec))
    return records


def parse_records(stream: TextIO) -> list[Record]:
    return [rec for _, rec in parse_numbered(stream)]


def read_records(path: Union[str, os.PathLike]) -> list[Record]:
    with open(path, encoding="utf-8") as fh:
        return parse_records(fh)


def read_segments(path: Union[str, os.PathLike], dim: int | None = None) -> SegmentFamily:
    """Read a file holding only segment records."""
    with open(path, encoding="utf-8") as fh:
        numbered = parse_numbered(fh)
    for lineno, rec in numbered:
        if not isinstance(rec, Segment):
            raise ParseError(lineno, "expected only segment (S) records")
    records = [rec for _, rec in numbered]
    if not records:
        return SegmentFamily(dim or 2, ())
    return SegmentFamily(records[0].dim, records)


def write_records(path_or_stream, records: Iterable[Record]) -> int:
    """Write records, one per line; returns how many were written."""
    if isinstance(path_or_stream, (str, os.PathLike)):
        with open(path_or_stream, "w", encoding="utf-8", newline="\n") as fh:
            return write_records(fh, records)
    n = 0
    for rec in records:
        path_or_stream.write(format_record(rec) + "\n")
        n += 1
    return n


def dumps(records: Iterable[Record]) -> str:
    buf = io.StringIO()
    write_records(buf, records)
    return buf.getvalue()
