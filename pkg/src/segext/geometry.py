"""Lines, segments, slices and the projective duality map.

Coordinates are plain Python numbers. The formulas only use ``+ - * /``, so
``fractions.Fraction`` (or integer) coordinates give exact results; floats
round as usual. Integer division is promoted to ``Fraction`` rather than to
float for the same reason.

A line ``l(a, b)`` in R^n is the set ``{(t, t*a + b) : t in R}`` with slope
and intercept vectors ``a, b`` of length ``n - 1``. Lines orthogonal to the
first axis have no such encoding and are kept as :class:`GeneralLine` only.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from numbers import Real
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "GeometryError",
    "DomainError",
    "NotRepresentable",
    "DegenerateSegment",
    "DimensionMismatch",
    "FamilySizeError",
    "as_point",
    "Segment",
    "ParamLine",
    "GeneralLine",
    "Window",
    "SegmentFamily",
    "LineFamily",
    "line_from_param",
    "param_from_line",
    "extend",
    "extend_family",
    "clip",
    "clip_param_lines",
    "dualize",
    "dualize_segment",
    "vertical_slice",
    "project_param",
    "product_family",
]

Point = tuple


class GeometryError(ValueError):
    pass


class DomainError(GeometryError):
    """Input touches the hyperplane ``x1 = 0`` where duality is undefined."""


class NotRepresentable(GeometryError):
    """Line is orthogonal to the first axis, so it has no ``(a, b)`` form."""


class DegenerateSegment(GeometryError):
    pass


class DimensionMismatch(GeometryError):
    pass


class FamilySizeError(GeometryError):
    pass


def _div(x, y):
    if isinstance(x, int) and isinstance(y, int):
        q = Fraction(x, y)
        return q.numerator if q.denominator == 1 else q
    return x / y


def _scalar(x):
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, bool) or not isinstance(x, Real):
        raise GeometryError(f"coordinate {x!r} is not a real number")
    if not math.isfinite(x):
        raise GeometryError(f"coordinate {x!r} is not finite")
    return x


def as_point(coords: Iterable, dim: int | None = None) -> Point:
    """Validate ``coords`` and return them as a tuple."""
    p = tuple(_scalar(c) for c in coords)
    if not p:
        raise DimensionMismatch("empty point")
    if dim is not None and len(p) != dim:
        raise DimensionMismatch(f"expected {dim} coordinates, got {len(p)}")
    return p


def _sub(p, q):
    return tuple(x - y for x, y in zip(p, q))


def _axpy(s, d, p):
    return tuple(x + s * y for x, y in zip(p, d))


@dataclass(frozen=True)
class Segment:
    """Closed segment between two distinct points ``p`` and ``q``."""

    p: Point
    q: Point

    def __post_init__(self):
        p = as_point(self.p)
        q = as_point(self.q, len(p))
        if len(p) < 2:
            raise DimensionMismatch("segments live in dimension >= 2")
        if p == q:
            raise DegenerateSegment(f"segment endpoints coincide at {p}")
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def _trusted(cls, p: Point, q: Point) -> "Segment":
        obj = object.__new__(cls)
        object.__setattr__(obj, "p", p)
        object.__setattr__(obj, "q", q)
        return obj

    @property
    def dim(self) -> int:
        return len(self.p)

    @property
    def direction(self) -> Point:
        return _sub(self.q, self.p)

    @property
    def length(self) -> float:
        return math.sqrt(sum(float(d) ** 2 for d in self.direction))

    def point_at(self, u):
        return _axpy(u, self.direction, self.p)

    def contains(self, x: Sequence, tol: float = 0.0) -> bool:
        """Test whether ``x`` lies on the segment (exactly when ``tol == 0``)."""
        x = as_point(x, self.dim)
        d = self.direction
        j = max(range(self.dim), key=lambda i: abs(d[i]))
        u = _div(x[j] - self.p[j], d[j])
        if u < 0 or u > 1:
            return False
        return all(abs(y - z) <= tol for y, z in zip(self.point_at(u), x))

    def reversed(self) -> "Segment":
        return Segment._trusted(self.q, self.p)


@dataclass(frozen=True)
class ParamLine:
    """The line ``l(a, b) = {(t, t*a + b)}``; unpacks as ``a, b``."""

    a: Point
    b: Point

    def __post_init__(self):
        a = as_point(self.a)
        b = as_point(self.b, len(a))
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __iter__(self):
        return iter((self.a, self.b))

    @property
    def dim(self) -> int:
        return len(self.a) + 1

    def point_at(self, t) -> Point:
        return (t,) + tuple(t * ai + bi for ai, bi in zip(self.a, self.b))

    def to_line(self) -> "GeneralLine":
        return GeneralLine._trusted((0,) + self.b, (1,) + self.a)


@dataclass(frozen=True)
class GeneralLine:
    """The line ``{base + s*dir : s in R}`` in canonical form.

    ``dir`` is scaled so its first nonzero coordinate equals exactly 1 and
    ``base`` is moved along the line so that same coordinate is 0. Two lines
    are equal as point sets iff their canonical forms agree, which is exact
    for rational input. :attr:`unit_dir` gives the normalized direction.
    """

    base: Point
    dir: Point

    def __post_init__(self):
        base = as_point(self.base)
        d = as_point(self.dir, len(base))
        if len(base) < 2:
            raise DimensionMismatch("lines live in dimension >= 2")
        j = next((i for i, c in enumerate(d) if c != 0), None)
        if j is None:
            raise DegenerateSegment("line direction is the zero vector")
        lead = d[j]
        d = tuple(_div(c, lead) for c in d)
        shift = base[j]
        base = tuple(x - shift * c for x, c in zip(base, d))
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "dir", d)

    @classmethod
    def _trusted(cls, base: Point, d: Point) -> "GeneralLine":
        obj = object.__new__(cls)
        object.__setattr__(obj, "base", base)
        object.__setattr__(obj, "dir", d)
        return obj

    @property
    def dim(self) -> int:
        return len(self.base)

    @property
    def lead_axis(self) -> int:
        return next(i for i, c in enumerate(self.dir) if c != 0)

    @property
    def unit_dir(self) -> tuple[float, ...]:
        norm = math.sqrt(sum(float(c) ** 2 for c in self.dir))
        return tuple(float(c) / norm for c in self.dir)

    @property
    def is_param_representable(self) -> bool:
        return self.dir[0] != 0

    def point_at(self, s) -> Point:
        return _axpy(s, self.dir, self.base)

    def contains(self, x: Sequence, tol: float = 0.0) -> bool:
        x = as_point(x, self.dim)
        s = x[self.lead_axis]
        return all(abs(y - z) <= tol for y, z in zip(self.point_at(s), x))


@dataclass(frozen=True)
class Window:
    """Closed axis-aligned box ``[lo, hi]``."""

    lo: Point
    hi: Point

    def __post_init__(self):
        lo = as_point(self.lo)
        hi = as_point(self.hi, len(lo))
        if any(a >= b for a, b in zip(lo, hi)):
            raise GeometryError(f"window needs lo < hi componentwise, got {lo} / {hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @classmethod
    def unit(cls, dim: int) -> "Window":
        return cls((0,) * dim, (1,) * dim)

    @classmethod
    def cube(cls, lo, hi, dim: int) -> "Window":
        return cls((lo,) * dim, (hi,) * dim)

    @property
    def dim(self) -> int:
        return len(self.lo)

    @property
    def sides(self) -> tuple:
        return _sub(self.hi, self.lo)

    def contains(self, x: Sequence) -> bool:
        return all(a <= c <= b for a, c, b in zip(self.lo, x, self.hi))

    def contains_window(self, other: "Window") -> bool:
        return self.contains(other.lo) and self.contains(other.hi)

    def cross_section(self) -> "Window":
        """Drop the first axis (the window seen from a hyperplane ``x1 = t``)."""
        if self.dim < 2:
            raise DimensionMismatch("a 1-dimensional window has no cross-section")
        return Window(self.lo[1:], self.hi[1:])


class SegmentFamily:
    """Finite indexed collection of segments sharing one ambient dimension.

    Families built from arrays keep the float array and only materialize
    :class:`Segment` objects on access, so million-edge families stay cheap
    to rasterize.
    """

    def __init__(self, dim: int, segments: Iterable[Segment] = ()):
        segs = tuple(segments)
        for i, s in enumerate(segs):
            if not isinstance(s, Segment):
                raise TypeError(f"item {i} is not a Segment")
            if s.dim != dim:
                raise DimensionMismatch(f"segment {i} has dimension {s.dim}, family has {dim}")
        self.dim = int(dim)
        self._segments: tuple[Segment, ...] | None = segs
        self._array: np.ndarray | None = None

    @classmethod
    def from_array(cls, arr) -> "SegmentFamily":
        """Build from an ``(m, 2, n)`` array of endpoint coordinates."""
        arr = np.asarray(arr, dtype=float)
        if arr.ndim != 3 or arr.shape[1] != 2 or arr.shape[2] < 2:
            raise DimensionMismatch(f"expected shape (m, 2, n>=2), got {arr.shape}")
        if not np.isfinite(arr).all():
            raise GeometryError("non-finite coordinate in segment array")
        bad = np.flatnonzero((arr[:, 0] == arr[:, 1]).all(axis=1))
        if bad.size:
            raise DegenerateSegment(f"segment {int(bad[0])} is degenerate")
        fam = cls.__new__(cls)
        fam.dim = arr.shape[2]
        fam._segments = None
        fam._array = arr
        fam._array.flags.writeable = False
        return fam

    @property
    def segments(self) -> tuple[Segment, ...]:
        if self._segments is None:
            self._segments = tuple(
                Segment._trusted(tuple(p), tuple(q)) for p, q in self._array.tolist()
            )
        return self._segments

    def to_array(self) -> np.ndarray:
        """Endpoints as a read-only float array of shape ``(m, 2, n)``."""
        if self._array is None:
            arr = np.array(
                [[[float(c) for c in s.p], [float(c) for c in s.q]] for s in self._segments],
                dtype=float,
            ).reshape(len(self._segments), 2, self.dim)
            arr.flags.writeable = False
            self._array = arr
        return self._array

    def __len__(self) -> int:
        if self._segments is not None:
            return len(self._segments)
        return len(self._array)

    def __iter__(self) -> Iterator[Segment]:
        return iter(self.segments)

    def __getitem__(self, i):
        return self.segments[i]

    def __eq__(self, other):
        if not isinstance(other, SegmentFamily):
            return NotImplemented
        return self.dim == other.dim and self.segments == other.segments

    def __repr__(self):
        return f"SegmentFamily(dim={self.dim}, size={len(self)})"

    def bounding_box(self) -> tuple[tuple[float, ...], tuple[float, ...]] | None:
        if len(self) == 0:
            return None
        arr = self.to_array()
        return tuple(arr.min(axis=(0, 1)).tolist()), tuple(arr.max(axis=(0, 1)).tolist())


class LineFamily:
    """Indexed lines plus their ``(a, b)`` view when every line has one."""

    def __init__(self, dim: int, lines: Iterable[GeneralLine]):
        lines = tuple(lines)
        for i, line in enumerate(lines):
            if line.dim != dim:
                raise DimensionMismatch(f"line {i} has dimension {line.dim}, family has {dim}")
        self.dim = int(dim)
        self.lines = lines
        if all(line.is_param_representable for line in lines):
            self.param_view: tuple[ParamLine, ...] | None = tuple(
                param_from_line(line) for line in lines
            )
        else:
            self.param_view = None

    def __len__(self):
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)

    def __getitem__(self, i):
        return self.lines[i]

    def __repr__(self):
        return f"LineFamily(dim={self.dim}, size={len(self)}, param_view={self.param_view is not None})"

    def param_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """Slopes and intercepts as float arrays of shape ``(m, n-1)``."""
        if self.param_view is None:
            raise NotRepresentable("family contains lines orthogonal to the first axis")
        m, k = len(self.lines), self.dim - 1
        a = np.array([[float(c) for c in pl.a] for pl in self.param_view], dtype=float)
        b = np.array([[float(c) for c in pl.b] for pl in self.param_view], dtype=float)
        return a.reshape(m, k), b.reshape(m, k)


def line_from_param(a: Sequence, b: Sequence) -> GeneralLine:
    """Return ``l(a, b)``, the line through ``(0, b)`` with direction ``(1, a)``."""
    return ParamLine(a, b).to_line()


def param_from_line(line: GeneralLine) -> ParamLine:
    """Invert :func:`line_from_param`.

    Raises NotRepresentable for lines orthogonal to the first axis.
    """
    if line.dir[0] == 0:
        raise NotRepresentable(f"line with direction {line.dir} is orthogonal to the x1 axis")
    # canonical form already has dir[0] == 1 and base[0] == 0
    return ParamLine(line.dir[1:], line.base[1:])


def extend(s: Segment) -> GeneralLine:
    if not isinstance(s, Segment):
        s = Segment(*s)
    return GeneralLine(s.p, s.direction)


def extend_family(family: SegmentFamily) -> LineFamily:
    lines = []
    for i, s in enumerate(family):
        try:
            lines.append(extend(s))
        except GeometryError as exc:
            raise type(exc)(f"segment {i}: {exc}") from exc
    return LineFamily(family.dim, lines)


def clip(line: GeneralLine, window: Window) -> Segment | None:
    """Intersect a line with a closed window.

    Returns None when the intersection is empty or a single point.
    """
    if line.dim != window.dim:
        raise DimensionMismatch(f"line dimension {line.dim} != window dimension {window.dim}")
    s_lo = s_hi = None
    ax_lo = ax_hi = None
    for i, (b, d, lo, hi) in enumerate(zip(line.base, line.dir, window.lo, window.hi)):
        if d == 0:
            if b < lo or b > hi:
                return None
            continue
        e0, e1 = _div(lo - b, d), _div(hi - b, d)
        f0, f1 = (lo, hi) if d > 0 else (hi, lo)
        if d < 0:
            e0, e1 = e1, e0
        if s_lo is None or e0 > s_lo:
            s_lo, ax_lo = e0, (i, f0)
        if s_hi is None or e1 < s_hi:
            s_hi, ax_hi = e1, (i, f1)
    if s_lo >= s_hi:
        return None
    p = _clamped(line.point_at(s_lo), window, ax_lo)
    q = _clamped(line.point_at(s_hi), window, ax_hi)
    if p == q:
        return None
    return Segment(p, q)


def _clamped(x, window, face):
    # pin the coordinate of the face we hit and absorb float round-off
    x = [min(max(c, lo), hi) for c, lo, hi in zip(x, window.lo, window.hi)]
    i, v = face
    x[i] = v
    return tuple(x)


def clip_param_lines(a: np.ndarray, b: np.ndarray, window: Window) -> tuple[np.ndarray, np.ndarray]:
    """Clip many lines ``l(a_i, b_i)`` to ``window`` at once (float arithmetic).

    Returns ``(segments, keep)``: an ``(m', 2, n)`` endpoint array for the
    lines meeting the window in a nondegenerate segment and the boolean mask
    selecting them. Agrees with :func:`clip` up to round-off.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    m = a.shape[0]
    d = np.hstack([np.ones((m, 1)), a])
    base = np.hstack([np.zeros((m, 1)), b])
    lo = np.asarray(window.lo, dtype=float)
    hi = np.asarray(window.hi, dtype=float)
    if d.shape[1] != window.dim:
        raise DimensionMismatch("parameter length does not match window dimension")
    s_lo = np.full(m, -np.inf)
    s_hi = np.full(m, np.inf)
    keep = np.ones(m, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for i in range(window.dim):
            di, bi = d[:, i], base[:, i]
            flat = di == 0
            keep &= ~(flat & ((bi < lo[i]) | (bi > hi[i])))
            e0 = (lo[i] - bi) / di
            e1 = (hi[i] - bi) / di
            enter = np.where(di > 0, e0, e1)
            leave = np.where(di > 0, e1, e0)
            s_lo = np.where(flat, s_lo, np.maximum(s_lo, enter))
            s_hi = np.where(flat, s_hi, np.minimum(s_hi, leave))
    keep &= s_lo < s_hi
    p = base[keep] + s_lo[keep, None] * d[keep]
    q = base[keep] + s_hi[keep, None] * d[keep]
    p = np.clip(p, lo, hi)
    q = np.clip(q, lo, hi)
    return np.stack([p, q], axis=1), keep


def dualize(p: Sequence) -> Point:
    """Apply ``(x, y) -> (1/x, y/x)``; an involution away from ``x = 0``."""
    p = as_point(p)
    x = p[0]
    if x == 0:
        raise DomainError(f"point {p} lies on the hyperplane x1 = 0")
    return (_div(1, x),) + tuple(_div(y, x) for y in p[1:])


def dualize_segment(s: Segment) -> Segment:
    """Map a segment through :func:`dualize`.

    A segment of ``l(a, b)`` away from ``x1 = 0`` goes to a segment of
    ``l(b, a)``; endpoints go to endpoints.
    """
    x0, x1 = s.p[0], s.q[0]
    if not ((x0 > 0 and x1 > 0) or (x0 < 0 and x1 < 0)):
        raise DomainError(f"segment {s.p} -> {s.q} meets the hyperplane x1 = 0")
    return Segment(dualize(s.p), dualize(s.q))


def vertical_slice(family: LineFamily, t) -> frozenset:
    """Intersect the union of ``family`` with the hyperplane ``x1 = t``."""
    if family.param_view is None:
        raise NotRepresentable("slicing needs every line in (a, b) form")
    t = _scalar(t)
    return frozenset(pl.point_at(t) for pl in family.param_view)


def project_param(params: Iterable, t) -> frozenset:
    """Image of parameter pairs ``(a, b)`` under ``(a, b) -> t*a + b``."""
    t = _scalar(t)
    out = set()
    for a, b in params:
        a = (a,) if isinstance(a, Real) else tuple(a)
        b = (b,) if isinstance(b, Real) else tuple(b)
        if len(a) != len(b):
            raise DimensionMismatch("slope and intercept lengths differ")
        out.add(tuple(t * ai + bi for ai, bi in zip(a, b)))
    return frozenset(out)


def product_family(family: SegmentFamily, k: int, max_size: int = 1_000_000) -> SegmentFamily:
    """Diagonal segments of all ``k``-fold products of segments in ``family``.

    For a tuple ``(s_1, ..., s_k)`` the emitted segment runs from
    ``(p_1, ..., p_k)`` to ``(q_1, ..., q_k)``, so each factor is traversed
    at the same relative speed. Endpoint order is taken as given.
    """
    if int(k) != k or k < 1:
        raise GeometryError(f"k must be a positive integer, got {k!r}")
    size = len(family) ** k
    if size > max_size:
        raise FamilySizeError(f"product family would have {size} segments (cap {max_size})")
    if k == 1:
        return SegmentFamily(family.dim, family.segments)
    segs = [
        Segment._trusted(
            tuple(itertools.chain.from_iterable(s.p for s in combo)),
            tuple(itertools.chain.from_iterable(s.q for s in combo)),
        )
        for combo in itertools.product(family.segments, repeat=k)
    ]
    return SegmentFamily(family.dim * k, segs)
