"""Exact rasterization onto dyadic grids, box counting and dimension fits.

A segment occupies every cell whose *closed* box it meets. The traversal
visits the segment's endpoints and every point where it crosses a grid
hyperplane; each such event point marks all closed cells containing it
(two per axis on which it sits on a grid line). A closed cell meets the
segment in a sub-segment whose ends are event points, so this finds exactly
the covered cells with work proportional to the cells crossed.

Grid arithmetic runs in float64 in units of cells. It is exact whenever the
coordinates in cell units are dyadic with modest bit length, which covers
every construction in :mod:`segext.constructions`.

Closed-cell covering nests across levels: a cell at level ``k - 1`` is met
iff one of its children is. :func:`box_count` therefore rasterizes once at
the finest level and derives coarser counts by shifting cell indices.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .geometry import (
    DimensionMismatch,
    GeometryError,
    LineFamily,
    NotRepresentable,
    SegmentFamily,
    Window,
)

__all__ = [
    "MAX_INDEX_BITS",
    "DENSE_INDEX_BITS",
    "Grid",
    "CellSet",
    "BoxCountCurve",
    "DimensionEstimate",
    "rasterize",
    "rasterize_points",
    "box_count",
    "point_box_count",
    "estimate_dimension",
    "slice_profile",
    "profile_to_csv",
    "resolve_threads",
]

MAX_INDEX_BITS = 30
# up to this many index bits occupancy is tracked in a dense bitmap
DENSE_INDEX_BITS = 24
# event points processed per chunk; bounds peak memory
CHUNK_EVENTS = 1 << 20


def resolve_threads(threads: int | None) -> int:
    if threads is None:
        return 1
    if threads < 0:
        raise ValueError(f"threads must be >= 0, got {threads}")
    return threads or (os.cpu_count() or 1)


@dataclass(frozen=True)
class Grid:
    """Dyadic grid of ``2**level`` cells per axis over ``window``."""

    window: Window
    level: int

    def __post_init__(self):
        if int(self.level) != self.level or self.level < 0:
            raise ValueError(f"grid level must be a non-negative integer, got {self.level!r}")
        object.__setattr__(self, "level", int(self.level))
        if self.level * self.window.dim > MAX_INDEX_BITS:
            raise ValueError(
                f"level {self.level} in dimension {self.window.dim} exceeds "
                f"{MAX_INDEX_BITS} index bits"
            )

    @property
    def dim(self) -> int:
        return self.window.dim

    @property
    def size(self) -> int:
        return 1 << self.level

    @property
    def cell_sides(self) -> tuple[float, ...]:
        return tuple(float(s) / self.size for s in self.window.sides)

    @property
    def delta(self) -> float:
        return max(self.cell_sides)

    def to_units(self, coords: np.ndarray) -> np.ndarray:
        lo = np.asarray(self.window.lo, dtype=float)
        span = np.asarray(self.window.sides, dtype=float)
        return (coords - lo) / span * float(self.size)


def _encode(idx: np.ndarray, level: int) -> np.ndarray:
    keys = np.zeros(idx.shape[0], dtype=np.int64)
    for i in range(idx.shape[1]):
        keys |= idx[:, i].astype(np.int64) << (level * i)
    return keys


def _decode(keys: np.ndarray, level: int, dim: int) -> np.ndarray:
    mask = (1 << level) - 1
    return np.stack([(keys >> (level * i)) & mask for i in range(dim)], axis=1)


class CellSet:
    """Occupied cells of one grid, stored as sorted integer keys.

    A cell with multi-index ``(i_1, ..., i_n)`` has key
    ``sum(i_j << (level * (j - 1)))``.
    """

    def __init__(self, grid: Grid, keys: np.ndarray):
        keys = np.unique(np.asarray(keys, dtype=np.int64))
        if keys.size and (keys[0] < 0 or keys[-1] >= 1 << (grid.level * grid.dim)):
            raise ValueError("cell key outside the grid")
        keys.flags.writeable = False
        self.grid = grid
        self.keys = keys

    def __len__(self) -> int:
        return int(self.keys.size)

    def __eq__(self, other):
        if not isinstance(other, CellSet):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.keys, other.keys)

    def __repr__(self):
        return f"CellSet(level={self.grid.level}, dim={self.grid.dim}, occupied={len(self)})"

    def indices(self) -> np.ndarray:
        return _decode(self.keys, self.grid.level, self.grid.dim)

    @property
    def occupied(self) -> frozenset:
        return frozenset(map(tuple, self.indices().tolist()))

    def coarsen(self, level: int) -> "CellSet":
        if level > self.grid.level:
            raise ValueError("can only coarsen to a lower level")
        shift = self.grid.level - level
        idx = self.indices() >> shift
        return CellSet(Grid(self.grid.window, level), _encode(idx, level))


def _crossing_points(P: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """Endpoints plus all grid-hyperplane crossings, in cell units."""
    pts = [P, Q]
    D = Q - P
    for j in range(P.shape[1]):
        lo = np.minimum(P[:, j], Q[:, j])
        hi = np.maximum(P[:, j], Q[:, j])
        first = np.floor(lo) + 1
        cnt = np.maximum(np.ceil(hi) - first, 0).astype(np.int64)
        total = int(cnt.sum())
        if total == 0:
            continue
        seg = np.repeat(np.arange(P.shape[0]), cnt)
        offset = np.arange(total) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        c = first[seg] + offset
        # multiply before dividing: a coordinate that is exactly a grid value
        # stays exact under correctly rounded division
        pt = P[seg] + ((c - P[seg, j])[:, None] * D[seg]) / D[seg, j][:, None]
        pt[:, j] = c
        pts.append(pt)
    return np.concatenate(pts)


def _point_keys(pts: np.ndarray, level: int) -> np.ndarray:
    """Keys of all closed cells containing each point (cell units)."""
    size = 1 << level
    n = pts.shape[1]
    fl = np.floor(pts)
    on_line = pts == fl
    base = fl.astype(np.int64)
    out = []
    for mask in itertools.product((0, 1), repeat=n):
        m = np.array(mask, dtype=bool)
        if m.any():
            sel = on_line[:, m].all(axis=1)
            if not sel.any():
                continue
            idx = base[sel] - m.astype(np.int64)
        else:
            idx = base.copy()
        np.clip(idx, 0, size - 1, out=idx)
        out.append(_encode(idx, level))
    return np.concatenate(out) if out else np.empty(0, dtype=np.int64)


def _event_counts(U: np.ndarray) -> np.ndarray:
    lo = np.minimum(U[:, 0], U[:, 1])
    hi = np.maximum(U[:, 0], U[:, 1])
    per_axis = np.maximum(np.ceil(hi) - np.floor(lo) - 1, 0)
    return per_axis.sum(axis=1) + 2


def _chunks(weights: np.ndarray, budget: int) -> list[slice]:
    if weights.size == 0:
        return []
    bounds = np.searchsorted(np.cumsum(weights), np.arange(budget, weights.sum() + budget, budget))
    edges = sorted(set([0] + [min(int(b) + 1, weights.size) for b in bounds] + [weights.size]))
    return [slice(a, b) for a, b in zip(edges[:-1], edges[1:]) if b > a]


def _merge(grid: Grid, key_arrays: Iterable[np.ndarray]) -> CellSet:
    bits = grid.level * grid.dim
    if bits <= DENSE_INDEX_BITS:
        bitmap = np.zeros(1 << bits, dtype=bool)
        for keys in key_arrays:
            bitmap[keys] = True
        return CellSet(grid, np.flatnonzero(bitmap))
    parts = list(key_arrays)
    keys = np.concatenate(parts) if parts else np.empty(0, dtype=np.int64)
    return CellSet(grid, keys)


def _check_inside(coords: np.ndarray, window: Window, what: str) -> None:
    lo = np.asarray(window.lo, dtype=float)
    hi = np.asarray(window.hi, dtype=float)
    flat = coords.reshape(-1, window.dim)
    bad = ~((flat >= lo) & (flat <= hi)).all(axis=1)
    if bad.any():
        first = int(np.flatnonzero(bad)[0]) // (coords.shape[1] if coords.ndim == 3 else 1)
        raise GeometryError(f"{what} {first} lies outside the window; clip it first")


def _map(fn, items, threads: int):
    threads = resolve_threads(threads)
    if threads <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def rasterize(family: SegmentFamily, grid: Grid, threads: int = 1) -> CellSet:
    """Cells of ``grid`` whose closed box meets some segment of ``family``.

    Segments must already lie in the closed window. The result does not
    depend on segment order or on ``threads`` (0 means one per CPU).
    """
    if family.dim != grid.dim:
        raise DimensionMismatch(f"family dimension {family.dim} != grid dimension {grid.dim}")
    arr = family.to_array()
    if arr.shape[0] == 0:
        return CellSet(grid, np.empty(0, dtype=np.int64))
    _check_inside(arr, grid.window, "segment")
    U = grid.to_units(arr)

    dense = grid.level * grid.dim <= DENSE_INDEX_BITS

    def work(sl):
        keys = _point_keys(_crossing_points(U[sl, 0], U[sl, 1]), grid.level)
        return keys if dense else np.unique(keys)

    return _merge(grid, _map(work, _chunks(_event_counts(U), CHUNK_EVENTS), threads))


def rasterize_points(points, grid: Grid) -> CellSet:
    """Cells of ``grid`` whose closed box contains some point."""
    pts = np.asarray(points, dtype=float).reshape(-1, grid.dim)
    if pts.shape[0] == 0:
        return CellSet(grid, np.empty(0, dtype=np.int64))
    _check_inside(pts, grid.window, "point")
    return _merge(grid, [_point_keys(grid.to_units(pts), grid.level)])


@dataclass(frozen=True)
class BoxCountCurve:
    """Counts ``N(delta_k)`` of occupied cells per dyadic level ``k``.

    ``dim`` may be None for curves read back from CSV; the ``2**dim``
    growth bound is then not checked.
    """

    entries: tuple
    dim: int | None = None

    def __post_init__(self):
        entries = tuple((int(k), float(d), c) for k, d, c in self.entries)
        object.__setattr__(self, "entries", entries)
        for (k0, _, n0), (k1, _, n1) in zip(entries, entries[1:]):
            if k1 <= k0:
                raise ValueError("curve levels must be strictly increasing")
            if n1 < n0:
                raise ValueError(f"count decreases from level {k0} to {k1}")
            if self.dim is not None and k1 == k0 + 1 and n1 > (2**self.dim) * n0:
                raise ValueError(f"count grows by more than 2**{self.dim} from level {k0} to {k1}")
        if any(c < 0 for _, _, c in entries):
            raise ValueError("negative count")

    @property
    def levels(self) -> np.ndarray:
        return np.array([e[0] for e in self.entries], dtype=np.int64)

    @property
    def deltas(self) -> np.ndarray:
        return np.array([e[1] for e in self.entries], dtype=float)

    @property
    def counts(self) -> np.ndarray:
        return np.array([e[2] for e in self.entries])

    def to_csv(self, target=None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "delta", "count"])
        for k, d, c in self.entries:
            w.writerow([k, format(d, ".17g"), c])
        text = buf.getvalue()
        if target is not None:
            with open(target, "w", encoding="utf-8", newline="") as fh:
                fh.write(text)
        return text

    @classmethod
    def from_csv(cls, source, dim: int | None = None) -> "BoxCountCurve":
        if isinstance(source, (str, os.PathLike)):
            with open(source, encoding="utf-8", newline="") as fh:
                return cls.from_csv(fh, dim)
        reader = csv.DictReader(source)
        if reader.fieldnames is None or list(reader.fieldnames)[:3] != ["k", "delta", "count"]:
            raise ValueError("expected CSV header k,delta,count")
        entries = []
        for row in reader:
            c = float(row["count"])
            entries.append((int(row["k"]), float(row["delta"]), int(c) if c.is_integer() else c))
        return cls(tuple(entries), dim)


@dataclass(frozen=True)
class DimensionEstimate:
    """Least-squares slope of ``log N`` against ``log(1/delta)``."""

    slope: float
    intercept: float
    r2: float
    k_lo: int
    k_hi: int

    CSV_HEADER = ("slope", "intercept", "r2", "k_lo", "k_hi")

    def to_csv(self) -> str:
        vals = [format(self.slope, ".17g"), format(self.intercept, ".17g"),
                format(self.r2, ".17g"), str(self.k_lo), str(self.k_hi)]
        return ",".join(self.CSV_HEADER) + "\n" + ",".join(vals) + "\n"


def box_count(
    family: SegmentFamily, window: Window, k_min: int, k_max: int, threads: int = 1
) -> BoxCountCurve:
    """Box counts of ``family`` on ``window`` for levels ``k_min..k_max``."""
    if not 0 <= k_min < k_max:
        raise ValueError(f"need 0 <= k_min < k_max, got {k_min}, {k_max}")
    fine = rasterize(family, Grid(window, k_max), threads=threads)
    return _curve_from_cells(fine, k_min)


def point_box_count(points, window: Window, k_min: int, k_max: int) -> BoxCountCurve:
    """Box counts of a finite point set, as :func:`box_count` does for segments."""
    if not 0 <= k_min < k_max:
        raise ValueError(f"need 0 <= k_min < k_max, got {k_min}, {k_max}")
    return _curve_from_cells(rasterize_points(points, Grid(window, k_max)), k_min)


def _curve_from_cells(fine: CellSet, k_min: int) -> BoxCountCurve:
    idx = fine.indices()
    k_max = fine.grid.level
    entries = []
    for k in range(k_min, k_max + 1):
        if idx.shape[0] == 0:
            count = 0
        else:
            count = int(np.unique(_encode(idx >> (k_max - k), k)).size)
        entries.append((k, Grid(fine.grid.window, k).delta, count))
    return BoxCountCurve(tuple(entries), fine.grid.dim)


def estimate_dimension(
    curve: BoxCountCurve, k_lo: int | None = None, k_hi: int | None = None
) -> DimensionEstimate:
    """Fit the box-counting slope on levels ``k_lo..k_hi``.

    By default the two coarsest levels and the finest one are left out.
    """
    levels = curve.levels
    if levels.size == 0:
        raise ValueError("empty curve")
    if k_lo is None:
        k_lo = int(levels[0]) + 2
    if k_hi is None:
        k_hi = int(levels[-1]) - 1
    if k_hi - k_lo < 3:
        raise ValueError(f"fit window {k_lo}..{k_hi} has fewer than 4 levels")
    if k_lo < levels[0] or k_hi > levels[-1]:
        raise ValueError(f"fit window {k_lo}..{k_hi} leaves the counted levels {levels[0]}..{levels[-1]}")
    sel = (levels >= k_lo) & (levels <= k_hi)
    if sel.sum() < 4:
        raise ValueError(f"curve has only {int(sel.sum())} levels in {k_lo}..{k_hi}")
    counts = curve.counts[sel].astype(float)
    if (counts <= 0).any():
        raise ValueError("zero box count in fit window (empty set?)")
    x = -np.log(curve.deltas[sel])
    y = np.log(counts)
    slope, intercept = np.polyfit(x, y, 1)
    ss_tot = float(((y - y.mean()) ** 2).sum())
    ss_res = float(((y - (slope * x + intercept)) ** 2).sum())
    r2 = 1.0 if ss_tot == 0.0 else min(1.0, max(0.0, 1.0 - ss_res / ss_tot))
    if curve.dim is not None and not -1e-9 <= slope <= curve.dim + 0.1:
        raise ValueError(f"slope {slope} outside [0, {curve.dim} + 0.1]")
    return DimensionEstimate(float(slope), float(intercept), r2, int(k_lo), int(k_hi))


def slice_profile(
    family: LineFamily,
    window: Window,
    t_samples: Sequence[float],
    k_min: int,
    k_max: int,
    k_lo: int | None = None,
    k_hi: int | None = None,
) -> list[tuple[float, DimensionEstimate]]:
    """Box dimension of ``(union of family) ∩ {x1 = t}`` for each ``t``.

    Each slice ``{t*a + b}`` is counted on the dyadic grid over the window's
    cross-section; slice points outside the cross-section are ignored.
    """
    if family.param_view is None:
        raise NotRepresentable("slice profiles need every line in (a, b) form")
    if family.dim != window.dim:
        raise DimensionMismatch("family and window dimensions differ")
    a, b = family.param_arrays()
    cross = window.cross_section()
    lo = np.asarray(cross.lo, dtype=float)
    hi = np.asarray(cross.hi, dtype=float)
    out = []
    for t in t_samples:
        t = float(t)
        if not window.lo[0] <= t <= window.hi[0]:
            raise ValueError(f"t = {t} outside the window's x1 range")
        pts = t * a + b
        pts = pts[((pts >= lo) & (pts <= hi)).all(axis=1)]
        if pts.shape[0] == 0:
            raise ValueError(f"slice at t = {t} misses the window")
        curve = point_box_count(pts, cross, k_min, k_max)
        out.append((t, estimate_dimension(curve, k_lo, k_hi)))
    return out


def profile_to_csv(profile: Iterable[tuple[float, DimensionEstimate]], target=None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "slope", "r2"])
    for t, est in profile:
        w.writerow([format(t, ".17g"), format(est.slope, ".17g"), format(est.r2, ".17g")])
    text = buf.getvalue()
    if target is not None:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    return text
