"""Deterministic segment families.

Every coordinate produced here except in :func:`direction_complete_family`
is a dyadic rational with few bits, so the float64 values are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .geometry import (
    GeometryError,
    Segment,
    SegmentFamily,
    Window,
    clip_param_lines,
)

__all__ = [
    "example1_segments",
    "example1_extended",
    "example2_tree",
    "example2_levels",
    "example2_leaves",
    "cantor_points",
    "cantor_dual_family",
    "cantor_dual_params",
    "direction_complete_family",
    "direction_grid",
]


def _check_level(name: str, value: int, lo: int, hi: int) -> int:
    if int(value) != value or not lo <= value <= hi:
        raise GeometryError(f"{name} must be an integer in [{lo}, {hi}], got {value!r}")
    return int(value)


def _example1_abscissas(levels: int) -> tuple[np.ndarray, np.ndarray]:
    xs, hs = [], []
    for n in range(1, levels + 1):
        m = np.arange(1, 2 ** (n - 1) + 1, dtype=float)
        xs.append((2 * m - 1) * 2.0**-n)
        hs.append(np.full(m.size, 2.0**-n))
    return np.concatenate(xs), np.concatenate(hs)


def example1_segments(levels: int) -> SegmentFamily:
    """Vertical segments ``x = (2m-1)/2^n, 0 <= y <= 2^-n``.

    Emitted for ``n = 1..levels`` and ``m = 1..2^(n-1)``, in that order;
    the family has ``2**levels - 1`` members.
    """
    levels = _check_level("levels", levels, 1, 20)
    x, h = _example1_abscissas(levels)
    arr = np.zeros((x.size, 2, 2))
    arr[:, :, 0] = x[:, None]
    arr[:, 1, 1] = h
    return SegmentFamily.from_array(arr)


def example1_extended(levels: int) -> SegmentFamily:
    """Same abscissas as :func:`example1_segments`, each a full chord of the unit square."""
    levels = _check_level("levels", levels, 1, 20)
    x, _ = _example1_abscissas(levels)
    arr = np.zeros((x.size, 2, 2))
    arr[:, :, 0] = x[:, None]
    arr[:, 1, 1] = 1.0
    return SegmentFamily.from_array(arr)


def example2_levels(depth: int):
    """Yield ``(n, parents, children)`` arrays for each edge layer of the tree.

    Nodes at level ``n >= 1`` are ``((2k-1)/2^n, (2l-1)/2^n, 1/2^n)`` for
    ``k, l = 1..2^(n-1)``; the root is ``(1/2, 1/2, 1/2)``. Each node is
    joined to its four children ``((4k-2±1)/2^(n+1), (4l-2±1)/2^(n+1), 1/2^(n+1))``.
    """
    depth = _check_level("depth", depth, 0, 12)
    for n in range(1, depth + 1):
        r = np.arange(1, 2 ** (n - 1) + 1, dtype=float)
        k, l = np.meshgrid(r, r, indexing="ij")
        k, l = k.ravel(), l.ravel()
        parent = np.stack([(2 * k - 1) * 2.0**-n, (2 * l - 1) * 2.0**-n, np.full(k.size, 2.0**-n)], axis=1)
        children = []
        for sx in (-1, 1):
            for sy in (-1, 1):
                children.append(np.stack(
                    [(4 * k - 2 + sx) * 2.0 ** -(n + 1),
                     (4 * l - 2 + sy) * 2.0 ** -(n + 1),
                     np.full(k.size, 2.0 ** -(n + 1))],
                    axis=1,
                ))
        child = np.stack(children, axis=1).reshape(-1, 3)
        yield n, np.repeat(parent, 4, axis=0), child


def example2_tree(depth: int) -> SegmentFamily:
    """Edges of the quadrary tree down to ``depth`` layers below the root.

    ``(4**(depth+1) - 4) / 3`` segments in R^3; leaves sit at
    ``z = 2**-(depth+1)``.
    """
    layers = [np.stack([p, c], axis=1) for _, p, c in example2_levels(depth)]
    if not layers:
        return SegmentFamily(3, ())
    return SegmentFamily.from_array(np.concatenate(layers))


def example2_leaves(depth: int) -> np.ndarray:
    """Leaf nodes of :func:`example2_tree` as an ``(4**depth, 3)`` array."""
    depth = _check_level("depth", depth, 0, 12)
    if depth == 0:
        return np.array([[0.5, 0.5, 0.5]])
    *_, (_, _, child) = example2_levels(depth)
    return child


def cantor_points(depth: int) -> np.ndarray:
    """Left endpoints of the depth-``depth`` middle-half Cantor intervals.

    The ``2**depth`` numbers ``sum(d_i * 4**-i)``, ``d_i in {0, 3}``, in
    increasing order.
    """
    depth = _check_level("depth", depth, 0, 26)
    pts = np.zeros(1)
    for i in range(1, depth + 1):
        pts = np.concatenate([pts, pts + 3.0 * 4.0**-i])
    return np.sort(pts)


def cantor_dual_params(depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Slopes and intercepts of the product parameter set, ``4**depth`` pairs."""
    c = cantor_points(depth)
    a, b = np.meshgrid(c, c, indexing="ij")
    return a.reshape(-1, 1), b.reshape(-1, 1)


def cantor_dual_family(depth: int, window_a: Window, window_b: Window) -> tuple[SegmentFamily, SegmentFamily]:
    """Lines ``l(a, b)`` over the Cantor product set, clipped to two windows.

    The first family (the segments) is clipped to ``window_a`` and the
    second to the larger ``window_b``; index ``i`` refers to the same line
    in both.
    """
    depth = _check_level("depth", depth, 0, 12)
    if window_a.dim != 2 or window_b.dim != 2:
        raise GeometryError("cantor_dual_family works in the plane")
    if not window_b.contains_window(window_a):
        raise GeometryError("window_a must lie inside window_b")
    a, b = cantor_dual_params(depth)
    seg_a, keep_a = clip_param_lines(a, b, window_a)
    if not keep_a.all():
        raise GeometryError(f"{int((~keep_a).sum())} lines miss window_a; index alignment impossible")
    seg_b, _ = clip_param_lines(a, b, window_b)
    return SegmentFamily.from_array(seg_a), SegmentFamily.from_array(seg_b)


def direction_grid(count: int, exact: bool = False) -> list:
    """``count`` equally spaced slopes from -1 to 1 (just -1 when ``count == 1``)."""
    if count == 1:
        return [Fraction(-1) if exact else -1.0]
    if exact:
        return [Fraction(-1) + Fraction(2 * i, count - 1) for i in range(count)]
    return [-1.0 + 2.0 * i / (count - 1) for i in range(count)]


def direction_complete_family(
    count: int, seg_len: float, placement_seed: int = 0, exact: bool = False
) -> SegmentFamily:
    """One segment of ``l(a_i, b_i)`` for each slope ``a_i`` of :func:`direction_grid`.

    Intercepts follow ``b_i = 0.1 * i / count``. Each segment has (close
    to) length ``seg_len`` and an x1-range inside ``[1, 2]``, placed at an
    offset drawn from ``placement_seed``. With ``exact=True`` coordinates
    are Fractions, so dualizing and extending stay exact.
    """
    if int(count) != count or count < 1:
        raise GeometryError(f"count must be a positive integer, got {count!r}")
    if not seg_len > 0 or not math.isfinite(seg_len):
        raise GeometryError(f"seg_len must be positive, got {seg_len!r}")
    rng = np.random.default_rng(placement_seed)
    slopes = direction_grid(int(count), exact)
    offsets = rng.random(int(count))
    segments = []
    for i, (a, u) in enumerate(zip(slopes, offsets)):
        width = seg_len / math.sqrt(1.0 + float(a) ** 2)
        if width > 1.0:
            raise GeometryError(f"segment {i} with slope {a} is too long to fit over x1 in [1, 2]")
        if exact:
            width = Fraction(width)
            x0 = 1 + Fraction(float(u)) * (1 - width)
            b = Fraction(i, 10 * count)
        else:
            x0 = 1.0 + float(u) * (1.0 - width)
            b = 0.1 * i / count
        x1 = x0 + width if exact else min(x0 + width, 2.0)
        segments.append(Segment((x0, a * x0 + b), (x1, a * x1 + b)))
    return SegmentFamily(2, segments)
