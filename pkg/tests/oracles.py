"""Independent brute-force oracles, exact rational arithmetic throughout."""

from __future__ import annotations

import itertools
from fractions import Fraction


def _q(x):
    return x if isinstance(x, Fraction) else Fraction(x)


def segment_meets_box(p, q, lo, hi) -> bool:
    """Exact test of closed segment [p, q] against the closed box [lo, hi]."""
    u0, u1 = Fraction(0), Fraction(1)
    for pi, qi, a, b in zip(p, q, lo, hi):
        pi, qi, a, b = _q(pi), _q(qi), _q(a), _q(b)
        d = qi - pi
        if d == 0:
            if pi < a or pi > b:
                return False
            continue
        e0, e1 = (a - pi) / d, (b - pi) / d
        if e0 > e1:
            e0, e1 = e1, e0
        u0, u1 = max(u0, e0), min(u1, e1)
        if u0 > u1:
            return False
    return True


def point_in_box(x, lo, hi) -> bool:
    return all(_q(a) <= _q(c) <= _q(b) for c, a, b in zip(x, lo, hi))


def _cells(window, level):
    n = len(window.lo)
    size = 2**level
    lo = [_q(v) for v in window.lo]
    side = [(_q(h) - _q(l)) / size for l, h in zip(window.lo, window.hi)]
    for idx in itertools.product(range(size), repeat=n):
        cell_lo = [l + i * s for l, i, s in zip(lo, idx, side)]
        cell_hi = [c + s for c, s in zip(cell_lo, side)]
        yield idx, cell_lo, cell_hi


def brute_force_cells(segments, window, level) -> set:
    """Every cell whose closed box meets some segment, by checking them all."""
    segs = [(s.p, s.q) for s in segments]
    return {
        idx
        for idx, lo, hi in _cells(window, level)
        if any(segment_meets_box(p, q, lo, hi) for p, q in segs)
    }


def brute_force_point_cells(points, window, level) -> set:
    pts = [tuple(p) for p in points]
    return {idx for idx, lo, hi in _cells(window, level) if any(point_in_box(x, lo, hi) for x in pts)}


def slice_from_segments(segments, t) -> set:
    """Intersect each segment's line with x1 = t straight from its endpoints."""
    out = set()
    for s in segments:
        p = [_q(c) for c in s.p]
        q = [_q(c) for c in s.q]
        u = (_q(t) - p[0]) / (q[0] - p[0])
        out.add(tuple(pi + u * (qi - pi) for pi, qi in zip(p, q)))
    return out
