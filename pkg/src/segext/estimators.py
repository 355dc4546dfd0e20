"""scikit-learn compatible wrappers around the geometry and counting code.

Segment data is an array of shape ``(n_segments, 2, n_dims)`` (endpoint
pairs) or a :class:`~segext.geometry.SegmentFamily`. The transformers map
segment arrays to segment arrays, so they chain in a
:class:`sklearn.pipeline.Pipeline` ending in :class:`BoxCountingDimension`.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .geometry import (
    DimensionMismatch,
    DomainError,
    Segment,
    SegmentFamily,
    Window,
    clip,
    extend,
)
from .rasterdim import box_count, estimate_dimension

__all__ = [
    "check_segments",
    "check_window",
    "SegmentExtender",
    "ProjectiveDual",
    "BoxCountingDimension",
]


def check_segments(X, dim: int | None = None) -> np.ndarray:
    """Validate segment input and return it as a float ``(m, 2, n)`` array.

    Raises ValueError for bad shapes, non-finite values, degenerate
    segments or a dimension other than ``dim``.
    """
    if isinstance(X, SegmentFamily):
        arr = X.to_array()
    else:
        arr = np.asarray(X, dtype=float)
        if arr.ndim == 3 and arr.shape[0] == 0:
            return arr.reshape(0, 2, arr.shape[2])
        arr = SegmentFamily.from_array(arr).to_array()
    if dim is not None and arr.shape[2] != dim:
        raise DimensionMismatch(f"expected segments in dimension {dim}, got {arr.shape[2]}")
    return arr


def check_window(window, dim: int) -> Window:
    """Accept a Window, a ``(lo, hi)`` pair, or None for the unit cube."""
    if window is None:
        return Window.unit(dim)
    if not isinstance(window, Window):
        lo, hi = window
        window = Window(tuple(lo), tuple(hi))
    if window.dim != dim:
        raise DimensionMismatch(f"window dimension {window.dim} != data dimension {dim}")
    return window


class SegmentExtender(TransformerMixin, BaseEstimator):
    """Replace each segment by its full line clipped to ``window``.

    Lines missing the window are dropped; the surviving rows keep their
    relative order.
    """

    def __init__(self, window=None):
        self.window = window

    def fit(self, X, y=None):
        arr = check_segments(X)
        self.n_dims_ = arr.shape[2]
        self.window_ = check_window(self.window, self.n_dims_)
        return self

    def transform(self, X):
        check_is_fitted(self, "window_")
        arr = check_segments(X, self.n_dims_)
        out = []
        for p, q in arr.tolist():
            s = clip(extend(Segment(tuple(p), tuple(q))), self.window_)
            if s is not None:
                out.append([s.p, s.q])
        return np.array(out, dtype=float).reshape(len(out), 2, self.n_dims_)


class ProjectiveDual(TransformerMixin, BaseEstimator):
    """Apply ``(x, y) -> (1/x, y/x)`` to segment endpoints.

    The map is its own inverse. Segments touching ``x1 = 0`` raise
    DomainError.
    """

    def fit(self, X, y=None):
        self.n_dims_ = check_segments(X).shape[2]
        return self

    def transform(self, X):
        check_is_fitted(self, "n_dims_")
        arr = check_segments(X, self.n_dims_)
        x = arr[:, :, 0]
        bad = ~(((x > 0).all(axis=1)) | ((x < 0).all(axis=1)))
        if bad.any():
            raise DomainError(f"segment {int(np.flatnonzero(bad)[0])} meets the hyperplane x1 = 0")
        out = arr / x[:, :, None]
        out[:, :, 0] = 1.0 / x
        return out

    def inverse_transform(self, X):
        return self.transform(X)


class BoxCountingDimension(BaseEstimator):
    """Box-counting dimension of a union of segments.

    Parameters
    ----------
    window : Window, (lo, hi) pair or None
        Counting window; None means the unit cube.
    k_min, k_max : int
        Dyadic levels counted (cell side ``2**-k`` times the window side).
    fit_lo, fit_hi : int or None
        Levels used in the regression; None drops the two coarsest and the
        finest counted level.
    n_jobs : int
        Threads for rasterization, 0 for one per CPU.

    Attributes
    ----------
    curve_ : BoxCountCurve
    estimate_ : DimensionEstimate
    dimension_ : float
        The fitted slope.
    """

    def __init__(self, window=None, k_min=2, k_max=8, fit_lo=None, fit_hi=None, n_jobs=1):
        self.window = window
        self.k_min = k_min
        self.k_max = k_max
        self.fit_lo = fit_lo
        self.fit_hi = fit_hi
        self.n_jobs = n_jobs

    def fit(self, X, y=None):
        arr = check_segments(X)
        family = SegmentFamily.from_array(arr) if arr.shape[0] else SegmentFamily(arr.shape[2], ())
        window = check_window(self.window, arr.shape[2])
        self.curve_ = box_count(family, window, self.k_min, self.k_max, threads=self.n_jobs)
        self.estimate_ = estimate_dimension(self.curve_, self.fit_lo, self.fit_hi)
        self.dimension_ = self.estimate_.slope
        return self
