"""Segment-to-line extension, projective duality and box-counting dimension."""

from .geometry import (
    DomainError,
    GeneralLine,
    GeometryError,
    LineFamily,
    NotRepresentable,
    ParamLine,
    Segment,
    SegmentFamily,
    Window,
    clip,
    dualize,
    dualize_segment,
    extend,
    extend_family,
    line_from_param,
    param_from_line,
    product_family,
    project_param,
    vertical_slice,
)
from .rasterdim import (
    BoxCountCurve,
    CellSet,
    DimensionEstimate,
    Grid,
    box_count,
    estimate_dimension,
    rasterize,
    slice_profile,
)
from .estimators import BoxCountingDimension, ProjectiveDual, SegmentExtender

__version__ = "0.1.0"
