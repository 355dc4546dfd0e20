import math
import random
from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from segext.geometry import (
    DegenerateSegment,
    DimensionMismatch,
    DomainError,
    FamilySizeError,
    GeneralLine,
    GeometryError,
    LineFamily,
    NotRepresentable,
    ParamLine,
    Segment,
    SegmentFamily,
    Window,
    clip,
    clip_param_lines,
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

from oracles import slice_from_segments

rationals = st.fractions(min_value=-10, max_value=10, max_denominator=50)


# -- line_from_param / param_from_line ---------------------------------------


def test_line_from_param_hand_values():
    line = line_from_param((2,), (3,))
    assert line.contains((0, 3))
    assert line.contains((1, 5))
    assert line.dir == (1, 2)
    assert line.unit_dir == pytest.approx((1 / math.sqrt(5), 2 / math.sqrt(5)), abs=1e-15)


def test_zero_params_give_first_axis():
    line = line_from_param((0,), (0,))
    assert line == GeneralLine((5, 0), (-3, 0))


def test_main_diagonal_in_r3():
    line = line_from_param((1, 1), (0, 0))
    assert line.contains((7, 7, 7))
    assert line.dim == 3


def test_line_from_param_errors():
    with pytest.raises(DimensionMismatch):
        line_from_param((1, 2), (0,))
    with pytest.raises(GeometryError):
        line_from_param((math.nan,), (0,))
    with pytest.raises(GeometryError):
        line_from_param((0,), (math.inf,))


def test_param_from_line_inverts_hand_example():
    line = GeneralLine((0, 3), (0.5, 1.0))
    a, b = param_from_line(line)
    assert (a, b) == ((2.0,), (3.0,))


def test_vertical_line_not_representable():
    with pytest.raises(NotRepresentable):
        param_from_line(GeneralLine((0, 0), (0, 1)))


def test_round_trip_random_floats():
    rng = np.random.default_rng(1)
    a = rng.uniform(-10, 10, size=(100_000, 1))
    b = rng.uniform(-10, 10, size=(100_000, 1))
    for ai, bi in zip(a.tolist(), b.tolist()):
        got_a, got_b = param_from_line(line_from_param(ai, bi))
        assert abs(got_a[0] - ai[0]) <= 1e-12 and abs(got_b[0] - bi[0]) <= 1e-12


@given(st.lists(rationals, min_size=1, max_size=3), st.data())
def test_round_trip_exact_on_rationals(a, data):
    b = data.draw(st.lists(rationals, min_size=len(a), max_size=len(a)))
    assert param_from_line(line_from_param(a, b)) == ParamLine(a, b)


@given(rationals, rationals, rationals, rationals)
def test_line_round_trip_preserves_point_set(x0, y0, dx, dy):
    if dx == 0:
        dx = F(1)
    line = GeneralLine((x0, y0), (dx, dy))
    back = line_from_param(*param_from_line(line))
    assert back.contains((x0, y0))
    assert back.contains((x0 + dx, y0 + dy))
    assert back == line


def test_canonical_direction_first_nonzero_positive():
    line = GeneralLine((1, 2, 3), (0, -4, 2))
    assert line.dir == (0, 1, F(-1, 2))
    assert line.base[1] == 0
    assert abs(math.hypot(*line.unit_dir) - 1) < 1e-12


# -- extend / clip -------------------------------------------------------------


def test_extend_hand_example():
    assert param_from_line(extend(Segment((0, 0), (1, 2)))) == ParamLine((2,), (0,))


def test_extend_vertical():
    line = extend(Segment((0, 0), (0, 1)))
    assert line.dir == (0, 1)
    with pytest.raises(NotRepresentable):
        param_from_line(line)


def test_degenerate_segment_rejected():
    with pytest.raises(DegenerateSegment):
        Segment((1, 1), (1, 1))
    with pytest.raises(DimensionMismatch):
        Segment((1, 1), (1, 1, 0))


def test_extend_family_param_view():
    fam = SegmentFamily(2, [Segment((0, 0), (1, 2)), Segment((0, 1), (2, 1))])
    lines = extend_family(fam)
    assert lines.param_view == (ParamLine((2,), (0,)), ParamLine((0,), (1,)))
    fam_v = SegmentFamily(2, [Segment((0, 0), (1, 2)), Segment((0, 0), (0, 1))])
    assert extend_family(fam_v).param_view is None


def test_extend_family_reports_index():
    arr = np.array([[[0.0, 0.0], [1.0, 1.0]], [[0.0, 0.0], [1.0, 1.0]]])
    fam = SegmentFamily.from_array(arr)
    assert len(extend_family(fam)) == 2
    with pytest.raises(DegenerateSegment, match="segment 1"):
        SegmentFamily.from_array(np.array([[[0.0, 0.0], [1.0, 1.0]], [[2.0, 2.0], [2.0, 2.0]]]))


@pytest.mark.parametrize(
    "line, expected",
    [
        (line_from_param((0,), (0,)), Segment((0, 0), (1, 0))),
        (line_from_param((1,), (0,)), Segment((0, 0), (1, 1))),
        (line_from_param((0,), (5,)), None),
    ],
)
def test_clip_unit_square(line, expected):
    assert clip(line, Window.unit(2)) == expected


def test_clip_corner_touch_is_empty():
    assert clip(line_from_param((-1,), (0,)), Window.unit(2)) is None


def test_clip_vertical_and_3d():
    assert clip(GeneralLine((F(1, 2), 7), (0, -1)), Window.unit(2)) == Segment((F(1, 2), 0), (F(1, 2), 1))
    seg = clip(line_from_param((1, 1), (0, 0)), Window.cube(-1, 1, 3))
    assert seg == Segment((-1, -1, -1), (1, 1, 1))


@settings(max_examples=200)
@given(rationals, rationals, rationals, rationals)
def test_extend_clip_idempotent(x0, y0, x1, y1):
    if (x0, y0) == (x1, y1):
        return
    line = extend(Segment((x0, y0), (x1, y1)))
    for window in (Window.cube(-10, 10, 2), Window((F(-1), F(-3)), (F(2), F(4)))):
        seg = clip(line, window)
        if seg is not None:
            assert extend(seg) == line
            assert extend(seg).contains(line.base)
            assert window.contains(seg.p) and window.contains(seg.q)


def test_clip_param_lines_matches_scalar_clip():
    rng = np.random.default_rng(7)
    a = rng.uniform(-3, 3, size=(300, 1))
    b = rng.uniform(-2, 2, size=(300, 1))
    window = Window((-1.0, -0.5), (1.5, 2.0))
    segs, keep = clip_param_lines(a, b, window)
    j = 0
    for ai, bi, kept in zip(a[:, 0], b[:, 0], keep):
        ref = clip(line_from_param((ai,), (bi,)), window)
        assert (ref is not None) == kept
        if kept:
            assert np.allclose(segs[j], [ref.p, ref.q], atol=1e-12)
            j += 1


# -- duality ---------------------------------------------------------------------


def test_dualize_hand_values():
    assert dualize((1, 5)) == (1, 5)
    assert dualize((2, 7)) == (0.5, 3.5)
    with pytest.raises(DomainError):
        dualize((0, 3))


def test_dualize_point_lands_on_swapped_line():
    x, y = dualize((2, 7))
    assert y == 3 * x + 2
    assert line_from_param((3,), (2,)).contains((x, y))


def test_dualize_segment_on_symmetric_line():
    s = Segment((1, 3), (2, 5))  # on l(2, 1)
    d = dualize_segment(s)
    assert extend(d) == line_from_param((1,), (2,))
    same = Segment((1, 2), (3, 4))  # on l(1, 1)
    assert extend(dualize_segment(same)) == extend(same)


def test_dualize_axis_segment():
    assert dualize_segment(Segment((1, 0), (2, 0))) == Segment((1, 0), (F(1, 2), 0))


def test_dualize_segment_rejects_hyperplane():
    with pytest.raises(DomainError):
        dualize_segment(Segment((0, 1), (1, 1)))
    with pytest.raises(DomainError):
        dualize_segment(Segment((-1, 1), (1, 1)))
    assert dualize_segment(Segment((-2, 1), (-1, 1))).p == (F(-1, 2), F(-1, 2))


def test_dualize_involution_random():
    rng = np.random.default_rng(3)
    mag = 10 ** rng.uniform(-3, 3, size=100_000)
    x = mag * rng.choice([-1.0, 1.0], size=mag.size)
    y = rng.uniform(-1e3, 1e3, size=mag.size)
    for xi, yi in zip(x.tolist(), y.tolist()):
        bx, by = dualize(dualize((xi, yi)))
        assert abs(bx - xi) <= 1e-9 * abs(xi)
        assert abs(by - yi) <= 1e-9 * max(abs(yi), 1e-300)


@settings(max_examples=300)
@given(
    st.lists(rationals, min_size=1, max_size=2),
    st.data(),
    st.fractions(min_value=F(1, 60), max_value=5, max_denominator=60),
    st.fractions(min_value=F(1, 60), max_value=5, max_denominator=60),
    st.sampled_from([1, -1]),
)
def test_punched_line_mapping_exact(a, data, t1, t2, sign):
    b = data.draw(st.lists(rationals, min_size=len(a), max_size=len(a)))
    if t1 == t2:
        return
    pl = ParamLine(a, b)
    s = Segment(pl.point_at(sign * t1), pl.point_at(sign * t2))
    image = dualize_segment(s)
    swapped = line_from_param(b, a)
    assert swapped.contains(image.p) and swapped.contains(image.q)
    assert swapped.contains(dualize(s.point_at(F(1, 3))))


# -- slices ------------------------------------------------------------------------


def test_slice_deduplicates():
    fam = LineFamily(2, [line_from_param((1,), (0,)), line_from_param((-1,), (2,))])
    assert vertical_slice(fam, 1) == {(1, 1)}


def test_slice_at_zero_reads_intercepts():
    fam = LineFamily(3, [line_from_param((1, 2), (3, 4)), line_from_param((5, 6), (7, 8))])
    assert vertical_slice(fam, 0) == {(0, 3, 4), (0, 7, 8)}


def test_slice_needs_param_view():
    fam = LineFamily(2, [GeneralLine((0, 0), (0, 1))])
    with pytest.raises(NotRepresentable):
        vertical_slice(fam, 0.5)


def test_slice_matches_endpoint_oracle():
    rnd = random.Random(11)

    def q():
        return F(rnd.randint(-40, 40), rnd.randint(1, 12))

    for _ in range(100):
        dim = rnd.choice([2, 3])
        segs = []
        for _ in range(rnd.randint(1, 6)):
            p = tuple(q() for _ in range(dim))
            x = p[0] + F(rnd.randint(1, 9), rnd.randint(1, 5)) * rnd.choice([1, -1])
            segs.append(Segment(p, (x,) + tuple(q() for _ in range(dim - 1))))
        fam = extend_family(SegmentFamily(dim, segs))
        t = q()
        assert vertical_slice(fam, t) == slice_from_segments(segs, t)


def test_project_param():
    assert project_param([((2,), (3,))], 0) == {(3,)}
    assert project_param([((2,), (3,))], 2) == {(7,)}
    params = [((1,), (0,)), ((-1,), (2,)), ((0,), (1,))]
    assert project_param(params, 1) == {(1,)}
    assert len(project_param(params, 5)) <= len(params)


def test_slice_equals_t_times_projection():
    lines = [line_from_param((F(1, 2),), (3,)), line_from_param((-2,), (F(1, 7),))]
    fam = LineFamily(2, lines)
    t = F(5, 3)
    assert vertical_slice(fam, t) == {(t,) + y for y in project_param(fam.param_view, t)}


# -- products ---------------------------------------------------------------------


def test_product_identity_and_single():
    fam = SegmentFamily(2, [Segment((0, 0), (1, 0))])
    assert product_family(fam, 1) == fam
    prod = product_family(fam, 2)
    assert prod.dim == 4
    assert prod.segments == (Segment((0, 0, 0, 0), (1, 0, 1, 0)),)


def test_product_size_and_cap():
    fam = SegmentFamily(2, [Segment((0, 0), (1, 0)), Segment((0, 1), (1, 1)), Segment((0, 0), (0, 1))])
    assert len(product_family(fam, 3)) == 27
    with pytest.raises(FamilySizeError):
        product_family(fam, 3, max_size=26)
    with pytest.raises(GeometryError):
        product_family(fam, 0)


def test_product_diagonal_points_lie_in_product():
    s1, s2 = Segment((0, 0), (2, 1)), Segment((1, 1), (1, 3))
    prod = product_family(SegmentFamily(2, [s1, s2]), 2)
    mid = prod[1].point_at(F(1, 2))  # s1 x s2
    assert s1.contains(mid[:2]) and s2.contains(mid[2:])


# -- types --------------------------------------------------------------------------


def test_window_validation():
    with pytest.raises(GeometryError):
        Window((0, 0), (1, 0))
    w = Window((0, -1), (2, 1))
    assert w.cross_section() == Window((-1,), (1,))
    assert w.contains((2, 1)) and not w.contains((2.5, 0))


def test_family_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        SegmentFamily(2, [Segment((0, 0, 0), (1, 1, 1))])
    with pytest.raises(DimensionMismatch):
        LineFamily(2, [line_from_param((1, 1), (0, 0))])


def test_family_array_round_trip():
    fam = SegmentFamily(2, [Segment((F(1, 2), 0), (1, 1))])
    arr = fam.to_array()
    assert arr.tolist() == [[[0.5, 0.0], [1.0, 1.0]]]
    assert SegmentFamily.from_array(arr) == SegmentFamily(2, [Segment((0.5, 0.0), (1.0, 1.0))])
    assert fam.bounding_box() == ((0.5, 0.0), (1.0, 1.0))
