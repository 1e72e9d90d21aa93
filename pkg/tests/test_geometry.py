import math

import pytest
from hypothesis import given, strategies as st

from docxchain.geometry import (
    Point,
    Quadrangle,
    quad_area,
    quad_center,
    quad_intersection_area,
    quad_iou,
)

UNIT = Quadrangle.from_bbox(0, 0, 1, 1)


def square_at(x, y, side=1.0):
    return Quadrangle.from_bbox(x, y, x + side, y + side)


# Strategy: random valid axis-aligned quads plus mild convex perturbations.
coords = st.floats(min_value=-50, max_value=50, allow_nan=False, allow_infinity=False)


@st.composite
def boxes(draw):
    x0 = draw(coords)
    y0 = draw(coords)
    w = draw(st.floats(min_value=0.1, max_value=40))
    h = draw(st.floats(min_value=0.1, max_value=40))
    return Quadrangle.from_bbox(x0, y0, x0 + w, y0 + h)


class TestPoint:
    def test_finite_required(self):
        with pytest.raises(ValueError):
            Point(float("nan"), 0.0)
        with pytest.raises(ValueError):
            Point(0.0, float("inf"))


class TestQuadrangleConstruction:
    def test_unit_square_ok(self):
        assert quad_area(UNIT) == 1.0

    def test_wrong_winding_rejected(self):
        # counter-clockwise on screen (negative shoelace in y-down coords)
        with pytest.raises(ValueError):
            Quadrangle.from_points([(0, 0), (0, 1), (1, 1), (1, 0)])

    def test_degenerate_rejected(self):
        with pytest.raises(ValueError):
            Quadrangle.from_points([(0, 0), (1, 0), (2, 0), (3, 0)])

    def test_self_intersecting_rejected(self):
        # bowtie with nonzero shoelace sum
        with pytest.raises(ValueError):
            Quadrangle.from_points([(0, 0), (2, 0), (0, 2.5), (2, 2)])


class TestArea:
    def test_unit_square(self):
        assert quad_area(UNIT) == 1.0

    def test_rectangle(self):
        assert quad_area(Quadrangle.from_bbox(0, 0, 4, 2)) == 8.0

    @given(boxes(), st.floats(min_value=-100, max_value=100), st.floats(min_value=-100, max_value=100))
    def test_translation_invariance(self, q, dx, dy):
        assert quad_area(q.translate(dx, dy)) == pytest.approx(quad_area(q), rel=1e-9)

    @given(boxes(), st.floats(min_value=0.1, max_value=10))
    def test_scaling_law(self, q, s):
        scaled = Quadrangle.from_points([(p.x * s, p.y * s) for p in q.vertices])
        assert quad_area(scaled) == pytest.approx(quad_area(q) * s * s, rel=1e-9)


class TestIntersection:
    def test_self_intersection_is_area(self):
        q = Quadrangle.from_bbox(2, 3, 7, 11)
        assert quad_intersection_area(q, q) == pytest.approx(quad_area(q))

    def test_disjoint(self):
        assert quad_intersection_area(square_at(0, 0), square_at(10, 10)) == 0.0

    def test_half_offset_unit_squares(self):
        # closed form: overlap rectangle is 0.5 x 1
        assert quad_intersection_area(square_at(0, 0), square_at(0.5, 0)) == pytest.approx(0.5)

    @given(boxes(), boxes())
    def test_bounded_by_min_area(self, a, b):
        inter = quad_intersection_area(a, b)
        assert inter <= min(quad_area(a), quad_area(b)) + 1e-9
        assert inter >= 0.0

    def test_axis_aligned_matches_rect_formula(self):
        # independent oracle: direct rectangle-overlap arithmetic
        cases = [
            ((0, 0, 4, 4), (2, 1, 6, 3)),
            ((0, 0, 5, 5), (5, 5, 9, 9)),
            ((1, 1, 2, 2), (0, 0, 10, 10)),
            ((0, 0, 3, 8), (1, 2, 2, 12)),
        ]
        for ra, rb in cases:
            expected = max(0.0, min(ra[2], rb[2]) - max(ra[0], rb[0])) * max(
                0.0, min(ra[3], rb[3]) - max(ra[1], rb[1])
            )
            got = quad_intersection_area(Quadrangle.from_bbox(*ra), Quadrangle.from_bbox(*rb))
            assert got == pytest.approx(expected, abs=1e-9)


class TestIoU:
    def test_identical(self):
        assert quad_iou(UNIT, UNIT) == pytest.approx(1.0)

    def test_disjoint(self):
        assert quad_iou(square_at(0, 0), square_at(5, 5)) == 0.0

    def test_half_offset(self):
        # 0.5 / (1 + 1 - 0.5)
        assert quad_iou(square_at(0, 0), square_at(0.5, 0)) == pytest.approx(1 / 3)

    @given(boxes(), boxes())
    def test_symmetry(self, a, b):
        assert quad_iou(a, b) == pytest.approx(quad_iou(b, a), abs=1e-9)

    @given(boxes(), boxes())
    def test_range(self, a, b):
        v = quad_iou(a, b)
        assert 0.0 <= v <= 1.0 + 1e-12


class TestCenter:
    def test_unit_square(self):
        c = quad_center(UNIT)
        assert (c.x, c.y) == (0.5, 0.5)

    def test_rectangle(self):
        c = quad_center(Quadrangle.from_bbox(0, 0, 4, 2))
        assert (c.x, c.y) == (2.0, 1.0)

    @given(boxes(), st.floats(min_value=-20, max_value=20), st.floats(min_value=-20, max_value=20))
    def test_translation_linearity(self, q, dx, dy):
        c0 = quad_center(q)
        c1 = quad_center(q.translate(dx, dy))
        assert c1.x == pytest.approx(c0.x + dx, abs=1e-9)
        assert c1.y == pytest.approx(c0.y + dy, abs=1e-9)


class TestQuadHelpers:
    def test_bbox_roundtrip(self):
        q = Quadrangle.from_bbox(1, 2, 5, 9)
        assert q.bbox() == (1, 2, 5, 9)
        assert q.is_axis_aligned()

    def test_non_axis_aligned(self):
        q = Quadrangle.from_points([(1, 0), (3, 1), (2, 3), (0, 2)])
        assert not q.is_axis_aligned()
        assert quad_area(q) == pytest.approx(5.0)  # shoelace by hand: 2*2+1 skew square
