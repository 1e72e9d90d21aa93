"""Exact 2-D geometry for quadrangles in image coordinates (origin top-left, y down)."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self):
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"point coordinates must be finite, got ({self.x}, {self.y})")


@dataclass(frozen=True)
class Quadrangle:
    """Four vertices in fixed order: top-left, top-right, bottom-right, bottom-left.

    With y growing downward this order is clockwise on screen and yields a
    positive shoelace sum, which the constructor enforces along with simplicity.
    """

    vertices: tuple[Point, Point, Point, Point]

    def __post_init__(self):
        if len(self.vertices) != 4:
            raise ValueError("a quadrangle has exactly 4 vertices")
        if _signed_area(self.vertices) <= 0:
            raise ValueError("vertex order must be top-left, top-right, bottom-right, bottom-left")
        if _self_intersects(self.vertices):
            raise ValueError("quadrangle must be a simple polygon")

    @classmethod
    def from_points(cls, pts) -> "Quadrangle":
        return cls(tuple(Point(float(x), float(y)) for x, y in pts))

    @classmethod
    def from_bbox(cls, x0: float, y0: float, x1: float, y1: float) -> "Quadrangle":
        return cls.from_points([(x0, y0), (x1, y0), (x1, y1), (x0, y1)])

    def bbox(self) -> tuple[float, float, float, float]:
        xs = [p.x for p in self.vertices]
        ys = [p.y for p in self.vertices]
        return min(xs), min(ys), max(xs), max(ys)

    def is_axis_aligned(self) -> bool:
        tl, tr, br, bl = self.vertices
        return tl.y == tr.y and bl.y == br.y and tl.x == bl.x and tr.x == br.x

    def translate(self, dx: float, dy: float) -> "Quadrangle":
        return Quadrangle.from_points([(p.x + dx, p.y + dy) for p in self.vertices])


def _signed_area(vertices) -> float:
    s = 0.0
    n = len(vertices)
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        s += a.x * b.y - b.x * a.y
    return s / 2.0


def _orient(a: Point, b: Point, c: Point) -> float:
    return (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)


def _segments_cross(p1, p2, p3, p4) -> bool:
    d1 = _orient(p3, p4, p1)
    d2 = _orient(p3, p4, p2)
    d3 = _orient(p1, p2, p3)
    d4 = _orient(p1, p2, p4)
    return ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0))


def _self_intersects(v) -> bool:
    # Only the two non-adjacent edge pairs can cross in a quad.
    return _segments_cross(v[0], v[1], v[2], v[3]) or _segments_cross(v[1], v[2], v[3], v[0])


def quad_area(q: Quadrangle) -> float:
    """Polygon area by the shoelace formula, in square pixels."""
    return _signed_area(q.vertices)


def quad_center(q: Quadrangle) -> Point:
    """Arithmetic mean of the four vertices."""
    return Point(
        sum(p.x for p in q.vertices) / 4.0,
        sum(p.y for p in q.vertices) / 4.0,
    )


def _convex_hull(points: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Monotone-chain hull, counter-clockwise in math coordinates."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _clip_polygon(subject: list[tuple[float, float]], clip: list[tuple[float, float]]) -> list[tuple[float, float]]:
    """Sutherland-Hodgman clipping of a polygon by a convex clip polygon (both CCW)."""
    output = subject
    n = len(clip)
    for i in range(n):
        if not output:
            return []
        a, b = clip[i], clip[(i + 1) % n]
        input_pts = output
        output = []

        def inside(p):
            return (b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]) >= 0

        def intersect(p, q):
            dx1, dy1 = q[0] - p[0], q[1] - p[1]
            dx2, dy2 = b[0] - a[0], b[1] - a[1]
            denom = dx1 * dy2 - dy1 * dx2
            t = ((a[0] - p[0]) * dy2 - (a[1] - p[1]) * dx2) / denom
            return (p[0] + t * dx1, p[1] + t * dy1)

        for j in range(len(input_pts)):
            cur, nxt = input_pts[j], input_pts[(j + 1) % len(input_pts)]
            if inside(cur):
                output.append(cur)
                if not inside(nxt):
                    output.append(intersect(cur, nxt))
            elif inside(nxt):
                output.append(intersect(cur, nxt))
    return output


def _poly_area(pts: list[tuple[float, float]]) -> float:
    if len(pts) < 3:
        return 0.0
    s = 0.0
    for i in range(len(pts)):
        x0, y0 = pts[i]
        x1, y1 = pts[(i + 1) % len(pts)]
        s += x0 * y1 - x1 * y0
    return abs(s) / 2.0


def quad_intersection_area(a: Quadrangle, b: Quadrangle) -> float:
    """Area of the convex-clip intersection.

    Non-convex inputs are replaced by their convex hulls first, so the result
    is exact for convex quads and an upper-bound approximation otherwise.
    """
    ha = _convex_hull([(p.x, p.y) for p in a.vertices])
    hb = _convex_hull([(p.x, p.y) for p in b.vertices])
    if len(ha) < 3 or len(hb) < 3:
        return 0.0
    return _poly_area(_clip_polygon(ha, hb))


def quad_iou(a: Quadrangle, b: Quadrangle) -> float:
    """Intersection over union, in [0, 1]."""
    inter = quad_intersection_area(a, b)
    union = quad_area(a) + quad_area(b) - inter
    if union <= 0:
        return 0.0
    return inter / union
