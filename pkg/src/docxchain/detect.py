"""Text detection: locate text-line instances on a page.

The classical reference backend binarizes (Otsu), extracts 8-connected
components, filters noise and oversized ink, and merges components into
line-level instances. External backends are reached through the wire
protocol and normalized to the same output contract.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import Quadrangle
from .imgproc import connected_components, ink_mask
from .model import PageImage, TextInstance

MIN_COMPONENT_HEIGHT = 4
MAX_HEIGHT_PAGE_FRAC = 0.5
MIN_COMPONENT_AREA = 8
MERGE_MIN_VERTICAL_OVERLAP = 0.5   # of the smaller component height
MERGE_MAX_GAP_FACTOR = 1.5         # of the page median component height


@dataclass(frozen=True)
class BackendRef:
    """Backend selector: the in-process classical algorithm or an external endpoint."""

    kind: str = "classical"
    endpoint: str = ""

    def __post_init__(self):
        if self.kind not in ("classical", "external"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == "external" and not self.endpoint:
            raise ValueError("external backend requires an endpoint descriptor")

    @classmethod
    def classical(cls) -> "BackendRef":
        return cls("classical")

    @classmethod
    def external(cls, endpoint: str) -> "BackendRef":
        return cls("external", endpoint)


class _UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))

    def find(self, i: int) -> int:
        while self.parent[i] != i:
            self.parent[i] = self.parent[self.parent[i]]
            i = self.parent[i]
        return i

    def union(self, a: int, b: int) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra != rb:
            self.parent[rb] = ra


def classical_detect(page: PageImage) -> list[TextInstance]:
    """Deterministic line-level detector; every quad is axis-aligned with
    det_confidence 1.0."""
    mask = ink_mask(page)
    comps = [
        c
        for c in connected_components(mask)
        if c.height >= MIN_COMPONENT_HEIGHT
        and c.height <= MAX_HEIGHT_PAGE_FRAC * page.height
        and c.area >= MIN_COMPONENT_AREA
    ]
    if not comps:
        return []

    median_h = float(np.median([c.height for c in comps]))
    gap_max = MERGE_MAX_GAP_FACTOR * median_h

    order = sorted(range(len(comps)), key=lambda i: (comps[i].x0, comps[i].y0, comps[i].x1, comps[i].y1))
    uf = _UnionFind(len(comps))
    for oi in range(len(order)):
        a = comps[order[oi]]
        for oj in range(oi + 1, len(order)):
            b = comps[order[oj]]
            if b.x0 - a.x1 > gap_max:
                break
            overlap = min(a.y1, b.y1) - max(a.y0, b.y0)
            if overlap < MERGE_MIN_VERTICAL_OVERLAP * min(a.height, b.height):
                continue
            gap = max(a.x0, b.x0) - min(a.x1, b.x1)
            if gap <= gap_max:
                uf.union(order[oi], order[oj])

    groups: dict[int, list] = {}
    for i in range(len(comps)):
        groups.setdefault(uf.find(i), []).append(comps[i])

    instances = []
    for members in groups.values():
        x0 = min(c.x0 for c in members) - 1
        y0 = min(c.y0 for c in members) - 1
        x1 = max(c.x1 for c in members) + 1
        y1 = max(c.y1 for c in members) + 1
        quad = Quadrangle.from_bbox(
            max(0.0, float(x0)), max(0.0, float(y0)),
            min(float(page.width), float(x1)), min(float(page.height), float(y1)),
        )
        instances.append(TextInstance(quad, 1.0))
    instances.sort(key=lambda t: (t.quad.bbox()[1], t.quad.bbox()[0]))
    return instances


def detect_text(page: PageImage, backend: BackendRef | None = None) -> list[TextInstance]:
    """Detect all text instances; output is sorted by (min-y, min-x) and
    carries no recognized content yet."""
    backend = backend or BackendRef.classical()
    if backend.kind == "classical":
        return classical_detect(page)
    from . import bridge

    instances = bridge.detect_via_backend(backend.endpoint, page)
    return sorted(instances, key=lambda t: (t.quad.bbox()[1], t.quad.bbox()[0]))
