"""Layout analysis: recursive projection-profile segmentation plus rule-based
region categorization."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

import re

from .detect import BackendRef, detect_text
from .geometry import Quadrangle, quad_center
from .imgproc import ink_bbox, ink_mask
from .model import LayoutCategory, LayoutRegion, PageImage, TextInstance

# a line "begins with a bullet" when it starts with -, *, or digits + . / )
BULLET_RE = re.compile(r"^(\d{1,3}[.)]|[-*])(\s|$)")

_RULE_CONFIDENCE = {
    "table": 0.9,
    "figure": 0.7,
    "header": 0.9,
    "footer": 0.9,
    "title": 0.7,
    "list": 0.7,
    "text": 0.6,
}


@dataclass(frozen=True)
class LayoutParams:
    min_gap_frac: float = 0.012    # of the page max dimension
    min_region_px: int = 24        # smallest kept region side
    header_band: float = 0.06      # page-height fraction
    footer_band: float = 0.06
    title_scale: float = 1.5       # line-height multiple over the page median

    def __post_init__(self):
        if min(self.min_gap_frac, self.min_region_px, self.header_band,
               self.footer_band, self.title_scale) <= 0:
            raise ValueError("layout parameters must be positive")
        if self.header_band >= 0.5 or self.footer_band >= 0.5:
            raise ValueError("header/footer bands must stay below half the page")


def _widest_false_run(values: np.ndarray) -> tuple[int, int, int]:
    """(length, start, end) of the longest False run; ties pick the first."""
    best = (0, 0, 0)
    run_start = None
    for i, v in enumerate(values):
        if not v:
            if run_start is None:
                run_start = i
        elif run_start is not None:
            length = i - run_start
            if length > best[0]:
                best = (length, run_start, i)
            run_start = None
    # the array starts and ends with ink, so no trailing run to close
    return best


def xy_cut(mask: np.ndarray, params: LayoutParams | None = None) -> list[tuple[int, int, int, int]]:
    """Recursively split on the widest interior whitespace band; leaves are
    tight ink boxes (x0, y0, x1, y1), discarded when smaller than
    min_region_px on either side."""
    params = params or LayoutParams()
    h, w = mask.shape
    min_gap = params.min_gap_frac * max(h, w)
    leaves: list[tuple[int, int, int, int]] = []

    def recurse(x0: int, y0: int, x1: int, y1: int) -> None:
        box = ink_bbox(mask[y0:y1, x0:x1])
        if box is None:
            return
        ax0, ay0 = x0 + box[0], y0 + box[1]
        ax1, ay1 = x0 + box[2], y0 + box[3]
        tight = mask[ay0:ay1, ax0:ax1]
        row_gap = _widest_false_run(tight.any(axis=1))
        col_gap = _widest_false_run(tight.any(axis=0))
        widest = max(row_gap[0], col_gap[0])
        if widest >= min_gap:
            if row_gap[0] >= col_gap[0]:  # tie prefers the horizontal cut
                cut = ay0 + (row_gap[1] + row_gap[2]) // 2
                recurse(ax0, ay0, ax1, cut)
                recurse(ax0, cut, ax1, ay1)
            else:
                cut = ax0 + (col_gap[1] + col_gap[2]) // 2
                recurse(ax0, ay0, cut, ay1)
                recurse(cut, ay0, ax1, ay1)
            return
        if ax1 - ax0 >= params.min_region_px and ay1 - ay0 >= params.min_region_px:
            leaves.append((ax0, ay0, ax1, ay1))

    recurse(0, 0, w, h)
    return leaves


def _reading_sort(quads: list[Quadrangle]) -> list[int]:
    """Source indices of the quads in reading order."""
    from .pipelines import reading_order

    pseudo = [TextInstance(q, 1.0) for q in quads]
    pos = {id(p): i for i, p in enumerate(pseudo)}
    return [pos[id(p)] for p in reading_order(pseudo)]


def _grid_evidence(page: PageImage, rect: tuple[int, int, int, int]) -> tuple[int, int]:
    """Separator counts inside a rect, the evidence for the table rule."""
    from .table import scan_separators

    crop = page.crop(*rect)
    rows, cols, _ = scan_separators(crop)
    return len(rows), len(cols)


def _looks_like_bullet(page: PageImage, inst: TextInstance) -> bool:
    from .recognize import recognize_text

    try:
        content = recognize_text(page, inst)
    except Exception:
        return False
    return bool(BULLET_RE.match(content.text))


def categorize_region(
    rect: tuple[int, int, int, int],
    page: PageImage,
    detected_text: list[TextInstance],
    grid_evidence: tuple[int, int],
    params: LayoutParams | None = None,
    page_median_line_height: float | None = None,
) -> tuple[LayoutCategory, float]:
    """First matching rule wins; the rule order is part of the contract.

    ``detected_text`` must already be restricted to instances whose center
    lies inside the rect.
    """
    params = params or LayoutParams()
    x0, y0, x1, y1 = rect

    # 1. ruling grid on both axes
    if grid_evidence[0] >= 2 and grid_evidence[1] >= 2:
        return LayoutCategory.TABLE, _RULE_CONFIDENCE["table"]

    # 2. ink mostly outside text quads
    mask = ink_mask(page.crop(*rect))
    covered = np.zeros_like(mask)
    for inst in detected_text:
        bx0, by0, bx1, by1 = inst.quad.bbox()
        cx0 = max(0, int(np.floor(bx0)) - x0)
        cy0 = max(0, int(np.floor(by0)) - y0)
        cx1 = min(x1 - x0, int(np.ceil(bx1)) - x0)
        cy1 = min(y1 - y0, int(np.ceil(by1)) - y0)
        if cx1 > cx0 and cy1 > cy0:
            covered[cy0:cy1, cx0:cx1] = True
    ink_total = int(mask.sum())
    text_ink = int((mask & covered).sum())
    if ink_total > 0 and text_ink / ink_total < 0.3:
        return LayoutCategory.FIGURE, _RULE_CONFIDENCE["figure"]

    # 3 / 4. header and footer bands
    if y1 <= params.header_band * page.height:
        return LayoutCategory.HEADER, _RULE_CONFIDENCE["header"]
    if y0 >= page.height - params.footer_band * page.height:
        return LayoutCategory.FOOTER, _RULE_CONFIDENCE["footer"]

    # 5. few lines, oversized type
    heights = [inst.quad.bbox()[3] - inst.quad.bbox()[1] for inst in detected_text]
    if heights and page_median_line_height:
        if len(detected_text) <= 2 and float(np.median(heights)) >= params.title_scale * page_median_line_height:
            return LayoutCategory.TITLE, _RULE_CONFIDENCE["title"]

    # 6. bullet/enumeration prefixes
    if len(detected_text) >= 2 and all(_looks_like_bullet(page, i) for i in detected_text):
        return LayoutCategory.LIST, _RULE_CONFIDENCE["list"]

    return LayoutCategory.TEXT, _RULE_CONFIDENCE["text"]


def analyze_layout(
    page: PageImage,
    params: LayoutParams | None = None,
    backend: BackendRef | None = None,
    detected_text: list[TextInstance] | None = None,
    warnings: list[str] | None = None,
) -> list[LayoutRegion]:
    """Segment and categorize the page; region ids follow reading order.

    ``detected_text`` saves re-detection when the caller already ran it;
    ``warnings`` collects category-mapping notes from external backends.
    """
    from .pipelines import reading_order

    params = params or LayoutParams()
    backend = backend or BackendRef.classical()

    if backend.kind == "external":
        from . import bridge

        raw, notes = bridge.layout_via_backend(backend.endpoint, page)
        if warnings is not None:
            warnings.extend(notes)
        order = _reading_sort([Quadrangle.from_bbox(*bbox) for bbox, _, _ in raw])
        return [
            LayoutRegion(rid, raw[src][0], raw[src][1], raw[src][2])
            for rid, src in enumerate(order)
        ]

    if detected_text is None:
        detected_text = detect_text(page)
    mask = ink_mask(page)
    rects = xy_cut(mask, params)
    if not rects:
        return []
    heights = [i.quad.bbox()[3] - i.quad.bbox()[1] for i in detected_text]
    median_height = float(np.median(heights)) if heights else None

    order = _reading_sort([Quadrangle.from_bbox(*map(float, r)) for r in rects])
    ordered_rects = [rects[src] for src in order]

    regions = []
    for rid, rect in enumerate(ordered_rects):
        inside = [
            inst for inst in detected_text
            if rect[0] <= quad_center(inst.quad).x < rect[2] and rect[1] <= quad_center(inst.quad).y < rect[3]
        ]
        category, confidence = categorize_region(
            rect, page, inside, _grid_evidence(page, rect), params, median_height
        )
        regions.append(LayoutRegion(rid, tuple(map(float, rect)), category, confidence))
    return regions
