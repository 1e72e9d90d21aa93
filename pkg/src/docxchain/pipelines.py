"""The three composed pipelines and the reading-order rule they share."""

from __future__ import annotations

import time
from dataclasses import dataclass, field

from .detect import BackendRef, detect_text
from .errors import NotATable
from .geometry import quad_area, quad_intersection_area
from .layout import LayoutParams, analyze_layout
from .model import (
    Document,
    LayoutCategory,
    LayoutRegion,
    PageImage,
    RegionTableElement,
    RegionTextElement,
    StructuredDocument,
    Table,
    TableCell,
    TextInstance,
)
from .recognize import read_instances
from .table import assign_text_to_cells, build_grid, detect_separators


@dataclass(frozen=True)
class Backends:
    """Per-task backend selection; defaults to the classical algorithms."""

    detection: BackendRef = field(default_factory=BackendRef.classical)
    recognition: BackendRef = field(default_factory=BackendRef.classical)
    layout: BackendRef = field(default_factory=BackendRef.classical)
    table: BackendRef = field(default_factory=BackendRef.classical)

    @classmethod
    def classical(cls) -> "Backends":
        return cls()


@dataclass(frozen=True)
class PageReading:
    page_index: int
    instances: tuple[TextInstance, ...]


@dataclass(frozen=True)
class PageTable:
    page_index: int
    region: LayoutRegion
    table: Table


@dataclass(frozen=True)
class PageStructure:
    page_index: int
    structure: StructuredDocument


PageResult = PageReading | PageTable | PageStructure


@dataclass
class PipelineReport:
    pipeline: str
    source: str
    pages: list[PageResult]
    warnings: list[str] = field(default_factory=list)
    timings_ms: dict[str, float] = field(default_factory=dict)


def reading_order(instances: list[TextInstance]) -> list[TextInstance]:
    """Deterministic reading permutation: group into lines by >= 50% vertical
    overlap (transitive), order lines by mean top-y, then left-to-right.

    The final tie-break runs through the full vertex tuple so the result is
    invariant under input shuffling; the input index only separates exact
    duplicates.
    """
    n = len(instances)
    if n <= 1:
        return list(instances)

    boxes = [inst.quad.bbox() for inst in instances]
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            a, b = boxes[i], boxes[j]
            overlap = min(a[3], b[3]) - max(a[1], b[1])
            smaller = min(a[3] - a[1], b[3] - b[1])
            if overlap >= 0.5 * smaller:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri

    lines: dict[int, list[int]] = {}
    for i in range(n):
        lines.setdefault(find(i), []).append(i)

    def vertex_key(i):
        return tuple((p.x, p.y) for p in instances[i].quad.vertices)

    line_list = []
    for members in lines.values():
        mean_top = sum(boxes[i][1] for i in members) / len(members)
        members.sort(key=lambda i: (boxes[i][0], boxes[i][1], vertex_key(i), i))
        line_list.append((mean_top, boxes[members[0]][0], vertex_key(members[0]), members))
    line_list.sort(key=lambda t: t[:3])

    return [instances[i] for _, _, _, members in line_list for i in members]


def general_text_reading(doc: Document, backends: Backends | None = None) -> PipelineReport:
    """Detect and recognize all text instances, in reading order."""
    backends = backends or Backends.classical()
    report = PipelineReport("read", doc.source_id, [])
    t_detect = t_recognize = 0.0
    for index, page in enumerate(doc.pages):
        t0 = time.perf_counter()
        instances = detect_text(page, backends.detection)
        t1 = time.perf_counter()
        recognized, warnings = read_instances(page, instances, backends.recognition)
        t2 = time.perf_counter()
        report.warnings.extend(f"page {index}: {w}" for w in warnings)
        report.pages.append(PageReading(index, tuple(reading_order(recognized))))
        t_detect += t1 - t0
        t_recognize += t2 - t1
    report.timings_ms = {"detect": t_detect * 1000, "recognize": t_recognize * 1000}
    return report


def _parse_table_region(
    page: PageImage,
    rect: tuple[int, int, int, int],
    backends: Backends,
    warnings: list[str],
) -> Table:
    """Run table structure + content recognition on a page rectangle; cell
    quads come back in page coordinates."""
    x0, y0 = int(rect[0]), int(rect[1])
    crop = page.crop(*rect)
    if backends.table.kind == "external":
        from . import bridge

        table = bridge.table_via_backend(backends.table.endpoint, crop)
    else:
        table = build_grid(detect_separators(crop))
    instances = detect_text(crop, backends.detection)
    recognized, rec_warnings = read_instances(crop, instances, backends.recognition)
    warnings.extend(rec_warnings)
    table, assign_warnings = assign_text_to_cells(table, recognized)
    warnings.extend(assign_warnings)
    if x0 or y0:
        table = Table(
            table.n_rows,
            table.n_cols,
            tuple(
                TableCell(c.row_start, c.row_end, c.col_start, c.col_end,
                          c.quad.translate(x0, y0), c.content)
                for c in table.cells
            ),
        )
    return table


def table_parsing(
    doc: Document,
    backends: Backends | None = None,
    region: tuple[int, int, int, int] | None = None,
) -> PipelineReport:
    """Table structure recognition plus textual content recognition.

    The region defaults to the full page; every processed page must contain a
    ruled table there.
    """
    backends = backends or Backends.classical()
    report = PipelineReport("table", doc.source_id, [])
    t0 = time.perf_counter()
    for index, page in enumerate(doc.pages):
        rect = region or (0, 0, page.width, page.height)
        if not (0 <= rect[0] < rect[2] <= page.width and 0 <= rect[1] < rect[3] <= page.height):
            raise ValueError(f"region {rect} outside page {page.width}x{page.height}")
        table = _parse_table_region(page, rect, backends, report.warnings)
        region_obj = LayoutRegion(0, tuple(map(float, rect)), LayoutCategory.TABLE, 0.9)
        report.pages.append(PageTable(index, region_obj, table))
    report.timings_ms = {"table": (time.perf_counter() - t0) * 1000}
    return report


def document_structurization(
    doc: Document,
    backends: Backends | None = None,
    params: LayoutParams | None = None,
) -> PipelineReport:
    """Layout analysis plus text detection/recognition; table regions are
    additionally parsed into grids."""
    backends = backends or Backends.classical()
    params = params or LayoutParams()
    report = PipelineReport("structurize", doc.source_id, [])
    timings = {"detect": 0.0, "layout": 0.0, "recognize": 0.0, "assemble": 0.0}

    for index, page in enumerate(doc.pages):
        t0 = time.perf_counter()
        instances = detect_text(page, backends.detection)
        t1 = time.perf_counter()
        regions = analyze_layout(page, params, backends.layout,
                                 detected_text=instances, warnings=report.warnings)
        t2 = time.perf_counter()
        recognized, rec_warnings = read_instances(page, instances, backends.recognition)
        report.warnings.extend(f"page {index}: {w}" for w in rec_warnings)
        t3 = time.perf_counter()

        assigned: dict[int, list[TextInstance]] = {r.id: [] for r in regions}
        unassigned: list[TextInstance] = []
        region_quads = {r.id: r.quad() for r in regions}
        region_areas = {r.id: quad_area(region_quads[r.id]) for r in regions}
        for inst in recognized:
            best = None
            for r in regions:
                overlap = quad_intersection_area(inst.quad, region_quads[r.id])
                if overlap <= 0:
                    continue
                key = (-overlap, region_areas[r.id], r.id)
                if best is None or key < best[0]:
                    best = (key, r.id)
            if best is None:
                unassigned.append(inst)
            else:
                assigned[best[1]].append(inst)

        elements = []
        for r in regions:
            members = tuple(reading_order(assigned[r.id]))
            if r.category is LayoutCategory.TABLE:
                try:
                    rect = tuple(int(v) for v in r.bbox)
                    table = _parse_table_region(page, rect, backends, report.warnings)
                    elements.append(RegionTableElement(r, table, members))
                    continue
                except NotATable as exc:
                    report.warnings.append(
                        f"page {index}: region {r.id} looked like a table but was not: {exc}"
                    )
                    r = LayoutRegion(r.id, r.bbox, LayoutCategory.TEXT, 0.6)
            elements.append(RegionTextElement(r, members))

        if unassigned:
            xs0 = min(i.quad.bbox()[0] for i in unassigned)
            ys0 = min(i.quad.bbox()[1] for i in unassigned)
            xs1 = max(i.quad.bbox()[2] for i in unassigned)
            ys1 = max(i.quad.bbox()[3] for i in unassigned)
            catchall = LayoutRegion(len(regions), (xs0, ys0, xs1, ys1), LayoutCategory.OTHER, 0.5)
            elements.append(RegionTextElement(catchall, tuple(reading_order(unassigned))))

        report.pages.append(PageStructure(index, StructuredDocument(tuple(elements))))
        t4 = time.perf_counter()
        timings["detect"] += (t1 - t0) * 1000
        timings["layout"] += (t2 - t1) * 1000
        timings["recognize"] += (t3 - t2) * 1000
        timings["assemble"] += (t4 - t3) * 1000

    report.timings_ms = timings
    return report
