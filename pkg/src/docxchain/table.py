"""Table structure recognition for tables with visible ruling lines.

Separators are pixel rows/columns whose longest contiguous ink run covers most
of the region; grid units merge across missing interior segments, and every
merged group must form a full rectangle.
"""

from __future__ import annotations

import csv
import html
import io
from dataclasses import dataclass

import numpy as np

from .errors import CsvSpanUnsupported, NonRectangularSpan, NotATable
from .geometry import Quadrangle, quad_area, quad_intersection_area
from .imgproc import ink_bbox, ink_mask
from .model import PageImage, Table, TableCell, TextContent, TextInstance

LINE_COVERAGE_FRAC = 0.6   # of region extent, longest single ink run
SEPARATOR_MERGE_PX = 3     # adjacent candidate lines closer than this collapse
EDGE_BAND_PX = 2           # ink searched within +/- this of a separator
EDGE_COVERAGE_FRAC = 0.8   # of the shared segment length


@dataclass(frozen=True)
class SeparatorSet:
    """Detected ruling grid: separator pixel positions plus interior-edge presence.

    ``h_edges[i][c]`` tells whether the segment of interior row separator i+1
    between column units c..c+1 exists; ``v_edges[r][j]`` likewise for interior
    column separators. Outer borders are always the first/last separators.
    """

    row_seps: tuple[int, ...]
    col_seps: tuple[int, ...]
    h_edges: tuple[tuple[bool, ...], ...]
    v_edges: tuple[tuple[bool, ...], ...]

    @property
    def n_rows(self) -> int:
        return len(self.row_seps) - 1

    @property
    def n_cols(self) -> int:
        return len(self.col_seps) - 1


def _longest_run(bools: np.ndarray) -> np.ndarray:
    """Longest contiguous True run per row of a 2-D boolean array."""
    h, w = bools.shape
    out = np.zeros(h, dtype=np.int64)
    run = np.zeros(h, dtype=np.int64)
    for x in range(w):
        col = bools[:, x]
        run = np.where(col, run + 1, 0)
        out = np.maximum(out, run)
    return out


def _candidate_positions(run_lengths: np.ndarray, extent: int) -> list[int]:
    candidates = np.flatnonzero(run_lengths >= LINE_COVERAGE_FRAC * extent)
    if candidates.size == 0:
        return []
    groups: list[list[int]] = [[int(candidates[0])]]
    for p in candidates[1:]:
        if p - groups[-1][-1] <= SEPARATOR_MERGE_PX:
            groups[-1].append(int(p))
        else:
            groups.append([int(p)])
    return [(g[0] + g[-1]) // 2 for g in groups]


def scan_separators(region_img: PageImage) -> tuple[list[int], list[int], np.ndarray]:
    """Separator candidates of a binarized region: (row positions, col positions, mask).

    Coverage is measured against the tight ink extent, not the crop extent, so
    whitespace margins around the table do not dilute ruling lines. Returned
    positions are in crop coordinates.
    """
    mask = ink_mask(region_img)
    box = ink_bbox(mask)
    if box is None:
        return [], [], mask
    x0, y0, x1, y1 = box
    tight = mask[y0:y1, x0:x1]
    rows = [y0 + p for p in _candidate_positions(_longest_run(tight), x1 - x0)]
    cols = [x0 + p for p in _candidate_positions(_longest_run(tight.T), y1 - y0)]
    return rows, cols, mask


def _edge_present(mask: np.ndarray, sep: int, lo: int, hi: int, horizontal: bool) -> bool:
    """Ink coverage of the segment [lo, hi] within +/- EDGE_BAND_PX of a separator."""
    if horizontal:
        band = mask[max(0, sep - EDGE_BAND_PX):sep + EDGE_BAND_PX + 1, lo:hi + 1]
    else:
        band = mask[lo:hi + 1, max(0, sep - EDGE_BAND_PX):sep + EDGE_BAND_PX + 1].T
    coverage = band.any(axis=0).mean()
    return bool(coverage >= EDGE_COVERAGE_FRAC)


def _segment_runs(mask: np.ndarray, seps: list[int]) -> np.ndarray:
    """Per pixel-row, True when some full segment between adjacent separator
    columns is covered by one contiguous ink run (>= EDGE_COVERAGE_FRAC)."""
    hits = np.zeros(mask.shape[0], dtype=bool)
    for lo, hi in zip(seps[:-1], seps[1:]):
        seg = mask[:, lo:hi + 1]
        need = EDGE_COVERAGE_FRAC * seg.shape[1]
        hits |= _longest_run(seg) >= need
    return hits


def _refine_candidates(mask: np.ndarray, own: list[int], perpendicular: list[int]) -> list[int]:
    """Add separators that are only drawn across some cells.

    A partially drawn ruling line always terminates on crossing separators, so
    it fully covers at least one segment between adjacent perpendicular
    separators even though it falls short of the whole-extent threshold.
    """
    hits = _segment_runs(mask, perpendicular)
    for pos in np.flatnonzero(hits):
        if all(abs(int(pos) - s) > SEPARATOR_MERGE_PX for s in own):
            own = sorted(own + [int(pos)])
    return own


def detect_separators(region_img: PageImage) -> SeparatorSet:
    """Find the ruling grid of a table crop; raises NotATable when fewer than
    two separators exist on either axis.

    Whole-extent ink runs seed the grid (outer borders always qualify); the
    grid is then refined iteratively so ruling lines interrupted by spanned
    cells are still found.
    """
    rows, cols, mask = scan_separators(region_img)
    if len(rows) < 2 or len(cols) < 2:
        raise NotATable(
            f"found {len(rows)} horizontal and {len(cols)} vertical separators; need >= 2 of each"
        )
    while True:
        new_rows = _refine_candidates(mask, rows, cols)
        new_cols = _refine_candidates(mask.T, cols, new_rows)
        if new_rows == rows and new_cols == cols:
            break
        rows, cols = new_rows, new_cols
    h_edges = tuple(
        tuple(_edge_present(mask, rows[i], cols[c], cols[c + 1], True) for c in range(len(cols) - 1))
        for i in range(1, len(rows) - 1)
    )
    v_edges = tuple(
        tuple(_edge_present(mask, cols[j], rows[r], rows[r + 1], False) for j in range(1, len(cols) - 1))
        for r in range(len(rows) - 1)
    )
    return SeparatorSet(tuple(rows), tuple(cols), h_edges, v_edges)


class _UnitUnion:
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


def build_grid(seps: SeparatorSet) -> Table:
    """Merge grid units across absent interior edges into spanned cells.

    Raises NonRectangularSpan when a merged group does not fill its bounding
    rectangle of units.
    """
    n_rows, n_cols = seps.n_rows, seps.n_cols
    uf = _UnitUnion(n_rows * n_cols)
    for i in range(n_rows - 1):
        for c in range(n_cols):
            if not seps.h_edges[i][c]:
                uf.union(i * n_cols + c, (i + 1) * n_cols + c)
    for r in range(n_rows):
        for j in range(n_cols - 1):
            if not seps.v_edges[r][j]:
                uf.union(r * n_cols + j, r * n_cols + j + 1)

    groups: dict[int, list[tuple[int, int]]] = {}
    for r in range(n_rows):
        for c in range(n_cols):
            groups.setdefault(uf.find(r * n_cols + c), []).append((r, c))

    cells = []
    for members in groups.values():
        r0 = min(r for r, _ in members)
        r1 = max(r for r, _ in members) + 1
        c0 = min(c for _, c in members)
        c1 = max(c for _, c in members) + 1
        if len(members) != (r1 - r0) * (c1 - c0):
            raise NonRectangularSpan(
                f"merged units {sorted(members)} do not form a full rectangle "
                f"[{r0}:{r1}) x [{c0}:{c1})"
            )
        quad = Quadrangle.from_bbox(
            float(seps.col_seps[c0]), float(seps.row_seps[r0]),
            float(seps.col_seps[c1]), float(seps.row_seps[r1]),
        )
        cells.append(TableCell(r0, r1, c0, c1, quad))
    cells.sort(key=lambda c: (c.row_start, c.col_start))
    return Table(n_rows, n_cols, tuple(cells))


def assign_text_to_cells(table: Table, instances: list[TextInstance]) -> tuple[Table, list[str]]:
    """Assign recognized instances to the cell maximizing overlap area.

    Ties prefer the smaller cell, then the lower cell index; instances that
    overlap no cell are dropped with a warning. Cell content joins its
    instances' texts in reading order with single spaces.
    """
    from .pipelines import reading_order

    warnings: list[str] = []
    buckets: dict[int, list[TextInstance]] = {}
    for idx, inst in enumerate(instances):
        best = None
        for cell_index, cell in enumerate(table.cells):
            overlap = quad_intersection_area(inst.quad, cell.quad)
            if overlap <= 0:
                continue
            key = (-overlap, quad_area(cell.quad), cell_index)
            if best is None or key < best[0]:
                best = (key, cell_index)
        if best is None:
            text = inst.content.text if inst.content else ""
            warnings.append(f"instance {idx} ({text!r}) overlaps no cell; dropped")
            continue
        buckets.setdefault(best[1], []).append(inst)

    new_cells = []
    for cell_index, cell in enumerate(table.cells):
        assigned = buckets.get(cell_index)
        if not assigned:
            new_cells.append(cell)
            continue
        ordered = reading_order(assigned)
        text = " ".join(i.content.text for i in ordered if i.content and i.content.text)
        confidence = min(i.content.confidence for i in ordered if i.content)
        new_cells.append(TableCell(cell.row_start, cell.row_end, cell.col_start, cell.col_end,
                                   cell.quad, TextContent(text, confidence)))
    return Table(table.n_rows, table.n_cols, tuple(new_cells)), warnings


def export_table(table: Table, format: str) -> str:
    """Export a parsed table as json, html, or csv text."""
    if format == "json":
        from .serialize import canonical_json, table_payload

        return canonical_json(table_payload(table))
    if format == "html":
        return _to_html(table)
    if format == "csv":
        return _to_csv(table)
    raise ValueError(f"unknown export format {format!r}")


def _to_html(table: Table) -> str:
    by_row: dict[int, list[TableCell]] = {}
    for cell in table.cells:
        by_row.setdefault(cell.row_start, []).append(cell)
    lines = ["<table>"]
    for r in range(table.n_rows):
        cells = sorted(by_row.get(r, []), key=lambda c: c.col_start)
        if not cells:
            continue
        parts = ["  <tr>"]
        for cell in cells:
            attrs = ""
            if cell.row_end - cell.row_start > 1:
                attrs += f' rowspan="{cell.row_end - cell.row_start}"'
            if cell.col_end - cell.col_start > 1:
                attrs += f' colspan="{cell.col_end - cell.col_start}"'
            text = html.escape(cell.content.text) if cell.content else ""
            parts.append(f"<td{attrs}>{text}</td>")
        parts.append("</tr>")
        lines.append("".join(parts))
    lines.append("</table>")
    return "\n".join(lines) + "\n"


def _to_csv(table: Table) -> str:
    if any(c.row_end - c.row_start > 1 or c.col_end - c.col_start > 1 for c in table.cells):
        raise CsvSpanUnsupported("csv export requires every cell span to be 1x1")
    grid = [[""] * table.n_cols for _ in range(table.n_rows)]
    for cell in table.cells:
        grid[cell.row_start][cell.col_start] = cell.content.text if cell.content else ""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(grid)
    return buf.getvalue()
