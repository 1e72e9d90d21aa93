"""Deterministic synthetic page generator with exact ground truth.

The generator and the classical recognizer share the embedded font, so text
round-trips exactly at integer scales. Rendered pages obey the geometric
contracts the classical backends assume; violations raise ``SpecOverlap``:

- blocks are separated by at least ``min_gap`` on one axis, so recursive
  projection cutting isolates each block;
- table cell text keeps a >= 13 * scale horizontal clearance from ruling
  lines, so detected lines never merge across a cell border;
- text is rendered at least 2 px from the page edge, leaving room for the
  1 px detection padding.

Strings are whitespace-normalized (runs collapsed, ends stripped) before
rendering and in the recorded truth, matching recognizer output.
"""

from __future__ import annotations

import argparse
import json
import random
import re
import sys
from dataclasses import dataclass, field

import numpy as np

from .errors import SpecOverlap
from .fontdata import GLYPH_H, GLYPH_W, glyph_bitmap
from .layout import BULLET_RE
from .model import PageImage

KIND_CATEGORY = {
    "title": "title",
    "paragraph": "text",
    "list": "list",
    "table": "table",
    "figure": "figure",
    "header": "header",
    "footer": "footer",
}

# Geometry contracts shared with the classical backends.
TABLE_TEXT_PAD_X = 13  # per scale unit; keeps cross-border line gaps > 1.5 * glyph height
TABLE_TEXT_PAD_Y = 4
PAGE_MARGIN = 2


def normalize_text(text: str) -> str:
    return re.sub(r"\s+", " ", text).strip()


@dataclass(frozen=True)
class TableBlock:
    """Explicit rectangular partition plus per-cell strings keyed by span origin."""

    n_rows: int
    n_cols: int
    spans: tuple[tuple[int, int, int, int], ...]  # (row_start, row_end, col_start, col_end)
    cell_texts: dict[tuple[int, int], str] = field(default_factory=dict)
    row_height: int = 40
    col_width: int = 110


@dataclass(frozen=True)
class BlockSpec:
    kind: str
    x: int
    y: int
    lines: tuple[str, ...] = ()
    scale: int = 1
    table: TableBlock | None = None
    figure_width: int = 160
    figure_height: int = 110
    figure_seed: int = 0
    leading: int = 5


@dataclass(frozen=True)
class PageSpec:
    seed: int
    width: int
    height: int
    blocks: tuple[BlockSpec, ...]
    min_gap: int = 32


@dataclass(frozen=True)
class TruthLine:
    bbox: tuple[float, float, float, float]  # padded ink box, matches detector output
    text: str


@dataclass(frozen=True)
class TruthTable:
    bbox: tuple[int, int, int, int]
    n_rows: int
    n_cols: int
    spans: frozenset[tuple[int, int, int, int]]
    cell_texts: dict[tuple[int, int], str]


@dataclass(frozen=True)
class TruthRegion:
    bbox: tuple[int, int, int, int]  # tight ink box, end-exclusive pixels
    category: str
    lines: tuple[TruthLine, ...] = ()
    table: TruthTable | None = None


@dataclass(frozen=True)
class GroundTruth:
    width: int
    height: int
    lines: tuple[TruthLine, ...]      # page reading order
    regions: tuple[TruthRegion, ...]  # emission order
    tables: tuple[TruthTable, ...]


class _Painter:
    def __init__(self, width: int, height: int):
        self.canvas = np.full((height, width, 3), 255, dtype=np.uint8)
        self.width = width
        self.height = height

    def _check(self, x0, y0, x1, y1):
        if x0 < PAGE_MARGIN or y0 < PAGE_MARGIN or x1 > self.width - PAGE_MARGIN or y1 > self.height - PAGE_MARGIN:
            raise SpecOverlap(f"ink [{x0},{y0},{x1},{y1}] violates the {PAGE_MARGIN}px page margin")

    def stamp(self, bitmap: np.ndarray, x: int, y: int) -> None:
        h, w = bitmap.shape
        self._check(x, y, x + w, y + h)
        region = self.canvas[y:y + h, x:x + w]
        region[bitmap] = 0

    def hline(self, y: int, x0: int, x1: int) -> None:
        self._check(x0, y, x1 + 1, y + 1)
        self.canvas[y, x0:x1 + 1] = 0

    def vline(self, x: int, y0: int, y1: int) -> None:
        self._check(x, y0, x + 1, y1 + 1)
        self.canvas[y0:y1 + 1, x] = 0


def _render_line(painter: _Painter, x: int, y: int, text: str, scale: int) -> TruthLine | None:
    """Stamp one text line; returns its truth entry (padded ink box) or None if blank."""
    text = normalize_text(text)
    if not text:
        return None
    adv = GLYPH_W * scale
    x1 = x
    for i, ch in enumerate(text):
        if ch == " ":
            continue
        bmp = glyph_bitmap(ch)
        scaled = np.kron(bmp, np.ones((scale, scale), dtype=bool)) if scale > 1 else bmp
        gx = x + adv * i
        painter.stamp(scaled, gx, y)
        rightmost = int(np.flatnonzero(bmp.any(axis=0))[-1])
        x1 = gx + (rightmost + 1) * scale
    y1 = y + GLYPH_H * scale
    return TruthLine((x - 1.0, y - 1.0, x1 + 1.0, y1 + 1.0), text)


def _render_text_block(painter, block: BlockSpec) -> tuple[list[TruthLine], tuple[int, int, int, int]]:
    if not block.lines:
        raise SpecOverlap(f"{block.kind} block at ({block.x},{block.y}) has no lines")
    if block.kind == "list":
        for line in block.lines:
            if not BULLET_RE.match(normalize_text(line)):
                raise SpecOverlap(f"list line {line!r} lacks a bullet/enumeration prefix")
    elif block.lines and BULLET_RE.match(normalize_text(block.lines[0])):
        raise SpecOverlap(f"{block.kind} block starts with a bullet-like prefix: {block.lines[0]!r}")
    lines = []
    y = block.y
    pitch = GLYPH_H * block.scale + block.leading
    for raw in block.lines:
        tl = _render_line(painter, block.x, y, raw, block.scale)
        if tl is not None:
            lines.append(tl)
        y += pitch
    if not lines:
        raise SpecOverlap(f"{block.kind} block at ({block.x},{block.y}) rendered no ink")
    x0 = min(int(l.bbox[0]) + 1 for l in lines)
    y0 = min(int(l.bbox[1]) + 1 for l in lines)
    x1 = max(int(l.bbox[2]) - 1 for l in lines)
    y1 = max(int(l.bbox[3]) - 1 for l in lines)
    return lines, (x0, y0, x1, y1)


def _render_figure(painter, block: BlockSpec) -> tuple[int, int, int, int]:
    """Seeded stipple field: 2x2 dots on a 5 px lattice.

    Dots are too small for the text detector (height 2 < 4) and too sparse to
    look like ruling lines, so the region keeps zero text coverage.
    """
    rng = random.Random(block.figure_seed)
    nx = max(2, block.figure_width // 5)
    ny = max(2, block.figure_height // 5)
    dot = np.ones((2, 2), dtype=bool)
    for iy in range(ny):
        for ix in range(nx):
            corner = (ix in (0, nx - 1)) and (iy in (0, ny - 1))
            if not corner and rng.random() < 0.35:
                continue
            painter.stamp(dot, block.x + ix * 5, block.y + iy * 5)
    return (block.x, block.y, block.x + (nx - 1) * 5 + 2, block.y + (ny - 1) * 5 + 2)


def _span_map(table: TableBlock) -> dict[tuple[int, int], tuple[int, int, int, int]]:
    """unit (r, c) -> owning span; validates the partition tiles the grid."""
    owner: dict[tuple[int, int], tuple[int, int, int, int]] = {}
    for span in table.spans:
        r0, r1, c0, c1 = span
        for r in range(r0, r1):
            for c in range(c0, c1):
                if (r, c) in owner:
                    raise SpecOverlap(f"table spans overlap at unit ({r},{c})")
                owner[(r, c)] = span
    if len(owner) != table.n_rows * table.n_cols:
        raise SpecOverlap("table spans do not cover the grid")
    return owner


def _render_table(painter, block: BlockSpec) -> tuple[TruthTable, list[TruthLine]]:
    table = block.table
    owner = _span_map(table)
    xs = [block.x + i * table.col_width for i in range(table.n_cols + 1)]
    ys = [block.y + i * table.row_height for i in range(table.n_rows + 1)]

    # outer border, always fully drawn
    painter.hline(ys[0], xs[0], xs[-1])
    painter.hline(ys[-1], xs[0], xs[-1])
    painter.vline(xs[0], ys[0], ys[-1])
    painter.vline(xs[-1], ys[0], ys[-1])
    # interior segments exist exactly where neighbouring units belong to different spans
    for r in range(1, table.n_rows):
        for c in range(table.n_cols):
            if owner[(r - 1, c)] != owner[(r, c)]:
                painter.hline(ys[r], xs[c], xs[c + 1])
    for c in range(1, table.n_cols):
        for r in range(table.n_rows):
            if owner[(r, c - 1)] != owner[(r, c)]:
                painter.vline(xs[c], ys[r], ys[r + 1])

    scale = block.scale
    pad_x = TABLE_TEXT_PAD_X * scale
    pad_y = TABLE_TEXT_PAD_Y * scale
    lines: list[TruthLine] = []
    texts: dict[tuple[int, int], str] = {}
    for span in sorted(set(table.spans), key=lambda s: (s[0], s[2])):
        r0, r1, c0, c1 = span
        text = normalize_text(table.cell_texts.get((r0, c0), ""))
        texts[(r0, c0)] = text
        if not text:
            continue
        cell_w = xs[c1] - xs[c0]
        cell_h = ys[r1] - ys[r0]
        text_w = GLYPH_W * scale * len(text)
        if text_w + 2 * pad_x > cell_w or GLYPH_H * scale + 2 * pad_y > cell_h:
            raise SpecOverlap(f"cell text {text!r} does not fit span {span}")
        tl = _render_line(painter, xs[c0] + pad_x, ys[r0] + pad_y, text, scale)
        lines.append(tl)

    # Truth records the observable grid: levels whose every segment is absent
    # leave no ink, so no pixel-faithful parser can recover them.
    row_levels = [0, table.n_rows] + [
        r for r in range(1, table.n_rows)
        if any(owner[(r - 1, c)] != owner[(r, c)] for c in range(table.n_cols))
    ]
    col_levels = [0, table.n_cols] + [
        c for c in range(1, table.n_cols)
        if any(owner[(r, c - 1)] != owner[(r, c)] for r in range(table.n_rows))
    ]
    row_map = {level: i for i, level in enumerate(sorted(set(row_levels)))}
    col_map = {level: i for i, level in enumerate(sorted(set(col_levels)))}
    norm_spans = frozenset(
        (row_map[r0], row_map[r1], col_map[c0], col_map[c1]) for r0, r1, c0, c1 in table.spans
    )
    norm_texts = {
        (row_map[r0], col_map[c0]): texts[(r0, c0)]
        for r0, r1, c0, c1 in table.spans
    }
    truth = TruthTable(
        bbox=(xs[0], ys[0], xs[-1] + 1, ys[-1] + 1),
        n_rows=len(row_map) - 1,
        n_cols=len(col_map) - 1,
        spans=norm_spans,
        cell_texts=norm_texts,
    )
    return truth, lines


def _check_separation(regions: list[TruthRegion], min_gap: int) -> None:
    for i in range(len(regions)):
        for j in range(i + 1, len(regions)):
            a, b = regions[i].bbox, regions[j].bbox
            xgap = max(a[0], b[0]) - min(a[2], b[2])
            ygap = max(a[1], b[1]) - min(a[3], b[3])
            if max(xgap, ygap) < min_gap:
                raise SpecOverlap(
                    f"blocks {i} and {j} are separated by {max(xgap, ygap)}px (< {min_gap}px)"
                )


def generate_page(spec: PageSpec) -> tuple[PageImage, GroundTruth]:
    """Render a page spec into an image and its exact ground truth."""
    painter = _Painter(spec.width, spec.height)
    all_lines: list[TruthLine] = []
    regions: list[TruthRegion] = []
    tables: list[TruthTable] = []

    for block in spec.blocks:
        if block.kind not in KIND_CATEGORY:
            raise SpecOverlap(f"unknown block kind {block.kind!r}")
        category = KIND_CATEGORY[block.kind]
        if block.kind == "figure":
            bbox = _render_figure(painter, block)
            regions.append(TruthRegion(bbox, category))
        elif block.kind == "table":
            if block.table is None:
                raise SpecOverlap("table block without a table payload")
            truth, lines = _render_table(painter, block)
            tables.append(truth)
            all_lines.extend(lines)
            regions.append(TruthRegion(truth.bbox, category, tuple(lines), truth))
        else:
            lines, bbox = _render_text_block(painter, block)
            all_lines.extend(lines)
            regions.append(TruthRegion(bbox, category, tuple(lines)))

    _check_separation(regions, spec.min_gap)
    _check_bands(spec, regions)
    page = PageImage.from_array(painter.canvas, dpi=96)
    return page, GroundTruth(spec.width, spec.height, tuple(all_lines), tuple(regions), tuple(tables))


def _check_bands(spec: PageSpec, regions: list[TruthRegion]) -> None:
    """Header/footer blocks must sit inside the 6% page bands; others outside."""
    band = 0.06 * spec.height
    for region in regions:
        y0, y1 = region.bbox[1], region.bbox[3]
        in_top = y1 <= band
        in_bottom = y0 >= spec.height - band
        if region.category == "header" and not in_top:
            raise SpecOverlap(f"header block [{y0},{y1}] outside top band (<= {band:.0f})")
        if region.category == "footer" and not in_bottom:
            raise SpecOverlap(f"footer block [{y0},{y1}] outside bottom band")
        if region.category not in ("header", "footer") and (in_top or in_bottom):
            raise SpecOverlap(f"{region.category} block [{y0},{y1}] intrudes into a header/footer band")


def random_partition(seed: int, n_rows: int, n_cols: int, span_prob: float) -> tuple[tuple[int, int, int, int], ...]:
    """Greedy row-major rectangular partition of an n_rows x n_cols grid.

    At each uncovered unit, extends right then down with probability
    ``span_prob`` per step while the extension stays rectangular and uncovered.
    """
    if n_rows < 1 or n_cols < 1:
        raise ValueError("grid must be at least 1x1")
    if not 0.0 <= span_prob <= 1.0:
        raise ValueError("span_prob must be in [0, 1]")
    rng = random.Random(seed)
    covered = [[False] * n_cols for _ in range(n_rows)]
    spans: list[tuple[int, int, int, int]] = []
    for r in range(n_rows):
        for c in range(n_cols):
            if covered[r][c]:
                continue
            w = h = 1
            while c + w < n_cols and not covered[r][c + w] and rng.random() < span_prob:
                w += 1
            while r + h < n_rows and rng.random() < span_prob:
                row_free = all(not covered[r + h][cc] for cc in range(c, c + w))
                if not row_free:
                    break
                h += 1
            for rr in range(r, r + h):
                for cc in range(c, c + w):
                    covered[rr][cc] = True
            spans.append((r, r + h, c, c + w))
    return tuple(spans)


# ---------------------------------------------------------------------------
# Seeded corpus pages: mixed layouts obeying every generator contract.

_WORDS = (
    "alpha", "bravo", "carbon", "delta", "ember", "falcon", "gamma", "harbor",
    "indigo", "jasper", "krypton", "lumen", "meadow", "nickel", "onyx", "pylon",
    "quartz", "rune", "sierra", "tundra", "umber", "vertex", "willow", "xenon",
    "yonder", "zephyr", "basalt", "cedar", "dune", "ferry",
)
_TITLES = ("OVERVIEW", "RESULTS", "METHODS", "SUMMARY", "APPENDIX", "DISCUSSION", "NOTES", "DETAILS")


def corpus_page_spec(seed: int, include_tables: bool = True) -> PageSpec:
    """A deterministic mixed page: optional header/footer, title, paragraphs,
    lists, bordered tables, and stipple figures in a single-column flow.

    With ``include_tables=False`` the page stays free of ruling lines, which
    keeps page-level detection output 1:1 with truth lines (a page-level ink
    mesh otherwise merges the cell texts it surrounds).
    """
    rng = random.Random(seed)
    width = rng.choice((1000, 1060, 1120))
    height = rng.choice((1300, 1360, 1420))
    margin_x = 60

    def words(n):
        return " ".join(rng.choice(_WORDS) for _ in range(n))

    # Pass 1: choose contents. Oversized (scale-2) lines and whole-table ink
    # both raise the page median line height, so body text must outnumber them
    # for the title rule to see a scale-1 median.
    has_header = rng.random() < 0.5
    has_footer = rng.random() < 0.5
    header_text = rng.choice(_WORDS) + "-hdr"
    footer_text = "Page-" + str(rng.randrange(1, 99))
    title_text = rng.choice(_TITLES)

    n_body = rng.randrange(3, 6)
    choices = ("paragraph", "list", "table", "figure") if include_tables else ("paragraph", "list", "figure")
    body_kinds = ["paragraph"] + [rng.choice(choices) for _ in range(n_body - 1)]
    body: list[tuple[str, object]] = []
    for kind in body_kinds:
        if kind == "paragraph":
            body.append((kind, tuple(words(rng.randrange(3, 8)) for _ in range(rng.randrange(2, 5)))))
        elif kind == "list":
            style = rng.choice(("dash", "enum"))
            body.append((kind, tuple(
                (f"- {words(rng.randrange(2, 5))}" if style == "dash" else f"{i + 1}. {words(rng.randrange(2, 5))}")
                for i in range(rng.randrange(2, 5)))))
        elif kind == "table":
            n_rows = rng.randrange(2, 5)
            n_cols = rng.randrange(2, 5)
            spans = random_partition(rng.randrange(1 << 30), n_rows, n_cols, 0.3)
            texts = {(s[0], s[2]): rng.choice(_WORDS) for s in spans}
            body.append((kind, TableBlock(n_rows, n_cols, spans, texts)))
        else:
            body.append((kind, (rng.choice((150, 200, 250)), rng.choice((90, 120, 150)),
                                rng.randrange(1 << 30))))

    tall_instances = 1 + int(has_header) + int(has_footer) + sum(1 for k, _ in body if k == "table")
    body_lines = sum(len(c) for k, c in body if k in ("paragraph", "list"))
    deficit = (tall_instances + 2) - body_lines
    if deficit > 0:
        kind, lines = body[0]
        body[0] = (kind, lines + tuple(words(rng.randrange(3, 8)) for _ in range(deficit)))

    # Pass 2: vertical flow layout.
    blocks: list[BlockSpec] = []
    if has_header:
        blocks.append(BlockSpec("header", margin_x, 20, (header_text,), scale=2))
    y = 120
    blocks.append(BlockSpec("title", margin_x, y, (title_text,), scale=2))
    y += 32 + 40 + rng.randrange(0, 16)
    bottom_limit = height - 120
    for kind, content in body:
        if kind in ("paragraph", "list"):
            block = BlockSpec(kind, margin_x, y, content)
            advance = len(content) * 21
        elif kind == "table":
            block = BlockSpec("table", margin_x, y, table=content)
            advance = content.n_rows * content.row_height + 2
        else:
            fw, fh, fseed = content
            block = BlockSpec("figure", margin_x, y, figure_width=fw, figure_height=fh,
                              figure_seed=fseed)
            advance = fh
        if y + advance > bottom_limit:
            break
        blocks.append(block)
        y += advance + 40 + rng.randrange(0, 20)
    if has_footer:
        blocks.append(BlockSpec("footer", margin_x, height - 55, (footer_text,), scale=2))
    return PageSpec(seed=seed, width=width, height=height, blocks=tuple(blocks))


# ---------------------------------------------------------------------------
# JSON forms for the command-line helper.

def spec_from_dict(d: dict) -> PageSpec:
    blocks = []
    for b in d.get("blocks", []):
        table = None
        if b.get("table"):
            t = b["table"]
            table = TableBlock(
                n_rows=t["n_rows"],
                n_cols=t["n_cols"],
                spans=tuple(tuple(s) for s in t["spans"]),
                cell_texts={(int(k.split(",")[0]), int(k.split(",")[1])): v
                            for k, v in t.get("cell_texts", {}).items()},
                row_height=t.get("row_height", 40),
                col_width=t.get("col_width", 110),
            )
        blocks.append(BlockSpec(
            kind=b["kind"], x=b["x"], y=b["y"],
            lines=tuple(b.get("lines", ())), scale=b.get("scale", 1),
            table=table,
            figure_width=b.get("figure_width", 160), figure_height=b.get("figure_height", 110),
            figure_seed=b.get("figure_seed", 0), leading=b.get("leading", 5),
        ))
    return PageSpec(
        seed=d.get("seed", 0), width=d["width"], height=d["height"],
        blocks=tuple(blocks), min_gap=d.get("min_gap", 32),
    )


def truth_to_dict(truth: GroundTruth) -> dict:
    return {
        "width": truth.width,
        "height": truth.height,
        "lines": [{"bbox": list(l.bbox), "text": l.text} for l in truth.lines],
        "regions": [
            {
                "bbox": list(r.bbox),
                "category": r.category,
                "lines": [{"bbox": list(l.bbox), "text": l.text} for l in r.lines],
                "table": _table_to_dict(r.table) if r.table else None,
            }
            for r in truth.regions
        ],
        "tables": [_table_to_dict(t) for t in truth.tables],
    }


def _table_to_dict(t: TruthTable) -> dict:
    return {
        "bbox": list(t.bbox),
        "n_rows": t.n_rows,
        "n_cols": t.n_cols,
        "spans": sorted(list(s) for s in t.spans),
        "cell_texts": {f"{r},{c}": v for (r, c), v in sorted(t.cell_texts.items())},
    }


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="docxchain-synth",
        description="Render a synthetic page spec (or a seeded corpus page) to PNG plus truth JSON.",
    )
    parser.add_argument("spec", nargs="?", help="page spec JSON file")
    parser.add_argument("--corpus-seed", type=int, help="generate the seeded corpus page instead")
    parser.add_argument("--image", required=True, help="output PNG path")
    parser.add_argument("--truth", required=True, help="output truth JSON path")
    args = parser.parse_args(argv)

    if (args.spec is None) == (args.corpus_seed is None):
        parser.error("provide exactly one of: spec file, --corpus-seed")
    if args.spec:
        with open(args.spec, encoding="utf-8") as fh:
            spec = spec_from_dict(json.load(fh))
    else:
        spec = corpus_page_spec(args.corpus_seed)

    page, truth = generate_page(spec)
    from PIL import Image

    Image.fromarray(page.to_array()).save(args.image)
    with open(args.truth, "w", encoding="utf-8") as fh:
        json.dump(truth_to_dict(truth), fh, indent=2)
        fh.write("\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
