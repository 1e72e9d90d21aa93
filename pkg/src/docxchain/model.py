"""Shared domain types for pages, text instances, layout regions, and tables.

All types are immutable after construction and validate their invariants in
``__post_init__``, so downstream code never re-checks them.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .geometry import Quadrangle


@dataclass(frozen=True)
class TextContent:
    text: str
    confidence: float

    def __post_init__(self):
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class TextInstance:
    """A detected text quadrangle, with recognized content once recognition ran."""

    quad: Quadrangle
    det_confidence: float
    content: TextContent | None = None

    def __post_init__(self):
        if not 0.0 <= self.det_confidence <= 1.0:
            raise ValueError(f"det_confidence must be in [0, 1], got {self.det_confidence}")

    def with_content(self, content: TextContent) -> "TextInstance":
        return TextInstance(self.quad, self.det_confidence, content)


class LayoutCategory(enum.Enum):
    TITLE = "title"
    TEXT = "text"
    LIST = "list"
    TABLE = "table"
    FIGURE = "figure"
    CAPTION = "caption"
    HEADER = "header"
    FOOTER = "footer"
    OTHER = "other"

    @classmethod
    def tokens(cls) -> frozenset[str]:
        return frozenset(c.value for c in cls)


@dataclass(frozen=True)
class LayoutRegion:
    """A categorized axis-aligned page region; bbox is (x0, y0, x1, y1) in pixels."""

    id: int
    bbox: tuple[float, float, float, float]
    category: LayoutCategory
    confidence: float

    def __post_init__(self):
        x0, y0, x1, y1 = self.bbox
        if not (x0 < x1 and y0 < y1):
            raise ValueError(f"degenerate bbox {self.bbox}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must be in [0, 1], got {self.confidence}")

    def quad(self) -> Quadrangle:
        return Quadrangle.from_bbox(*self.bbox)


@dataclass(frozen=True)
class TableCell:
    """Grid extents use end-exclusive indices."""

    row_start: int
    row_end: int
    col_start: int
    col_end: int
    quad: Quadrangle
    content: TextContent | None = None

    def __post_init__(self):
        if not (0 <= self.row_start < self.row_end):
            raise ValueError(f"bad row span [{self.row_start}, {self.row_end})")
        if not (0 <= self.col_start < self.col_end):
            raise ValueError(f"bad col span [{self.col_start}, {self.col_end})")


@dataclass(frozen=True)
class Table:
    """A grid of cells; the cells must tile the n_rows x n_cols grid exactly."""

    n_rows: int
    n_cols: int
    cells: tuple[TableCell, ...]

    def __post_init__(self):
        if self.n_rows < 1 or self.n_cols < 1:
            raise ValueError("table must have at least one row and one column")
        coverage = np.zeros((self.n_rows, self.n_cols), dtype=np.int32)
        for cell in self.cells:
            if cell.row_end > self.n_rows or cell.col_end > self.n_cols:
                raise ValueError(f"cell {cell.row_start},{cell.col_start} exceeds grid bounds")
            coverage[cell.row_start:cell.row_end, cell.col_start:cell.col_end] += 1
        if not (coverage == 1).all():
            raise ValueError("cells do not tile the grid exactly")

    def cell_at(self, row: int, col: int) -> TableCell:
        for cell in self.cells:
            if cell.row_start <= row < cell.row_end and cell.col_start <= col < cell.col_end:
                return cell
        raise KeyError((row, col))

    def spans(self) -> set[tuple[int, int, int, int]]:
        return {(c.row_start, c.row_end, c.col_start, c.col_end) for c in self.cells}


@dataclass(frozen=True)
class PageImage:
    """Row-major RGB 8-bit raster."""

    width: int
    height: int
    pixels: bytes
    dpi: int = 96

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("page dimensions must be positive")
        if self.dpi < 1:
            raise ValueError("dpi must be positive")
        if len(self.pixels) != self.width * self.height * 3:
            raise ValueError(
                f"pixel buffer length {len(self.pixels)} != {self.width}x{self.height}x3"
            )

    @classmethod
    def from_array(cls, arr: np.ndarray, dpi: int = 96) -> "PageImage":
        if arr.ndim != 3 or arr.shape[2] != 3 or arr.dtype != np.uint8:
            raise ValueError("expected HxWx3 uint8 array")
        return cls(arr.shape[1], arr.shape[0], arr.tobytes(), dpi)

    def to_array(self) -> np.ndarray:
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width, 3)

    def crop(self, x0: int, y0: int, x1: int, y1: int) -> "PageImage":
        """Crop to the pixel rectangle clipped to page bounds."""
        x0 = max(0, min(int(x0), self.width))
        x1 = max(0, min(int(x1), self.width))
        y0 = max(0, min(int(y0), self.height))
        y1 = max(0, min(int(y1), self.height))
        if x1 <= x0 or y1 <= y0:
            raise ValueError("empty crop")
        return PageImage.from_array(np.ascontiguousarray(self.to_array()[y0:y1, x0:x1]), self.dpi)


@dataclass(frozen=True)
class Document:
    source_id: str
    pages: tuple[PageImage, ...]

    def __post_init__(self):
        if not self.pages:
            raise ValueError("document must have at least one page")


@dataclass(frozen=True)
class RegionTextElement:
    """A layout region together with the text instances assigned to it."""

    region: LayoutRegion
    instances: tuple[TextInstance, ...]


@dataclass(frozen=True)
class RegionTableElement:
    """A table region with its parsed grid; raw assigned instances are kept
    so that instance conservation stays checkable."""

    region: LayoutRegion
    table: Table
    instances: tuple[TextInstance, ...] = field(default_factory=tuple)


DocumentElement = RegionTextElement | RegionTableElement


@dataclass(frozen=True)
class StructuredDocument:
    """Elements in reading order; every detected instance lives in exactly one element."""

    elements: tuple[DocumentElement, ...]

    def instance_count(self) -> int:
        return sum(len(e.instances) for e in self.elements)
