import numpy as np
import pytest

from docxchain.geometry import Quadrangle
from docxchain.model import (
    Document,
    LayoutCategory,
    LayoutRegion,
    PageImage,
    Table,
    TableCell,
    TextContent,
    TextInstance,
)

Q = Quadrangle.from_bbox(0, 0, 10, 10)


def cell(r0, r1, c0, c1):
    return TableCell(r0, r1, c0, c1, Quadrangle.from_bbox(c0, r0, c1, r1))


class TestTextTypes:
    def test_confidence_range(self):
        TextContent("hi", 0.0)
        TextContent("hi", 1.0)
        with pytest.raises(ValueError):
            TextContent("hi", 1.5)
        with pytest.raises(ValueError):
            TextInstance(Q, -0.1)

    def test_content_absent_until_recognition(self):
        inst = TextInstance(Q, 1.0)
        assert inst.content is None
        updated = inst.with_content(TextContent("x", 0.5))
        assert inst.content is None
        assert updated.content.text == "x"


class TestLayoutTypes:
    def test_category_tokens_closed_set(self):
        assert LayoutCategory.tokens() == {
            "title", "text", "list", "table", "figure",
            "caption", "header", "footer", "other",
        }

    def test_region_bbox_order(self):
        LayoutRegion(0, (0, 0, 5, 5), LayoutCategory.TEXT, 0.6)
        with pytest.raises(ValueError):
            LayoutRegion(0, (5, 0, 0, 5), LayoutCategory.TEXT, 0.6)
        with pytest.raises(ValueError):
            LayoutRegion(0, (0, 0, 5, 5), LayoutCategory.TEXT, 2.0)


class TestTableTiling:
    def test_full_grid(self):
        cells = tuple(cell(r, r + 1, c, c + 1) for r in range(3) for c in range(3))
        t = Table(3, 3, cells)
        assert len(t.cells) == 9

    def test_spanned_tiling_ok(self):
        t = Table(2, 2, (cell(0, 1, 0, 2), cell(1, 2, 0, 1), cell(1, 2, 1, 2)))
        assert t.cell_at(0, 1).col_start == 0

    def test_gap_rejected(self):
        with pytest.raises(ValueError):
            Table(2, 2, (cell(0, 1, 0, 2), cell(1, 2, 0, 1)))

    def test_overlap_rejected(self):
        with pytest.raises(ValueError):
            Table(2, 2, (cell(0, 2, 0, 2), cell(1, 2, 1, 2), cell(0, 1, 0, 1), cell(1, 2, 0, 1)))

    def test_out_of_bounds_rejected(self):
        with pytest.raises(ValueError):
            Table(2, 2, (cell(0, 3, 0, 2), cell(1, 2, 0, 2)))

    def test_bad_span_indices(self):
        with pytest.raises(ValueError):
            cell(1, 1, 0, 2)
        with pytest.raises(ValueError):
            cell(0, 1, -1, 2)


class TestPageImage:
    def test_buffer_length_enforced(self):
        PageImage(2, 3, bytes(18), 96)
        with pytest.raises(ValueError):
            PageImage(2, 3, bytes(17), 96)

    def test_array_roundtrip(self):
        arr = np.arange(24, dtype=np.uint8).reshape(2, 4, 3)
        page = PageImage.from_array(arr, dpi=200)
        assert page.width == 4 and page.height == 2 and page.dpi == 200
        assert np.array_equal(page.to_array(), arr)

    def test_crop_clips_to_bounds(self):
        arr = np.zeros((10, 10, 3), dtype=np.uint8)
        arr[2:5, 3:7] = 255
        page = PageImage.from_array(arr)
        exact = page.crop(3, 2, 7, 5)
        assert (exact.width, exact.height) == (4, 3)
        assert (exact.to_array() == 255).all()
        clipped = page.crop(3, 2, 100, 5)
        assert (clipped.width, clipped.height) == (7, 3)

    def test_empty_crop_rejected(self):
        page = PageImage.from_array(np.zeros((4, 4, 3), dtype=np.uint8))
        with pytest.raises(ValueError):
            page.crop(2, 2, 2, 4)


class TestDocument:
    def test_requires_pages(self):
        page = PageImage.from_array(np.zeros((1, 1, 3), dtype=np.uint8))
        Document("x.png", (page,))
        with pytest.raises(ValueError):
            Document("x.png", ())
