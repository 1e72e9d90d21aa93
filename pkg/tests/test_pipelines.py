import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from docxchain.detect import detect_text
from docxchain.errors import NotATable
from docxchain.geometry import Quadrangle
from docxchain.model import (
    Document,
    LayoutCategory,
    PageImage,
    RegionTableElement,
    RegionTextElement,
    TextInstance,
)
from docxchain.pipelines import (
    Backends,
    PageReading,
    document_structurization,
    general_text_reading,
    reading_order,
    table_parsing,
)
from docxchain.recognize import read_instances
from docxchain.synth import BlockSpec, PageSpec, TableBlock, corpus_page_spec, generate_page


def inst(x0, y0, x1, y1):
    return TextInstance(Quadrangle.from_bbox(x0, y0, x1, y1), 1.0)


def doc_of(blocks, w=900, h=1100, seed=0):
    page, truth = generate_page(PageSpec(seed=seed, width=w, height=h, blocks=tuple(blocks)))
    return Document("synth.png", (page,)), page, truth


def blank_doc(w=300, h=200):
    page = PageImage.from_array(np.full((h, w, 3), 255, dtype=np.uint8))
    return Document("blank.png", (page,)), page


@st.composite
def instance_sets(draw):
    n = draw(st.integers(min_value=0, max_value=40))
    out = []
    for _ in range(n):
        x0 = draw(st.integers(min_value=0, max_value=500))
        y0 = draw(st.integers(min_value=0, max_value=500))
        w = draw(st.integers(min_value=4, max_value=120))
        h = draw(st.integers(min_value=4, max_value=30))
        out.append(inst(x0, y0, x0 + w, y0 + h))
    return out


class TestReadingOrder:
    def test_side_by_side_left_first(self):
        right = inst(200, 10, 280, 30)
        left = inst(10, 12, 90, 32)
        assert reading_order([right, left]) == [left, right]

    def test_stacked_top_first(self):
        bottom = inst(10, 100, 90, 120)
        top = inst(10, 10, 90, 30)
        assert reading_order([bottom, top]) == [top, bottom]

    def test_permutation_and_idempotence(self):
        items = [inst(i * 50, (i % 3) * 40, i * 50 + 40, (i % 3) * 40 + 20) for i in range(9)]
        ordered = reading_order(items)
        assert sorted(map(id, ordered)) == sorted(map(id, items))
        assert reading_order(ordered) == ordered

    @settings(max_examples=50, deadline=None)
    @given(instance_sets(), st.integers(min_value=0, max_value=2**32 - 1))
    def test_shuffle_invariance(self, items, seed):
        base = reading_order(items)
        shuffled = items[:]
        random.Random(seed).shuffle(shuffled)
        got = reading_order(shuffled)
        assert [i.quad for i in got] == [i.quad for i in base]

    def test_single_column_page_recovers_emission_order(self):
        doc, page, truth = doc_of([
            BlockSpec("title", 60, 200, ("METHODS",), scale=2),
            BlockSpec("paragraph", 60, 320, ("alpha bravo", "carbon delta", "ember falcon")),
            BlockSpec("list", 60, 460, ("- gamma harbor", "- indigo jasper")),
        ])
        instances = detect_text(page)
        recognized, _ = read_instances(page, instances)
        shuffled = recognized[:]
        random.Random(7).shuffle(shuffled)
        ordered = reading_order(shuffled)
        assert [i.content.text for i in ordered] == [l.text for l in truth.lines]


class TestGeneralTextReading:
    def test_blank_page(self):
        doc, _ = blank_doc()
        report = general_text_reading(doc)
        assert report.pipeline == "read"
        assert report.warnings == []
        assert len(report.pages) == 1
        assert report.pages[0].instances == ()

    def test_signboard_lines(self):
        doc, page, truth = doc_of([
            BlockSpec("paragraph", 60, 200, ("North Exit", "Line 4 west", "Gate 12")),
            BlockSpec("paragraph", 60, 300, ("Transfer here", "Mind the gap", "Exit right")),
        ])
        report = general_text_reading(doc)
        got = [i.content.text for i in report.pages[0].instances]
        assert got == [l.text for l in truth.lines]
        assert all(i.content.confidence == 1.0 for i in report.pages[0].instances)

    def test_composition_law(self):
        doc, page, truth = doc_of([
            BlockSpec("paragraph", 60, 200, ("alpha bravo", "carbon delta")),
            BlockSpec("paragraph", 60, 300, ("ember falcon",)),
        ])
        report = general_text_reading(doc)
        manual, _ = read_instances(page, detect_text(page))
        assert list(report.pages[0].instances) == reading_order(manual)

    def test_timings_present(self):
        doc, _ = blank_doc()
        report = general_text_reading(doc)
        assert set(report.timings_ms) == {"detect", "recognize"}
        assert all(v >= 0 for v in report.timings_ms.values())


class TestTableParsing:
    def test_product_table_roundtrip(self):
        spans = ((0, 1, 0, 3), (1, 2, 0, 1), (1, 2, 1, 2), (1, 2, 2, 3),
                 (2, 3, 0, 1), (2, 3, 1, 2), (2, 3, 2, 3),
                 (3, 4, 0, 1), (3, 4, 1, 2), (3, 4, 2, 3))
        texts = {(0, 0): "spec sheet", (1, 0): "weight", (1, 1): "12kg", (1, 2): "net",
                 (2, 0): "height", (2, 1): "70cm", (2, 2): "boxed",
                 (3, 0): "color", (3, 1): "slate", (3, 2): "matte"}
        # the table must dominate the page so full-page ink passes the height filter
        block = BlockSpec("table", 60, 60, table=TableBlock(4, 3, spans, texts, row_height=44))
        page, truth = generate_page(PageSpec(seed=0, width=480, height=320, blocks=(block,)))
        doc = Document("table.png", (page,))
        report = table_parsing(doc)
        table = report.pages[0].table
        assert table.spans() == set(truth.tables[0].spans)
        got = {(c.row_start, c.col_start): (c.content.text if c.content else "")
               for c in table.cells}
        assert got == truth.tables[0].cell_texts
        assert report.warnings == []

    def test_no_ruling_lines_raises(self):
        doc, page, _ = doc_of([BlockSpec("paragraph", 60, 200, ("alpha bravo", "carbon"))])
        with pytest.raises(NotATable):
            table_parsing(doc)

    def test_explicit_region_equals_manual_crop(self):
        spans = tuple((r, r + 1, c, c + 1) for r in range(2) for c in range(2))
        doc, page, truth = doc_of([
            BlockSpec("paragraph", 60, 200, ("alpha bravo", "carbon delta")),
            BlockSpec("table", 60, 340, table=TableBlock(2, 2, spans, {(0, 0): "aa", (1, 1): "bb"})),
        ])
        rect = truth.tables[0].bbox
        report = table_parsing(doc, region=rect)
        crop_page = page.crop(*rect)
        crop_report = table_parsing(Document("crop.png", (crop_page,)))
        moved = {(c.row_start, c.col_start): c.quad.translate(rect[0], rect[1])
                 for c in crop_report.pages[0].table.cells}
        for cell in report.pages[0].table.cells:
            assert cell.quad == moved[(cell.row_start, cell.col_start)]
        assert report.pages[0].table.spans() == crop_report.pages[0].table.spans()

    def test_bad_region_rejected(self):
        doc, _, _ = doc_of([BlockSpec("paragraph", 60, 200, ("alpha",))])
        with pytest.raises(ValueError):
            table_parsing(doc, region=(0, 0, 5000, 5000))


class TestDocumentStructurization:
    def test_blank_page_zero_elements(self):
        doc, _ = blank_doc()
        report = document_structurization(doc)
        assert report.pages[0].structure.elements == ()

    def test_title_paragraphs_table_order(self):
        spans = tuple((r, r + 1, c, c + 1) for r in range(2) for c in range(2))
        doc, page, truth = doc_of([
            BlockSpec("title", 60, 200, ("RESULTS",), scale=2),
            BlockSpec("paragraph", 60, 320, ("alpha bravo carbon", "delta ember run",
                                             "falcon gamma", "harbor indigo")),
            BlockSpec("paragraph", 60, 460, ("jasper krypton", "lumen meadow")),
            BlockSpec("table", 60, 580, table=TableBlock(2, 2, spans,
                                                         {(0, 0): "aa", (0, 1): "bb",
                                                          (1, 0): "cc", (1, 1): "dd"})),
        ])
        report = document_structurization(doc)
        elements = report.pages[0].structure.elements
        cats = [e.region.category.value for e in elements]
        assert cats == ["title", "text", "text", "table"]
        assert [e.region.id for e in elements] == [0, 1, 2, 3]
        table_el = elements[-1]
        assert isinstance(table_el, RegionTableElement)
        assert table_el.table.spans() == set(truth.tables[0].spans)
        got_texts = {(c.row_start, c.col_start): c.content.text for c in table_el.table.cells}
        assert got_texts == truth.tables[0].cell_texts
        # text elements carry their truth lines in order
        title_el, para1, para2 = elements[0], elements[1], elements[2]
        assert [i.content.text for i in title_el.instances] == ["RESULTS"]
        assert [i.content.text for i in para1.instances] == [l.text for l in truth.regions[1].lines]
        assert [i.content.text for i in para2.instances] == [l.text for l in truth.regions[2].lines]

    def test_instance_conservation(self):
        doc, page, _ = doc_of([
            BlockSpec("title", 60, 200, ("SUMMARY",), scale=2),
            BlockSpec("paragraph", 60, 320, ("alpha bravo", "carbon delta", "ember falcon")),
            BlockSpec("figure", 60, 460, figure_width=200, figure_height=100),
        ])
        detected = detect_text(page)
        report = document_structurization(doc)
        assert report.pages[0].structure.instance_count() == len(detected)

    def test_unassigned_instance_goes_to_trailing_other(self):
        # a page whose only ink is a tiny line that xy-cut discards (< min_region_px)
        page, _ = generate_page(PageSpec(
            seed=0, width=900, height=1100,
            blocks=(BlockSpec("paragraph", 60, 300, ("ah",)),),
        ))
        doc = Document("tiny.png", (page,))
        report = document_structurization(doc)
        elements = report.pages[0].structure.elements
        assert len(elements) == 1
        assert elements[0].region.category is LayoutCategory.OTHER
        assert len(elements[0].instances) == 1
        assert elements[0].instances[0].content.text == "ah"

    def test_multi_page(self):
        page1, _ = generate_page(PageSpec(seed=1, width=900, height=1100,
                                          blocks=(BlockSpec("paragraph", 60, 300, ("alpha bravo", "carbon")),)))
        page2, _ = generate_page(PageSpec(seed=2, width=900, height=1100,
                                          blocks=(BlockSpec("paragraph", 60, 400, ("delta ember", "falcon")),)))
        report = document_structurization(Document("two.png", (page1, page2)))
        assert [p.page_index for p in report.pages] == [0, 1]

    @pytest.mark.parametrize("seed", [3, 11])
    def test_corpus_page_text_recovery(self, seed):
        page, truth = generate_page(corpus_page_spec(seed))
        report = document_structurization(Document("corpus.png", (page,)))
        elements = report.pages[0].structure.elements
        assert [e.region.category.value for e in elements] == [r.category for r in truth.regions]
        for element, region in zip(elements, truth.regions):
            if isinstance(element, RegionTableElement):
                got = {(c.row_start, c.col_start): (c.content.text if c.content else "")
                       for c in element.table.cells}
                assert got == region.table.cell_texts
                assert element.table.spans() == set(region.table.spans)
            elif region.lines:
                assert [i.content.text for i in element.instances] == [l.text for l in region.lines]
