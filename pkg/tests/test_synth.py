import numpy as np
import pytest

from docxchain.errors import SpecOverlap
from docxchain.synth import (
    BlockSpec,
    PageSpec,
    TableBlock,
    corpus_page_spec,
    generate_page,
    normalize_text,
    random_partition,
    spec_from_dict,
    truth_to_dict,
)
from grid_oracle import check_rectangular_partition


def simple_spec(**kwargs):
    defaults = dict(
        seed=1,
        width=600,
        height=400,
        blocks=(BlockSpec("paragraph", 50, 60, ("alpha bravo", "carbon delta", "ember run")),),
    )
    defaults.update(kwargs)
    return PageSpec(**defaults)


class TestGeneratePage:
    def test_paragraph_truth_lines(self):
        page, truth = generate_page(simple_spec())
        assert len(truth.lines) == 3
        assert [l.text for l in truth.lines] == ["alpha bravo", "carbon delta", "ember run"]
        # three distinct ink bands
        arr = page.to_array()
        assert (arr == 255).all(axis=2).mean() > 0.5
        rows_with_ink = np.flatnonzero((arr != 255).any(axis=(1, 2)))
        gaps = np.diff(rows_with_ink)
        assert (gaps > 1).sum() == 2

    def test_determinism(self):
        p1, t1 = generate_page(simple_spec())
        p2, t2 = generate_page(simple_spec())
        assert p1.pixels == p2.pixels
        assert t1 == t2

    def test_text_normalization(self):
        spec = simple_spec(blocks=(BlockSpec("paragraph", 50, 60, ("  alpha   bravo ", "x y")),))
        _, truth = generate_page(spec)
        assert truth.lines[0].text == "alpha bravo"

    def test_overlapping_blocks_rejected(self):
        spec = simple_spec(blocks=(
            BlockSpec("paragraph", 50, 60, ("alpha bravo",)),
            BlockSpec("paragraph", 55, 66, ("carbon delta",)),
        ))
        with pytest.raises(SpecOverlap):
            generate_page(spec)

    def test_too_close_blocks_rejected(self):
        spec = simple_spec(blocks=(
            BlockSpec("paragraph", 50, 60, ("alpha bravo",)),
            BlockSpec("paragraph", 50, 100, ("carbon delta",)),
        ))
        with pytest.raises(SpecOverlap):
            generate_page(spec)

    def test_page_margin_enforced(self):
        spec = simple_spec(blocks=(BlockSpec("paragraph", 0, 60, ("alpha",)),))
        with pytest.raises(SpecOverlap):
            generate_page(spec)

    def test_band_constraints(self):
        # header outside the top band is rejected
        spec = simple_spec(blocks=(BlockSpec("header", 50, 200, ("alpha-hdr",), scale=2),))
        with pytest.raises(SpecOverlap):
            generate_page(spec)
        # body text inside the top band is rejected
        spec = simple_spec(blocks=(BlockSpec("paragraph", 50, 4, ("alpha bravo",)),))
        with pytest.raises(SpecOverlap):
            generate_page(spec)

    def test_list_requires_bullets(self):
        spec = simple_spec(blocks=(BlockSpec("list", 50, 60, ("alpha bravo", "- carbon")),))
        with pytest.raises(SpecOverlap):
            generate_page(spec)

    def test_paragraph_must_not_look_like_list(self):
        spec = simple_spec(blocks=(BlockSpec("paragraph", 50, 60, ("- alpha bravo",)),))
        with pytest.raises(SpecOverlap):
            generate_page(spec)


class TestTableRendering:
    def make_table_spec(self, spans, texts, n_rows=2, n_cols=2):
        table = TableBlock(n_rows, n_cols, spans, texts)
        return simple_spec(blocks=(BlockSpec("table", 50, 60, table=table),))

    def test_full_grid_draws_all_segments(self):
        spans = tuple((r, r + 1, c, c + 1) for r in range(2) for c in range(2))
        page, truth = generate_page(self.make_table_spec(spans, {}))
        arr = page.to_array()
        ink = (arr == 0).all(axis=2)
        # outer border plus one interior line each way, at known pixel positions
        assert ink[60, 50:271].all()
        assert ink[100, 50:271].all()
        assert ink[140, 50:271].all()
        assert ink[60:141, 50].all()
        assert ink[60:141, 160].all()
        assert ink[60:141, 270].all()
        assert truth.tables[0].bbox == (50, 60, 271, 141)

    def test_span_omits_exactly_one_segment(self):
        # 1x2 colspan on the top row: interior vertical line missing above y=100 only
        spans = ((0, 1, 0, 2), (1, 2, 0, 1), (1, 2, 1, 2))
        page, truth = generate_page(self.make_table_spec(spans, {}))
        ink = (page.to_array() == 0).all(axis=2)
        assert not ink[61:100, 160].any()   # omitted segment
        assert ink[101:140, 160].all()      # drawn segment below
        assert truth.tables[0].spans == frozenset(spans)

    def test_cell_text_recorded(self):
        spans = tuple((r, r + 1, c, c + 1) for r in range(2) for c in range(2))
        texts = {(0, 0): "aa", (0, 1): "bb", (1, 0): "cc", (1, 1): "dd"}
        _, truth = generate_page(self.make_table_spec(spans, texts))
        assert truth.tables[0].cell_texts == texts
        assert [l.text for l in truth.lines] == ["aa", "bb", "cc", "dd"]

    def test_oversized_cell_text_rejected(self):
        spans = tuple((r, r + 1, c, c + 1) for r in range(2) for c in range(2))
        spec = self.make_table_spec(spans, {(0, 0): "waytoolongforacell"})
        with pytest.raises(SpecOverlap):
            generate_page(spec)

    def test_non_tiling_spans_rejected(self):
        spec = self.make_table_spec(((0, 1, 0, 2), (1, 2, 0, 1)), {})
        with pytest.raises(SpecOverlap):
            generate_page(spec)


class TestRandomPartition:
    def test_zero_prob_all_unit(self):
        spans = random_partition(3, 3, 4, 0.0)
        assert len(spans) == 12
        assert all(r1 - r0 == 1 and c1 - c0 == 1 for r0, r1, c0, c1 in spans)

    def test_single_cell_grid(self):
        assert random_partition(9, 1, 1, 1.0) == ((0, 1, 0, 1),)

    @pytest.mark.parametrize("seed", range(25))
    def test_always_tiles(self, seed):
        spans = random_partition(seed, 4, 5, 0.5)
        ok, _ = check_rectangular_partition(4, 5, spans)
        assert ok

    def test_deterministic(self):
        assert random_partition(7, 3, 3, 0.5) == random_partition(7, 3, 3, 0.5)


class TestCorpusPages:
    @pytest.mark.parametrize("seed", range(8))
    def test_corpus_page_generates(self, seed):
        page, truth = generate_page(corpus_page_spec(seed))
        assert page.width >= 1000
        assert len(truth.regions) >= 2
        cats = {r.category for r in truth.regions}
        assert "title" in cats

    def test_corpus_mixes_kinds(self):
        seen = set()
        for seed in range(40):
            _, truth = generate_page(corpus_page_spec(seed))
            seen |= {r.category for r in truth.regions}
        assert {"title", "text", "list", "table", "figure", "header", "footer"} <= seen


class TestSpecJson:
    def test_spec_round_trip(self):
        d = {
            "seed": 3,
            "width": 600,
            "height": 400,
            "blocks": [
                {"kind": "paragraph", "x": 50, "y": 60, "lines": ["alpha bravo", "carbon"]},
                {
                    "kind": "table", "x": 50, "y": 160,
                    "table": {
                        "n_rows": 2, "n_cols": 2,
                        "spans": [[0, 1, 0, 2], [1, 2, 0, 1], [1, 2, 1, 2]],
                        "cell_texts": {"0,0": "top", "1,0": "aa", "1,1": "bb"},
                    },
                },
            ],
        }
        spec = spec_from_dict(d)
        page, truth = generate_page(spec)
        td = truth_to_dict(truth)
        assert td["tables"][0]["cell_texts"] == {"0,0": "top", "1,0": "aa", "1,1": "bb"}
        assert normalize_text("  a   b ") == "a b"
