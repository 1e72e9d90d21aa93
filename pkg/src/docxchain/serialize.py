"""Canonical JSON serialization of pipeline results.

The form is canonical: fixed key order, coordinates and confidences rounded
to three decimals, two-space indentation, trailing newline. Parsing and
re-serializing a canonical document reproduces it byte for byte, which the
golden-file tests rely on.
"""

from __future__ import annotations

import json

from .geometry import Quadrangle
from .model import LayoutRegion, RegionTableElement, RegionTextElement, Table, TextInstance
from .pipelines import PageReading, PageStructure, PageTable, PipelineReport

SCHEMA_VERSION = "1"


def _num(v) -> float:
    return round(float(v), 3)


def quad_payload(q: Quadrangle) -> list[list[float]]:
    return [[_num(p.x), _num(p.y)] for p in q.vertices]


def instance_payload(inst: TextInstance) -> dict:
    return {
        "quad": quad_payload(inst.quad),
        "det_confidence": _num(inst.det_confidence),
        "text": inst.content.text if inst.content else "",
        "rec_confidence": _num(inst.content.confidence) if inst.content else 0.0,
    }


def region_payload(region: LayoutRegion) -> dict:
    return {
        "id": region.id,
        "bbox": [_num(v) for v in region.bbox],
        "category": region.category.value,
        "confidence": _num(region.confidence),
    }


def table_payload(table: Table) -> dict:
    cells = sorted(table.cells, key=lambda c: (c.row_start, c.col_start))
    return {
        "n_rows": table.n_rows,
        "n_cols": table.n_cols,
        "cells": [
            {
                "row_start": c.row_start,
                "row_end": c.row_end,
                "col_start": c.col_start,
                "col_end": c.col_end,
                "quad": quad_payload(c.quad),
                "text": c.content.text if c.content else "",
            }
            for c in cells
        ],
    }


def _page_elements(result) -> list:
    if isinstance(result, PageReading):
        return [instance_payload(i) for i in result.instances]
    if isinstance(result, PageTable):
        return [{"region": region_payload(result.region), "table": table_payload(result.table)}]
    if isinstance(result, PageStructure):
        elements = []
        for element in result.structure.elements:
            if isinstance(element, RegionTableElement):
                elements.append({
                    "region": region_payload(element.region),
                    "table": table_payload(element.table),
                })
            elif isinstance(element, RegionTextElement):
                elements.append({
                    "region": region_payload(element.region),
                    "instances": [instance_payload(i) for i in element.instances],
                })
            else:
                raise TypeError(f"unknown element type {type(element).__name__}")
        return elements
    raise TypeError(f"unknown page result type {type(result).__name__}")


def report_payload(report: PipelineReport) -> dict:
    pages = [
        {"page_index": result.page_index, "elements": _page_elements(result)}
        for result in report.pages
    ]
    return {
        "version": SCHEMA_VERSION,
        "pipeline": report.pipeline,
        "source": report.source,
        "pages": pages,
    }


def canonical_json(payload: dict) -> str:
    return json.dumps(payload, ensure_ascii=False, indent=2) + "\n"


def serialize_result(report: PipelineReport) -> str:
    """UTF-8 canonical JSON for a pipeline report (timings and warnings are
    diagnostics and stay out of the document)."""
    return canonical_json(report_payload(report))


def parse_document(text: str) -> dict:
    """Parse a serialized document, checking the schema version."""
    payload = json.loads(text)
    if not isinstance(payload, dict) or payload.get("version") != SCHEMA_VERSION:
        raise ValueError(f"unsupported document version {payload.get('version')!r}"
                         if isinstance(payload, dict) else "not a document object")
    return payload


def reserialize(text: str) -> str:
    """Parse + re-serialize; the identity on canonical documents."""
    return canonical_json(parse_document(text))
