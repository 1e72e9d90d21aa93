"""Text recognition: read the content of detected instances.

The classical backend matches fixed-advance 8x16 glyph templates after
nearest-neighbor scale normalization. Because every font glyph spans the full
cell height and starts on its cell boundary (see fontdata), integer-scale
renders normalize back to the template grid exactly.
"""

from __future__ import annotations

import math
import re

import numpy as np

from .detect import BackendRef
from .errors import BackendProtocolError, EmptyCrop
from .fontdata import GLYPH_H, GLYPH_W, template_stack
from .imgproc import ink_bbox, ink_mask
from .model import PageImage, TextContent, TextInstance

_TEMPLATE_BITS = GLYPH_H * GLYPH_W  # 128


def classical_recognize(crop: PageImage) -> TextContent:
    """Template recognition of a single line crop.

    Steps: binarize; locate the ink box; scale it so its height becomes 16
    (nearest neighbor, width follows proportionally); cut into 8-wide slots;
    match each slot against the glyph templates by Hamming distance. Empty
    slots read as spaces; space runs collapse and ends are stripped.
    Confidence is the mean over slots of (1 - distance / 128).
    """
    mask = ink_mask(crop)
    box = ink_bbox(mask)
    if box is None:
        return TextContent("", 1.0)
    x0, y0, x1, y1 = box
    h = y1 - y0
    w = x1 - x0

    target_w = max(1, round(w * GLYPH_H / h))
    src_rows = y0 + np.minimum(h - 1, ((np.arange(GLYPH_H) + 0.5) * h / GLYPH_H).astype(np.int64))
    src_cols = x0 + np.minimum(w - 1, ((np.arange(target_w) + 0.5) * w / target_w).astype(np.int64))
    norm = mask[np.ix_(src_rows, src_cols)]

    n_slots = math.ceil(target_w / GLYPH_W)
    padded = np.zeros((GLYPH_H, n_slots * GLYPH_W), dtype=bool)
    padded[:, :target_w] = norm
    slots = padded.reshape(GLYPH_H, n_slots, GLYPH_W).transpose(1, 0, 2)

    chars, templates = template_stack()
    distances = np.zeros(n_slots, dtype=np.float64)
    occupied = slots.any(axis=(1, 2))
    pieces = [" "] * n_slots
    if occupied.any():
        diff = slots[occupied, None, :, :] != templates[None, :, :, :]
        dist = diff.sum(axis=(2, 3))
        best = dist.argmin(axis=1)  # ties resolve to the lowest codepoint
        distances[occupied] = dist[np.arange(len(best)), best]
        for k, slot_index in enumerate(np.flatnonzero(occupied)):
            pieces[int(slot_index)] = chars[int(best[k])]
    text = re.sub(r" +", " ", "".join(pieces)).strip()
    confidence = float(np.mean(1.0 - distances / _TEMPLATE_BITS))
    return TextContent(text, confidence)


def recognize_text(page: PageImage, instance: TextInstance, backend: BackendRef | None = None) -> TextContent:
    """Recognize one instance; the quad is clipped to the page before cropping."""
    backend = backend or BackendRef.classical()
    x0, y0, x1, y1 = instance.quad.bbox()
    cx0 = max(0, math.floor(x0))
    cy0 = max(0, math.floor(y0))
    cx1 = min(page.width, math.ceil(x1))
    cy1 = min(page.height, math.ceil(y1))
    if cx1 <= cx0 or cy1 <= cy0:
        raise EmptyCrop(f"quad {instance.quad.bbox()} has no area inside the page")
    crop = page.crop(cx0, cy0, cx1, cy1)
    if backend.kind == "classical":
        return classical_recognize(crop)
    from . import bridge

    return bridge.recognize_via_backend(backend.endpoint, crop)


def read_instances(
    page: PageImage,
    instances: list[TextInstance],
    backend: BackendRef | None = None,
) -> tuple[list[TextInstance], list[str]]:
    """Recognize every instance, preserving order and length.

    Per-instance failures (empty crops, malformed backend payloads) degrade to
    empty content with confidence 0 and a warning; backend unavailability
    propagates because no useful partial result exists.
    """
    out: list[TextInstance] = []
    warnings: list[str] = []
    for i, inst in enumerate(instances):
        try:
            content = recognize_text(page, inst, backend)
        except (EmptyCrop, BackendProtocolError) as exc:
            warnings.append(f"instance {i}: recognition failed: {exc}")
            content = TextContent("", 0.0)
        out.append(inst.with_content(content))
    return out, warnings
