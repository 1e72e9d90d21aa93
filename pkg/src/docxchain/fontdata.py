"""Embedded 8x16 fixed-advance bitmap font shared by the synthetic page renderer
and the template-matching recognizer.

Design constraints (load-bearing; tests enforce them):

- every non-space glyph carries a full-height spine in column 0, so the ink of
  any rendered line spans exactly 16 * scale rows and starts on a cell
  boundary -- this is what makes extent-based scale normalization and
  fixed-width slot segmentation exact at integer scales;
- glyph ink stays in columns 0..6; column 7 is the advance gap, so adjacent
  glyphs never touch and the last slot of a line may be zero-padded;
- every glyph is a single 8-connected component, so the detector's small-
  component filter can never split a glyph;
- all 95 printable ASCII glyphs are pairwise distinct bitmaps (space is the
  absence of ink and has no bitmap).

The letterforms are stylized around the spine rather than typographically
faithful; they only need to be distinct and stable.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

GLYPH_W = 8
GLYPH_H = 16
FIRST_CODEPOINT = 0x20
LAST_CODEPOINT = 0x7E

# Stroke ops: ("h", row, c0, c1) / ("v", col, r0, r1) / ("d", r0, c0, r1, c1) / ("p", row, col).
# All glyphs additionally get the column-0 spine.
_STROKES: dict[str, list[tuple]] = {
    "!": [("v", 1, 0, 10), ("p", 13, 1), ("p", 14, 1)],
    '"': [("h", 0, 1, 4), ("p", 1, 2), ("p", 2, 2), ("p", 1, 4), ("p", 2, 4)],
    "#": [("h", 5, 1, 6), ("h", 10, 1, 6), ("v", 3, 2, 13), ("v", 5, 2, 13)],
    "$": [("h", 2, 1, 5), ("h", 7, 1, 5), ("h", 13, 1, 5), ("v", 4, 0, 15), ("v", 6, 8, 12)],
    "%": [("p", 1, 1), ("p", 1, 2), ("p", 2, 1), ("p", 2, 2), ("d", 0, 6, 15, 1),
          ("p", 12, 3), ("p", 12, 4), ("p", 13, 3), ("p", 13, 4)],
    "&": [("h", 0, 1, 4), ("v", 5, 1, 5), ("h", 6, 1, 4), ("d", 7, 2, 14, 6), ("h", 15, 1, 6)],
    "'": [("v", 1, 0, 2)],
    "(": [("d", 0, 3, 3, 1), ("v", 1, 4, 11), ("d", 12, 1, 15, 3)],
    ")": [("d", 0, 1, 3, 3), ("v", 3, 4, 11), ("d", 12, 3, 15, 1)],
    "*": [("d", 5, 1, 11, 5), ("d", 5, 5, 11, 1), ("h", 8, 1, 5)],
    "+": [("h", 8, 1, 5), ("v", 3, 5, 11)],
    ",": [("v", 1, 12, 14), ("p", 13, 2)],
    "-": [("h", 8, 1, 5)],
    ".": [("p", 13, 1), ("p", 13, 2), ("p", 14, 1), ("p", 14, 2)],
    "/": [("d", 0, 6, 15, 1)],
    "0": [("h", 0, 1, 5), ("h", 15, 1, 5), ("v", 6, 1, 14), ("d", 12, 2, 3, 5)],
    "1": [("v", 4, 0, 14), ("d", 2, 2, 0, 4), ("h", 15, 1, 6)],
    "2": [("h", 0, 1, 5), ("v", 6, 1, 6), ("d", 7, 5, 14, 1), ("h", 15, 1, 6)],
    "3": [("h", 0, 1, 5), ("v", 6, 1, 14), ("h", 7, 2, 5), ("h", 15, 1, 5)],
    "4": [("h", 9, 1, 6), ("v", 5, 0, 15)],
    "5": [("h", 0, 1, 6), ("h", 6, 1, 5), ("v", 6, 7, 13), ("h", 14, 1, 5)],
    "6": [("h", 0, 1, 6), ("h", 8, 1, 5), ("v", 6, 9, 14), ("h", 15, 1, 5)],
    "7": [("h", 0, 1, 6), ("d", 1, 6, 15, 2)],
    "8": [("h", 0, 1, 4), ("h", 7, 1, 4), ("h", 15, 1, 4), ("v", 5, 1, 6), ("v", 5, 8, 14)],
    "9": [("h", 0, 2, 5), ("h", 7, 2, 5), ("v", 6, 1, 13), ("h", 14, 1, 5)],
    ":": [("p", 4, 1), ("p", 4, 2), ("p", 5, 1), ("p", 5, 2),
          ("p", 11, 1), ("p", 11, 2), ("p", 12, 1), ("p", 12, 2)],
    ";": [("p", 4, 1), ("p", 4, 2), ("p", 5, 1), ("p", 5, 2), ("v", 1, 11, 13), ("p", 12, 2)],
    "<": [("d", 2, 5, 8, 1), ("d", 8, 1, 14, 5)],
    "=": [("h", 6, 1, 5), ("h", 10, 1, 5)],
    ">": [("d", 2, 1, 8, 5), ("d", 8, 5, 14, 1)],
    "?": [("h", 0, 1, 5), ("v", 6, 1, 5), ("d", 6, 5, 14, 1)],
    "@": [("h", 0, 1, 5), ("v", 6, 1, 13), ("h", 14, 2, 5), ("v", 2, 6, 9), ("h", 9, 3, 5)],
    "A": [("h", 0, 1, 6), ("v", 6, 1, 15), ("h", 8, 1, 5)],
    "B": [("h", 0, 1, 5), ("h", 7, 1, 5), ("h", 15, 1, 5), ("v", 6, 1, 6), ("v", 6, 8, 14)],
    "C": [("h", 0, 1, 6), ("h", 15, 1, 6)],
    "D": [("h", 0, 1, 4), ("h", 15, 1, 4), ("v", 6, 2, 13), ("p", 1, 5), ("p", 14, 5)],
    "E": [("h", 0, 1, 6), ("h", 7, 1, 4), ("h", 15, 1, 6)],
    "F": [("h", 0, 1, 6), ("h", 7, 1, 4)],
    "G": [("h", 0, 1, 6), ("h", 15, 1, 6), ("v", 6, 8, 14), ("h", 8, 3, 6)],
    "H": [("v", 6, 0, 15), ("h", 7, 1, 5)],
    "I": [("h", 0, 1, 5), ("h", 15, 1, 5), ("v", 3, 1, 14)],
    "J": [("h", 0, 1, 6), ("v", 4, 1, 13), ("h", 14, 1, 3)],
    "K": [("d", 7, 1, 0, 6), ("d", 8, 1, 15, 6)],
    "L": [("h", 15, 1, 6), ("v", 6, 12, 14)],
    "M": [("v", 6, 0, 15), ("d", 1, 1, 7, 3), ("d", 1, 5, 7, 3)],
    "N": [("v", 6, 0, 15), ("d", 0, 1, 15, 5)],
    "O": [("h", 0, 1, 5), ("h", 15, 1, 5), ("v", 6, 1, 14)],
    "P": [("h", 0, 1, 5), ("v", 6, 1, 7), ("h", 8, 1, 5)],
    "Q": [("h", 0, 1, 5), ("h", 14, 1, 4), ("v", 6, 1, 13), ("d", 11, 3, 15, 6)],
    "R": [("h", 0, 1, 5), ("v", 6, 1, 7), ("h", 8, 1, 5), ("d", 9, 2, 15, 6)],
    "S": [("h", 0, 1, 6), ("h", 7, 1, 6), ("v", 6, 8, 14), ("h", 15, 1, 6)],
    "T": [("h", 0, 1, 6), ("v", 3, 1, 15)],
    "U": [("v", 6, 0, 14), ("h", 15, 1, 5)],
    "V": [("d", 0, 6, 15, 2), ("p", 15, 1)],
    "W": [("v", 6, 0, 15), ("d", 8, 3, 15, 1), ("d", 8, 3, 15, 5)],
    "X": [("d", 0, 1, 15, 6), ("d", 0, 6, 15, 1)],
    "Y": [("d", 0, 1, 6, 3), ("d", 0, 6, 7, 3), ("v", 3, 8, 15)],
    "Z": [("h", 0, 1, 6), ("d", 1, 6, 14, 1), ("h", 15, 1, 6)],
    "[": [("h", 0, 1, 4), ("h", 15, 1, 4)],
    "\\": [("d", 0, 1, 15, 6)],
    "]": [("h", 0, 1, 4), ("v", 4, 1, 14), ("h", 15, 1, 4)],
    "^": [("d", 3, 1, 0, 3), ("d", 0, 3, 3, 5)],
    "_": [("h", 15, 1, 6)],
    "`": [("p", 0, 1), ("p", 1, 2)],
    "a": [("h", 5, 1, 5), ("v", 6, 6, 14), ("h", 10, 1, 5), ("h", 15, 1, 6)],
    "b": [("h", 7, 1, 5), ("v", 6, 8, 14), ("h", 15, 1, 5)],
    "c": [("h", 5, 1, 6), ("h", 15, 1, 6)],
    "d": [("v", 6, 0, 15), ("h", 8, 1, 5), ("h", 15, 1, 5)],
    "e": [("h", 5, 1, 5), ("v", 6, 6, 9), ("h", 10, 1, 5), ("h", 15, 1, 6)],
    "f": [("h", 0, 1, 5), ("h", 8, 1, 4)],
    "g": [("h", 5, 1, 5), ("v", 6, 5, 15), ("h", 11, 1, 5), ("h", 15, 1, 5)],
    "h": [("v", 6, 8, 15), ("h", 7, 1, 5)],
    "i": [("p", 2, 1), ("p", 2, 2), ("v", 3, 5, 14), ("h", 15, 1, 5)],
    "j": [("p", 2, 1), ("p", 2, 2), ("v", 4, 5, 14), ("h", 15, 1, 3)],
    "k": [("d", 5, 5, 9, 1), ("d", 10, 2, 15, 6)],
    "l": [("v", 2, 0, 14), ("h", 15, 1, 4)],
    "m": [("h", 5, 1, 5), ("v", 3, 6, 15), ("v", 6, 6, 15)],
    "n": [("h", 5, 1, 5), ("v", 6, 6, 15)],
    "o": [("h", 5, 1, 5), ("h", 15, 1, 5), ("v", 6, 6, 14)],
    "p": [("h", 5, 1, 5), ("h", 11, 1, 5), ("v", 6, 6, 10)],
    "q": [("h", 5, 1, 5), ("h", 11, 1, 5), ("v", 6, 6, 15)],
    "r": [("h", 5, 1, 6), ("p", 6, 6)],
    "s": [("h", 5, 1, 5), ("h", 10, 1, 5), ("h", 15, 1, 5), ("v", 6, 11, 14)],
    "t": [("v", 2, 0, 14), ("h", 5, 1, 5), ("h", 15, 2, 5)],
    "u": [("v", 6, 5, 14), ("h", 15, 1, 5)],
    "v": [("d", 5, 6, 15, 2), ("p", 15, 1)],
    "w": [("v", 3, 8, 14), ("v", 6, 5, 14), ("h", 15, 1, 5)],
    "x": [("d", 5, 1, 15, 6), ("d", 5, 6, 15, 1)],
    "y": [("d", 5, 1, 10, 3), ("d", 5, 6, 15, 1)],
    "z": [("h", 5, 1, 6), ("d", 6, 5, 14, 1), ("h", 15, 1, 6)],
    "{": [("v", 2, 1, 14), ("h", 0, 3, 4), ("h", 15, 3, 4), ("p", 7, 1), ("p", 8, 1)],
    "|": [("v", 1, 0, 15)],
    "}": [("v", 4, 1, 14), ("h", 0, 1, 3), ("h", 15, 1, 3), ("p", 7, 5), ("p", 8, 5)],
    "~": [("p", 6, 1), ("p", 5, 2), ("p", 4, 3), ("p", 5, 4), ("p", 6, 5)],
}


def _draw_line(canvas: np.ndarray, r0: int, c0: int, r1: int, c1: int) -> None:
    """Bresenham line on the glyph canvas."""
    dc = abs(c1 - c0)
    dr = -abs(r1 - r0)
    sc = 1 if c0 < c1 else -1
    sr = 1 if r0 < r1 else -1
    err = dc + dr
    r, c = r0, c0
    while True:
        canvas[r, c] = True
        if r == r1 and c == c1:
            break
        e2 = 2 * err
        if e2 >= dr:
            err += dr
            c += sc
        if e2 <= dc:
            err += dc
            r += sr


def _build_glyph(strokes: list[tuple]) -> np.ndarray:
    canvas = np.zeros((GLYPH_H, GLYPH_W), dtype=bool)
    canvas[:, 0] = True  # spine
    for op in strokes:
        if op[0] == "h":
            _, r, c0, c1 = op
            canvas[r, c0:c1 + 1] = True
        elif op[0] == "v":
            _, c, r0, r1 = op
            canvas[r0:r1 + 1, c] = True
        elif op[0] == "d":
            _, r0, c0, r1, c1 = op
            _draw_line(canvas, r0, c0, r1, c1)
        elif op[0] == "p":
            _, r, c = op
            canvas[r, c] = True
        else:
            raise ValueError(f"unknown stroke op {op!r}")
    return canvas


@lru_cache(maxsize=1)
def glyph_bitmaps() -> dict[str, np.ndarray]:
    """All printable non-space ASCII glyphs as read-only 16x8 boolean bitmaps."""
    out = {}
    for ch, strokes in _STROKES.items():
        bmp = _build_glyph(strokes)
        bmp.setflags(write=False)
        out[ch] = bmp
    return out


def glyph_bitmap(ch: str) -> np.ndarray:
    if ch == " ":
        raise ValueError("space has no bitmap; it is the absence of ink")
    try:
        return glyph_bitmaps()[ch]
    except KeyError:
        raise ValueError(f"no glyph for {ch!r}; supported range is printable ASCII") from None


@lru_cache(maxsize=1)
def template_stack() -> tuple[str, np.ndarray]:
    """(characters, bitmaps) with bitmaps stacked as (n, 16, 8) for vectorized matching."""
    chars = "".join(sorted(glyph_bitmaps()))
    stack = np.stack([glyph_bitmaps()[c] for c in chars])
    stack.setflags(write=False)
    return chars, stack
