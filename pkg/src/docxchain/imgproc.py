"""Classical image-processing substrate shared by the reference backends.

Grayscale conversion uses integer arithmetic so results are bit-identical
across platforms.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .model import PageImage

_EIGHT_CONNECTED = np.ones((3, 3), dtype=np.uint8)


def luma(arr: np.ndarray) -> np.ndarray:
    """Integer BT.601 luma (0.299 R + 0.587 G + 0.114 B) as uint8."""
    r = arr[:, :, 0].astype(np.int32)
    g = arr[:, :, 1].astype(np.int32)
    b = arr[:, :, 2].astype(np.int32)
    return ((299 * r + 587 * g + 114 * b) // 1000).astype(np.uint8)


def otsu_threshold(gray: np.ndarray) -> int:
    """Global Otsu threshold; ties resolve to the lowest level.

    Pixels with value <= threshold belong to the dark class. A flat image
    yields threshold 0, so an all-white page has no ink.
    """
    hist = np.bincount(gray.ravel(), minlength=256).astype(np.float64)
    total = hist.sum()
    levels = np.arange(256, dtype=np.float64)
    w0 = np.cumsum(hist)
    m0 = np.cumsum(hist * levels)
    mean_total = m0[-1]
    w1 = total - w0
    # between-class variance for threshold t = split after level t
    with np.errstate(divide="ignore", invalid="ignore"):
        mu0 = m0 / w0
        mu1 = (mean_total - m0) / w1
        sigma_b = w0 * w1 * (mu0 - mu1) ** 2
    sigma_b = np.nan_to_num(sigma_b[:-1], nan=0.0)
    return int(np.argmax(sigma_b))


def ink_mask(page: PageImage) -> np.ndarray:
    """Binarize a page: True where ink (dark side of the Otsu split)."""
    gray = luma(page.to_array())
    t = otsu_threshold(gray)
    return gray <= t


@dataclass(frozen=True)
class Component:
    """An 8-connected ink component; bbox bounds are pixel indices, end-exclusive."""

    x0: int
    y0: int
    x1: int
    y1: int
    area: int

    @property
    def width(self) -> int:
        return self.x1 - self.x0

    @property
    def height(self) -> int:
        return self.y1 - self.y0


def connected_components(mask: np.ndarray) -> list[Component]:
    """Extract 8-connected components of a boolean mask."""
    labels, n = ndimage.label(mask, structure=_EIGHT_CONNECTED)
    if n == 0:
        return []
    slices = ndimage.find_objects(labels)
    areas = np.bincount(labels.ravel())
    out = []
    for i, sl in enumerate(slices, start=1):
        ys, xs = sl
        out.append(Component(xs.start, ys.start, xs.stop, ys.stop, int(areas[i])))
    return out


def ink_bbox(mask: np.ndarray) -> tuple[int, int, int, int] | None:
    """Tight bounding box (x0, y0, x1, y1, end-exclusive) of True pixels, or None."""
    rows = np.flatnonzero(mask.any(axis=1))
    if rows.size == 0:
        return None
    cols = np.flatnonzero(mask.any(axis=0))
    return int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1
