"""Picking point: the foreground pixel farthest from the background."""

import math
from dataclasses import asdict, dataclass

import numpy as np
from loguru import logger

from ..errors import EmptyMaskError
from .edt import BorderPolicy, edt
from .raster import BinaryMask


@dataclass(frozen=True)
class PickingPoint:
    x: int
    y: int
    clearance: float

    def as_dict(self) -> dict:
        return asdict(self)


def picking_point(mask: BinaryMask, border_policy: BorderPolicy = "border-is-background") -> PickingPoint:
    """
    Maximum-clearance foreground pixel.

    Ties go to the smallest row, then the smallest column. The transform runs
    on the bounding box grown by one pixel: the grown ring is background (or
    the image border), so every foreground pixel's nearest background pixel
    lies inside the crop or on its virtual ring.

    Raises:
        EmptyMaskError: If the mask has no foreground pixel
    """
    if mask.is_empty():
        raise EmptyMaskError("Mask has no foreground pixel; segmentation produced no instance")

    x0, y0, x1, y1 = mask.bbox()
    xa, ya = max(0, x0 - 1), max(0, y0 - 1)
    xb, yb = min(mask.width, x1 + 1), min(mask.height, y1 + 1)
    crop = BinaryMask(mask.bits[ya:yb, xa:xb])

    field = edt(crop, border_policy)
    # argmax of a row-major array returns the first maximum: smallest row, then column
    flat = int(np.argmax(field.squared))
    ry, rx = divmod(flat, crop.width)
    point = PickingPoint(x=xa + rx, y=ya + ry, clearance=math.sqrt(int(field.squared[ry, rx])))
    logger.debug(f"Picking point ({point.x}, {point.y}) clearance {point.clearance:.3f}")
    return point


def mask_centroid(mask: BinaryMask) -> tuple:
    """
    Centre of mass of the foreground pixel centres, as (x, y) floats.

    Unlike the picking point this may fall outside a non-convex mask.
    """
    if mask.is_empty():
        raise EmptyMaskError("Mask has no foreground pixel")
    rows, cols = np.nonzero(mask.bits)
    return float(cols.mean() + 0.5), float(rows.mean() + 0.5)
