"""
Binary masks and polygon rasterisation.

Pixel (x, y) is column x, row y; its centre is (x + 0.5, y + 0.5). A pixel
belongs to a polygon when its centre is inside under the even-odd rule.
"""

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from ..errors import EmptyMaskError, ParameterError, ShapeError

Vertex = Tuple[float, float]
BBox = Tuple[int, int, int, int]


@dataclass(frozen=True, eq=False)
class BinaryMask:
    """Read-only H x W boolean mask."""

    bits: np.ndarray

    def __post_init__(self):
        bits = np.array(self.bits, dtype=bool)
        if bits.ndim != 2 or bits.shape[0] < 1 or bits.shape[1] < 1:
            raise ShapeError(f"Mask must be a non-empty H x W array, got shape {bits.shape}")
        bits.flags.writeable = False
        object.__setattr__(self, "bits", bits)

    @classmethod
    def empty(cls, width: int, height: int) -> "BinaryMask":
        return cls(np.zeros((height, width), dtype=bool))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]

    @property
    def shape(self) -> Tuple[int, int]:
        return self.bits.shape  # type: ignore[return-value]

    @property
    def area(self) -> int:
        return int(np.count_nonzero(self.bits))

    def is_empty(self) -> bool:
        return not self.bits.any()

    def bbox(self) -> BBox:
        """(x0, y0, x1, y1) with exclusive upper bounds."""
        if self.is_empty():
            raise EmptyMaskError("Empty mask has no bounding box")
        rows = np.flatnonzero(self.bits.any(axis=1))
        cols = np.flatnonzero(self.bits.any(axis=0))
        return int(cols[0]), int(rows[0]), int(cols[-1]) + 1, int(rows[-1]) + 1

    def _check_same(self, other: "BinaryMask") -> None:
        if self.shape != other.shape:
            raise ShapeError(f"Mask shapes differ: {self.shape} vs {other.shape}")

    def union(self, other: "BinaryMask") -> "BinaryMask":
        self._check_same(other)
        return BinaryMask(self.bits | other.bits)

    def intersection(self, other: "BinaryMask") -> "BinaryMask":
        self._check_same(other)
        return BinaryMask(self.bits & other.bits)

    def difference(self, other: "BinaryMask") -> "BinaryMask":
        self._check_same(other)
        return BinaryMask(self.bits & ~other.bits)

    def is_subset_of(self, other: "BinaryMask") -> bool:
        self._check_same(other)
        return not np.any(self.bits & ~other.bits)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BinaryMask):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.bits, other.bits))

    def __hash__(self) -> int:
        return hash((self.shape, self.bits.tobytes()))

    def __repr__(self) -> str:
        return f"BinaryMask({self.width}x{self.height}, area={self.area})"


@dataclass(frozen=True)
class Polygon:
    """Closed polygon, at least three vertices; the last vertex connects to the first."""

    vertices: Tuple[Vertex, ...]

    def __post_init__(self):
        verts = tuple((float(x), float(y)) for x, y in self.vertices)
        if len(verts) < 3:
            raise ParameterError(f"Polygon needs at least 3 vertices, got {len(verts)}")
        if not all(math.isfinite(c) for v in verts for c in v):
            raise ParameterError("Polygon vertices must be finite")
        object.__setattr__(self, "vertices", verts)

    @classmethod
    def from_array(cls, points: np.ndarray) -> "Polygon":
        return cls(tuple(map(tuple, np.asarray(points, dtype=float))))

    def as_array(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)

    def area(self) -> float:
        """Unsigned shoelace area."""
        pts = self.as_array()
        x, y = pts[:, 0], pts[:, 1]
        return 0.5 * abs(float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1))))

    def translate(self, dx: float, dy: float) -> "Polygon":
        return Polygon.from_array(self.as_array() + [dx, dy])

    def transform(self, matrix: np.ndarray) -> "Polygon":
        """Apply a 2x3 affine matrix to every vertex."""
        m = np.asarray(matrix, dtype=float)
        if m.shape != (2, 3):
            raise ShapeError(f"Affine matrix must be 2x3, got {m.shape}")
        pts = self.as_array()
        return Polygon.from_array(pts @ m[:, :2].T + m[:, 2])

    def bounds(self) -> Tuple[float, float, float, float]:
        pts = self.as_array()
        return float(pts[:, 0].min()), float(pts[:, 1].min()), float(pts[:, 0].max()), float(pts[:, 1].max())


def rasterize_polygon(polygon: Polygon, width: int, height: int) -> BinaryMask:
    """
    Even-odd scanline rasterisation at pixel centres.

    For each row the edge crossings of the line y = row + 0.5 are sorted; a
    pixel is inside when an odd number of crossings lies to the right of its centre.
    """
    if width < 1 or height < 1:
        raise ParameterError(f"Canvas must be at least 1x1, got {width}x{height}")

    pts = polygon.as_array()
    x0, y0 = pts[:, 0], pts[:, 1]
    x1, y1 = np.roll(x0, -1), np.roll(y0, -1)
    centres = np.arange(width) + 0.5
    bits = np.zeros((height, width), dtype=bool)

    _, ymin, _, ymax = polygon.bounds()
    first = max(0, int(math.floor(ymin - 0.5)))
    last = min(height - 1, int(math.ceil(ymax - 0.5)))
    for row in range(first, last + 1):
        yc = row + 0.5
        crossing = (y0 > yc) != (y1 > yc)
        if not crossing.any():
            continue
        xa, ya, xb, yb = x0[crossing], y0[crossing], x1[crossing], y1[crossing]
        xs = np.sort(xa + (yc - ya) * (xb - xa) / (yb - ya))
        right = xs.size - np.searchsorted(xs, centres, side="right")
        bits[row] = (right % 2) == 1

    return BinaryMask(bits)


def mask_area(mask: BinaryMask) -> int:
    return mask.area


def mask_iou(a: BinaryMask, b: BinaryMask) -> float:
    """Intersection over union; two empty masks have IoU 1."""
    a._check_same(b)
    union = np.count_nonzero(a.bits | b.bits)
    if union == 0:
        return 1.0
    return np.count_nonzero(a.bits & b.bits) / union


def iou_matrix(rows: Sequence[BinaryMask], cols: Sequence[BinaryMask]) -> np.ndarray:
    """Pairwise IoU of two mask lists of equal canvas size (len(rows) x len(cols))."""
    if not rows or not cols:
        return np.zeros((len(rows), len(cols)))
    shape = rows[0].shape
    for m in list(rows) + list(cols):
        if m.shape != shape:
            raise ShapeError(f"Mask shapes differ: {shape} vs {m.shape}")
    a = np.stack([m.bits.ravel() for m in rows]).astype(np.float64)
    b = np.stack([m.bits.ravel() for m in cols]).astype(np.float64)
    inter = a @ b.T
    union = a.sum(axis=1)[:, None] + b.sum(axis=1)[None, :] - inter
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(union > 0, inter / np.where(union > 0, union, 1.0), 1.0)

