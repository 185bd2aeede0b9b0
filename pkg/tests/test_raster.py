"""Tests for binary masks and polygon rasterisation."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from aisp.errors import EmptyMaskError, ParameterError, ShapeError
from aisp.masks.raster import BinaryMask, Polygon, iou_matrix, mask_area, mask_iou, rasterize_polygon


def _square(x0, y0, x1, y1) -> Polygon:
    return Polygon(((x0, y0), (x1, y0), (x1, y1), (x0, y1)))


def _pentagram(cx, cy, r) -> Polygon:
    angles = [-math.pi / 2 + k * 4 * math.pi / 5 for k in range(5)]
    return Polygon(tuple((cx + r * math.cos(a), cy + r * math.sin(a)) for a in angles))


class TestPolygon:
    def test_needs_three_vertices(self):
        with pytest.raises(ParameterError):
            Polygon(((0, 0), (1, 1)))

    def test_non_finite_rejected(self):
        with pytest.raises(ParameterError):
            Polygon(((0, 0), (1, float("inf")), (2, 0)))

    def test_area_is_orientation_free(self):
        square = _square(0, 0, 3, 2)
        assert square.area() == 6.0
        assert Polygon(tuple(reversed(square.vertices))).area() == 6.0

    def test_affine_transform(self):
        moved = _square(0, 0, 1, 1).transform(np.array([[2.0, 0, 1], [0, 2.0, 0]]))
        assert moved.bounds() == (1.0, 0.0, 3.0, 2.0)
        with pytest.raises(ShapeError):
            moved.transform(np.eye(3))


class TestRasterize:
    """Even-odd rule at pixel centres."""

    def test_axis_aligned_square(self):
        mask = rasterize_polygon(_square(1, 2, 5, 4), 8, 8)
        assert mask.area == 8
        assert mask.bbox() == (1, 2, 5, 4)

    def test_sub_pixel_sliver_misses_centres(self):
        assert rasterize_polygon(_square(0, 0, 0.4, 1), 4, 4).is_empty()

    def test_triangle(self):
        mask = rasterize_polygon(Polygon(((0, 0), (4, 0), (0, 4))), 4, 4)
        expected = np.array(
            [
                [1, 1, 1, 0],
                [1, 1, 0, 0],
                [1, 0, 0, 0],
                [0, 0, 0, 0],
            ],
            dtype=bool,
        )
        np.testing.assert_array_equal(mask.bits, expected)

    def test_self_intersection_leaves_even_hole(self):
        mask = rasterize_polygon(_pentagram(16, 16, 14), 32, 32)
        assert not mask.bits[15, 15]
        assert mask.bits[5, 15]

    def test_clipped_by_canvas(self):
        mask = rasterize_polygon(_square(-5, -5, 2, 2), 4, 4)
        assert mask.area == 4

    def test_outside_canvas_is_empty(self):
        assert rasterize_polygon(_square(10, 10, 12, 12), 4, 4).is_empty()

    def test_bad_canvas(self):
        with pytest.raises(ParameterError):
            rasterize_polygon(_square(0, 0, 1, 1), 0, 4)

    @given(
        st.integers(0, 10), st.integers(0, 10), st.integers(1, 10), st.integers(1, 10)
    )
    def test_integer_rectangle_area(self, x, y, w, h):
        mask = rasterize_polygon(_square(x, y, x + w, y + h), 24, 24)
        assert mask_area(mask) == w * h


class TestMaskOps:
    def test_rejects_empty_canvas(self):
        with pytest.raises(ShapeError):
            BinaryMask(np.zeros((0, 3), dtype=bool))

    def test_bits_read_only(self):
        mask = BinaryMask.empty(3, 2)
        assert mask.shape == (2, 3)
        with pytest.raises(ValueError):
            mask.bits[0, 0] = True

    def test_empty_bbox(self):
        with pytest.raises(EmptyMaskError):
            BinaryMask.empty(2, 2).bbox()

    def test_set_operations(self):
        a = BinaryMask(np.array([[1, 1, 0]], dtype=bool))
        b = BinaryMask(np.array([[0, 1, 1]], dtype=bool))
        assert a.union(b).area == 3
        assert a.intersection(b).area == 1
        assert a.difference(b) == BinaryMask(np.array([[1, 0, 0]], dtype=bool))
        assert a.intersection(b).is_subset_of(a)
        assert not a.is_subset_of(b)
        with pytest.raises(ShapeError):
            a.union(BinaryMask.empty(2, 1))

    def test_iou(self):
        a = BinaryMask(np.array([[1, 1, 0, 0]], dtype=bool))
        b = BinaryMask(np.array([[0, 1, 1, 0]], dtype=bool))
        assert mask_iou(a, b) == pytest.approx(1 / 3)
        assert mask_iou(BinaryMask.empty(4, 1), BinaryMask.empty(4, 1)) == 1.0

    def test_iou_matrix(self):
        a = BinaryMask(np.array([[1, 1, 0, 0]], dtype=bool))
        b = BinaryMask(np.array([[0, 0, 1, 1]], dtype=bool))
        m = iou_matrix([a, b], [a, b, BinaryMask.empty(4, 1)])
        np.testing.assert_allclose(m, [[1, 0, 0], [0, 1, 0]])
        assert iou_matrix([], [a]).shape == (0, 1)
