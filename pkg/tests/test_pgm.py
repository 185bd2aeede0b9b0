"""Tests for PGM masks, images and depth maps."""

import numpy as np
import pytest

from aisp.errors import AnnotationParseError, ParameterError
from aisp.io.pgm import load_depth, load_mask, read_pgm, save_mask, write_pgm
from aisp.masks.raster import BinaryMask


class TestPgm:
    """P5 reading and writing."""

    def test_mask_round_trip(self, tmp_path):
        bits = np.random.default_rng(0).random((7, 5)) < 0.5
        save_mask(tmp_path / "m.pgm", BinaryMask(bits))
        assert load_mask(tmp_path / "m.pgm") == BinaryMask(bits)

    def test_sixteen_bit_depth(self, tmp_path):
        raw = np.array([[0, 500], [1250, 65535]], dtype=np.uint16)
        write_pgm(tmp_path / "d.pgm", raw, maxval=65535)
        assert read_pgm(tmp_path / "d.pgm").dtype == np.uint16
        np.testing.assert_allclose(load_depth(tmp_path / "d.pgm"), [[0.0, 0.5], [1.25, 65.535]])

    def test_header_comments(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# made by hand\n2 1\n255\n" + bytes([0, 255]))
        np.testing.assert_array_equal(read_pgm(path), [[0, 255]])

    def test_any_non_zero_is_foreground(self, tmp_path):
        path = tmp_path / "g.pgm"
        path.write_bytes(b"P5 3 1 255\n" + bytes([0, 1, 200]))
        np.testing.assert_array_equal(load_mask(path).bits, [[False, True, True]])

    def test_wrong_magic(self, tmp_path):
        path = tmp_path / "a.pgm"
        path.write_bytes(b"P2\n1 1\n255\n0\n")
        with pytest.raises(AnnotationParseError):
            read_pgm(path)

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "t.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(10))
        with pytest.raises(AnnotationParseError) as exc:
            read_pgm(path)
        assert "expected 16" in str(exc.value)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            read_pgm(tmp_path / "nope.pgm")

    def test_out_of_range_samples(self, tmp_path):
        with pytest.raises(ParameterError):
            write_pgm(tmp_path / "x.pgm", np.array([[300]]), maxval=255)
        with pytest.raises(ParameterError):
            write_pgm(tmp_path / "x.pgm", np.zeros(4))
