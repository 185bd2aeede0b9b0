"""
Binary PGM ("P5") images.

8-bit files hold masks (0 = background, 255 = foreground) and grayscale
images; 16-bit files (maxval > 255, big-endian samples) hold depth maps.
"""

import re
from pathlib import Path
from typing import Optional

import numpy as np
from loguru import logger

from ..errors import AnnotationParseError, ParameterError
from ..masks.raster import BinaryMask
from ..utils.validation import validate_file_exists
from .writer import write_atomic

_TOKEN = re.compile(rb"(?:\s+|#[^\n]*\n)*(\S+)")


def read_pgm(path: Path) -> np.ndarray:
    """
    Read a P5 file into an H x W uint8 or uint16 array.

    Raises:
        FileNotFoundError: If the file does not exist
        AnnotationParseError: If the header or payload is malformed
    """
    path = Path(path)
    validate_file_exists(path, "PGM file")
    raw = path.read_bytes()

    pos = 0
    fields = []
    for _ in range(4):
        match = _TOKEN.match(raw, pos)
        if match is None:
            raise AnnotationParseError("truncated PGM header", location=str(path))
        fields.append(match.group(1))
        pos = match.end()
    if fields[0] != b"P5":
        raise AnnotationParseError(f"not a binary PGM (magic {fields[0]!r})", location=str(path))
    try:
        width, height, maxval = (int(tok) for tok in fields[1:])
    except ValueError as e:
        raise AnnotationParseError(f"bad PGM header: {e}", location=str(path)) from e
    if width < 1 or height < 1 or not 0 < maxval < 65536:
        raise AnnotationParseError(f"bad PGM dimensions {width}x{height} maxval {maxval}", location=str(path))

    # exactly one whitespace byte separates the header from the samples
    pos += 1
    dtype = np.dtype(np.uint8) if maxval < 256 else np.dtype(">u2")
    expected = width * height * dtype.itemsize
    payload = raw[pos:pos + expected]
    if len(payload) != expected:
        raise AnnotationParseError(
            f"PGM payload has {len(payload)} bytes, expected {expected}", location=str(path)
        )
    image = np.frombuffer(payload, dtype=dtype).reshape(height, width)
    logger.debug(f"Read {width}x{height} PGM (maxval {maxval}) from {path}")
    return image.astype(np.uint8 if maxval < 256 else np.uint16)


def write_pgm(path: Path, image: np.ndarray, maxval: Optional[int] = None) -> None:
    """Write an H x W integer array as P5 (16-bit when maxval > 255)."""
    image = np.asarray(image)
    if image.ndim != 2:
        raise ParameterError(f"PGM image must be H x W, got shape {image.shape}")
    if maxval is None:
        maxval = 255 if image.dtype == np.uint8 or image.max(initial=0) < 256 else 65535
    if image.min(initial=0) < 0 or image.max(initial=0) > maxval:
        raise ParameterError(f"PGM samples must lie in [0, {maxval}]")
    dtype = np.uint8 if maxval < 256 else np.dtype(">u2")
    header = f"P5\n{image.shape[1]} {image.shape[0]}\n{maxval}\n".encode("ascii")
    write_atomic(Path(path), header + image.astype(dtype).tobytes())


def load_mask(path: Path) -> BinaryMask:
    """Any non-zero sample is foreground."""
    return BinaryMask(read_pgm(path) > 0)


def save_mask(path: Path, mask: BinaryMask) -> None:
    write_pgm(path, mask.bits.astype(np.uint8) * 255, maxval=255)


def load_depth(path: Path, scale: float = 0.001) -> np.ndarray:
    """Depth map in metres: raw samples times ``scale`` (0 stays 0, meaning no reading)."""
    return read_pgm(path).astype(np.float64) * scale
