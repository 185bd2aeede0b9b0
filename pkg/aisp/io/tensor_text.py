"""
Flat text tensor format.

    line 1: dimensions, whitespace separated (empty line for a 0-d tensor)
    rest:   row-major values, whitespace separated

Values are written with 17 significant digits so float64 survives a round trip.
"""

from pathlib import Path

import numpy as np

from ..errors import AnnotationParseError, ShapeError
from ..nn.tensor import Tensor
from .writer import write_atomic

VALUES_PER_LINE = 8


def format_tensor(tensor: Tensor) -> str:
    header = " ".join(str(d) for d in tensor.shape)
    flat = tensor.data.ravel()
    lines = [header]
    for start in range(0, flat.size, VALUES_PER_LINE):
        lines.append(" ".join(f"{v:.17g}" for v in flat[start:start + VALUES_PER_LINE]))
    return "\n".join(lines) + "\n"


def parse_tensor(text: str, source: str = "<text>") -> Tensor:
    """Parse the flat text format; the value count must match the header."""
    header, _, body = text.partition("\n")
    try:
        dims = tuple(int(tok) for tok in header.split())
    except ValueError as e:
        raise AnnotationParseError(f"bad tensor header {header!r}", location=f"{source}:1") from e
    if any(d < 0 for d in dims):
        raise AnnotationParseError(f"negative dimension in {dims}", location=f"{source}:1")
    try:
        values = np.array(body.split(), dtype=np.float64)
    except ValueError as e:
        raise AnnotationParseError(str(e), location=source) from e

    expected = int(np.prod(dims)) if dims else 1
    if values.size != expected:
        raise ShapeError(f"{source}: header {dims} needs {expected} values, found {values.size}")
    return Tensor(values.reshape(dims))


def save_tensor(path: Path, tensor: Tensor) -> None:
    write_atomic(Path(path), format_tensor(tensor))


def load_tensor(path: Path) -> Tensor:
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"Tensor file not found: {path}")
    return parse_tensor(path.read_text(encoding="utf-8"), source=str(path))
