"""
Exact Euclidean distance transform.

Two separable passes of the lower envelope of parabolas: first along every
column, then along every row. Each pass runs on all lines at once; the
envelope state (vertex positions ``v``, boundaries ``z``, head index ``k``) is
kept per line.

All intermediate values are integers or exact halves of integers well below
2**53, so the squared distances come out exact.
"""

from dataclasses import dataclass
from typing import Literal

import numpy as np

from ..errors import ParameterError
from .raster import BinaryMask

BorderPolicy = Literal["border-is-background", "border-is-neutral"]
BORDER_POLICIES = ("border-is-background", "border-is-neutral")


@dataclass(frozen=True, eq=False)
class DistanceField:
    """Squared distance from every pixel to the nearest background pixel."""

    squared: np.ndarray

    def __post_init__(self):
        sq = np.array(self.squared, dtype=np.int64)
        sq.flags.writeable = False
        object.__setattr__(self, "squared", sq)

    @property
    def width(self) -> int:
        return self.squared.shape[1]

    @property
    def height(self) -> int:
        return self.squared.shape[0]

    def distance(self) -> np.ndarray:
        return np.sqrt(self.squared)

    def max_squared(self) -> int:
        return int(self.squared.max())


def _lower_envelope(f: np.ndarray) -> np.ndarray:
    """1-D squared distance transform of every row of ``f``: min_p (q - p)^2 + f[p]."""
    lines, n = f.shape
    rows = np.arange(lines)
    fq = f + np.arange(n, dtype=np.float64) ** 2

    v = np.zeros((lines, n), dtype=np.intp)
    z = np.full((lines, n + 1), np.inf)
    z[:, 0] = -np.inf
    k = np.zeros(lines, dtype=np.intp)

    for q in range(1, n):
        while True:
            vk = v[rows, k]
            s = (fq[:, q] - fq[rows, vk]) / (2.0 * (q - vk))
            pop = s <= z[rows, k]
            if not pop.any():
                break
            k[pop] -= 1
        k += 1
        v[rows, k] = q
        z[rows, k] = s
        z[rows, k + 1] = np.inf

    out = np.empty_like(f)
    k[:] = 0
    for q in range(n):
        while True:
            advance = z[rows, k + 1] < q
            if not advance.any():
                break
            k[advance] += 1
        vk = v[rows, k]
        out[:, q] = (q - vk) ** 2 + f[rows, vk]
    return out


def edt(mask: BinaryMask, border_policy: BorderPolicy = "border-is-background") -> DistanceField:
    """
    Exact squared Euclidean distance transform of a binary mask.

    Args:
        mask: Foreground = instance
        border_policy: ``border-is-background`` adds a virtual background ring
            around the image; ``border-is-neutral`` only measures to real
            background pixels

    Returns:
        DistanceField, zero exactly on background pixels

    Raises:
        ParameterError: Unknown policy, or ``border-is-neutral`` on a mask
            without background
    """
    if border_policy not in BORDER_POLICIES:
        raise ParameterError(f"Unknown border policy {border_policy!r}")

    background = ~mask.bits
    if border_policy == "border-is-background":
        background = np.pad(background, 1, constant_values=True)
    elif not background.any():
        raise ParameterError("border-is-neutral needs at least one background pixel")

    h, w = background.shape
    # exceeds every reachable squared distance on this grid
    big = float((h + w) ** 2 + 1)
    f = np.where(background, 0.0, big)

    columns = _lower_envelope(f.T).T
    squared = _lower_envelope(columns)

    if border_policy == "border-is-background":
        squared = squared[1:-1, 1:-1]
    return DistanceField(np.rint(squared).astype(np.int64))
