"""Least-squares line and coefficient of determination between two series."""

from dataclasses import asdict, dataclass
from typing import Sequence

import numpy as np

from ..errors import DegenerateInputError, ParameterError
from ..utils.validation import validate_finite


@dataclass(frozen=True)
class LineFit:
    slope: float
    intercept: float
    r2: float
    n: int

    def as_dict(self) -> dict:
        return asdict(self)


def fit_line(x: Sequence[float], y: Sequence[float]) -> LineFit:
    """
    Fit ``y = slope * x + intercept``.

    Raises:
        ParameterError: Unequal lengths, fewer than two points, non-finite values
        DegenerateInputError: Constant x or y
    """
    if len(x) != len(y):
        raise ParameterError(f"x and y differ in length ({len(x)} vs {len(y)})")
    if len(x) < 2:
        raise ParameterError("At least two points are needed")
    validate_finite(x, "x")
    validate_finite(y, "y")

    xa, ya = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
    dx, dy = xa - xa.mean(), ya - ya.mean()
    sxx, syy, sxy = float(dx @ dx), float(dy @ dy), float(dx @ dy)
    if sxx == 0:
        raise DegenerateInputError("x is constant")
    if syy == 0:
        raise DegenerateInputError("y is constant")

    slope = sxy / sxx
    return LineFit(
        slope=slope,
        intercept=float(ya.mean() - slope * xa.mean()),
        r2=sxy * sxy / (sxx * syy),
        n=len(xa),
    )


def correlate(x: Sequence[float], y: Sequence[float]) -> float:
    """Coefficient of determination ``Sxy^2 / (Sxx Syy)``."""
    return fit_line(x, y).r2
