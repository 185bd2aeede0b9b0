"""Validation utilities."""

import math
from pathlib import Path
from typing import Iterable

from ..errors import ParameterError


def validate_file_exists(path: Path, description: str = "File") -> None:
    """
    Validate that file exists.

    Args:
        path: File path
        description: Description for error message

    Raises:
        FileNotFoundError: If file doesn't exist
        ValueError: If the path is not a regular file
    """
    if not path.exists():
        raise FileNotFoundError(f"{description} not found: {path}")

    if not path.is_file():
        raise ValueError(f"{description} is not a file: {path}")


def validate_positive_number(value: float, field_name: str, allow_zero: bool = True) -> None:
    """
    Validate that number is finite and positive.

    Args:
        value: Number value
        field_name: Field name for error message
        allow_zero: Allow zero value

    Raises:
        ParameterError: If number is non-finite, negative or (if not allow_zero) zero
    """
    if not math.isfinite(value):
        raise ParameterError(f"{field_name} must be finite, got {value}")

    if allow_zero:
        if value < 0:
            raise ParameterError(f"{field_name} must be >= 0, got {value}")
    else:
        if value <= 0:
            raise ParameterError(f"{field_name} must be > 0, got {value}")


def validate_odd_kernel(k: int, field_name: str = "kernel") -> None:
    """Kernels must be odd so that padding k//2 keeps the grid centred."""
    if k < 1 or k % 2 == 0:
        raise ParameterError(f"{field_name} must be a positive odd integer, got {k}")


def validate_finite(values: Iterable[float], field_name: str) -> None:
    """Reject NaN/Inf in a sequence of scalars."""
    for v in values:
        if not math.isfinite(v):
            raise ParameterError(f"{field_name} must be finite, got {v}")
