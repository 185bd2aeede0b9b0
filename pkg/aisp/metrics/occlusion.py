"""Occlusion levels from visible and amodal mask areas."""

from enum import IntEnum
from fractions import Fraction

from ..errors import ConsistencyError, ParameterError
from ..masks.raster import BinaryMask

# inclusive upper bounds of the occlusion ratio per level
ZERO_TOLERANCE = 0.005
LOW_UPPER = 0.20
MEDIUM_UPPER = 0.50


class OcclusionLevel(IntEnum):
    ZERO = 0
    LOW = 1
    MEDIUM = 2
    HIGH = 3

    @property
    def label(self) -> str:
        return self.name.lower()

    @property
    def short(self) -> str:
        return self.name[0]

    @classmethod
    def from_label(cls, label: str) -> "OcclusionLevel":
        key = label.strip().upper()
        for level in cls:
            if key in (level.name, level.short):
                return level
        raise ParameterError(f"Unknown occlusion level {label!r}")


def occlusion_ratio(visible_area: float, amodal_area: float) -> Fraction:
    """Exact ``1 - visible / amodal``."""
    if amodal_area <= 0:
        raise ParameterError(f"Amodal area must be > 0, got {amodal_area}")
    if visible_area < 0:
        raise ParameterError(f"Visible area must be >= 0, got {visible_area}")
    if visible_area > amodal_area:
        raise ConsistencyError(f"Visible area {visible_area} exceeds amodal area {amodal_area}")
    return 1 - Fraction(visible_area) / Fraction(amodal_area)


def occlusion_level(
    visible_area: float,
    amodal_area: float,
    zero_tolerance: float = ZERO_TOLERANCE,
    low_upper: float = LOW_UPPER,
    medium_upper: float = MEDIUM_UPPER,
) -> OcclusionLevel:
    """
    Bin the occlusion ratio; each upper bound is inclusive.

    The comparison is exact, so an area ratio of exactly 0.20 is Low.
    """
    r = occlusion_ratio(visible_area, amodal_area)
    if r <= Fraction(zero_tolerance):
        return OcclusionLevel.ZERO
    if r <= Fraction(low_upper):
        return OcclusionLevel.LOW
    if r <= Fraction(medium_upper):
        return OcclusionLevel.MEDIUM
    return OcclusionLevel.HIGH


def level_of_masks(visible: BinaryMask, amodal: BinaryMask) -> OcclusionLevel:
    if not visible.is_subset_of(amodal):
        raise ConsistencyError("Visible mask is not contained in the amodal mask")
    return occlusion_level(visible.area, amodal.area)
