"""Pinhole camera model, 3-D points and depth sampling."""

import math
from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np
from loguru import logger
from pydantic import BaseModel, ConfigDict, Field

from ..errors import BehindCameraError, InvalidDepthError, ParameterError, RangeError

Frame = Literal["camera", "end_effector", "base"]


class CameraIntrinsics(BaseModel):
    """Focal lengths and principal point, in pixels."""

    model_config = ConfigDict(frozen=True, allow_inf_nan=False)

    fx: float = Field(gt=0)
    fy: float = Field(gt=0)
    cx: float
    cy: float

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class Point3:
    """A point in metres, tagged with the frame it is expressed in."""

    x: float
    y: float
    z: float
    frame: Frame = "camera"

    def __post_init__(self):
        if not all(math.isfinite(c) for c in (self.x, self.y, self.z)):
            raise ParameterError(f"Point coordinates must be finite: ({self.x}, {self.y}, {self.z})")

    @classmethod
    def from_array(cls, values, frame: Frame = "camera") -> "Point3":
        x, y, z = (float(v) for v in np.asarray(values, dtype=float).reshape(3))
        return cls(x, y, z, frame)

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    def distance_to(self, other: "Point3") -> float:
        return float(np.linalg.norm(self.as_array() - other.as_array()))

    def as_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "z": self.z, "frame": self.frame}


def back_project(u: float, v: float, depth: float, k: CameraIntrinsics) -> Point3:
    """
    Camera-frame point seen at pixel (u, v) at the given depth.

    Raises:
        InvalidDepthError: If depth is not a positive finite number
    """
    if not math.isfinite(depth) or depth <= 0:
        raise InvalidDepthError(f"Depth must be positive and finite, got {depth}")
    return Point3((u - k.cx) * depth / k.fx, (v - k.cy) * depth / k.fy, depth, "camera")


def project(p: Point3, k: CameraIntrinsics) -> Tuple[float, float]:
    """
    Pixel coordinates of a camera-frame point.

    Raises:
        BehindCameraError: If the point is not in front of the camera
    """
    if p.z <= 0:
        raise BehindCameraError(f"Point has z = {p.z}; it must lie in front of the camera")
    return k.fx * p.x / p.z + k.cx, k.fy * p.y / p.z + k.cy


@dataclass(frozen=True)
class DepthSample:
    depth: float
    fallback: bool


def sample_depth(depth_map: np.ndarray, x: int, y: int, window: int = 5) -> DepthSample:
    """
    Depth at pixel (x, y), falling back to the median of the valid pixels of a
    ``window`` x ``window`` neighbourhood when the pixel itself has no reading.

    Raises:
        RangeError: If (x, y) lies outside the map
        InvalidDepthError: If no valid depth is found
    """
    depth_map = np.asarray(depth_map, dtype=np.float64)
    h, w = depth_map.shape
    if not (0 <= x < w and 0 <= y < h):
        raise RangeError(f"Pixel ({x}, {y}) outside {w}x{h} depth map")

    value = depth_map[y, x]
    if math.isfinite(value) and value > 0:
        return DepthSample(float(value), False)

    r = window // 2
    patch = depth_map[max(0, y - r):y + r + 1, max(0, x - r):x + r + 1]
    valid = patch[np.isfinite(patch) & (patch > 0)]
    if valid.size == 0:
        raise InvalidDepthError(f"No valid depth at ({x}, {y}) or within its {window}x{window} window")
    median = float(np.median(valid))
    logger.warning(f"No depth at ({x}, {y}); using window median {median:.4f} m over {valid.size} pixels")
    return DepthSample(median, True)
