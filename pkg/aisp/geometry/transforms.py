"""Rigid transforms and the camera -> end-effector -> base chain."""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ParameterError, RotationError, ShapeError
from .camera import Frame, Point3

ORTHONORMAL_TOLERANCE = 1e-9


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """``p -> R p + t`` with R a proper rotation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        r = np.array(self.rotation, dtype=np.float64)
        t = np.array(self.translation, dtype=np.float64).reshape(-1)
        if r.shape != (3, 3) or t.shape != (3,):
            raise ShapeError(f"Rotation must be 3x3 and translation 3, got {r.shape} and {t.shape}")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(t))):
            raise ParameterError("Transform entries must be finite")
        if np.max(np.abs(r.T @ r - np.eye(3))) > ORTHONORMAL_TOLERANCE:
            raise RotationError("Rotation matrix is not orthonormal")
        if abs(np.linalg.det(r) - 1.0) > ORTHONORMAL_TOLERANCE:
            raise RotationError("Rotation matrix must have determinant +1")
        r.flags.writeable = False
        t.flags.writeable = False
        object.__setattr__(self, "rotation", r)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_translation(cls, x: float, y: float, z: float) -> "RigidTransform":
        return cls(np.eye(3), np.array([x, y, z]))

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "RigidTransform":
        m = np.asarray(matrix, dtype=np.float64)
        if m.shape != (4, 4):
            raise ShapeError(f"Homogeneous matrix must be 4x4, got {m.shape}")
        if not np.allclose(m[3], [0, 0, 0, 1], atol=ORTHONORMAL_TOLERANCE):
            raise ParameterError("Last row of a rigid homogeneous matrix must be [0, 0, 0, 1]")
        return cls(m[:3, :3], m[:3, 3])

    def as_matrix(self) -> np.ndarray:
        m = np.eye(4)
        m[:3, :3] = self.rotation
        m[:3, 3] = self.translation
        return m

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """``self after other``: (R_a R_b, R_a t_b + t_a)."""
        return RigidTransform(self.rotation @ other.rotation, self.rotation @ other.translation + self.translation)

    def inverse(self) -> "RigidTransform":
        rt = self.rotation.T
        return RigidTransform(rt, -rt @ self.translation)

    def apply(self, p: Point3, frame: Optional[Frame] = None) -> Point3:
        """Map ``p``; the result is tagged ``frame`` (default: the input frame)."""
        return Point3.from_array(self.rotation @ p.as_array() + self.translation, frame or p.frame)

    def apply_array(self, points: np.ndarray) -> np.ndarray:
        """Map an N x 3 array of points."""
        return np.asarray(points, dtype=np.float64) @ self.rotation.T + self.translation

    def __repr__(self) -> str:
        return f"RigidTransform(t={self.translation.tolist()})"


def compose(a: RigidTransform, b: RigidTransform) -> RigidTransform:
    return a.compose(b)


def apply(t: RigidTransform, p: Point3, frame: Optional[Frame] = None) -> Point3:
    return t.apply(p, frame)


def to_base(p_cam: Point3, hand_eye: RigidTransform, ee_to_base: RigidTransform) -> Point3:
    """Camera-frame point expressed in the robot base frame (the chain is composed first)."""
    return ee_to_base.compose(hand_eye).apply(p_cam, "base")


def euler_to_rotation(roll: float, pitch: float, yaw: float) -> RigidTransform:
    """
    Rotation for extrinsic X-Y-Z angles: ``Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
    """
    if not all(math.isfinite(a) for a in (roll, pitch, yaw)):
        raise ParameterError(f"Euler angles must be finite: ({roll}, {pitch}, {yaw})")
    cr, sr = math.cos(roll), math.sin(roll)
    cp, sp = math.cos(pitch), math.sin(pitch)
    cy, sy = math.cos(yaw), math.sin(yaw)
    rx = np.array([[1, 0, 0], [0, cr, -sr], [0, sr, cr]])
    ry = np.array([[cp, 0, sp], [0, 1, 0], [-sp, 0, cp]])
    rz = np.array([[cy, -sy, 0], [sy, cy, 0], [0, 0, 1]])
    return RigidTransform(rz @ ry @ rx, np.zeros(3))
