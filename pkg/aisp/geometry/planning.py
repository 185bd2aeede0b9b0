"""
Grasp waypoints and quintic time scaling.

The gripper approaches along its tool +z axis. The pre-grasp waypoint sits
``safety_margin`` before the target on that axis; the grasp point sits
``enclose_offset`` past it so the fingers close around the fruit.
"""

from dataclasses import dataclass
from typing import List, Tuple

import numpy as np

from ..errors import ConsistencyError, ParameterError, RangeError
from ..utils.validation import validate_positive_number
from .camera import Point3
from .transforms import euler_to_rotation

Orientation = Tuple[float, float, float]
PLAN_TOLERANCE = 1e-9


@dataclass(frozen=True)
class Pose:
    position: Point3
    orientation: Orientation

    def as_dict(self) -> dict:
        return {"position": self.position.as_dict(), "orientation": list(self.orientation)}


@dataclass(frozen=True)
class GraspPlan:
    target: Point3
    pre_grasp: Pose
    grasp: Pose
    approach_axis: Tuple[float, float, float]
    safety_margin: float
    enclose_offset: float

    def verify(self) -> None:
        """Re-check the waypoint placement; raises ConsistencyError on violation."""
        a = np.array(self.approach_axis)
        t = self.target.as_array()
        if abs(np.linalg.norm(a) - 1.0) > PLAN_TOLERANCE:
            raise ConsistencyError("Approach axis is not unit length")
        checks = (
            (self.grasp.position.as_array() - t, self.enclose_offset, "grasp"),
            (self.pre_grasp.position.as_array() - t, -self.safety_margin, "pre-grasp"),
        )
        for delta, signed, name in checks:
            if np.max(np.abs(delta - signed * a)) > PLAN_TOLERANCE:
                raise ConsistencyError(f"{name} waypoint is off the approach axis")

    def as_dict(self) -> dict:
        return {
            "target": self.target.as_dict(),
            "pre_grasp": self.pre_grasp.as_dict(),
            "grasp": self.grasp.as_dict(),
            "approach_axis": list(self.approach_axis),
            "safety_margin": self.safety_margin,
            "enclose_offset": self.enclose_offset,
        }


def grasp_plan(
    target_base: Point3,
    orientation: Orientation,
    safety_margin: float,
    enclose_offset: float = 0.02,
) -> GraspPlan:
    """
    Pre-grasp and grasp poses for a base-frame target.

    Raises:
        ParameterError: If ``safety_margin <= 0`` or ``enclose_offset < 0``
    """
    validate_positive_number(safety_margin, "safety_margin", allow_zero=False)
    validate_positive_number(enclose_offset, "enclose_offset", allow_zero=True)

    orientation = tuple(float(a) for a in orientation)
    axis = euler_to_rotation(*orientation).rotation[:, 2]
    t = target_base.as_array()
    plan = GraspPlan(
        target=target_base,
        pre_grasp=Pose(Point3.from_array(t - safety_margin * axis, "base"), orientation),
        grasp=Pose(Point3.from_array(t + enclose_offset * axis, "base"), orientation),
        approach_axis=tuple(float(c) for c in axis),
        safety_margin=float(safety_margin),
        enclose_offset=float(enclose_offset),
    )
    plan.verify()
    return plan


def quintic_profile(t: float, duration: float) -> Tuple[float, float, float]:
    """
    Position, velocity and acceleration of the quintic time scaling at ``t``.

        s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5,  tau = t / T

    Raises:
        ParameterError: If T <= 0
        RangeError: If t is outside [0, T]
    """
    validate_positive_number(duration, "duration", allow_zero=False)
    if not (0.0 <= t <= duration):
        raise RangeError(f"t = {t} outside [0, {duration}]")
    tau = t / duration
    s = tau**3 * (10 - 15 * tau + 6 * tau**2)
    s_dot = 30 * tau**2 * (1 - tau) ** 2 / duration
    s_ddot = 60 * tau * (1 - tau) * (1 - 2 * tau) / duration**2
    return s, s_dot, s_ddot


@dataclass(frozen=True)
class QuinticProfile:
    duration: float

    def __post_init__(self):
        validate_positive_number(self.duration, "duration", allow_zero=False)

    def __call__(self, t: float) -> Tuple[float, float, float]:
        return quintic_profile(t, self.duration)

    @property
    def peak_velocity(self) -> float:
        return 1.875 / self.duration


@dataclass(frozen=True)
class Waypoint:
    t: float
    position: Point3
    speed: float

    def as_dict(self) -> dict:
        return {"t": self.t, "position": self.position.as_dict(), "speed": self.speed}


def cartesian_schedule(start: Point3, goal: Point3, duration: float, samples: int) -> List[Waypoint]:
    """Straight-line motion from ``start`` to ``goal`` timed by the quintic profile."""
    if samples < 2:
        raise ParameterError(f"samples must be >= 2, got {samples}")
    profile = QuinticProfile(duration)
    a, b = start.as_array(), goal.as_array()
    length = float(np.linalg.norm(b - a))
    waypoints = []
    for t in np.linspace(0.0, duration, samples):
        t = min(float(t), duration)
        s, s_dot, _ = profile(t)
        waypoints.append(Waypoint(t, Point3.from_array(a + s * (b - a), goal.frame), length * s_dot))
    return waypoints
