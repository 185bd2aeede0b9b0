"""Tests for grasp waypoints and quintic timing."""

import math

import numpy as np
import pytest

from aisp.errors import ConsistencyError, ParameterError, RangeError
from aisp.geometry.camera import Point3
from aisp.geometry.planning import QuinticProfile, cartesian_schedule, grasp_plan, quintic_profile


@pytest.fixture
def target():
    return Point3(0.5, 0.0, 0.3, "base")


class TestGraspPlan:
    """Pre-grasp and grasp on the approach axis."""

    def test_straight_down_the_tool_axis(self, target):
        plan = grasp_plan(target, (0.0, 0.0, 0.0), safety_margin=0.10)
        np.testing.assert_allclose(plan.pre_grasp.position.as_array(), [0.5, 0.0, 0.2], atol=1e-15)
        np.testing.assert_allclose(plan.grasp.position.as_array(), [0.5, 0.0, 0.32], atol=1e-15)
        assert plan.approach_axis == (0.0, 0.0, 1.0)
        assert plan.grasp.position.frame == "base"

    def test_offsets_hold_for_any_orientation(self, target):
        plan = grasp_plan(target, (0.4, -1.2, 2.0), safety_margin=0.15, enclose_offset=0.03)
        t = target.as_array()
        assert np.linalg.norm(plan.pre_grasp.position.as_array() - t) == pytest.approx(0.15, abs=1e-12)
        assert np.linalg.norm(plan.grasp.position.as_array() - t) == pytest.approx(0.03, abs=1e-12)
        # target lies between the two waypoints
        between = plan.pre_grasp.position.distance_to(plan.grasp.position)
        assert between == pytest.approx(0.18, abs=1e-12)

    @pytest.mark.parametrize("margin", [0.0, -0.1, float("nan")])
    def test_margin_must_be_positive(self, target, margin):
        with pytest.raises(ParameterError):
            grasp_plan(target, (0, 0, 0), safety_margin=margin)

    def test_verify_catches_tampering(self, target):
        plan = grasp_plan(target, (0, 0, 0), safety_margin=0.1)
        tampered = type(plan)(**{**plan.__dict__, "safety_margin": 0.2})
        with pytest.raises(ConsistencyError):
            tampered.verify()

    def test_as_dict(self, target):
        d = grasp_plan(target, (0, 0, 0), 0.1).as_dict()
        assert d["pre_grasp"]["orientation"] == [0.0, 0.0, 0.0]
        assert d["enclose_offset"] == 0.02


class TestQuintic:
    """s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5."""

    @pytest.mark.parametrize("duration", [0.5, 2.0, 7.3])
    def test_boundary_and_midpoint(self, duration):
        assert quintic_profile(0.0, duration) == (0.0, 0.0, 0.0)
        s, v, a = quintic_profile(duration, duration)
        assert (s, v, a) == (1.0, 0.0, 0.0)
        s, v, a = quintic_profile(duration / 2, duration)
        assert s == pytest.approx(0.5)
        assert v == pytest.approx(1.875 / duration)
        assert a == pytest.approx(0.0, abs=1e-12)

    def test_peak_velocity(self):
        profile = QuinticProfile(2.0)
        speeds = [profile(t)[1] for t in np.linspace(0, 2.0, 2001)]
        assert max(speeds) == pytest.approx(profile.peak_velocity)

    def test_monotone(self):
        s = [quintic_profile(t, 1.0)[0] for t in np.linspace(0, 1, 101)]
        assert all(b >= a for a, b in zip(s, s[1:]))

    def test_time_outside_interval(self):
        with pytest.raises(RangeError):
            quintic_profile(1.5, 1.0)
        with pytest.raises(RangeError):
            quintic_profile(-0.1, 1.0)

    def test_duration_positive(self):
        with pytest.raises(ParameterError):
            QuinticProfile(0.0)


class TestCartesianSchedule:
    def test_endpoints_and_length(self):
        start, goal = Point3(0, 0, 0, "base"), Point3(0.3, 0.4, 0.0, "base")
        waypoints = cartesian_schedule(start, goal, duration=2.0, samples=5)
        assert len(waypoints) == 5
        assert waypoints[0].position == start
        np.testing.assert_allclose(waypoints[-1].position.as_array(), goal.as_array())
        assert waypoints[2].speed == pytest.approx(0.5 * 1.875 / 2.0)
        assert waypoints[-1].t == 2.0

    def test_needs_two_samples(self):
        with pytest.raises(ParameterError):
            cartesian_schedule(Point3(0, 0, 0), Point3(1, 0, 0), 1.0, 1)

    def test_quintic_constant_is_fifteen_eighths(self):
        assert math.isclose(QuinticProfile(1.0).peak_velocity, 1.875)
