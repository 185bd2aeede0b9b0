"""Tests for rigid transforms and the camera-to-base chain."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from aisp.errors import ParameterError, RotationError, ShapeError
from aisp.geometry.camera import Point3
from aisp.geometry.transforms import RigidTransform, apply, compose, euler_to_rotation, to_base

angles = st.floats(-math.pi, math.pi)


class TestEuler:
    """Extrinsic X-Y-Z angles."""

    @settings(max_examples=50)
    @given(angles, angles, angles)
    def test_matches_scipy(self, roll, pitch, yaw):
        expected = Rotation.from_euler("xyz", [roll, pitch, yaw]).as_matrix()
        np.testing.assert_allclose(euler_to_rotation(roll, pitch, yaw).rotation, expected, atol=1e-12)

    def test_yaw_quarter_turn(self):
        p = euler_to_rotation(0, 0, math.pi / 2).apply(Point3(1, 0, 0))
        np.testing.assert_allclose(p.as_array(), [0, 1, 0], atol=1e-15)

    def test_non_finite(self):
        with pytest.raises(ParameterError):
            euler_to_rotation(float("nan"), 0, 0)


class TestRigidTransform:
    """Validation, composition and inversion."""

    @pytest.fixture
    def transform(self):
        return euler_to_rotation(0.3, -0.7, 1.1).compose(RigidTransform.from_translation(0.2, -0.1, 0.5))

    def test_non_orthonormal_rejected(self):
        with pytest.raises(RotationError):
            RigidTransform(np.diag([1.0, 1.0, 1.1]), np.zeros(3))

    def test_reflection_rejected(self):
        with pytest.raises(RotationError):
            RigidTransform(np.diag([1.0, 1.0, -1.0]), np.zeros(3))

    def test_shapes(self):
        with pytest.raises(ShapeError):
            RigidTransform(np.eye(2), np.zeros(3))
        with pytest.raises(ShapeError):
            RigidTransform.from_matrix(np.eye(3))
        with pytest.raises(ParameterError):
            RigidTransform.from_matrix(np.ones((4, 4)))

    def test_inverse_composes_to_identity(self, transform):
        ident = transform.compose(transform.inverse())
        np.testing.assert_allclose(ident.as_matrix(), np.eye(4), atol=1e-12)

    def test_matrix_round_trip(self, transform):
        again = RigidTransform.from_matrix(transform.as_matrix())
        np.testing.assert_array_equal(again.rotation, transform.rotation)

    def test_compose_order(self):
        """compose(a, b) applies b first."""
        a = euler_to_rotation(0, 0, math.pi / 2)
        b = RigidTransform.from_translation(1, 0, 0)
        p = apply(compose(a, b), Point3(0, 0, 0))
        np.testing.assert_allclose(p.as_array(), [0, 1, 0], atol=1e-15)

    def test_isometry(self, transform):
        pts = np.random.default_rng(0).normal(size=(20, 3))
        mapped = transform.apply_array(pts)
        for i in range(0, 20, 2):
            before = np.linalg.norm(pts[i] - pts[i + 1])
            after = np.linalg.norm(mapped[i] - mapped[i + 1])
            assert abs(before - after) <= 1e-12

    def test_frame_tag(self, transform):
        assert transform.apply(Point3(1, 2, 3)).frame == "camera"
        assert transform.apply(Point3(1, 2, 3), "end_effector").frame == "end_effector"


class TestToBase:
    def test_matches_step_by_step(self):
        hand_eye = euler_to_rotation(0.0, 0.0, math.pi).compose(RigidTransform.from_translation(0.0, 0.05, 0.1))
        ee_to_base = euler_to_rotation(math.pi, 0.0, 0.0).compose(RigidTransform.from_translation(0.4, 0.0, 0.6))
        p_cam = Point3(0.02, -0.01, 0.45)

        p = to_base(p_cam, hand_eye, ee_to_base)
        step = ee_to_base.apply(hand_eye.apply(p_cam, "end_effector"), "base")
        assert p.frame == "base"
        np.testing.assert_allclose(p.as_array(), step.as_array(), atol=1e-12)

    def test_identity_chain(self):
        p = to_base(Point3(1, 2, 3), RigidTransform.identity(), RigidTransform.identity())
        assert p == Point3(1.0, 2.0, 3.0, "base")
