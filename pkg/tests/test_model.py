import math

import pytest
from hypothesis import given, strategies as st

from linguomotor.errors import InvalidCommand, NotNormalizable
from linguomotor.model import (
    JOINT_NAMES,
    ArmPose,
    BasePose2D,
    JointLimits,
    JointVector,
    VelocityCommand,
    deg_to_rad,
    normalize_quaternion,
    rad_to_deg,
    wrap_angle,
)


class TestNormalizeQuaternion:
    def test_identity_passthrough(self):
        assert normalize_quaternion((0, 0, 0, 1)) == (0, 0, 0, 1)

    def test_near_unit_rescaled(self):
        q = normalize_quaternion((0, 0, 0, 1.005))
        assert q == pytest.approx((0, 0, 0, 1))
        assert abs(math.sqrt(sum(c * c for c in q)) - 1) <= 1e-6

    def test_too_far_from_unit_rejected(self):
        with pytest.raises(NotNormalizable):
            normalize_quaternion((0, 0, 0, 1.2))

    def test_zero_rejected(self):
        with pytest.raises(NotNormalizable):
            normalize_quaternion((0, 0, 0, 0))

    @given(
        st.tuples(*[st.floats(-1, 1) for _ in range(4)]).filter(
            lambda q: sum(c * c for c in q) > 1e-6
        ),
        st.floats(0.9951, 1.0049),
    )
    def test_accepted_inputs_end_within_tolerance(self, q, scale):
        norm = math.sqrt(sum(c * c for c in q))
        q = tuple(scale * c / norm for c in q)
        out = normalize_quaternion(q)
        assert abs(math.sqrt(sum(c * c for c in out)) - 1) <= 1e-6


class TestWrapAngle:
    def test_zero(self):
        assert wrap_angle(0.0) == 0.0

    def test_three_pi(self):
        assert wrap_angle(3 * math.pi) == pytest.approx(math.pi)

    def test_negative_pi_maps_to_positive(self):
        assert wrap_angle(-math.pi) == pytest.approx(math.pi)

    @given(st.floats(-100, 100))
    def test_idempotent_and_in_range(self, x):
        once = wrap_angle(x)
        assert -math.pi < once <= math.pi
        assert wrap_angle(once) == pytest.approx(once, abs=1e-12)

    @given(st.floats(-100, 100))
    def test_congruent_mod_two_pi(self, x):
        k = (x - wrap_angle(x)) / (2 * math.pi)
        assert abs(k - round(k)) < 1e-9


class TestDegreesRadians:
    def test_ninety(self):
        assert deg_to_rad(90) == pytest.approx(1.5708, abs=5e-5)

    def test_zero(self):
        assert deg_to_rad(0) == 0

    def test_one_eighty(self):
        assert deg_to_rad(180) == math.pi

    @given(st.floats(-1e6, 1e6))
    def test_round_trip(self, d):
        assert rad_to_deg(deg_to_rad(d)) == pytest.approx(d, abs=1e-12, rel=1e-12)


class TestJointVector:
    def test_rejects_missing_joint(self):
        partial = {name: 0.0 for name in JOINT_NAMES[:-1]}
        with pytest.raises(InvalidCommand):
            JointVector(partial)

    def test_rejects_extra_joint(self):
        extra = {name: 0.0 for name in JOINT_NAMES}
        extra["right_j7"] = 0.0
        with pytest.raises(InvalidCommand):
            JointVector(extra)

    def test_rejects_non_finite(self):
        bad = {name: 0.0 for name in JOINT_NAMES}
        bad["right_j2"] = float("nan")
        with pytest.raises(InvalidCommand):
            JointVector(bad)

    def test_json_round_trip(self):
        jv = JointVector.zeros().with_joint("right_j0", 1.25)
        assert JointVector.from_json(jv.to_json()) == jv


class TestJointLimits:
    def test_symmetric_default(self):
        limits = JointLimits.symmetric()
        assert limits["right_j0"] == (-3.0503, 3.0503)

    def test_rejects_inverted_bounds(self):
        bad = {name: (-1.0, 1.0) for name in JOINT_NAMES}
        bad["right_j4"] = (1.0, -1.0)
        with pytest.raises(InvalidCommand):
            JointLimits(bad)


class TestPoses:
    def test_base_pose_wraps_theta(self):
        pose = BasePose2D(0, 0, 3 * math.pi)
        assert pose.theta == pytest.approx(math.pi)

    def test_base_pose_rejects_nan(self):
        with pytest.raises(InvalidCommand):
            BasePose2D(float("nan"), 0, 0)

    def test_arm_pose_normalizes_orientation(self):
        pose = ArmPose(0.46, 0.15, 0.5, orientation=(0, 0, 0, 1.001))
        norm = math.sqrt(sum(c * c for c in pose.orientation))
        assert abs(norm - 1) <= 1e-6

    def test_arm_pose_json_round_trip(self):
        pose = ArmPose(0.46, 0.15, 0.5)
        assert ArmPose.from_json(pose.to_json()) == pose


class TestVelocityCommand:
    def test_negative_duration_rejected(self):
        with pytest.raises(InvalidCommand):
            VelocityCommand(0.1, 0.0, -1.0)

    def test_json_round_trip(self):
        cmd = VelocityCommand(0.05, 0.0, 5.0)
        assert VelocityCommand.from_json(cmd.to_json()) == cmd
