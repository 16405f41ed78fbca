#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <cmath>
#include <cstring>

#include "oracles.hpp"
#include "umarm/arm_model.hpp"
#include "umarm/errors.hpp"

using namespace umarm;

namespace {

const ArmGeometry kArm = ArmGeometry::standard();

double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

Vec6 vee(const Mat4& m) { return (Vec6() << m(0, 3), m(1, 3), m(2, 3), m(2, 1), m(0, 2), m(1, 0)).finished(); }

}  // namespace

TEST(Geometry, DefaultArmIsValid) {
  EXPECT_NO_THROW(kArm.validate());
  EXPECT_NEAR(kArm.total_mass(), 1.15, 1e-12);
  for (const auto& lump : kArm.masses) EXPECT_GT(lump.mass, 0.0);
}

TEST(Geometry, UJointAxesArePerpendicularAndIntersect) {
  for (const auto& seg : kArm.segments) {
    for (int k = 0; k < 2; ++k) {
      const UJoint u = seg.ujoint(k);
      EXPECT_LE(std::abs(u.axis_a.dot(u.axis_b)), 1e-9);
      EXPECT_EQ(seg.joint_centers[2 * k], seg.joint_centers[2 * k + 1]);
    }
  }
}

TEST(Geometry, SecondUJointIsRotated45DegreesAboutZ) {
  const Mat3 rz = Eigen::AngleAxisd(M_PI / 4, Vec3::UnitZ()).toRotationMatrix();
  for (const auto& seg : kArm.segments) {
    EXPECT_LE((rz * seg.joint_axes[0] - seg.joint_axes[2]).norm(), 1e-12);
    EXPECT_LE((rz * seg.joint_axes[1] - seg.joint_axes[3]).norm(), 1e-12);
  }
}

TEST(Geometry, ValidateRejectsBrokenAxes) {
  ArmGeometry arm = kArm;
  arm.segments[1].joint_axes[1] = Vec3(0.1, 1.0, 0.0).normalized();
  EXPECT_THROW(arm.validate(), InputError);
  arm = kArm;
  arm.segments[0].joint_axes[0] = Vec3(2.0, 0.0, 0.0);
  EXPECT_THROW(arm.validate(), InputError);
  arm = kArm;
  arm.masses[0].mass = -0.1;
  EXPECT_THROW(arm.validate(), InputError);
  arm = kArm;
  arm.limits.lower[3] = arm.limits.upper[3];
  EXPECT_THROW(arm.validate(), InputError);
}

TEST(JointLimits, ClampAndContains) {
  const JointLimits lim = JointLimits::symmetric(0.2);
  JointVector t = JointVector::Constant(0.3);
  t[1] = -0.5;
  EXPECT_FALSE(lim.contains(t));
  const JointVector c = lim.clamp(t);
  EXPECT_TRUE(lim.contains(c));
  EXPECT_EQ(c[0], 0.2);
  EXPECT_EQ(c[1], -0.2);
}

TEST(SegmentFk, RestPostureIsRestToolPose) {
  const auto& seg = kArm.segments[0];
  const Pose g = segment_fk(seg, Eigen::Vector4d::Zero());
  EXPECT_EQ(g.matrix(), seg.rest_tool_pose.matrix());
}

TEST(SegmentFk, SingleJointReducesToOneExponential) {
  const auto& seg = kArm.segments[1];
  const Pose g = segment_fk(seg, Eigen::Vector4d(0.1, 0, 0, 0));
  const Pose expected = exp_twist(seg.joint_twist(0), 0.1) * seg.rest_tool_pose;
  EXPECT_LE(max_abs(g.matrix() - expected.matrix()), 1e-15);
}

TEST(SegmentFk, MatchesChainedFrames) {
  oracle::Rng rng(21);
  for (int k = 0; k < 500; ++k) {
    const Eigen::Vector4d theta(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5),
                                rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5));
    const Mat4 a = segment_fk(kArm.segments[2], theta).matrix();
    const Mat4 b = oracle::chained_segment_fk(kArm.segments[2], theta);
    EXPECT_LE(max_abs(a - b), 1e-12);
  }
}

TEST(RobotFk, RestPostureHangsOnTheZAxis) {
  const Pose g = robot_fk(kArm, JointVector::Zero());
  EXPECT_EQ(g.translation().x(), 0.0);
  EXPECT_EQ(g.translation().y(), 0.0);
  EXPECT_LT(g.translation().z(), 0.0);
  const Pose expected = kArm.segments[0].rest_tool_pose * kArm.offsets[0] *
                        kArm.segments[1].rest_tool_pose * kArm.offsets[1] *
                        kArm.segments[2].rest_tool_pose;
  EXPECT_LE(max_abs(g.matrix() - expected.matrix()), 1e-15);
}

TEST(RobotFk, BaseSegmentCarriesTheRestRigidly) {
  oracle::Rng rng(22);
  const Pose rest = robot_fk(kArm, JointVector::Zero());
  for (int k = 0; k < 100; ++k) {
    JointVector theta = JointVector::Zero();
    theta.head<4>() = rng.joints(kDefaultJointLimit).head<4>();
    const Pose g1 = segment_fk(kArm.segments[0], theta.head<4>());
    const Pose expected = g1 * kArm.segments[0].rest_tool_pose.inverse() * rest;
    EXPECT_LE(max_abs(robot_fk(kArm, theta).matrix() - expected.matrix()), 1e-14);
  }
}

TEST(RobotFk, MatchesChainedFramesOnRandomPostures) {
  oracle::Rng rng(23);
  for (int k = 0; k < 1000; ++k) {
    const JointVector theta = rng.joints(kDefaultJointLimit);
    const Mat4 a = robot_fk(kArm, theta).matrix();
    const Mat4 b = oracle::chained_fk(kArm, theta);
    EXPECT_LE((a.block<3, 1>(0, 3) - b.block<3, 1>(0, 3)).norm(), 1e-10);
    EXPECT_LE(max_abs(a.block<3, 3>(0, 0) - b.block<3, 3>(0, 0)), 1e-10);
  }
}

TEST(RobotFk, IsBitwiseDeterministic) {
  oracle::Rng rng(24);
  const JointVector theta = rng.joints(kDefaultJointLimit);
  const Mat4 a = robot_fk(kArm, theta).matrix(), b = robot_fk(kArm, theta).matrix();
  EXPECT_EQ(std::memcmp(a.data(), b.data(), sizeof(double) * 16), 0);
}

TEST(RobotFk, StaysWithinKinematicLength) {
  oracle::Rng rng(25);
  const double reach = kArm.kinematic_length();
  for (int k = 0; k < 10000; ++k) {
    EXPECT_LE(robot_fk(kArm, rng.joints(kDefaultJointLimit)).translation().norm(), reach + 1e-12);
  }
}

TEST(SpatialJacobian, RestColumnZeroIsFirstTwist) {
  const Jacobian6 j = spatial_jacobian(kArm, JointVector::Zero());
  EXPECT_LE((j.col(0) - kArm.segments[0].joint_twist(0).vector()).norm(), 1e-15);
}

TEST(SpatialJacobian, ColumnsMatchFiniteDifferencesOfPose) {
  oracle::Rng rng(26);
  const double h = 1e-6;
  for (int k = 0; k < 50; ++k) {
    const JointVector theta = rng.joints(kDefaultJointLimit);
    const Jacobian6 j = spatial_jacobian(kArm, theta);
    const Mat4 ginv = robot_fk(kArm, theta).inverse().matrix();
    for (int i = 0; i < kJointCount; ++i) {
      JointVector p = theta, m = theta;
      p[i] += h;
      m[i] -= h;
      const Mat4 d = (robot_fk(kArm, p).matrix() - robot_fk(kArm, m).matrix()) / (2 * h);
      const Vec6 fd = vee(d * ginv);
      EXPECT_LE((j.col(i) - fd).norm(), 1e-5 * std::max(1.0, fd.norm())) << "joint " << i;
    }
  }
}

TEST(SpatialJacobian, ColumnOrderDoesNotMatter) {
  oracle::Rng rng(27);
  const JointVector theta = rng.joints(kDefaultJointLimit);
  const Jacobian6 a = spatial_jacobian(kArm, theta);
  const KinematicState st = evaluate(kArm, theta);
  EXPECT_EQ(a, st.spatial_jacobian);
}

TEST(PositionJacobian, MatchesFiniteDifferences) {
  oracle::Rng rng(28);
  auto pos = [](const JointVector& t) { return robot_fk(kArm, t).translation(); };
  for (int k = 0; k < 200; ++k) {
    const JointVector theta = rng.joints(kDefaultJointLimit);
    const Jacobian3 j = position_jacobian(kArm, theta);
    const Jacobian3 fd = oracle::fd_position_jacobian(pos, theta, 1e-6);
    for (int i = 0; i < kJointCount; ++i) {
      EXPECT_LE((j.col(i) - fd.col(i)).norm() / fd.col(i).norm(), 1e-5);
    }
  }
}

TEST(PositionJacobian, FirstOrderPrediction) {
  oracle::Rng rng(29);
  for (int k = 0; k < 200; ++k) {
    const JointVector theta = rng.joints(kDefaultJointLimit);
    JointVector d = rng.joints(1.0);
    d *= 1e-5 / d.norm();
    const Vec3 actual = robot_fk(kArm, theta + d).translation() - robot_fk(kArm, theta).translation();
    EXPECT_LE((actual - position_jacobian(kArm, theta) * d).norm(), 1e-8);
  }
}

TEST(PointJacobian, MatchesFiniteDifferencesForEveryBody) {
  oracle::Rng rng(30);
  const JointVector theta = rng.joints(kDefaultJointLimit);
  const KinematicState st = evaluate(kArm, theta);
  for (int body = 0; body < kBodyCount; ++body) {
    const Vec3 local(0.01, -0.02, -0.03);
    const Vec3 world = st.bodies[body].apply(local);
    auto pos = [&](const JointVector& t) { return evaluate(kArm, t).bodies[body].apply(local); };
    const Jacobian3 fd = oracle::fd_position_jacobian(pos, theta, 1e-6);
    EXPECT_LE(max_abs(point_jacobian(st, body, world) - fd), 1e-8) << "body " << body;
  }
}

TEST(Extraction, IdentityGivesZeroAngles) {
  const auto [a, b] = joint_angles_from_frames(Pose::identity(), Pose::identity(),
                                               kArm.segments[0].ujoint(0));
  EXPECT_EQ(a, 0.0);
  EXPECT_EQ(b, 0.0);
}

TEST(Extraction, RoundTripsThroughExponentials) {
  oracle::Rng rng(31);
  for (const auto& seg : kArm.segments) {
    for (int k = 0; k < 2; ++k) {
      const UJoint u = seg.ujoint(k);
      for (int n = 0; n < 100; ++n) {
        const double ta = n == 0 ? 0.1 : rng.uniform(-1.2, 1.2);
        const double tb = n == 0 ? -0.05 : rng.uniform(-1.2, 1.2);
        const Pose parent(Rotation::axis_angle(rng.unit(), rng.uniform(-1, 1)), rng.vec3(0.3));
        const Pose child = parent * exp_twist(Twist::revolute(u.axis_a, u.center), ta) *
                           exp_twist(Twist::revolute(u.axis_b, u.center), tb);
        const auto [a, b] = joint_angles_from_frames(parent, child, u);
        EXPECT_NEAR(a, ta, 1e-9);
        EXPECT_NEAR(b, tb, 1e-9);
      }
    }
  }
}

TEST(Extraction, RejectsTwistAboutZ) {
  const UJoint u = kArm.segments[0].ujoint(0);
  const Pose child = exp_twist(Twist::revolute(u.axis_a, u.center), 0.1) *
                     exp_twist(Twist::revolute(u.axis_b, u.center), -0.05) *
                     exp_twist(Twist::revolute(Vec3::UnitZ(), u.center), 0.2);
  try {
    joint_angles_from_frames(Pose::identity(), child, u);
    FAIL() << "expected ExtractionError";
  } catch (const ExtractionError& e) {
    EXPECT_GT(e.residual(), 1e-6);
  }
}

TEST(Extraction, RejectsGimbalAngles) {
  const UJoint u = kArm.segments[0].ujoint(0);
  const Pose child = exp_twist(Twist::revolute(u.axis_a, u.center), 1.8);
  EXPECT_THROW(joint_angles_from_frames(Pose::identity(), child, u), ExtractionError);
}

TEST(Extraction, MeasuredAnglesMatchFkFrames) {
  oracle::Rng rng(32);
  for (int k = 0; k < 500; ++k) {
    const JointVector theta = rng.joints(kDefaultJointLimit);
    const JointVector measured = measure_joint_angles(kArm, evaluate(kArm, theta).bodies);
    EXPECT_LE((measured - theta).cwiseAbs().maxCoeff(), 1e-9);
  }
}
