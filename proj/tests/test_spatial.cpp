#include <gtest/gtest.h>

#include <Eigen/Geometry>
#include <numbers>

#include "oracles.hpp"
#include "umarm/errors.hpp"
#include "umarm/spatial.hpp"

using namespace umarm;

namespace {

Pose random_pose(oracle::Rng& rng) {
  return Pose(Rotation::axis_angle(rng.unit(), rng.uniform(-3.0, 3.0)), rng.vec3(1.0));
}

double pose_error(const Pose& a, const Pose& b) { return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff(); }

}  // namespace

TEST(Hat, ZeroVectorGivesZeroMatrix) { EXPECT_TRUE(hat(Vec3::Zero()).isZero(0.0)); }

TEST(Hat, UnitZCrossesX) {
  EXPECT_TRUE((hat(Vec3::UnitZ()) * Vec3::UnitX()).isApprox(Vec3::UnitY()));
}

TEST(Hat, MatchesCrossProductAndIsAntisymmetric) {
  oracle::Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    const Vec3 w = rng.vec3(2.0), u = rng.vec3(2.0);
    const Vec3 cross(w.y() * u.z() - w.z() * u.y(), w.z() * u.x() - w.x() * u.z(),
                     w.x() * u.y() - w.y() * u.x());
    EXPECT_LE((hat(w) * u - cross).norm(), 1e-12);
    EXPECT_TRUE((hat(w) + hat(w).transpose()).isZero(0.0));
  }
}

TEST(Rotation, FromMatrixRejectsNonOrthonormal) {
  Mat3 m = Mat3::Identity();
  m(0, 0) = 1.01;
  EXPECT_THROW(Rotation::from_matrix(m), InputError);
  EXPECT_THROW(Rotation::from_matrix(-Mat3::Identity()), InputError);
  EXPECT_NO_THROW(Rotation::from_matrix(Eigen::AngleAxisd(0.3, Vec3::UnitY()).toRotationMatrix()));
}

TEST(ExpTwist, ZeroAngleIsIdentity) {
  oracle::Rng rng(2);
  for (int k = 0; k < 20; ++k) {
    const Twist xi = Twist::revolute(rng.unit(), rng.vec3(1.0));
    EXPECT_EQ(pose_error(exp_twist(xi, 0.0), Pose::identity()), 0.0);
  }
}

TEST(ExpTwist, QuarterTurnAboutZ) {
  const Pose g = exp_twist(Twist::revolute(Vec3::UnitZ(), Vec3::Zero()), std::numbers::pi / 2);
  EXPECT_LE((g.apply(Vec3::UnitX()) - Vec3::UnitY()).norm(), 1e-15);
}

TEST(ExpTwist, PointsOnTheAxisAreFixed) {
  const Vec3 q(0.0, 0.1, 0.2);
  const Twist xi = Twist::revolute(Vec3::UnitX(), q);
  oracle::Rng rng(3);
  for (int k = 0; k < 100; ++k) {
    const double theta = rng.uniform(-4.0, 4.0);
    const Pose g = exp_twist(xi, theta);
    EXPECT_LE((g.apply(q) - q).norm(), 1e-12);
    EXPECT_LE((g.apply(q + 0.7 * Vec3::UnitX()) - (q + 0.7 * Vec3::UnitX())).norm(), 1e-12);
  }
}

TEST(ExpTwist, RotationMatchesAxisAngle) {
  oracle::Rng rng(4);
  for (int k = 0; k < 200; ++k) {
    const Vec3 w = rng.unit();
    const double theta = rng.uniform(-3.0, 3.0);
    const Mat3 expected = Eigen::AngleAxisd(theta, w).toRotationMatrix();
    const Pose g = exp_twist(Twist::revolute(w, rng.vec3(0.5)), theta);
    EXPECT_LE((g.rotation().matrix() - expected).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ExpTwist, SmallAngleBranchIsContinuous) {
  const Twist xi = Twist::revolute(Vec3(1, 2, 2).normalized(), Vec3(0.1, -0.2, 0.3));
  for (double theta : {1e-9, 5e-8, 9.9e-8, 1.01e-7, 2e-7}) {
    const Pose g = exp_twist(xi, theta);
    const Mat3 expected = Eigen::AngleAxisd(theta, xi.w).toRotationMatrix();
    EXPECT_LE((g.rotation().matrix() - expected).cwiseAbs().maxCoeff(), 1e-15);
    const Vec3 q(0.1, -0.2, 0.3);
    EXPECT_LE((g.apply(q) - q).norm(), 1e-15);
  }
}

TEST(ExpTwist, AnglesAdd) {
  oracle::Rng rng(5);
  for (int k = 0; k < 100; ++k) {
    const Twist xi = Twist::revolute(rng.unit(), rng.vec3(1.0));
    const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
    EXPECT_LE(pose_error(exp_twist(xi, a) * exp_twist(xi, b), exp_twist(xi, a + b)), 1e-10);
  }
}

TEST(ExpTwist, PrismaticTranslates) {
  const Twist xi{Vec3(0.0, 0.0, 1.0), Vec3::Zero()};
  const Pose g = exp_twist(xi, 0.25);
  EXPECT_LE((g.translation() - Vec3(0, 0, 0.25)).norm(), 1e-15);
  EXPECT_TRUE(g.rotation().matrix().isIdentity(0.0));
}

TEST(ExpTwist, NonUnitAxisIsRejected) {
  EXPECT_THROW(exp_twist(Twist{Vec3::Zero(), Vec3(0.0, 0.0, 1.1)}, 0.1), InvalidTwistError);
  EXPECT_THROW(exp_twist(Twist{Vec3::Zero(), Vec3(0.0, 0.0, 1.0 + 1e-6)}, 0.1), InvalidTwistError);
}

TEST(Pose, IdentityAndInverse) {
  oracle::Rng rng(6);
  const Pose b = random_pose(rng);
  EXPECT_EQ(pose_error(compose(Pose::identity(), b), b), 0.0);
  EXPECT_EQ(pose_error(inverse(Pose::identity()), Pose::identity()), 0.0);
  for (int k = 0; k < 200; ++k) {
    const Pose a = random_pose(rng);
    EXPECT_LE(pose_error(compose(inverse(a), a), Pose::identity()), 1e-12);
    EXPECT_LE(pose_error(compose(a, inverse(a)), Pose::identity()), 1e-12);
  }
}

TEST(Pose, CompositionIsAssociativeAndClosed) {
  oracle::Rng rng(7);
  for (int k = 0; k < 200; ++k) {
    const Pose a = random_pose(rng), b = random_pose(rng), c = random_pose(rng);
    const Pose left = (a * b) * c, right = a * (b * c);
    EXPECT_LE(pose_error(left, right), 1e-12);
    EXPECT_NO_THROW(Rotation::from_matrix(left.rotation().matrix(), 1e-9));
  }
}

TEST(Pose, MatchesHomogeneousMatrixProduct) {
  oracle::Rng rng(8);
  for (int k = 0; k < 50; ++k) {
    const Pose a = random_pose(rng), b = random_pose(rng);
    EXPECT_LE(((a * b).matrix() - a.matrix() * b.matrix()).cwiseAbs().maxCoeff(), 1e-14);
    const Vec3 p = rng.vec3(1.0);
    EXPECT_LE((a.apply(p) - (a.matrix() * p.homogeneous()).head<3>()).norm(), 1e-14);
  }
}

TEST(Adjoint, IdentityGivesIdentity) { EXPECT_TRUE(adjoint(Pose::identity()).isIdentity(0.0)); }

TEST(Adjoint, PureTranslationCouplingBlockIsHat) {
  const Vec3 t(0.3, -0.1, 0.7);
  const Mat6 ad = adjoint(Pose::translation(t));
  const Mat3 coupling = ad.block<3, 3>(0, 3);
  EXPECT_TRUE(coupling.isApprox(hat(t)));
  EXPECT_EQ(Mat3(ad.block<3, 3>(0, 0)), Mat3::Identity());
  EXPECT_EQ(Mat3(ad.block<3, 3>(3, 3)), Mat3::Identity());
  EXPECT_EQ(Mat3(ad.block<3, 3>(3, 0)), Mat3::Zero());
}

TEST(Adjoint, IsAHomomorphism) {
  oracle::Rng rng(9);
  for (int k = 0; k < 200; ++k) {
    const Pose a = random_pose(rng), b = random_pose(rng);
    EXPECT_LE((adjoint(a * b) - adjoint(a) * adjoint(b)).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Adjoint, MatchesConjugationToFirstOrder) {
  oracle::Rng rng(10);
  const double eps = 1e-6;
  for (int k = 0; k < 50; ++k) {
    const Pose g = random_pose(rng);
    const Twist xi = Twist::revolute(rng.unit(), rng.vec3(0.5));
    // g exp(xi eps) g^-1 = exp((Ad_g xi) eps); compare via matrix differences.
    const Mat4 conj = (g * exp_twist(xi, eps) * g.inverse()).matrix();
    const Mat4 deriv = (conj - Mat4::Identity()) / eps;
    const Vec6 fd(deriv(0, 3), deriv(1, 3), deriv(2, 3), deriv(2, 1), deriv(0, 2), deriv(1, 0));
    EXPECT_LE((adjoint(g) * xi.vector() - fd).norm(), 1e-5);
  }
}

TEST(LogPose, InvertsExp) {
  oracle::Rng rng(11);
  for (int k = 0; k < 100; ++k) {
    const Twist xi = Twist::revolute(rng.unit(), rng.vec3(0.5));
    const double theta = rng.uniform(-2.5, 2.5);
    const Twist back = log_pose(exp_twist(xi, theta));
    EXPECT_LE((back.vector() - theta * xi.vector()).norm(), 1e-9);
  }
}
