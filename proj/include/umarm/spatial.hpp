#pragma once

// Screw-theory primitives: rotations, rigid transforms, twists, exponentials
// and adjoints. Everything here is a value type or a pure function.

#include <Eigen/Dense>

namespace umarm {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

/// Orthonormal 3x3 matrix with determinant +1.
///
/// The invariant is checked when a Rotation is built from an arbitrary matrix
/// (`Rotation::from_matrix`); products of valid rotations are trusted.
class Rotation {
 public:
  Rotation() : m_(Mat3::Identity()) {}

  /// Throws InputError unless `m` is orthonormal with det +1 within `tol`.
  static Rotation from_matrix(const Mat3& m, double tol = 1e-9);
  /// Rodrigues rotation about a unit `axis` by `angle` radians.
  static Rotation axis_angle(const Vec3& axis, double angle);

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return Rotation(m_.transpose(), Trusted{}); }

  Rotation operator*(const Rotation& o) const { return Rotation(m_ * o.m_, Trusted{}); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

 private:
  struct Trusted {};
  Rotation(const Mat3& m, Trusted) : m_(m) {}
  friend class Pose;
  friend Rotation rotation_unchecked(const Mat3& m);

  Mat3 m_;
};

/// Element of SE(3): x -> R x + t.
class Pose {
 public:
  Pose() : t_(Vec3::Zero()) {}
  Pose(const Rotation& r, const Vec3& t) : r_(r), t_(t) {}

  static Pose identity() { return {}; }
  static Pose translation(const Vec3& t) { return {Rotation(), t}; }
  /// Throws InputError if the rotation block of `h` is not a proper rotation.
  static Pose from_matrix(const Mat4& h, double tol = 1e-9);

  const Rotation& rotation() const { return r_; }
  const Vec3& translation() const { return t_; }
  Mat4 matrix() const;

  Vec3 apply(const Vec3& p) const { return r_.matrix() * p + t_; }
  Pose operator*(const Pose& o) const { return {r_ * o.r_, r_.matrix() * o.t_ + t_}; }
  Pose inverse() const;

 private:
  Rotation r_;
  Vec3 t_;
};

/// Twist (v; w): linear part first, angular part second.
struct Twist {
  Vec3 v = Vec3::Zero();
  Vec3 w = Vec3::Zero();

  /// Twist of a revolute joint with unit axis `axis` through `point`.
  static Twist revolute(const Vec3& axis, const Vec3& point) {
    return {-axis.cross(point), axis};
  }

  Vec6 vector() const {
    Vec6 out;
    out << v, w;
    return out;
  }
  static Twist from_vector(const Vec6& x) { return {x.head<3>(), x.tail<3>()}; }
};

Mat3 hat(const Vec3& w);

/// Matrix exponential exp(hat(xi) * theta) for a revolute (|w| = 1) or
/// prismatic (w = 0) twist. Throws InvalidTwistError otherwise.
Pose exp_twist(const Twist& xi, double theta);

inline Pose compose(const Pose& a, const Pose& b) { return a * b; }
inline Pose inverse(const Pose& a) { return a.inverse(); }

/// 6x6 adjoint acting on (v; w) twists.
Mat6 adjoint(const Pose& g);

/// Twist with hat(xi) = log of a pose close to identity. Only valid for
/// rotation angles below pi; used by tests and the finite-difference checks.
Twist log_pose(const Pose& g);

/// Builds a Rotation without checking. For internal products of valid rotations.
inline Rotation rotation_unchecked(const Mat3& m) { return Rotation(m, Rotation::Trusted{}); }

/// Frobenius distance between two rotation matrices.
double rotation_distance(const Rotation& a, const Rotation& b);

}  // namespace umarm
