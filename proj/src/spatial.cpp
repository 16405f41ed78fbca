#include "umarm/spatial.hpp"

#include <algorithm>
#include <cmath>

#include "umarm/errors.hpp"

namespace umarm {

namespace {

// Below this |theta| * |w| the trigonometric coefficients use their series.
constexpr double kSmallAngle = 1e-7;

}  // namespace

Rotation Rotation::from_matrix(const Mat3& m, double tol) {
  const double ortho = (m.transpose() * m - Mat3::Identity()).cwiseAbs().maxCoeff();
  const double det = m.determinant();
  if (!(ortho <= tol) || !(std::abs(det - 1.0) <= tol)) {
    throw InputError("matrix is not a proper rotation (orthonormality error " +
                     std::to_string(ortho) + ", det " + std::to_string(det) + ")");
  }
  return Rotation(m, Trusted{});
}

Rotation Rotation::axis_angle(const Vec3& axis, double angle) {
  return exp_twist(Twist{Vec3::Zero(), axis}, angle).rotation();
}

Pose Pose::from_matrix(const Mat4& h, double tol) {
  return {Rotation::from_matrix(h.topLeftCorner<3, 3>(), tol), h.topRightCorner<3, 1>()};
}

Mat4 Pose::matrix() const {
  Mat4 h = Mat4::Identity();
  h.topLeftCorner<3, 3>() = r_.matrix();
  h.topRightCorner<3, 1>() = t_;
  return h;
}

Pose Pose::inverse() const {
  const Rotation rt = r_.transpose();
  return {rt, -(rt.matrix() * t_)};
}

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

Pose exp_twist(const Twist& xi, double theta) {
  const double wn = xi.w.norm();
  if (wn == 0.0) {
    return Pose::translation(xi.v * theta);
  }
  if (std::abs(wn - 1.0) > 1e-9) {
    throw InvalidTwistError("revolute twist needs a unit angular part, got |w| = " +
                            std::to_string(wn));
  }

  double s;
  double c1;  // 1 - cos(theta)
  if (std::abs(theta) < kSmallAngle) {
    const double t2 = theta * theta;
    s = theta * (1.0 - t2 / 6.0);
    c1 = t2 * (0.5 - t2 / 24.0);
  } else {
    s = std::sin(theta);
    c1 = 1.0 - std::cos(theta);
  }

  const Mat3 w = hat(xi.w);
  const Mat3 w2 = w * w;
  const Mat3 r = Mat3::Identity() + s * w + c1 * w2;
  const Vec3 t = (Mat3::Identity() - r) * xi.w.cross(xi.v) + xi.w * xi.w.dot(xi.v) * theta;
  return {rotation_unchecked(r), t};
}

Mat6 adjoint(const Pose& g) {
  const Mat3& r = g.rotation().matrix();
  Mat6 ad = Mat6::Zero();
  ad.topLeftCorner<3, 3>() = r;
  ad.topRightCorner<3, 3>() = hat(g.translation()) * r;
  ad.bottomRightCorner<3, 3>() = r;
  return ad;
}

Twist log_pose(const Pose& g) {
  const Mat3& r = g.rotation().matrix();
  const double cos_angle = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  const double angle = std::acos(cos_angle);

  Vec3 w;
  if (angle < 1e-9) {
    w = Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)) / 2.0;
  } else {
    w = Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1)) *
        (angle / (2.0 * std::sin(angle)));
  }

  // t = V * v with V = I + (1 - cos)/a^2 W + (a - sin)/a^3 W^2, W = hat(w).
  const Mat3 wh = hat(w);
  Mat3 v_mat = Mat3::Identity();
  if (angle > 1e-9) {
    const double a2 = angle * angle;
    v_mat += (1.0 - std::cos(angle)) / a2 * wh + (angle - std::sin(angle)) / (a2 * angle) * wh * wh;
  } else {
    v_mat += 0.5 * wh + wh * wh / 6.0;
  }
  const Vec3 v = v_mat.partialPivLu().solve(g.translation());
  return {v, w};
}

double rotation_distance(const Rotation& a, const Rotation& b) {
  return (a.matrix() - b.matrix()).norm();
}

}  // namespace umarm
