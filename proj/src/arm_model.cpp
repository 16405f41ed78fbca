#include "umarm/arm_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "umarm/errors.hpp"

namespace umarm {

JointLimits JointLimits::symmetric(double limit) {
  JointLimits l;
  l.lower = JointVector::Constant(-limit);
  l.upper = JointVector::Constant(limit);
  return l;
}

bool JointLimits::contains(const JointVector& theta) const {
  return (theta.array() >= lower.array()).all() && (theta.array() <= upper.array()).all();
}

JointVector JointLimits::clamp(const JointVector& theta) const {
  return theta.cwiseMax(lower).cwiseMin(upper);
}

void JointLimits::validate() const {
  for (int i = 0; i < kJointCount; ++i) {
    if (!(lower[i] < upper[i])) {
      throw InputError("joint " + std::to_string(i) + " has lower limit >= upper limit");
    }
  }
}

SegmentGeometry SegmentGeometry::standard(double upper_plate_half_height, double rod_length,
                                          double lower_plate_half_height,
                                          double lever_arm_radius,
                                          double actuator_rest_length) {
  SegmentGeometry g;
  g.upper_plate_half_height = upper_plate_half_height;
  g.rod_length = rod_length;
  g.lower_plate_half_height = lower_plate_half_height;
  g.lever_arm_radius = lever_arm_radius;
  g.actuator_rest_length = actuator_rest_length;

  const Vec3 upper_center(0.0, 0.0, -upper_plate_half_height);
  const Vec3 lower_center(0.0, 0.0, -(upper_plate_half_height + rod_length));
  const double c = std::numbers::sqrt2 / 2.0;

  g.joint_axes = {Vec3::UnitX(), Vec3::UnitY(), Vec3(c, c, 0.0), Vec3(-c, c, 0.0)};
  g.joint_centers = {upper_center, upper_center, lower_center, lower_center};
  g.rest_tool_pose = Pose::translation(
      Vec3(0.0, 0.0, -(upper_plate_half_height + rod_length + lower_plate_half_height)));
  return g;
}

void SegmentGeometry::validate() const {
  for (int j = 0; j < kJointsPerSegment; ++j) {
    if (std::abs(joint_axes[j].norm() - 1.0) > 1e-9) {
      throw InputError("joint axis " + std::to_string(j) + " is not unit length");
    }
  }
  for (int k = 0; k < 2; ++k) {
    const UJoint u = ujoint(k);
    if (std::abs(u.axis_a.dot(u.axis_b)) > 1e-9) {
      throw InputError("U-joint " + std::to_string(k) + " axes are not perpendicular");
    }
    if ((joint_centers[2 * k] - joint_centers[2 * k + 1]).norm() > 1e-9) {
      throw InputError("U-joint " + std::to_string(k) + " axes do not intersect");
    }
  }
  // The second U-joint pair is the first pair turned 45 degrees about z.
  const Rotation turn = Rotation::axis_angle(Vec3::UnitZ(), std::numbers::pi / 4.0);
  for (int j = 0; j < 2; ++j) {
    if ((turn * joint_axes[j] - joint_axes[j + 2]).norm() > 1e-9) {
      throw InputError("second U-joint axes must be the first pair rotated 45 degrees about z");
    }
  }
  if (!(lever_arm_radius > 0.0) || !(actuator_rest_length > 0.0) || !(rod_length > 0.0)) {
    throw InputError("segment dimensions must be positive");
  }
}

ArmGeometry ArmGeometry::standard() {
  ArmGeometry arm;
  for (auto& s : arm.segments) {
    s = SegmentGeometry::standard(0.0125, 0.060, 0.0125, 0.030, 0.060);
  }
  arm.offsets = {Pose::translation(Vec3(0.0, 0.0, -0.020)),
                 Pose::translation(Vec3(0.0, 0.0, -0.020))};

  // Relative lumps per segment (upper plate, rod, lower plate), scaled to 1.15 kg.
  constexpr double kTotal = 1.15;
  const std::array<double, 3> share = {0.3, 0.4, 0.3};
  for (int s = 0; s < kSegmentCount; ++s) {
    const SegmentGeometry& g = arm.segments[s];
    const std::array<Vec3, 3> where = {
        Vec3::Zero(),
        Vec3(0.0, 0.0, -(g.upper_plate_half_height + 0.5 * g.rod_length)),
        g.rest_tool_pose.translation()};
    for (int k = 0; k < 3; ++k) {
      arm.masses.push_back({3 * s + k, where[k], kTotal * share[k] / kSegmentCount});
    }
  }
  return arm;
}

double ArmGeometry::total_mass() const {
  double m = 0.0;
  for (const auto& lump : masses) m += lump.mass;
  return m;
}

double ArmGeometry::kinematic_length() const {
  // Polyline through frame origins and U-joint centers; each leg lies on one
  // rigid body, so its length is configuration independent.
  double total = 0.0;
  Pose base = Pose::identity();
  for (int s = 0; s < kSegmentCount; ++s) {
    const SegmentGeometry& g = segments[s];
    Vec3 prev = base.translation();
    for (const Vec3& q : {g.joint_centers[0], g.joint_centers[2]}) {
      const Vec3 p = base.apply(q);
      total += (p - prev).norm();
      prev = p;
    }
    Pose tool = base * g.rest_tool_pose;
    total += (tool.translation() - prev).norm();
    if (s + 1 < kSegmentCount) {
      const Pose next = tool * offsets[s];
      total += (next.translation() - tool.translation()).norm();
      base = next;
    }
  }
  return total;
}

void ArmGeometry::validate() const {
  for (const auto& s : segments) s.validate();
  limits.validate();
  if (masses.empty()) throw InputError("arm needs at least one lumped mass");
  for (const auto& lump : masses) {
    if (!(lump.mass > 0.0)) throw InputError("lumped masses must be positive");
    if (lump.body < 0 || lump.body >= kBodyCount) throw InputError("lumped mass body out of range");
  }
  if (!(base_segment_scale > 0.0)) throw InputError("base segment scale must be positive");
}

Pose segment_fk(const SegmentGeometry& geom, const Eigen::Vector4d& theta) {
  Pose g = Pose::identity();
  for (int j = 0; j < kJointsPerSegment; ++j) {
    g = g * exp_twist(geom.joint_twist(j), theta[j]);
  }
  return g * geom.rest_tool_pose;
}

KinematicState evaluate(const ArmGeometry& arm, const JointVector& theta) {
  KinematicState st;
  Pose prefix = Pose::identity();
  for (int s = 0; s < kSegmentCount; ++s) {
    const SegmentGeometry& g = arm.segments[s];
    st.bodies[3 * s] = prefix;
    Pose running = prefix;
    for (int j = 0; j < kJointsPerSegment; ++j) {
      const int idx = s * kJointsPerSegment + j;
      st.spatial_jacobian.col(idx) = adjoint(running) * g.joint_twist(j).vector();
      running = running * exp_twist(g.joint_twist(j), theta[idx]);
      if (j == 1) st.bodies[3 * s + 1] = running;
    }
    st.bodies[3 * s + 2] = running;
    const Pose tool = running * g.rest_tool_pose;
    if (s + 1 < kSegmentCount) {
      prefix = tool * arm.offsets[s];
    } else {
      st.tool = tool;
    }
  }
  return st;
}

Pose robot_fk(const ArmGeometry& arm, const JointVector& theta) {
  Pose g = Pose::identity();
  for (int s = 0; s < kSegmentCount; ++s) {
    g = g * segment_fk(arm.segments[s], theta.segment<kJointsPerSegment>(s * kJointsPerSegment));
    if (s + 1 < kSegmentCount) g = g * arm.offsets[s];
  }
  return g;
}

Jacobian6 spatial_jacobian(const ArmGeometry& arm, const JointVector& theta) {
  return evaluate(arm, theta).spatial_jacobian;
}

Jacobian3 point_jacobian(const KinematicState& state, int body, const Vec3& world_point) {
  // Body 3s+k is downstream of every joint in earlier segments plus the
  // first 0, 2 or 4 joints of its own segment.
  const int segment = body / 3;
  const int within = (body % 3) * 2;
  const int active = segment * kJointsPerSegment + within;

  Jacobian3 jp = Jacobian3::Zero();
  for (int i = 0; i < active; ++i) {
    const auto col = state.spatial_jacobian.col(i);
    jp.col(i) = col.head<3>() + col.tail<3>().cross(world_point);
  }
  return jp;
}

Jacobian3 position_jacobian(const KinematicState& state) {
  const Vec3& p = state.tool.translation();
  Jacobian3 jp;
  for (int i = 0; i < kJointCount; ++i) {
    const auto col = state.spatial_jacobian.col(i);
    jp.col(i) = col.head<3>() + col.tail<3>().cross(p);
  }
  return jp;
}

Jacobian3 position_jacobian(const ArmGeometry& arm, const JointVector& theta) {
  return position_jacobian(evaluate(arm, theta));
}

std::pair<double, double> joint_angles_from_frames(const Pose& parent, const Pose& child,
                                                   const UJoint& ujoint, double tolerance) {
  const Mat3 r = (parent.inverse() * child).rotation().matrix();
  const Vec3& a = ujoint.axis_a;
  const Vec3& b = ujoint.axis_b;
  const Vec3 c = a.cross(b);

  // R = Rot(a, ta) Rot(b, tb) gives R b = cos(ta) b + sin(ta) c and
  // R^T a = cos(tb) a + sin(tb) c.
  const Vec3 rb = r * b;
  const Vec3 rta = r.transpose() * a;
  const double ta = std::atan2(c.dot(rb), b.dot(rb));
  const double tb = std::atan2(c.dot(rta), a.dot(rta));

  const Mat3 rebuilt = Rotation::axis_angle(a, ta).matrix() * Rotation::axis_angle(b, tb).matrix();
  const double residual = (rebuilt - r).norm();
  if (residual > tolerance) {
    throw ExtractionError("relative rotation is not reachable by the U-joint (residual " +
                              std::to_string(residual) + ")",
                          residual);
  }
  constexpr double kGimbal = std::numbers::pi / 2.0;
  if (std::abs(ta) >= kGimbal || std::abs(tb) >= kGimbal) {
    throw ExtractionError("U-joint angle at or beyond the gimbal boundary", residual);
  }
  return {ta, tb};
}

JointVector measure_joint_angles(const ArmGeometry& arm,
                                 const std::array<Pose, kBodyCount>& bodies) {
  JointVector theta;
  for (int s = 0; s < kSegmentCount; ++s) {
    for (int k = 0; k < 2; ++k) {
      const auto [ta, tb] = joint_angles_from_frames(bodies[3 * s + k], bodies[3 * s + k + 1],
                                                     arm.segments[s].ujoint(k));
      theta[s * kJointsPerSegment + 2 * k] = ta;
      theta[s * kJointsPerSegment + 2 * k + 1] = tb;
    }
  }
  return theta;
}

}  // namespace umarm
