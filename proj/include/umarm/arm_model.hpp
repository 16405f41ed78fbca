#pragma once

// Geometric model of the three-segment, twelve-joint arm: per-segment and
// whole-arm product-of-exponentials kinematics, the spatial Jacobian, and
// recovery of joint angles from measured rigid-body frames.
//
// Frame conventions. The arm hangs from the ceiling along -z. Each segment
// carries three rigid bodies: the upper plate (segment base frame), the rod
// between the two U-joints, and the lower plate. Body frames coincide with
// the segment base frame at the rest posture, so a point given in segment
// coordinates at rest is carried by its body frame for any configuration.
// Segments compose base to tip:
//   g(theta) = g1(theta_0..3) * H12 * g2(theta_4..7) * H23 * g3(theta_8..11)

#include <array>
#include <utility>
#include <vector>

#include "umarm/spatial.hpp"

namespace umarm {

inline constexpr int kJointCount = 12;
inline constexpr int kSegmentCount = 3;
inline constexpr int kJointsPerSegment = 4;
inline constexpr int kBodyCount = 3 * kSegmentCount;
inline constexpr double kDefaultJointLimit = 0.2617993877991494;  // 15 degrees

using JointVector = Eigen::Matrix<double, kJointCount, 1>;
using Jacobian6 = Eigen::Matrix<double, 6, kJointCount>;
using Jacobian3 = Eigen::Matrix<double, 3, kJointCount>;

struct JointLimits {
  JointVector lower = JointVector::Constant(-kDefaultJointLimit);
  JointVector upper = JointVector::Constant(kDefaultJointLimit);

  static JointLimits symmetric(double limit);

  JointVector mid() const { return 0.5 * (lower + upper); }
  JointVector range() const { return upper - lower; }
  bool contains(const JointVector& theta) const;
  JointVector clamp(const JointVector& theta) const;
  /// Throws InputError unless lower < upper for every joint.
  void validate() const;
};

/// Two perpendicular revolute axes intersecting at `center`, applied
/// first `axis_a` then `axis_b`. Axes are expressed in the parent body frame.
struct UJoint {
  Vec3 axis_a;
  Vec3 axis_b;
  Vec3 center;
};

struct SegmentGeometry {
  std::array<Vec3, kJointsPerSegment> joint_centers;
  std::array<Vec3, kJointsPerSegment> joint_axes;
  Pose rest_tool_pose;
  double upper_plate_half_height = 0.0125;
  double rod_length = 0.060;
  double lower_plate_half_height = 0.0125;
  double lever_arm_radius = 0.030;
  double actuator_rest_length = 0.060;

  /// Segment with the standard axis pattern: the first U-joint turns about x
  /// then y, the second about the same pair rotated 45 degrees about z.
  static SegmentGeometry standard(double upper_plate_half_height, double rod_length,
                                  double lower_plate_half_height, double lever_arm_radius,
                                  double actuator_rest_length);

  Twist joint_twist(int j) const { return Twist::revolute(joint_axes[j], joint_centers[j]); }
  UJoint ujoint(int k) const {
    return {joint_axes[2 * k], joint_axes[2 * k + 1], joint_centers[2 * k]};
  }
  void validate() const;
};

/// Point mass rigidly attached to one of the nine bodies. `body` is
/// 3 * segment + {0 upper plate, 1 rod, 2 lower plate}; `position` is in
/// segment coordinates at rest.
struct LumpedMass {
  int body = 0;
  Vec3 position = Vec3::Zero();
  double mass = 0.0;
};

struct ArmGeometry {
  std::array<SegmentGeometry, kSegmentCount> segments;
  std::array<Pose, kSegmentCount - 1> offsets;
  std::vector<LumpedMass> masses;
  double base_segment_scale = 1.3;
  JointLimits limits;

  /// Default arm: 60 mm rods, 25 mm plates, 20 mm inter-segment links,
  /// 1.15 kg spread over plates and rods. Dimensions are placeholders.
  static ArmGeometry standard();

  int segment_of(int joint) const { return joint / kJointsPerSegment; }
  /// Actuator lever arm of a segment; the base segment uses larger actuators
  /// mounted further out.
  double lever_arm(int segment) const {
    return segments[segment].lever_arm_radius * (segment == 0 ? base_segment_scale : 1.0);
  }
  double total_mass() const;
  /// Sum of the rigid link lengths between consecutive frame origins along
  /// the chain; an upper bound on the base-to-tool distance.
  double kinematic_length() const;
  /// Throws InputError on any violated geometric invariant.
  void validate() const;
};

/// Everything the rest of the library needs about one configuration,
/// computed in a single pass: body frames, tool pose, and spatial twists.
struct KinematicState {
  std::array<Pose, kBodyCount> bodies;
  Pose tool;
  Jacobian6 spatial_jacobian;
};

Pose segment_fk(const SegmentGeometry& geom, const Eigen::Vector4d& theta);
Pose robot_fk(const ArmGeometry& arm, const JointVector& theta);
KinematicState evaluate(const ArmGeometry& arm, const JointVector& theta);

/// Columns are the joint twists (v; w) at the current configuration.
Jacobian6 spatial_jacobian(const ArmGeometry& arm, const JointVector& theta);
/// Rows give the velocity of the tool origin: p_dot = J_p * theta_dot.
Jacobian3 position_jacobian(const ArmGeometry& arm, const JointVector& theta);
Jacobian3 position_jacobian(const KinematicState& state);
/// Velocity Jacobian of a world point rigidly attached to `body`. Only the
/// joints upstream of the body contribute.
Jacobian3 point_jacobian(const KinematicState& state, int body, const Vec3& world_point);

/// Factor the parent-to-child relative rotation into the two U-joint angles.
/// Throws ExtractionError when the residual exceeds `tolerance` or either
/// angle reaches the +-pi/2 gimbal boundary.
std::pair<double, double> joint_angles_from_frames(const Pose& parent, const Pose& child,
                                                   const UJoint& ujoint,
                                                   double tolerance = 1e-6);

/// Joint angles recovered from the nine body frames, U-joint by U-joint.
JointVector measure_joint_angles(const ArmGeometry& arm,
                                 const std::array<Pose, kBodyCount>& bodies);

}  // namespace umarm
