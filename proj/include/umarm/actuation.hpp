#pragma once

// McKibben actuator model, antagonistic joint torque and stiffness, the
// per-joint pressure-ratio PID law, and task-space compliance.
//
// Pressures are gauge kPa throughout. Actuator 2*i is side 1 of joint i and
// pulls the joint toward positive angles; actuator 2*i+1 is side 2.

#include <array>
#include <string>
#include <vector>

#include "umarm/arm_model.hpp"

namespace umarm {

inline constexpr int kActuatorCount = 2 * kJointCount;
inline constexpr double kSupplyPressure = 276.0;  // kPa, 40 psi

using PressureVector = Eigen::Matrix<double, kActuatorCount, 1>;

/// Affine McKibben model F = p * (a * L / L0 + b), with b fixed by F = 0 at
/// full contraction L = L0 * (1 - max_contraction).
struct McKibbenParams {
  double rest_length = 0.08;       // L0, uncontracted length, m
  double max_contraction = 0.34;   // epsilon_max
  double force_gain = 1.5;         // a, N/kPa
  double min_pressure = 0.0;       // kPa
  double max_pressure = kSupplyPressure;

  double offset() const { return -force_gain * (1.0 - max_contraction); }  // b, N/kPa
  double min_length() const { return rest_length * (1.0 - max_contraction); }
  void validate() const;
};

/// Tension in newtons. Throws RangeError if `length` is outside
/// [L0 (1 - eps), L0] or `pressure` is outside [min, max].
double mckibben_force(const McKibbenParams& params, double pressure, double length);

/// Two actuators spanning a revolute joint in its bending plane. The lower
/// attachment sits on the child link at +-lever_arm from the axis; the upper
/// attachment is on the parent, `mounted_length` away and tilted outward by
/// `attachment_angle`, so both chords equal `mounted_length` at theta = 0.
struct AntagonisticJoint {
  double lever_arm = 0.03;         // m
  double mounted_length = 0.06;    // chord at theta = 0, m
  double attachment_angle = 0.17;  // rad
  std::array<McKibbenParams, 2> actuators;

  /// Joint whose actuators reach full contraction near `full_contraction_angle`.
  static AntagonisticJoint with_stroke(double lever_arm, double mounted_length,
                                       double attachment_angle, double full_contraction_angle,
                                       const McKibbenParams& base);
  void validate() const;
};

/// Chord length of actuator `side` (1 or 2) at joint angle theta.
double actuator_length(const AntagonisticJoint& joint, double theta, int side);
/// d(length)/d(theta), analytic.
double actuator_length_rate(const AntagonisticJoint& joint, double theta, int side);

/// tau = F1 * m1 - F2 * m2 with moment arms m1 = -dL1/dtheta, m2 = dL2/dtheta.
/// Chord lengths are saturated to the actuator's physical stroke, so a fully
/// contracted actuator goes slack instead of raising.
double pair_torque(const AntagonisticJoint& joint, double theta, double p1, double p2);

/// k = -d(tau)/d(theta) at fixed pressures.
double joint_stiffness(const AntagonisticJoint& joint, double theta, double p1, double p2);

struct PidGains {
  double kp = 0.0;
  double ki = 0.0;
  double kd = 0.0;
  double integral_clamp = 1.0;  // bound on |ki * integral|
  double output_clamp = 4.0;    // bound on |log(p_ratio)|
  void validate() const;
};

struct PidState {
  double integral = 0.0;
  double previous_error = 0.0;
  bool has_previous = false;
};

/// Returns u = log(p_ratio). Derivative acts on the error and is zero on the
/// first call.
double pid_step(PidState& state, double error, double dt, const PidGains& gains);

struct PressurePair {
  double p1 = 0.0;
  double p2 = 0.0;
  bool clamped = false;
};

/// The lower-pressure side sits at p_a; the other is p_a scaled by the ratio
/// and clamped to [0, max_pressure]. Throws InputError for ratio <= 0.
PressurePair ratio_to_pressures(double p_ratio, double p_a, double max_pressure);

/// p_a * max(0, 1 - |target| / limit)^gamma.
double derate_pa(double p_a, double target, double limit, double gamma = 1.0);

/// C = J_p diag(1/k) J_p^T. Throws InputError unless every k_i > 0.
Eigen::Matrix3d task_space_compliance(const ArmGeometry& arm, const JointVector& theta,
                                      const JointVector& stiffness);

struct StiffnessProfile {
  JointVector p_a = JointVector::Zero();  // kPa

  static StiffnessProfile per_segment(double base, double middle, double tip);
  void validate(double max_pressure = kSupplyPressure) const;
};

/// A named stiffness profile plus PID tuning.
struct ControlProfile {
  std::string name;
  StiffnessProfile stiffness;
  std::array<PidGains, kJointCount> gains;
  bool derate = true;
  double derate_gamma = 1.0;
  double rate_hz = 100.0;

  void validate() const;
};

/// Built-in tunings for the three reference profiles:
/// "high-aggressive", "low-aggressive", "low-conservative".
std::vector<ControlProfile> default_profiles();

/// Actuator parameters shared by the arm; the base segment scales its force.
struct ActuatorConfig {
  McKibbenParams mckibben;
  double attachment_angle = 0.17;
  double full_contraction_angle = 0.25;
  double base_force_scale = 1.5;
  double valve_volume_liters = 0.03;  // air per actuator, standard-volume accounting

  std::array<AntagonisticJoint, kJointCount> joints(const ArmGeometry& arm) const;
};

/// Twelve independent PID loops producing the 24 actuator pressure targets.
class JointController {
 public:
  JointController(ControlProfile profile, JointLimits limits);

  /// One control tick: returns target pressures for every actuator.
  PressureVector step(const JointVector& measured, const JointVector& target, double dt);
  void reset();

  const ControlProfile& profile() const { return profile_; }
  /// Antagonistic floor in effect for each joint after derating.
  const JointVector& effective_pa() const { return effective_pa_; }
  /// Clamp events in the last tick.
  int clamp_count() const { return clamp_count_; }

 private:
  ControlProfile profile_;
  JointLimits limits_;
  std::array<PidState, kJointCount> pid_;
  JointVector effective_pa_ = JointVector::Zero();
  int clamp_count_ = 0;
};

}  // namespace umarm
