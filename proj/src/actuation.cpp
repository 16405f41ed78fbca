#include "umarm/actuation.hpp"

#include <algorithm>
#include <cmath>

#include "umarm/errors.hpp"

namespace umarm {

namespace {

using Vec2 = Eigen::Vector2d;

// Bending-plane coordinates: first axis horizontal (toward side 1), second
// vertical. The joint axis is the origin; the child link rotates by theta.
struct Chord {
  Vec2 upper;  // on the parent, fixed
  Vec2 lower;  // on the child at theta = 0
};

Chord chord(const AntagonisticJoint& j, int side) {
  const double sign = side == 1 ? 1.0 : -1.0;
  const double s = std::sin(j.attachment_angle);
  const double c = std::cos(j.attachment_angle);
  return {Vec2(sign * (j.lever_arm + j.mounted_length * s), j.mounted_length * c),
          Vec2(sign * j.lever_arm, 0.0)};
}

Vec2 rotate(const Vec2& p, double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return {c * p.x() - s * p.y(), s * p.x() + c * p.y()};
}

Vec2 rotate_rate(const Vec2& p, double theta) {
  const double s = std::sin(theta);
  const double c = std::cos(theta);
  return {-s * p.x() - c * p.y(), c * p.x() - s * p.y()};
}

struct ChordKinematics {
  double length;
  double rate;       // dL/dtheta
  double curvature;  // d2L/dtheta2
};

ChordKinematics chord_kinematics(const AntagonisticJoint& j, double theta, int side) {
  const Chord ch = chord(j, side);
  const Vec2 d = ch.upper - rotate(ch.lower, theta);
  const Vec2 d1 = -rotate_rate(ch.lower, theta);
  const Vec2 d2 = rotate(ch.lower, theta);
  const double len = d.norm();
  const double rate = d.dot(d1) / len;
  const double curvature = (d1.squaredNorm() + d.dot(d2) - rate * rate) / len;
  return {len, rate, curvature};
}

// Force and dF/dL with the chord saturated to the actuator stroke.
struct ForceSample {
  double force;
  double slope;
};

ForceSample saturated_force(const McKibbenParams& m, double pressure, double length) {
  const double len = std::clamp(length, m.min_length(), m.rest_length);
  const double force = pressure * (m.force_gain * len / m.rest_length + m.offset());
  const bool inside = length > m.min_length() && length < m.rest_length;
  return {force, inside ? pressure * m.force_gain / m.rest_length : 0.0};
}

}  // namespace

void McKibbenParams::validate() const {
  if (!(max_contraction > 0.0 && max_contraction < 1.0)) {
    throw InputError("max_contraction must lie in (0, 1)");
  }
  if (!(rest_length > 0.0)) throw InputError("actuator rest length must be positive");
  if (!(force_gain > 0.0)) throw InputError("force gain must be positive");
  if (!(min_pressure >= 0.0 && max_pressure > min_pressure)) {
    throw InputError("pressure range must satisfy 0 <= min < max");
  }
}

double mckibben_force(const McKibbenParams& params, double pressure, double length) {
  constexpr double kSlack = 1e-12;
  if (length < params.min_length() - kSlack || length > params.rest_length + kSlack) {
    throw RangeError("actuator length " + std::to_string(length) +
                     " m is outside the contraction range");
  }
  if (pressure < params.min_pressure || pressure > params.max_pressure) {
    throw RangeError("actuator pressure " + std::to_string(pressure) + " kPa is out of range");
  }
  const double force = pressure * (params.force_gain * length / params.rest_length + params.offset());
  return std::max(0.0, force);
}

AntagonisticJoint AntagonisticJoint::with_stroke(double lever_arm, double mounted_length,
                                                 double attachment_angle,
                                                 double full_contraction_angle,
                                                 const McKibbenParams& base) {
  AntagonisticJoint j;
  j.lever_arm = lever_arm;
  j.mounted_length = mounted_length;
  j.attachment_angle = attachment_angle;
  // The uncontracted length is chosen so that side 1 is fully contracted
  // exactly at the requested angle.
  const double contracted = chord_kinematics(j, full_contraction_angle, 1).length;
  McKibbenParams m = base;
  m.rest_length = contracted / (1.0 - base.max_contraction);
  j.actuators = {m, m};
  return j;
}

void AntagonisticJoint::validate() const {
  if (!(lever_arm > 0.0)) throw InputError("lever arm must be positive");
  if (!(mounted_length > 0.0)) throw InputError("mounted length must be positive");
  for (const auto& a : actuators) a.validate();
}

double actuator_length(const AntagonisticJoint& joint, double theta, int side) {
  return chord_kinematics(joint, theta, side).length;
}

double actuator_length_rate(const AntagonisticJoint& joint, double theta, int side) {
  return chord_kinematics(joint, theta, side).rate;
}

double pair_torque(const AntagonisticJoint& joint, double theta, double p1, double p2) {
  const ChordKinematics c1 = chord_kinematics(joint, theta, 1);
  const ChordKinematics c2 = chord_kinematics(joint, theta, 2);
  const double f1 = saturated_force(joint.actuators[0], p1, c1.length).force;
  const double f2 = saturated_force(joint.actuators[1], p2, c2.length).force;
  return f1 * -c1.rate - f2 * c2.rate;
}

double joint_stiffness(const AntagonisticJoint& joint, double theta, double p1, double p2) {
  // tau = -F1 L1' - F2 L2'  =>  -dtau/dtheta = F1' L1' + F1 L1'' + F2' L2' + F2 L2''
  // with Fi' = (dF/dL) Li'.
  const ChordKinematics c1 = chord_kinematics(joint, theta, 1);
  const ChordKinematics c2 = chord_kinematics(joint, theta, 2);
  const ForceSample f1 = saturated_force(joint.actuators[0], p1, c1.length);
  const ForceSample f2 = saturated_force(joint.actuators[1], p2, c2.length);
  return f1.slope * c1.rate * c1.rate + f1.force * c1.curvature +
         f2.slope * c2.rate * c2.rate + f2.force * c2.curvature;
}

void PidGains::validate() const {
  if (kp < 0.0 || ki < 0.0 || kd < 0.0) throw InputError("PID gains must be >= 0");
  if (!(integral_clamp >= 0.0) || !(output_clamp > 0.0)) {
    throw InputError("PID clamps must be positive");
  }
}

double pid_step(PidState& state, double error, double dt, const PidGains& gains) {
  if (!(dt > 0.0)) throw InputError("PID step needs dt > 0");

  state.integral += error * dt;
  if (gains.ki > 0.0) {
    const double bound = gains.integral_clamp / gains.ki;
    state.integral = std::clamp(state.integral, -bound, bound);
  }
  const double derivative = state.has_previous ? (error - state.previous_error) / dt : 0.0;
  state.previous_error = error;
  state.has_previous = true;

  const double u = gains.kp * error + gains.ki * state.integral + gains.kd * derivative;
  return std::clamp(u, -gains.output_clamp, gains.output_clamp);
}

PressurePair ratio_to_pressures(double p_ratio, double p_a, double max_pressure) {
  if (!(p_ratio > 0.0) || !std::isfinite(p_ratio)) {
    throw InputError("pressure ratio must be positive and finite");
  }
  if (!(p_a >= 0.0 && p_a <= max_pressure)) {
    throw InputError("antagonistic pressure must lie in [0, max_pressure]");
  }
  PressurePair out;
  if (p_ratio >= 1.0) {
    const double raw = p_a * p_ratio;
    out.p2 = p_a;
    out.p1 = std::clamp(raw, 0.0, max_pressure);
    out.clamped = raw > max_pressure;
  } else {
    const double raw = p_a / p_ratio;
    out.p1 = p_a;
    out.p2 = std::clamp(raw, 0.0, max_pressure);
    out.clamped = raw > max_pressure;
  }
  return out;
}

double derate_pa(double p_a, double target, double limit, double gamma) {
  const double ramp = std::max(0.0, 1.0 - std::abs(target) / limit);
  return p_a * std::pow(ramp, gamma);
}

Eigen::Matrix3d task_space_compliance(const ArmGeometry& arm, const JointVector& theta,
                                      const JointVector& stiffness) {
  if (!(stiffness.array() > 0.0).all()) {
    throw InputError("joint stiffness must be positive for every joint");
  }
  const Jacobian3 jp = position_jacobian(arm, theta);
  const Eigen::Matrix3d c = jp * stiffness.cwiseInverse().asDiagonal() * jp.transpose();
  return 0.5 * (c + c.transpose());
}

StiffnessProfile StiffnessProfile::per_segment(double base, double middle, double tip) {
  StiffnessProfile s;
  s.p_a.setZero();
  s.p_a.segment<4>(0).setConstant(base);
  s.p_a.segment<4>(4).setConstant(middle);
  s.p_a.segment<4>(8).setConstant(tip);
  return s;
}

void StiffnessProfile::validate(double max_pressure) const {
  if (!((p_a.array() >= 0.0).all() && (p_a.array() <= max_pressure).all())) {
    throw InputError("antagonistic pressures must lie in [0, max_pressure]");
  }
}

void ControlProfile::validate() const {
  stiffness.validate();
  for (const auto& g : gains) g.validate();
  if (!(derate_gamma > 0.0)) throw InputError("derate exponent must be positive");
  if (!(rate_hz > 0.0)) throw InputError("controller rate must be positive");
}

std::vector<ControlProfile> default_profiles() {
  PidGains aggressive;
  aggressive.kp = 20.0;
  aggressive.ki = 40.0;
  aggressive.kd = 0.3;
  aggressive.integral_clamp = 3.0;
  aggressive.output_clamp = 4.0;

  PidGains conservative;
  conservative.kp = 10.0;
  conservative.ki = 15.0;
  conservative.kd = 0.1;
  conservative.integral_clamp = 3.0;
  conservative.output_clamp = 4.0;

  ControlProfile high_aggressive{"high-aggressive", StiffnessProfile::per_segment(83.0, 55.0, 28.0),
                                 {}, true, 1.0, 100.0};
  high_aggressive.gains.fill(aggressive);
  ControlProfile low_aggressive{"low-aggressive", StiffnessProfile::per_segment(14.0, 14.0, 14.0),
                                {}, true, 1.0, 100.0};
  low_aggressive.gains.fill(aggressive);
  ControlProfile low_conservative{"low-conservative",
                                  StiffnessProfile::per_segment(14.0, 14.0, 14.0), {}, true, 1.0,
                                  100.0};
  low_conservative.gains.fill(conservative);
  return {high_aggressive, low_aggressive, low_conservative};
}

std::array<AntagonisticJoint, kJointCount> ActuatorConfig::joints(const ArmGeometry& arm) const {
  std::array<AntagonisticJoint, kJointCount> out;
  for (int i = 0; i < kJointCount; ++i) {
    const int s = arm.segment_of(i);
    McKibbenParams m = mckibben;
    if (s == 0) m.force_gain *= base_force_scale;
    out[i] = AntagonisticJoint::with_stroke(arm.lever_arm(s), arm.segments[s].actuator_rest_length,
                                            attachment_angle, full_contraction_angle, m);
  }
  return out;
}

JointController::JointController(ControlProfile profile, JointLimits limits)
    : profile_(std::move(profile)), limits_(std::move(limits)) {
  profile_.validate();
  limits_.validate();
}

void JointController::reset() {
  pid_.fill(PidState{});
  effective_pa_.setZero();
  clamp_count_ = 0;
}

PressureVector JointController::step(const JointVector& measured, const JointVector& target,
                                     double dt) {
  PressureVector out;
  clamp_count_ = 0;
  for (int i = 0; i < kJointCount; ++i) {
    double p_a = profile_.stiffness.p_a[i];
    if (profile_.derate) {
      const double limit = target[i] >= 0.0 ? limits_.upper[i] : -limits_.lower[i];
      p_a = derate_pa(p_a, target[i], limit, profile_.derate_gamma);
    }
    effective_pa_[i] = p_a;
    const double u = pid_step(pid_[i], target[i] - measured[i], dt, profile_.gains[i]);
    const PressurePair pp = ratio_to_pressures(std::exp(u), p_a, kSupplyPressure);
    out[2 * i] = pp.p1;
    out[2 * i + 1] = pp.p2;
    clamp_count_ += pp.clamped ? 1 : 0;
  }
  return out;
}

}  // namespace umarm
