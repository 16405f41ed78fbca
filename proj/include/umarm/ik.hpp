#pragma once

// Position-only inverse kinematics for the redundant 12-joint arm. Each step
// is a damped, weighted pseudoinverse correction of the position error plus a
// null-space term that pulls joints toward the middle of their range.

#include "umarm/arm_model.hpp"

namespace umarm {

struct IkParams {
  int max_iters = 200;
  double position_tolerance = 1e-4;  // m
  double damping = 1e-3;             // lambda, m
  double step_scale = 0.5;           // alpha in (0, 1]
  double null_gain = 0.01;           // k0 >= 0
  bool wln_enabled = true;

  /// Throws InputError on out-of-range fields.
  void validate() const;
};

struct IkResult {
  JointVector theta = JointVector::Zero();
  bool converged = false;
  int iterations = 0;
  double residual = 0.0;  // m
};

using JointWeights = JointVector;

/// Gradient of H(theta) = sum_i ((theta_i - mid_i) / range_i)^2.
JointVector limit_avoidance_gradient(const JointVector& theta, const JointLimits& limits);
double limit_avoidance_cost(const JointVector& theta, const JointLimits& limits);

/// Diagonal weighted-least-norm weights: 1 + |dH/dtheta_i| for joints whose
/// |dH/dtheta_i| grew since `previous`, 1 otherwise.
JointWeights wln_weights(const JointVector& theta, const JointVector& previous,
                         const JointLimits& limits);

/// Moore-Penrose pseudoinverse of the 3x12 position Jacobian via SVD with a
/// relative singular-value cutoff.
Eigen::Matrix<double, kJointCount, 3> pseudo_inverse(const Jacobian3& j);

/// Projector I - J+ J onto the null space of J.
Eigen::Matrix<double, kJointCount, kJointCount> null_space_projector(const Jacobian3& j);

/// Per-solve scratch: the previous iterate drives the directional WLN rule.
struct IkScratch {
  JointVector previous = JointVector::Zero();
  bool has_previous = false;
};

struct IkStep {
  JointVector theta;
  JointVector task_step;  // alpha * weighted damped least-squares term
  JointVector null_step;  // k0 * N * (-grad H)
};

IkStep ik_step_detailed(const ArmGeometry& arm, const JointVector& theta, const Vec3& target,
                        const IkParams& params, IkScratch& scratch);

/// One clamped update of theta toward `target`.
JointVector ik_step(const ArmGeometry& arm, const JointVector& theta, const Vec3& target,
                    const IkParams& params);

/// Iterates ik_step from `theta0` until the position residual is within
/// tolerance or max_iters is reached. Returns the best iterate seen. Throws
/// InputError for a non-finite target.
IkResult solve_position_ik(const ArmGeometry& arm, const JointVector& theta0,
                           const Vec3& target, const IkParams& params);

}  // namespace umarm
