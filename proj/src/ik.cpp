#include "umarm/ik.hpp"

#include <cmath>

#include "umarm/errors.hpp"

namespace umarm {

void IkParams::validate() const {
  if (max_iters < 1) throw InputError("max_iters must be >= 1");
  if (!(position_tolerance > 0.0)) throw InputError("position_tolerance must be > 0");
  if (!(damping >= 0.0)) throw InputError("damping must be >= 0");
  if (!(step_scale > 0.0 && step_scale <= 1.0)) throw InputError("step_scale must be in (0, 1]");
  if (!(null_gain >= 0.0)) throw InputError("null_gain must be >= 0");
}

double limit_avoidance_cost(const JointVector& theta, const JointLimits& limits) {
  return ((theta - limits.mid()).array() / limits.range().array()).square().sum();
}

JointVector limit_avoidance_gradient(const JointVector& theta, const JointLimits& limits) {
  return (2.0 * (theta - limits.mid()).array() / limits.range().array().square()).matrix();
}

JointWeights wln_weights(const JointVector& theta, const JointVector& previous,
                         const JointLimits& limits) {
  const JointVector g = limit_avoidance_gradient(theta, limits).cwiseAbs();
  const JointVector g_prev = limit_avoidance_gradient(previous, limits).cwiseAbs();
  JointWeights w = JointWeights::Ones();
  for (int i = 0; i < kJointCount; ++i) {
    if (g[i] > g_prev[i]) w[i] += g[i];
  }
  return w;
}

Eigen::Matrix<double, kJointCount, 3> pseudo_inverse(const Jacobian3& j) {
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(j, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& s = svd.singularValues();
  const double cutoff = 1e-12 * std::max(1.0, s[0]);
  Eigen::Vector3d inv = Eigen::Vector3d::Zero();
  for (int i = 0; i < s.size(); ++i) {
    if (s[i] > cutoff) inv[i] = 1.0 / s[i];
  }
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().transpose();
}

Eigen::Matrix<double, kJointCount, kJointCount> null_space_projector(const Jacobian3& j) {
  return Eigen::Matrix<double, kJointCount, kJointCount>::Identity() - pseudo_inverse(j) * j;
}

IkStep ik_step_detailed(const ArmGeometry& arm, const JointVector& theta, const Vec3& target,
                        const IkParams& params, IkScratch& scratch) {
  const KinematicState st = evaluate(arm, theta);
  const Jacobian3 jp = position_jacobian(st);
  const Vec3 error = target - st.tool.translation();

  JointVector w_inv = JointVector::Ones();
  if (params.wln_enabled && scratch.has_previous) {
    w_inv = wln_weights(theta, scratch.previous, arm.limits).cwiseInverse();
  }

  // dtheta = W^-1 J^T (J W^-1 J^T + lambda^2 I)^-1 e
  const Jacobian3 jw = jp * w_inv.asDiagonal();
  const Eigen::Matrix3d gram =
      jw * jp.transpose() + params.damping * params.damping * Eigen::Matrix3d::Identity();
  const Vec3 y = gram.ldlt().solve(error);

  IkStep out;
  out.task_step = params.step_scale * (jw.transpose() * y);
  out.null_step = JointVector::Zero();
  if (params.null_gain > 0.0) {
    out.null_step = params.null_gain * (null_space_projector(jp) *
                                        -limit_avoidance_gradient(theta, arm.limits));
  }
  out.theta = arm.limits.clamp(theta + out.task_step + out.null_step);

  scratch.previous = theta;
  scratch.has_previous = true;
  return out;
}

JointVector ik_step(const ArmGeometry& arm, const JointVector& theta, const Vec3& target,
                    const IkParams& params) {
  IkScratch scratch;
  return ik_step_detailed(arm, theta, target, params, scratch).theta;
}

IkResult solve_position_ik(const ArmGeometry& arm, const JointVector& theta0,
                           const Vec3& target, const IkParams& params) {
  if (!target.allFinite()) throw InputError("IK target is not finite");
  params.validate();

  IkScratch scratch;
  JointVector theta = arm.limits.clamp(theta0);

  IkResult best;
  best.theta = theta;
  best.residual = (target - robot_fk(arm, theta).translation()).norm();
  if (best.residual <= params.position_tolerance) {
    best.converged = true;
    return best;
  }

  for (int it = 1; it <= params.max_iters; ++it) {
    theta = ik_step_detailed(arm, theta, target, params, scratch).theta;
    const double residual = (target - robot_fk(arm, theta).translation()).norm();
    if (residual < best.residual) {
      best.theta = theta;
      best.residual = residual;
      best.iterations = it;
    }
    if (residual <= params.position_tolerance) {
      best.theta = theta;
      best.residual = residual;
      best.iterations = it;
      best.converged = true;
      return best;
    }
  }
  best.iterations = params.max_iters;
  return best;
}

}  // namespace umarm
