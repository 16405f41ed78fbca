#include "umarm/batch.hpp"

#include <random>

namespace umarm {

void WorkspaceBounds::include(const Vec3& p) {
  lower = lower.cwiseMin(p);
  upper = upper.cwiseMax(p);
  max_reach = std::max(max_reach, p.norm());
}

void WorkspaceBounds::merge(const WorkspaceBounds& other) {
  lower = lower.cwiseMin(other.lower);
  upper = upper.cwiseMax(other.upper);
  max_reach = std::max(max_reach, other.max_reach);
}

std::vector<JointVector> sample_joint_vectors(const JointLimits& limits, std::size_t count,
                                              std::uint64_t seed) {
  limits.validate();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<JointVector> out(count);
  for (auto& theta : out) {
    for (int i = 0; i < kJointCount; ++i) {
      theta[i] = limits.lower[i] + unit(rng) * (limits.upper[i] - limits.lower[i]);
    }
  }
  return out;
}

std::vector<Pose> batch_fk(const ArmGeometry& arm, const std::vector<JointVector>& thetas) {
  std::vector<Pose> out(thetas.size());
  const auto n = static_cast<std::int64_t>(thetas.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) out[k] = robot_fk(arm, thetas[k]);
  return out;
}

std::vector<IkResult> batch_solve_ik(const ArmGeometry& arm, const JointVector& seed,
                                     const std::vector<Vec3>& targets, const IkParams& params) {
  std::vector<IkResult> out(targets.size());
  const auto n = static_cast<std::int64_t>(targets.size());
  // Iteration counts vary per target, so hand out work dynamically.
#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t k = 0; k < n; ++k) out[k] = solve_position_ik(arm, seed, targets[k], params);
  return out;
}

WorkspaceBounds workspace_bounds(const ArmGeometry& arm, const std::vector<JointVector>& thetas) {
  WorkspaceBounds total;
  const auto n = static_cast<std::int64_t>(thetas.size());
#pragma omp parallel
  {
    WorkspaceBounds local;
#pragma omp for schedule(static) nowait
    for (std::int64_t k = 0; k < n; ++k) local.include(robot_fk(arm, thetas[k]).translation());
#pragma omp critical
    total.merge(local);
  }
  return total;
}

namespace serial {

std::vector<Pose> batch_fk(const ArmGeometry& arm, const std::vector<JointVector>& thetas) {
  std::vector<Pose> out;
  out.reserve(thetas.size());
  for (const auto& theta : thetas) out.push_back(robot_fk(arm, theta));
  return out;
}

std::vector<IkResult> batch_solve_ik(const ArmGeometry& arm, const JointVector& seed,
                                     const std::vector<Vec3>& targets, const IkParams& params) {
  std::vector<IkResult> out;
  out.reserve(targets.size());
  for (const auto& t : targets) out.push_back(solve_position_ik(arm, seed, t, params));
  return out;
}

WorkspaceBounds workspace_bounds(const ArmGeometry& arm, const std::vector<JointVector>& thetas) {
  WorkspaceBounds total;
  for (const auto& theta : thetas) total.include(robot_fk(arm, theta).translation());
  return total;
}

}  // namespace serial

}  // namespace umarm
