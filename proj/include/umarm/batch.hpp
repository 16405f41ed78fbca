#pragma once

// Batch kernels over many joint configurations. Each kernel has an OpenMP
// version and a serial reference in umarm::serial with identical results.

#include <cstdint>
#include <limits>
#include <vector>

#include "umarm/arm_model.hpp"
#include "umarm/ik.hpp"

namespace umarm {

struct WorkspaceBounds {
  Vec3 lower = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 upper = Vec3::Constant(-std::numeric_limits<double>::infinity());
  double max_reach = 0.0;  // largest base-to-tool distance

  void include(const Vec3& p);
  void merge(const WorkspaceBounds& other);
};

/// Uniform samples inside the joint limits from a seeded generator.
std::vector<JointVector> sample_joint_vectors(const JointLimits& limits, std::size_t count,
                                              std::uint64_t seed);

std::vector<Pose> batch_fk(const ArmGeometry& arm, const std::vector<JointVector>& thetas);
std::vector<IkResult> batch_solve_ik(const ArmGeometry& arm, const JointVector& seed,
                                     const std::vector<Vec3>& targets, const IkParams& params);
WorkspaceBounds workspace_bounds(const ArmGeometry& arm, const std::vector<JointVector>& thetas);

namespace serial {

std::vector<Pose> batch_fk(const ArmGeometry& arm, const std::vector<JointVector>& thetas);
std::vector<IkResult> batch_solve_ik(const ArmGeometry& arm, const JointVector& seed,
                                     const std::vector<Vec3>& targets, const IkParams& params);
WorkspaceBounds workspace_bounds(const ArmGeometry& arm, const std::vector<JointVector>& thetas);

}  // namespace serial

}  // namespace umarm
