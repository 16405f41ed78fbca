#pragma once

// Reference computations that share no code path with the library under
// test: chained homogeneous matrices, central finite differences, seeded
// random inputs and a zero-crossing frequency estimate.

#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "umarm/arm_model.hpp"

namespace oracle {

using umarm::JointVector;
using umarm::Vec3;

/// Tool pose from frames chained joint by joint: translate to the joint
/// center, rotate about the joint axis in the current local frame, repeat.
Eigen::Matrix4d chained_fk(const umarm::ArmGeometry& arm, const JointVector& theta);
Eigen::Matrix4d chained_segment_fk(const umarm::SegmentGeometry& geom,
                                   const Eigen::Vector4d& theta);

/// Position Jacobian by central differences of a tool-position function.
Eigen::Matrix<double, 3, umarm::kJointCount> fd_position_jacobian(
    const std::function<Vec3(const JointVector&)>& position, const JointVector& theta, double h);

/// Derivative of a scalar function by central differences.
double fd_derivative(const std::function<double(double)>& f, double x, double h);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(gen_); }
  JointVector joints(double limit);
  Vec3 vec3(double scale);
  Vec3 unit();
  std::mt19937_64& engine() { return gen_; }

 private:
  std::mt19937_64 gen_;
};

/// Mean frequency (rad/s) from upward zero crossings of x(t) - mean.
double zero_crossing_frequency(const std::vector<double>& t, const std::vector<double>& x);

struct FreeResponse {
  double damped = 0.0;   // rad/s
  double decay = 0.0;    // 1/s
  double natural = 0.0;  // rad/s, sqrt(damped^2 + decay^2)
};

/// Second-order fit to a release from rest about `level`: the first half
/// period between crossings gives the damped frequency, the ratio of the
/// initial offset to the next extremum gives the decay rate. All zero when
/// the response crosses `level` fewer than twice.
FreeResponse free_response(const std::vector<double>& t, const std::vector<double>& x, double level);

}  // namespace oracle
