#pragma once

// Hierarchical YAML configuration covering geometry, masses, actuators,
// simulation, IK parameters, control profiles, waypoints and the air tank.
// `schema_version` is mandatory.

#include <filesystem>
#include <string>
#include <vector>

#include "umarm/actuation.hpp"
#include "umarm/ik.hpp"
#include "umarm/plant.hpp"

namespace umarm {

inline constexpr int kConfigSchemaVersion = 1;

struct Waypoint {
  Vec3 position = Vec3::Zero();
  double dwell = 5.0;  // s
};

struct StepSchedule {
  double duration = 24.0;
  std::vector<double> switch_times = {6.0, 12.0, 18.0};
  std::vector<double> targets = {-0.1, 0.0, 0.1};  // rad, applied to every joint
};

struct PayloadSweep {
  std::vector<double> payloads = {0.0, 1.0, 2.0, 3.0};  // kg
  double settle = 6.0;                                   // s per payload
  double average_window = 1.0;                           // s
  std::vector<int> bending_joints = {0, 4, 8};
};

struct ComplianceDemo {
  double force = 1.0;  // N
  Vec3 stiff_direction = Vec3::UnitY();
  Vec3 soft_direction = Vec3::UnitX();
  JointVector posture = JointVector::Zero();
  JointVector uniform_pa = JointVector::Constant(55.0);
  JointVector demo_pa = JointVector::Constant(55.0);
  double settle = 8.0;
  double average_window = 1.0;
};

struct EnduranceSettings {
  double interval = 2.0;        // s per waypoint
  double duration_cap = 3600.0; // s
  bool unlimited_tank = false;
};

struct Config {
  ArmGeometry arm = ArmGeometry::standard();
  ActuatorConfig actuators;
  SimConfig sim;
  IkParams ik;
  std::vector<ControlProfile> profiles = default_profiles();
  std::vector<Waypoint> waypoints;
  TankState tank;
  StepSchedule step;
  PayloadSweep payload;
  ComplianceDemo compliance;
  EnduranceSettings endurance;
  std::string default_profile = "high-aggressive";
  int log_decimation = 10;  // plant steps per logged row

  /// Throws ConfigError for unknown names.
  const ControlProfile& profile(const std::string& name) const;
  void validate() const;
};

/// Built-in configuration identical to config/umarm.yaml.
Config default_config();

/// Throws ConfigError on a missing file, missing/unsupported schema_version,
/// or malformed values.
Config load_config(const std::filesystem::path& path);
Config parse_config(const std::string& yaml_text);

/// YAML text that parse_config reads back into an equal configuration.
std::string to_yaml(const Config& config);

}  // namespace umarm
