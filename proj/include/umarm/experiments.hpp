#pragma once

// Closed-loop experiments: controller, plant, tank and logger on one
// simulated clock. Each experiment returns its metrics together with the
// CSV and plain-text summary it would write.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "umarm/config.hpp"

namespace umarm {

enum class ExperimentKind { step_response, waypoints, payload_sweep, endurance, compliance_demo };

std::string to_string(ExperimentKind kind);

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::step_response;
  std::string profile = "high-aggressive";
  std::optional<double> duration;  // overrides the experiment default
  std::uint64_t seed = 0;
  std::filesystem::path output_dir;  // empty: do not write files

  void validate(const Config& config) const;
};

struct MetricsReport {
  ExperimentKind kind = ExperimentKind::step_response;
  std::string profile;

  // step response
  std::vector<double> transition_times;
  std::vector<std::optional<double>> settling_times;  // s after each switch
  double joint_rmse_deg = 0.0;
  double max_overshoot = 0.0;  // rad past the new target, worst joint and transition

  // waypoints / endurance
  std::vector<double> waypoint_errors_mm;
  double endeffector_rmse_mm = 0.0;
  std::optional<double> endurance_s;
  int waypoints_visited = 0;
  double air_used_standard_liters = 0.0;

  // payload sweep
  std::vector<double> payloads;
  std::vector<double> droop_mm;

  // compliance demo
  double displacement_stiff_mm = 0.0;
  double displacement_soft_mm = 0.0;
  double displacement_ratio = 0.0;
  double analytic_ratio = 0.0;
  bool compliance_singular = false;

  // bookkeeping
  double simulated_time = 0.0;
  double max_damping_power = 0.0;  // should never exceed 0
  int hard_stop_contacts = 0;

  std::string csv;
  std::string summary;
};

/// First time after which `signal` stays within band * |amplitude| of
/// `target` until the end of the series. Times are relative to times[0].
/// Returns nullopt when the last sample is still outside the band.
std::optional<double> settling_time(const std::vector<double>& times,
                                    const std::vector<double>& signal, double target,
                                    double amplitude, double band = 0.05);

/// Header comment plus column row for trajectory snapshots.
std::string trajectory_csv_header();

MetricsReport run_step_response(const Config& config, const ExperimentSpec& spec);
MetricsReport run_waypoints(const Config& config, const ExperimentSpec& spec);
MetricsReport run_payload_sweep(const Config& config, const ExperimentSpec& spec);
MetricsReport run_endurance(const Config& config, const ExperimentSpec& spec);
MetricsReport run_compliance_demo(const Config& config, const ExperimentSpec& spec);

MetricsReport run_experiment(const Config& config, const ExperimentSpec& spec);

/// Writes `<kind>.csv` and `<kind>_summary.txt` under spec.output_dir.
void write_outputs(const MetricsReport& report, const std::filesystem::path& dir);

}  // namespace umarm
