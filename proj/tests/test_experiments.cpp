#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "umarm/errors.hpp"
#include "umarm/experiments.hpp"

using namespace umarm;

namespace {

ExperimentSpec spec_for(ExperimentKind kind, std::optional<double> duration = std::nullopt) {
  ExperimentSpec s;
  s.kind = kind;
  s.duration = duration;
  return s;
}

std::vector<double> linspace(double t0, double t1, int n) {
  std::vector<double> t(n);
  for (int k = 0; k < n; ++k) t[k] = t0 + (t1 - t0) * k / (n - 1);
  return t;
}

}  // namespace

TEST(SettlingTime, ConstantSignalIsSettledImmediately) {
  const auto t = linspace(0.0, 5.0, 501);
  const std::vector<double> x(t.size(), 1.0);
  EXPECT_EQ(settling_time(t, x, 1.0, 1.0), 0.0);
}

TEST(SettlingTime, FirstOrderResponseSettlesAfterThreeTimeConstants) {
  const double tau = 0.5;
  const auto t = linspace(2.0, 10.0, 80001);
  std::vector<double> x;
  for (double ti : t) x.push_back(1.0 - std::exp(-(ti - 2.0) / tau));
  const auto ts = settling_time(t, x, 1.0, 1.0);
  ASSERT_TRUE(ts.has_value());
  EXPECT_NEAR(*ts, tau * std::log(20.0), 2e-4);
}

TEST(SettlingTime, PersistentOscillationNeverSettles) {
  const auto t = linspace(0.0, 5.0, 501);
  std::vector<double> x;
  for (double ti : t) x.push_back(0.2 * std::cos(20.0 * ti));
  EXPECT_FALSE(settling_time(t, x, 0.0, 1.0).has_value());
  EXPECT_THROW(settling_time({}, {}, 0.0, 1.0), InputError);
}

TEST(StepResponse, FollowsTheSwitchSchedule) {
  const Config config = default_config();
  const MetricsReport r = run_step_response(config, spec_for(ExperimentKind::step_response, 8.0));
  ASSERT_EQ(r.transition_times.size(), 1u);
  EXPECT_EQ(r.transition_times[0], 6.0);
  EXPECT_NEAR(r.simulated_time, 8.0, 1e-9);
  // At t = 7 s every joint has been commanded to the first target.
  std::istringstream csv(r.csv);
  std::string line;
  bool found = false;
  while (std::getline(csv, line)) {
    if (line.rfind("7.000000,", 0) == 0) {
      found = true;
      const double theta0 = std::stod(line.substr(line.find(',') + 1));
      EXPECT_LT(theta0, -0.05);
    }
  }
  EXPECT_TRUE(found);
  EXPECT_LE(r.max_damping_power, 0.0);
}

TEST(StepResponse, ZeroGainsCannotTrack) {
  Config config = default_config();
  for (auto& g : config.profiles[0].gains) g = PidGains{};
  const MetricsReport idle = run_step_response(config, spec_for(ExperimentKind::step_response, 10.0));
  const MetricsReport tuned =
      run_step_response(default_config(), spec_for(ExperimentKind::step_response, 10.0));
  EXPECT_GT(idle.joint_rmse_deg, tuned.joint_rmse_deg);
  // With no feedback the arm stays at rest: error is the full step for 4 of 10 s.
  EXPECT_NEAR(idle.joint_rmse_deg, 0.1 * 180.0 / M_PI * std::sqrt(0.4), 0.2);
}

TEST(Waypoints, SingleWaypointAtRestIsHeld) {
  Config config = default_config();
  config.waypoints = {{robot_fk(config.arm, JointVector::Zero()).translation(), 3.0}};
  const MetricsReport r = run_waypoints(config, spec_for(ExperimentKind::waypoints));
  ASSERT_EQ(r.waypoint_errors_mm.size(), 1u);
  EXPECT_LE(r.endeffector_rmse_mm, 1.0);
}

TEST(Waypoints, LongerDwellDoesNotTrackWorse) {
  const Config config = default_config();
  const MetricsReport short_dwell = run_waypoints(config, spec_for(ExperimentKind::waypoints, 2.0));
  const MetricsReport long_dwell = run_waypoints(config, spec_for(ExperimentKind::waypoints, 5.0));
  EXPECT_GE(short_dwell.endeffector_rmse_mm, long_dwell.endeffector_rmse_mm);
}

TEST(Waypoints, UnreachableWaypointIsReported) {
  Config config = default_config();
  config.waypoints = {{Vec3(0.2, 0.0, -0.1), 2.0}};
  try {
    run_waypoints(config, spec_for(ExperimentKind::waypoints));
    FAIL();
  } catch (const ExperimentError& e) {
    EXPECT_NE(std::string(e.what()).find("waypoint 0"), std::string::npos);
  }
}

TEST(Payload, ZeroPayloadHasZeroDroopAndStrongerActuatorsDroopLess) {
  Config config = default_config();
  config.payload.payloads = {0.0, 2.0};
  const MetricsReport base = run_payload_sweep(config, spec_for(ExperimentKind::payload_sweep));
  ASSERT_EQ(base.droop_mm.size(), 2u);
  EXPECT_EQ(base.droop_mm[0], 0.0);
  EXPECT_GT(base.droop_mm[1], 0.0);

  config.actuators.mckibben.force_gain *= 2.0;
  const MetricsReport strong = run_payload_sweep(config, spec_for(ExperimentKind::payload_sweep));
  EXPECT_LT(strong.droop_mm[1], base.droop_mm[1]);
}

TEST(Endurance, UnlimitedTankRunsToTheCap) {
  Config config = default_config();
  config.endurance.unlimited_tank = true;
  const MetricsReport r = run_endurance(config, spec_for(ExperimentKind::endurance, 20.0));
  ASSERT_TRUE(r.endurance_s.has_value());
  EXPECT_NEAR(*r.endurance_s, 20.0, 1e-9);
  EXPECT_EQ(r.waypoints_visited, 10);
  EXPECT_GT(r.air_used_standard_liters, 0.0);
}

TEST(Endurance, HalvingTankVolumeHalvesEndurance) {
  Config config = default_config();
  config.tank.pressure = 3000.0;  // short run
  const MetricsReport full = run_endurance(config, spec_for(ExperimentKind::endurance));
  config.tank.volume_liters *= 0.5;
  const MetricsReport half = run_endurance(config, spec_for(ExperimentKind::endurance));
  ASSERT_LT(*full.endurance_s, config.endurance.duration_cap);
  EXPECT_NEAR(*half.endurance_s / *full.endurance_s, 0.5, 0.025);
}

TEST(Compliance, UniformProfileIsNearlyIsotropic) {
  Config config = default_config();
  config.compliance.demo_pa = config.compliance.uniform_pa;
  const MetricsReport r = run_compliance_demo(config, spec_for(ExperimentKind::compliance_demo));
  EXPECT_GE(r.displacement_ratio, 0.8);
  EXPECT_LE(r.displacement_ratio, 1.25);
}

TEST(Compliance, ZeroForceGivesZeroDisplacement) {
  Config config = default_config();
  config.compliance.force = 0.0;
  const MetricsReport r = run_compliance_demo(config, spec_for(ExperimentKind::compliance_demo));
  EXPECT_EQ(r.displacement_soft_mm, 0.0);
  EXPECT_EQ(r.displacement_stiff_mm, 0.0);
}

TEST(Experiments, CsvIsByteIdenticalAcrossRuns) {
  const Config config = default_config();
  for (auto kind : {ExperimentKind::step_response, ExperimentKind::payload_sweep}) {
    const auto spec = spec_for(kind, 3.0);
    EXPECT_EQ(run_experiment(config, spec).csv, run_experiment(config, spec).csv) << to_string(kind);
  }
}

TEST(Experiments, WritesCsvAndSummary) {
  const auto dir = std::filesystem::temp_directory_path() / "umarm_experiment_outputs";
  std::filesystem::remove_all(dir);
  ExperimentSpec spec = spec_for(ExperimentKind::step_response, 2.0);
  spec.output_dir = dir;
  const MetricsReport r = run_experiment(default_config(), spec);
  std::ifstream csv(dir / "step.csv"), txt(dir / "step_summary.txt");
  ASSERT_TRUE(csv && txt);
  std::stringstream a, b;
  a << csv.rdbuf();
  b << txt.rdbuf();
  EXPECT_EQ(a.str(), r.csv);
  EXPECT_EQ(b.str(), r.summary);
  EXPECT_EQ(r.csv.rfind("# umarm-csv v1", 0), 0u);
  std::filesystem::remove_all(dir);
}

TEST(Experiments, RejectsBadSpecs) {
  const Config config = default_config();
  ExperimentSpec spec = spec_for(ExperimentKind::step_response, -1.0);
  EXPECT_THROW(run_experiment(config, spec), ExperimentError);
  spec = spec_for(ExperimentKind::step_response);
  spec.profile = "nope";
  EXPECT_THROW(run_experiment(config, spec), ConfigError);
}
