#include "umarm/experiments.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <numbers>

#include "umarm/errors.hpp"

namespace umarm {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;

// Controller, plant and tank advanced together on the simulated clock.
class ClosedLoop {
 public:
  ClosedLoop(const Config& config, const ControlProfile& profile, SimConfig sim, TankState tank)
      : config_(config),
        plant_(config.arm, config.actuators, sim),
        controller_(profile, config.arm.limits),
        tank_(tank) {
    const double period = 1.0 / profile.rate_hz;
    decimation_ = std::max(1, static_cast<int>(std::lround(period / sim.dt)));
    target_.setZero();
    commands_ = balanced_pressures(profile.stiffness.p_a);
    for (int a = 0; a < kActuatorCount; ++a) {
      state_.actuators[a].pressure = commands_[a];
      state_.actuators[a].target_pressure = commands_[a];
    }
  }

  static PressureVector balanced_pressures(const JointVector& p_a) {
    PressureVector p;
    for (int i = 0; i < kJointCount; ++i) p[2 * i] = p[2 * i + 1] = p_a[i];
    return p;
  }

  void set_target(const JointVector& target) { target_ = target; }
  const JointVector& target() const { return target_; }
  const PlantState& state() const { return state_; }
  const TankState& tank() const { return tank_; }
  const Plant& plant() const { return plant_; }
  std::int64_t steps() const { return steps_; }
  double air_used() const { return air_used_; }
  double max_damping_power() const { return max_damping_power_; }
  int hard_stop_contacts() const { return contacts_; }

  /// Holds fixed actuator targets instead of running the controller.
  void set_open_loop(const PressureVector& pressures) {
    open_loop_ = true;
    commands_ = pressures;
  }

  void preset_pressures(const PressureVector& pressures) {
    for (int a = 0; a < kActuatorCount; ++a) {
      state_.actuators[a].pressure = pressures[a];
      state_.actuators[a].target_pressure = pressures[a];
    }
  }

  void step(const Vec3& tip_force = Vec3::Zero()) {
    if (!open_loop_ && steps_ % decimation_ == 0) {
      const KinematicState kin = evaluate(plant_.arm(), state_.theta);
      const JointVector measured = measure_joint_angles(plant_.arm(), kin.bodies);
      commands_ = controller_.step(measured, target_, decimation_ * plant_.config().dt);
    }
    StepDiagnostics diag;
    state_ = plant_.step(state_, commands_, tank_.supply_pressure(), &diag, tip_force);
    tank_ = tank_step(tank_, diag.fill_standard_liters / plant_.config().dt, plant_.config().dt);
    air_used_ += diag.fill_standard_liters;
    max_damping_power_ = std::max(max_damping_power_, diag.damping_power);
    contacts_ += diag.hard_stop_contacts;
    ++steps_;
  }

  std::string csv_row() const {
    std::string row = fmt::format("{:.6f}", state_.time);
    for (int i = 0; i < kJointCount; ++i) row += fmt::format(",{:.9g}", state_.theta[i]);
    for (int i = 0; i < kJointCount; ++i) row += fmt::format(",{:.9g}", state_.velocity[i]);
    for (int a = 0; a < kActuatorCount; ++a) {
      row += fmt::format(",{:.6f}", state_.actuators[a].pressure);
    }
    row += fmt::format(",{:.3f}\n", tank_.pressure);
    return row;
  }

 private:
  const Config& config_;
  Plant plant_;
  JointController controller_;
  TankState tank_;
  PlantState state_;
  JointVector target_;
  PressureVector commands_;
  int decimation_ = 1;
  bool open_loop_ = false;
  std::int64_t steps_ = 0;
  double air_used_ = 0.0;
  double max_damping_power_ = -std::numeric_limits<double>::infinity();
  int contacts_ = 0;
};

void fill_bookkeeping(MetricsReport& report, const ClosedLoop& loop) {
  report.simulated_time = loop.state().time;
  report.max_damping_power = std::max(report.max_damping_power, loop.max_damping_power());
  report.hard_stop_contacts += loop.hard_stop_contacts();
}

std::string format_optional(const std::optional<double>& v, const char* none) {
  return v ? fmt::format("{:.3f} s", *v) : std::string(none);
}

double duration_or(const ExperimentSpec& spec, double fallback) {
  return spec.duration.value_or(fallback);
}

// Joint targets for each waypoint, chained from the previous solution.
std::vector<JointVector> solve_waypoints(const Config& config,
                                         const std::vector<Waypoint>& waypoints) {
  // Every waypoint is solved from the rest posture, so joint targets do not
  // depend on visit order or drift toward the limits over a cycle.
  std::vector<JointVector> out;
  for (std::size_t k = 0; k < waypoints.size(); ++k) {
    const IkResult r =
        solve_position_ik(config.arm, JointVector::Zero(), waypoints[k].position, config.ik);
    if (!r.converged) {
      throw ExperimentError(fmt::format(
          "IK did not converge for waypoint {} ({:.4f}, {:.4f}, {:.4f}); residual {:.3e} m", k,
          waypoints[k].position.x(), waypoints[k].position.y(), waypoints[k].position.z(),
          r.residual));
    }
    out.push_back(r.theta);
  }
  return out;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::step_response:
      return "step";
    case ExperimentKind::waypoints:
      return "waypoints";
    case ExperimentKind::payload_sweep:
      return "payload";
    case ExperimentKind::endurance:
      return "endurance";
    case ExperimentKind::compliance_demo:
      return "compliance";
  }
  return "unknown";
}

void ExperimentSpec::validate(const Config& config) const {
  config.profile(profile);
  if (duration && !(*duration > 0.0)) throw ExperimentError("duration must be positive");
  if (kind == ExperimentKind::waypoints && config.waypoints.empty()) {
    throw ExperimentError("waypoint experiment needs at least one waypoint");
  }
}

std::optional<double> settling_time(const std::vector<double>& times,
                                    const std::vector<double>& signal, double target,
                                    double amplitude, double band) {
  if (times.empty() || times.size() != signal.size()) {
    throw InputError("settling_time needs matching, nonempty series");
  }
  const double tol = band * std::abs(amplitude);
  std::size_t last_out = signal.size();
  for (std::size_t k = signal.size(); k-- > 0;) {
    if (std::abs(signal[k] - target) > tol) {
      last_out = k;
      break;
    }
  }
  if (last_out == signal.size()) return 0.0;
  if (last_out + 1 >= signal.size()) return std::nullopt;
  return times[last_out + 1] - times.front();
}

std::string trajectory_csv_header() {
  std::string h = "# umarm-csv v1: time, theta[12] (rad), velocity[12] (rad/s), pressure[24] (kPa), tank (kPa)\n";
  h += "time";
  for (int i = 0; i < kJointCount; ++i) h += fmt::format(",theta_{}", i);
  for (int i = 0; i < kJointCount; ++i) h += fmt::format(",velocity_{}", i);
  for (int a = 0; a < kActuatorCount; ++a) h += fmt::format(",pressure_{}", a);
  h += ",tank\n";
  return h;
}

MetricsReport run_step_response(const Config& config, const ExperimentSpec& spec) {
  spec.validate(config);
  const ControlProfile& profile = config.profile(spec.profile);
  const StepSchedule& schedule = config.step;
  const double duration = duration_or(spec, schedule.duration);

  TankState tank = config.tank;
  tank.unlimited = true;
  ClosedLoop loop(config, profile, config.sim, tank);

  MetricsReport report;
  report.kind = ExperimentKind::step_response;
  report.profile = profile.name;
  report.csv = trajectory_csv_header();

  // Segments of the schedule: [start, end) with a constant target.
  std::vector<double> bounds = {0.0};
  std::vector<double> levels = {0.0};
  for (std::size_t k = 0; k < schedule.switch_times.size(); ++k) {
    if (schedule.switch_times[k] >= duration) break;
    bounds.push_back(schedule.switch_times[k]);
    levels.push_back(schedule.targets[k]);
  }
  bounds.push_back(duration);

  const double dt = config.sim.dt;
  const auto total_steps = static_cast<std::int64_t>(std::llround(duration / dt));
  double sq_error = 0.0;
  std::int64_t samples = 0;

  std::vector<double> times;
  std::array<std::vector<double>, kJointCount> signals;
  std::size_t segment = 0;

  auto close_segment = [&](std::size_t seg) {
    if (seg == 0) return;  // the enable segment starts at its target
    const double target = levels[seg];
    const double amplitude = target - levels[seg - 1];
    std::optional<double> worst = 0.0;
    for (int i = 0; i < kJointCount && worst; ++i) {
      const auto s = settling_time(times, signals[i], target, amplitude);
      worst = s ? std::optional<double>(std::max(*worst, *s)) : std::nullopt;
      for (double v : signals[i]) {
        const double past = amplitude > 0.0 ? v - target : target - v;
        report.max_overshoot = std::max(report.max_overshoot, past);
      }
    }
    report.transition_times.push_back(bounds[seg]);
    report.settling_times.push_back(worst);
  };

  for (std::int64_t n = 0; n < total_steps; ++n) {
    const double t = n * dt;
    while (segment + 1 < levels.size() && t >= bounds[segment + 1] - 1e-12) {
      close_segment(segment);
      ++segment;
      times.clear();
      for (auto& s : signals) s.clear();
    }
    loop.set_target(JointVector::Constant(levels[segment]));
    loop.step();

    const PlantState& st = loop.state();
    times.push_back(st.time);
    for (int i = 0; i < kJointCount; ++i) signals[i].push_back(st.theta[i]);
    sq_error += (loop.target() - st.theta).squaredNorm();
    ++samples;
    if (loop.steps() % config.log_decimation == 0) report.csv += loop.csv_row();
  }
  close_segment(segment);

  report.joint_rmse_deg = std::sqrt(sq_error / (samples * kJointCount)) * kRadToDeg;
  fill_bookkeeping(report, loop);

  std::string s = fmt::format("step response, profile {}\n", profile.name);
  s += fmt::format("duration {:.1f} s, controller {:.0f} Hz, plant dt {:.4f} s\n", duration,
                   profile.rate_hz, dt);
  for (std::size_t k = 0; k < report.settling_times.size(); ++k) {
    s += fmt::format("switch at {:.1f} s: 5% settling {}\n", report.transition_times[k],
                     format_optional(report.settling_times[k], "does not settle"));
  }
  s += fmt::format("whole-run joint RMSE {:.3f} deg\n", report.joint_rmse_deg);
  s += fmt::format("worst overshoot {:.4f} rad\n", report.max_overshoot);
  report.summary = s;
  return report;
}

MetricsReport run_waypoints(const Config& config, const ExperimentSpec& spec) {
  spec.validate(config);
  const ControlProfile& profile = config.profile(spec.profile);
  const std::vector<JointVector> targets = solve_waypoints(config, config.waypoints);

  TankState tank = config.tank;
  tank.unlimited = true;
  ClosedLoop loop(config, profile, config.sim, tank);

  MetricsReport report;
  report.kind = ExperimentKind::waypoints;
  report.profile = profile.name;
  report.csv = trajectory_csv_header();

  const double dt = config.sim.dt;
  constexpr double kWindow = 2.0;  // trailing seconds of each dwell
  double total_sq = 0.0;
  std::int64_t total_samples = 0;

  for (std::size_t k = 0; k < config.waypoints.size(); ++k) {
    const Waypoint& wp = config.waypoints[k];
    const double dwell = spec.duration ? *spec.duration : wp.dwell;
    loop.set_target(targets[k]);
    const auto steps = static_cast<std::int64_t>(std::llround(dwell / dt));
    const auto window_start = steps - static_cast<std::int64_t>(std::llround(std::min(kWindow, dwell) / dt));
    double sq = 0.0;
    std::int64_t n_window = 0;
    for (std::int64_t n = 0; n < steps; ++n) {
      loop.step();
      if (n >= window_start) {
        const Vec3 tip = robot_fk(config.arm, loop.state().theta).translation();
        sq += (tip - wp.position).squaredNorm();
        ++n_window;
      }
      if (loop.steps() % config.log_decimation == 0) report.csv += loop.csv_row();
    }
    report.waypoint_errors_mm.push_back(std::sqrt(sq / n_window) * 1e3);
    total_sq += sq;
    total_samples += n_window;
    ++report.waypoints_visited;
  }
  report.endeffector_rmse_mm = std::sqrt(total_sq / total_samples) * 1e3;
  fill_bookkeeping(report, loop);

  std::string s = fmt::format("waypoint traversal, profile {}, {} waypoints\n", profile.name,
                              config.waypoints.size());
  for (std::size_t k = 0; k < report.waypoint_errors_mm.size(); ++k) {
    const Vec3& p = config.waypoints[k].position;
    s += fmt::format("waypoint {} ({:.4f}, {:.4f}, {:.4f}) m: RMSE over last 2 s {:.3f} mm\n", k,
                     p.x(), p.y(), p.z(), report.waypoint_errors_mm[k]);
  }
  s += fmt::format("aggregate end-effector RMSE {:.3f} mm\n", report.endeffector_rmse_mm);
  report.summary = s;
  return report;
}

MetricsReport run_payload_sweep(const Config& config, const ExperimentSpec& spec) {
  spec.validate(config);
  const ControlProfile& profile = config.profile(spec.profile);
  const PayloadSweep& sweep = config.payload;
  const double settle = duration_or(spec, sweep.settle);

  MetricsReport report;
  report.kind = ExperimentKind::payload_sweep;
  report.profile = profile.name;
  report.payloads = sweep.payloads;
  report.csv = "# umarm-csv v1: payload sweep, one-sided max pressure\n";
  report.csv += "payload_kg,tip_x,tip_y,tip_z,droop_mm\n";

  // Bending joints pull with full supply on side 1 and vent side 2; the rest
  // hold the profile's balanced antagonistic pressure.
  PressureVector commands = ClosedLoop::balanced_pressures(profile.stiffness.p_a);
  for (int j : sweep.bending_joints) {
    commands[2 * j] = config.sim.supply_pressure;
    commands[2 * j + 1] = 0.0;
  }

  std::optional<Vec3> reference;
  const double dt = config.sim.dt;
  for (double payload : sweep.payloads) {
    if (payload < 0.0) throw ExperimentError("payloads must be >= 0");
    SimConfig sim = config.sim;
    sim.payload_mass = payload;
    TankState tank = config.tank;
    tank.unlimited = true;
    ClosedLoop loop(config, profile, sim, tank);
    loop.set_open_loop(commands);

    const auto steps = static_cast<std::int64_t>(std::llround(settle / dt));
    const auto window = static_cast<std::int64_t>(std::llround(std::min(sweep.average_window, settle) / dt));
    Vec3 tip_sum = Vec3::Zero();
    for (std::int64_t n = 0; n < steps; ++n) {
      loop.step();
      if (n >= steps - window) tip_sum += robot_fk(config.arm, loop.state().theta).translation();
    }
    const Vec3 tip = tip_sum / static_cast<double>(window);
    if (!reference) reference = tip;
    const double droop = (tip - *reference).norm() * 1e3;
    report.droop_mm.push_back(droop);
    report.csv += fmt::format("{:.6g},{:.9g},{:.9g},{:.9g},{:.9g}\n", payload, tip.x(), tip.y(),
                              tip.z(), droop);
    fill_bookkeeping(report, loop);
  }

  std::string s = fmt::format("payload sweep, one-sided max pressure on joints");
  for (int j : sweep.bending_joints) s += fmt::format(" {}", j);
  s += "\n";
  for (std::size_t k = 0; k < report.payloads.size(); ++k) {
    s += fmt::format("payload {:.2f} kg: droop {:.3f} mm\n", report.payloads[k], report.droop_mm[k]);
  }
  report.summary = s;
  return report;
}

MetricsReport run_endurance(const Config& config, const ExperimentSpec& spec) {
  spec.validate(config);
  const ControlProfile& profile = config.profile(spec.profile);
  const EnduranceSettings& settings = config.endurance;
  const double cap = duration_or(spec, settings.duration_cap);
  if (config.waypoints.empty()) throw ExperimentError("endurance needs the waypoint cycle");
  const std::vector<JointVector> targets = solve_waypoints(config, config.waypoints);

  TankState tank = config.tank;
  tank.unlimited = tank.unlimited || settings.unlimited_tank;
  ClosedLoop loop(config, profile, config.sim, tank);

  MetricsReport report;
  report.kind = ExperimentKind::endurance;
  report.profile = profile.name;
  report.csv = trajectory_csv_header();

  const double dt = config.sim.dt;
  const auto per_waypoint = static_cast<std::int64_t>(std::llround(settings.interval / dt));
  const auto cap_steps = static_cast<std::int64_t>(std::llround(cap / dt));
  // Trajectory rows are thinned so an hour-long run stays readable.
  const std::int64_t log_every = std::max<std::int64_t>(config.log_decimation, 100);

  std::size_t next = 0;
  bool depleted = false;
  for (std::int64_t n = 0; n < cap_steps; ++n) {
    if (n % per_waypoint == 0) {
      loop.set_target(targets[next]);
      next = (next + 1) % targets.size();
      ++report.waypoints_visited;
    }
    loop.step();
    if (loop.steps() % log_every == 0) report.csv += loop.csv_row();
    if (loop.tank().supply_failed) {
      depleted = true;
      break;
    }
  }
  report.endurance_s = loop.state().time;
  report.air_used_standard_liters = loop.air_used();
  fill_bookkeeping(report, loop);

  std::string s = fmt::format("untethered endurance, profile {}\n", profile.name);
  s += tank.unlimited ? std::string("tank: unlimited supply\n")
                      : fmt::format("tank: {:.3f} L at {:.0f} kPa, regulator {:.0f} kPa\n",
                                    tank.volume_liters, tank.pressure, tank.regulator_setpoint);
  s += fmt::format("{} after {:.1f} s, {} waypoints commanded at {:.1f} s intervals\n",
                   depleted ? "supply failed" : "duration cap reached", *report.endurance_s,
                   report.waypoints_visited, settings.interval);
  s += fmt::format("air used {:.2f} standard L\n", report.air_used_standard_liters);
  report.summary = s;
  return report;
}

MetricsReport run_compliance_demo(const Config& config, const ExperimentSpec& spec) {
  spec.validate(config);
  const ComplianceDemo& demo = config.compliance;
  const double settle = duration_or(spec, demo.settle);
  const Vec3 stiff = demo.stiff_direction.normalized();
  const Vec3 soft = demo.soft_direction.normalized();
  if (std::abs(stiff.dot(soft)) > 1e-9) {
    throw ExperimentError("compliance probe directions must be orthogonal");
  }

  MetricsReport report;
  report.kind = ExperimentKind::compliance_demo;
  report.profile = "compliance-demo";

  // Analytic compliance from the actuator stiffness at the demo posture.
  Plant plant(config.arm, config.actuators, config.sim);
  JointVector k;
  for (int i = 0; i < kJointCount; ++i) {
    k[i] = joint_stiffness(plant.joints()[i], demo.posture[i], demo.demo_pa[i], demo.demo_pa[i]);
  }
  if ((k.array() > 0.0).all()) {
    const Eigen::Matrix3d c = task_space_compliance(config.arm, demo.posture, k);
    const double along_stiff = stiff.dot(c * stiff);
    const double along_soft = soft.dot(c * soft);
    report.analytic_ratio = along_stiff > 0.0 ? along_soft / along_stiff : 0.0;
    report.compliance_singular = !(along_stiff > 0.0);
  } else {
    report.compliance_singular = true;
  }

  // Simulated probe: hold pressures open loop, settle with and without the
  // tip force, compare mean tip positions.
  const double dt = config.sim.dt;
  auto probe = [&](const Vec3& force) {
    TankState tank = config.tank;
    tank.unlimited = true;
    ControlProfile holding = config.profiles.front();
    holding.stiffness.p_a = demo.demo_pa;
    ClosedLoop loop(config, holding, config.sim, tank);
    const PressureVector p = ClosedLoop::balanced_pressures(demo.demo_pa);
    loop.set_open_loop(p);
    loop.preset_pressures(p);
    const auto steps = static_cast<std::int64_t>(std::llround(settle / dt));
    const auto window = static_cast<std::int64_t>(std::llround(std::min(demo.average_window, settle) / dt));
    Vec3 sum = Vec3::Zero();
    for (std::int64_t n = 0; n < steps; ++n) {
      loop.step(force);
      if (n >= steps - window) sum += robot_fk(config.arm, loop.state().theta).translation();
    }
    fill_bookkeeping(report, loop);
    return Vec3(sum / static_cast<double>(window));
  };

  const Vec3 base = probe(Vec3::Zero());
  const Vec3 d_stiff = probe(demo.force * stiff) - base;
  const Vec3 d_soft = probe(demo.force * soft) - base;
  report.displacement_stiff_mm = d_stiff.norm() * 1e3;
  report.displacement_soft_mm = d_soft.norm() * 1e3;
  report.displacement_ratio =
      report.displacement_stiff_mm > 0.0 ? report.displacement_soft_mm / report.displacement_stiff_mm : 0.0;
  if (!(report.displacement_stiff_mm > 0.0)) report.compliance_singular = true;

  report.csv = "# umarm-csv v1: directional compliance probe\n";
  report.csv += "direction,force_n,dx_mm,dy_mm,dz_mm,magnitude_mm\n";
  report.csv += fmt::format("stiff,{:.6g},{:.9g},{:.9g},{:.9g},{:.9g}\n", demo.force,
                            d_stiff.x() * 1e3, d_stiff.y() * 1e3, d_stiff.z() * 1e3,
                            report.displacement_stiff_mm);
  report.csv += fmt::format("soft,{:.6g},{:.9g},{:.9g},{:.9g},{:.9g}\n", demo.force,
                            d_soft.x() * 1e3, d_soft.y() * 1e3, d_soft.z() * 1e3,
                            report.displacement_soft_mm);

  std::string s = "directional compliance demo\n";
  s += fmt::format("tip force {:.3f} N\n", demo.force);
  s += fmt::format("stiff direction ({:.3f}, {:.3f}, {:.3f}): {:.4f} mm\n", stiff.x(), stiff.y(),
                   stiff.z(), report.displacement_stiff_mm);
  s += fmt::format("soft direction ({:.3f}, {:.3f}, {:.3f}): {:.4f} mm\n", soft.x(), soft.y(),
                   soft.z(), report.displacement_soft_mm);
  s += fmt::format("simulated displacement ratio {:.3f}, analytic {:.3f}{}\n",
                   report.displacement_ratio, report.analytic_ratio,
                   report.compliance_singular ? " (singular)" : "");
  report.summary = s;
  return report;
}

MetricsReport run_experiment(const Config& config, const ExperimentSpec& spec) {
  MetricsReport report;
  switch (spec.kind) {
    case ExperimentKind::step_response:
      report = run_step_response(config, spec);
      break;
    case ExperimentKind::waypoints:
      report = run_waypoints(config, spec);
      break;
    case ExperimentKind::payload_sweep:
      report = run_payload_sweep(config, spec);
      break;
    case ExperimentKind::endurance:
      report = run_endurance(config, spec);
      break;
    case ExperimentKind::compliance_demo:
      report = run_compliance_demo(config, spec);
      break;
  }
  if (!spec.output_dir.empty()) write_outputs(report, spec.output_dir);
  return report;
}

void write_outputs(const MetricsReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string stem = to_string(report.kind);
  {
    std::ofstream csv(dir / (stem + ".csv"), std::ios::binary);
    if (!csv) throw ExperimentError("cannot write " + (dir / (stem + ".csv")).string());
    csv << report.csv;
  }
  std::ofstream txt(dir / (stem + "_summary.txt"), std::ios::binary);
  if (!txt) throw ExperimentError("cannot write " + (dir / (stem + "_summary.txt")).string());
  txt << report.summary;
}

}  // namespace umarm
