// Command-line front end for the UMArm experiments.

#include <CLI11.hpp>
#include <fmt/format.h>

#include <future>
#include <iostream>
#include <optional>

#include "umarm/batch.hpp"
#include "umarm/errors.hpp"
#include "umarm/experiments.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kConfig = 2, kExperiment = 3, kSimulation = 4, kInternal = 5 };

struct Options {
  std::string config_path;
  std::optional<std::string> profile;
  std::string out = "out";
  std::uint64_t seed = 0;
  std::optional<double> duration;
  bool quiet = false;
};

umarm::Config load(const Options& opt) {
  return opt.config_path.empty() ? umarm::default_config() : umarm::load_config(opt.config_path);
}

umarm::ExperimentSpec make_spec(const Options& opt, const umarm::Config& config,
                                umarm::ExperimentKind kind) {
  umarm::ExperimentSpec spec;
  spec.kind = kind;
  spec.profile = opt.profile.value_or(config.default_profile);
  spec.duration = opt.duration;
  spec.seed = opt.seed;
  spec.output_dir = opt.out;
  return spec;
}

int run_one(const Options& opt, umarm::ExperimentKind kind) {
  const umarm::Config config = load(opt);
  const umarm::MetricsReport report = umarm::run_experiment(config, make_spec(opt, config, kind));
  if (!opt.quiet) std::cout << report.summary;
  return kOk;
}

int run_all(const Options& opt) {
  const umarm::Config config = load(opt);
  const std::vector<umarm::ExperimentKind> kinds = {
      umarm::ExperimentKind::step_response, umarm::ExperimentKind::waypoints,
      umarm::ExperimentKind::payload_sweep, umarm::ExperimentKind::compliance_demo,
      umarm::ExperimentKind::endurance};
  // Independent simulations, one worker thread each.
  std::vector<std::future<umarm::MetricsReport>> jobs;
  for (auto kind : kinds) {
    jobs.push_back(std::async(std::launch::async, [&, kind] {
      return umarm::run_experiment(config, make_spec(opt, config, kind));
    }));
  }
  for (auto& job : jobs) {
    const umarm::MetricsReport report = job.get();
    if (!opt.quiet) std::cout << report.summary << "\n";
  }
  return kOk;
}

int run_ik_check(const Options& opt, const std::vector<double>& target, int random_targets) {
  const umarm::Config config = load(opt);
  std::vector<umarm::Vec3> targets;
  std::vector<std::string> labels;
  if (!target.empty()) {
    targets.emplace_back(target[0], target[1], target[2]);
    labels.push_back("target");
  } else {
    for (std::size_t k = 0; k < config.waypoints.size(); ++k) {
      targets.push_back(config.waypoints[k].position);
      labels.push_back(fmt::format("waypoint {}", k));
    }
    const auto samples = umarm::sample_joint_vectors(config.arm.limits, random_targets, opt.seed);
    const auto poses = umarm::batch_fk(config.arm, samples);
    for (std::size_t k = 0; k < poses.size(); ++k) {
      targets.push_back(poses[k].translation());
      labels.push_back(fmt::format("random {}", k));
    }
  }

  const auto results =
      umarm::batch_solve_ik(config.arm, umarm::JointVector::Zero(), targets, config.ik);
  // Named targets must all solve; random ones need a 95% success rate.
  int named_failures = 0, random_failures = 0, random_count = 0;
  for (std::size_t k = 0; k < results.size(); ++k) {
    const auto& r = results[k];
    const bool ok = r.converged && config.arm.limits.contains(r.theta);
    const bool random = labels[k].rfind("random", 0) == 0;
    random_count += random ? 1 : 0;
    (random ? random_failures : named_failures) += ok ? 0 : 1;
    if (!opt.quiet || !ok) {
      fmt::print("{:<12} ({:+.4f}, {:+.4f}, {:+.4f}) m: {} after {} iterations, residual {:.2e} m\n",
                 labels[k], targets[k].x(), targets[k].y(), targets[k].z(),
                 ok ? "converged" : "FAILED", r.iterations, r.residual);
    }
  }
  const int failures = named_failures + random_failures;
  fmt::print("{} of {} targets solved\n", results.size() - failures, results.size());
  if (named_failures > 0) {
    throw umarm::ExperimentError(fmt::format("IK did not converge for {} named target(s)", named_failures));
  }
  if (random_failures > 0.05 * random_count) {
    throw umarm::ExperimentError(
        fmt::format("IK converged on only {} of {} random targets", random_count - random_failures, random_count));
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"UMArm kinematics, control and simulation experiments"};
  app.require_subcommand(0, 1);

  Options opt;
  bool dump_config = false;
  app.add_option("--config", opt.config_path, "YAML configuration file")->check(CLI::ExistingFile);
  app.add_option("--profile", opt.profile, "Control profile name");
  app.add_option("--out", opt.out, "Output directory for CSV and summaries");
  app.add_option("--seed", opt.seed, "Seed for randomized inputs");
  app.add_option("--duration", opt.duration, "Override the experiment duration (s)")
      ->check(CLI::PositiveNumber);
  app.add_flag("-q,--quiet", opt.quiet, "Do not print summaries");
  app.add_flag("--dump-config", dump_config, "Print the effective configuration as YAML");

  struct Sub {
    const char* name;
    const char* help;
    umarm::ExperimentKind kind;
  };
  const std::vector<Sub> subs = {
      {"step", "Joint step response under the 6/12/18 s schedule", umarm::ExperimentKind::step_response},
      {"waypoints", "Eight-waypoint traversal with IK targets", umarm::ExperimentKind::waypoints},
      {"payload", "Tip droop across payloads at one-sided max pressure", umarm::ExperimentKind::payload_sweep},
      {"endurance", "Waypoint cycling until the air tank runs out", umarm::ExperimentKind::endurance},
      {"compliance", "Directional compliance demo", umarm::ExperimentKind::compliance_demo},
  };
  std::vector<std::pair<CLI::App*, umarm::ExperimentKind>> experiment_cmds;
  for (const auto& s : subs) experiment_cmds.emplace_back(app.add_subcommand(s.name, s.help), s.kind);
  CLI::App* all = app.add_subcommand("all", "Run every experiment in parallel");

  CLI::App* ik = app.add_subcommand("ik-check", "Check IK convergence on waypoints and random targets");
  std::vector<double> target;
  int random_targets = 100;
  ik->add_option("--target", target, "Single target x y z (m)")->expected(3);
  ik->add_option("--random", random_targets, "Number of random reachable targets")
      ->check(CLI::NonNegativeNumber);

  CLI11_PARSE(app, argc, argv);

  try {
    if (dump_config) {
      std::cout << umarm::to_yaml(load(opt));
      return kOk;
    }
    for (const auto& [cmd, kind] : experiment_cmds) {
      if (cmd->parsed()) return run_one(opt, kind);
    }
    if (all->parsed()) return run_all(opt);
    if (ik->parsed()) return run_ik_check(opt, target, random_targets);
    std::cerr << app.help();
    return kUsage;
  } catch (const umarm::ConfigError& e) {
    std::cerr << "error [config]: " << e.what() << "\n";
    return kConfig;
  } catch (const umarm::ExperimentError& e) {
    std::cerr << "error [experiment]: " << e.what() << "\n";
    return kExperiment;
  } catch (const umarm::SimulationFault& e) {
    std::cerr << "error [simulation]: " << e.what() << "\n";
    return kSimulation;
  } catch (const umarm::Error& e) {
    std::cerr << "error [model]: " << e.what() << "\n";
    return kExperiment;
  } catch (const std::exception& e) {
    std::cerr << "error [internal]: " << e.what() << "\n";
    return kInternal;
  }
}
