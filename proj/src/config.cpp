#include "umarm/config.hpp"

#include <yaml-cpp/yaml.h>

#include <fmt/format.h>

#include <fstream>
#include <set>
#include <sstream>

#include "umarm/errors.hpp"

namespace umarm {

namespace {

// Reader that remembers where it is so errors name the offending key.
class Reader {
 public:
  Reader(YAML::Node node, std::string path)
      : node_(std::move(node)), path_(std::move(path)), present_(node_ && !node_.IsNull()) {
    if (present_ && !node_.IsMap()) fail("expected a mapping");
  }

  bool has(const char* key) const { return present_ && node_[key]; }

  Reader child(const char* key) const { return Reader(raw(key), sub(key)); }
  YAML::Node raw(const char* key) const { return present_ ? node_[key] : YAML::Node(); }
  std::string sub(const char* key) const { return path_.empty() ? key : path_ + "." + key; }

  /// Rejects keys outside `allowed`, which catches misspellings.
  void only(std::initializer_list<const char*> allowed) const {
    if (!present_) return;
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& kv : node_) {
      const std::string k = kv.first.as<std::string>();
      if (!ok.count(k)) fail(fmt::format("unknown key '{}'", k));
    }
  }

  template <typename T>
  void get(const char* key, T& out) const {
    if (!has(key)) return;
    try {
      out = node_[key].as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(fmt::format("{}: malformed value", sub(key)));
    }
  }

  void get_vec3(const char* key, Vec3& out) const {
    if (!has(key)) return;
    out = as_vec3(node_[key], sub(key));
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ConfigError(fmt::format("{}: {}", path_.empty() ? "config" : path_, msg));
  }

  static Vec3 as_vec3(const YAML::Node& n, const std::string& where) {
    const std::vector<double> v = as_list(n, where);
    if (v.size() != 3) throw ConfigError(where + ": expected 3 numbers");
    return Vec3(v[0], v[1], v[2]);
  }

  static std::vector<double> as_list(const YAML::Node& n, const std::string& where) {
    if (!n.IsSequence()) throw ConfigError(where + ": expected a list");
    try {
      return n.as<std::vector<double>>();
    } catch (const YAML::Exception&) {
      throw ConfigError(where + ": expected numbers");
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  bool present_;
};

// 3 values expand per segment, 12 values are per joint.
JointVector per_joint(const YAML::Node& n, const std::string& where) {
  const std::vector<double> v = Reader::as_list(n, where);
  JointVector out;
  if (v.size() == kSegmentCount) {
    for (int i = 0; i < kJointCount; ++i) out[i] = v[i / kJointsPerSegment];
  } else if (v.size() == kJointCount) {
    for (int i = 0; i < kJointCount; ++i) out[i] = v[i];
  } else {
    throw ConfigError(fmt::format("{}: expected {} or {} numbers", where, kSegmentCount, kJointCount));
  }
  return out;
}

PidGains read_gains(const Reader& r, PidGains g) {
  r.only({"kp", "ki", "kd", "integral_clamp", "output_clamp"});
  r.get("kp", g.kp);
  r.get("ki", g.ki);
  r.get("kd", g.kd);
  r.get("integral_clamp", g.integral_clamp);
  r.get("output_clamp", g.output_clamp);
  return g;
}

void read_geometry(const Reader& r, ArmGeometry& arm) {
  r.only({"segments", "offsets", "base_segment_scale", "joint_limit", "lower_limits",
          "upper_limits", "masses"});
  if (r.has("segments")) {
    const YAML::Node segs = r.raw("segments");
    if (!segs.IsSequence() || segs.size() != kSegmentCount) {
      r.fail(fmt::format("segments: expected {} entries", kSegmentCount));
    }
    for (int s = 0; s < kSegmentCount; ++s) {
      const Reader seg(segs[s], fmt::format("{}[{}]", r.sub("segments"), s));
      seg.only({"upper_plate_half_height", "rod_length", "lower_plate_half_height",
                "lever_arm_radius", "actuator_mounted_length"});
      SegmentGeometry& g = arm.segments[s];
      double upper = g.upper_plate_half_height, rod = g.rod_length;
      double lower = g.lower_plate_half_height, lever = g.lever_arm_radius;
      double mounted = g.actuator_rest_length;
      seg.get("upper_plate_half_height", upper);
      seg.get("rod_length", rod);
      seg.get("lower_plate_half_height", lower);
      seg.get("lever_arm_radius", lever);
      seg.get("actuator_mounted_length", mounted);
      g = SegmentGeometry::standard(upper, rod, lower, lever, mounted);
    }
  }
  if (r.has("offsets")) {
    const YAML::Node offs = r.raw("offsets");
    if (!offs.IsSequence() || offs.size() != kSegmentCount - 1) {
      r.fail(fmt::format("offsets: expected {} translations", kSegmentCount - 1));
    }
    for (int k = 0; k < kSegmentCount - 1; ++k) {
      arm.offsets[k] = Pose::translation(Reader::as_vec3(offs[k], r.sub("offsets")));
    }
  }
  r.get("base_segment_scale", arm.base_segment_scale);
  if (r.has("joint_limit")) {
    double limit = 0.0;
    r.get("joint_limit", limit);
    arm.limits = JointLimits::symmetric(limit);
  }
  if (r.has("lower_limits")) arm.limits.lower = per_joint(r.raw("lower_limits"), r.sub("lower_limits"));
  if (r.has("upper_limits")) arm.limits.upper = per_joint(r.raw("upper_limits"), r.sub("upper_limits"));
  if (r.has("masses")) {
    const YAML::Node ms = r.raw("masses");
    if (!ms.IsSequence()) r.fail("masses: expected a list");
    arm.masses.clear();
    for (std::size_t k = 0; k < ms.size(); ++k) {
      const Reader m(ms[k], fmt::format("{}[{}]", r.sub("masses"), k));
      m.only({"body", "position", "mass"});
      LumpedMass lump;
      m.get("body", lump.body);
      m.get_vec3("position", lump.position);
      m.get("mass", lump.mass);
      if (lump.body < 0 || lump.body >= kBodyCount) m.fail("body index out of range");
      if (!(lump.mass >= 0.0)) m.fail("mass must be >= 0");
      arm.masses.push_back(lump);
    }
  }
}

void read_actuators(const Reader& r, ActuatorConfig& a) {
  r.only({"force_gain", "max_contraction", "min_pressure", "max_pressure", "attachment_angle",
          "full_contraction_angle", "base_force_scale", "valve_volume_liters"});
  r.get("force_gain", a.mckibben.force_gain);
  r.get("max_contraction", a.mckibben.max_contraction);
  r.get("min_pressure", a.mckibben.min_pressure);
  r.get("max_pressure", a.mckibben.max_pressure);
  r.get("attachment_angle", a.attachment_angle);
  r.get("full_contraction_angle", a.full_contraction_angle);
  r.get("base_force_scale", a.base_force_scale);
  r.get("valve_volume_liters", a.valve_volume_liters);
}

void read_sim(const Reader& r, SimConfig& s) {
  r.only({"dt", "joint_inertia", "inertia_floor", "damping_base", "damping_pressure", "tau_fill",
          "tau_vent", "deadband", "payload_mass", "hard_stop_margin", "supply_pressure", "gravity",
          "integrator"});
  r.get("dt", s.dt);
  if (r.has("joint_inertia")) s.joint_inertia = per_joint(r.raw("joint_inertia"), r.sub("joint_inertia"));
  r.get("inertia_floor", s.inertia_floor);
  r.get("damping_base", s.damping_base);
  r.get("damping_pressure", s.damping_pressure);
  r.get("tau_fill", s.valve.tau_fill);
  r.get("tau_vent", s.valve.tau_vent);
  r.get("deadband", s.valve.deadband);
  r.get("payload_mass", s.payload_mass);
  r.get("hard_stop_margin", s.hard_stop_margin);
  r.get("supply_pressure", s.supply_pressure);
  r.get("gravity", s.gravity);
  if (r.has("integrator")) {
    std::string name;
    r.get("integrator", name);
    if (name == "velocity_verlet") {
      s.integrator = Integrator::velocity_verlet;
    } else if (name == "semi_implicit_euler") {
      s.integrator = Integrator::semi_implicit_euler;
    } else {
      r.fail("integrator must be velocity_verlet or semi_implicit_euler");
    }
  }
}

void read_ik(const Reader& r, IkParams& p) {
  r.only({"max_iters", "position_tolerance", "damping", "step_scale", "null_gain", "wln_enabled"});
  r.get("max_iters", p.max_iters);
  r.get("position_tolerance", p.position_tolerance);
  r.get("damping", p.damping);
  r.get("step_scale", p.step_scale);
  r.get("null_gain", p.null_gain);
  r.get("wln_enabled", p.wln_enabled);
}

ControlProfile read_profile(const Reader& r) {
  r.only({"name", "p_a", "gains", "joint_gains", "derate", "derate_gamma", "rate_hz"});
  ControlProfile p;
  r.get("name", p.name);
  if (p.name.empty()) r.fail("profile needs a name");
  if (!r.has("p_a")) r.fail("profile needs p_a");
  p.stiffness.p_a = per_joint(r.raw("p_a"), r.sub("p_a"));
  p.gains.fill(read_gains(r.child("gains"), PidGains{}));
  if (r.has("joint_gains")) {
    const YAML::Node jg = r.raw("joint_gains");
    if (!jg.IsSequence() || jg.size() != kJointCount) {
      r.fail(fmt::format("joint_gains: expected {} entries", kJointCount));
    }
    for (int i = 0; i < kJointCount; ++i) {
      p.gains[i] = read_gains(Reader(jg[i], fmt::format("{}[{}]", r.sub("joint_gains"), i)), p.gains[i]);
    }
  }
  r.get("derate", p.derate);
  r.get("derate_gamma", p.derate_gamma);
  r.get("rate_hz", p.rate_hz);
  return p;
}

void read_tank(const Reader& r, TankState& t) {
  r.only({"volume_liters", "pressure", "regulator_setpoint", "unlimited"});
  r.get("volume_liters", t.volume_liters);
  r.get("pressure", t.pressure);
  r.get("regulator_setpoint", t.regulator_setpoint);
  r.get("unlimited", t.unlimited);
}

void read_experiments(const Reader& r, Config& c) {
  r.only({"default_profile", "log_decimation", "step", "payload", "compliance", "endurance"});
  r.get("default_profile", c.default_profile);
  r.get("log_decimation", c.log_decimation);

  const Reader step = r.child("step");
  step.only({"duration", "switch_times", "targets"});
  step.get("duration", c.step.duration);
  step.get("switch_times", c.step.switch_times);
  step.get("targets", c.step.targets);

  const Reader pay = r.child("payload");
  pay.only({"payloads", "settle", "average_window", "bending_joints"});
  pay.get("payloads", c.payload.payloads);
  pay.get("settle", c.payload.settle);
  pay.get("average_window", c.payload.average_window);
  pay.get("bending_joints", c.payload.bending_joints);

  const Reader comp = r.child("compliance");
  comp.only({"force", "stiff_direction", "soft_direction", "posture", "uniform_p_a", "demo_p_a",
             "settle", "average_window"});
  comp.get("force", c.compliance.force);
  comp.get_vec3("stiff_direction", c.compliance.stiff_direction);
  comp.get_vec3("soft_direction", c.compliance.soft_direction);
  if (comp.has("posture")) c.compliance.posture = per_joint(comp.raw("posture"), comp.sub("posture"));
  if (comp.has("uniform_p_a")) {
    c.compliance.uniform_pa = per_joint(comp.raw("uniform_p_a"), comp.sub("uniform_p_a"));
  }
  if (comp.has("demo_p_a")) c.compliance.demo_pa = per_joint(comp.raw("demo_p_a"), comp.sub("demo_p_a"));
  comp.get("settle", c.compliance.settle);
  comp.get("average_window", c.compliance.average_window);

  const Reader end = r.child("endurance");
  end.only({"interval", "duration_cap", "unlimited_tank"});
  end.get("interval", c.endurance.interval);
  end.get("duration_cap", c.endurance.duration_cap);
  end.get("unlimited_tank", c.endurance.unlimited_tank);
}

// Eight points on two horizontal squares below the base, inside the
// reachable shell of the default geometry (checked by IK in the tests).
std::vector<Waypoint> default_waypoints() {
  const std::array<Vec3, 8> pts = {
      Vec3(0.025, 0.025, -0.290), Vec3(-0.025, 0.025, -0.290), Vec3(-0.025, -0.025, -0.290),
      Vec3(0.025, -0.025, -0.290), Vec3(0.040, 0.040, -0.284), Vec3(-0.040, 0.040, -0.284),
      Vec3(-0.040, -0.040, -0.284), Vec3(0.040, -0.040, -0.284)};
  std::vector<Waypoint> out;
  for (const Vec3& p : pts) out.push_back({p, 5.0});
  return out;
}

// Emitter helpers: round-trippable doubles, flow-style short lists.
std::string num(double v) { return fmt::format("{}", v); }

void emit_list(YAML::Emitter& e, const std::vector<double>& v) {
  e << YAML::Flow << YAML::BeginSeq;
  for (double x : v) e << num(x);
  e << YAML::EndSeq;
}

void emit_vec3(YAML::Emitter& e, const Vec3& v) { emit_list(e, {v.x(), v.y(), v.z()}); }

void emit_joints(YAML::Emitter& e, const JointVector& v) {
  bool by_segment = true;
  for (int i = 0; i < kJointCount; ++i) by_segment &= v[i] == v[(i / kJointsPerSegment) * kJointsPerSegment];
  std::vector<double> out;
  if (by_segment) {
    for (int s = 0; s < kSegmentCount; ++s) out.push_back(v[s * kJointsPerSegment]);
  } else {
    out.assign(v.data(), v.data() + kJointCount);
  }
  emit_list(e, out);
}

void emit_gains(YAML::Emitter& e, const PidGains& g) {
  e << YAML::Flow << YAML::BeginMap;
  e << YAML::Key << "kp" << YAML::Value << num(g.kp);
  e << YAML::Key << "ki" << YAML::Value << num(g.ki);
  e << YAML::Key << "kd" << YAML::Value << num(g.kd);
  e << YAML::Key << "integral_clamp" << YAML::Value << num(g.integral_clamp);
  e << YAML::Key << "output_clamp" << YAML::Value << num(g.output_clamp);
  e << YAML::EndMap;
}

bool same_gains(const PidGains& a, const PidGains& b) {
  return a.kp == b.kp && a.ki == b.ki && a.kd == b.kd && a.integral_clamp == b.integral_clamp &&
         a.output_clamp == b.output_clamp;
}

}  // namespace

const ControlProfile& Config::profile(const std::string& name) const {
  for (const auto& p : profiles) {
    if (p.name == name) return p;
  }
  std::string known;
  for (const auto& p : profiles) known += (known.empty() ? "" : ", ") + p.name;
  throw ConfigError(fmt::format("unknown profile '{}' (known: {})", name, known));
}

void Config::validate() const {
  try {
    arm.validate();
    actuators.mckibben.validate();
    for (const auto& j : actuators.joints(arm)) j.validate();
    sim.validate();
    ik.validate();
    for (const auto& p : profiles) p.validate();
  } catch (const InputError& e) {
    throw ConfigError(e.what());
  }
  if (profiles.empty()) throw ConfigError("at least one control profile is required");
  std::set<std::string> names;
  for (const auto& p : profiles) {
    if (!names.insert(p.name).second) throw ConfigError("duplicate profile '" + p.name + "'");
  }
  profile(default_profile);
  for (const auto& w : waypoints) {
    if (!w.position.allFinite() || !(w.dwell > 0.0)) {
      throw ConfigError("waypoints need finite positions and positive dwell");
    }
  }
  if (!(tank.volume_liters > 0.0) || !(tank.pressure >= 0.0) || !(tank.regulator_setpoint > 0.0)) {
    throw ConfigError("tank volume, pressure and regulator setpoint must be positive");
  }
  if (!(step.duration > 0.0) || step.switch_times.size() != step.targets.size()) {
    throw ConfigError("step schedule needs a positive duration and one target per switch");
  }
  for (std::size_t k = 1; k < step.switch_times.size(); ++k) {
    if (!(step.switch_times[k] > step.switch_times[k - 1])) {
      throw ConfigError("step switch times must increase");
    }
  }
  for (double p : payload.payloads) {
    if (!(p >= 0.0)) throw ConfigError("payloads must be >= 0");
  }
  for (int j : payload.bending_joints) {
    if (j < 0 || j >= kJointCount) throw ConfigError("bending joint index out of range");
  }
  if (!(payload.settle > 0.0) || !(payload.average_window > 0.0)) {
    throw ConfigError("payload settle and averaging windows must be positive");
  }
  if (!(compliance.settle > 0.0) || !(compliance.average_window > 0.0) ||
      !(compliance.force >= 0.0)) {
    throw ConfigError("compliance demo needs positive windows and force >= 0");
  }
  if (compliance.stiff_direction.norm() == 0.0 || compliance.soft_direction.norm() == 0.0) {
    throw ConfigError("compliance probe directions must be nonzero");
  }
  if (!(endurance.interval > 0.0) || !(endurance.duration_cap > 0.0)) {
    throw ConfigError("endurance interval and cap must be positive");
  }
  if (log_decimation < 1) throw ConfigError("log_decimation must be >= 1");
}

Config default_config() {
  Config c;
  c.waypoints = default_waypoints();
  // Stiff along y: joints turning about x (which move the tip along y) and
  // the diagonal joints hold 138 kPa; joints turning about y drop to 14 kPa.
  for (int s = 0; s < kSegmentCount; ++s) {
    c.compliance.demo_pa.segment<4>(4 * s) << 138.0, 14.0, 138.0, 138.0;
  }
  return c;
}

Config parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(fmt::format("YAML syntax error: {}", e.what()));
  }
  if (!root || !root.IsMap()) throw ConfigError("config must be a YAML mapping");
  const Reader r(root, "");
  r.only({"schema_version", "geometry", "actuators", "simulation", "ik", "profiles", "waypoints",
          "tank", "experiments"});
  if (!r.has("schema_version")) throw ConfigError("schema_version is required");
  int version = 0;
  r.get("schema_version", version);
  if (version != kConfigSchemaVersion) {
    throw ConfigError(fmt::format("unsupported schema_version {} (expected {})", version,
                                  kConfigSchemaVersion));
  }

  Config c = default_config();
  read_geometry(r.child("geometry"), c.arm);
  read_actuators(r.child("actuators"), c.actuators);
  read_sim(r.child("simulation"), c.sim);
  read_ik(r.child("ik"), c.ik);
  if (r.has("profiles")) {
    const YAML::Node ps = r.raw("profiles");
    if (!ps.IsSequence()) r.fail("profiles: expected a list");
    c.profiles.clear();
    for (std::size_t k = 0; k < ps.size(); ++k) {
      c.profiles.push_back(read_profile(Reader(ps[k], fmt::format("profiles[{}]", k))));
    }
  }
  if (r.has("waypoints")) {
    const YAML::Node ws = r.raw("waypoints");
    if (!ws.IsSequence()) r.fail("waypoints: expected a list");
    c.waypoints.clear();
    for (std::size_t k = 0; k < ws.size(); ++k) {
      const Reader w(ws[k], fmt::format("waypoints[{}]", k));
      w.only({"position", "dwell"});
      Waypoint wp;
      if (!w.has("position")) w.fail("waypoint needs a position");
      w.get_vec3("position", wp.position);
      w.get("dwell", wp.dwell);
      c.waypoints.push_back(wp);
    }
  }
  read_tank(r.child("tank"), c.tank);
  read_experiments(r.child("experiments"), c);
  c.validate();
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::string to_yaml(const Config& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "schema_version" << YAML::Value << kConfigSchemaVersion;

  e << YAML::Key << "geometry" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "segments" << YAML::Value << YAML::BeginSeq;
  for (const auto& g : c.arm.segments) {
    e << YAML::BeginMap;
    e << YAML::Key << "upper_plate_half_height" << YAML::Value << num(g.upper_plate_half_height);
    e << YAML::Key << "rod_length" << YAML::Value << num(g.rod_length);
    e << YAML::Key << "lower_plate_half_height" << YAML::Value << num(g.lower_plate_half_height);
    e << YAML::Key << "lever_arm_radius" << YAML::Value << num(g.lever_arm_radius);
    e << YAML::Key << "actuator_mounted_length" << YAML::Value << num(g.actuator_rest_length);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::Key << "offsets" << YAML::Value << YAML::BeginSeq;
  for (const auto& o : c.arm.offsets) emit_vec3(e, o.translation());
  e << YAML::EndSeq;
  e << YAML::Key << "base_segment_scale" << YAML::Value << num(c.arm.base_segment_scale);
  e << YAML::Key << "lower_limits" << YAML::Value;
  emit_joints(e, c.arm.limits.lower);
  e << YAML::Key << "upper_limits" << YAML::Value;
  emit_joints(e, c.arm.limits.upper);
  e << YAML::Key << "masses" << YAML::Value << YAML::BeginSeq;
  for (const auto& m : c.arm.masses) {
    e << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "body" << YAML::Value << m.body;
    e << YAML::Key << "position" << YAML::Value;
    emit_vec3(e, m.position);
    e << YAML::Key << "mass" << YAML::Value << num(m.mass);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;
  e << YAML::EndMap;

  const ActuatorConfig& a = c.actuators;
  e << YAML::Key << "actuators" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "force_gain" << YAML::Value << num(a.mckibben.force_gain);
  e << YAML::Key << "max_contraction" << YAML::Value << num(a.mckibben.max_contraction);
  e << YAML::Key << "min_pressure" << YAML::Value << num(a.mckibben.min_pressure);
  e << YAML::Key << "max_pressure" << YAML::Value << num(a.mckibben.max_pressure);
  e << YAML::Key << "attachment_angle" << YAML::Value << num(a.attachment_angle);
  e << YAML::Key << "full_contraction_angle" << YAML::Value << num(a.full_contraction_angle);
  e << YAML::Key << "base_force_scale" << YAML::Value << num(a.base_force_scale);
  e << YAML::Key << "valve_volume_liters" << YAML::Value << num(a.valve_volume_liters);
  e << YAML::EndMap;

  const SimConfig& s = c.sim;
  e << YAML::Key << "simulation" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "dt" << YAML::Value << num(s.dt);
  e << YAML::Key << "joint_inertia" << YAML::Value;
  emit_joints(e, s.joint_inertia);
  e << YAML::Key << "inertia_floor" << YAML::Value << num(s.inertia_floor);
  e << YAML::Key << "damping_base" << YAML::Value << num(s.damping_base);
  e << YAML::Key << "damping_pressure" << YAML::Value << num(s.damping_pressure);
  e << YAML::Key << "tau_fill" << YAML::Value << num(s.valve.tau_fill);
  e << YAML::Key << "tau_vent" << YAML::Value << num(s.valve.tau_vent);
  e << YAML::Key << "deadband" << YAML::Value << num(s.valve.deadband);
  e << YAML::Key << "payload_mass" << YAML::Value << num(s.payload_mass);
  e << YAML::Key << "hard_stop_margin" << YAML::Value << num(s.hard_stop_margin);
  e << YAML::Key << "supply_pressure" << YAML::Value << num(s.supply_pressure);
  e << YAML::Key << "gravity" << YAML::Value << s.gravity;
  e << YAML::Key << "integrator" << YAML::Value
    << (s.integrator == Integrator::velocity_verlet ? "velocity_verlet" : "semi_implicit_euler");
  e << YAML::EndMap;

  e << YAML::Key << "ik" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "max_iters" << YAML::Value << c.ik.max_iters;
  e << YAML::Key << "position_tolerance" << YAML::Value << num(c.ik.position_tolerance);
  e << YAML::Key << "damping" << YAML::Value << num(c.ik.damping);
  e << YAML::Key << "step_scale" << YAML::Value << num(c.ik.step_scale);
  e << YAML::Key << "null_gain" << YAML::Value << num(c.ik.null_gain);
  e << YAML::Key << "wln_enabled" << YAML::Value << c.ik.wln_enabled;
  e << YAML::EndMap;

  e << YAML::Key << "profiles" << YAML::Value << YAML::BeginSeq;
  for (const auto& p : c.profiles) {
    e << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << p.name;
    e << YAML::Key << "p_a" << YAML::Value;
    emit_joints(e, p.stiffness.p_a);
    e << YAML::Key << "gains" << YAML::Value;
    emit_gains(e, p.gains[0]);
    bool uniform = true;
    for (const auto& g : p.gains) uniform &= same_gains(g, p.gains[0]);
    if (!uniform) {
      e << YAML::Key << "joint_gains" << YAML::Value << YAML::BeginSeq;
      for (const auto& g : p.gains) emit_gains(e, g);
      e << YAML::EndSeq;
    }
    e << YAML::Key << "derate" << YAML::Value << p.derate;
    e << YAML::Key << "derate_gamma" << YAML::Value << num(p.derate_gamma);
    e << YAML::Key << "rate_hz" << YAML::Value << num(p.rate_hz);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;

  e << YAML::Key << "waypoints" << YAML::Value << YAML::BeginSeq;
  for (const auto& w : c.waypoints) {
    e << YAML::Flow << YAML::BeginMap;
    e << YAML::Key << "position" << YAML::Value;
    emit_vec3(e, w.position);
    e << YAML::Key << "dwell" << YAML::Value << num(w.dwell);
    e << YAML::EndMap;
  }
  e << YAML::EndSeq;

  e << YAML::Key << "tank" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "volume_liters" << YAML::Value << num(c.tank.volume_liters);
  e << YAML::Key << "pressure" << YAML::Value << num(c.tank.pressure);
  e << YAML::Key << "regulator_setpoint" << YAML::Value << num(c.tank.regulator_setpoint);
  e << YAML::Key << "unlimited" << YAML::Value << c.tank.unlimited;
  e << YAML::EndMap;

  e << YAML::Key << "experiments" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "default_profile" << YAML::Value << c.default_profile;
  e << YAML::Key << "log_decimation" << YAML::Value << c.log_decimation;
  e << YAML::Key << "step" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "duration" << YAML::Value << num(c.step.duration);
  e << YAML::Key << "switch_times" << YAML::Value;
  emit_list(e, c.step.switch_times);
  e << YAML::Key << "targets" << YAML::Value;
  emit_list(e, c.step.targets);
  e << YAML::EndMap;
  e << YAML::Key << "payload" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "payloads" << YAML::Value;
  emit_list(e, c.payload.payloads);
  e << YAML::Key << "settle" << YAML::Value << num(c.payload.settle);
  e << YAML::Key << "average_window" << YAML::Value << num(c.payload.average_window);
  e << YAML::Key << "bending_joints" << YAML::Value << YAML::Flow << c.payload.bending_joints;
  e << YAML::EndMap;
  const ComplianceDemo& d = c.compliance;
  e << YAML::Key << "compliance" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "force" << YAML::Value << num(d.force);
  e << YAML::Key << "stiff_direction" << YAML::Value;
  emit_vec3(e, d.stiff_direction);
  e << YAML::Key << "soft_direction" << YAML::Value;
  emit_vec3(e, d.soft_direction);
  e << YAML::Key << "posture" << YAML::Value;
  emit_joints(e, d.posture);
  e << YAML::Key << "uniform_p_a" << YAML::Value;
  emit_joints(e, d.uniform_pa);
  e << YAML::Key << "demo_p_a" << YAML::Value;
  emit_joints(e, d.demo_pa);
  e << YAML::Key << "settle" << YAML::Value << num(d.settle);
  e << YAML::Key << "average_window" << YAML::Value << num(d.average_window);
  e << YAML::EndMap;
  e << YAML::Key << "endurance" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "interval" << YAML::Value << num(c.endurance.interval);
  e << YAML::Key << "duration_cap" << YAML::Value << num(c.endurance.duration_cap);
  e << YAML::Key << "unlimited_tank" << YAML::Value << c.endurance.unlimited_tank;
  e << YAML::EndMap;
  e << YAML::EndMap;

  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

}  // namespace umarm
