#include "umarm/plant.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "umarm/errors.hpp"

namespace umarm {

namespace {

// Number of joints upstream of a body (see point_jacobian).
int active_joints(int body) { return (body / 3) * kJointsPerSegment + (body % 3) * 2; }

}  // namespace

std::string to_string(ValveState v) {
  switch (v) {
    case ValveState::fill:
      return "fill";
    case ValveState::vent:
      return "vent";
    case ValveState::hold:
      break;
  }
  return "hold";
}

ActuatorState pressure_dynamics_step(const ActuatorState& act, double supply, double dt,
                                     const ValveParams& valve) {
  ActuatorState out = act;
  const double p = act.pressure;
  const double fill_stop = act.target_pressure - valve.deadband;
  const double vent_stop = act.target_pressure + valve.deadband;

  if (p < fill_stop && p < supply) {
    // p(t) = S - (S - p0) exp(-t / tau_fill), halted on the band edge.
    out.valve = ValveState::fill;
    if (fill_stop < supply) {
      const double t_hit = valve.tau_fill * std::log((supply - p) / (supply - fill_stop));
      if (t_hit <= dt) {
        out.pressure = fill_stop;
        out.valve = ValveState::hold;
      } else {
        out.pressure = supply - (supply - p) * std::exp(-dt / valve.tau_fill);
      }
    } else {
      out.pressure = supply - (supply - p) * std::exp(-dt / valve.tau_fill);
    }
  } else if (p > vent_stop) {
    out.valve = ValveState::vent;
    const double t_hit = valve.tau_vent * std::log(p / vent_stop);
    if (t_hit <= dt) {
      out.pressure = vent_stop;
      out.valve = ValveState::hold;
    } else {
      out.pressure = p * std::exp(-dt / valve.tau_vent);
    }
  } else {
    out.valve = ValveState::hold;
  }
  out.pressure = std::clamp(out.pressure, 0.0, std::max(supply, 0.0));
  return out;
}

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw InputError("simulation dt must be positive");
  if (!(joint_inertia.array() >= 0.0).all()) throw InputError("joint inertia must be >= 0");
  if (!(inertia_floor >= 0.0)) throw InputError("inertia floor must be >= 0");
  if (!(damping_base >= 0.0) || !(damping_pressure >= 0.0)) {
    throw InputError("damping coefficients must be >= 0");
  }
  if (!(valve.tau_fill > 0.0) || !(valve.tau_vent > 0.0) || !(valve.deadband >= 0.0)) {
    throw InputError("valve time constants must be positive and deadband >= 0");
  }
  if (!(payload_mass >= 0.0)) throw InputError("payload must be >= 0");
}

double TankState::usable_standard_liters() const {
  if (unlimited) return std::numeric_limits<double>::infinity();
  return std::max(0.0, volume_liters * (pressure - regulator_setpoint) / kAtmosphere);
}

double TankState::supply_pressure() const {
  if (unlimited) return regulator_setpoint;
  return std::clamp(pressure, 0.0, regulator_setpoint);
}

TankState tank_step(const TankState& tank, double flow, double dt) {
  if (!(flow >= 0.0)) throw InputError("tank flow must be >= 0");
  TankState out = tank;
  if (tank.unlimited) return out;
  out.pressure = std::max(0.0, tank.pressure - flow * dt * kAtmosphere / tank.volume_liters);
  out.supply_failed = tank.supply_failed || out.pressure <= tank.regulator_setpoint;
  return out;
}

JointVector rest_inertia(const ArmGeometry& arm, double payload, double floor) {
  const KinematicState rest = evaluate(arm, JointVector::Zero());
  JointVector inertia = JointVector::Constant(floor);

  auto add = [&](int upstream, const Vec3& x, double mass) {
    for (int i = 0; i < upstream; ++i) {
      const Vec3 w = rest.spatial_jacobian.col(i).tail<3>();
      const Vec3 q = w.cross(Vec3(rest.spatial_jacobian.col(i).head<3>()));
      const Vec3 r = x - q;
      inertia[i] += mass * (r - r.dot(w) * w).squaredNorm();
    }
  };
  for (const auto& lump : arm.masses) {
    add(active_joints(lump.body), rest.bodies[lump.body].apply(lump.position), lump.mass);
  }
  if (payload > 0.0) add(kJointCount, rest.tool.translation(), payload);
  return inertia;
}

Plant::Plant(ArmGeometry arm, ActuatorConfig actuators, SimConfig config)
    : arm_(std::move(arm)), actuator_config_(std::move(actuators)), config_(std::move(config)) {
  arm_.validate();
  config_.validate();
  joints_ = actuator_config_.joints(arm_);
  for (const auto& j : joints_) j.validate();
  inertia_ = rest_inertia(arm_, config_.payload_mass, config_.inertia_floor);
  for (int i = 0; i < kJointCount; ++i) {
    if (config_.joint_inertia[i] > 0.0) inertia_[i] = config_.joint_inertia[i];
  }
}

JointVector Plant::gravity_torques(const JointVector& theta, double payload) const {
  const KinematicState st = evaluate(arm_, theta);
  JointVector tau = JointVector::Zero();

  // tau_i = -dU/dtheta_i = -sum_k m_k g * (dz_k/dtheta_i)
  auto add = [&](int upstream, const Vec3& x, double mass) {
    for (int i = 0; i < upstream; ++i) {
      const auto col = st.spatial_jacobian.col(i);
      const double dz = col[2] + (col.tail<3>().cross(x))[2];
      tau[i] -= mass * kGravity * dz;
    }
  };
  for (const auto& lump : arm_.masses) {
    add(active_joints(lump.body), st.bodies[lump.body].apply(lump.position), lump.mass);
  }
  if (payload > 0.0) add(kJointCount, st.tool.translation(), payload);
  return tau;
}

double Plant::potential_energy(const JointVector& theta, double payload) const {
  const KinematicState st = evaluate(arm_, theta);
  double u = 0.0;
  for (const auto& lump : arm_.masses) {
    u += lump.mass * kGravity * st.bodies[lump.body].apply(lump.position).z();
  }
  u += payload * kGravity * st.tool.translation().z();
  return u;
}

double Plant::mechanical_energy(const PlantState& state) const {
  const double kinetic = 0.5 * (inertia_.array() * state.velocity.array().square()).sum();
  const double potential = config_.gravity ? potential_energy(state.theta, config_.payload_mass)
                                           : 0.0;
  return kinetic + potential;
}

PressureVector Plant::pressures(const PlantState& state) const {
  PressureVector p;
  for (int a = 0; a < kActuatorCount; ++a) p[a] = state.actuators[a].pressure;
  return p;
}

JointVector Plant::drive_torques(const JointVector& theta, const PressureVector& pressures,
                                 const Vec3& tip_force) const {
  JointVector tau;
  for (int i = 0; i < kJointCount; ++i) {
    tau[i] = pair_torque(joints_[i], theta[i], pressures[2 * i], pressures[2 * i + 1]);
  }
  if (config_.gravity) tau += gravity_torques(theta, config_.payload_mass);
  if (!tip_force.isZero()) tau += position_jacobian(arm_, theta).transpose() * tip_force;
  return tau;
}

JointVector Plant::accelerations(const JointVector& theta, const PressureVector& pressures,
                                 const Vec3& tip_force) const {
  return drive_torques(theta, pressures, tip_force).cwiseQuotient(inertia_);
}

JointVector Plant::damping(const PressureVector& pressures) const {
  JointVector c;
  for (int i = 0; i < kJointCount; ++i) {
    c[i] = config_.damping_base +
           config_.damping_pressure * std::min(pressures[2 * i], pressures[2 * i + 1]);
  }
  return c;
}

PlantState Plant::step(const PlantState& state, const PressureVector& commands,
                       double supply_pressure, StepDiagnostics* diag,
                       const Vec3& tip_force) const {
  PlantState next = state;
  double fill = 0.0;
  for (int a = 0; a < kActuatorCount; ++a) {
    ActuatorState act = state.actuators[a];
    act.target_pressure = std::clamp(commands[a], 0.0, config_.supply_pressure);
    next.actuators[a] = pressure_dynamics_step(act, supply_pressure, config_.dt, config_.valve);
    fill += std::max(0.0, next.actuators[a].pressure - state.actuators[a].pressure);
  }
  const PressureVector p = pressures(next);

  // Damping is split off and integrated exactly, half a step on each side of
  // the conservative update, so stiff damping cannot destabilize the step.
  const double dt = config_.dt;
  const JointVector c = damping(p);
  const JointVector decay = (-0.5 * dt * c.cwiseQuotient(inertia_)).array().exp().matrix();
  const JointVector v0 = state.velocity.cwiseProduct(decay);

  JointVector v1;
  if (config_.integrator == Integrator::semi_implicit_euler) {
    v1 = v0 + dt * accelerations(state.theta, p, tip_force);
    next.theta = state.theta + dt * v1;
  } else {
    const JointVector half = v0 + 0.5 * dt * accelerations(state.theta, p, tip_force);
    next.theta = state.theta + dt * half;
    v1 = half + 0.5 * dt * accelerations(next.theta, p, tip_force);
  }
  next.velocity = v1.cwiseProduct(decay);

  // Mean power of the damping torque: kinetic energy removed by the two
  // exact decay half steps, over dt.
  double damping_power = 0.0;
  for (int i = 0; i < kJointCount; ++i) {
    const double lost = (state.velocity[i] * state.velocity[i] - v0[i] * v0[i]) +
                        (v1[i] * v1[i] - next.velocity[i] * next.velocity[i]);
    damping_power -= 0.5 * inertia_[i] * lost / dt;
  }

  int contacts = 0;
  for (int i = 0; i < kJointCount; ++i) {
    const double hi = arm_.limits.upper[i] + config_.hard_stop_margin;
    const double lo = arm_.limits.lower[i] - config_.hard_stop_margin;
    if (next.theta[i] > hi) {
      next.theta[i] = hi;
      next.velocity[i] = std::min(0.0, next.velocity[i]);
      ++contacts;
    } else if (next.theta[i] < lo) {
      next.theta[i] = lo;
      next.velocity[i] = std::max(0.0, next.velocity[i]);
      ++contacts;
    }
  }
  next.time = state.time + dt;

  if (!next.theta.allFinite() || !next.velocity.allFinite()) {
    throw SimulationFault("non-finite joint state at t = " + std::to_string(next.time) + " s");
  }
  if (diag) {
    diag->damping_power = damping_power;
    diag->fill_standard_liters =
        fill * actuator_config_.valve_volume_liters / kAtmosphere;
    diag->hard_stop_contacts = contacts;
  }
  return next;
}

}  // namespace umarm
