#pragma once

// Deterministic fixed-step plant: decoupled per-joint rigid dynamics driven
// by antagonistic actuator torque, exact gravity from the lumped masses,
// pressure-dependent damping and hard stops; on-off valve pressure dynamics;
// isothermal compressed-air tank.

#include <array>
#include <string>

#include "umarm/actuation.hpp"
#include "umarm/arm_model.hpp"

namespace umarm {

inline constexpr double kAtmosphere = 101.325;  // kPa
inline constexpr double kGravity = 9.81;        // m/s^2

enum class ValveState { hold, fill, vent };

struct ActuatorState {
  double pressure = 0.0;  // kPa
  ValveState valve = ValveState::hold;
  double target_pressure = 0.0;
};

struct ValveParams {
  double tau_fill = 0.080;  // s
  double tau_vent = 0.120;  // s
  double deadband = 3.0;    // kPa
};

/// Bang-bang valve with deadband: fill toward `supply` while below
/// target - deadband, vent toward 0 while above target + deadband. Each phase
/// is integrated exactly and stops on the band edge inside the step.
ActuatorState pressure_dynamics_step(const ActuatorState& act, double supply, double dt,
                                     const ValveParams& valve = {});

enum class Integrator { semi_implicit_euler, velocity_verlet };

struct SimConfig {
  double dt = 1e-3;
  /// Per-joint inertia; zeros mean "derive from the lumped masses at rest".
  JointVector joint_inertia = JointVector::Zero();
  double inertia_floor = 2e-4;       // kg m^2 added to derived inertias
  double damping_base = 0.004;       // c0, N m s / rad
  double damping_pressure = 5e-3;    // c_p, N m s / (rad kPa)
  ValveParams valve;
  double payload_mass = 0.0;         // kg at the tool frame
  double hard_stop_margin = 0.03490658503988659;  // 2 degrees past the joint limit
  double supply_pressure = kSupplyPressure;
  bool gravity = true;
  Integrator integrator = Integrator::velocity_verlet;

  void validate() const;
};

struct TankState {
  double volume_liters = 1.11;
  double pressure = 31000.0;            // kPa
  double regulator_setpoint = kSupplyPressure;
  bool supply_failed = false;
  bool unlimited = false;

  /// Standard liters still deliverable above the regulator setpoint.
  double usable_standard_liters() const;
  /// Pressure the regulator can deliver.
  double supply_pressure() const;
};

/// Isothermal accounting: removes `flow` standard liters per second for dt.
TankState tank_step(const TankState& tank, double flow, double dt);

struct PlantState {
  JointVector theta = JointVector::Zero();
  JointVector velocity = JointVector::Zero();
  std::array<ActuatorState, kActuatorCount> actuators{};
  double time = 0.0;
};

/// Per-step bookkeeping that tests and experiments read back.
struct StepDiagnostics {
  double damping_power = 0.0;        // W, sum over joints (always <= 0)
  double fill_standard_liters = 0.0;  // air drawn from the supply this step
  int hard_stop_contacts = 0;
};

/// Everything needed to advance the plant, bundled once.
class Plant {
 public:
  Plant(ArmGeometry arm, ActuatorConfig actuators, SimConfig config);

  const ArmGeometry& arm() const { return arm_; }
  const SimConfig& config() const { return config_; }
  const std::array<AntagonisticJoint, kJointCount>& joints() const { return joints_; }
  const JointVector& inertia() const { return inertia_; }
  const ActuatorConfig& actuator_config() const { return actuator_config_; }

  /// Gravity torque -dU/dtheta for the lumped masses plus `payload` at the tool.
  JointVector gravity_torques(const JointVector& theta, double payload) const;
  double potential_energy(const JointVector& theta, double payload) const;
  double mechanical_energy(const PlantState& state) const;

  /// Net joint torque excluding damping and hard stops.
  JointVector drive_torques(const JointVector& theta, const PressureVector& pressures,
                            const Vec3& tip_force) const;

  /// Advance by one dt. Throws SimulationFault on non-finite state.
  PlantState step(const PlantState& state, const PressureVector& commands,
                  double supply_pressure, StepDiagnostics* diag = nullptr,
                  const Vec3& tip_force = Vec3::Zero()) const;

  PressureVector pressures(const PlantState& state) const;
  /// Viscous coefficient per joint, c0 + cp * min(p1, p2).
  JointVector damping(const PressureVector& pressures) const;

 private:
  JointVector accelerations(const JointVector& theta, const PressureVector& pressures,
                            const Vec3& tip_force) const;

  ArmGeometry arm_;
  ActuatorConfig actuator_config_;
  SimConfig config_;
  std::array<AntagonisticJoint, kJointCount> joints_;
  JointVector inertia_;
};

/// Inertia about each joint axis of every downstream lumped mass and the
/// payload, at the rest posture.
JointVector rest_inertia(const ArmGeometry& arm, double payload, double floor);

std::string to_string(ValveState v);

}  // namespace umarm
