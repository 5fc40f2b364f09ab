#pragma once

#include <functional>
#include <optional>

#include "edgar/dynamics/params.hpp"

namespace edgar::dynamics {

/// Planar body state. Position and heading are in the world frame, velocities
/// in the body frame at the CG.
struct VehicleState {
  double x = 0.0;        // [m]
  double y = 0.0;        // [m]
  double psi = 0.0;      // [rad]
  double v_x = 0.0;      // [m/s]
  double v_y = 0.0;      // [m/s]
  double psi_dot = 0.0;  // [rad/s]

  bool is_finite() const;
  friend bool operator==(const VehicleState&, const VehicleState&) = default;
};

/// Time derivative of every VehicleState component, same layout.
using StateRate = VehicleState;

struct DriveInput {
  double delta = 0.0;      // road-wheel angle [rad]
  double F_x_drive = 0.0;  // net drive/brake force at the wheels [N]
};

struct SlipAngles {
  double front = 0.0;  // [rad]
  double rear = 0.0;   // [rad]
};

struct ResistanceForces {
  double drag = 0.0;  // [N]
  double roll = 0.0;  // [N]
};

/// Forces actually applied in one derivative evaluation.
struct AxleForces {
  double F_x_f = 0.0;  // after friction clipping
  double F_x_r = 0.0;
  double F_y_f = 0.0;  // after combined-slip scaling
  double F_y_r = 0.0;
};

/// Slip angles of the single-track model; empty below `low_speed_guard`,
/// where the caller has to fall back to kinematic derivatives.
std::optional<SlipAngles> slip_angles(const VehicleState& state, double delta, const VehicleParams& params,
                                      double low_speed_guard = 0.5);

ResistanceForces resistance_forces(const VehicleState& state, const VehicleParams& params);

class SingleTrackModel {
 public:
  struct Options {
    double low_speed_guard = 0.5;         // [m/s]
    double max_dt = 0.01;                 // [s]
    double kinematic_relaxation = 0.05;   // [s] pull of v_y, psi_dot toward the kinematic values below the guard
  };

  SingleTrackModel(VehicleParams params, AxleTires tires);
  SingleTrackModel(VehicleParams params, AxleTires tires, Options options);

  const VehicleParams& params() const { return params_; }
  const AxleTires& tires() const { return tires_; }
  const AxleLoads& loads() const { return loads_; }
  const Options& options() const { return options_; }

  /// Drive force split by static load and clipped to D_scale*F_z per axle;
  /// lateral forces zero in the kinematic regime.
  AxleForces axle_forces(const VehicleState& state, const DriveInput& input) const;

  /// Throws DivergenceError when the result is not finite.
  StateRate derivative(const VehicleState& state, const DriveInput& input) const;

  /// One classic RK4 step with the input held constant. `t` only labels errors.
  VehicleState step(const VehicleState& state, const DriveInput& input, double dt, double t = 0.0) const;

  /// Input as a function of time, sampled at t, t + dt/2 and t + dt as the
  /// classic RK4 stages require; keeps fourth order for smooth inputs.
  using InputSignal = std::function<DriveInput(double)>;
  VehicleState step(const VehicleState& state, const InputSignal& input, double dt, double t = 0.0) const;

 private:
  template <class Input>
  VehicleState rk4(const VehicleState& state, const Input& input, double dt, double t) const;
  StateRate dynamic_derivative(const VehicleState& s, const DriveInput& in) const;
  StateRate kinematic_derivative(const VehicleState& s, const DriveInput& in) const;

  VehicleParams params_;
  AxleTires tires_;
  Options options_;
  AxleLoads loads_;
};

}  // namespace edgar::dynamics
