#pragma once

#include <string>
#include <vector>

#include "edgar/dynamics/params.hpp"

namespace edgar::dynamics {

/// One steady-state (or quasi-steady) operating point of a constant
/// steering-wheel-angle test. Radius and lateral acceleration carry the sign
/// of the turn; radius is NaN when the yaw rate is zero.
struct SteadyStatePoint {
  double speed = 0.0;     // [m/s] actual v_x at recording
  double swa = 0.0;       // steering-wheel angle [rad]
  double yaw_rate = 0.0;  // [rad/s]
  double a_y = 0.0;       // v_x * yaw_rate [m/s^2]
  double radius = 0.0;    // v_x / yaw_rate [m]
  double sideslip = 0.0;  // atan2(v_y, v_x) [rad]
  bool converged = false;

  friend bool operator==(const SteadyStatePoint&, const SteadyStatePoint&) = default;
};

struct SteadyStateReport {
  std::vector<SteadyStatePoint> points;
};

struct Iso4138Options {
  double dt = 1e-3;              // [s]
  double settle_window = 2.0;    // [s] yaw-rate moving window
  double settle_std = 1e-4;      // [rad/s]
  double time_budget = 60.0;     // [s] simulated, per discrete point
  double sample_period = 0.01;   // [s] yaw-rate sampling for the window
  double speed_kp = 4.0;         // [1/s]
  double speed_ki = 4.0;         // [1/s^2]
  double speed_tolerance = 1e-3; // [m/s] speed error allowed at recording
  double quasi_steady_yaw_accel = 1e-2;  // [rad/s^2] continuous-test convergence flag
  double max_sideslip = 0.5;     // [rad] beyond this the vehicle is considered past its stable limit
};

/// ISO 4138 speed grid 5..130 km/h in 5 km/h steps, in m/s.
std::vector<double> default_iso4138_speeds();

/// Constant steering-wheel angle, discrete speed steps. Each speed is an
/// independent simulation and runs in parallel when OpenMP is available.
SteadyStateReport run_iso4138_discrete(const VehicleParams& params, const AxleTires& tires,
                                       double steering_wheel_angle, const std::vector<double>& speeds,
                                       const Iso4138Options& options = {});

/// Single-threaded reference of run_iso4138_discrete; identical output.
SteadyStateReport run_iso4138_discrete_serial(const VehicleParams& params, const AxleTires& tires,
                                              double steering_wheel_angle, const std::vector<double>& speeds,
                                              const Iso4138Options& options = {});

/// Constant steering-wheel angle, slow speed ramp. Settles at the first
/// checkpoint, then ramps at `accel_rate` and samples each later checkpoint
/// as the vehicle passes it.
SteadyStateReport run_iso4138_continuous(const VehicleParams& params, const AxleTires& tires,
                                         double steering_wheel_angle, double accel_rate,
                                         const std::vector<double>& checkpoints,
                                         const Iso4138Options& options = {});

/// Slope of (road-wheel angle - Ackermann angle) over lateral acceleration,
/// least squares over converged points with 0 < |a_y| <= a_y_max.
/// [rad per m/s^2]. Throws std::invalid_argument with fewer than 3 points.
double understeer_gradient(const SteadyStateReport& report, const VehicleParams& params, double a_y_max = 4.0);

/// CSV with header speed_mps,swa_rad,yawrate_radps,ay_mps2,radius_m,sideslip_rad,converged.
std::string to_csv(const SteadyStateReport& report);

}  // namespace edgar::dynamics
