#pragma once

namespace edgar::dynamics {

/// Identified single-track parameters of the EDGAR Multivan plus the
/// quantities the model needs that were not identified (f_r, steering ratio).
struct VehicleParams {
  double l_f = 1.724;        // front axle to CG [m]
  double l_r = 1.247;        // rear axle to CG [m]
  double l_table = 3.128;    // tabulated wheelbase [m], stored only; dynamics use l_f + l_r
  double m = 2520.0;         // [kg]
  double I_z = 13600.0;      // [kg m^2]
  double rho = 1.225;        // [kg/m^3]
  double A = 2.9;            // [m^2]
  double c_d = 0.35;
  double f_r = 0.012;
  double steering_ratio = 14.3;
  double g = 9.81;           // [m/s^2]
  double max_road_wheel_angle = 0.7;  // [rad]

  double wheelbase() const { return l_f + l_r; }

  /// Throws std::invalid_argument naming the first bad field.
  void validate() const;
};

/// Pacejka magic-formula coefficients for one axle. The peak is D_scale times
/// the axle's static vertical load.
struct TireParams {
  double B = 10.0;
  double C = 1.0;
  double D_scale = 1.1;
  double E = -5.0;

  void validate() const;
};

struct AxleTires {
  TireParams front{10.0, 1.0, 1.1, -5.0};
  TireParams rear{12.4, 1.8, 2.1, -5.0};

  void validate() const {
    front.validate();
    rear.validate();
  }
};

struct AxleLoads {
  double F_z_f = 0.0;  // [N]
  double F_z_r = 0.0;  // [N]
};

/// Static moment balance about the CG.
AxleLoads static_axle_loads(const VehicleParams& params);

}  // namespace edgar::dynamics
