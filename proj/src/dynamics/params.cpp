#include "edgar/dynamics/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace edgar::dynamics {

namespace {

void require_positive(double value, const char* name) {
  if (!(std::isfinite(value) && value > 0.0)) {
    throw std::invalid_argument(std::string("vehicle parameter '") + name + "' must be positive and finite");
  }
}

void require_non_negative(double value, const char* name) {
  if (!(std::isfinite(value) && value >= 0.0)) {
    throw std::invalid_argument(std::string("vehicle parameter '") + name + "' must be non-negative and finite");
  }
}

}  // namespace

void VehicleParams::validate() const {
  require_positive(l_f, "l_f");
  require_positive(l_r, "l_r");
  require_positive(l_table, "l_table");
  require_positive(m, "m");
  require_positive(I_z, "I_z");
  require_positive(rho, "rho");
  require_positive(A, "A");
  require_non_negative(c_d, "c_d");
  require_non_negative(f_r, "f_r");
  require_positive(steering_ratio, "steering_ratio");
  require_positive(g, "g");
  require_positive(max_road_wheel_angle, "max_road_wheel_angle");
}

void TireParams::validate() const {
  if (!(std::isfinite(B) && B > 0.0)) throw std::invalid_argument("tire parameter 'B' must be positive");
  if (!(std::isfinite(C) && C > 0.0)) throw std::invalid_argument("tire parameter 'C' must be positive");
  if (!(std::isfinite(D_scale) && D_scale > 0.0)) {
    throw std::invalid_argument("tire parameter 'D_scale' must be positive");
  }
  if (!std::isfinite(E)) throw std::invalid_argument("tire parameter 'E' must be finite");
}

AxleLoads static_axle_loads(const VehicleParams& params) {
  const double weight = params.m * params.g;
  const double l = params.wheelbase();
  AxleLoads loads;
  loads.F_z_f = weight * params.l_r / l;
  loads.F_z_r = weight * params.l_f / l;
  return loads;
}

}  // namespace edgar::dynamics
