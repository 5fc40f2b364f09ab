#include "edgar/dynamics/tire.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgar::dynamics {

double pacejka_lateral_force(double alpha, const TireParams& tire, double F_z) {
  const double D = tire.D_scale * F_z;
  const double Ba = tire.B * alpha;
  return D * std::sin(tire.C * std::atan(Ba - tire.E * (Ba - std::atan(Ba))));
}

double combined_slip_scale(double F_x, double mu_F_z) {
  if (!(mu_F_z > 0.0)) throw std::invalid_argument("combined_slip_scale: mu_F_z must be positive");
  const double ratio = F_x / mu_F_z;
  return std::sqrt(std::max(0.0, 1.0 - ratio * ratio));
}

}  // namespace edgar::dynamics
