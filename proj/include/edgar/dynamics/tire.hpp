#pragma once

#include "edgar/dynamics/params.hpp"

namespace edgar::dynamics {

/// Magic formula lateral force D sin(C atan(B a - E (B a - atan(B a)))),
/// D = D_scale * F_z.
double pacejka_lateral_force(double alpha, const TireParams& tire, double F_z);

/// Friction-ellipse reduction of lateral capacity under a longitudinal force.
/// Saturates to 0 once |F_x| reaches mu_F_z.
double combined_slip_scale(double F_x, double mu_F_z);

}  // namespace edgar::dynamics
