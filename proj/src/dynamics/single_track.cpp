#include "edgar/dynamics/single_track.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "edgar/common/config.hpp"
#include "edgar/dynamics/tire.hpp"

namespace edgar::dynamics {

namespace {

VehicleState axpy(const VehicleState& s, double h, const StateRate& k) {
  return {s.x + h * k.x,       s.y + h * k.y,     s.psi + h * k.psi,
          s.v_x + h * k.v_x,   s.v_y + h * k.v_y, s.psi_dot + h * k.psi_dot};
}

}  // namespace

bool VehicleState::is_finite() const {
  return std::isfinite(x) && std::isfinite(y) && std::isfinite(psi) && std::isfinite(v_x) && std::isfinite(v_y) &&
         std::isfinite(psi_dot);
}

std::optional<SlipAngles> slip_angles(const VehicleState& state, double delta, const VehicleParams& params,
                                      double low_speed_guard) {
  if (state.v_x < low_speed_guard) return std::nullopt;
  SlipAngles slip;
  slip.front = delta - std::atan((state.v_y + params.l_f * state.psi_dot) / state.v_x);
  slip.rear = -std::atan((state.v_y - params.l_r * state.psi_dot) / state.v_x);
  return slip;
}

ResistanceForces resistance_forces(const VehicleState& state, const VehicleParams& params) {
  ResistanceForces f;
  f.drag = 0.5 * params.rho * params.c_d * params.A * state.v_x * state.v_x;
  if (state.v_x > 0.0) {
    f.roll = params.f_r * params.m * params.g;
  } else if (state.v_x < 0.0) {
    f.roll = -params.f_r * params.m * params.g;
  }
  return f;
}

SingleTrackModel::SingleTrackModel(VehicleParams params, AxleTires tires)
    : SingleTrackModel(params, tires, Options{}) {}

SingleTrackModel::SingleTrackModel(VehicleParams params, AxleTires tires, Options options)
    : params_(params), tires_(tires), options_(options) {
  params_.validate();
  tires_.validate();
  if (!(options_.low_speed_guard > 0.0)) throw std::invalid_argument("low_speed_guard must be positive");
  if (!(options_.max_dt > 0.0)) throw std::invalid_argument("max_dt must be positive");
  if (!(options_.kinematic_relaxation > 0.0)) throw std::invalid_argument("kinematic_relaxation must be positive");
  loads_ = static_axle_loads(params_);
}

AxleForces SingleTrackModel::axle_forces(const VehicleState& state, const DriveInput& input) const {
  const double weight = loads_.F_z_f + loads_.F_z_r;
  const double mu_f = tires_.front.D_scale * loads_.F_z_f;
  const double mu_r = tires_.rear.D_scale * loads_.F_z_r;

  AxleForces f;
  f.F_x_f = std::clamp(input.F_x_drive * loads_.F_z_f / weight, -mu_f, mu_f);
  f.F_x_r = std::clamp(input.F_x_drive * loads_.F_z_r / weight, -mu_r, mu_r);

  if (const auto slip = slip_angles(state, input.delta, params_, options_.low_speed_guard)) {
    f.F_y_f = pacejka_lateral_force(slip->front, tires_.front, loads_.F_z_f) * combined_slip_scale(f.F_x_f, mu_f);
    f.F_y_r = pacejka_lateral_force(slip->rear, tires_.rear, loads_.F_z_r) * combined_slip_scale(f.F_x_r, mu_r);
  }
  return f;
}

StateRate SingleTrackModel::dynamic_derivative(const VehicleState& s, const DriveInput& in) const {
  const auto forces = axle_forces(s, in);
  const auto res = resistance_forces(s, params_);
  const double m = params_.m;
  const double cos_d = std::cos(in.delta);
  const double sin_d = std::sin(in.delta);
  const double F_x = forces.F_x_f + forces.F_x_r;

  StateRate d;
  d.x = s.v_x * std::cos(s.psi) - s.v_y * std::sin(s.psi);
  d.y = s.v_x * std::sin(s.psi) + s.v_y * std::cos(s.psi);
  d.psi = s.psi_dot;
  d.v_x = (F_x - res.drag - res.roll - forces.F_y_f * sin_d) / m + s.v_y * s.psi_dot;
  d.v_y = (forces.F_y_f * cos_d + forces.F_y_r) / m - s.v_x * s.psi_dot;
  d.psi_dot = (params_.l_f * forces.F_y_f * cos_d - params_.l_r * forces.F_y_r) / params_.I_z;
  return d;
}

// Kinematic bicycle about the rear axle: psi_dot -> v_x tan(delta)/l, v_y -> l_r psi_dot.
StateRate SingleTrackModel::kinematic_derivative(const VehicleState& s, const DriveInput& in) const {
  const auto forces = axle_forces(s, in);
  const auto res = resistance_forces(s, params_);
  const double l = params_.wheelbase();
  const double curvature = std::tan(in.delta) / l;

  double a_x = (forces.F_x_f + forces.F_x_r - res.drag - res.roll) / params_.m;
  if (s.v_x <= 0.0 && a_x < 0.0) a_x = 0.0;  // standstill holds

  const double psi_dot_kin = s.v_x * curvature;
  const double v_y_kin = params_.l_r * psi_dot_kin;
  const double tau = options_.kinematic_relaxation;

  StateRate d;
  d.x = s.v_x * std::cos(s.psi) - s.v_y * std::sin(s.psi);
  d.y = s.v_x * std::sin(s.psi) + s.v_y * std::cos(s.psi);
  d.psi = s.psi_dot;
  d.v_x = a_x;
  d.psi_dot = curvature * a_x + (psi_dot_kin - s.psi_dot) / tau;
  d.v_y = params_.l_r * curvature * a_x + (v_y_kin - s.v_y) / tau;
  return d;
}

StateRate SingleTrackModel::derivative(const VehicleState& state, const DriveInput& input) const {
  const StateRate d = state.v_x < options_.low_speed_guard ? kinematic_derivative(state, input)
                                                           : dynamic_derivative(state, input);
  if (!d.is_finite()) throw DivergenceError("single-track derivative is not finite");
  return d;
}

template <class Input>
VehicleState SingleTrackModel::rk4(const VehicleState& state, const Input& input, double dt, double t) const {
  if (!(dt > 0.0 && dt <= options_.max_dt)) {
    throw std::invalid_argument("step: dt must lie in (0, " + std::to_string(options_.max_dt) + "] s");
  }
  VehicleState next;
  try {
    const DriveInput u0 = input(t);
    const DriveInput uh = input(t + 0.5 * dt);
    const DriveInput u1 = input(t + dt);
    const StateRate k1 = derivative(state, u0);
    const StateRate k2 = derivative(axpy(state, 0.5 * dt, k1), uh);
    const StateRate k3 = derivative(axpy(state, 0.5 * dt, k2), uh);
    const StateRate k4 = derivative(axpy(state, dt, k3), u1);
    next = state;
    next.x += dt / 6.0 * (k1.x + 2.0 * k2.x + 2.0 * k3.x + k4.x);
    next.y += dt / 6.0 * (k1.y + 2.0 * k2.y + 2.0 * k3.y + k4.y);
    next.psi += dt / 6.0 * (k1.psi + 2.0 * k2.psi + 2.0 * k3.psi + k4.psi);
    next.v_x += dt / 6.0 * (k1.v_x + 2.0 * k2.v_x + 2.0 * k3.v_x + k4.v_x);
    next.v_y += dt / 6.0 * (k1.v_y + 2.0 * k2.v_y + 2.0 * k3.v_y + k4.v_y);
    next.psi_dot += dt / 6.0 * (k1.psi_dot + 2.0 * k2.psi_dot + 2.0 * k3.psi_dot + k4.psi_dot);
  } catch (const DivergenceError&) {
    next.v_x = std::nan("");
  }
  if (!next.is_finite()) {
    std::ostringstream msg;
    msg << "vehicle state diverged at t = " << (t + dt) << " s";
    throw DivergenceError(msg.str());
  }
  if (next.v_x < 0.0 && state.v_x < options_.low_speed_guard) next.v_x = 0.0;
  return next;
}

VehicleState SingleTrackModel::step(const VehicleState& state, const DriveInput& input, double dt, double t) const {
  return rk4(state, [&input](double) { return input; }, dt, t);
}

VehicleState SingleTrackModel::step(const VehicleState& state, const InputSignal& input, double dt, double t) const {
  if (!input) throw std::invalid_argument("step: empty input signal");
  return rk4(state, input, dt, t);
}

}  // namespace edgar::dynamics
