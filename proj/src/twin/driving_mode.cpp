#include "edgar/twin/driving_mode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace edgar::twin {

std::string_view to_string(ModeKind m) {
  switch (m) {
    case ModeKind::series: return "series";
    case ModeKind::measurement: return "measurement";
    case ModeKind::autonomous: return "autonomous";
    case ModeKind::high_dynamic: return "high_dynamic";
  }
  return "?";
}

std::optional<ModeKind> mode_from_string(std::string_view s) {
  for (ModeKind m : {ModeKind::series, ModeKind::measurement, ModeKind::autonomous, ModeKind::high_dynamic}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

ModeLimits default_limits(ModeKind m) {
  switch (m) {
    case ModeKind::autonomous: return {50.0 / 3.6, 2.5, 2.5, 2.5, 0.3};
    case ModeKind::high_dynamic: return {kHighDynamicMaxSpeed, 6.0, 9.0, 9.0, 10.0};
    default: return {};
  }
}

DrivingMode default_mode(ModeKind m) { return {m, default_limits(m)}; }

void DrivingMode::validate() const {
  if (!allows_actuation()) return;
  const ModeLimits& l = limits;
  for (double v : {l.max_speed, l.max_accel, l.max_decel, l.max_lateral_accel, l.max_steering_rate}) {
    if (!(std::isfinite(v) && v > 0.0)) throw std::invalid_argument("mode limits must be positive and finite");
  }
  if (kind == ModeKind::autonomous) {
    const ModeLimits h = default_limits(ModeKind::high_dynamic);
    if (!(l.max_speed < h.max_speed && l.max_accel < h.max_accel && l.max_decel < h.max_decel &&
          l.max_lateral_accel < h.max_lateral_accel && l.max_steering_rate < h.max_steering_rate)) {
      throw std::invalid_argument("autonomous limits must be strictly tighter than high_dynamic limits");
    }
  }
}

namespace {

// Symmetric magnitude clamp; returns the input unchanged when inside.
double clamp_abs(double v, double limit, bool& flag) {
  if (std::abs(v) <= limit) return v;
  flag = true;
  return std::copysign(limit, v);
}

}  // namespace

LimitedCommand limit_command(const DrivingMode& mode, const Command& c) {
  if (!mode.allows_actuation()) {
    throw ActuationError("actuation requested in " + std::string(to_string(mode.kind)) +
                         " mode, where the drive-by-wire system is disconnected");
  }
  const ModeLimits& l = mode.limits;
  LimitedCommand out{c, {}};
  out.command.speed_target = clamp_abs(c.speed_target, l.max_speed, out.flags.speed);
  out.command.steering_rate = clamp_abs(c.steering_rate, l.max_steering_rate, out.flags.steering_rate);
  if (c.accel > l.max_accel) {
    out.command.accel = l.max_accel;
    out.flags.accel = true;
  } else if (c.accel < -l.max_decel) {
    out.command.accel = -l.max_decel;
    out.flags.accel = true;
  }
  return out;
}

double lateral_steer_limit(const DrivingMode& mode, double wheelbase, double speed) {
  if (speed * speed <= 0.0) return std::numeric_limits<double>::infinity();
  return std::atan(wheelbase * mode.limits.max_lateral_accel / (speed * speed));
}

}  // namespace edgar::twin
