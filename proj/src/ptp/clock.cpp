#include "edgar/ptp/clock.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace edgar::ptp {

std::string_view to_string(ClockRole r) {
  switch (r) {
    case ClockRole::GM: return "GM";
    case ClockRole::BC: return "BC";
    case ClockRole::TC: return "TC";
    case ClockRole::OC: return "OC";
  }
  return "?";
}

std::optional<ClockRole> role_from_string(std::string_view s) {
  for (ClockRole r : {ClockRole::GM, ClockRole::BC, ClockRole::TC, ClockRole::OC}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

Clock::Clock(ClockRole role, double offset, double drift_rate, double noise_sigma)
    : role_(role), offset_(offset), drift_(drift_rate), sigma_(noise_sigma) {
  if (!std::isfinite(offset)) throw std::invalid_argument("clock offset must be finite");
  if (!(std::abs(drift_rate) <= kMaxDriftRate)) throw std::invalid_argument("clock drift rate exceeds 1e-4");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw std::invalid_argument("timestamp noise sigma must be non-negative");
  }
  if (role == ClockRole::TC && (offset != 0.0 || drift_rate != 0.0)) {
    throw std::invalid_argument("a transparent clock carries no synchronized time");
  }
}

double Clock::timestamp(double t, std::mt19937_64& rng) const {
  const double local = read(t);
  if (sigma_ == 0.0) return local;
  std::normal_distribution<double> noise(0.0, sigma_);
  return local + noise(rng);
}

void Clock::step(double t, double delta) {
  offset_ = offset_at(t) - delta;
  epoch_ = t;
}

void Clock::set_frequency_adjustment(double t, double adj) {
  offset_ = offset_at(t);
  epoch_ = t;
  freq_adj_ = adj;
}

PiServo::PiServo(ServoGains gains, double sync_interval) : gains_(gains), interval_(sync_interval) {
  if (!(sync_interval > 0.0)) throw std::invalid_argument("sync interval must be positive");
  if (!(gains.kp > 0.0) || !(gains.ki >= 0.0)) throw std::invalid_argument("servo gains must be positive");
}

void PiServo::update(Clock& clock, double t, double offset_estimate) {
  if (clock.role() == ClockRole::GM || clock.role() == ClockRole::TC) {
    throw std::invalid_argument("servo applies to BC and OC clocks only, not " + std::string(to_string(clock.role())));
  }
  if (!locked_) {
    clock.step(t, offset_estimate);
    locked_ = true;
    last_ = offset_estimate;
    return;
  }
  integral_ += gains_.ki * offset_estimate;
  last_ = gains_.kp * offset_estimate + integral_;
  clock.set_frequency_adjustment(t, -last_ / interval_);
}

}  // namespace edgar::ptp
