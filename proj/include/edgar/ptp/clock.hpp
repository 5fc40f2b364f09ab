#pragma once

#include <optional>
#include <random>
#include <string_view>

namespace edgar::ptp {

enum class ClockRole { GM, BC, TC, OC };

std::string_view to_string(ClockRole r);
std::optional<ClockRole> role_from_string(std::string_view s);

/// Drift of an oscillator that loses or gains 0.25 s per Julian year.
inline constexpr double kGmSpecDrift = 0.25 / (365.25 * 86400.0);
inline constexpr double kMaxDriftRate = 1e-4;

/// Local time = t + offset + (drift + servo frequency) * (t - epoch).
/// The epoch is re-based whenever the servo steps or slews the clock.
class Clock {
 public:
  Clock() = default;
  Clock(ClockRole role, double offset, double drift_rate, double noise_sigma);

  ClockRole role() const { return role_; }
  double drift_rate() const { return drift_; }
  double noise_sigma() const { return sigma_; }
  double frequency_adjustment() const { return freq_adj_; }
  double epoch() const { return epoch_; }

  /// Offset from true time at true time t, noise free.
  double offset_at(double t) const { return offset_ + (drift_ + freq_adj_) * (t - epoch_); }
  /// Reporting read: noise free.
  double read(double t) const { return t + offset_at(t); }
  /// Timestamping read: adds N(0, sigma).
  double timestamp(double t, std::mt19937_64& rng) const;

  /// Subtracts `delta` from the clock at true time t.
  void step(double t, double delta);
  void set_frequency_adjustment(double t, double adj);

 private:
  ClockRole role_ = ClockRole::OC;
  double offset_ = 0.0;
  double drift_ = 0.0;
  double sigma_ = 0.0;
  double freq_adj_ = 0.0;
  double epoch_ = 0.0;
};

struct ServoGains {
  double kp = 0.7;
  double ki = 0.3;
};

/// PI discipline. The first update steps the clock by the full estimate; later
/// updates slew with frequency -(kp*theta + I) / interval, I += ki*theta.
class PiServo {
 public:
  explicit PiServo(ServoGains gains = {}, double sync_interval = 1.0);

  /// Throws std::invalid_argument for GM or TC clocks.
  void update(Clock& clock, double t, double offset_estimate);

  bool locked() const { return locked_; }
  double integral() const { return integral_; }
  double last_correction() const { return last_; }
  const ServoGains& gains() const { return gains_; }

 private:
  ServoGains gains_;
  double interval_;
  bool locked_ = false;
  double integral_ = 0.0;
  double last_ = 0.0;
};

}  // namespace edgar::ptp
