#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace edgar::twin {

enum class ModeKind { series, measurement, autonomous, high_dynamic };

std::string_view to_string(ModeKind m);
std::optional<ModeKind> mode_from_string(std::string_view s);

struct ModeLimits {
  double max_speed = 0.0;          // [m/s]
  double max_accel = 0.0;          // [m/s^2]
  double max_decel = 0.0;          // [m/s^2], positive
  double max_lateral_accel = 0.0;  // [m/s^2]
  double max_steering_rate = 0.0;  // steering-wheel rate [rad/s]

  bool operator==(const ModeLimits&) const = default;
};

struct DrivingMode {
  ModeKind kind = ModeKind::autonomous;
  ModeLimits limits;

  /// Series and measurement modes keep the drive-by-wire system disconnected.
  bool allows_actuation() const { return kind == ModeKind::autonomous || kind == ModeKind::high_dynamic; }
  /// Throws std::invalid_argument for non-positive limits of an actuated mode
  /// and for autonomous limits that are not strictly tighter than high_dynamic.
  void validate() const;

  bool operator==(const DrivingMode&) const = default;
};

inline constexpr double kHighDynamicMaxSpeed = 130.0 / 3.6;

/// Defaults per mode. The autonomous values are engineering choices: 50 km/h,
/// +/-2.5 m/s^2, 2.5 m/s^2 lateral, 0.3 rad/s.
ModeLimits default_limits(ModeKind m);
DrivingMode default_mode(ModeKind m);

class ActuationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Command {
  double speed_target = 0.0;    // [m/s]
  double steering_rate = 0.0;   // steering-wheel [rad/s]
  double accel = 0.0;           // [m/s^2]

  bool operator==(const Command&) const = default;
};

struct LimitFlags {
  bool speed = false;
  bool steering_rate = false;
  bool accel = false;

  bool any() const { return speed || steering_rate || accel; }
  bool operator==(const LimitFlags&) const = default;
};

struct LimitedCommand {
  Command command;
  LimitFlags flags;
};

/// Clamps every channel to the mode limits. Signs are kept, magnitudes never
/// grow and limiting a limited command changes nothing. Throws ActuationError
/// in series and measurement mode.
LimitedCommand limit_command(const DrivingMode& mode, const Command& command);

/// Largest road-wheel angle [rad] whose kinematic lateral acceleration at
/// `speed` stays within the mode limit; infinite at standstill.
double lateral_steer_limit(const DrivingMode& mode, double wheelbase, double speed);

}  // namespace edgar::twin
