#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <yaml-cpp/yaml.h>

#include "edgar/dynamics/single_track.hpp"
#include "edgar/dynamics/vehicle_config.hpp"
#include "edgar/net/scenarios.hpp"
#include "edgar/ptp/topology.hpp"
#include "edgar/sensors/rig.hpp"
#include "edgar/twin/driving_mode.hpp"

namespace edgar::twin {

/// One keyframe of the maneuver script. A speed target or a drive force holds
/// until a later keyframe sets the longitudinal channel again; the steering-wheel
/// angle is interpolated linearly between keyframes that set it.
struct ManeuverPoint {
  double t = 0.0;                     // [s]
  std::optional<double> speed;        // [m/s]
  std::optional<double> force;        // [N], open loop
  std::optional<double> swa;          // steering-wheel angle [rad]

  bool operator==(const ManeuverPoint&) const = default;
};

enum class NetPreset { rig, seven_hop };

struct NetworkConfig {
  bool enabled = false;
  NetPreset preset = NetPreset::rig;
  net::Shaping shaping = net::Shaping::cbs;
  double duration = 0.2;  // simulated seconds
  net::SevenHopOptions seven_hop;
  net::EdgarNetOptions edgar;
};

struct PtpConfig {
  bool enabled = false;
  ptp::PtpDefaults defaults;
  double sync_interval = 1.0;
  double trace_period = 0.1;
  ptp::ServoGains gains;
};

struct StoreConfig {
  bool enabled = false;
  std::string ride_id = "ride_0001";
  std::string map_id;  // empty: no map
  double scene_duration = 20.0;
};

struct CoverageConfig {
  bool enabled = false;
  double window = 40.0;  // square side [m]
  double cell = 0.25;
};

struct Iso4138Config {
  bool enabled = false;
  double swa = 0.7853981633974483;  // [rad]
  bool continuous = false;
  double accel_rate = 0.1;  // [m/s^2], continuous test only
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::string vehicle_ref = "default";  // as written in the file
  dynamics::VehicleConfig vehicle;
  std::string rig_ref = "default";
  sensors::Rig rig;
  DrivingMode mode = default_mode(ModeKind::autonomous);
  double duration = 10.0;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  std::string output_dir = "out";

  dynamics::VehicleState initial;
  double speed_kp = 1.0;  // [1/s], accel request per m/s of speed error
  std::vector<ManeuverPoint> maneuver;
  double trajectory_period = 0.01;

  NetworkConfig network;
  PtpConfig ptp;
  StoreConfig store;
  CoverageConfig coverage;
  Iso4138Config iso4138;

  std::size_t steps() const;
  /// Throws ConfigError.
  void validate() const;
};

/// Relative vehicle and rig paths resolve against `base_dir`. Throws ConfigError
/// with line and column of the offending node.
ScenarioConfig parse_scenario(const YAML::Node& doc, const std::filesystem::path& base_dir = {});
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// Full effective configuration with every default resolved. The output
/// directory is left out so that the echo only depends on the scenario.
YAML::Node to_yaml(const ScenarioConfig& config);
std::string effective_config_text(const ScenarioConfig& config);

}  // namespace edgar::twin
