#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "edgar/sensors/coverage.hpp"
#include "edgar/twin/report.hpp"
#include "edgar/twin/scenario.hpp"

namespace edgar::twin {

/// Longitudinal and steering requests of the maneuver script at time t.
struct ScriptSample {
  std::optional<double> speed;  // target [m/s]
  std::optional<double> force;  // open-loop drive force [N]
  double swa = 0.0;             // steering-wheel angle [rad]
};

/// Speed or force from the latest keyframe that sets one, steering-wheel angle
/// interpolated between the keyframes that set it (held outside them, 0 before
/// the first). Without any longitudinal keyframe the initial speed is held.
ScriptSample sample_script(const ScenarioConfig& config, double t);

struct DynamicsRun {
  DynamicsSection summary;
  std::vector<dynamics::VehicleState> states;  // steps + 1, state k at k * dt
  std::vector<double> delta;                   // road-wheel angle applied in step k
  std::vector<double> force;                   // drive force applied in step k
};

/// Maneuver script through limit_command into the single-track model. In
/// series and measurement mode nothing is actuated: zero steering and drive
/// force. Throws DivergenceError.
DynamicsRun run_dynamics(const ScenarioConfig& config);

/// Ego state at true time t, linear between integration steps, clamped to the run.
store::EgoPose pose_at(const ScenarioConfig& config, const DynamicsRun& run, double t);

/// Rig devices in sensor order, each once.
std::vector<std::string> rig_devices(const sensors::Rig& rig);

ptp::SyncResult run_ptp(const ScenarioConfig& config);

/// Nominal emissions k / rate in [0, duration], shifted by the offset of the
/// sensor's device clock when a synchronization result is given.
std::map<std::string, std::vector<double>> sensor_timestamps(const sensors::Rig& rig, double duration,
                                                             const ptp::SyncResult* sync);

struct NetworkRun {
  NetworkSection summary;
  net::SimResult result;
};

NetworkRun run_network(const ScenarioConfig& config);

CoverageSection run_coverage(const ScenarioConfig& config, sensors::CoverageMap* map_out = nullptr);

/// Runs every enabled subsystem in a fixed order and writes report.txt,
/// effective_config.yaml, timing.txt, the CSV artifacts and ride/ under
/// `out_dir`. Subsystem errors end the run with a partial report; the exit
/// code is in the returned report.
ScenarioReport run_scenario(const ScenarioConfig& config, const std::filesystem::path& out_dir);

}  // namespace edgar::twin
