#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "edgar/dynamics/iso4138.hpp"
#include "edgar/dynamics/single_track.hpp"
#include "edgar/net/simulator.hpp"
#include "edgar/net/sr_class.hpp"
#include "edgar/ptp/simulation.hpp"
#include "edgar/store/integrity.hpp"
#include "edgar/store/ride_store.hpp"

namespace edgar::twin {

/// Steps in which a channel had to be clamped.
struct ClampCounts {
  std::size_t speed = 0;
  std::size_t steering_rate = 0;
  std::size_t accel = 0;
  std::size_t lateral = 0;
};

struct DynamicsSection {
  std::size_t steps = 0;
  dynamics::VehicleState final_state;
  double distance = 0.0;  // path length [m]
  double max_speed = 0.0;
  double max_lateral_accel = 0.0;  // |v_x * yaw rate|
  bool actuated = false;
  ClampCounts clamps;
};

struct ModalityCoverage {
  std::string modality;
  std::size_t sensors = 0;
  double covered_fraction = 0.0;  // of the cells outside the footprint
  std::optional<double> full_coverage_range;
};

struct CoverageSection {
  double window = 0.0;
  double cell = 0.0;
  std::vector<ModalityCoverage> modalities;
  std::size_t blind_regions = 0;  // no perception sensor at all
  double blind_area = 0.0;
};

struct NetworkSection {
  std::string preset;
  std::string shaping;
  double duration = 0.0;
  std::size_t flows = 0;
  std::uint64_t events = 0;
  net::CbsAudit cbs;
  std::vector<net::SrCheck> checks;  // SR flows only
  bool pass = true;
};

struct PtpSection {
  std::size_t nodes = 0;
  ptp::SyncSummary summary;
};

struct StoreSection {
  std::string ride_id;
  store::RecordingSummary recording;
  double ego_advance = 0.0;  // path length between the first and last sample pose [m]
  std::vector<store::Violation> violations;
};

struct IsoSection {
  double swa = 0.0;
  bool continuous = false;
  std::size_t points = 0;
  std::size_t converged = 0;
  std::optional<double> understeer_gradient;  // [rad per m/s^2]
};

/// Every subsystem appears once: with its summary, as "disabled", or as
/// "not run" when an earlier stage aborted.
struct ScenarioReport {
  std::string name;
  std::uint64_t seed = 0;
  std::string mode;
  double duration = 0.0;
  double dt = 0.0;

  bool network_enabled = false, ptp_enabled = false, store_enabled = false, coverage_enabled = false,
       iso_enabled = false;
  std::optional<DynamicsSection> dynamics;
  std::optional<CoverageSection> coverage;
  std::optional<NetworkSection> network;
  std::optional<PtpSection> ptp;
  std::optional<StoreSection> store;
  std::optional<IsoSection> iso;

  std::string error;                  // non-empty: run aborted, report is partial
  std::vector<std::string> failures;  // acceptance failures, one line each
  int exit_code = 0;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitCheck = 3;

/// Deterministic text, every number with six significant digits in SI units.
std::string render_report(const ScenarioReport& report);

}  // namespace edgar::twin
