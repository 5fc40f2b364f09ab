#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "edgar/ptp/clock.hpp"
#include "edgar/ptp/exchange.hpp"

namespace edgar::ptp {

struct PtpNode {
  std::string id;
  ClockRole role = ClockRole::OC;
  std::string parent;  // empty for the GM
  double link_delay = 0.0;      // parent -> node [s]
  double link_delay_up = -1.0;  // node -> parent [s]; negative means symmetric
  double initial_offset = 0.0;
  double drift_rate = 0.0;
  double noise_sigma = 0.0;
  ResidenceRange residence;  // TC only

  double uplink_delay() const { return link_delay_up < 0.0 ? link_delay : link_delay_up; }
};

/// Static PTP tree. Validation: unique ids, exactly one GM at the root, every
/// node reachable from the GM, TCs only forward, OCs are leaves, and every
/// BC/OC has a GM or BC as its nearest non-TC ancestor.
class SyncTopology {
 public:
  SyncTopology() = default;
  explicit SyncTopology(std::vector<PtpNode> nodes);  // throws std::invalid_argument

  const std::vector<PtpNode>& nodes() const { return nodes_; }
  const PtpNode& node(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;
  const PtpNode& grandmaster() const { return nodes_[gm_]; }

  /// Nearest non-TC ancestor.
  const PtpNode& master_of(std::string_view id) const;
  SyncPath path_to_master(std::string_view id) const;
  /// Number of synchronizing hops (GM = 0, BC under GM = 1, ...).
  int level(std::string_view id) const;
  /// BC and OC nodes ordered by level, then declaration order.
  std::vector<std::string> synchronized_nodes() const;

  /// Copy with every TC residence range scaled about its midpoint.
  SyncTopology with_residence_spread(double factor) const;

 private:
  std::vector<PtpNode> nodes_;
  std::size_t gm_ = 0;
};

struct PtpDefaults {
  double drift_bound = kGmSpecDrift;
  double noise_sigma = 100e-9;
  double initial_offset_bound = 1e-3;
  double link_delay = 500e-9;
  ResidenceRange switch_residence{1e-6, 10e-6};
};

/// GM -> x86 HPC (BC) -> switch (TC) -> ARM HPC and one OC per sensor device.
/// Each non-TC clock drifts at +/- drift_bound (random sign); initial offsets
/// are uniform in +/- initial_offset_bound. All draws come from `seed`.
SyncTopology edgar_ptp_topology(std::span<const std::string> sensor_devices, const PtpDefaults& defaults,
                                std::uint64_t seed);

}  // namespace edgar::ptp
