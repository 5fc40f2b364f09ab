#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "edgar/ptp/topology.hpp"

namespace edgar::ptp {

struct SimulationOptions {
  double duration = 600.0;
  double sync_interval = 1.0;
  /// Trace sampling period; <= 0 means the sync interval. Samples are taken
  /// at k * period, before any exchange scheduled at the same instant.
  double trace_period = 0.0;
  /// Exchanges of hierarchy level L start (L - 1) * level_stagger after each tick.
  double level_stagger = 10e-3;
  /// Fraction of the run, counted from the end, used for steady-state statistics.
  double steady_fraction = 0.5;
  ServoGains gains;
  ExchangeOptions exchange;
  std::uint64_t seed = 1;
};

struct NodeTrace {
  std::string id;
  std::vector<double> offset;  // relative to the GM, one per sample time [s]
  double first_lock = -1.0;    // true time of the first servo update
};

struct NodeSummary {
  std::string id;
  double max_abs_after_lock = 0.0;
  double max_abs_steady = 0.0;
  double rms_steady = 0.0;
};

struct SyncSummary {
  double max_abs_steady = 0.0;
  double rms_steady = 0.0;  // pooled over all synchronized nodes
  double max_abs_after_lock = 0.0;
  std::size_t exchanges = 0;
  std::vector<NodeSummary> nodes;
};

struct SyncResult {
  std::vector<double> times;
  std::vector<NodeTrace> traces;  // BC and OC nodes in synchronized_nodes() order
  SyncSummary summary;

  const NodeTrace& trace(const std::string& id) const;
  /// Offset of `id` relative to the GM at true time t, linear between samples.
  double offset_at(const std::string& id, double t) const;
};

/// Deterministic per seed. Throws std::invalid_argument for bad options.
SyncResult run_sync_simulation(const SyncTopology& topology, const SimulationOptions& opts);

/// Columns: time_s,node_id,offset_s.
void write_trace_csv(std::ostream& os, const SyncResult& result);

}  // namespace edgar::ptp
