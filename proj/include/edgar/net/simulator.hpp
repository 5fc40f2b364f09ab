#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "edgar/net/cbs.hpp"
#include "edgar/net/flows.hpp"
#include "edgar/net/topology.hpp"

namespace edgar::net {

enum class Shaping {
  cbs,              // strict priority across 8 queues, SR queues shaped at bridge egress
  strict_priority,  // 8 queues, no shaping
  none,             // one FIFO per port
};

std::string_view to_string(Shaping s);
Shaping shaping_from_string(std::string_view s);

struct NetConfig {
  Framing framing;
  Picos processing_delay = us(2);  // per bridge, between reception and enqueue
  /// Frames per bridge egress queue; overflow drops. End stations buffer whole messages.
  std::size_t queue_capacity = 1000;
  Shaping shaping = Shaping::cbs;
  /// idleSlope of an SR class on a port = factor * sum of the reserved rates of
  /// the flows of that class crossing it.
  double reservation_factor = 1.2;
  Picos class_a_interval = us(125);
  Picos class_b_interval = us(250);
  /// Upper limit for idle_a + idle_b as a fraction of the port rate.
  double max_reservation_fraction = 0.75;
};

/// Reserved rate of an SR flow: the frames it can release per class measurement
/// interval (at least one) times its largest on-wire frame, per interval. A
/// message is sent back to back, so with a source link rate the count is the
/// larger of the average and what the link can carry within one interval,
/// capped by the frames of one message.
double reserved_bitrate(const Flow& flow, const Framing& framing, Picos interval, std::uint64_t source_rate = 0);

struct PortReservation {
  std::size_t port = 0;
  double idle_a = 0.0;  // bit/s, zero when no SR-A flow crosses the port
  double idle_b = 0.0;
};

/// Reservations on bridge egress ports. Throws std::invalid_argument when a
/// port exceeds max_reservation_fraction.
std::vector<PortReservation> port_reservations(const NetTopology& topo, const std::vector<Flow>& flows,
                                               const NetConfig& config);

struct FlowStats {
  std::string id;
  TrafficClass cls = TrafficClass::BE;
  // Messages: one per period, delivered once every segment has arrived.
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;  // at least one segment dropped
  std::uint64_t in_flight = 0;
  std::uint64_t frames_generated = 0;
  std::uint64_t frames_delivered = 0;
  std::uint64_t frames_dropped = 0;
  std::uint64_t frames_in_flight = 0;
  Picos lat_min = 0;
  Picos lat_max = 0;
  double lat_mean = 0.0;  // seconds
  Picos jitter() const { return delivered ? lat_max - lat_min : 0; }
};

/// Audit of every credit update, taken before clamping.
struct CbsAudit {
  std::uint64_t updates = 0;
  std::uint64_t violations = 0;  // unclamped credit outside [lo, hi]
  double max_excess = 0.0;       // bits
};

struct FrameRecord {
  std::size_t flow = 0;
  std::uint64_t message = 0;
  std::uint64_t segment = 0;
  Picos released = 0;
  Picos first_tx_start = 0;  // transmission start on the source port
  Picos delivered = 0;
};

struct SimOptions {
  Picos duration = kPicosPerSecond;
  std::uint64_t seed = 1;
  bool record_frames = false;
};

struct SimResult {
  std::vector<FlowStats> flows;  // same order as the input flows
  CbsAudit cbs;
  std::uint64_t events = 0;
  std::vector<FrameRecord> frames;  // delivered frames, when requested

  const FlowStats& flow(std::string_view id) const;  // throws std::out_of_range
};

/// Discrete-event store-and-forward simulation. Releases happen in [0, duration)
/// and events after `duration` are not processed. Deterministic per seed.
/// Throws std::invalid_argument for invalid flows, routes or configuration.
SimResult simulate(const NetTopology& topo, const std::vector<Flow>& flows, const NetConfig& config,
                   const SimOptions& opts);

/// Columns: flow_id,class,count,lat_min_s,lat_mean_s,lat_max_s,jitter_s,drops.
void write_flow_stats_csv(std::ostream& os, const SimResult& result);

}  // namespace edgar::net
