#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgar/net/topology.hpp"
#include "edgar/sensors/rig.hpp"

namespace edgar::net {

enum class TrafficClass { SR_A, SR_B, BE };

std::string_view to_string(TrafficClass c);
TrafficClass traffic_class_from_string(std::string_view s);  // "SR-A", "SR-B", "BE"
/// 802.1Q priority used when a flow does not set one: SR-A 3, SR-B 2, BE 0.
int default_priority(TrafficClass c);

/// Framing shared by every flow in a simulation.
struct Framing {
  std::uint32_t mtu = 1500;     // payload bytes per frame
  std::uint32_t overhead = 42;  // header, tag, FCS, preamble and gap [bytes]
};

struct Flow {
  std::string id;
  std::string source;
  std::string destination;
  TrafficClass cls = TrafficClass::BE;
  std::uint64_t frame_size = 0;  // payload bytes released once per period
  Picos period = 0;
  /// First release; unset means a seed-dependent offset in [0, period).
  std::optional<Picos> offset;
  int priority = -1;  // -1 picks default_priority(cls)

  int effective_priority() const { return priority < 0 ? default_priority(cls) : priority; }
  /// Throws std::invalid_argument naming the flow.
  void validate() const;
};

/// Segmentation of one released message into back-to-back frames.
struct Segmentation {
  std::uint64_t frames = 0;
  std::uint64_t last_payload = 0;  // payload of the final frame
  std::uint64_t wire_bits(std::uint64_t k, const Framing& f) const;  // frame k of `frames`
  std::uint64_t total_wire_bits(const Framing& f) const;
};

Segmentation segment(const Flow& flow, const Framing& framing);

/// Average on-wire bitrate including per-frame overhead.
double wire_bitrate(const Flow& flow, const Framing& framing);
/// Payload bitrate, frame_size * 8 / period.
double payload_bitrate(const Flow& flow);

/// Throws std::invalid_argument, naming the flow, when its wire bitrate exceeds the
/// rate of the first link on its route.
void check_source_rate(const NetTopology& topo, const Flow& flow, const Framing& framing);

struct RigFlowOptions {
  std::string destination = "hpc_x86";
  TrafficClass camera = TrafficClass::SR_B;
  TrafficClass lidar = TrafficClass::SR_B;
  TrafficClass radar = TrafficClass::SR_A;
  TrafficClass gnss = TrafficClass::SR_A;
  TrafficClass microphone = TrafficClass::BE;
};

/// One periodic flow per sensor spec, sourced at its device. Specs with zero
/// payload produce no flow.
std::vector<Flow> flows_from_rig(const sensors::Rig& rig, const RigFlowOptions& opts = {});

}  // namespace edgar::net
