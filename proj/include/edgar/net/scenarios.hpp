#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "edgar/net/simulator.hpp"
#include "edgar/sensors/rig.hpp"

namespace edgar::net {

struct NetScenario {
  NetTopology topology;
  std::vector<Flow> flows;
  NetConfig config;
};

struct SevenHopOptions {
  int switches = 7;
  std::uint64_t link_rate = 1'000'000'000;
  Picos propagation = ns(25);
  std::uint32_t sr_frame = 128;  // payload bytes, one frame per period
  Picos sr_period = us(125);
  /// One best-effort talker per switch, each loading one chain egress port.
  bool cross_traffic = true;
  double cross_load = 1.0;  // fraction of line rate with MTU frames
};

/// talker -> sw1 -> ... -> swN -> listener. Cross talker i feeds swi and its
/// traffic leaves the chain one switch later, so every chain egress port past
/// the talker link carries one cross stream. Throws std::invalid_argument for
/// switches < 1 or a non-positive period.
NetScenario seven_hop_scenario(const SevenHopOptions& opts = {}, Shaping shaping = Shaping::cbs);

/// Latency of a single frame of `payload` bytes on an idle route: per link
/// transmission plus propagation, plus processing at every bridge passed.
Picos idle_frame_latency(const NetTopology& topo, const std::vector<std::size_t>& route, std::uint64_t payload,
                         const NetConfig& config);

struct EdgarNetOptions {
  std::uint64_t sensor_rate = 1'000'000'000;
  std::uint64_t slow_sensor_rate = 100'000'000;  // radar and GNSS
  std::uint64_t uplink_rate = 40'000'000'000;
  Picos propagation = ns(25);
  std::string switch_id = "switch";
  std::vector<std::string> compute = {"hpc_x86", "hpc_arm"};
  RigFlowOptions flows;
};

/// One switch, the compute endpoints on uplinks and every rig device on its own port.
NetScenario edgar_network(const sensors::Rig& rig, const EdgarNetOptions& opts = {});

}  // namespace edgar::net
