#include "edgar/net/scenarios.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace edgar::net {

NetScenario seven_hop_scenario(const SevenHopOptions& opts, Shaping shaping) {
  if (opts.switches < 1) throw std::invalid_argument("a switch chain needs at least one switch");
  if (opts.sr_period <= 0) throw std::invalid_argument("SR period must be > 0");
  if (!(opts.cross_load > 0.0 && opts.cross_load <= 1.0)) throw std::invalid_argument("cross load must lie in (0, 1]");
  NetScenario sc;
  sc.config.shaping = shaping;
  auto& t = sc.topology;
  const int n = opts.switches;
  auto sw = [](int i) { return fmt::format("sw{}", i); };
  t.add_node("talker", NodeKind::end_station);
  for (int i = 1; i <= n; ++i) t.add_node(sw(i), NodeKind::bridge);
  t.add_node("listener", NodeKind::end_station);
  t.add_link("talker", sw(1), opts.link_rate, opts.propagation);
  for (int i = 1; i < n; ++i) t.add_link(sw(i), sw(i + 1), opts.link_rate, opts.propagation);
  t.add_link(sw(n), "listener", opts.link_rate, opts.propagation);

  Flow sr;
  sr.id = "sr_a";
  sr.source = "talker";
  sr.destination = "listener";
  sr.cls = TrafficClass::SR_A;
  sr.frame_size = opts.sr_frame;
  sr.period = opts.sr_period;
  sc.flows.push_back(sr);

  if (opts.cross_traffic) {
    const auto& fr = sc.config.framing;
    const std::uint64_t bits = (fr.mtu + fr.overhead) * 8ULL;
    const Picos period = static_cast<Picos>(
        std::ceil(static_cast<double>(transmission_time(bits, opts.link_rate)) / opts.cross_load));
    for (int i = 1; i <= n; ++i) {
      const std::string src = fmt::format("cross{}", i);
      t.add_node(src, NodeKind::end_station);
      t.add_link(src, sw(i), opts.link_rate, opts.propagation);
      std::string dst = "listener";
      if (i < n) {
        dst = fmt::format("sink{}", i);
        t.add_node(dst, NodeKind::end_station);
        t.add_link(dst, sw(i + 1), opts.link_rate, opts.propagation);
      }
      Flow be;
      be.id = src;
      be.source = src;
      be.destination = dst;
      be.cls = TrafficClass::BE;
      be.frame_size = fr.mtu;
      be.period = period;
      sc.flows.push_back(be);
    }
  }
  return sc;
}

Picos idle_frame_latency(const NetTopology& topo, const std::vector<std::size_t>& route, std::uint64_t payload,
                         const NetConfig& config) {
  const std::uint64_t bits = (payload + config.framing.overhead) * 8;
  Picos total = 0;
  for (std::size_t k = 0; k < route.size(); ++k) {
    const Port& p = topo.ports()[route[k]];
    total += transmission_time(bits, p.rate) + p.propagation;
    if (k + 1 < route.size() && topo.nodes()[p.to].kind == NodeKind::bridge) total += config.processing_delay;
  }
  return total;
}

NetScenario edgar_network(const sensors::Rig& rig, const EdgarNetOptions& opts) {
  using sensors::Modality;
  NetScenario sc;
  auto& t = sc.topology;
  t.add_node(opts.switch_id, NodeKind::bridge);
  for (const auto& c : opts.compute) {
    t.add_node(c, NodeKind::end_station);
    t.add_link(c, opts.switch_id, opts.uplink_rate, opts.propagation);
  }
  for (const auto& m : rig.sensors()) {
    const auto& dev = m.spec.device;
    if (t.has_node(dev)) continue;
    const bool slow = m.spec.modality == Modality::radar || m.spec.modality == Modality::gnss;
    t.add_node(dev, NodeKind::end_station);
    t.add_link(dev, opts.switch_id, slow ? opts.slow_sensor_rate : opts.sensor_rate, opts.propagation);
  }
  sc.flows = flows_from_rig(rig, opts.flows);
  for (const auto& f : sc.flows) check_source_rate(t, f, sc.config.framing);
  return sc;
}

}  // namespace edgar::net
