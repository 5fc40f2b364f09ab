#include "edgar/net/flows.hpp"

#include <stdexcept>

#include <fmt/format.h>

namespace edgar::net {

std::string_view to_string(TrafficClass c) {
  switch (c) {
    case TrafficClass::SR_A: return "SR-A";
    case TrafficClass::SR_B: return "SR-B";
    case TrafficClass::BE: return "BE";
  }
  return "?";
}

TrafficClass traffic_class_from_string(std::string_view s) {
  if (s == "SR-A" || s == "sr_a" || s == "A") return TrafficClass::SR_A;
  if (s == "SR-B" || s == "sr_b" || s == "B") return TrafficClass::SR_B;
  if (s == "BE" || s == "be") return TrafficClass::BE;
  throw std::invalid_argument("unknown traffic class '" + std::string(s) + "' (expected SR-A, SR-B or BE)");
}

int default_priority(TrafficClass c) {
  switch (c) {
    case TrafficClass::SR_A: return 3;
    case TrafficClass::SR_B: return 2;
    case TrafficClass::BE: return 0;
  }
  return 0;
}

void Flow::validate() const {
  const std::string name = "flow '" + id + "'";
  if (id.empty()) throw std::invalid_argument("flow with empty id");
  if (source.empty() || destination.empty()) throw std::invalid_argument(name + ": missing endpoint");
  if (source == destination) throw std::invalid_argument(name + ": source equals destination");
  if (frame_size == 0) throw std::invalid_argument(name + ": frame size must be > 0");
  if (period <= 0) throw std::invalid_argument(name + ": period must be > 0");
  if (offset && *offset < 0) throw std::invalid_argument(name + ": offset must be >= 0");
  if (priority > 7) throw std::invalid_argument(name + ": priority must lie in 0..7");
}

std::uint64_t Segmentation::wire_bits(std::uint64_t k, const Framing& f) const {
  const std::uint64_t payload = (k + 1 == frames) ? last_payload : f.mtu;
  return (payload + f.overhead) * 8;
}

std::uint64_t Segmentation::total_wire_bits(const Framing& f) const {
  if (frames == 0) return 0;
  return ((frames - 1) * (f.mtu + f.overhead) + last_payload + f.overhead) * 8;
}

Segmentation segment(const Flow& flow, const Framing& framing) {
  if (framing.mtu == 0) throw std::invalid_argument("MTU must be > 0");
  Segmentation s;
  s.frames = (flow.frame_size + framing.mtu - 1) / framing.mtu;
  s.last_payload = flow.frame_size - (s.frames - 1) * framing.mtu;
  return s;
}

double wire_bitrate(const Flow& flow, const Framing& framing) {
  return static_cast<double>(segment(flow, framing).total_wire_bits(framing)) / to_seconds(flow.period);
}

double payload_bitrate(const Flow& flow) {
  return static_cast<double>(flow.frame_size) * 8.0 / to_seconds(flow.period);
}

void check_source_rate(const NetTopology& topo, const Flow& flow, const Framing& framing) {
  const auto path = topo.route(flow.source, flow.destination);
  const Port& first = topo.ports()[path.front()];
  const double need = wire_bitrate(flow, framing);
  if (need > static_cast<double>(first.rate)) {
    throw std::invalid_argument(fmt::format("flow '{}' needs {:.6g} Gbit/s but link {} -> {} carries {:.6g} Gbit/s",
                                            flow.id, need * 1e-9, topo.nodes()[first.from].id,
                                            topo.nodes()[first.to].id, static_cast<double>(first.rate) * 1e-9));
  }
}

std::vector<Flow> flows_from_rig(const sensors::Rig& rig, const RigFlowOptions& opts) {
  using sensors::Modality;
  std::vector<Flow> out;
  for (const auto& m : rig.sensors()) {
    const auto& s = m.spec;
    if (s.payload_per_frame == 0) continue;
    Flow f;
    f.id = s.id;
    f.source = s.device;
    f.destination = opts.destination;
    switch (s.modality) {
      case Modality::camera: f.cls = opts.camera; break;
      case Modality::lidar: f.cls = opts.lidar; break;
      case Modality::radar: f.cls = opts.radar; break;
      case Modality::gnss: f.cls = opts.gnss; break;
      case Modality::microphone: f.cls = opts.microphone; break;
    }
    f.frame_size = s.payload_per_frame;
    f.period = to_picos(1.0 / s.rate);
    f.validate();
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace edgar::net
