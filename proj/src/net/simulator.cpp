#include "edgar/net/simulator.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <ostream>
#include <queue>
#include <random>
#include <stdexcept>

#include <fmt/format.h>

namespace edgar::net {

std::string_view to_string(Shaping s) {
  switch (s) {
    case Shaping::cbs: return "cbs";
    case Shaping::strict_priority: return "strict_priority";
    case Shaping::none: return "none";
  }
  return "?";
}

Shaping shaping_from_string(std::string_view s) {
  if (s == "cbs") return Shaping::cbs;
  if (s == "strict_priority" || s == "strict") return Shaping::strict_priority;
  if (s == "none" || s == "fifo") return Shaping::none;
  throw std::invalid_argument("unknown shaping '" + std::string(s) + "' (expected cbs, strict_priority or none)");
}

double reserved_bitrate(const Flow& flow, const Framing& framing, Picos interval, std::uint64_t source_rate) {
  const auto seg = segment(flow, framing);
  const double max_frame = static_cast<double>(seg.wire_bits(0, framing));
  const double per_interval =
      static_cast<double>(seg.frames) * static_cast<double>(interval) / static_cast<double>(flow.period);
  double frames = std::max(1.0, std::ceil(per_interval - 1e-9));
  if (source_rate > 0) {
    const double burst = std::ceil(static_cast<double>(source_rate) * to_seconds(interval) / max_frame - 1e-9);
    frames = std::max(frames, std::min(burst, static_cast<double>(seg.frames)));
  }
  return frames * max_frame / to_seconds(interval);
}

std::vector<PortReservation> port_reservations(const NetTopology& topo, const std::vector<Flow>& flows,
                                               const NetConfig& config) {
  std::vector<PortReservation> res(topo.ports().size());
  for (std::size_t p = 0; p < res.size(); ++p) res[p].port = p;
  for (const auto& f : flows) {
    if (f.cls == TrafficClass::BE) continue;
    const bool a = f.cls == TrafficClass::SR_A;
    const auto route = topo.route(f.source, f.destination);
    const std::uint64_t src_rate = route.empty() ? 0 : topo.ports()[route.front()].rate;
    const double r = config.reservation_factor * reserved_bitrate(f, config.framing,
                                                                  a ? config.class_a_interval : config.class_b_interval,
                                                                  src_rate);
    for (std::size_t p : route) {
      if (topo.nodes()[topo.ports()[p].from].kind != NodeKind::bridge) continue;
      (a ? res[p].idle_a : res[p].idle_b) += r;
    }
  }
  for (const auto& r : res) {
    const Port& port = topo.ports()[r.port];
    const double rate = static_cast<double>(port.rate);
    if (r.idle_a + r.idle_b > config.max_reservation_fraction * rate) {
      throw std::invalid_argument(fmt::format("SR reservation {:.6g} Mbit/s on port {} -> {} exceeds {:.6g}% of {:.6g} Mbit/s",
                                              (r.idle_a + r.idle_b) * 1e-6, topo.nodes()[port.from].id,
                                              topo.nodes()[port.to].id, config.max_reservation_fraction * 100.0,
                                              rate * 1e-6));
    }
  }
  return res;
}

const FlowStats& SimResult::flow(std::string_view id) const {
  for (const auto& f : flows) {
    if (f.id == id) return f;
  }
  throw std::out_of_range("no statistics for flow '" + std::string(id) + "'");
}

namespace {

constexpr int kQueues = 8;
constexpr std::uint32_t kNone = std::numeric_limits<std::uint32_t>::max();
constexpr double kCreditEps = 1e-6;  // bits

// Selection (Kick) runs after every arrival of the same instant has been queued.
enum class Kind : std::uint8_t { TxDone = 0, Deliver = 1, Enqueue = 2, Release = 3, Timer = 4, Kick = 5 };

struct Event {
  Picos t;
  Kind kind;
  std::uint64_t seq;
  std::uint32_t a;  // port or flow
  std::uint32_t b;  // frame

  bool operator>(const Event& o) const {
    if (t != o.t) return t > o.t;
    if (kind != o.kind) return kind > o.kind;
    return seq > o.seq;
  }
};

struct Frame {
  std::uint32_t flow = 0;
  std::uint32_t hop = 0;
  std::uint64_t message = 0;
  std::uint64_t segment = 0;
  std::uint64_t bits = 0;
  Picos first_tx = -1;
};

struct PortState {
  std::array<std::deque<std::uint32_t>, kQueues> queues;
  std::array<bool, kQueues> shaped{};
  std::array<CbsState, kQueues> cbs{};
  bool busy = false;
  int tx_prio = -1;
  std::uint32_t tx_frame = kNone;
  Picos last = 0;
  Picos timer_at = -1;
  bool kick_pending = false;
};

struct Message {
  std::uint64_t remaining = 0;
  bool dropped = false;
  bool delivered = false;
};

class Engine {
 public:
  Engine(const NetTopology& topo, const std::vector<Flow>& flows, const NetConfig& cfg, const SimOptions& opts)
      : topo_(topo), flows_(flows), cfg_(cfg), opts_(opts) {}

  SimResult run();

 private:
  void push(Picos t, Kind k, std::uint32_t a, std::uint32_t b = kNone) { events_.push({t, k, seq_++, a, b}); }
  void advance(std::size_t p, Picos now);
  void enqueue(std::size_t p, std::uint32_t frame, Picos now);
  void try_start(std::size_t p, Picos now);
  void kick(std::size_t p, Picos now);
  void drop(std::uint32_t frame);
  std::uint32_t alloc(const Frame& f);
  int queue_of(const Flow& f) const { return cfg_.shaping == Shaping::none ? 0 : f.effective_priority(); }

  const NetTopology& topo_;
  const std::vector<Flow>& flows_;
  const NetConfig& cfg_;
  const SimOptions& opts_;

  std::vector<std::vector<std::size_t>> routes_;
  std::vector<Segmentation> segs_;
  std::vector<PortState> ports_;
  std::vector<Frame> frames_;
  std::vector<std::uint32_t> free_;
  std::vector<std::vector<Message>> messages_;
  std::vector<std::vector<Picos>> release_times_;
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
  std::uint64_t seq_ = 0;
  SimResult result_;
  std::vector<long double> lat_sum_;
};

std::uint32_t Engine::alloc(const Frame& f) {
  if (!free_.empty()) {
    const std::uint32_t i = free_.back();
    free_.pop_back();
    frames_[i] = f;
    return i;
  }
  frames_.push_back(f);
  return static_cast<std::uint32_t>(frames_.size() - 1);
}

void Engine::advance(std::size_t p, Picos now) {
  auto& ps = ports_[p];
  const double dt = to_seconds(now - ps.last);
  for (int q = 0; q < kQueues; ++q) {
    if (!ps.shaped[q]) continue;
    auto& s = ps.cbs[q];
    const double c = cbs_credit_unclamped(s, dt, ps.busy && ps.tx_prio == q, !ps.queues[q].empty());
    auto& audit = result_.cbs;
    ++audit.updates;
    const double excess = std::max(c - s.hi_credit, s.lo_credit - c);
    if (excess > kCreditEps) {
      ++audit.violations;
      audit.max_excess = std::max(audit.max_excess, excess);
    }
    s.credit = std::clamp(c, s.lo_credit, s.hi_credit);
  }
  ps.last = now;
}

void Engine::drop(std::uint32_t frame) {
  const Frame& f = frames_[frame];
  auto& st = result_.flows[f.flow];
  ++st.frames_dropped;
  auto& m = messages_[f.flow][f.message];
  --m.remaining;
  if (!m.dropped) {
    m.dropped = true;
    ++st.dropped;
  }
  free_.push_back(frame);
}

void Engine::enqueue(std::size_t p, std::uint32_t frame, Picos now) {
  advance(p, now);
  auto& q = ports_[p].queues[queue_of(flows_[frames_[frame].flow])];
  const bool bridge = topo_.nodes()[topo_.ports()[p].from].kind == NodeKind::bridge;
  if (bridge && q.size() >= cfg_.queue_capacity) {
    drop(frame);
    return;
  }
  q.push_back(frame);
  kick(p, now);
}

void Engine::kick(std::size_t p, Picos now) {
  auto& ps = ports_[p];
  if (ps.busy || ps.kick_pending) return;
  ps.kick_pending = true;
  push(now, Kind::Kick, static_cast<std::uint32_t>(p));
}

void Engine::try_start(std::size_t p, Picos now) {
  auto& ps = ports_[p];
  if (ps.busy) return;
  Picos wake = -1;
  for (int q = kQueues - 1; q >= 0; --q) {
    if (ps.queues[q].empty()) continue;
    if (ps.shaped[q] && ps.cbs[q].credit < -kCreditEps) {
      const double secs = -ps.cbs[q].credit / ps.cbs[q].idle_slope;
      const Picos t = now + std::max<Picos>(1, static_cast<Picos>(std::ceil(secs * 1e12)));
      if (wake < 0 || t < wake) wake = t;
      continue;
    }
    const std::uint32_t fi = ps.queues[q].front();
    ps.queues[q].pop_front();
    ps.busy = true;
    ps.tx_prio = q;
    ps.tx_frame = fi;
    Frame& f = frames_[fi];
    if (f.first_tx < 0) f.first_tx = now;
    push(now + transmission_time(f.bits, topo_.ports()[p].rate), Kind::TxDone, static_cast<std::uint32_t>(p));
    return;
  }
  if (wake >= 0 && (ps.timer_at < 0 || wake < ps.timer_at || ps.timer_at < now)) {
    ps.timer_at = wake;
    push(wake, Kind::Timer, static_cast<std::uint32_t>(p));
  }
}

SimResult Engine::run() {
  if (opts_.duration <= 0) throw std::invalid_argument("simulation duration must be > 0");
  if (cfg_.queue_capacity == 0) throw std::invalid_argument("queue capacity must be > 0");
  if (cfg_.processing_delay < 0) throw std::invalid_argument("processing delay must be >= 0");
  if (!(cfg_.reservation_factor > 0.0)) throw std::invalid_argument("reservation factor must be > 0");
  if (cfg_.framing.mtu == 0) throw std::invalid_argument("MTU must be > 0");
  topo_.validate();

  const auto& tports = topo_.ports();
  ports_.assign(tports.size(), PortState{});
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    const auto& f = flows_[i];
    f.validate();
    for (std::size_t j = 0; j < i; ++j) {
      if (flows_[j].id == f.id) throw std::invalid_argument("duplicate flow id '" + f.id + "'");
    }
    if (cfg_.shaping == Shaping::cbs && f.cls != TrafficClass::BE && f.effective_priority() != default_priority(f.cls)) {
      throw std::invalid_argument("flow '" + f.id + "': SR flows must use their class priority under CBS");
    }
    routes_.push_back(topo_.route(f.source, f.destination));
    check_source_rate(topo_, f, cfg_.framing);
    segs_.push_back(segment(f, cfg_.framing));
  }

  if (cfg_.shaping == Shaping::cbs) {
    const double mtu_bits = static_cast<double>((cfg_.framing.mtu + cfg_.framing.overhead) * 8);
    const int pa = default_priority(TrafficClass::SR_A);
    const int pb = default_priority(TrafficClass::SR_B);
    for (const auto& r : port_reservations(topo_, flows_, cfg_)) {
      const double rate = static_cast<double>(tports[r.port].rate);
      auto& ps = ports_[r.port];
      if (r.idle_a > 0.0) {
        ps.shaped[pa] = true;
        ps.cbs[pa] = cbs_class_a(rate, r.idle_a, mtu_bits, mtu_bits);
      }
      if (r.idle_b > 0.0) {
        ps.shaped[pb] = true;
        ps.cbs[pb] = cbs_class_b(rate, r.idle_a, r.idle_b, mtu_bits, mtu_bits, mtu_bits);
      }
    }
  }

  result_.flows.resize(flows_.size());
  messages_.resize(flows_.size());
  release_times_.resize(flows_.size());
  lat_sum_.assign(flows_.size(), 0.0L);
  std::mt19937_64 rng(opts_.seed);
  for (std::size_t i = 0; i < flows_.size(); ++i) {
    const auto& f = flows_[i];
    result_.flows[i].id = f.id;
    result_.flows[i].cls = f.cls;
    Picos off = 0;
    if (f.offset) {
      off = *f.offset;
    } else {
      // Offsets on a 1 ns grid keep runs reproducible across platforms.
      const auto slots = static_cast<std::uint64_t>(std::max<Picos>(1, f.period / ns(1)));
      off = static_cast<Picos>(rng() % slots) * ns(1);
    }
    if (off < opts_.duration) push(off, Kind::Release, static_cast<std::uint32_t>(i));
  }

  while (!events_.empty()) {
    const Event ev = events_.top();
    if (ev.t > opts_.duration) break;
    events_.pop();
    ++result_.events;
    switch (ev.kind) {
      case Kind::Release: {
        const std::size_t fi = ev.a;
        const auto& f = flows_[fi];
        auto& st = result_.flows[fi];
        const std::uint64_t msg = st.generated++;
        messages_[fi].push_back({segs_[fi].frames, false, false});
        release_times_[fi].push_back(ev.t);
        const std::size_t p0 = routes_[fi].front();
        for (std::uint64_t k = 0; k < segs_[fi].frames; ++k) {
          ++st.frames_generated;
          const std::uint32_t fr = alloc({static_cast<std::uint32_t>(fi), 0, msg, k, segs_[fi].wire_bits(k, cfg_.framing), -1});
          enqueue(p0, fr, ev.t);
        }
        if (ev.t + f.period < opts_.duration) push(ev.t + f.period, Kind::Release, ev.a);
        break;
      }
      case Kind::TxDone: {
        const std::size_t p = ev.a;
        advance(p, ev.t);
        auto& ps = ports_[p];
        const std::uint32_t fr = ps.tx_frame;
        ps.busy = false;
        ps.tx_prio = -1;
        ps.tx_frame = kNone;
        Frame& f = frames_[fr];
        ++f.hop;
        const auto& route = routes_[f.flow];
        const Port& port = tports[p];
        if (f.hop == route.size()) {
          push(ev.t + port.propagation, Kind::Deliver, 0, fr);
        } else {
          const bool bridge = topo_.nodes()[port.to].kind == NodeKind::bridge;
          push(ev.t + port.propagation + (bridge ? cfg_.processing_delay : 0), Kind::Enqueue,
               static_cast<std::uint32_t>(route[f.hop]), fr);
        }
        kick(p, ev.t);
        break;
      }
      case Kind::Enqueue: enqueue(ev.a, ev.b, ev.t); break;
      case Kind::Timer: {
        auto& ps = ports_[ev.a];
        if (ps.timer_at == ev.t) ps.timer_at = -1;
        advance(ev.a, ev.t);
        kick(ev.a, ev.t);
        break;
      }
      case Kind::Kick: {
        ports_[ev.a].kick_pending = false;
        advance(ev.a, ev.t);
        try_start(ev.a, ev.t);
        break;
      }
      case Kind::Deliver: {
        const Frame& f = frames_[ev.b];
        auto& st = result_.flows[f.flow];
        ++st.frames_delivered;
        auto& m = messages_[f.flow][f.message];
        --m.remaining;
        const Picos released = release_times_[f.flow][f.message];
        if (opts_.record_frames) result_.frames.push_back({f.flow, f.message, f.segment, released, f.first_tx, ev.t});
        if (m.remaining == 0 && !m.dropped) {
          m.delivered = true;
          const Picos lat = ev.t - released;
          if (st.delivered == 0) {
            st.lat_min = st.lat_max = lat;
          } else {
            st.lat_min = std::min(st.lat_min, lat);
            st.lat_max = std::max(st.lat_max, lat);
          }
          ++st.delivered;
          lat_sum_[f.flow] += static_cast<long double>(lat);
        }
        free_.push_back(ev.b);
        break;
      }
    }
  }

  for (std::size_t i = 0; i < flows_.size(); ++i) {
    auto& st = result_.flows[i];
    st.in_flight = st.generated - st.delivered - st.dropped;
    st.frames_in_flight = st.frames_generated - st.frames_delivered - st.frames_dropped;
    if (st.delivered) st.lat_mean = static_cast<double>(lat_sum_[i] / st.delivered) * 1e-12;
  }
  return std::move(result_);
}

}  // namespace

SimResult simulate(const NetTopology& topo, const std::vector<Flow>& flows, const NetConfig& config,
                   const SimOptions& opts) {
  return Engine(topo, flows, config, opts).run();
}

void write_flow_stats_csv(std::ostream& os, const SimResult& result) {
  os << "flow_id,class,count,lat_min_s,lat_mean_s,lat_max_s,jitter_s,drops\n";
  for (const auto& f : result.flows) {
    os << fmt::format("{},{},{},{:.6e},{:.6e},{:.6e},{:.6e},{}\n", f.id, to_string(f.cls), f.delivered,
                      to_seconds(f.lat_min), f.lat_mean, to_seconds(f.lat_max), to_seconds(f.jitter()), f.dropped);
  }
}

}  // namespace edgar::net
