#include "edgar/ptp/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <queue>
#include <stdexcept>

#include <fmt/format.h>

namespace edgar::ptp {

namespace {

enum class EventKind { Sample = 0, ServoUpdate = 1, Exchange = 2 };

struct Event {
  double t;
  EventKind kind;
  std::uint64_t seq;
  std::size_t node;       // topology index
  double estimate = 0.0;  // ServoUpdate payload
  std::size_t sample = 0;

  bool operator>(const Event& o) const {
    if (t != o.t) return t > o.t;
    if (kind != o.kind) return static_cast<int>(kind) > static_cast<int>(o.kind);
    return seq > o.seq;
  }
};

}  // namespace

const NodeTrace& SyncResult::trace(const std::string& id) const {
  for (const auto& tr : traces) {
    if (tr.id == id) return tr;
  }
  throw std::out_of_range("no trace for node '" + id + "'");
}

double SyncResult::offset_at(const std::string& id, double t) const {
  const auto& tr = trace(id);
  if (times.empty()) return 0.0;
  if (t <= times.front()) return tr.offset.front();
  if (t >= times.back()) return tr.offset.back();
  const auto it = std::upper_bound(times.begin(), times.end(), t);
  const std::size_t hi = static_cast<std::size_t>(it - times.begin());
  const std::size_t lo = hi - 1;
  const double w = (t - times[lo]) / (times[hi] - times[lo]);
  return tr.offset[lo] + w * (tr.offset[hi] - tr.offset[lo]);
}

SyncResult run_sync_simulation(const SyncTopology& topology, const SimulationOptions& opts) {
  if (!(opts.duration > 0.0) || !std::isfinite(opts.duration)) throw std::invalid_argument("duration must be > 0");
  if (!(opts.sync_interval > 0.0)) throw std::invalid_argument("sync interval must be > 0");
  if (!(opts.level_stagger >= 0.0)) throw std::invalid_argument("level stagger must be >= 0");
  if (!(opts.steady_fraction > 0.0 && opts.steady_fraction <= 1.0)) {
    throw std::invalid_argument("steady fraction must lie in (0, 1]");
  }
  const double period = opts.trace_period > 0.0 ? opts.trace_period : opts.sync_interval;

  const auto& nodes = topology.nodes();
  std::vector<Clock> clocks;
  clocks.reserve(nodes.size());
  for (const auto& n : nodes) clocks.emplace_back(n.role, n.initial_offset, n.drift_rate, n.noise_sigma);
  std::vector<PiServo> servos(nodes.size(), PiServo(opts.gains, opts.sync_interval));

  const auto synced = topology.synchronized_nodes();
  std::vector<std::size_t> synced_idx;
  std::vector<std::size_t> master_idx(nodes.size(), 0);
  std::vector<SyncPath> paths(nodes.size());
  std::vector<int> levels(nodes.size(), 0);
  for (const auto& id : synced) {
    const std::size_t i = topology.index_of(id);
    synced_idx.push_back(i);
    master_idx[i] = topology.index_of(topology.master_of(id).id);
    paths[i] = topology.path_to_master(id);
    levels[i] = topology.level(id);
  }

  SyncResult result;
  const auto n_samples = static_cast<std::size_t>(std::floor(opts.duration / period + 1e-9)) + 1;
  result.times.reserve(n_samples);
  for (const auto& id : synced) result.traces.push_back({id, {}, -1.0});
  for (auto& tr : result.traces) tr.offset.reserve(n_samples);

  std::priority_queue<Event, std::vector<Event>, std::greater<>> queue;
  std::uint64_t seq = 0;
  for (std::size_t k = 0; k < n_samples; ++k) {
    queue.push({static_cast<double>(k) * period, EventKind::Sample, seq++, 0, 0.0, k});
  }
  for (std::size_t tick = 0;; ++tick) {
    const double base = static_cast<double>(tick) * opts.sync_interval;
    if (base >= opts.duration) break;
    for (std::size_t i : synced_idx) {
      const double t = base + (levels[i] - 1) * opts.level_stagger;
      if (t < opts.duration) queue.push({t, EventKind::Exchange, seq++, i});
    }
  }

  std::mt19937_64 rng(opts.seed);
  const std::size_t gm = topology.index_of(topology.grandmaster().id);
  std::vector<std::size_t> trace_of(nodes.size(), 0);
  for (std::size_t k = 0; k < synced_idx.size(); ++k) trace_of[synced_idx[k]] = k;

  while (!queue.empty()) {
    const Event ev = queue.top();
    queue.pop();
    switch (ev.kind) {
      case EventKind::Sample: {
        result.times.push_back(ev.t);
        const double gm_offset = clocks[gm].offset_at(ev.t);
        for (std::size_t k = 0; k < synced_idx.size(); ++k) {
          result.traces[k].offset.push_back(clocks[synced_idx[k]].offset_at(ev.t) - gm_offset);
        }
        break;
      }
      case EventKind::Exchange: {
        const auto ex = sync_exchange(clocks[master_idx[ev.node]], clocks[ev.node], paths[ev.node], ev.t, rng,
                                      opts.exchange);
        ++result.summary.exchanges;
        if (ex.completed_at <= opts.duration) {
          queue.push({ex.completed_at, EventKind::ServoUpdate, seq++, ev.node, ex.estimate.offset});
        }
        break;
      }
      case EventKind::ServoUpdate: {
        auto& tr = result.traces[trace_of[ev.node]];
        if (tr.first_lock < 0.0) tr.first_lock = ev.t;
        servos[ev.node].update(clocks[ev.node], ev.t, ev.estimate);
        break;
      }
    }
  }

  const double steady_start = opts.duration * (1.0 - opts.steady_fraction);
  double sum_sq = 0.0;
  std::size_t count = 0;
  auto& s = result.summary;
  for (const auto& tr : result.traces) {
    NodeSummary ns{tr.id};
    double node_sq = 0.0;
    std::size_t node_n = 0;
    for (std::size_t k = 0; k < result.times.size(); ++k) {
      const double t = result.times[k];
      const double a = std::abs(tr.offset[k]);
      if (tr.first_lock >= 0.0 && t >= tr.first_lock) ns.max_abs_after_lock = std::max(ns.max_abs_after_lock, a);
      if (t >= steady_start) {
        ns.max_abs_steady = std::max(ns.max_abs_steady, a);
        node_sq += a * a;
        ++node_n;
      }
    }
    ns.rms_steady = node_n ? std::sqrt(node_sq / static_cast<double>(node_n)) : 0.0;
    sum_sq += node_sq;
    count += node_n;
    s.max_abs_steady = std::max(s.max_abs_steady, ns.max_abs_steady);
    s.max_abs_after_lock = std::max(s.max_abs_after_lock, ns.max_abs_after_lock);
    s.nodes.push_back(ns);
  }
  s.rms_steady = count ? std::sqrt(sum_sq / static_cast<double>(count)) : 0.0;
  return result;
}

void write_trace_csv(std::ostream& os, const SyncResult& result) {
  os << "time_s,node_id,offset_s\n";
  for (std::size_t k = 0; k < result.times.size(); ++k) {
    for (const auto& tr : result.traces) {
      os << fmt::format("{:.6f},{},{:.6e}\n", result.times[k], tr.id, tr.offset[k]);
    }
  }
}

}  // namespace edgar::ptp
