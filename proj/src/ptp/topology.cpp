#include "edgar/ptp/topology.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <unordered_map>

namespace edgar::ptp {

namespace {

[[noreturn]] void bad(const std::string& msg) { throw std::invalid_argument("ptp topology: " + msg); }

}  // namespace

SyncTopology::SyncTopology(std::vector<PtpNode> nodes) : nodes_(std::move(nodes)) {
  std::unordered_map<std::string, std::size_t> index;
  std::size_t gms = 0;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto& n = nodes_[i];
    if (n.id.empty()) bad("node with empty id");
    if (!index.emplace(n.id, i).second) bad("duplicate node id '" + n.id + "'");
    if (n.role == ClockRole::GM) {
      ++gms;
      gm_ = i;
    }
  }
  if (gms != 1) bad("exactly one GM required, found " + std::to_string(gms));
  for (const auto& n : nodes_) {
    if (n.role == ClockRole::GM) {
      if (!n.parent.empty()) bad("GM '" + n.id + "' must be the root");
    } else {
      if (n.parent.empty()) bad("node '" + n.id + "' has no parent");
      if (!index.count(n.parent)) bad("node '" + n.id + "' has unknown parent '" + n.parent + "'");
      const auto& p = nodes_[index.at(n.parent)];
      if (p.role == ClockRole::OC) bad("OC '" + p.id + "' cannot serve '" + n.id + "'");
      if (!(n.link_delay >= 0.0)) bad("node '" + n.id + "' has a negative link delay");
    }
    if (n.role == ClockRole::TC) {
      if (!(n.residence.min >= 0.0 && n.residence.max >= n.residence.min)) bad("TC '" + n.id + "' residence range");
      if (n.initial_offset != 0.0 || n.drift_rate != 0.0) bad("TC '" + n.id + "' carries no clock state");
    }
    // Construct a clock to reuse its range checks.
    try {
      Clock(n.role, n.initial_offset, n.drift_rate, n.noise_sigma);
    } catch (const std::invalid_argument& e) {
      bad("node '" + n.id + "': " + e.what());
    }
  }
  // Reachability and acyclicity.
  for (const auto& n : nodes_) {
    std::size_t hops = 0;
    const PtpNode* cur = &n;
    while (cur->role != ClockRole::GM) {
      cur = &nodes_[index.at(cur->parent)];
      if (++hops > nodes_.size()) bad("cycle through '" + n.id + "'");
    }
  }
  for (const auto& n : nodes_) {
    if (n.role == ClockRole::TC) {
      const bool has_child =
          std::any_of(nodes_.begin(), nodes_.end(), [&](const PtpNode& c) { return c.parent == n.id; });
      if (!has_child) bad("TC '" + n.id + "' forwards to nobody");
    }
  }
}

const PtpNode& SyncTopology::node(std::string_view id) const { return nodes_[index_of(id)]; }

std::size_t SyncTopology::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return i;
  }
  throw std::out_of_range("unknown PTP node '" + std::string(id) + "'");
}

const PtpNode& SyncTopology::master_of(std::string_view id) const {
  const PtpNode* cur = &node(id);
  if (cur->role == ClockRole::GM) throw std::invalid_argument("the GM has no master");
  do {
    cur = &node(cur->parent);
  } while (cur->role == ClockRole::TC);
  return *cur;
}

SyncPath SyncTopology::path_to_master(std::string_view id) const {
  SyncPath path;
  const PtpNode* cur = &node(id);
  if (cur->role == ClockRole::GM || cur->role == ClockRole::TC) {
    throw std::invalid_argument("node '" + std::string(id) + "' does not synchronize");
  }
  // Collected slave-first, reversed below.
  for (;;) {
    path.delay_ms.push_back(cur->link_delay);
    path.delay_sm.push_back(cur->uplink_delay());
    const PtpNode& up = node(cur->parent);
    if (up.role != ClockRole::TC) break;
    path.transparent_clocks.push_back(up.residence);
    cur = &up;
  }
  std::reverse(path.delay_ms.begin(), path.delay_ms.end());
  std::reverse(path.delay_sm.begin(), path.delay_sm.end());
  std::reverse(path.transparent_clocks.begin(), path.transparent_clocks.end());
  return path;
}

int SyncTopology::level(std::string_view id) const {
  int l = 0;
  const PtpNode* cur = &node(id);
  while (cur->role != ClockRole::GM) {
    if (cur->role != ClockRole::TC) ++l;
    cur = &node(cur->parent);
  }
  return l;
}

std::vector<std::string> SyncTopology::synchronized_nodes() const {
  std::vector<std::pair<int, std::size_t>> order;
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const auto r = nodes_[i].role;
    if (r == ClockRole::BC || r == ClockRole::OC) order.emplace_back(level(nodes_[i].id), i);
  }
  std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> ids;
  for (const auto& [l, i] : order) ids.push_back(nodes_[i].id);
  return ids;
}

SyncTopology SyncTopology::with_residence_spread(double factor) const {
  auto nodes = nodes_;
  for (auto& n : nodes) {
    if (n.role != ClockRole::TC) continue;
    const double mid = 0.5 * (n.residence.min + n.residence.max);
    const double half = 0.5 * (n.residence.max - n.residence.min) * factor;
    n.residence = {std::max(0.0, mid - half), mid + half};
  }
  return SyncTopology(std::move(nodes));
}

SyncTopology edgar_ptp_topology(std::span<const std::string> sensor_devices, const PtpDefaults& d,
                                std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ 0x5eedc10cull);
  std::uniform_real_distribution<double> offset(-d.initial_offset_bound, d.initial_offset_bound);
  std::bernoulli_distribution sign(0.5);
  const auto clock_node = [&](std::string id, ClockRole role, std::string parent) {
    PtpNode n;
    n.id = std::move(id);
    n.role = role;
    n.parent = std::move(parent);
    n.link_delay = role == ClockRole::GM ? 0.0 : d.link_delay;
    n.drift_rate = sign(rng) ? d.drift_bound : -d.drift_bound;
    n.noise_sigma = d.noise_sigma;
    n.initial_offset = role == ClockRole::GM ? 0.0 : offset(rng);
    return n;
  };
  std::vector<PtpNode> nodes;
  nodes.push_back(clock_node("ptp_gm", ClockRole::GM, ""));
  nodes.push_back(clock_node("hpc_x86", ClockRole::BC, "ptp_gm"));
  PtpNode sw;
  sw.id = "switch";
  sw.role = ClockRole::TC;
  sw.parent = "hpc_x86";
  sw.link_delay = d.link_delay;
  sw.residence = d.switch_residence;
  nodes.push_back(sw);
  nodes.push_back(clock_node("hpc_arm", ClockRole::OC, "switch"));
  for (const auto& dev : sensor_devices) nodes.push_back(clock_node(dev, ClockRole::OC, "switch"));
  return SyncTopology(std::move(nodes));
}

}  // namespace edgar::ptp
