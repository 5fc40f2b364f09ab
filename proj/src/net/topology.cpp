#include "edgar/net/topology.hpp"

#include <algorithm>
#include <deque>
#include <limits>
#include <stdexcept>

namespace edgar::net {

namespace {
__extension__ typedef unsigned __int128 u128;
}  // namespace

Picos transmission_time(std::uint64_t bits, std::uint64_t rate) {
  if (rate == 0) throw std::invalid_argument("link rate must be positive");
  const u128 num = static_cast<u128>(bits) * static_cast<u128>(kPicosPerSecond);
  return static_cast<Picos>((num + rate - 1) / rate);
}

std::size_t NetTopology::add_node(std::string id, NodeKind kind) {
  if (id.empty()) throw std::invalid_argument("network node with empty id");
  if (has_node(id)) throw std::invalid_argument("duplicate network node '" + id + "'");
  nodes_.push_back({std::move(id), kind});
  out_.emplace_back();
  return nodes_.size() - 1;
}

void NetTopology::add_link(std::string_view a, std::string_view b, std::uint64_t rate, Picos propagation) {
  const std::size_t ia = node_index(a);
  const std::size_t ib = node_index(b);
  if (ia == ib) throw std::invalid_argument("self loop on '" + std::string(a) + "'");
  if (rate == 0) {
    throw std::invalid_argument("link " + std::string(a) + " <-> " + std::string(b) + " has zero rate");
  }
  if (propagation < 0) throw std::invalid_argument("negative propagation delay");
  for (std::size_t p : out_[ia]) {
    if (ports_[p].to == ib) {
      throw std::invalid_argument("duplicate link " + std::string(a) + " <-> " + std::string(b));
    }
  }
  out_[ia].push_back(ports_.size());
  ports_.push_back({ia, ib, rate, propagation});
  out_[ib].push_back(ports_.size());
  ports_.push_back({ib, ia, rate, propagation});
}

void NetTopology::validate() const {
  if (nodes_.empty()) throw std::invalid_argument("network has no nodes");
  std::vector<char> seen(nodes_.size(), 0);
  std::deque<std::size_t> q{0};
  seen[0] = 1;
  while (!q.empty()) {
    const std::size_t n = q.front();
    q.pop_front();
    for (std::size_t p : out_[n]) {
      const std::size_t m = ports_[p].to;
      if (!seen[m]) {
        seen[m] = 1;
        q.push_back(m);
      }
    }
  }
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (!seen[i]) throw std::invalid_argument("network is disconnected: '" + nodes_[i].id + "' unreachable");
  }
}

std::size_t NetTopology::node_index(std::string_view id) const {
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    if (nodes_[i].id == id) return i;
  }
  throw std::out_of_range("unknown network node '" + std::string(id) + "'");
}

bool NetTopology::has_node(std::string_view id) const {
  return std::any_of(nodes_.begin(), nodes_.end(), [&](const NetNode& n) { return n.id == id; });
}

std::size_t NetTopology::count(NodeKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [&](const NetNode& n) { return n.kind == kind; }));
}

std::size_t NetTopology::port_between(std::size_t from, std::size_t to) const {
  for (std::size_t p : out_.at(from)) {
    if (ports_[p].to == to) return p;
  }
  throw std::out_of_range("no link " + nodes_.at(from).id + " -> " + nodes_.at(to).id);
}

std::vector<std::size_t> NetTopology::route(std::string_view src, std::string_view dst) const {
  const std::size_t s = node_index(src);
  const std::size_t d = node_index(dst);
  if (s == d) throw std::invalid_argument("route source equals destination '" + std::string(src) + "'");
  constexpr std::size_t none = std::numeric_limits<std::size_t>::max();
  std::vector<std::size_t> via(nodes_.size(), none);  // incoming port
  std::vector<char> seen(nodes_.size(), 0);
  std::deque<std::size_t> q{s};
  seen[s] = 1;
  while (!q.empty() && !seen[d]) {
    const std::size_t n = q.front();
    q.pop_front();
    auto ports = out_[n];
    std::sort(ports.begin(), ports.end(), [&](std::size_t a, std::size_t b) { return ports_[a].to < ports_[b].to; });
    for (std::size_t p : ports) {
      const std::size_t m = ports_[p].to;
      if (seen[m]) continue;
      seen[m] = 1;
      via[m] = p;
      q.push_back(m);
    }
  }
  if (!seen[d]) throw std::invalid_argument("no path from '" + std::string(src) + "' to '" + std::string(dst) + "'");
  std::vector<std::size_t> path;
  for (std::size_t n = d; n != s; n = ports_[via[n]].from) path.push_back(via[n]);
  std::reverse(path.begin(), path.end());
  return path;
}

}  // namespace edgar::net
