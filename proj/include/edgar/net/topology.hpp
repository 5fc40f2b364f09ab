#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace edgar::net {

/// Simulation time in integer picoseconds.
using Picos = std::int64_t;

inline constexpr Picos kPicosPerSecond = 1'000'000'000'000;
inline constexpr Picos us(std::int64_t v) { return v * 1'000'000; }
inline constexpr Picos ns(std::int64_t v) { return v * 1'000; }
inline Picos to_picos(double seconds) { return static_cast<Picos>(std::llround(seconds * 1e12)); }
inline constexpr double to_seconds(Picos p) { return static_cast<double>(p) * 1e-12; }

/// Serialization time of `bits` at `rate` bit/s, rounded up to a whole picosecond.
Picos transmission_time(std::uint64_t bits, std::uint64_t rate);

enum class NodeKind { end_station, bridge };

struct NetNode {
  std::string id;
  NodeKind kind = NodeKind::end_station;
};

/// One direction of a full-duplex link.
struct Port {
  std::size_t from = 0;
  std::size_t to = 0;
  std::uint64_t rate = 0;  // bit/s
  Picos propagation = 0;
};

class NetTopology {
 public:
  /// Throws std::invalid_argument on duplicate or empty ids.
  std::size_t add_node(std::string id, NodeKind kind);
  /// Full-duplex link; throws on unknown endpoints, zero rate, self loops or duplicates.
  void add_link(std::string_view a, std::string_view b, std::uint64_t rate, Picos propagation = 0);

  /// Throws std::invalid_argument when the graph is empty or disconnected.
  void validate() const;

  const std::vector<NetNode>& nodes() const { return nodes_; }
  const std::vector<Port>& ports() const { return ports_; }
  std::size_t node_index(std::string_view id) const;  // throws std::out_of_range
  bool has_node(std::string_view id) const;
  std::size_t count(NodeKind kind) const;

  /// Egress port from `from` towards neighbour `to`.
  std::size_t port_between(std::size_t from, std::size_t to) const;
  /// Fewest-hop route as a list of egress ports; ties go to the lower node index.
  /// Throws std::invalid_argument when no path exists.
  std::vector<std::size_t> route(std::string_view src, std::string_view dst) const;

 private:
  std::vector<NetNode> nodes_;
  std::vector<Port> ports_;
  std::vector<std::vector<std::size_t>> out_;  // per node, egress port indices
};

}  // namespace edgar::net
