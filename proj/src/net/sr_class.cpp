#include "edgar/net/sr_class.hpp"

#include <algorithm>

#include <fmt/format.h>

namespace edgar::net {

SrCheck check_sr_class(const FlowStats& stats, const SrBudgets& budgets) {
  SrCheck c;
  c.flow_id = stats.id;
  c.cls = stats.cls;
  c.max_latency = to_seconds(stats.lat_max);
  c.jitter = to_seconds(stats.jitter());
  if (stats.cls == TrafficClass::BE) return c;

  const SrBudget& b = stats.cls == TrafficClass::SR_A ? budgets.sr_a : budgets.sr_b;
  std::vector<std::string> why;
  if (stats.delivered == 0) why.push_back("no message delivered");
  if (stats.dropped > 0) why.push_back(fmt::format("{} messages dropped", stats.dropped));
  if (b.max_latency) {
    c.latency_margin = *b.max_latency - c.max_latency;
    if (!(c.max_latency < *b.max_latency)) {
      why.push_back(fmt::format("max latency {:.6g} s >= {:.6g} s", c.max_latency, *b.max_latency));
    }
  }
  if (b.max_jitter) {
    c.jitter_margin = *b.max_jitter - c.jitter;
    if (!(c.jitter < *b.max_jitter)) {
      why.push_back(fmt::format("jitter {:.6g} s >= {:.6g} s", c.jitter, *b.max_jitter));
    }
  }
  c.pass = why.empty();
  for (std::size_t i = 0; i < why.size(); ++i) c.reason += (i ? "; " : "") + why[i];
  return c;
}

std::vector<SrCheck> check_sr_classes(const SimResult& result, const SrBudgets& budgets) {
  std::vector<SrCheck> out;
  out.reserve(result.flows.size());
  for (const auto& f : result.flows) out.push_back(check_sr_class(f, budgets));
  return out;
}

bool all_pass(const std::vector<SrCheck>& checks) {
  return std::all_of(checks.begin(), checks.end(), [](const SrCheck& c) { return c.pass; });
}

}  // namespace edgar::net
