#pragma once

#include <optional>
#include <string>
#include <vector>

#include "edgar/net/simulator.hpp"

namespace edgar::net {

struct SrBudget {
  std::optional<double> max_latency;  // seconds, strict upper bound
  std::optional<double> max_jitter;
};

struct SrBudgets {
  SrBudget sr_a{2e-3, 125e-6};
  SrBudget sr_b{50e-3, std::nullopt};
};

struct SrCheck {
  std::string flow_id;
  TrafficClass cls = TrafficClass::BE;
  bool pass = true;
  double max_latency = 0.0;
  double jitter = 0.0;
  std::optional<double> latency_margin;  // budget - measured
  std::optional<double> jitter_margin;
  std::string reason;  // empty on pass
};

/// Best-effort flows always pass. SR flows fail on a budget breach, on any
/// dropped message, or when nothing was delivered.
SrCheck check_sr_class(const FlowStats& stats, const SrBudgets& budgets = {});
std::vector<SrCheck> check_sr_classes(const SimResult& result, const SrBudgets& budgets = {});
bool all_pass(const std::vector<SrCheck>& checks);

}  // namespace edgar::net
