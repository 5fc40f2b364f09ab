#include "edgar/twin/report.hpp"

#include <fmt/format.h>

#include "edgar/common/format.hpp"

namespace edgar::twin {

namespace {

std::string opt_num(const std::optional<double>& v) { return v ? fmt_num(*v) : "none"; }

void line(std::string& out, std::string_view key, std::string_view value) {
  out += fmt::format("  {}: {}\n", key, value);
}

void header(std::string& out, std::string_view name) { out += fmt::format("[{}]\n", name); }

// Returns true when the section body should follow.
bool status(std::string& out, std::string_view name, bool enabled, bool present) {
  header(out, name);
  if (!enabled) {
    line(out, "status", "disabled");
    return false;
  }
  if (!present) {
    line(out, "status", "not run");
    return false;
  }
  return true;
}

void render_dynamics(std::string& out, const ScenarioReport& r) {
  if (!status(out, "dynamics", true, r.dynamics.has_value())) return;
  const auto& d = *r.dynamics;
  line(out, "steps", std::to_string(d.steps));
  line(out, "actuated", d.actuated ? "yes" : "no");
  const auto& s = d.final_state;
  line(out, "final_x_m", fmt_num(s.x));
  line(out, "final_y_m", fmt_num(s.y));
  line(out, "final_psi_rad", fmt_num(s.psi));
  line(out, "final_vx_mps", fmt_num(s.v_x));
  line(out, "final_vy_mps", fmt_num(s.v_y));
  line(out, "final_yawrate_radps", fmt_num(s.psi_dot));
  line(out, "distance_m", fmt_num(d.distance));
  line(out, "max_speed_mps", fmt_num(d.max_speed));
  line(out, "max_lateral_accel_mps2", fmt_num(d.max_lateral_accel));
  line(out, "clamped_steps",
       fmt::format("speed={} steering_rate={} accel={} lateral={}", d.clamps.speed, d.clamps.steering_rate,
                   d.clamps.accel, d.clamps.lateral));
}

void render_coverage(std::string& out, const ScenarioReport& r) {
  if (!status(out, "coverage", r.coverage_enabled, r.coverage.has_value())) return;
  const auto& c = *r.coverage;
  line(out, "window_m", fmt_num(c.window));
  line(out, "cell_m", fmt_num(c.cell));
  for (const auto& m : c.modalities) {
    line(out, m.modality,
         fmt::format("sensors={} covered_fraction={} full_coverage_range_m={}", m.sensors, fmt_num(m.covered_fraction),
                     opt_num(m.full_coverage_range)));
  }
  line(out, "blind_regions", std::to_string(c.blind_regions));
  line(out, "blind_area_m2", fmt_num(c.blind_area));
}

void render_network(std::string& out, const ScenarioReport& r) {
  if (!status(out, "network", r.network_enabled, r.network.has_value())) return;
  const auto& n = *r.network;
  line(out, "preset", n.preset);
  line(out, "shaping", n.shaping);
  line(out, "duration_s", fmt_num(n.duration));
  line(out, "flows", std::to_string(n.flows));
  line(out, "events", std::to_string(n.events));
  line(out, "cbs_credit_updates", std::to_string(n.cbs.updates));
  line(out, "cbs_credit_violations", std::to_string(n.cbs.violations));
  for (const auto& c : n.checks) {
    out += fmt::format("  {} {} ({}): max_latency_s={} jitter_s={} latency_margin_s={} jitter_margin_s={}{}\n",
                       c.pass ? "PASS" : "FAIL", c.flow_id, net::to_string(c.cls), fmt_num(c.max_latency),
                       fmt_num(c.jitter), opt_num(c.latency_margin), opt_num(c.jitter_margin),
                       c.reason.empty() ? "" : " reason=" + c.reason);
  }
  line(out, "result", n.pass ? "PASS" : "FAIL");
}

void render_ptp(std::string& out, const ScenarioReport& r) {
  if (!status(out, "ptp", r.ptp_enabled, r.ptp.has_value())) return;
  const auto& p = *r.ptp;
  line(out, "synchronized_nodes", std::to_string(p.nodes));
  line(out, "exchanges", std::to_string(p.summary.exchanges));
  line(out, "max_abs_after_lock_s", fmt_num(p.summary.max_abs_after_lock));
  line(out, "max_abs_steady_s", fmt_num(p.summary.max_abs_steady));
  line(out, "rms_steady_s", fmt_num(p.summary.rms_steady));
}

void render_store(std::string& out, const ScenarioReport& r) {
  if (!status(out, "store", r.store_enabled, r.store.has_value())) return;
  const auto& s = *r.store;
  line(out, "ride_id", s.ride_id);
  line(out, "scenes", std::to_string(s.recording.scenes));
  line(out, "samples", std::to_string(s.recording.samples));
  line(out, "sample_data", std::to_string(s.recording.sample_data));
  line(out, "tags", std::to_string(s.recording.tags));
  line(out, "anchor", s.recording.anchor);
  line(out, "tolerance_s", fmt_num(s.recording.tolerance));
  line(out, "ego_advance_m", fmt_num(s.ego_advance));
  line(out, "integrity_violations", std::to_string(s.violations.size()));
  for (const auto& v : s.violations) out += fmt::format("  violation {} {}: {}\n", v.table, v.id, v.message);
}

void render_iso(std::string& out, const ScenarioReport& r) {
  if (!status(out, "iso4138", r.iso_enabled, r.iso.has_value())) return;
  const auto& i = *r.iso;
  line(out, "test", i.continuous ? "continuous" : "discrete");
  line(out, "swa_rad", fmt_num(i.swa));
  line(out, "points", std::to_string(i.points));
  line(out, "converged", std::to_string(i.converged));
  line(out, "flagged", std::to_string(i.points - i.converged));
  line(out, "understeer_gradient_rad_per_mps2", opt_num(i.understeer_gradient));
}

}  // namespace

std::string render_report(const ScenarioReport& r) {
  std::string out;
  header(out, "scenario");
  line(out, "name", r.name);
  line(out, "seed", std::to_string(r.seed));
  line(out, "mode", r.mode);
  line(out, "duration_s", fmt_num(r.duration));
  line(out, "dt_s", fmt_num(r.dt));
  line(out, "status", r.error.empty() ? "complete" : "PARTIAL");
  if (!r.error.empty()) line(out, "error", r.error);
  render_dynamics(out, r);
  render_coverage(out, r);
  render_network(out, r);
  render_ptp(out, r);
  render_store(out, r);
  render_iso(out, r);
  header(out, "result");
  for (const auto& f : r.failures) out += "  FAIL " + f + "\n";
  line(out, "exit_code", std::to_string(r.exit_code));
  line(out, "wall_clock", "see timing.txt");
  return out;
}

}  // namespace edgar::twin
