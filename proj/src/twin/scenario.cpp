#include "edgar/twin/scenario.hpp"

#include <cmath>
#include <sstream>

#include "edgar/common/config.hpp"
#include "edgar/sensors/rig_config.hpp"

namespace edgar::twin {

namespace {

using config::fail;
using config::get_bool_or;
using config::get_double_or;
using config::get_string_or;

// `<base>_kph` or `<base>_mps`, never both.
std::optional<double> get_speed(const YAML::Node& map, const std::string& base) {
  const bool kph = map[base + "_kph"].IsDefined();
  const bool mps = map[base + "_mps"].IsDefined();
  if (kph && mps) fail(map[base + "_kph"], "'" + base + "' declared in both km/h and m/s");
  if (kph) return config::get_double(map, base + "_kph") / 3.6;
  if (mps) return config::get_double(map, base + "_mps");
  return std::nullopt;
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& ref) {
  const std::filesystem::path p(ref);
  return p.is_absolute() || base.empty() ? p : base / p;
}

// A present section is enabled unless it says otherwise.
bool section_enabled(const YAML::Node& sec) { return sec && get_bool_or(sec, "enabled", true); }

std::uint64_t get_rate(const YAML::Node& map, const std::string& key, std::uint64_t fallback) {
  const long long v = config::get_int_or(map, key, static_cast<long long>(fallback));
  if (v <= 0) fail(map[key], "'" + key + "' must be positive");
  return static_cast<std::uint64_t>(v);
}

void parse_mode(const YAML::Node& node, ScenarioConfig& c) {
  if (!node) return;
  const YAML::Node kind_node = node.IsMap() ? node["kind"] : node;
  if (!kind_node || !kind_node.IsScalar()) fail(node, "mode: expected a mode name or a mapping with 'kind'");
  const auto kind = mode_from_string(kind_node.as<std::string>());
  if (!kind) {
    fail(kind_node, "unknown driving mode '" + kind_node.as<std::string>() +
                        "' (series, measurement, autonomous, high_dynamic)");
  }
  c.mode = default_mode(*kind);
  if (!node.IsMap()) return;
  config::require_keys_subset(node,
                              {"kind", "max_speed_kph", "max_speed_mps", "max_accel_mps2", "max_decel_mps2",
                               "max_lateral_accel_mps2", "max_steering_rate_radps"},
                              "mode");
  const bool overrides = node.size() > 1;
  if (overrides && *kind != ModeKind::autonomous) fail(node, "mode: only autonomous limits are configurable");
  ModeLimits& l = c.mode.limits;
  if (auto v = get_speed(node, "max_speed")) l.max_speed = *v;
  l.max_accel = get_double_or(node, "max_accel_mps2", l.max_accel);
  l.max_decel = get_double_or(node, "max_decel_mps2", l.max_decel);
  l.max_lateral_accel = get_double_or(node, "max_lateral_accel_mps2", l.max_lateral_accel);
  l.max_steering_rate = get_double_or(node, "max_steering_rate_radps", l.max_steering_rate);
  try {
    c.mode.validate();
  } catch (const std::invalid_argument& e) {
    fail(node, std::string("mode: ") + e.what());
  }
}

void parse_maneuver(const YAML::Node& node, ScenarioConfig& c) {
  if (!node) return;
  if (!node.IsSequence()) fail(node, "maneuver: expected a list of keyframes");
  for (const auto& k : node) {
    config::require_keys_subset(k, {"t_s", "speed_kph", "speed_mps", "force_n", "swa_deg", "swa_rad"},
                                "maneuver keyframe");
    ManeuverPoint p;
    p.t = config::get_double(k, "t_s");
    p.speed = get_speed(k, "speed");
    if (k["force_n"]) p.force = config::get_double(k, "force_n");
    p.swa = config::get_angle(k, "swa", false);
    if (p.speed && p.force) fail(k, "maneuver keyframe sets both a speed target and a drive force");
    if (p.speed && *p.speed < 0.0) fail(k, "maneuver speed target must not be negative");
    if (p.t < 0.0) fail(k, "maneuver keyframe time must not be negative");
    if (!c.maneuver.empty() && p.t <= c.maneuver.back().t) fail(k, "maneuver keyframe times must increase");
    const bool actuates = (p.speed && *p.speed != 0.0) || (p.force && *p.force != 0.0) || (p.swa && *p.swa != 0.0);
    if (actuates && !c.mode.allows_actuation()) {
      fail(k, "maneuver commands actuation in " + std::string(to_string(c.mode.kind)) +
                  " mode, where the drive-by-wire system is electronically separated");
    }
    c.maneuver.push_back(p);
  }
}

void parse_network(const YAML::Node& n, NetworkConfig& s) {
  if (!n) return;
  config::require_keys_subset(n, {"enabled", "preset", "shaping", "duration_s", "seven_hop", "edgar"}, "network");
  s.enabled = section_enabled(n);
  const std::string preset = get_string_or(n, "preset", "rig");
  if (preset == "rig") s.preset = NetPreset::rig;
  else if (preset == "seven_hop") s.preset = NetPreset::seven_hop;
  else fail(n["preset"], "network: unknown preset '" + preset + "' (rig, seven_hop)");
  try {
    s.shaping = net::shaping_from_string(get_string_or(n, "shaping", "cbs"));
  } catch (const std::invalid_argument& e) {
    fail(n["shaping"], std::string("network: ") + e.what());
  }
  s.duration = get_double_or(n, "duration_s", s.duration);
  if (!(s.duration > 0.0)) fail(n["duration_s"], "network: duration_s must be positive");
  if (const auto h = n["seven_hop"]) {
    config::require_keys_subset(
        h, {"switches", "link_rate_bps", "propagation_ns", "sr_frame_bytes", "sr_period_us", "cross_traffic", "cross_load"},
        "network.seven_hop");
    auto& o = s.seven_hop;
    o.switches = static_cast<int>(config::get_int_or(h, "switches", o.switches));
    o.link_rate = get_rate(h, "link_rate_bps", o.link_rate);
    o.propagation = net::to_picos(get_double_or(h, "propagation_ns", 25.0) * 1e-9);
    o.sr_frame = static_cast<std::uint32_t>(get_rate(h, "sr_frame_bytes", o.sr_frame));
    o.sr_period = net::to_picos(get_double_or(h, "sr_period_us", 125.0) * 1e-6);
    o.cross_traffic = get_bool_or(h, "cross_traffic", o.cross_traffic);
    o.cross_load = get_double_or(h, "cross_load", o.cross_load);
    if (o.switches < 1) fail(h["switches"], "network.seven_hop: switches must be at least 1");
    if (!(o.cross_load > 0.0 && o.cross_load <= 1.0)) fail(h, "network.seven_hop: cross_load must lie in (0, 1]");
  }
  if (const auto e = n["edgar"]) {
    config::require_keys_subset(e, {"sensor_rate_bps", "slow_sensor_rate_bps", "uplink_rate_bps"}, "network.edgar");
    s.edgar.sensor_rate = get_rate(e, "sensor_rate_bps", s.edgar.sensor_rate);
    s.edgar.slow_sensor_rate = get_rate(e, "slow_sensor_rate_bps", s.edgar.slow_sensor_rate);
    s.edgar.uplink_rate = get_rate(e, "uplink_rate_bps", s.edgar.uplink_rate);
  }
}

void parse_ptp(const YAML::Node& n, PtpConfig& s) {
  if (!n) return;
  config::require_keys_subset(n,
                              {"enabled", "sync_interval_s", "trace_period_s", "noise_sigma_s", "drift_bound",
                               "initial_offset_bound_s", "link_delay_s", "residence_min_s", "residence_max_s",
                               "servo_kp", "servo_ki"},
                              "ptp");
  s.enabled = section_enabled(n);
  s.sync_interval = get_double_or(n, "sync_interval_s", s.sync_interval);
  s.trace_period = get_double_or(n, "trace_period_s", s.trace_period);
  auto& d = s.defaults;
  d.noise_sigma = get_double_or(n, "noise_sigma_s", d.noise_sigma);
  d.drift_bound = get_double_or(n, "drift_bound", d.drift_bound);
  d.initial_offset_bound = get_double_or(n, "initial_offset_bound_s", d.initial_offset_bound);
  d.link_delay = get_double_or(n, "link_delay_s", d.link_delay);
  d.switch_residence.min = get_double_or(n, "residence_min_s", d.switch_residence.min);
  d.switch_residence.max = get_double_or(n, "residence_max_s", d.switch_residence.max);
  s.gains.kp = get_double_or(n, "servo_kp", s.gains.kp);
  s.gains.ki = get_double_or(n, "servo_ki", s.gains.ki);
  if (!(s.sync_interval > 0.0)) fail(n["sync_interval_s"], "ptp: sync_interval_s must be positive");
  if (!(s.trace_period > 0.0)) fail(n["trace_period_s"], "ptp: trace_period_s must be positive");
  if (!(d.noise_sigma >= 0.0 && d.drift_bound >= 0.0 && d.initial_offset_bound >= 0.0 && d.link_delay >= 0.0)) {
    fail(n, "ptp: noise, drift, offset bound and link delay must not be negative");
  }
  if (!(d.switch_residence.min >= 0.0 && d.switch_residence.max >= d.switch_residence.min)) {
    fail(n, "ptp: residence range must satisfy 0 <= min <= max");
  }
}

void parse_store(const YAML::Node& n, StoreConfig& s) {
  if (!n) return;
  config::require_keys_subset(n, {"enabled", "ride_id", "map_id", "scene_duration_s"}, "store");
  s.enabled = section_enabled(n);
  s.ride_id = get_string_or(n, "ride_id", s.ride_id);
  s.map_id = get_string_or(n, "map_id", s.map_id);
  s.scene_duration = get_double_or(n, "scene_duration_s", s.scene_duration);
  if (s.ride_id.empty()) fail(n["ride_id"], "store: ride_id must not be empty");
  if (!(s.scene_duration > 0.0)) fail(n["scene_duration_s"], "store: scene_duration_s must be positive");
}

void parse_coverage(const YAML::Node& n, CoverageConfig& s) {
  if (!n) return;
  config::require_keys_subset(n, {"enabled", "window_m", "cell_m"}, "coverage");
  s.enabled = section_enabled(n);
  s.window = get_double_or(n, "window_m", s.window);
  s.cell = get_double_or(n, "cell_m", s.cell);
  if (!(s.window > 0.0 && s.cell > 0.0)) fail(n, "coverage: window_m and cell_m must be positive");
}

void parse_iso(const YAML::Node& n, Iso4138Config& s) {
  if (!n) return;
  config::require_keys_subset(n, {"enabled", "swa_deg", "swa_rad", "mode", "accel_rate_mps2"}, "iso4138");
  s.enabled = section_enabled(n);
  if (auto a = config::get_angle(n, "swa", false)) s.swa = *a;
  const std::string mode = get_string_or(n, "mode", "discrete");
  if (mode != "discrete" && mode != "continuous") fail(n["mode"], "iso4138: mode must be discrete or continuous");
  s.continuous = mode == "continuous";
  s.accel_rate = get_double_or(n, "accel_rate_mps2", s.accel_rate);
  if (!(s.accel_rate > 0.0)) fail(n["accel_rate_mps2"], "iso4138: accel_rate_mps2 must be positive");
}

}  // namespace

std::size_t ScenarioConfig::steps() const { return static_cast<std::size_t>(std::llround(duration / dt)); }

void ScenarioConfig::validate() const {
  if (!(std::isfinite(duration) && duration > 0.0)) throw ConfigError("duration_s must be positive");
  if (!(dt > 0.0 && dt <= dynamics::SingleTrackModel::Options{}.max_dt)) {
    throw ConfigError("dt_s must lie in (0, 0.01]");
  }
  if (std::abs(static_cast<double>(steps()) * dt - duration) > 1e-9 * duration) {
    throw ConfigError("duration_s must be a whole number of dt_s steps");
  }
  if (!(trajectory_period >= dt)) throw ConfigError("trajectory_period_s must be at least dt_s");
  if (!(speed_kp > 0.0)) throw ConfigError("controller speed_kp must be positive");
  if (store.enabled && rig.sensors().empty()) throw ConfigError("store: the rig has no sensors");
  try {
    mode.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("mode: ") + e.what());
  }
}

ScenarioConfig parse_scenario(const YAML::Node& doc, const std::filesystem::path& base_dir) {
  if (!doc || !doc.IsMap()) throw ConfigError("scenario: expected a mapping at the top level");
  config::require_keys_subset(doc,
                              {"name", "vehicle", "rig", "mode", "duration_s", "dt_s", "seed", "output_dir",
                               "initial", "controller", "maneuver", "trajectory_period_s", "network", "ptp",
                               "store", "coverage", "iso4138"},
                              "scenario");
  ScenarioConfig c;
  c.name = get_string_or(doc, "name", c.name);

  if (const auto v = doc["vehicle"]) {
    if (v.IsScalar()) {
      c.vehicle_ref = v.as<std::string>();
      c.vehicle = dynamics::load_vehicle_config(resolve(base_dir, c.vehicle_ref));
    } else {
      c.vehicle_ref = "inline";
      c.vehicle = dynamics::parse_vehicle_config(v);
    }
  }
  c.rig_ref = get_string_or(doc, "rig", c.rig_ref);
  c.rig = c.rig_ref == "default" ? sensors::default_edgar_rig() : sensors::load_rig(resolve(base_dir, c.rig_ref));

  parse_mode(doc["mode"], c);
  c.duration = get_double_or(doc, "duration_s", c.duration);
  c.dt = get_double_or(doc, "dt_s", c.dt);
  const long long seed = config::get_int_or(doc, "seed", 1);
  if (seed < 0) fail(doc["seed"], "seed must not be negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.output_dir = get_string_or(doc, "output_dir", c.output_dir);
  c.trajectory_period = get_double_or(doc, "trajectory_period_s", c.trajectory_period);

  if (const auto i = doc["initial"]) {
    config::require_keys_subset(i, {"x_m", "y_m", "psi_deg", "psi_rad", "speed_kph", "speed_mps"}, "initial");
    c.initial.x = get_double_or(i, "x_m", 0.0);
    c.initial.y = get_double_or(i, "y_m", 0.0);
    c.initial.psi = config::get_angle(i, "psi", false).value_or(0.0);
    c.initial.v_x = get_speed(i, "speed").value_or(0.0);
    if (c.initial.v_x < 0.0) fail(i, "initial speed must not be negative");
  }
  if (const auto k = doc["controller"]) {
    config::require_keys_subset(k, {"speed_kp"}, "controller");
    c.speed_kp = get_double_or(k, "speed_kp", c.speed_kp);
  }
  parse_maneuver(doc["maneuver"], c);
  parse_network(doc["network"], c.network);
  parse_ptp(doc["ptp"], c.ptp);
  parse_store(doc["store"], c.store);
  parse_coverage(doc["coverage"], c.coverage);
  parse_iso(doc["iso4138"], c.iso4138);

  try {
    c.validate();
  } catch (const ConfigError& e) {
    fail(doc, e.what());
  }
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  return parse_scenario(config::load_file(path), path.parent_path());
}

YAML::Node to_yaml(const ScenarioConfig& c) {
  YAML::Node n;
  n["name"] = c.name;
  n["vehicle_ref"] = c.vehicle_ref;
  n["vehicle"] = dynamics::to_yaml(c.vehicle);
  n["rig"] = c.rig_ref;
  n["rig_sensors"] = c.rig.sensors().size();
  YAML::Node m;
  m["kind"] = std::string(to_string(c.mode.kind));
  m["max_speed_mps"] = c.mode.limits.max_speed;
  m["max_accel_mps2"] = c.mode.limits.max_accel;
  m["max_decel_mps2"] = c.mode.limits.max_decel;
  m["max_lateral_accel_mps2"] = c.mode.limits.max_lateral_accel;
  m["max_steering_rate_radps"] = c.mode.limits.max_steering_rate;
  n["mode"] = m;
  n["duration_s"] = c.duration;
  n["dt_s"] = c.dt;
  n["seed"] = c.seed;
  n["trajectory_period_s"] = c.trajectory_period;
  YAML::Node init;
  init["x_m"] = c.initial.x;
  init["y_m"] = c.initial.y;
  init["psi_rad"] = c.initial.psi;
  init["speed_mps"] = c.initial.v_x;
  n["initial"] = init;
  n["controller"]["speed_kp"] = c.speed_kp;
  YAML::Node man(YAML::NodeType::Sequence);
  for (const auto& p : c.maneuver) {
    YAML::Node k;
    k["t_s"] = p.t;
    if (p.speed) k["speed_mps"] = *p.speed;
    if (p.force) k["force_n"] = *p.force;
    if (p.swa) k["swa_rad"] = *p.swa;
    man.push_back(k);
  }
  n["maneuver"] = man;

  YAML::Node net;
  net["enabled"] = c.network.enabled;
  net["preset"] = c.network.preset == NetPreset::rig ? "rig" : "seven_hop";
  net["shaping"] = std::string(net::to_string(c.network.shaping));
  net["duration_s"] = c.network.duration;
  if (c.network.preset == NetPreset::seven_hop) {
    const auto& o = c.network.seven_hop;
    net["seven_hop"]["switches"] = o.switches;
    net["seven_hop"]["link_rate_bps"] = o.link_rate;
    net["seven_hop"]["propagation_ns"] = net::to_seconds(o.propagation) * 1e9;
    net["seven_hop"]["sr_frame_bytes"] = o.sr_frame;
    net["seven_hop"]["sr_period_us"] = net::to_seconds(o.sr_period) * 1e6;
    net["seven_hop"]["cross_traffic"] = o.cross_traffic;
    net["seven_hop"]["cross_load"] = o.cross_load;
  } else {
    net["edgar"]["sensor_rate_bps"] = c.network.edgar.sensor_rate;
    net["edgar"]["slow_sensor_rate_bps"] = c.network.edgar.slow_sensor_rate;
    net["edgar"]["uplink_rate_bps"] = c.network.edgar.uplink_rate;
  }
  n["network"] = net;

  YAML::Node p;
  p["enabled"] = c.ptp.enabled;
  p["sync_interval_s"] = c.ptp.sync_interval;
  p["trace_period_s"] = c.ptp.trace_period;
  p["noise_sigma_s"] = c.ptp.defaults.noise_sigma;
  p["drift_bound"] = c.ptp.defaults.drift_bound;
  p["initial_offset_bound_s"] = c.ptp.defaults.initial_offset_bound;
  p["link_delay_s"] = c.ptp.defaults.link_delay;
  p["residence_min_s"] = c.ptp.defaults.switch_residence.min;
  p["residence_max_s"] = c.ptp.defaults.switch_residence.max;
  p["servo_kp"] = c.ptp.gains.kp;
  p["servo_ki"] = c.ptp.gains.ki;
  n["ptp"] = p;

  n["store"]["enabled"] = c.store.enabled;
  n["store"]["ride_id"] = c.store.ride_id;
  n["store"]["map_id"] = c.store.map_id;
  n["store"]["scene_duration_s"] = c.store.scene_duration;
  n["coverage"]["enabled"] = c.coverage.enabled;
  n["coverage"]["window_m"] = c.coverage.window;
  n["coverage"]["cell_m"] = c.coverage.cell;
  n["iso4138"]["enabled"] = c.iso4138.enabled;
  n["iso4138"]["swa_rad"] = c.iso4138.swa;
  n["iso4138"]["mode"] = c.iso4138.continuous ? "continuous" : "discrete";
  n["iso4138"]["accel_rate_mps2"] = c.iso4138.accel_rate;
  return n;
}

std::string effective_config_text(const ScenarioConfig& c) {
  YAML::Emitter out;
  out << to_yaml(c);
  return std::string(out.c_str()) + "\n";
}

}  // namespace edgar::twin
