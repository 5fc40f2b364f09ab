#include "edgar/sensors/rig_config.hpp"

#include <stdexcept>

#include "edgar/common/config.hpp"

namespace edgar::sensors {

namespace {

SensorPose parse_pose(const YAML::Node& node) {
  config::require_keys_subset(node, {"x_m", "y_m", "z_m", "roll_deg", "roll_rad", "pitch_deg", "pitch_rad", "yaw_deg",
                                     "yaw_rad"},
                              "pose");
  SensorPose pose;
  pose.translation = {config::get_double(node, "x_m"), config::get_double(node, "y_m"),
                      config::get_double(node, "z_m")};
  pose.roll = config::get_angle(node, "roll", false).value_or(0.0);
  pose.pitch = config::get_angle(node, "pitch", false).value_or(0.0);
  pose.yaw = config::get_angle(node, "yaw", false).value_or(0.0);
  return pose;
}

MountedSensor parse_sensor(const YAML::Node& node) {
  if (!node.IsMap()) config::fail(node, "sensor entry must be a mapping");
  config::require_keys_subset(node,
                              {"id", "device", "modality", "h_fov_deg", "h_fov_rad", "v_fov_deg", "v_fov_rad",
                               "max_range_m", "min_range_m", "rate_hz", "payload_bytes", "image_width_px",
                               "image_height_px", "extra", "pose"},
                              "sensor");
  MountedSensor s;
  s.spec.id = config::get_string(node, "id");
  s.spec.device = config::get_string_or(node, "device", s.spec.id);
  const std::string modality = config::get_string(node, "modality");
  const auto m = modality_from_string(modality);
  if (!m) config::fail(node["modality"], "unknown modality '" + modality + "'");
  s.spec.modality = *m;
  s.spec.h_fov = *config::get_angle(node, "h_fov", true);
  s.spec.v_fov = *config::get_angle(node, "v_fov", true);
  s.spec.max_range = config::get_double(node, "max_range_m");
  s.spec.min_range = config::get_double_or(node, "min_range_m", 0.0);
  s.spec.rate = config::get_double(node, "rate_hz");
  const long long payload = config::get_int_or(node, "payload_bytes", 0);
  if (payload < 0) config::fail(node["payload_bytes"], "payload_bytes must be non-negative");
  s.spec.payload_per_frame = static_cast<std::uint64_t>(payload);
  s.spec.image_width = static_cast<int>(config::get_int_or(node, "image_width_px", 0));
  s.spec.image_height = static_cast<int>(config::get_int_or(node, "image_height_px", 0));
  s.spec.extra = config::get_string_or(node, "extra", "");
  if (!node["pose"]) config::fail(node, "sensor '" + s.spec.id + "' has no pose");
  s.pose = parse_pose(node["pose"]);
  try {
    s.spec.validate();
  } catch (const std::invalid_argument& e) {
    config::fail(node, e.what());
  }
  return s;
}

Footprint parse_footprint(const YAML::Node& node) {
  config::require_keys_subset(node, {"vertices_m", "base_z_m", "height_m"}, "footprint");
  Footprint fp;
  if (const auto v = node["vertices_m"]) {
    if (!v.IsSequence()) config::fail(v, "vertices_m must be a list of [x, y] pairs");
    for (const auto& p : v) {
      if (!p.IsSequence() || p.size() != 2) config::fail(p, "footprint vertex must be [x, y]");
      try {
        fp.polygon.emplace_back(p[0].as<double>(), p[1].as<double>());
      } catch (const YAML::Exception&) {
        config::fail(p, "footprint vertex must be numeric");
      }
    }
  }
  fp.base_z = config::get_double_or(node, "base_z_m", fp.base_z);
  fp.height = config::get_double_or(node, "height_m", fp.height);
  return fp;
}

}  // namespace

Rig parse_rig(const YAML::Node& doc) {
  if (!doc || doc.IsNull()) return Rig{};
  if (!doc.IsMap()) config::fail(doc, "rig document must be a mapping");
  config::require_keys_subset(doc, {"footprint", "sensors"}, "rig");
  Footprint fp;
  if (const auto f = doc["footprint"]) fp = parse_footprint(f);
  std::vector<MountedSensor> sensors;
  if (const auto list = doc["sensors"]; list && !list.IsNull()) {
    if (!list.IsSequence()) config::fail(list, "sensors must be a list");
    for (const auto& n : list) sensors.push_back(parse_sensor(n));
  }
  try {
    return Rig(std::move(sensors), std::move(fp));
  } catch (const std::invalid_argument& e) {
    config::fail(doc, e.what());
  }
}

Rig load_rig(const std::filesystem::path& path) { return parse_rig(config::load_file(path)); }

YAML::Node rig_to_yaml(const Rig& rig) {
  YAML::Node doc;
  auto fp = doc["footprint"];
  fp["vertices_m"] = YAML::Node(YAML::NodeType::Sequence);
  for (const auto& v : rig.footprint().polygon) {
    YAML::Node p;
    p.SetStyle(YAML::EmitterStyle::Flow);
    p.push_back(v.x());
    p.push_back(v.y());
    fp["vertices_m"].push_back(p);
  }
  fp["base_z_m"] = rig.footprint().base_z;
  fp["height_m"] = rig.footprint().height;
  doc["sensors"] = YAML::Node(YAML::NodeType::Sequence);
  for (const auto& s : rig.sensors()) {
    YAML::Node n;
    n["id"] = s.spec.id;
    if (s.spec.device != s.spec.id) n["device"] = s.spec.device;
    n["modality"] = std::string(to_string(s.spec.modality));
    n["h_fov_rad"] = s.spec.h_fov;
    n["v_fov_rad"] = s.spec.v_fov;
    n["max_range_m"] = s.spec.max_range;
    n["min_range_m"] = s.spec.min_range;
    n["rate_hz"] = s.spec.rate;
    n["payload_bytes"] = s.spec.payload_per_frame;
    if (s.spec.image_width) n["image_width_px"] = s.spec.image_width;
    if (s.spec.image_height) n["image_height_px"] = s.spec.image_height;
    if (!s.spec.extra.empty()) n["extra"] = s.spec.extra;
    auto pose = n["pose"];
    pose["x_m"] = s.pose.translation.x();
    pose["y_m"] = s.pose.translation.y();
    pose["z_m"] = s.pose.translation.z();
    pose["roll_rad"] = s.pose.roll;
    pose["pitch_rad"] = s.pose.pitch;
    pose["yaw_rad"] = s.pose.yaw;
    doc["sensors"].push_back(n);
  }
  return doc;
}

}  // namespace edgar::sensors
