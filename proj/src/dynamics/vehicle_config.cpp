#include "edgar/dynamics/vehicle_config.hpp"

#include <stdexcept>

#include "edgar/common/config.hpp"

namespace edgar::dynamics {

namespace {

TireParams parse_tire(const YAML::Node& node, TireParams tire) {
  config::require_keys_subset(node, {"B", "C", "D_scale", "E"}, "tire");
  tire.B = config::get_double_or(node, "B", tire.B);
  tire.C = config::get_double_or(node, "C", tire.C);
  tire.D_scale = config::get_double_or(node, "D_scale", tire.D_scale);
  tire.E = config::get_double_or(node, "E", tire.E);
  try {
    tire.validate();
  } catch (const std::invalid_argument& e) {
    config::fail(node, e.what());
  }
  return tire;
}

}  // namespace

VehicleConfig parse_vehicle_config(const YAML::Node& doc) {
  VehicleConfig cfg;
  if (!doc || doc.IsNull()) return cfg;
  config::require_keys_subset(doc, {"vehicle", "tires"}, "vehicle config");

  if (const auto v = doc["vehicle"]) {
    config::require_keys_subset(v,
                                {"l_f", "l_r", "l_table", "m", "I_z", "rho", "A", "c_d", "f_r", "steering_ratio", "g",
                                 "max_road_wheel_angle_deg", "max_road_wheel_angle_rad"},
                                "vehicle");
    auto& p = cfg.params;
    p.l_f = config::get_double_or(v, "l_f", p.l_f);
    p.l_r = config::get_double_or(v, "l_r", p.l_r);
    p.l_table = config::get_double_or(v, "l_table", p.l_table);
    p.m = config::get_double_or(v, "m", p.m);
    p.I_z = config::get_double_or(v, "I_z", p.I_z);
    p.rho = config::get_double_or(v, "rho", p.rho);
    p.A = config::get_double_or(v, "A", p.A);
    p.c_d = config::get_double_or(v, "c_d", p.c_d);
    p.f_r = config::get_double_or(v, "f_r", p.f_r);
    p.steering_ratio = config::get_double_or(v, "steering_ratio", p.steering_ratio);
    p.g = config::get_double_or(v, "g", p.g);
    p.max_road_wheel_angle = config::get_angle(v, "max_road_wheel_angle", false).value_or(p.max_road_wheel_angle);
    try {
      p.validate();
    } catch (const std::invalid_argument& e) {
      config::fail(v, e.what());
    }
  }
  if (const auto t = doc["tires"]) {
    config::require_keys_subset(t, {"front", "rear"}, "tires");
    if (t["front"]) cfg.tires.front = parse_tire(t["front"], cfg.tires.front);
    if (t["rear"]) cfg.tires.rear = parse_tire(t["rear"], cfg.tires.rear);
  }
  return cfg;
}

VehicleConfig load_vehicle_config(const std::filesystem::path& path) {
  return parse_vehicle_config(config::load_file(path));
}

YAML::Node to_yaml(const VehicleConfig& config) {
  YAML::Node doc;
  const auto& p = config.params;
  auto v = doc["vehicle"];
  v["l_f"] = p.l_f;
  v["l_r"] = p.l_r;
  v["l_table"] = p.l_table;
  v["m"] = p.m;
  v["I_z"] = p.I_z;
  v["rho"] = p.rho;
  v["A"] = p.A;
  v["c_d"] = p.c_d;
  v["f_r"] = p.f_r;
  v["steering_ratio"] = p.steering_ratio;
  v["g"] = p.g;
  v["max_road_wheel_angle_rad"] = p.max_road_wheel_angle;
  const auto tire = [](const TireParams& t) {
    YAML::Node n;
    n["B"] = t.B;
    n["C"] = t.C;
    n["D_scale"] = t.D_scale;
    n["E"] = t.E;
    return n;
  };
  doc["tires"]["front"] = tire(config.tires.front);
  doc["tires"]["rear"] = tire(config.tires.rear);
  return doc;
}

}  // namespace edgar::dynamics
