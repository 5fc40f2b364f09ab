#pragma once

#include <filesystem>

#include <yaml-cpp/yaml.h>

#include "edgar/dynamics/params.hpp"

namespace edgar::dynamics {

struct VehicleConfig {
  VehicleParams params;
  AxleTires tires;
};

/// Document layout:
///   vehicle: { l_f, l_r, l_table, m, I_z, rho, A, c_d, f_r, steering_ratio, g,
///              max_road_wheel_angle_deg | max_road_wheel_angle_rad }
///   tires:   { front: { B, C, D_scale, E }, rear: { ... } }
/// Every key is optional; omitted values keep the identified EDGAR defaults.
/// Throws ConfigError for unknown keys and invalid values.
VehicleConfig parse_vehicle_config(const YAML::Node& doc);
VehicleConfig load_vehicle_config(const std::filesystem::path& path);

YAML::Node to_yaml(const VehicleConfig& config);

}  // namespace edgar::dynamics
