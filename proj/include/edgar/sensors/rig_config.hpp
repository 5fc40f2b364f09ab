#pragma once

#include <filesystem>

#include <yaml-cpp/yaml.h>

#include "edgar/sensors/rig.hpp"

namespace edgar::sensors {

/// Every dimensional key carries its unit as a suffix (`_m`, `_hz`, `_bytes`,
/// `_deg` or `_rad`). Unknown keys are rejected. Throws edgar::ConfigError.
Rig parse_rig(const YAML::Node& doc);
Rig load_rig(const std::filesystem::path& path);

/// Emits radians so that parse_rig(rig_to_yaml(r)) == r bit for bit.
YAML::Node rig_to_yaml(const Rig& rig);

/// The shipped EDGAR replica (20 physical devices, dual-pattern radars).
Rig default_edgar_rig();

}  // namespace edgar::sensors
