#include "edgar/common/config.hpp"

#include <cmath>
#include <numbers>

namespace edgar::config {

namespace {

std::string position_suffix(const YAML::Mark& mark) {
  if (mark.is_null()) return {};
  return " (line " + std::to_string(mark.line + 1) + ", column " + std::to_string(mark.column + 1) + ")";
}

}  // namespace

YAML::Node load_file(const std::filesystem::path& path) {
  try {
    return YAML::LoadFile(path.string());
  } catch (const YAML::BadFile&) {
    throw ConfigError("cannot read config file '" + path.string() + "'");
  } catch (const YAML::ParserException& e) {
    throw ConfigError(path.string() + ": parse error: " + e.msg + position_suffix(e.mark));
  }
}

YAML::Node load_string(const std::string& text) {
  try {
    return YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError("parse error: " + e.msg + position_suffix(e.mark));
  }
}

std::string where(const YAML::Node& node) {
  if (!node.IsDefined()) return {};
  return position_suffix(node.Mark());
}

void fail(const YAML::Node& node, const std::string& message) { throw ConfigError(message + where(node)); }

void require_keys_subset(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                         std::string_view context) {
  if (!map || map.IsNull()) return;
  if (!map.IsMap()) fail(map, std::string(context) + ": expected a mapping");
  for (const auto& kv : map) {
    const auto key = kv.first.as<std::string>();
    bool known = false;
    for (auto a : allowed) known = known || (a == key);
    if (!known) fail(kv.first, std::string(context) + ": unknown key '" + key + "'");
  }
}

double get_double(const YAML::Node& map, const std::string& key) {
  const auto node = map[key];
  if (!node) fail(map, "missing required key '" + key + "'");
  try {
    const double v = node.as<double>();
    if (!std::isfinite(v)) fail(node, "'" + key + "' must be finite");
    return v;
  } catch (const YAML::BadConversion&) {
    fail(node, "'" + key + "' must be a number");
  }
}

double get_double_or(const YAML::Node& map, const std::string& key, double fallback) {
  if (!map || !map[key]) return fallback;
  return get_double(map, key);
}

std::string get_string(const YAML::Node& map, const std::string& key) {
  const auto node = map[key];
  if (!node) fail(map, "missing required key '" + key + "'");
  if (!node.IsScalar()) fail(node, "'" + key + "' must be a string");
  return node.as<std::string>();
}

std::string get_string_or(const YAML::Node& map, const std::string& key, std::string fallback) {
  if (!map || !map[key]) return fallback;
  return get_string(map, key);
}

long long get_int_or(const YAML::Node& map, const std::string& key, long long fallback) {
  if (!map || !map[key]) return fallback;
  try {
    return map[key].as<long long>();
  } catch (const YAML::BadConversion&) {
    fail(map[key], "'" + key + "' must be an integer");
  }
}

bool get_bool_or(const YAML::Node& map, const std::string& key, bool fallback) {
  if (!map || !map[key]) return fallback;
  try {
    return map[key].as<bool>();
  } catch (const YAML::BadConversion&) {
    fail(map[key], "'" + key + "' must be true or false");
  }
}

std::optional<double> get_angle(const YAML::Node& map, const std::string& base, bool required) {
  const bool has_deg = map && map[base + "_deg"];
  const bool has_rad = map && map[base + "_rad"];
  if (has_deg && has_rad) fail(map[base + "_deg"], "'" + base + "' declared in both degrees and radians");
  if (has_deg) return get_double(map, base + "_deg") * std::numbers::pi / 180.0;
  if (has_rad) return get_double(map, base + "_rad");
  if (required) fail(map, "missing '" + base + "_deg' or '" + base + "_rad'");
  return std::nullopt;
}

}  // namespace edgar::config
