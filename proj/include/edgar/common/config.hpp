#pragma once

#include <filesystem>
#include <initializer_list>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include <yaml-cpp/yaml.h>

namespace edgar {

/// Invalid or malformed configuration. The message carries "line L, column C"
/// whenever the offending node has a source position.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A simulated system left its valid envelope (non-finite state etc.).
class DivergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace config {

YAML::Node load_file(const std::filesystem::path& path);
YAML::Node load_string(const std::string& text);

[[noreturn]] void fail(const YAML::Node& node, const std::string& message);

std::string where(const YAML::Node& node);

/// Rejects any key of `map` not listed in `allowed`, naming the first offender.
void require_keys_subset(const YAML::Node& map, std::initializer_list<std::string_view> allowed,
                         std::string_view context);

double get_double(const YAML::Node& map, const std::string& key);
double get_double_or(const YAML::Node& map, const std::string& key, double fallback);
std::string get_string(const YAML::Node& map, const std::string& key);
std::string get_string_or(const YAML::Node& map, const std::string& key, std::string fallback);
long long get_int_or(const YAML::Node& map, const std::string& key, long long fallback);
bool get_bool_or(const YAML::Node& map, const std::string& key, bool fallback);

/// Angular quantity stored as `<base>_deg` or `<base>_rad`. Declaring both, or
/// neither when `required`, is a unit violation.
std::optional<double> get_angle(const YAML::Node& map, const std::string& base, bool required);

}  // namespace config
}  // namespace edgar
