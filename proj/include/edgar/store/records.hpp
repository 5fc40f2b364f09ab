#pragma once

#include <array>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace edgar::store {

enum class RideSource { simulation, replay };
enum class TagOrigin { manual, automatic };

std::string_view to_string(RideSource s);
RideSource ride_source_from_string(std::string_view s);
std::string_view to_string(TagOrigin o);  // "manual", "auto"
TagOrigin tag_origin_from_string(std::string_view s);

struct Ride {
  std::string id;
  double start = 0.0;  // true time [s]
  double end = 0.0;
  std::string vehicle_config;  // opaque references
  std::string rig_config;
  std::string map_id;  // empty when no map is assigned
  RideSource source = RideSource::simulation;
  bool operator==(const Ride&) const = default;
};

struct CalibratedSensor {
  std::string id;
  std::string ride_id;
  std::string sensor_id;  // rig sensor id
  std::string modality;
  std::optional<std::array<double, 9>> intrinsic;  // row-major 3x3, cameras only
  std::array<double, 3> translation{};             // rear-axle frame [m]
  std::array<double, 3> rotation{};                // roll, pitch, yaw [rad]
  bool operator==(const CalibratedSensor&) const = default;
};

struct MapRecord {
  std::string id;
  std::string name;
  std::string reference;
  bool operator==(const MapRecord&) const = default;
};

struct Scene {
  std::string id;
  std::string ride_id;
  double start = 0.0;
  double end = 0.0;
  bool operator==(const Scene&) const = default;
};

struct Sample {
  std::string id;
  std::string scene_id;
  double timestamp = 0.0;
  bool operator==(const Sample&) const = default;
};

struct SampleData {
  std::string id;
  std::string sample_id;
  std::string sensor_id;  // calibrated sensor id
  double timestamp = 0.0;  // measurement time stamped by the sensor clock [s]
  std::string payload;     // opaque reference
  bool operator==(const SampleData&) const = default;
};

struct EgoPose {
  std::string sample_id;
  double x = 0.0, y = 0.0, psi = 0.0;
  double v_x = 0.0, v_y = 0.0, psi_dot = 0.0;
  bool operator==(const EgoPose&) const = default;
};

struct Tag {
  std::string scene_id;
  std::string category;
  std::string group;
  std::string name;
  TagOrigin origin = TagOrigin::manual;
  bool operator==(const Tag&) const = default;
};

/// Category -> allowed groups. The built-in set is minimal and meant to be extended.
class Taxonomy {
 public:
  static Taxonomy standard();  // dynamics, sensors, weather, scenario
  void add(const std::string& category, const std::string& group);
  bool allows(std::string_view category, std::string_view group) const;
  const std::map<std::string, std::set<std::string>>& groups() const { return groups_; }

 private:
  std::map<std::string, std::set<std::string>> groups_;
};

}  // namespace edgar::store
