#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "edgar/sensors/geometry.hpp"

namespace edgar::sensors {

enum class Modality { camera, lidar, radar, microphone, gnss };

std::string_view to_string(Modality m);
std::optional<Modality> modality_from_string(std::string_view s);

/// Modalities that take part in BEV coverage.
inline constexpr Modality kPerceptionModalities[] = {Modality::camera, Modality::lidar, Modality::radar};
bool is_perception(Modality m);

struct SensorSpec {
  std::string id;
  /// Physical device the spec belongs to. A dual-pattern radar has two specs on one device.
  std::string device;
  Modality modality = Modality::camera;
  double h_fov = 0.0;      // rad, 2*pi for a rotating lidar
  double v_fov = 0.0;      // rad
  double max_range = 0.0;  // m
  double min_range = 0.0;  // m
  double rate = 0.0;       // Hz
  std::uint64_t payload_per_frame = 0;  // bytes
  int image_width = 0;
  int image_height = 0;
  std::string extra;

  bool omnidirectional() const;
  /// Throws std::invalid_argument naming the sensor.
  void validate() const;

  bool operator==(const SensorSpec&) const = default;
};

/// Rear-axle frame: x forward, y left, z up. Orientation is applied as
/// R = Rz(yaw) * Ry(pitch) * Rx(roll); positive pitch tilts the boresight down.
struct SensorPose {
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();
  double roll = 0.0;
  double pitch = 0.0;
  double yaw = 0.0;

  Eigen::Matrix3d rotation() const;
  Eigen::Vector3d to_sensor(const Eigen::Vector3d& p_vehicle) const;
  bool is_finite() const;

  bool operator==(const SensorPose&) const = default;
};

struct MountedSensor {
  SensorSpec spec;
  SensorPose pose;

  bool operator==(const MountedSensor&) const = default;
};

/// Vehicle body as an extruded polygon. An empty polygon disables occlusion.
struct Footprint {
  Polygon polygon;
  double base_z = 0.0;
  double height = 1.9;

  bool operator==(const Footprint&) const = default;
};

/// Planar rigid motion plus a vertical shift, used to move a whole rig.
struct RigidTransform {
  double yaw = 0.0;
  Eigen::Vector3d translation = Eigen::Vector3d::Zero();

  Eigen::Vector3d apply(const Eigen::Vector3d& p) const;
};

struct SensorFlowSpec {
  double bitrate = 0.0;  // bit/s
  double period = 0.0;   // s
  std::uint64_t frame_size = 0;
};

SensorFlowSpec sensor_flow_spec(const SensorSpec& spec);

class Rig {
 public:
  Rig() = default;
  /// Throws std::invalid_argument on duplicate ids, invalid specs, non-finite
  /// poses or a non-simple footprint.
  Rig(std::vector<MountedSensor> sensors, Footprint footprint);

  const std::vector<MountedSensor>& sensors() const { return sensors_; }
  const Footprint& footprint() const { return footprint_; }
  const MountedSensor* find(std::string_view id) const;
  const MountedSensor& at(std::string_view id) const;  // throws std::out_of_range

  /// Distinct physical devices of a modality, in first-appearance order.
  std::vector<std::string> devices(Modality m) const;
  std::size_t count(Modality m) const { return devices(m).size(); }
  std::size_t perception_device_count() const;

  Rig with_sensor(MountedSensor sensor) const;
  Rig transformed(const RigidTransform& tf) const;

  bool operator==(const Rig&) const = default;

 private:
  std::vector<MountedSensor> sensors_;
  Footprint footprint_;
};

/// Range and angular gates only, no occlusion.
bool in_field_of_view(const MountedSensor& sensor, const Eigen::Vector3d& p);

/// Blocked when the straight ray passes over the footprint interior at a
/// height within [base_z, base_z + height].
bool occluded_by_body(const Footprint& footprint, const Eigen::Vector3d& from, const Eigen::Vector3d& to);

bool is_point_visible(const Rig& rig, const MountedSensor& sensor, const Eigen::Vector3d& p);
/// Throws std::out_of_range for an unknown id.
bool is_point_visible(const Rig& rig, std::string_view sensor_id, const Eigen::Vector3d& p);

}  // namespace edgar::sensors
