#include "edgar/sensors/rig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <unordered_set>

#include <Eigen/Geometry>

namespace edgar::sensors {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
// Angular slack so boresight-aligned grid points on an FOV edge are not lost to rounding.
constexpr double kAngleEps = 1e-12;

}  // namespace

std::string_view to_string(Modality m) {
  switch (m) {
    case Modality::camera: return "camera";
    case Modality::lidar: return "lidar";
    case Modality::radar: return "radar";
    case Modality::microphone: return "microphone";
    case Modality::gnss: return "gnss";
  }
  return "unknown";
}

std::optional<Modality> modality_from_string(std::string_view s) {
  for (Modality m : {Modality::camera, Modality::lidar, Modality::radar, Modality::microphone, Modality::gnss}) {
    if (to_string(m) == s) return m;
  }
  return std::nullopt;
}

bool is_perception(Modality m) { return m == Modality::camera || m == Modality::lidar || m == Modality::radar; }

bool SensorSpec::omnidirectional() const { return h_fov >= kTwoPi - 1e-9; }

void SensorSpec::validate() const {
  const auto bad = [&](const std::string& what) { throw std::invalid_argument("sensor '" + id + "': " + what); };
  if (id.empty()) throw std::invalid_argument("sensor with empty id");
  if (!(h_fov > 0.0 && h_fov <= kTwoPi + 1e-9)) bad("h_fov must lie in (0, 2*pi]");
  if (!(v_fov > 0.0 && v_fov <= std::numbers::pi + 1e-9)) bad("v_fov must lie in (0, pi]");
  if (!(max_range > 0.0) || !std::isfinite(max_range)) bad("max_range must be positive");
  if (!(min_range >= 0.0 && min_range < max_range)) bad("min_range must lie in [0, max_range)");
  if (!(rate > 0.0) || !std::isfinite(rate)) bad("rate must be positive");
  if (image_width < 0 || image_height < 0) bad("image size must be non-negative");
}

Eigen::Matrix3d SensorPose::rotation() const {
  return (Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) * Eigen::AngleAxisd(pitch, Eigen::Vector3d::UnitY()) *
          Eigen::AngleAxisd(roll, Eigen::Vector3d::UnitX()))
      .toRotationMatrix();
}

Eigen::Vector3d SensorPose::to_sensor(const Eigen::Vector3d& p_vehicle) const {
  return rotation().transpose() * (p_vehicle - translation);
}

bool SensorPose::is_finite() const {
  return translation.allFinite() && std::isfinite(roll) && std::isfinite(pitch) && std::isfinite(yaw);
}

Eigen::Vector3d RigidTransform::apply(const Eigen::Vector3d& p) const {
  return Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitZ()) * p + translation;
}

SensorFlowSpec sensor_flow_spec(const SensorSpec& spec) {
  SensorFlowSpec f;
  f.frame_size = spec.payload_per_frame;
  f.period = 1.0 / spec.rate;
  f.bitrate = static_cast<double>(spec.payload_per_frame) * 8.0 * spec.rate;
  return f;
}

Rig::Rig(std::vector<MountedSensor> sensors, Footprint footprint)
    : sensors_(std::move(sensors)), footprint_(std::move(footprint)) {
  std::unordered_set<std::string> seen;
  for (auto& s : sensors_) {
    if (s.spec.device.empty()) s.spec.device = s.spec.id;
    s.spec.validate();
    if (!s.pose.is_finite()) throw std::invalid_argument("sensor '" + s.spec.id + "': pose is not finite");
    if (!seen.insert(s.spec.id).second) throw std::invalid_argument("duplicate sensor id '" + s.spec.id + "'");
  }
  if (!footprint_.polygon.empty() && !is_simple_polygon(footprint_.polygon)) {
    throw std::invalid_argument("vehicle footprint is not a simple polygon");
  }
  if (!std::isfinite(footprint_.base_z) || !(footprint_.height > 0.0)) {
    throw std::invalid_argument("vehicle footprint height must be positive");
  }
}

const MountedSensor* Rig::find(std::string_view id) const {
  for (const auto& s : sensors_) {
    if (s.spec.id == id) return &s;
  }
  return nullptr;
}

const MountedSensor& Rig::at(std::string_view id) const {
  if (const auto* s = find(id)) return *s;
  throw std::out_of_range("unknown sensor id '" + std::string(id) + "'");
}

std::vector<std::string> Rig::devices(Modality m) const {
  std::vector<std::string> out;
  for (const auto& s : sensors_) {
    if (s.spec.modality != m) continue;
    if (std::find(out.begin(), out.end(), s.spec.device) == out.end()) out.push_back(s.spec.device);
  }
  return out;
}

std::size_t Rig::perception_device_count() const {
  std::size_t n = 0;
  for (Modality m : kPerceptionModalities) n += count(m);
  return n;
}

Rig Rig::with_sensor(MountedSensor sensor) const {
  auto sensors = sensors_;
  sensors.push_back(std::move(sensor));
  return Rig(std::move(sensors), footprint_);
}

Rig Rig::transformed(const RigidTransform& tf) const {
  auto sensors = sensors_;
  for (auto& s : sensors) {
    s.pose.translation = tf.apply(s.pose.translation);
    s.pose.yaw += tf.yaw;
  }
  Footprint fp = footprint_;
  const Eigen::Rotation2Dd r(tf.yaw);
  for (auto& v : fp.polygon) v = r * v + tf.translation.head<2>();
  fp.base_z += tf.translation.z();
  return Rig(std::move(sensors), std::move(fp));
}

bool in_field_of_view(const MountedSensor& sensor, const Eigen::Vector3d& p) {
  const SensorSpec& spec = sensor.spec;
  const Eigen::Vector3d q = sensor.pose.to_sensor(p);
  const double range = q.norm();
  if (range < spec.min_range || range > spec.max_range) return false;
  const double horiz = std::hypot(q.x(), q.y());
  const double elevation = std::atan2(q.z(), horiz);
  if (std::abs(elevation) > 0.5 * spec.v_fov + kAngleEps) return false;
  if (spec.omnidirectional()) return true;
  const double azimuth = std::atan2(q.y(), q.x());
  return std::abs(azimuth) <= 0.5 * spec.h_fov + kAngleEps;
}

bool occluded_by_body(const Footprint& footprint, const Eigen::Vector3d& from, const Eigen::Vector3d& to) {
  if (footprint.polygon.empty()) return false;
  const double top = footprint.base_z + footprint.height;
  for (const auto& iv : segment_inside_intervals(footprint.polygon, from.head<2>(), to.head<2>())) {
    const double z_lo = from.z() + iv.lo * (to.z() - from.z());
    const double z_hi = from.z() + iv.hi * (to.z() - from.z());
    if (std::min(z_lo, z_hi) <= top && std::max(z_lo, z_hi) >= footprint.base_z) return true;
  }
  return false;
}

bool is_point_visible(const Rig& rig, const MountedSensor& sensor, const Eigen::Vector3d& p) {
  return in_field_of_view(sensor, p) && !occluded_by_body(rig.footprint(), sensor.pose.translation, p);
}

bool is_point_visible(const Rig& rig, std::string_view sensor_id, const Eigen::Vector3d& p) {
  return is_point_visible(rig, rig.at(sensor_id), p);
}

}  // namespace edgar::sensors
