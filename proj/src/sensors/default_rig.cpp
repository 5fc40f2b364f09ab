// Default mounting poses. The vehicle text only places sensors qualitatively
// (roof corners and centers, bumpers); numbers here are plausible defaults for
// a 4.97 m x 1.94 m van and are fully overridable from a rig file.
#include <string>

#include "edgar/common/format.hpp"
#include "edgar/sensors/rig_config.hpp"

namespace edgar::sensors {

namespace {

constexpr double kRoofZ = 2.10;
constexpr double kBumperZ = 0.55;

// Compressed FullHD frame (10:1) so that a camera fits a gigabit port.
constexpr std::uint64_t kCameraFrameBytes = 1920ull * 1200ull * 3ull / 10ull;
constexpr std::uint64_t kDepthFrameBytes = 1280ull * 720ull * 2ull;
constexpr std::uint64_t kOusterFrameBytes = 128ull * 1024ull * 12ull;
constexpr std::uint64_t kFalconFrameBytes = 750000ull;
constexpr std::uint64_t kRadarScanBytes = 4000ull;
constexpr std::uint64_t kGnssMessageBytes = 256ull;

MountedSensor make(std::string id, Modality m, double h_deg, double v_deg, double min_r, double max_r, double rate,
                   std::uint64_t payload, Eigen::Vector3d xyz, double yaw_deg, double pitch_deg = 0.0) {
  MountedSensor s;
  s.spec.id = id;
  s.spec.device = std::move(id);
  s.spec.modality = m;
  s.spec.h_fov = deg2rad(h_deg);
  s.spec.v_fov = deg2rad(v_deg);
  s.spec.min_range = min_r;
  s.spec.max_range = max_r;
  s.spec.rate = rate;
  s.spec.payload_per_frame = payload;
  s.pose.translation = xyz;
  s.pose.yaw = deg2rad(yaw_deg);
  s.pose.pitch = deg2rad(pitch_deg);
  return s;
}

MountedSensor camera(std::string id, double h_deg, double v_deg, double max_r, Eigen::Vector3d xyz, double yaw_deg) {
  auto s = make(std::move(id), Modality::camera, h_deg, v_deg, 0.1, max_r, 40.0, kCameraFrameBytes, xyz, yaw_deg);
  s.spec.image_width = 1920;
  s.spec.image_height = 1200;
  return s;
}

void add_radar(std::vector<MountedSensor>& out, const std::string& device, Eigen::Vector3d xyz, double yaw_deg) {
  auto far = make(device + "_far", Modality::radar, 18.0, 20.0, 0.2, 250.0, 20.0, kRadarScanBytes, xyz, yaw_deg);
  far.spec.device = device;
  far.spec.extra = "far-field pattern";
  auto near = make(device + "_near", Modality::radar, 120.0, 20.0, 0.2, 70.0, 20.0, kRadarScanBytes, xyz, yaw_deg);
  near.spec.device = device;
  near.spec.extra = "near-field pattern, range is a default";
  out.push_back(std::move(far));
  out.push_back(std::move(near));
}

}  // namespace

Rig default_edgar_rig() {
  std::vector<MountedSensor> s;

  s.push_back(camera("cam_mr_front_center", 84.9, 59.7, 100.0, {2.80, 0.00, kRoofZ}, 0.0));
  s.push_back(camera("cam_mr_front_left", 84.9, 59.7, 100.0, {2.70, 0.85, kRoofZ}, 60.0));
  s.push_back(camera("cam_mr_front_right", 84.9, 59.7, 100.0, {2.70, -0.85, kRoofZ}, -60.0));
  s.push_back(camera("cam_mr_rear_left", 99.5, 73.1, 80.0, {-0.70, 0.85, kRoofZ}, 120.0));
  s.push_back(camera("cam_mr_rear_center", 99.5, 73.1, 80.0, {-0.80, 0.00, kRoofZ}, 180.0));
  s.push_back(camera("cam_mr_rear_right", 99.5, 73.1, 80.0, {-0.70, -0.85, kRoofZ}, -120.0));
  s.push_back(camera("cam_lr_front_left", 38.6, 24.8, 200.0, {2.85, 0.25, 2.05}, 0.0));
  s.push_back(camera("cam_lr_front_right", 38.6, 24.8, 200.0, {2.85, -0.25, 2.05}, 0.0));

  auto depth_l = make("cam_sr_left", Modality::camera, 87.0, 58.0, 0.4, 10.0, 30.0, kDepthFrameBytes,
                      {1.20, 0.95, 2.05}, 90.0, 30.0);
  auto depth_r = make("cam_sr_right", Modality::camera, 87.0, 58.0, 0.4, 10.0, 30.0, kDepthFrameBytes,
                      {1.20, -0.95, 2.05}, -90.0, 30.0);
  depth_l.spec.image_width = depth_r.spec.image_width = 1280;
  depth_l.spec.image_height = depth_r.spec.image_height = 720;
  depth_l.spec.extra = depth_r.spec.extra = "active IR stereo depth";
  s.push_back(std::move(depth_l));
  s.push_back(std::move(depth_r));

  auto ouster_l = make("lidar_mr_left", Modality::lidar, 360.0, 45.0, 0.5, 45.0, 10.0, kOusterFrameBytes,
                       {2.75, 0.85, 2.25}, 0.0);
  auto ouster_r = make("lidar_mr_right", Modality::lidar, 360.0, 45.0, 0.5, 45.0, 10.0, kOusterFrameBytes,
                       {2.75, -0.85, 2.25}, 0.0);
  ouster_l.spec.extra = ouster_r.spec.extra = "rotating";
  s.push_back(std::move(ouster_l));
  s.push_back(std::move(ouster_r));
  s.push_back(make("lidar_lr_front", Modality::lidar, 120.0, 25.0, 1.0, 250.0, 10.0, kFalconFrameBytes,
                   {2.90, 0.00, 2.25}, 0.0));
  s.push_back(make("lidar_lr_rear", Modality::lidar, 120.0, 25.0, 1.0, 250.0, 10.0, kFalconFrameBytes,
                   {-0.85, 0.00, 2.25}, 180.0));

  add_radar(s, "radar_front_center", {4.07, 0.00, kBumperZ}, 0.0);
  add_radar(s, "radar_front_left", {3.95, 0.99, kBumperZ}, 45.0);
  add_radar(s, "radar_front_right", {3.95, -0.99, kBumperZ}, -45.0);
  add_radar(s, "radar_rear_left", {-0.85, 0.99, kBumperZ}, 135.0);
  add_radar(s, "radar_rear_center", {-0.94, 0.00, kBumperZ}, 180.0);
  add_radar(s, "radar_rear_right", {-0.85, -0.99, kBumperZ}, -135.0);

  auto gnss = make("gnss", Modality::gnss, 360.0, 180.0, 0.0, 1.0e7, 100.0, kGnssMessageBytes, {1.00, 0.00, 2.00},
                   0.0);
  gnss.spec.extra = "GNSS/INS receiver";
  s.push_back(std::move(gnss));

  Footprint fp;
  fp.polygon = {{-0.92, -0.97}, {4.05, -0.97}, {4.05, 0.97}, {-0.92, 0.97}};
  fp.base_z = 0.0;
  fp.height = 1.90;
  return Rig(std::move(s), std::move(fp));
}

}  // namespace edgar::sensors
