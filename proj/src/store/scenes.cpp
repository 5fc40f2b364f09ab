#include "edgar/store/scenes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgar::store {

std::vector<TimeWindow> segment_scenes(double start, double end, double duration) {
  if (!(duration > 0.0) || !std::isfinite(duration)) throw std::invalid_argument("scene duration must be > 0");
  if (!std::isfinite(start) || !std::isfinite(end) || end < start) throw std::invalid_argument("invalid ride interval");
  std::vector<TimeWindow> out;
  for (std::size_t k = 0;; ++k) {
    const double a = start + static_cast<double>(k) * duration;
    if (a >= end) break;
    const double b = std::min(end, start + static_cast<double>(k + 1) * duration);
    out.emplace_back(a, b);
  }
  return out;
}

std::vector<TimeWindow> segment_scenes_at(double start, double end, std::span<const double> boundaries) {
  if (!std::isfinite(start) || !std::isfinite(end) || end < start) throw std::invalid_argument("invalid ride interval");
  std::vector<TimeWindow> out;
  double a = start;
  for (double b : boundaries) {
    if (!(b > a) || !(b < end)) throw std::invalid_argument("scene boundaries must increase strictly inside the ride");
    out.emplace_back(a, b);
    a = b;
  }
  if (end > a) out.emplace_back(a, end);
  return out;
}

std::string_view speed_bucket(double speed) {
  if (speed < kStandstillSpeed) return "standstill";
  if (speed < kLowSpeedLimit) return "low";
  if (speed < kMediumSpeedLimit) return "medium";
  return "high";
}

std::vector<Tag> auto_tags(const std::string& scene_id, std::span<const EgoPose> poses, const sensors::Rig& rig) {
  std::vector<Tag> out;
  if (!poses.empty()) {
    double vmax = 0.0;
    for (const auto& p : poses) vmax = std::max(vmax, std::hypot(p.v_x, p.v_y));
    out.push_back({scene_id, "dynamics", "speed", std::string(speed_bucket(vmax)), TagOrigin::automatic});
  }
  using sensors::Modality;
  for (Modality m : {Modality::camera, Modality::lidar, Modality::radar, Modality::microphone, Modality::gnss}) {
    if (rig.count(m) > 0) {
      out.push_back({scene_id, "sensors", "modality", std::string(sensors::to_string(m)), TagOrigin::automatic});
    }
  }
  return out;
}

}  // namespace edgar::store
