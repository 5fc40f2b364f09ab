#pragma once

#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "edgar/sensors/rig.hpp"
#include "edgar/store/records.hpp"

namespace edgar::store {

using TimeWindow = std::pair<double, double>;

/// Consecutive windows start + k*duration covering [start, end); the last one may be shorter.
/// Throws std::invalid_argument for duration <= 0 or end < start.
std::vector<TimeWindow> segment_scenes(double start, double end, double duration);

/// Windows split at the given interior boundaries, which must be strictly
/// increasing and lie inside (start, end).
std::vector<TimeWindow> segment_scenes_at(double start, double end, std::span<const double> boundaries);

/// Speed bucket edges [m/s]: standstill below 0.5, low below 30 km/h, medium below 60 km/h.
inline constexpr double kStandstillSpeed = 0.5;
inline constexpr double kLowSpeedLimit = 30.0 / 3.6;
inline constexpr double kMediumSpeedLimit = 60.0 / 3.6;

std::string_view speed_bucket(double speed);

/// Auto tags: (dynamics, speed, bucket of the maximum ego speed) and one
/// (sensors, modality, m) per modality present in the rig.
std::vector<Tag> auto_tags(const std::string& scene_id, std::span<const EgoPose> poses, const sensors::Rig& rig);

}  // namespace edgar::store
