#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

namespace edgar::sensors {

using Polygon = std::vector<Eigen::Vector2d>;

/// Even-odd rule; points on an edge may land either way.
bool point_in_polygon(std::span<const Eigen::Vector2d> polygon, const Eigen::Vector2d& p);

/// At least three vertices, non-zero area, and no two non-adjacent edges touch.
bool is_simple_polygon(std::span<const Eigen::Vector2d> polygon);

double polygon_area(std::span<const Eigen::Vector2d> polygon);

struct Interval {
  double lo;
  double hi;
};

/// Parameter sub-intervals of a -> b (t in [0, 1]) lying inside the polygon.
std::vector<Interval> segment_inside_intervals(std::span<const Eigen::Vector2d> polygon, const Eigen::Vector2d& a,
                                               const Eigen::Vector2d& b);

}  // namespace edgar::sensors
