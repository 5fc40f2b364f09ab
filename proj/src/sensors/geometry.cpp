#include "edgar/sensors/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace edgar::sensors {

namespace {

double cross(const Eigen::Vector2d& a, const Eigen::Vector2d& b) { return a.x() * b.y() - a.y() * b.x(); }

int orientation(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& c) {
  const double v = cross(b - a, c - a);
  if (v > 0.0) return 1;
  if (v < 0.0) return -1;
  return 0;
}

bool on_segment(const Eigen::Vector2d& a, const Eigen::Vector2d& b, const Eigen::Vector2d& p) {
  return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) && std::min(a.y(), b.y()) <= p.y() &&
         p.y() <= std::max(a.y(), b.y());
}

bool segments_touch(const Eigen::Vector2d& p1, const Eigen::Vector2d& p2, const Eigen::Vector2d& q1,
                    const Eigen::Vector2d& q2) {
  const int o1 = orientation(p1, p2, q1);
  const int o2 = orientation(p1, p2, q2);
  const int o3 = orientation(q1, q2, p1);
  const int o4 = orientation(q1, q2, p2);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(p1, p2, q1)) return true;
  if (o2 == 0 && on_segment(p1, p2, q2)) return true;
  if (o3 == 0 && on_segment(q1, q2, p1)) return true;
  if (o4 == 0 && on_segment(q1, q2, p2)) return true;
  return false;
}

}  // namespace

bool point_in_polygon(std::span<const Eigen::Vector2d> polygon, const Eigen::Vector2d& p) {
  bool inside = false;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const auto& a = polygon[i];
    const auto& b = polygon[j];
    if ((a.y() > p.y()) != (b.y() > p.y())) {
      const double x_cross = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
      if (p.x() < x_cross) inside = !inside;
    }
  }
  return inside;
}

double polygon_area(std::span<const Eigen::Vector2d> polygon) {
  double twice = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) twice += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * std::abs(twice);
}

bool is_simple_polygon(std::span<const Eigen::Vector2d> polygon) {
  const std::size_t n = polygon.size();
  if (n < 3) return false;
  for (const auto& v : polygon) {
    if (!v.allFinite()) return false;
  }
  if (!(polygon_area(polygon) > 0.0)) return false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a1 = polygon[i];
    const auto& a2 = polygon[(i + 1) % n];
    if (a1 == a2) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool adjacent = j == i + 1 || (i == 0 && j == n - 1);
      if (adjacent) continue;
      if (segments_touch(a1, a2, polygon[j], polygon[(j + 1) % n])) return false;
    }
  }
  return true;
}

std::vector<Interval> segment_inside_intervals(std::span<const Eigen::Vector2d> polygon, const Eigen::Vector2d& a,
                                               const Eigen::Vector2d& b) {
  std::vector<double> cuts{0.0, 1.0};
  const Eigen::Vector2d d = b - a;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Eigen::Vector2d& p = polygon[i];
    const Eigen::Vector2d e = polygon[(i + 1) % n] - p;
    const double denom = cross(d, e);
    if (denom == 0.0) continue;
    const Eigen::Vector2d ap = p - a;
    const double t = cross(ap, e) / denom;
    const double u = cross(ap, d) / denom;
    if (t > 0.0 && t < 1.0 && u >= 0.0 && u <= 1.0) cuts.push_back(t);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<Interval> inside;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double lo = cuts[i];
    const double hi = cuts[i + 1];
    if (hi <= lo) continue;
    const Eigen::Vector2d mid = a + 0.5 * (lo + hi) * d;
    if (!point_in_polygon(polygon, mid)) continue;
    if (!inside.empty() && inside.back().hi == lo) {
      inside.back().hi = hi;
    } else {
      inside.push_back({lo, hi});
    }
  }
  return inside;
}

}  // namespace edgar::sensors
