#include "edgar/sensors/coverage.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace edgar::sensors {

namespace {

std::size_t cells_along(double lo, double hi, double cell) {
  const double n = std::round((hi - lo) / cell);
  return n > 0.0 ? static_cast<std::size_t>(n) : 0;
}

// Spec indices grouped by physical device, per perception modality.
struct DeviceGroups {
  std::array<std::vector<std::vector<const MountedSensor*>>, 3> by_modality;
};

std::size_t modality_slot(Modality m) {
  switch (m) {
    case Modality::camera: return 0;
    case Modality::lidar: return 1;
    case Modality::radar: return 2;
    default: break;
  }
  throw std::invalid_argument("modality '" + std::string(to_string(m)) + "' has no coverage layer");
}

DeviceGroups group_devices(const Rig& rig) {
  DeviceGroups g;
  for (Modality m : kPerceptionModalities) {
    auto& groups = g.by_modality[modality_slot(m)];
    for (const auto& device : rig.devices(m)) {
      auto& specs = groups.emplace_back();
      for (const auto& s : rig.sensors()) {
        if (s.spec.modality == m && s.spec.device == device) specs.push_back(&s);
      }
    }
  }
  return g;
}

bool device_sees(const Rig& rig, const std::vector<const MountedSensor*>& specs, const Eigen::Vector3d& p) {
  return std::any_of(specs.begin(), specs.end(), [&](const MountedSensor* s) { return is_point_visible(rig, *s, p); });
}

CoverageMap empty_map(const Rig& rig, const Window& window, double query_height) {
  window.validate();
  if (!std::isfinite(query_height)) throw std::invalid_argument("query height must be finite");
  return CoverageMap(window, query_height,
                     {rig.count(Modality::camera), rig.count(Modality::lidar), rig.count(Modality::radar)});
}

void fill_row(const Rig& rig, const DeviceGroups& groups, CoverageMap& map, std::size_t iy) {
  const Window& w = map.window();
  for (std::size_t ix = 0; ix < w.nx(); ++ix) {
    const Eigen::Vector2d c = w.center(ix, iy);
    if (!rig.footprint().polygon.empty() && point_in_polygon(rig.footprint().polygon, c)) {
      map.set_footprint(ix, iy, true);
      continue;
    }
    const Eigen::Vector3d p(c.x(), c.y(), map.query_height());
    for (Modality m : kPerceptionModalities) {
      std::uint16_t n = 0;
      for (const auto& specs : groups.by_modality[modality_slot(m)]) {
        if (device_sees(rig, specs, p)) ++n;
      }
      map.set_count(m, ix, iy, n);
    }
  }
}

bool covered_at(const Rig& rig, Modality modality, const Eigen::Vector3d& p) {
  for (const auto& s : rig.sensors()) {
    if (s.spec.modality == modality && is_point_visible(rig, s, p)) return true;
  }
  return false;
}

}  // namespace

std::size_t Window::nx() const { return cells_along(x_min, x_max, cell); }
std::size_t Window::ny() const { return cells_along(y_min, y_max, cell); }

Eigen::Vector2d Window::center(std::size_t ix, std::size_t iy) const {
  return {x_min + (static_cast<double>(ix) + 0.5) * cell, y_min + (static_cast<double>(iy) + 0.5) * cell};
}

void Window::validate() const {
  if (!(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) && std::isfinite(y_max))) {
    throw std::invalid_argument("window extents must be finite");
  }
  if (!(cell > 0.0) || !std::isfinite(cell)) throw std::invalid_argument("cell size must be positive");
  if (!(x_max > x_min) || !(y_max > y_min)) throw std::invalid_argument("window is degenerate");
  const auto check = [&](double lo, double hi, const char* axis) {
    const double n = std::round((hi - lo) / cell);
    if (n < 1.0 || std::abs(n * cell - (hi - lo)) > 1e-9 * std::max(1.0, hi - lo)) {
      throw std::invalid_argument(fmt::format("window {} extent is not a whole number of cells", axis));
    }
  };
  check(x_min, x_max, "x");
  check(y_min, y_max, "y");
  if (static_cast<double>(nx()) * static_cast<double>(ny()) > 1e8) {
    throw std::invalid_argument("window has too many cells");
  }
}

Window square_window(double side, double cell, Eigen::Vector2d center) {
  Window w{center.x() - 0.5 * side, center.x() + 0.5 * side, center.y() - 0.5 * side, center.y() + 0.5 * side, cell};
  w.validate();
  return w;
}

CoverageMap::CoverageMap(Window window, double query_height, std::array<std::size_t, 3> sensor_counts)
    : window_(window), query_height_(query_height), sensor_counts_(sensor_counts) {
  const std::size_t n = window_.nx() * window_.ny();
  for (auto& c : counts_) c.assign(n, 0);
  footprint_.assign(n, 0);
}

std::size_t CoverageMap::slot(Modality m) { return modality_slot(m); }

std::size_t CoverageMap::sensor_count(Modality m) const { return sensor_counts_[slot(m)]; }

std::uint16_t CoverageMap::count(Modality m, std::size_t ix, std::size_t iy) const {
  return counts_[slot(m)][index(ix, iy)];
}

void CoverageMap::set_count(Modality m, std::size_t ix, std::size_t iy, std::uint16_t v) {
  counts_[slot(m)][index(ix, iy)] = v;
}

unsigned CoverageMap::covered_by(std::span<const Modality> modalities, std::size_t ix, std::size_t iy) const {
  unsigned n = 0;
  for (Modality m : modalities) n += count(m, ix, iy);
  return n;
}

CoverageMap coverage_map(const Rig& rig, const Window& window, double query_height) {
  CoverageMap map = empty_map(rig, window, query_height);
  const DeviceGroups groups = group_devices(rig);
  const auto rows = static_cast<std::ptrdiff_t>(map.ny());
  // Rows write disjoint cells.
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t iy = 0; iy < rows; ++iy) fill_row(rig, groups, map, static_cast<std::size_t>(iy));
  return map;
}

CoverageMap coverage_map_serial(const Rig& rig, const Window& window, double query_height) {
  CoverageMap map = empty_map(rig, window, query_height);
  const DeviceGroups groups = group_devices(rig);
  for (std::size_t iy = 0; iy < map.ny(); ++iy) fill_row(rig, groups, map, iy);
  return map;
}

void write_coverage_csv(std::ostream& os, const CoverageMap& map) {
  const Window& w = map.window();
  os << fmt::format("# x_min={:.17g} x_max={:.17g} y_min={:.17g} y_max={:.17g} cell={:.17g} query_height={:.17g}\n",
                    w.x_min, w.x_max, w.y_min, w.y_max, w.cell, map.query_height());
  os << fmt::format("# cameras={} lidars={} radars={}\n", map.sensor_count(Modality::camera),
                    map.sensor_count(Modality::lidar), map.sensor_count(Modality::radar));
  os << "ix,iy,x_m,y_m,footprint,camera,lidar,radar\n";
  for (std::size_t iy = 0; iy < map.ny(); ++iy) {
    for (std::size_t ix = 0; ix < map.nx(); ++ix) {
      const auto c = w.center(ix, iy);
      os << fmt::format("{},{},{:.6f},{:.6f},{},{},{},{}\n", ix, iy, c.x(), c.y(), map.footprint(ix, iy) ? 1 : 0,
                        map.count(Modality::camera, ix, iy), map.count(Modality::lidar, ix, iy),
                        map.count(Modality::radar, ix, iy));
    }
  }
}

CoverageMap read_coverage_csv(std::istream& is) {
  const auto bad = [](const std::string& why) { throw std::runtime_error("coverage csv: " + why); };
  std::string line1, line2, header;
  if (!std::getline(is, line1) || !std::getline(is, line2) || !std::getline(is, header)) bad("truncated header");
  Window w;
  double qh = 0.0;
  std::size_t nc = 0, nl = 0, nr = 0;
  if (std::sscanf(line1.c_str(), "# x_min=%lf x_max=%lf y_min=%lf y_max=%lf cell=%lf query_height=%lf", &w.x_min,
                  &w.x_max, &w.y_min, &w.y_max, &w.cell, &qh) != 6) {
    bad("bad window line");
  }
  if (std::sscanf(line2.c_str(), "# cameras=%zu lidars=%zu radars=%zu", &nc, &nl, &nr) != 3) bad("bad count line");
  w.validate();
  CoverageMap map(w, qh, {nc, nl, nr});
  std::string line;
  std::size_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::size_t ix = 0, iy = 0;
    double x = 0.0, y = 0.0;
    unsigned fp = 0, c = 0, l = 0, r = 0;
    if (std::sscanf(line.c_str(), "%zu,%zu,%lf,%lf,%u,%u,%u,%u", &ix, &iy, &x, &y, &fp, &c, &l, &r) != 8) {
      bad("bad row '" + line + "'");
    }
    if (ix >= map.nx() || iy >= map.ny()) bad("cell index out of range");
    map.set_footprint(ix, iy, fp != 0);
    map.set_count(Modality::camera, ix, iy, static_cast<std::uint16_t>(c));
    map.set_count(Modality::lidar, ix, iy, static_cast<std::uint16_t>(l));
    map.set_count(Modality::radar, ix, iy, static_cast<std::uint16_t>(r));
    ++rows;
  }
  if (rows != map.cells()) bad("expected " + std::to_string(map.cells()) + " rows, got " + std::to_string(rows));
  return map;
}

void write_coverage_pgm(std::ostream& os, const CoverageMap& map, Modality m) {
  const std::size_t max_count = std::max<std::size_t>(1, map.sensor_count(m));
  os << "P2\n# " << to_string(m) << " coverage, footprint drawn black\n";
  os << map.nx() << ' ' << map.ny() << "\n255\n";
  // Image rows run top-down, i.e. from +y to -y.
  for (std::size_t r = 0; r < map.ny(); ++r) {
    const std::size_t iy = map.ny() - 1 - r;
    for (std::size_t ix = 0; ix < map.nx(); ++ix) {
      int v = 0;
      if (!map.footprint(ix, iy)) v = 40 + static_cast<int>(215 * map.count(m, ix, iy) / max_count);
      os << v << (ix + 1 == map.nx() ? '\n' : ' ');
    }
  }
}

std::vector<BlindRegion> blind_spot_regions(const CoverageMap& map, std::span<const Modality> modalities) {
  const std::size_t nx = map.nx();
  const std::size_t ny = map.ny();
  const Window& w = map.window();
  std::vector<std::uint8_t> blind(map.cells(), 0);
  for (std::size_t iy = 0; iy < ny; ++iy) {
    for (std::size_t ix = 0; ix < nx; ++ix) {
      blind[map.index(ix, iy)] = !map.footprint(ix, iy) && map.covered_by(modalities, ix, iy) == 0;
    }
  }
  std::vector<BlindRegion> regions;
  std::vector<std::uint8_t> seen(map.cells(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t start = 0; start < blind.size(); ++start) {
    if (!blind[start] || seen[start]) continue;
    BlindRegion region;
    region.x_min = region.y_min = std::numeric_limits<double>::infinity();
    region.x_max = region.y_max = -std::numeric_limits<double>::infinity();
    Eigen::Vector2d sum = Eigen::Vector2d::Zero();
    stack.assign(1, start);
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t k = stack.back();
      stack.pop_back();
      const std::size_t ix = k % nx;
      const std::size_t iy = k / nx;
      ++region.cells;
      const auto c = w.center(ix, iy);
      sum += c;
      region.x_min = std::min(region.x_min, c.x() - 0.5 * w.cell);
      region.x_max = std::max(region.x_max, c.x() + 0.5 * w.cell);
      region.y_min = std::min(region.y_min, c.y() - 0.5 * w.cell);
      region.y_max = std::max(region.y_max, c.y() + 0.5 * w.cell);
      const auto push = [&](std::size_t n) {
        if (blind[n] && !seen[n]) {
          seen[n] = 1;
          stack.push_back(n);
        }
      };
      if (ix > 0) push(k - 1);
      if (ix + 1 < nx) push(k + 1);
      if (iy > 0) push(k - nx);
      if (iy + 1 < ny) push(k + nx);
    }
    region.area = static_cast<double>(region.cells) * w.cell_area();
    region.centroid = sum / static_cast<double>(region.cells);
    regions.push_back(region);
  }
  return regions;
}

std::vector<BlindRegion> blind_spot_regions(const Rig& rig, std::span<const Modality> modalities,
                                            const Window& window, double query_height) {
  return blind_spot_regions(coverage_map(rig, window, query_height), modalities);
}

std::vector<double> azimuth_gaps(const Rig& rig, Modality modality, double r, const AzimuthSweepOptions& opts) {
  if (!(opts.step_deg > 0.0)) throw std::invalid_argument("azimuth step must be positive");
  const auto n = static_cast<std::size_t>(std::llround(360.0 / opts.step_deg));
  std::vector<double> gaps;
  for (std::size_t k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    const Eigen::Vector3d p(r * std::cos(theta), r * std::sin(theta), opts.query_height);
    if (!covered_at(rig, modality, p)) gaps.push_back(theta);
  }
  return gaps;
}

std::optional<double> min_full_coverage_range(const Rig& rig, Modality modality, const FullCoverageOptions& opts) {
  if (rig.count(modality) == 0) {
    throw std::invalid_argument("rig has no sensor of modality '" + std::string(to_string(modality)) + "'");
  }
  if (!(opts.scan_step > 0.0) || !(opts.tolerance > 0.0) || !(opts.max_radius > 0.0)) {
    throw std::invalid_argument("full-coverage search parameters must be positive");
  }
  const auto full = [&](double r) {
    const auto n = static_cast<std::size_t>(std::llround(360.0 / opts.sweep.step_deg));
    for (std::size_t k = 0; k < n; ++k) {
      const double theta = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
      if (!covered_at(rig, modality, {r * std::cos(theta), r * std::sin(theta), opts.sweep.query_height})) {
        return false;
      }
    }
    return true;
  };
  double lo = 0.0;
  double hi = -1.0;
  const auto steps = static_cast<std::size_t>(std::floor(opts.max_radius / opts.scan_step + 1e-9));
  for (std::size_t k = 1; k <= steps; ++k) {
    const double r = static_cast<double>(k) * opts.scan_step;
    if (full(r)) {
      hi = r;
      break;
    }
    lo = r;
  }
  if (hi < 0.0) return std::nullopt;
  while (hi - lo > opts.tolerance) {
    const double mid = 0.5 * (lo + hi);
    if (full(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace edgar::sensors
