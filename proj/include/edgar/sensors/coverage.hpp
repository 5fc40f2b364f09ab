#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "edgar/sensors/rig.hpp"

namespace edgar::sensors {

/// Axis-aligned BEV grid. Extents must be an integer number of cells.
struct Window {
  double x_min = -10.0;
  double x_max = 10.0;
  double y_min = -10.0;
  double y_max = 10.0;
  double cell = 0.1;

  std::size_t nx() const;
  std::size_t ny() const;
  double cell_area() const { return cell * cell; }
  double area() const { return (x_max - x_min) * (y_max - y_min); }
  Eigen::Vector2d center(std::size_t ix, std::size_t iy) const;
  /// Throws std::invalid_argument for a degenerate window.
  void validate() const;

  bool operator==(const Window&) const = default;
};

/// Square window of side `side` centred on `center`.
Window square_window(double side, double cell, Eigen::Vector2d center = Eigen::Vector2d::Zero());

class CoverageMap {
 public:
  CoverageMap() = default;
  CoverageMap(Window window, double query_height, std::array<std::size_t, 3> sensor_counts);

  const Window& window() const { return window_; }
  double query_height() const { return query_height_; }
  std::size_t nx() const { return window_.nx(); }
  std::size_t ny() const { return window_.ny(); }
  std::size_t cells() const { return nx() * ny(); }

  /// Devices of that modality in the rig the map was built from.
  std::size_t sensor_count(Modality m) const;

  std::uint16_t count(Modality m, std::size_t ix, std::size_t iy) const;
  void set_count(Modality m, std::size_t ix, std::size_t iy, std::uint16_t v);
  bool footprint(std::size_t ix, std::size_t iy) const { return footprint_[index(ix, iy)] != 0; }
  void set_footprint(std::size_t ix, std::size_t iy, bool v) { footprint_[index(ix, iy)] = v ? 1 : 0; }

  /// Sum of counts over the given modalities.
  unsigned covered_by(std::span<const Modality> modalities, std::size_t ix, std::size_t iy) const;

  std::size_t index(std::size_t ix, std::size_t iy) const { return iy * nx() + ix; }

  bool operator==(const CoverageMap&) const = default;

 private:
  static std::size_t slot(Modality m);

  Window window_;
  double query_height_ = 1.0;
  std::array<std::size_t, 3> sensor_counts_{};
  std::array<std::vector<std::uint16_t>, 3> counts_;
  std::vector<std::uint8_t> footprint_;
};

inline constexpr double kDefaultQueryHeight = 1.0;

/// A device covers a cell when any of its specs sees the cell centre at
/// `query_height`. Cells whose centre lies inside the footprint are masked.
CoverageMap coverage_map(const Rig& rig, const Window& window, double query_height = kDefaultQueryHeight);
/// Single-threaded reference for coverage_map.
CoverageMap coverage_map_serial(const Rig& rig, const Window& window, double query_height = kDefaultQueryHeight);

/// CSV with a `# key=value` metadata header; read_coverage_csv inverts it.
void write_coverage_csv(std::ostream& os, const CoverageMap& map);
CoverageMap read_coverage_csv(std::istream& is);
/// Plain PGM (P2), one modality, brightness proportional to count.
void write_coverage_pgm(std::ostream& os, const CoverageMap& map, Modality m);

struct BlindRegion {
  std::size_t cells = 0;
  double area = 0.0;  // m^2
  Eigen::Vector2d centroid = Eigen::Vector2d::Zero();
  double x_min = 0.0, x_max = 0.0, y_min = 0.0, y_max = 0.0;  // cell-edge bounding box
};

/// 4-connected components of cells with zero coverage over `modalities`, footprint
/// excluded. Ordered by the row-major index of each region's first cell.
std::vector<BlindRegion> blind_spot_regions(const CoverageMap& map, std::span<const Modality> modalities);
std::vector<BlindRegion> blind_spot_regions(const Rig& rig, std::span<const Modality> modalities,
                                            const Window& window, double query_height = kDefaultQueryHeight);

struct AzimuthSweepOptions {
  double step_deg = 0.1;
  double query_height = kDefaultQueryHeight;
};

/// Bearings (rad, in [0, 2*pi)) at distance r from the frame origin that no
/// sensor of `modality` sees.
std::vector<double> azimuth_gaps(const Rig& rig, Modality modality, double r, const AzimuthSweepOptions& opts = {});

struct FullCoverageOptions {
  AzimuthSweepOptions sweep;
  double max_radius = 100.0;
  double scan_step = 0.25;
  double tolerance = 1e-3;
};

/// Smallest r at which the azimuth sweep has no gaps. A coarse outward scan
/// brackets the first gap-free radius, bisection refines it to `tolerance`.
/// Empty when no radius up to max_radius works. Throws std::invalid_argument
/// if the rig has no sensor of that modality.
std::optional<double> min_full_coverage_range(const Rig& rig, Modality modality, const FullCoverageOptions& opts = {});

}  // namespace edgar::sensors
