#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace edgar::store {

struct AlignedSample {
  double timestamp = 0.0;                 // the anchor measurement
  std::vector<std::size_t> measurements;  // per sensor, index into its sorted stream
};

/// Sensor with the fewest measurements, lowest index on ties.
std::size_t default_anchor(const std::vector<std::vector<double>>& streams);

/// Half the period of the fastest sensor. Throws on an empty or non-positive rate list.
double default_tolerance(std::span<const double> rates);

/// Walks the anchor measurements in time order. For each, every other sensor
/// contributes its nearest unassigned measurement within +-tolerance (earlier
/// wins a tie). A sample is emitted only when all sensors contribute, and only
/// then are the chosen measurements marked as used. Streams are sorted first,
/// so the result does not depend on input order.
/// Throws std::invalid_argument when tolerance <= 0, there are no streams, or the anchor is out of range.
std::vector<AlignedSample> align_samples(std::vector<std::vector<double>> streams, double tolerance,
                                         std::optional<std::size_t> anchor = std::nullopt);

}  // namespace edgar::store
