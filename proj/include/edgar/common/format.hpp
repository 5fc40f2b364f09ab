#pragma once

#include <string>

namespace edgar {

/// Six significant digits, the fixed precision of every report and CSV number.
std::string fmt_num(double value);

/// Degrees to radians and back.
constexpr double deg2rad(double deg) { return deg * 3.14159265358979323846 / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / 3.14159265358979323846; }
constexpr double kph2mps(double kph) { return kph / 3.6; }

}  // namespace edgar
