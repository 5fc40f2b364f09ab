#include "edgar/common/format.hpp"

#include <cmath>

#include <fmt/format.h>

namespace edgar {

std::string fmt_num(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{:.6g}", value);
}

}  // namespace edgar
