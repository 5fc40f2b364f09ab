#include "edgar/store/align.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace edgar::store {

std::size_t default_anchor(const std::vector<std::vector<double>>& streams) {
  if (streams.empty()) throw std::invalid_argument("alignment needs at least one sensor");
  std::size_t best = 0;
  for (std::size_t i = 1; i < streams.size(); ++i) {
    if (streams[i].size() < streams[best].size()) best = i;
  }
  return best;
}

double default_tolerance(std::span<const double> rates) {
  if (rates.empty()) throw std::invalid_argument("no sensor rates");
  double fastest = 0.0;
  for (double r : rates) {
    if (!(r > 0.0) || !std::isfinite(r)) throw std::invalid_argument("sensor rates must be positive");
    fastest = std::max(fastest, r);
  }
  return 0.5 / fastest;
}

std::vector<AlignedSample> align_samples(std::vector<std::vector<double>> streams, double tolerance,
                                         std::optional<std::size_t> anchor) {
  if (streams.empty()) throw std::invalid_argument("alignment needs at least one sensor");
  if (!(tolerance > 0.0) || !std::isfinite(tolerance)) throw std::invalid_argument("tolerance must be > 0");
  const std::size_t a = anchor.value_or(default_anchor(streams));
  if (a >= streams.size()) throw std::invalid_argument("anchor sensor out of range");
  for (auto& s : streams) {
    for (double t : s) {
      if (!std::isfinite(t)) throw std::invalid_argument("non-finite measurement timestamp");
    }
    std::sort(s.begin(), s.end());
  }

  std::vector<std::vector<char>> used(streams.size());
  for (std::size_t i = 0; i < streams.size(); ++i) used[i].assign(streams[i].size(), 0);

  std::vector<AlignedSample> out;
  std::vector<std::size_t> pick(streams.size());
  for (std::size_t k = 0; k < streams[a].size(); ++k) {
    const double t = streams[a][k];
    bool complete = true;
    for (std::size_t s = 0; s < streams.size() && complete; ++s) {
      if (s == a) {
        pick[s] = k;
        continue;
      }
      const auto& st = streams[s];
      auto it = std::lower_bound(st.begin(), st.end(), t - tolerance);
      std::size_t best = st.size();
      double best_d = 0.0;
      for (std::size_t j = static_cast<std::size_t>(it - st.begin()); j < st.size() && st[j] <= t + tolerance; ++j) {
        if (used[s][j]) continue;
        const double d = std::abs(st[j] - t);
        if (d > tolerance) continue;
        if (best == st.size() || d < best_d) {
          best = j;
          best_d = d;
        }
      }
      if (best == st.size()) complete = false;
      pick[s] = best;
    }
    if (!complete) continue;
    for (std::size_t s = 0; s < streams.size(); ++s) used[s][pick[s]] = 1;
    out.push_back({t, pick});
  }
  return out;
}

}  // namespace edgar::store
