// Serial vs OpenMP timing for the two parallel kernels. Also confirms both
// variants produce identical output.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>
#ifdef _OPENMP
#include <omp.h>
#endif

#include "edgar/common/format.hpp"
#include "edgar/dynamics/iso4138.hpp"
#include "edgar/sensors/coverage.hpp"
#include "edgar/sensors/rig_config.hpp"

namespace {

double best_of(int repeat, const std::function<void()>& fn) {
  double best = 1e300;
  for (int i = 0; i < repeat; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    best = std::min(best, std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());
  }
  return best;
}

void row(const std::string& kernel, double serial, double parallel, bool identical) {
  fmt::print("{:<22} {:>10.4f} {:>10.4f} {:>8.2f}x  {}\n", kernel, serial, parallel, serial / parallel,
             identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"serial vs OpenMP kernel timing"};
  int repeat = 3;
  int threads = 0;
  double window = 60.0, cell = 0.1, swa_deg = 45.0;
  app.add_option("--repeat", repeat, "runs per variant, best time reported")->check(CLI::PositiveNumber);
  app.add_option("--threads", threads, "OpenMP threads, 0 keeps the runtime default");
  app.add_option("--window", window, "coverage window side [m]");
  app.add_option("--cell", cell, "coverage cell size [m]");
  app.add_option("--swa", swa_deg, "ISO 4138 steering-wheel angle [deg]");
  CLI11_PARSE(app, argc, argv);

#ifdef _OPENMP
  if (threads > 0) omp_set_num_threads(threads);
  fmt::print("OpenMP threads: {}\n", omp_get_max_threads());
#else
  fmt::print("built without OpenMP; both columns run serially\n");
#endif
  fmt::print("{:<22} {:>10} {:>10} {:>9}\n", "kernel", "serial_s", "openmp_s", "speedup");

  const auto rig = edgar::sensors::default_edgar_rig();
  const auto w = edgar::sensors::square_window(window, cell);
  edgar::sensors::CoverageMap a, b;
  const double cs = best_of(repeat, [&] { a = edgar::sensors::coverage_map_serial(rig, w); });
  const double cp = best_of(repeat, [&] { b = edgar::sensors::coverage_map(rig, w); });
  row(fmt::format("coverage_map {}x{}", w.nx(), w.ny()), cs, cp, a == b);

  const edgar::dynamics::VehicleParams p;
  const edgar::dynamics::AxleTires t;
  const auto speeds = edgar::dynamics::default_iso4138_speeds();
  const double swa = edgar::deg2rad(swa_deg);
  edgar::dynamics::SteadyStateReport rs, rp;
  const double is = best_of(repeat, [&] { rs = edgar::dynamics::run_iso4138_discrete_serial(p, t, swa, speeds); });
  const double ip = best_of(repeat, [&] { rp = edgar::dynamics::run_iso4138_discrete(p, t, swa, speeds); });
  row(fmt::format("iso4138 sweep {} pts", speeds.size()), is, ip, rs.points == rp.points);
  return a == b && rs.points == rp.points ? 0 : 1;
}
