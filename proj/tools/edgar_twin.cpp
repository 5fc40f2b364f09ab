#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "edgar/common/config.hpp"
#include "edgar/common/format.hpp"
#include "edgar/dynamics/iso4138.hpp"
#include "edgar/dynamics/vehicle_config.hpp"
#include "edgar/sensors/rig_config.hpp"
#include "edgar/store/integrity.hpp"
#include "edgar/store/persistence.hpp"
#include "edgar/store/tag_query.hpp"
#include "edgar/twin/runner.hpp"

namespace {

using namespace edgar;
namespace fs = std::filesystem;

sensors::Rig rig_from(const std::string& ref) {
  return ref == "default" ? sensors::default_edgar_rig() : sensors::load_rig(ref);
}

int cmd_run(const std::string& file, const std::optional<std::string>& out, const std::optional<std::uint64_t>& seed) {
  twin::ScenarioConfig cfg = twin::load_scenario(file);
  if (seed) cfg.seed = *seed;
  const fs::path dir = out ? fs::path(*out) : fs::path(cfg.output_dir);
  std::cout << "# effective configuration\n" << twin::effective_config_text(cfg) << "# output: " << dir.string() << "\n";
  const auto rep = twin::run_scenario(cfg, dir);
  for (const auto& f : rep.failures) std::cerr << "FAIL " << f << "\n";
  if (!rep.error.empty()) std::cerr << "error: " << rep.error << " (partial report written)\n";
  std::cout << "report: " << (dir / "report.txt").string() << "\n";
  return rep.exit_code;
}

int cmd_iso(const std::string& file, double swa_deg, const std::string& mode, double accel_rate) {
  const auto v = file == "default" ? dynamics::VehicleConfig{} : dynamics::load_vehicle_config(file);
  const double swa = deg2rad(swa_deg);
  const auto speeds = dynamics::default_iso4138_speeds();
  const auto rep = mode == "continuous" ? dynamics::run_iso4138_continuous(v.params, v.tires, swa, accel_rate, speeds)
                                        : dynamics::run_iso4138_discrete(v.params, v.tires, swa, speeds);
  std::cout << dynamics::to_csv(rep);
  try {
    std::cerr << "understeer_gradient_rad_per_mps2: " << fmt_num(dynamics::understeer_gradient(rep, v.params)) << "\n";
  } catch (const std::invalid_argument& e) {
    std::cerr << "understeer gradient unavailable: " << e.what() << "\n";
  }
  return twin::kExitOk;
}

int cmd_coverage(const std::string& file, double window, double cell) {
  twin::ScenarioConfig cfg;
  cfg.rig = rig_from(file);
  cfg.coverage.window = window;
  cfg.coverage.cell = cell;
  const auto cov = twin::run_coverage(cfg);
  std::cout << fmt::format("window_m: {}\ncell_m: {}\n", fmt_num(window), fmt_num(cell));
  for (const auto& m : cov.modalities) {
    std::cout << fmt::format("{}: sensors={} covered_fraction={} full_coverage_range_m={}\n", m.modality, m.sensors,
                             fmt_num(m.covered_fraction),
                             m.full_coverage_range ? fmt_num(*m.full_coverage_range) : "none");
  }
  std::cout << fmt::format("blind_regions: {}\nblind_area_m2: {}\n", cov.blind_regions, fmt_num(cov.blind_area));
  return twin::kExitOk;
}

int cmd_netcheck(const std::string& file) {
  auto cfg = twin::load_scenario(file);
  const auto run = twin::run_network(cfg);
  net::write_flow_stats_csv(std::cout, run.result);
  int code = twin::kExitOk;
  for (const auto& c : run.summary.checks) {
    std::cout << fmt::format("{} {} ({}): max_latency_s={} jitter_s={}{}\n", c.pass ? "PASS" : "FAIL", c.flow_id,
                             net::to_string(c.cls), fmt_num(c.max_latency), fmt_num(c.jitter),
                             c.reason.empty() ? "" : " reason=" + c.reason);
    if (!c.pass) code = twin::kExitCheck;
  }
  return code;
}

int cmd_store_check(const std::string& dir, const std::optional<std::string>& rig_ref) {
  const auto st = store::load_store(dir);
  std::optional<sensors::Rig> rig;
  if (rig_ref) rig = rig_from(*rig_ref);
  const auto rep = store::integrity_check(st, rig ? &*rig : nullptr);
  for (const auto& v : rep.violations) std::cout << fmt::format("{} {}: {}\n", v.table, v.id, v.message);
  std::cout << fmt::format("violations: {}\n", rep.violations.size());
  return rep.ok() ? twin::kExitOk : twin::kExitCheck;
}

int cmd_store_query(const std::string& dir, const std::string& expr) {
  const auto q = store::TagQuery::parse(expr);
  const auto st = store::load_store(dir);
  for (const auto& id : store::query_scenes(st, q)) std::cout << id << "\n";
  return twin::kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EDGAR digital twin scenario runner"};
  app.require_subcommand(1);

  std::string file, dir, expr, mode = "discrete";
  std::optional<std::string> out, rig_ref;
  std::optional<std::uint64_t> seed;
  double swa = 45.0, accel_rate = 0.1, window = 40.0, cell = 0.25;

  auto* run = app.add_subcommand("run", "run a scenario");
  run->add_option("scenario", file, "scenario file")->required();
  run->add_option("--out", out, "output directory");
  run->add_option("--seed", seed, "seed override");

  auto* iso = app.add_subcommand("iso4138", "constant steering-wheel angle test");
  iso->add_option("vehicle", file, "vehicle file or 'default'")->required();
  iso->add_option("--swa", swa, "steering-wheel angle [deg]")->required();
  iso->add_option("--mode", mode, "discrete or continuous")->check(CLI::IsMember({"discrete", "continuous"}));
  iso->add_option("--accel-rate", accel_rate, "continuous test ramp [m/s^2]");

  auto* cov = app.add_subcommand("coverage", "BEV sensor coverage");
  cov->add_option("rig", file, "rig file or 'default'")->required();
  cov->add_option("--window", window, "square window side [m]")->required();
  cov->add_option("--cell", cell, "cell size [m]")->required();

  auto* nc = app.add_subcommand("netcheck", "network simulation and SR class checks of a scenario");
  nc->add_option("scenario", file, "scenario file")->required();

  auto* st = app.add_subcommand("store", "ride store utilities");
  st->require_subcommand(1);
  auto* chk = st->add_subcommand("check", "integrity check");
  chk->add_option("dir", dir, "store directory")->required();
  chk->add_option("--rig", rig_ref, "rig file or 'default'");
  auto* qry = st->add_subcommand("query", "scenes matching a tag expression");
  qry->add_option("dir", dir, "store directory")->required();
  qry->add_option("expr", expr, "tag expression")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? twin::kExitOk : twin::kExitConfig;
  }

  try {
    if (*run) return cmd_run(file, out, seed);
    if (*iso) return cmd_iso(file, swa, mode, accel_rate);
    if (*cov) return cmd_coverage(file, window, cell);
    if (*nc) return cmd_netcheck(file);
    if (*chk) return cmd_store_check(dir, rig_ref);
    if (*qry) return cmd_store_query(dir, expr);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return twin::kExitConfig;
  } catch (const store::TagQueryError& e) {
    std::cerr << "query error: " << e.what() << "\n";
    return twin::kExitConfig;
  } catch (const store::StoreFormatError& e) {
    std::cerr << "store error: " << e.what() << "\n";
    return twin::kExitConfig;
  } catch (const DivergenceError& e) {
    std::cerr << "divergence: " << e.what() << "\n";
    return twin::kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return twin::kExitRuntime;
  }
  return twin::kExitOk;
}
