#include "edgar/twin/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "edgar/common/config.hpp"
#include "edgar/common/format.hpp"
#include "edgar/sensors/coverage.hpp"
#include "edgar/store/persistence.hpp"

namespace edgar::twin {

namespace fs = std::filesystem;

ScriptSample sample_script(const ScenarioConfig& c, double t) {
  ScriptSample s;
  s.speed = c.initial.v_x;
  const ManeuverPoint* prev_swa = nullptr;
  const ManeuverPoint* next_swa = nullptr;
  for (const auto& p : c.maneuver) {
    if (p.t <= t) {
      if (p.speed) {
        s.speed = p.speed;
        s.force.reset();
      } else if (p.force) {
        s.force = p.force;
        s.speed.reset();
      }
      if (p.swa) prev_swa = &p;
    } else if (p.swa && !next_swa) {
      next_swa = &p;
    }
  }
  if (prev_swa && next_swa) {
    const double w = (t - prev_swa->t) / (next_swa->t - prev_swa->t);
    s.swa = *prev_swa->swa + w * (*next_swa->swa - *prev_swa->swa);
  } else if (prev_swa) {
    s.swa = *prev_swa->swa;
  }
  return s;
}

DynamicsRun run_dynamics(const ScenarioConfig& c) {
  const auto& params = c.vehicle.params;
  const dynamics::SingleTrackModel model(params, c.vehicle.tires);
  const std::size_t n = c.steps();
  DynamicsRun run;
  run.states.reserve(n + 1);
  run.delta.reserve(n);
  run.force.reserve(n);
  run.states.push_back(c.initial);
  auto& sum = run.summary;
  sum.steps = n;
  sum.actuated = c.mode.allows_actuation();

  double swa = 0.0;  // actual steering-wheel angle, rate limited
  dynamics::VehicleState x = c.initial;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * c.dt;
    dynamics::DriveInput in;
    if (sum.actuated) {
      const ScriptSample cmd = sample_script(c, t);
      const ScriptSample ahead = sample_script(c, t + c.dt);
      Command req;
      req.speed_target = cmd.speed.value_or(x.v_x);
      req.steering_rate = (ahead.swa - swa) / c.dt;
      const LimitedCommand first = limit_command(c.mode, req);
      req = first.command;
      req.accel = cmd.force ? *cmd.force / params.m : c.speed_kp * (req.speed_target - x.v_x);
      const LimitedCommand lim = limit_command(c.mode, req);
      sum.clamps.speed += first.flags.speed ? 1 : 0;
      sum.clamps.steering_rate += first.flags.steering_rate ? 1 : 0;
      sum.clamps.accel += lim.flags.accel ? 1 : 0;

      swa += lim.command.steering_rate * c.dt;
      double delta = swa / params.steering_ratio;
      const double lat = lateral_steer_limit(c.mode, params.wheelbase(), x.v_x);
      const double cap = std::min(params.max_road_wheel_angle, lat);
      if (std::abs(delta) > cap) {
        if (lat < params.max_road_wheel_angle) ++sum.clamps.lateral;
        delta = std::copysign(cap, delta);
      }
      in.delta = delta;
      const auto res = dynamics::resistance_forces(x, params);
      // Speed control feeds the resistances forward; open-loop force does not.
      in.F_x_drive = params.m * lim.command.accel + (cmd.force ? 0.0 : res.drag + res.roll);
    }
    x = model.step(x, in, c.dt, t);
    run.delta.push_back(in.delta);
    run.force.push_back(in.F_x_drive);
    const auto& prev = run.states.back();
    sum.distance += std::hypot(x.x - prev.x, x.y - prev.y);
    sum.max_speed = std::max(sum.max_speed, std::hypot(x.v_x, x.v_y));
    sum.max_lateral_accel = std::max(sum.max_lateral_accel, std::abs(x.v_x * x.psi_dot));
    run.states.push_back(x);
  }
  sum.final_state = x;
  return run;
}

store::EgoPose pose_at(const ScenarioConfig& c, const DynamicsRun& run, double t) {
  const double n = static_cast<double>(run.states.size() - 1);
  const double u = std::clamp(t / c.dt, 0.0, n);
  const auto i = static_cast<std::size_t>(std::min(std::floor(u), std::max(n - 1.0, 0.0)));
  const double w = run.states.size() > 1 ? u - static_cast<double>(i) : 0.0;
  const auto& a = run.states[i];
  const auto& b = run.states[std::min(i + 1, run.states.size() - 1)];
  const auto lerp = [w](double p, double q) { return p + w * (q - p); };
  store::EgoPose p;
  p.x = lerp(a.x, b.x);
  p.y = lerp(a.y, b.y);
  p.psi = lerp(a.psi, b.psi);
  p.v_x = lerp(a.v_x, b.v_x);
  p.v_y = lerp(a.v_y, b.v_y);
  p.psi_dot = lerp(a.psi_dot, b.psi_dot);
  return p;
}

std::vector<std::string> rig_devices(const sensors::Rig& rig) {
  std::vector<std::string> out;
  std::set<std::string> seen;
  for (const auto& m : rig.sensors()) {
    if (seen.insert(m.spec.device).second) out.push_back(m.spec.device);
  }
  return out;
}

ptp::SyncResult run_ptp(const ScenarioConfig& c) {
  const auto devices = rig_devices(c.rig);
  const auto topo = ptp::edgar_ptp_topology(devices, c.ptp.defaults, c.seed);
  ptp::SimulationOptions o;
  o.duration = c.duration;
  o.sync_interval = c.ptp.sync_interval;
  o.trace_period = c.ptp.trace_period;
  o.gains = c.ptp.gains;
  o.seed = c.seed + 1;
  return ptp::run_sync_simulation(topo, o);
}

std::map<std::string, std::vector<double>> sensor_timestamps(const sensors::Rig& rig, double duration,
                                                             const ptp::SyncResult* sync) {
  std::map<std::string, std::vector<double>> out;
  for (const auto& m : rig.sensors()) {
    const double rate = m.spec.rate;
    if (!(rate > 0.0)) continue;
    auto& ts = out[m.spec.id];
    for (std::size_t k = 0;; ++k) {
      const double t = static_cast<double>(k) / rate;
      if (t > duration) break;
      ts.push_back(sync ? t + sync->offset_at(m.spec.device, t) : t);
    }
    std::sort(ts.begin(), ts.end());
  }
  return out;
}

NetworkRun run_network(const ScenarioConfig& c) {
  const auto& s = c.network;
  net::NetScenario sc = s.preset == NetPreset::seven_hop ? net::seven_hop_scenario(s.seven_hop, s.shaping)
                                                         : net::edgar_network(c.rig, s.edgar);
  sc.config.shaping = s.shaping;
  net::SimOptions o;
  o.duration = net::to_picos(s.duration);
  o.seed = c.seed + 2;
  NetworkRun run;
  run.result = net::simulate(sc.topology, sc.flows, sc.config, o);
  auto& sum = run.summary;
  sum.preset = s.preset == NetPreset::seven_hop ? "seven_hop" : "rig";
  sum.shaping = std::string(net::to_string(s.shaping));
  sum.duration = s.duration;
  sum.flows = sc.flows.size();
  sum.events = run.result.events;
  sum.cbs = run.result.cbs;
  for (auto& chk : net::check_sr_classes(run.result)) {
    if (chk.cls != net::TrafficClass::BE) sum.checks.push_back(std::move(chk));
  }
  sum.pass = net::all_pass(sum.checks);
  return run;
}

CoverageSection run_coverage(const ScenarioConfig& c, sensors::CoverageMap* map_out) {
  CoverageSection out;
  out.window = c.coverage.window;
  out.cell = c.coverage.cell;
  const auto map = sensors::coverage_map(c.rig, sensors::square_window(c.coverage.window, c.coverage.cell));
  std::size_t free = 0;
  for (std::size_t iy = 0; iy < map.ny(); ++iy) {
    for (std::size_t ix = 0; ix < map.nx(); ++ix) free += map.footprint(ix, iy) ? 0 : 1;
  }
  for (auto m : sensors::kPerceptionModalities) {
    ModalityCoverage mc;
    mc.modality = std::string(sensors::to_string(m));
    mc.sensors = c.rig.count(m);
    if (mc.sensors == 0) {
      out.modalities.push_back(mc);
      continue;
    }
    std::size_t covered = 0;
    for (std::size_t iy = 0; iy < map.ny(); ++iy) {
      for (std::size_t ix = 0; ix < map.nx(); ++ix) {
        if (!map.footprint(ix, iy) && map.count(m, ix, iy) > 0) ++covered;
      }
    }
    mc.covered_fraction = free ? static_cast<double>(covered) / static_cast<double>(free) : 0.0;
    mc.full_coverage_range = sensors::min_full_coverage_range(c.rig, m);
    out.modalities.push_back(mc);
  }
  for (const auto& r : sensors::blind_spot_regions(map, sensors::kPerceptionModalities)) {
    ++out.blind_regions;
    out.blind_area += r.area;
  }
  if (map_out) *map_out = map;
  return out;
}

namespace {

using Clock = std::chrono::steady_clock;

void write_text(const fs::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  f << text;
  if (!f) throw std::runtime_error("write failed for '" + p.string() + "'");
}

std::string trajectory_csv(const ScenarioConfig& c, const DynamicsRun& run) {
  std::string out = "t_s,x_m,y_m,psi_rad,vx_mps,vy_mps,yawrate_radps,delta_rad,fx_n\n";
  const auto stride = static_cast<std::size_t>(std::max<long long>(1, std::llround(c.trajectory_period / c.dt)));
  for (std::size_t k = 0; k < run.states.size(); k += stride) {
    const auto& s = run.states[k];
    const std::size_t u = std::min(k, run.delta.size() - (run.delta.empty() ? 0 : 1));
    const double delta = run.delta.empty() ? 0.0 : run.delta[u];
    const double fx = run.force.empty() ? 0.0 : run.force[u];
    out += fmt::format("{},{},{},{},{},{},{},{},{}\n", fmt_num(static_cast<double>(k) * c.dt), fmt_num(s.x),
                       fmt_num(s.y), fmt_num(s.psi), fmt_num(s.v_x), fmt_num(s.v_y), fmt_num(s.psi_dot),
                       fmt_num(delta), fmt_num(fx));
  }
  return out;
}

double ego_advance(const store::RideStore& st, const std::string& ride_id) {
  std::vector<std::pair<double, const store::EgoPose*>> seq;
  for (const auto& s : st.tables().samples) {
    const store::Ride* r = st.ride_of_scene(s.scene_id);
    if (!r || r->id != ride_id) continue;
    if (const auto* p = st.find_ego_pose(s.id)) seq.emplace_back(s.timestamp, p);
  }
  std::sort(seq.begin(), seq.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  double d = 0.0;
  for (std::size_t i = 1; i < seq.size(); ++i) {
    d += std::hypot(seq[i].second->x - seq[i - 1].second->x, seq[i].second->y - seq[i - 1].second->y);
  }
  return d;
}

}  // namespace

ScenarioReport run_scenario(const ScenarioConfig& c, const fs::path& out_dir) {
  ScenarioReport r;
  r.name = c.name;
  r.seed = c.seed;
  r.mode = std::string(to_string(c.mode.kind));
  r.duration = c.duration;
  r.dt = c.dt;
  r.network_enabled = c.network.enabled;
  r.ptp_enabled = c.ptp.enabled;
  r.store_enabled = c.store.enabled;
  r.coverage_enabled = c.coverage.enabled;
  r.iso_enabled = c.iso4138.enabled;

  fs::create_directories(out_dir);
  write_text(out_dir / "effective_config.yaml", effective_config_text(c));

  std::vector<std::pair<std::string, double>> timing;
  const auto t_all = Clock::now();
  auto timed = [&](const char* name, auto&& fn) {
    const auto t0 = Clock::now();
    fn();
    timing.emplace_back(name, std::chrono::duration<double>(Clock::now() - t0).count());
  };

  try {
    DynamicsRun dyn;
    timed("dynamics", [&] {
      dyn = run_dynamics(c);
      write_text(out_dir / "trajectory.csv", trajectory_csv(c, dyn));
      r.dynamics = dyn.summary;
    });

    if (c.coverage.enabled) {
      timed("coverage", [&] {
        sensors::CoverageMap map;
        r.coverage = run_coverage(c, &map);
        std::ofstream f(out_dir / "coverage.csv", std::ios::binary);
        sensors::write_coverage_csv(f, map);
      });
    }

    if (c.network.enabled) {
      timed("network", [&] {
        auto net = run_network(c);
        std::ofstream f(out_dir / "flow_stats.csv", std::ios::binary);
        net::write_flow_stats_csv(f, net.result);
        for (const auto& chk : net.summary.checks) {
          if (!chk.pass) {
            r.failures.push_back(fmt::format("flow {} ({}): {}", chk.flow_id, net::to_string(chk.cls), chk.reason));
          }
        }
        r.network = std::move(net.summary);
      });
    }

    std::optional<ptp::SyncResult> sync;
    if (c.ptp.enabled) {
      timed("ptp", [&] {
        sync = run_ptp(c);
        std::ofstream f(out_dir / "ptp_trace.csv", std::ios::binary);
        ptp::write_trace_csv(f, *sync);
        r.ptp = PtpSection{sync->traces.size(), sync->summary};
      });
    }

    if (c.store.enabled) {
      timed("store", [&] {
        store::RideStore st;
        store::RideRecording rec;
        rec.ride = {c.store.ride_id, 0.0, c.duration, c.vehicle_ref, c.rig_ref, c.store.map_id,
                    store::RideSource::simulation};
        if (!c.store.map_id.empty()) rec.map = store::MapRecord{c.store.map_id, c.store.map_id, "simulated"};
        rec.timestamps = sensor_timestamps(c.rig, c.duration, sync ? &*sync : nullptr);
        rec.pose_at = [&](double t) { return pose_at(c, dyn, t); };
        rec.scene_duration = c.store.scene_duration;
        StoreSection s;
        s.ride_id = c.store.ride_id;
        s.recording = store::record_ride(st, c.rig, rec);
        store::save_store(st, out_dir / "ride");
        s.violations = store::integrity_check(st, &c.rig).violations;
        s.ego_advance = ego_advance(st, c.store.ride_id);
        if (!s.violations.empty()) {
          r.failures.push_back(fmt::format("store: {} integrity violations", s.violations.size()));
        }
        r.store = std::move(s);
      });
    }

    if (c.iso4138.enabled) {
      timed("iso4138", [&] {
        const auto& v = c.vehicle;
        const auto speeds = dynamics::default_iso4138_speeds();
        const auto rep = c.iso4138.continuous
                             ? dynamics::run_iso4138_continuous(v.params, v.tires, c.iso4138.swa,
                                                                c.iso4138.accel_rate, speeds)
                             : dynamics::run_iso4138_discrete(v.params, v.tires, c.iso4138.swa, speeds);
        write_text(out_dir / "iso4138.csv", dynamics::to_csv(rep));
        IsoSection s;
        s.swa = c.iso4138.swa;
        s.continuous = c.iso4138.continuous;
        s.points = rep.points.size();
        for (const auto& p : rep.points) s.converged += p.converged ? 1 : 0;
        try {
          s.understeer_gradient = dynamics::understeer_gradient(rep, v.params);
        } catch (const std::invalid_argument&) {
        }
        r.iso = s;
      });
    }
    r.exit_code = r.failures.empty() ? kExitOk : kExitCheck;
  } catch (const ConfigError& e) {
    r.error = e.what();
    r.exit_code = kExitConfig;
  } catch (const std::exception& e) {
    r.error = e.what();
    r.exit_code = kExitRuntime;
  }

  write_text(out_dir / "report.txt", render_report(r));
  std::string t = "stage,wall_s\n";
  for (const auto& [name, sec] : timing) t += fmt::format("{},{}\n", name, fmt_num(sec));
  t += fmt::format("total,{}\n", fmt_num(std::chrono::duration<double>(Clock::now() - t_all).count()));
  write_text(out_dir / "timing.txt", t);
  return r;
}

}  // namespace edgar::twin
