#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "edgar/ptp/simulation.hpp"

using namespace edgar::ptp;

namespace {

PtpNode mk(std::string id, ClockRole role, std::string parent = "", double delay = 0.0) {
  PtpNode n;
  n.id = std::move(id);
  n.role = role;
  n.parent = std::move(parent);
  n.link_delay = delay;
  return n;
}

SyncTopology pair_topology(double offset, double drift, double sigma, double delay = 5e-6) {
  PtpNode gm = mk("gm", ClockRole::GM);
  PtpNode oc = mk("oc", ClockRole::OC, "gm", delay);
  oc.initial_offset = offset;
  oc.drift_rate = drift;
  oc.noise_sigma = sigma;
  gm.noise_sigma = sigma;
  return SyncTopology({gm, oc});
}

SimulationOptions run_for(double duration, std::uint64_t seed = 1) {
  SimulationOptions o;
  o.duration = duration;
  o.seed = seed;
  return o;
}

std::vector<std::string> sensor_ids(int n) {
  std::vector<std::string> ids;
  for (int i = 0; i < n; ++i) ids.push_back("sensor_" + std::to_string(i));
  return ids;
}

}  // namespace

TEST_CASE("clock reads") {
  Clock ideal(ClockRole::OC, 0.0, 0.0, 0.0);
  CHECK(ideal.read(12.5) == 12.5);
  Clock shifted(ClockRole::OC, 50e-6, 0.0, 0.0);
  CHECK(shifted.read(3.0) == 3.0 + 50e-6);
  CHECK(kGmSpecDrift == doctest::Approx(7.92e-9).epsilon(1e-3));
  Clock drifting(ClockRole::OC, 0.0, kGmSpecDrift, 0.0);
  CHECK(drifting.offset_at(365.25 * 86400.0) == doctest::Approx(0.25).epsilon(1e-12));

  std::mt19937_64 a(3), b(3);
  Clock noisy(ClockRole::OC, 0.0, 0.0, 1e-7);
  CHECK(noisy.timestamp(1.0, a) == noisy.timestamp(1.0, b));
  CHECK(noisy.read(1.0) == 1.0);

  CHECK_THROWS_AS(Clock(ClockRole::OC, 0.0, 2e-4, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Clock(ClockRole::TC, 1e-6, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Clock(ClockRole::OC, 0.0, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("step and slew re-base the epoch") {
  Clock c(ClockRole::OC, 1e-3, 1e-6, 0.0);
  c.step(10.0, 1e-3);
  CHECK(c.offset_at(10.0) == doctest::Approx(1e-5).epsilon(1e-9));
  c.set_frequency_adjustment(10.0, -1e-6);
  CHECK(c.offset_at(20.0) == doctest::Approx(1e-5).epsilon(1e-9));
}

TEST_CASE("estimator identity over random cases") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> off(-1e-3, 1e-3), delay(0.0, 1e-4), start(0.0, 1000.0), res(0.0, 1e-3);
  std::mt19937_64 unused(0);
  double worst_offset = 0.0, worst_delay = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double o_m = off(rng), o_s = off(rng), d1 = delay(rng), d2 = delay(rng);
    const Clock master(ClockRole::GM, o_m, 0.0, 0.0);
    const Clock slave(ClockRole::OC, o_s, 0.0, 0.0);
    const double r = res(rng);
    const SyncPath path{{d1, d2}, {d1, d2}, {{0.0, r}}};
    const auto ex = sync_exchange(master, slave, path, start(rng), unused);
    worst_offset = std::max(worst_offset, std::abs(ex.estimate.offset - (o_s - o_m)));
    worst_delay = std::max(worst_delay, std::abs(ex.estimate.delay - (d1 + d2)));
  }
  // Exact algebra; the bound is double rounding of timestamps up to 1000 s.
  CHECK(worst_offset < 1e-12);
  CHECK(worst_delay < 1e-12);
}

TEST_CASE("50 us offset, 10 us delay") {
  std::mt19937_64 rng(1);
  const auto ex = sync_exchange(Clock(ClockRole::GM, 0.0, 0.0, 0.0), Clock(ClockRole::OC, 50e-6, 0.0, 0.0),
                                SyncPath::direct(10e-6), 0.0, rng);
  CHECK(ex.estimate.offset == doctest::Approx(50e-6).epsilon(1e-12));
  CHECK(ex.estimate.delay == doctest::Approx(10e-6).epsilon(1e-12));
  REQUIRE(ex.messages.size() == 4);
  CHECK(ex.messages[0].kind == MessageKind::Sync);
  CHECK(ex.messages[1].kind == MessageKind::FollowUp);
  CHECK(ex.messages[1].origin_timestamp == ex.timestamps.t1);
  CHECK(ex.messages[3].receive_timestamp == ex.timestamps.t4);
}

TEST_CASE("asymmetric path biases the offset by half the asymmetry") {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> delay(0.0, 1e-4);
  for (int k = 0; k < 100; ++k) {
    const double d_ms = delay(rng), d_sm = delay(rng), o = 2e-5;
    const SyncPath path{{d_ms}, {d_sm}, {}};
    const auto ex =
        sync_exchange(Clock(ClockRole::GM, 0.0, 0.0, 0.0), Clock(ClockRole::OC, o, 0.0, 0.0), path, 5.0, rng);
    CHECK(ex.estimate.offset - o == doctest::Approx((d_ms - d_sm) / 2).epsilon(1e-6).scale(1e-9));
  }
}

TEST_CASE("transparent correction") {
  const PtpMessageRecord m{MessageKind::Sync, 1.0, 2.0, 3.0, 0.0};
  CHECK(transparent_correction(m, 0.0) == m);
  const auto twice = transparent_correction(transparent_correction(m, 3e-6), 7e-6);
  CHECK(twice.correction_field == doctest::Approx(10e-6).epsilon(1e-12));
  CHECK(twice.origin_timestamp == 1.0);
  CHECK(twice.receive_timestamp == 2.0);
  CHECK(twice.transmit_timestamp == 3.0);
  CHECK_THROWS_AS(transparent_correction(m, -1e-9), std::invalid_argument);

  // Additivity along a chain of three TCs.
  std::mt19937_64 rng(5);
  const SyncPath chain{{1e-6, 1e-6, 1e-6, 1e-6}, {1e-6, 1e-6, 1e-6, 1e-6}, {{3e-6, 3e-6}, {7e-6, 7e-6}, {2e-6, 2e-6}}};
  const auto ex = sync_exchange(Clock(ClockRole::GM, 0, 0, 0), Clock(ClockRole::OC, 0, 0, 0), chain, 0.0, rng);
  CHECK(ex.messages[0].correction_field == doctest::Approx(12e-6).epsilon(1e-12));
  CHECK(ex.messages[2].correction_field == doctest::Approx(12e-6).epsilon(1e-12));
}

TEST_CASE("residence sweep with and without correction") {
  const Clock master(ClockRole::GM, 0.0, 0.0, 0.0);
  const Clock slave(ClockRole::OC, 3e-5, 0.0, 0.0);
  double lo = 1e9, hi = -1e9;
  double prev_spread = 0.0;
  for (int step = 0; step <= 10; ++step) {
    const double r_max = 1e-4 * step;  // 0 .. 1 ms
    const SyncPath path{{2e-6, 2e-6}, {2e-6, 2e-6}, {{0.0, r_max}}};
    std::mt19937_64 rng(11);
    double spread = 0.0;
    for (int k = 0; k < 50; ++k) {
      const auto with = sync_exchange(master, slave, path, 100.0 + k, rng);
      lo = std::min(lo, with.estimate.offset);
      hi = std::max(hi, with.estimate.offset);
      const auto without = sync_exchange(master, slave, path, 100.0 + k, rng, {1e-3, false});
      spread = std::max(spread, std::abs(without.estimate.offset - 3e-5));
      CHECK(std::abs(without.estimate.offset - 3e-5) <= 0.5 * r_max + 1e-12);
    }
    if (step >= 2) CHECK(spread > prev_spread * 0.8);
    if (step == 10) CHECK(spread > 1e-4);
    prev_spread = spread;
  }
  CHECK(hi - lo < 1e-9);
}

TEST_CASE("servo role checks and zero input") {
  PiServo servo;
  Clock gm(ClockRole::GM, 0, 0, 0);
  Clock tc(ClockRole::TC, 0, 0, 0);
  CHECK_THROWS_AS(servo.update(gm, 0.0, 1e-6), std::invalid_argument);
  CHECK_THROWS_AS(servo.update(tc, 0.0, 1e-6), std::invalid_argument);
  Clock oc(ClockRole::OC, 4e-6, 0, 0);
  servo.update(oc, 0.0, 4e-6);
  CHECK(oc.offset_at(0.0) == doctest::Approx(0.0).scale(1e-18));
  oc.step(0.5, -2e-6);  // now 2 us ahead
  for (int k = 1; k <= 5; ++k) servo.update(oc, k, 0.0);
  CHECK(oc.offset_at(6.0) == doctest::Approx(2e-6).epsilon(1e-12));
  CHECK(servo.integral() == 0.0);
}

TEST_CASE("servo converges and re-converges after a step") {
  const Clock master(ClockRole::GM, 0.0, 0.0, 0.0);
  Clock slave(ClockRole::OC, 2e-5, 0.0, 0.0);
  PiServo servo({0.7, 0.3}, 1.0);
  std::mt19937_64 rng(1);
  const auto path = SyncPath::direct(3e-6);
  auto run = [&](int first, int last, double& worst) {
    for (int k = first; k < last; ++k) {
      const auto ex = sync_exchange(master, slave, path, k, rng);
      servo.update(slave, ex.completed_at, ex.estimate.offset);
      worst = std::max(worst, std::abs(slave.offset_at(k + 1.0)));
    }
  };
  double worst = 0.0;
  run(0, 3, worst);
  CHECK(std::abs(slave.offset_at(3.0)) < 1e-9);
  // Offset jump of 10 us after lock: the PI loop (no second step) must pull it back.
  const double jump = 1e-5;
  slave.step(3.0, -jump);
  worst = 0.0;
  int settled_at = -1;
  for (int k = 3; k < 40; ++k) {
    double w = 0.0;
    run(k, k + 1, w);
    worst = std::max(worst, w);
    if (settled_at < 0 && std::abs(slave.offset_at(k + 1.0)) < 1e-9) settled_at = k + 1 - 3;
  }
  CHECK(settled_at > 0);
  CHECK(settled_at <= 20);
  CHECK(worst <= 2 * jump);
  MESSAGE("re-converged below 1 ns after ", settled_at, " intervals; peak ", worst);
}

TEST_CASE("topology validation") {
  PtpNode gm = mk("gm", ClockRole::GM);
  PtpNode bc = mk("bc", ClockRole::BC, "gm", 1e-6);
  PtpNode tc = mk("tc", ClockRole::TC, "bc", 1e-6);
  tc.residence = {1e-6, 5e-6};
  PtpNode oc = mk("oc", ClockRole::OC, "tc", 1e-6);
  const SyncTopology ok({gm, bc, tc, oc});
  CHECK(ok.master_of("oc").id == "bc");
  CHECK(ok.level("oc") == 2);
  CHECK(ok.level("bc") == 1);
  const auto path = ok.path_to_master("oc");
  CHECK(path.delay_ms.size() == 2);
  CHECK(path.transparent_clocks.size() == 1);
  CHECK(ok.synchronized_nodes() == std::vector<std::string>{"bc", "oc"});

  CHECK_THROWS_AS(SyncTopology({bc, tc, oc}), std::invalid_argument);
  PtpNode gm2 = mk("gm2", ClockRole::GM);
  CHECK_THROWS_AS(SyncTopology({gm, gm2, bc, tc, oc}), std::invalid_argument);
  PtpNode orphan = mk("x", ClockRole::OC, "nowhere");
  CHECK_THROWS_AS(SyncTopology({gm, orphan}), std::invalid_argument);
  PtpNode under_oc = mk("y", ClockRole::OC, "oc");
  CHECK_THROWS_AS(SyncTopology({gm, bc, tc, oc, under_oc}), std::invalid_argument);
  PtpNode leaf_tc = mk("t2", ClockRole::TC, "bc");
  CHECK_THROWS_AS(SyncTopology({gm, bc, tc, oc, leaf_tc}), std::invalid_argument);
  PtpNode a = mk("a", ClockRole::BC, "b"), b = mk("b", ClockRole::BC, "a");
  CHECK_THROWS_AS(SyncTopology({gm, a, b}), std::invalid_argument);
}

TEST_CASE("EDGAR topology shape") {
  const auto ids = sensor_ids(20);
  const auto topo = edgar_ptp_topology(ids, {}, 7);
  CHECK(topo.grandmaster().id == "ptp_gm");
  CHECK(topo.node("hpc_x86").role == ClockRole::BC);
  CHECK(topo.node("switch").role == ClockRole::TC);
  CHECK(topo.master_of("sensor_3").id == "hpc_x86");
  CHECK(topo.master_of("hpc_arm").id == "hpc_x86");
  CHECK(topo.path_to_master("sensor_3").delay_ms.size() == 2);
  CHECK(topo.synchronized_nodes().size() == 22);
  for (const auto& n : topo.nodes()) {
    if (n.role == ClockRole::TC) continue;
    CHECK(std::abs(n.drift_rate) == doctest::Approx(kGmSpecDrift));
  }
}

TEST_CASE("noise-free clocks lock exactly after the first exchange") {
  PtpDefaults d;
  d.noise_sigma = 0.0;
  d.drift_bound = 0.0;
  const auto topo = edgar_ptp_topology(sensor_ids(6), d, 3);
  SimulationOptions opts;
  opts.duration = 30.0;
  opts.trace_period = 0.25;
  const auto res = run_sync_simulation(topo, opts);
  for (const auto& tr : res.traces) {
    CHECK(tr.first_lock >= 0.0);
    for (std::size_t k = 0; k < res.times.size(); ++k) {
      if (res.times[k] > tr.first_lock) REQUIRE(std::abs(tr.offset[k]) < 1e-12);
    }
  }
  // Before the first exchange the initial offsets are visible.
  CHECK(std::abs(res.trace("hpc_x86").offset.front()) > 0.0);
}

TEST_CASE("constant offset converges within 20 intervals") {
  const auto res = run_sync_simulation(pair_topology(5e-5, 0.0, 0.0), run_for(20.0));
  CHECK(std::abs(res.trace("oc").offset.back()) < 1e-9);
}

TEST_CASE("GM-spec drift with 100 ns noise stays below 1 us RMS") {
  const auto topo = edgar_ptp_topology(sensor_ids(20), {}, 42);
  SimulationOptions opts;
  opts.duration = 600.0;
  opts.seed = 42;
  const auto res = run_sync_simulation(topo, opts);
  MESSAGE("steady RMS ", res.summary.rms_steady, " s, max ", res.summary.max_abs_steady, " s");
  CHECK(res.summary.rms_steady < 1e-6);
  CHECK(res.summary.exchanges == 600 * 22);

  SUBCASE("doubling the residence spread leaves RMS unchanged") {
    const auto wide = run_sync_simulation(topo.with_residence_spread(2.0), opts);
    CHECK(wide.summary.rms_steady == doctest::Approx(res.summary.rms_steady).epsilon(0.05));
  }
  SUBCASE("seeded determinism") {
    const auto again = run_sync_simulation(topo, opts);
    CHECK(again.times == res.times);
    for (std::size_t i = 0; i < res.traces.size(); ++i) CHECK(again.traces[i].offset == res.traces[i].offset);
    auto other = opts;
    other.seed = 43;
    CHECK(run_sync_simulation(topo, other).traces[5].offset != res.traces[5].offset);
  }
}

TEST_CASE("servo stability bound") {
  for (double drift : {1e-8, 5e-8, 1e-7}) {
    for (double sigma : {1e-7, 3e-7, 1e-6}) {
      PtpDefaults d;
      d.drift_bound = drift;
      d.noise_sigma = sigma;
      const auto topo = edgar_ptp_topology(sensor_ids(4), d, 9);
      const auto res = run_sync_simulation(topo, run_for(300.0, 9));
      CAPTURE(drift);
      CAPTURE(sigma);
      for (const auto& n : res.summary.nodes) CHECK(n.max_abs_after_lock <= 10.0 * n.rms_steady);
    }
  }
}

TEST_CASE("trace CSV") {
  const auto res = run_sync_simulation(pair_topology(1e-6, 0.0, 0.0), run_for(3.0));
  std::stringstream ss;
  write_trace_csv(ss, res);
  std::string header;
  std::getline(ss, header);
  CHECK(header == "time_s,node_id,offset_s");
  int rows = 0;
  for (std::string line; std::getline(ss, line);) ++rows;
  CHECK(rows == 4);
  CHECK(res.offset_at("oc", 0.0) == doctest::Approx(1e-6));
}
