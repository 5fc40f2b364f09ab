#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "edgar/common/config.hpp"
#include "edgar/common/format.hpp"
#include "edgar/dynamics/iso4138.hpp"
#include "edgar/dynamics/params.hpp"
#include "edgar/dynamics/single_track.hpp"
#include "edgar/dynamics/tire.hpp"
#include "edgar/dynamics/vehicle_config.hpp"

using namespace edgar::dynamics;

namespace {

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b)); }

VehicleState simulate(const SingleTrackModel& model, VehicleState s, const DriveInput& in, double duration,
                      double dt) {
  const auto n = static_cast<int>(std::llround(duration / dt));
  for (int i = 0; i < n; ++i) s = model.step(s, in, dt, i * dt);
  return s;
}

// Independent steady-state equilibrium of the single-track model: Newton on
// (v_y, psi_dot, F_x) with a finite-difference Jacobian. All force laws are
// re-derived here rather than calling into the library.
struct Equilibrium {
  double v_y;
  double psi_dot;
  double F_x;
};

std::array<double, 3> equilibrium_residual(const VehicleParams& p, const AxleTires& t, double v, double delta,
                                           const std::array<double, 3>& u) {
  const double l = p.l_f + p.l_r;
  const double fzf = p.m * p.g * p.l_r / l;
  const double fzr = p.m * p.g * p.l_f / l;
  const auto mf = [](double a, double B, double C, double D, double E) {
    const double x = B * a;
    return D * std::sin(C * std::atan(x - E * (x - std::atan(x))));
  };
  const double vy = u[0];
  const double r = u[1];
  const double fx = u[2];
  const double af = delta - std::atan((vy + p.l_f * r) / v);
  const double ar = -std::atan((vy - p.l_r * r) / v);
  const double muf = t.front.D_scale * fzf;
  const double mur = t.rear.D_scale * fzr;
  const double fxf = fx * fzf / (fzf + fzr);
  const double fxr = fx * fzr / (fzf + fzr);
  const double sf = std::sqrt(std::max(0.0, 1.0 - (fxf / muf) * (fxf / muf)));
  const double sr = std::sqrt(std::max(0.0, 1.0 - (fxr / mur) * (fxr / mur)));
  const double fyf = mf(af, t.front.B, t.front.C, muf, t.front.E) * sf;
  const double fyr = mf(ar, t.rear.B, t.rear.C, mur, t.rear.E) * sr;
  const double drag = 0.5 * p.rho * p.c_d * p.A * v * v;
  const double roll = p.f_r * p.m * p.g;
  return {fyf * std::cos(delta) + fyr - p.m * v * r, p.l_f * fyf * std::cos(delta) - p.l_r * fyr,
          fx - drag - roll - fyf * std::sin(delta) + p.m * vy * r};
}

Equilibrium solve_equilibrium(const VehicleParams& p, const AxleTires& t, double v, double delta) {
  const double l = p.l_f + p.l_r;
  std::array<double, 3> u{p.l_r * v * delta / l, v * delta / l, 0.0};
  for (int it = 0; it < 100; ++it) {
    const auto f = equilibrium_residual(p, t, v, delta, u);
    std::array<std::array<double, 3>, 3> jac{};
    const std::array<double, 3> h{1e-7, 1e-8, 1e-3};
    for (int j = 0; j < 3; ++j) {
      auto up = u;
      up[j] += h[j];
      const auto fp = equilibrium_residual(p, t, v, delta, up);
      for (int i = 0; i < 3; ++i) jac[i][j] = (fp[i] - f[i]) / h[j];
    }
    // Cramer's rule on the 3x3 system J dx = -f.
    const auto det3 = [](const std::array<std::array<double, 3>, 3>& a) {
      return a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0]) +
             a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0]);
    };
    const double det = det3(jac);
    std::array<double, 3> dx{};
    for (int k = 0; k < 3; ++k) {
      auto a = jac;
      for (int i = 0; i < 3; ++i) a[i][k] = -f[i];
      dx[k] = det3(a) / det;
    }
    for (int k = 0; k < 3; ++k) u[k] += dx[k];
    if (std::abs(dx[0]) < 1e-13 && std::abs(dx[1]) < 1e-13 && std::abs(dx[2]) < 1e-8) break;
  }
  return {u[0], u[1], u[2]};
}

}  // namespace

TEST_CASE("static axle loads follow the moment balance") {
  const VehicleParams p;
  const auto loads = static_axle_loads(p);
  // 30-digit evaluation of m g l_r / (l_f + l_r) and m g l_f / (l_f + l_r).
  CHECK(rel_close(loads.F_z_f, 10376.0809155166610568832043083, 1e-12));
  CHECK(rel_close(loads.F_z_r, 14345.1190844833389431167956917, 1e-12));
  CHECK(rel_close(loads.F_z_f + loads.F_z_r, p.m * p.g, 1e-9));

  VehicleParams sym;
  sym.l_f = sym.l_r = 1.5;
  const auto s = static_axle_loads(sym);
  CHECK(s.F_z_f == doctest::Approx(sym.m * sym.g / 2.0).epsilon(1e-15));
  CHECK(s.F_z_r == doctest::Approx(sym.m * sym.g / 2.0).epsilon(1e-15));
}

TEST_CASE("parameter validation rejects degenerate vehicles") {
  VehicleParams p;
  p.m = 0.0;
  CHECK_THROWS_AS(p.validate(), std::invalid_argument);
  CHECK_THROWS_AS(SingleTrackModel(p, AxleTires{}), std::invalid_argument);
  VehicleParams q;
  q.c_d = 0.0;
  q.f_r = 0.0;
  CHECK_NOTHROW(q.validate());
  q.c_d = -0.1;
  CHECK_THROWS(q.validate());
  TireParams t;
  t.B = 0.0;
  CHECK_THROWS(t.validate());
}

TEST_CASE("pacejka lateral force reference values") {
  const AxleTires tires;
  CHECK(pacejka_lateral_force(0.0, tires.front, 10376.0) == 0.0);
  // mpmath, 30 digits.
  CHECK(rel_close(pacejka_lateral_force(0.1, tires.front, 10376.0), 10280.0171763035738266227085665, 1e-12));
  CHECK(rel_close(pacejka_lateral_force(0.05, tires.rear, 1.0) / tires.rear.D_scale, 0.978457130767299885402175231335,
                  1e-12));
}

TEST_CASE("pacejka curve is odd, bounded and has slope BCD at the origin") {
  const AxleTires tires;
  const auto loads = static_axle_loads(VehicleParams{});
  for (const auto& [tire, fz] : {std::pair{tires.front, loads.F_z_f}, std::pair{tires.rear, loads.F_z_r}}) {
    const double D = tire.D_scale * fz;
    for (int i = 0; i <= 20000; ++i) {
      const double a = -1.0 + 2.0 * i / 20000.0;
      const double f = pacejka_lateral_force(a, tire, fz);
      CHECK(f == -pacejka_lateral_force(-a, tire, fz));
      CHECK(std::abs(f) <= D * (1.0 + 1e-6));
    }
    const double h = 1e-6;
    const double slope = (pacejka_lateral_force(h, tire, fz) - pacejka_lateral_force(-h, tire, fz)) / (2.0 * h);
    CHECK(rel_close(slope, tire.B * tire.C * D, 1e-4));
  }
}

TEST_CASE("combined slip friction ellipse") {
  CHECK(combined_slip_scale(0.0, 1000.0) == 1.0);
  CHECK(combined_slip_scale(1000.0, 1000.0) == 0.0);
  CHECK(combined_slip_scale(600.0, 1000.0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(combined_slip_scale(-600.0, 1000.0) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(combined_slip_scale(5000.0, 1000.0) == 0.0);
  CHECK_THROWS(combined_slip_scale(1.0, 0.0));
}

TEST_CASE("slip angles") {
  const VehicleParams p;
  VehicleState s;
  s.v_x = 20.0;
  auto slip = slip_angles(s, 0.03, p);
  REQUIRE(slip);
  CHECK(slip->front == 0.03);
  CHECK(slip->rear == 0.0);

  s.v_y = 0.5;
  s.psi_dot = 0.2;
  slip = slip_angles(s, 0.05, p);
  REQUIRE(slip);
  CHECK(rel_close(slip->front, 0.00778509492439757561661526152193, 1e-12));
  CHECK(rel_close(slip->rear, -0.012529344321338509149151556143, 1e-12));

  VehicleState mirrored = s;
  mirrored.v_y = -s.v_y;
  mirrored.psi_dot = -s.psi_dot;
  const auto flipped = slip_angles(mirrored, -0.05, p);
  CHECK(flipped->front == -slip->front);
  CHECK(flipped->rear == -slip->rear);

  s.v_x = 0.3;
  CHECK_FALSE(slip_angles(s, 0.05, p).has_value());
}

TEST_CASE("resistance forces") {
  const VehicleParams p;
  VehicleState s;
  s.v_x = 36.11;
  const auto f = resistance_forces(s, p);
  CHECK(rel_close(f.drag, 810.63828741875, 1e-12));
  CHECK(f.roll == doctest::Approx(p.f_r * p.m * p.g));
  s.v_x = 72.22;
  CHECK(rel_close(resistance_forces(s, p).drag, 4.0 * f.drag, 1e-14));
  s.v_x = 0.0;
  CHECK(resistance_forces(s, p).drag == 0.0);
  CHECK(resistance_forces(s, p).roll == 0.0);
}

TEST_CASE("derivative at equilibrium and at rest") {
  const SingleTrackModel model(VehicleParams{}, AxleTires{});
  VehicleState s;
  s.v_x = 15.0;
  const auto res = resistance_forces(s, model.params());
  const auto d = model.derivative(s, DriveInput{0.0, res.drag + res.roll});
  CHECK(std::abs(d.v_x) < 1e-12);
  CHECK(d.v_y == 0.0);
  CHECK(d.psi_dot == 0.0);
  CHECK(d.x == 15.0);

  const auto z = model.derivative(VehicleState{}, DriveInput{});
  CHECK(z == StateRate{});
}

TEST_CASE("derivative matches central differences of the integrated trajectory") {
  const SingleTrackModel model(VehicleParams{}, AxleTires{});
  VehicleState s0;
  s0.v_x = 18.0;
  s0.v_y = 0.3;
  s0.psi_dot = 0.15;
  s0.psi = 0.4;
  const DriveInput in{0.04, 1500.0};
  for (double h : {2e-3, 1e-3}) {
    // s(0) -> s(h) -> s(2h) with fine substeps; the midpoint slope is O(h^2).
    const VehicleState mid = simulate(model, s0, in, h, h / 50.0);
    const VehicleState end = simulate(model, mid, in, h, h / 50.0);
    const auto d = model.derivative(mid, in);
    const double fd_vy = (end.v_y - s0.v_y) / (2.0 * h);
    const double fd_r = (end.psi_dot - s0.psi_dot) / (2.0 * h);
    const double fd_vx = (end.v_x - s0.v_x) / (2.0 * h);
    const double fd_x = (end.x - s0.x) / (2.0 * h);
    CHECK(std::abs(fd_vy - d.v_y) < 400.0 * h * h);
    CHECK(std::abs(fd_r - d.psi_dot) < 100.0 * h * h);
    CHECK(std::abs(fd_vx - d.v_x) < 3.0 * h * h);
    CHECK(std::abs(fd_x - d.x) < 10.0 * h * h);
  }
}

TEST_CASE("step keeps straight equilibrium and enforces dt bounds") {
  const SingleTrackModel model(VehicleParams{}, AxleTires{});
  VehicleState s;
  s.v_x = 20.0;
  const auto res = resistance_forces(s, model.params());
  const auto next = model.step(s, DriveInput{0.0, res.drag + res.roll}, 1e-3);
  CHECK(next.x == doctest::Approx(20.0 * 1e-3).epsilon(1e-12));
  CHECK(next.y == 0.0);
  CHECK(next.psi == 0.0);
  CHECK(next.v_x == doctest::Approx(20.0).epsilon(1e-14));
  CHECK(next.v_y == 0.0);
  CHECK(next.psi_dot == 0.0);

  CHECK_THROWS_AS(model.step(s, DriveInput{}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(model.step(s, DriveInput{}, 0.02), std::invalid_argument);
}

TEST_CASE("divergence is reported with the offending time") {
  const SingleTrackModel model(VehicleParams{}, AxleTires{});
  VehicleState s;
  s.v_x = 10.0;
  s.v_y = std::numeric_limits<double>::infinity();
  try {
    model.step(s, DriveInput{}, 1e-3, 2.5);
    FAIL("expected divergence");
  } catch (const edgar::DivergenceError& e) {
    CHECK(std::string(e.what()).find("2.501") != std::string::npos);
  }
}

TEST_CASE("halving dt cuts the global error about 16x") {
  const SingleTrackModel model(VehicleParams{}, AxleTires{});
  const auto run = [&](double dt) {
    VehicleState s;
    s.v_x = 15.0;
    s.v_y = 0.2;
    s.psi_dot = 0.1;
    const auto n = static_cast<int>(std::llround(1.0 / dt));
    for (int i = 0; i < n; ++i) s = model.step(s, DriveInput{0.05, 500.0}, dt, i * dt);
    return s;
  };
  const auto reference = run(4e-4);
  const double e1 = std::abs(run(8e-3).psi_dot - reference.psi_dot);
  const double e2 = std::abs(run(4e-3).psi_dot - reference.psi_dot);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("low-speed yaw rate approaches the kinematic bicycle") {
  const SingleTrackModel model(VehicleParams{}, AxleTires{});
  const double l = model.params().wheelbase();
  for (double delta : {0.01, 0.03, 0.05, -0.05}) {
    VehicleState s;
    s.v_x = 2.0;
    const auto res = resistance_forces(s, model.params());
    s = simulate(model, s, DriveInput{delta, res.drag + res.roll}, 10.0, 1e-3);
    const double kin = s.v_x * delta / l;
    CHECK(std::abs(s.psi_dot - kin) <= 0.02 * std::abs(kin));
  }
}

TEST_CASE("integration is deterministic") {
  const SingleTrackModel model(VehicleParams{}, AxleTires{});
  VehicleState s;
  s.v_x = 12.0;
  const auto a = simulate(model, s, DriveInput{0.03, 800.0}, 3.0, 1e-3);
  const auto b = simulate(model, s, DriveInput{0.03, 800.0}, 3.0, 1e-3);
  CHECK(a == b);
}

TEST_CASE("ISO 4138 low-speed point matches the kinematic oracle") {
  const VehicleParams p;
  const auto report = run_iso4138_discrete(p, AxleTires{}, 0.05 * p.steering_ratio, {1.389});
  REQUIRE(report.points.size() == 1);
  const auto& pt = report.points.front();
  CHECK(pt.converged);
  CHECK(std::abs(pt.yaw_rate - 0.0233759676876472568) <= 0.02 * 0.0233759676876472568);
}

TEST_CASE("ISO 4138 zero steering gives zero yaw and no radius") {
  const auto report = run_iso4138_discrete(VehicleParams{}, AxleTires{}, 0.0, {5.0, 20.0});
  REQUIRE(report.points.size() == 2);
  for (const auto& pt : report.points) {
    CHECK(pt.converged);
    CHECK(pt.yaw_rate == 0.0);
    CHECK_FALSE(std::isfinite(pt.radius));
  }
}

TEST_CASE("ISO 4138 rejects speeds outside the test envelope") {
  CHECK_THROWS(run_iso4138_discrete(VehicleParams{}, AxleTires{}, 0.5, {0.5}));
  CHECK_THROWS(run_iso4138_discrete(VehicleParams{}, AxleTires{}, 0.5, {40.0}));
  CHECK_THROWS(run_iso4138_discrete(VehicleParams{}, AxleTires{}, 20.0, {10.0}));
}

TEST_CASE("ISO 4138 converged points are self-consistent and sorted") {
  const VehicleParams p;
  const auto report =
      run_iso4138_discrete(p, AxleTires{}, edgar::deg2rad(90.0), {25.0, 5.0, 15.0, 10.0});
  REQUIRE(report.points.size() == 4);
  for (std::size_t i = 0; i < report.points.size(); ++i) {
    const auto& pt = report.points[i];
    REQUIRE(pt.converged);
    CHECK(pt.radius > 0.0);
    CHECK(std::abs(pt.a_y - pt.speed * pt.yaw_rate) <= 1e-3);
    CHECK(std::abs(pt.radius * pt.yaw_rate - pt.speed) <= 1e-3);
    if (i > 0) CHECK(pt.speed > report.points[i - 1].speed);
  }
}

TEST_CASE("parallel and serial discrete sweeps are bit-identical") {
  const VehicleParams p;
  const std::vector<double> speeds{5.0, 10.0, 20.0, 30.0};
  const auto a = run_iso4138_discrete(p, AxleTires{}, 0.8, speeds);
  const auto b = run_iso4138_discrete_serial(p, AxleTires{}, 0.8, speeds);
  CHECK(a.points == b.points);
  CHECK(to_csv(a) == to_csv(b));
}

TEST_CASE("converged ISO 4138 points agree with the analytic equilibrium") {
  const VehicleParams p;
  const AxleTires t;
  const double swa = edgar::deg2rad(45.0);
  const auto report = run_iso4138_discrete(p, t, swa, {5.0, 10.0, 15.0, 20.0, 30.0});
  SteadyStateReport oracle;
  for (const auto& pt : report.points) {
    REQUIRE(pt.converged);
    const auto eq = solve_equilibrium(p, t, pt.speed, swa / p.steering_ratio);
    CHECK(std::abs(pt.yaw_rate - eq.psi_dot) <= 1e-3 * std::abs(eq.psi_dot));
    SteadyStatePoint o;
    o.speed = pt.speed;
    o.swa = swa;
    o.yaw_rate = eq.psi_dot;
    o.a_y = pt.speed * eq.psi_dot;
    o.radius = pt.speed / eq.psi_dot;
    o.sideslip = std::atan2(eq.v_y, pt.speed);
    o.converged = true;
    oracle.points.push_back(o);
  }
  const double k_sim = understeer_gradient(report, p);
  const double k_eq = understeer_gradient(oracle, p);
  CHECK(k_sim > 0.0);  // front-saturating tire set: understeer
  CHECK(std::abs(k_sim - k_eq) <= 0.02 * std::abs(k_eq));
}

TEST_CASE("understeer gradient recovers synthetic constructions") {
  const VehicleParams p;
  const double l = p.wheelbase();
  const double delta = 0.05;
  SteadyStateReport neutral;
  SteadyStateReport linear;
  for (double a_y : {0.5, 1.0, 2.0, 3.0, 3.9, 6.0}) {
    const double r_neutral = l / delta;
    neutral.points.push_back({std::sqrt(a_y * r_neutral), delta * p.steering_ratio, a_y / std::sqrt(a_y * r_neutral),
                              a_y, r_neutral, 0.0, true});
    const double r_lin = l / (delta - 0.002 * a_y);
    linear.points.push_back(
        {std::sqrt(a_y * r_lin), delta * p.steering_ratio, a_y / std::sqrt(a_y * r_lin), a_y, r_lin, 0.0, true});
  }
  CHECK(std::abs(understeer_gradient(neutral, p)) < 1e-12);
  CHECK(std::abs(understeer_gradient(linear, p) - 0.002) < 1e-9);

  SteadyStateReport thin;
  thin.points.assign(linear.points.begin(), linear.points.begin() + 2);
  CHECK_THROWS_AS(understeer_gradient(thin, p), std::invalid_argument);
}

TEST_CASE("continuous ramp reproduces discrete points") {
  const VehicleParams p;
  const AxleTires t;
  const double swa = edgar::deg2rad(45.0);
  const std::vector<double> speeds{5.0 / 3.6, 30.0 / 3.6, 60.0 / 3.6};
  const auto discrete = run_iso4138_discrete(p, t, swa, speeds);
  const auto continuous = run_iso4138_continuous(p, t, swa, 0.1, speeds);
  REQUIRE(continuous.points.size() == speeds.size());
  for (std::size_t i = 0; i < speeds.size(); ++i) {
    CHECK(continuous.points[i].converged);
    CHECK(std::abs(continuous.points[i].yaw_rate - discrete.points[i].yaw_rate) <=
          0.03 * std::abs(discrete.points[i].yaw_rate));
    if (i > 0) CHECK(continuous.points[i].speed > continuous.points[i - 1].speed);
  }
  const auto straight = run_iso4138_continuous(p, t, 0.0, 0.1, speeds);
  for (const auto& pt : straight.points) CHECK(pt.yaw_rate == 0.0);
}

TEST_CASE("report CSV layout") {
  SteadyStateReport r;
  r.points.push_back({10.0, 0.5, 0.1, 1.0, 100.0, -0.01, true});
  const auto csv = to_csv(r);
  CHECK(csv == "speed_mps,swa_rad,yawrate_radps,ay_mps2,radius_m,sideslip_rad,converged\n10,0.5,0.1,1,100,-0.01,1\n");
}

TEST_CASE("vehicle config parsing") {
  const auto doc = edgar::config::load_string(
      "vehicle:\n  m: 2600\n  max_road_wheel_angle_deg: 30\ntires:\n  rear:\n    B: 11\n");
  const auto cfg = parse_vehicle_config(doc);
  CHECK(cfg.params.m == 2600.0);
  CHECK(cfg.params.l_f == 1.724);
  CHECK(cfg.params.max_road_wheel_angle == doctest::Approx(0.5235987755982988));
  CHECK(cfg.tires.rear.B == 11.0);
  CHECK(cfg.tires.rear.C == 1.8);

  try {
    parse_vehicle_config(edgar::config::load_string("vehicle:\n  m: 2600\n  mass: 3\n"));
    FAIL("expected error");
  } catch (const edgar::ConfigError& e) {
    const std::string msg = e.what();
    CHECK(msg.find("'mass'") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_vehicle_config(edgar::config::load_string("vehicle:\n  m: 0\n")), edgar::ConfigError);
  CHECK_THROWS_AS(parse_vehicle_config(edgar::config::load_string(
                      "vehicle:\n  max_road_wheel_angle_deg: 30\n  max_road_wheel_angle_rad: 0.5\n")),
                  edgar::ConfigError);

  const auto round = parse_vehicle_config(to_yaml(cfg));
  CHECK(round.params.m == cfg.params.m);
  CHECK(round.params.max_road_wheel_angle == cfg.params.max_road_wheel_angle);
  CHECK(round.tires.rear.B == cfg.tires.rear.B);
}
