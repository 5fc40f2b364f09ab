#include "edgar/dynamics/iso4138.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "edgar/common/config.hpp"
#include "edgar/common/format.hpp"
#include "edgar/dynamics/single_track.hpp"
#include "edgar/dynamics/tire.hpp"

namespace edgar::dynamics {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kMinSpeed = 5.0 / 3.6;
constexpr double kMaxSpeed = 130.0 / 3.6;
constexpr double kSpeedSlack = 1e-3;

/// PI speed hold with a feedforward of every longitudinal resistance the
/// model knows about. The lateral term uses pure-slip forces; the integrator
/// absorbs the small combined-slip difference.
class SpeedHold {
 public:
  SpeedHold(const SingleTrackModel& model, const Iso4138Options& opt) : model_(model), opt_(opt) {}

  double force(const VehicleState& s, double delta, double v_target, double a_target, double dt) {
    const auto& p = model_.params();
    const auto res = resistance_forces(s, p);
    const auto lateral = model_.axle_forces(s, DriveInput{delta, 0.0});
    const double feedforward =
        res.drag + res.roll + lateral.F_y_f * std::sin(delta) - p.m * s.v_y * s.psi_dot + p.m * a_target;
    const double error = v_target - s.v_x;
    integral_ += error * dt;
    return feedforward + p.m * (opt_.speed_kp * error + opt_.speed_ki * integral_);
  }

 private:
  const SingleTrackModel& model_;
  const Iso4138Options& opt_;
  double integral_ = 0.0;
};

/// Population standard deviation over a fixed-length window.
class MovingStd {
 public:
  explicit MovingStd(std::size_t length) : length_(length) {}

  void push(double v) {
    window_.push_back(v);
    if (window_.size() > length_) window_.pop_front();
  }
  bool full() const { return window_.size() == length_; }
  double stddev() const {
    const double n = static_cast<double>(window_.size());
    const double mean = std::accumulate(window_.begin(), window_.end(), 0.0) / n;
    double acc = 0.0;
    for (double v : window_) acc += (v - mean) * (v - mean);
    return std::sqrt(acc / n);
  }

 private:
  std::size_t length_;
  std::deque<double> window_;
};

SteadyStatePoint make_point(const VehicleState& s, double swa, bool converged) {
  SteadyStatePoint p;
  p.speed = s.v_x;
  p.swa = swa;
  p.yaw_rate = s.psi_dot;
  p.a_y = s.v_x * s.psi_dot;
  p.radius = s.psi_dot != 0.0 ? s.v_x / s.psi_dot : kNaN;
  p.sideslip = std::atan2(s.v_y, s.v_x);
  p.converged = converged;
  return p;
}

SteadyStatePoint failed_point(double speed, double swa) {
  return SteadyStatePoint{speed, swa, kNaN, kNaN, kNaN, kNaN, false};
}

double road_wheel_angle(const VehicleParams& params, double swa) {
  const double delta = swa / params.steering_ratio;
  if (std::abs(delta) > params.max_road_wheel_angle) {
    throw std::invalid_argument("steering-wheel angle exceeds the maximum road-wheel angle");
  }
  return delta;
}

std::vector<double> normalized_speeds(std::vector<double> speeds) {
  for (double v : speeds) {
    if (!(v >= kMinSpeed - kSpeedSlack && v <= kMaxSpeed + kSpeedSlack)) {
      throw std::invalid_argument("ISO 4138 speeds must lie within 5..130 km/h");
    }
  }
  std::sort(speeds.begin(), speeds.end());
  speeds.erase(std::unique(speeds.begin(), speeds.end()), speeds.end());
  return speeds;
}

std::size_t steps_for(double duration, double dt) { return static_cast<std::size_t>(std::llround(duration / dt)); }

struct SettleResult {
  VehicleState state;
  bool converged = false;
  double t = 0.0;
};

/// Holds `speed` at constant road-wheel angle until the yaw rate settles.
SettleResult settle(const SingleTrackModel& model, double delta, double speed, const Iso4138Options& opt,
                    SpeedHold& hold) {
  SettleResult r;
  r.state.v_x = speed;
  const std::size_t sample_every = std::max<std::size_t>(1, steps_for(opt.sample_period, opt.dt));
  MovingStd window(steps_for(opt.settle_window, opt.sample_period) + 1);
  const std::size_t n = steps_for(opt.time_budget, opt.dt);
  for (std::size_t i = 1; i <= n; ++i) {
    const DriveInput in{delta, hold.force(r.state, delta, speed, 0.0, opt.dt)};
    r.state = model.step(r.state, in, opt.dt, r.t);
    r.t = static_cast<double>(i) * opt.dt;
    if (std::abs(std::atan2(r.state.v_y, r.state.v_x)) > opt.max_sideslip) return r;
    if (i % sample_every != 0) continue;
    window.push(r.state.psi_dot);
    if (window.full() && window.stddev() < opt.settle_std &&
        std::abs(r.state.v_x - speed) < opt.speed_tolerance) {
      r.converged = true;
      return r;
    }
  }
  return r;
}

SteadyStatePoint discrete_point(const SingleTrackModel& model, double swa, double delta, double speed,
                                const Iso4138Options& opt) {
  try {
    SpeedHold hold(model, opt);
    const auto r = settle(model, delta, speed, opt, hold);
    return make_point(r.state, swa, r.converged);
  } catch (const DivergenceError&) {
    return failed_point(speed, swa);
  }
}

void validate_options(const Iso4138Options& opt) {
  if (!(opt.dt > 0.0 && opt.dt <= 0.01)) throw std::invalid_argument("ISO 4138: dt must lie in (0, 0.01] s");
  if (!(opt.settle_window > 0.0 && opt.sample_period > 0.0 && opt.time_budget > opt.settle_window)) {
    throw std::invalid_argument("ISO 4138: inconsistent settling window / budget");
  }
}

}  // namespace

std::vector<double> default_iso4138_speeds() {
  std::vector<double> speeds;
  for (int kph = 5; kph <= 130; kph += 5) speeds.push_back(kph2mps(kph));
  return speeds;
}

SteadyStateReport run_iso4138_discrete(const VehicleParams& params, const AxleTires& tires,
                                       double steering_wheel_angle, const std::vector<double>& speeds,
                                       const Iso4138Options& options) {
  validate_options(options);
  const SingleTrackModel model(params, tires);
  const double delta = road_wheel_angle(params, steering_wheel_angle);
  const auto grid = normalized_speeds(speeds);

  SteadyStateReport report;
  report.points.resize(grid.size());
  const auto n = static_cast<long>(grid.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (long i = 0; i < n; ++i) {
    report.points[static_cast<std::size_t>(i)] =
        discrete_point(model, steering_wheel_angle, delta, grid[static_cast<std::size_t>(i)], options);
  }
  return report;
}

SteadyStateReport run_iso4138_discrete_serial(const VehicleParams& params, const AxleTires& tires,
                                              double steering_wheel_angle, const std::vector<double>& speeds,
                                              const Iso4138Options& options) {
  validate_options(options);
  const SingleTrackModel model(params, tires);
  const double delta = road_wheel_angle(params, steering_wheel_angle);
  SteadyStateReport report;
  for (double v : normalized_speeds(speeds)) {
    report.points.push_back(discrete_point(model, steering_wheel_angle, delta, v, options));
  }
  return report;
}

SteadyStateReport run_iso4138_continuous(const VehicleParams& params, const AxleTires& tires,
                                         double steering_wheel_angle, double accel_rate,
                                         const std::vector<double>& checkpoints, const Iso4138Options& options) {
  validate_options(options);
  if (!(accel_rate > 0.0 && accel_rate <= 1.0)) {
    throw std::invalid_argument("continuous ISO 4138: accel_rate must lie in (0, 1] m/s^2 for quasi-steady sampling");
  }
  const SingleTrackModel model(params, tires);
  const double delta = road_wheel_angle(params, steering_wheel_angle);
  const auto grid = normalized_speeds(checkpoints);
  SteadyStateReport report;
  if (grid.empty()) return report;

  SpeedHold hold(model, options);
  SettleResult start;
  try {
    start = settle(model, delta, grid.front(), options, hold);
  } catch (const DivergenceError&) {
    for (double v : grid) report.points.push_back(failed_point(v, steering_wheel_angle));
    return report;
  }
  report.points.push_back(make_point(start.state, steering_wheel_angle, start.converged));

  VehicleState s = start.state;
  double t = start.t;
  const double v0 = grid.front();
  const double t_ramp = t;
  const std::size_t n = steps_for((grid.back() - v0) / accel_rate + options.time_budget, options.dt);
  std::size_t next = 1;
  bool lost = !start.converged;
  try {
    for (std::size_t i = 1; i <= n && next < grid.size() && !lost; ++i) {
      const double v_target = std::min(v0 + accel_rate * (t - t_ramp), grid.back() + 1.0);
      const DriveInput in{delta, hold.force(s, delta, v_target, accel_rate, options.dt)};
      s = model.step(s, in, options.dt, t);
      t = t_ramp + static_cast<double>(i) * options.dt;
      if (std::abs(std::atan2(s.v_y, s.v_x)) > options.max_sideslip) lost = true;
      while (!lost && next < grid.size() && s.v_x >= grid[next]) {
        const double yaw_accel = model.derivative(s, in).psi_dot;
        report.points.push_back(
            make_point(s, steering_wheel_angle, std::abs(yaw_accel) <= options.quasi_steady_yaw_accel));
        ++next;
      }
    }
  } catch (const DivergenceError&) {
    lost = true;
  }
  for (; next < grid.size(); ++next) report.points.push_back(failed_point(grid[next], steering_wheel_angle));
  return report;
}

double understeer_gradient(const SteadyStateReport& report, const VehicleParams& params, double a_y_max) {
  const double l = params.wheelbase();
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& p : report.points) {
    if (!p.converged || !std::isfinite(p.radius) || !std::isfinite(p.a_y)) continue;
    const double a = std::abs(p.a_y);
    if (a <= 0.0 || a > a_y_max) continue;
    const double delta = p.swa / params.steering_ratio;
    const double sign = delta >= 0.0 ? 1.0 : -1.0;
    xs.push_back(a);
    ys.push_back(sign * (delta - l / p.radius));
  }
  if (xs.size() < 3) throw std::invalid_argument("understeer_gradient: fewer than 3 converged points in the linear range");

  const double n = static_cast<double>(xs.size());
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx <= 0.0) throw std::invalid_argument("understeer_gradient: lateral acceleration does not vary");
  return sxy / sxx;
}

std::string to_csv(const SteadyStateReport& report) {
  std::string out = "speed_mps,swa_rad,yawrate_radps,ay_mps2,radius_m,sideslip_rad,converged\n";
  for (const auto& p : report.points) {
    out += fmt_num(p.speed) + ',' + fmt_num(p.swa) + ',' + fmt_num(p.yaw_rate) + ',' + fmt_num(p.a_y) + ',' +
           fmt_num(p.radius) + ',' + fmt_num(p.sideslip) + ',' + (p.converged ? "1" : "0") + '\n';
  }
  return out;
}

}  // namespace edgar::dynamics
