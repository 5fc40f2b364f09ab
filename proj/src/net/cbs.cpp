#include "edgar/net/cbs.hpp"

#include <algorithm>
#include <stdexcept>

namespace edgar::net {

double cbs_credit_unclamped(const CbsState& s, double interval, bool transmitting, bool queue_nonempty) {
  if (interval < 0.0) throw std::invalid_argument("negative CBS interval");
  if (transmitting) return s.credit + s.send_slope * interval;
  if (queue_nonempty) return s.credit + s.idle_slope * interval;
  if (s.credit > 0.0) return 0.0;
  return std::min(0.0, s.credit + s.idle_slope * interval);
}

CbsState cbs_advance(CbsState s, double interval, bool transmitting, bool queue_nonempty) {
  s.credit = std::clamp(cbs_credit_unclamped(s, interval, transmitting, queue_nonempty), s.lo_credit, s.hi_credit);
  return s;
}

namespace {

void check_slopes(double rate, double idle) {
  if (!(rate > 0.0)) throw std::invalid_argument("port rate must be > 0");
  if (!(idle > 0.0) || !(idle < rate)) throw std::invalid_argument("idle slope must lie in (0, port rate)");
}

}  // namespace

CbsState cbs_class_a(double port_rate, double idle_slope, double max_interference_bits, double max_frame_bits) {
  check_slopes(port_rate, idle_slope);
  CbsState s;
  s.idle_slope = idle_slope;
  s.send_slope = idle_slope - port_rate;
  s.hi_credit = max_interference_bits * idle_slope / port_rate;
  s.lo_credit = max_frame_bits * s.send_slope / port_rate;
  return s;
}

CbsState cbs_class_b(double port_rate, double idle_slope_a, double idle_slope_b, double max_interference_bits,
                     double max_frame_a_bits, double max_frame_bits) {
  check_slopes(port_rate, idle_slope_b);
  if (idle_slope_a < 0.0 || idle_slope_a + idle_slope_b >= port_rate) {
    throw std::invalid_argument("SR reservations exceed the port rate");
  }
  CbsState s;
  s.idle_slope = idle_slope_b;
  s.send_slope = idle_slope_b - port_rate;
  s.hi_credit =
      idle_slope_b * (max_interference_bits / (port_rate - idle_slope_a) + max_frame_a_bits / port_rate);
  s.lo_credit = max_frame_bits * s.send_slope / port_rate;
  return s;
}

}  // namespace edgar::net
