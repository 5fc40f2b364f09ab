#pragma once

#include <cstdint>

namespace edgar::net {

/// Credit-based shaper state of one SR queue. Credit is in bits, slopes in bit/s.
struct CbsState {
  double credit = 0.0;
  double idle_slope = 0.0;
  double send_slope = 0.0;  // idle_slope - port rate, negative
  double hi_credit = 0.0;
  double lo_credit = 0.0;
};

/// Credit after `interval` seconds with no change of queue state, before clamping.
/// Transmitting: send slope. Frames waiting: idle slope. Empty queue: positive
/// credit drops to zero, negative credit recovers towards zero at the idle slope.
double cbs_credit_unclamped(const CbsState& s, double interval, bool transmitting, bool queue_nonempty);

/// Same rules, clamped to [lo_credit, hi_credit].
CbsState cbs_advance(CbsState s, double interval, bool transmitting, bool queue_nonempty);

/// Shaper for the highest SR class on a port.
/// hiCredit = maxInterference * idle / rate, loCredit = maxFrame * sendSlope / rate.
CbsState cbs_class_a(double port_rate, double idle_slope, double max_interference_bits, double max_frame_bits);

/// Shaper for the second SR class, which can also be held back by class A traffic:
/// hiCredit = idle_B * (maxInterference / (rate - idle_A) + maxFrameA / rate).
CbsState cbs_class_b(double port_rate, double idle_slope_a, double idle_slope_b, double max_interference_bits,
                     double max_frame_a_bits, double max_frame_bits);

}  // namespace edgar::net
