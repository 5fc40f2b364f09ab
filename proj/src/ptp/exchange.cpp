#include "edgar/ptp/exchange.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace edgar::ptp {

PtpMessageRecord transparent_correction(PtpMessageRecord message, double residence) {
  if (!(residence >= 0.0) || !std::isfinite(residence)) {
    throw std::invalid_argument("residence time must be non-negative");
  }
  message.correction_field += residence;
  return message;
}

SyncEstimate estimate(const ExchangeTimestamps& ts) {
  const double ms = (ts.t2 - ts.t1) - ts.sync_correction;
  const double sm = (ts.t4 - ts.t3) - ts.delay_req_correction;
  return {0.5 * (ms - sm), 0.5 * (ms + sm)};
}

void SyncPath::validate() const {
  if (delay_ms.empty()) throw std::invalid_argument("sync path has no links");
  if (delay_sm.size() != delay_ms.size()) throw std::invalid_argument("sync path delay lists differ in length");
  if (transparent_clocks.size() + 1 != delay_ms.size()) {
    throw std::invalid_argument("sync path needs exactly one transparent clock between consecutive links");
  }
  for (std::size_t i = 0; i < delay_ms.size(); ++i) {
    if (!(delay_ms[i] >= 0.0) || !(delay_sm[i] >= 0.0)) throw std::invalid_argument("link delay must be >= 0");
  }
  for (const auto& r : transparent_clocks) {
    if (!(r.min >= 0.0) || !(r.max >= r.min)) throw std::invalid_argument("residence range must satisfy 0 <= min <= max");
  }
}

namespace {

double draw(const ResidenceRange& r, std::mt19937_64& rng) {
  if (r.max == r.min) return r.min;
  return std::uniform_real_distribution<double>(r.min, r.max)(rng);
}

// Walks a message across the path; returns true arrival time.
double traverse(PtpMessageRecord& msg, const std::vector<double>& links, const std::vector<ResidenceRange>& tcs,
                bool reverse, double t_depart, bool apply_correction, std::mt19937_64& rng) {
  double t = t_depart;
  const std::size_t n = links.size();
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = reverse ? n - 1 - k : k;
    t += links[i];
    if (k + 1 < n) {
      const std::size_t tc = reverse ? i - 1 : i;
      const double residence = draw(tcs[tc], rng);
      t += residence;
      if (apply_correction) msg = transparent_correction(msg, residence);
    }
  }
  return t;
}

}  // namespace

ExchangeResult sync_exchange(const Clock& master, const Clock& slave, const SyncPath& path, double t_start,
                             std::mt19937_64& rng, const ExchangeOptions& opts) {
  path.validate();
  if (!(opts.delay_req_lag >= 0.0)) throw std::invalid_argument("delay request lag must be >= 0");
  ExchangeResult r;
  auto& ts = r.timestamps;

  PtpMessageRecord sync{MessageKind::Sync};
  ts.t1 = master.timestamp(t_start, rng);
  const double t_sync_arrival =
      traverse(sync, path.delay_ms, path.transparent_clocks, false, t_start, opts.apply_correction, rng);
  ts.t2 = slave.timestamp(t_sync_arrival, rng);
  sync.receive_timestamp = ts.t2;
  ts.sync_correction = sync.correction_field;
  // Two-step: the precise origin timestamp travels in the Follow_Up.
  PtpMessageRecord follow{MessageKind::FollowUp, ts.t1, 0.0, 0.0, sync.correction_field};

  PtpMessageRecord req{MessageKind::DelayReq};
  const double t_req = t_sync_arrival + opts.delay_req_lag;
  ts.t3 = slave.timestamp(t_req, rng);
  req.transmit_timestamp = ts.t3;
  const double t_req_arrival =
      traverse(req, path.delay_sm, path.transparent_clocks, true, t_req, opts.apply_correction, rng);
  ts.t4 = master.timestamp(t_req_arrival, rng);
  req.receive_timestamp = ts.t4;
  ts.delay_req_correction = req.correction_field;
  PtpMessageRecord resp{MessageKind::DelayResp, 0.0, ts.t4, 0.0, req.correction_field};

  // Delay_Resp rides back over the forward path; its residences are irrelevant to the estimate.
  const double back = std::accumulate(path.delay_ms.begin(), path.delay_ms.end(), 0.0);
  r.completed_at = t_req_arrival + back;
  r.messages = {sync, follow, req, resp};
  r.estimate = estimate(ts);
  return r;
}

}  // namespace edgar::ptp
