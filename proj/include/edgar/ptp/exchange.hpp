#pragma once

#include <random>
#include <vector>

#include "edgar/ptp/clock.hpp"

namespace edgar::ptp {

enum class MessageKind { Sync, FollowUp, DelayReq, DelayResp };

struct PtpMessageRecord {
  MessageKind kind = MessageKind::Sync;
  double origin_timestamp = 0.0;
  double receive_timestamp = 0.0;
  double transmit_timestamp = 0.0;
  double correction_field = 0.0;

  bool operator==(const PtpMessageRecord&) const = default;
};

/// Adds `residence` to the correction field. Throws on negative residence.
PtpMessageRecord transparent_correction(PtpMessageRecord message, double residence);

struct ExchangeTimestamps {
  double t1 = 0.0;  // Sync leaves the master (master clock)
  double t2 = 0.0;  // Sync reaches the slave (slave clock)
  double t3 = 0.0;  // Delay_Req leaves the slave (slave clock)
  double t4 = 0.0;  // Delay_Req reaches the master (master clock)
  double sync_correction = 0.0;
  double delay_req_correction = 0.0;
};

struct SyncEstimate {
  double offset = 0.0;  // slave minus master
  double delay = 0.0;   // mean one-way path delay
};

/// End-to-end two-step estimator with correction fields removed.
SyncEstimate estimate(const ExchangeTimestamps& ts);

struct ResidenceRange {
  double min = 0.0;
  double max = 0.0;
};

/// Links and transparent clocks between a master and its slave, master side first.
struct SyncPath {
  std::vector<double> delay_ms;  // per link, master to slave direction
  std::vector<double> delay_sm;  // per link, slave to master direction
  std::vector<ResidenceRange> transparent_clocks;  // one between each pair of links

  static SyncPath direct(double delay) { return {{delay}, {delay}, {}}; }
  void validate() const;
};

struct ExchangeOptions {
  /// Slave waits this long after Sync arrival before sending Delay_Req.
  double delay_req_lag = 1e-3;
  /// When false the transparent clocks forward without updating the correction field.
  bool apply_correction = true;
};

struct ExchangeResult {
  ExchangeTimestamps timestamps;
  std::vector<PtpMessageRecord> messages;  // Sync, FollowUp, DelayReq, DelayResp
  SyncEstimate estimate;
  double completed_at = 0.0;  // true time at which Delay_Resp reaches the slave
};

/// Runs one Sync / Follow_Up / Delay_Req / Delay_Resp exchange starting at true
/// time t_start. Residence times and timestamp noise draw from `rng`.
ExchangeResult sync_exchange(const Clock& master, const Clock& slave, const SyncPath& path, double t_start,
                             std::mt19937_64& rng, const ExchangeOptions& opts = {});

}  // namespace edgar::ptp
