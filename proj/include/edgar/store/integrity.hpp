#pragma once

#include <string>
#include <vector>

#include "edgar/sensors/rig.hpp"
#include "edgar/store/ride_store.hpp"

namespace edgar::store {

struct Violation {
  std::string table;
  std::string id;  // offending record
  std::string message;
  bool operator==(const Violation&) const = default;
};

struct IntegrityReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
};

/// Checks referential integrity, id uniqueness, ride and scene bounds, scene
/// partitioning, one ego pose and data from every registered sensor per sample,
/// and tag taxonomy and uniqueness. With a rig, calibrated sensors must name rig
/// sensors. Violations come in table order, then record order.
IntegrityReport integrity_check(const RideStore& store, const sensors::Rig* rig = nullptr);

}  // namespace edgar::store
