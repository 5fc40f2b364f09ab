#include "edgar/store/records.hpp"

#include <stdexcept>

namespace edgar::store {

std::string_view to_string(RideSource s) { return s == RideSource::simulation ? "simulation" : "replay"; }

RideSource ride_source_from_string(std::string_view s) {
  if (s == "simulation") return RideSource::simulation;
  if (s == "replay") return RideSource::replay;
  throw std::invalid_argument("unknown ride source '" + std::string(s) + "'");
}

std::string_view to_string(TagOrigin o) { return o == TagOrigin::manual ? "manual" : "auto"; }

TagOrigin tag_origin_from_string(std::string_view s) {
  if (s == "manual") return TagOrigin::manual;
  if (s == "auto") return TagOrigin::automatic;
  throw std::invalid_argument("unknown tag origin '" + std::string(s) + "'");
}

Taxonomy Taxonomy::standard() {
  Taxonomy t;
  t.add("dynamics", "speed");
  t.add("dynamics", "maneuver");
  t.add("sensors", "modality");
  t.add("weather", "condition");
  t.add("weather", "light");
  t.add("scenario", "type");
  t.add("scenario", "location");
  return t;
}

void Taxonomy::add(const std::string& category, const std::string& group) {
  if (category.empty() || group.empty()) throw std::invalid_argument("taxonomy entries must be non-empty");
  groups_[category].insert(group);
}

bool Taxonomy::allows(std::string_view category, std::string_view group) const {
  const auto it = groups_.find(std::string(category));
  return it != groups_.end() && it->second.count(std::string(group)) > 0;
}

}  // namespace edgar::store
