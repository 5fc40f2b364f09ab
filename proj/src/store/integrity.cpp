#include "edgar/store/integrity.hpp"

#include <cmath>
#include <map>
#include <set>

#include <fmt/format.h>

namespace edgar::store {

namespace {

// Scene bounds are computed as start + k * duration, so joints match exactly;
// the slack only absorbs hand-edited files.
constexpr double kTimeEps = 1e-9;

template <class Rows, class Key>
void unique_ids(const Rows& rows, Key key, const char* table, std::vector<Violation>& out) {
  std::set<std::string> seen;
  for (const auto& r : rows) {
    const std::string k = key(r);
    if (k.empty()) out.push_back({table, k, "empty id"});
    else if (!seen.insert(k).second) out.push_back({table, k, "duplicate id"});
  }
}

}  // namespace

IntegrityReport integrity_check(const RideStore& store, const sensors::Rig* rig) {
  const Tables& t = store.tables();
  std::vector<Violation> v;
  auto id = [](const auto& r) { return r.id; };

  unique_ids(t.maps, id, "map", v);

  unique_ids(t.rides, id, "ride", v);
  for (const auto& r : t.rides) {
    if (!(std::isfinite(r.start) && std::isfinite(r.end) && r.end >= r.start)) {
      v.push_back({"ride", r.id, "end precedes start"});
    }
    if (!r.map_id.empty() && !store.find_map(r.map_id)) {
      v.push_back({"ride", r.id, "unknown map '" + r.map_id + "'"});
    }
  }

  unique_ids(t.calibrated_sensors, id, "calibrated_sensor", v);
  std::set<std::pair<std::string, std::string>> ride_sensor;
  for (const auto& c : t.calibrated_sensors) {
    if (!store.find_ride(c.ride_id)) v.push_back({"calibrated_sensor", c.id, "unknown ride '" + c.ride_id + "'"});
    if (rig && !rig->find(c.sensor_id)) {
      v.push_back({"calibrated_sensor", c.id, "unknown rig sensor '" + c.sensor_id + "'"});
    }
    if (!ride_sensor.insert({c.ride_id, c.sensor_id}).second) {
      v.push_back({"calibrated_sensor", c.id, "sensor '" + c.sensor_id + "' calibrated twice in one ride"});
    }
  }

  unique_ids(t.scenes, id, "scene", v);
  for (const auto& s : t.scenes) {
    const Ride* r = store.find_ride(s.ride_id);
    if (!r) {
      v.push_back({"scene", s.id, "unknown ride '" + s.ride_id + "'"});
      continue;
    }
    if (!(s.end > s.start)) v.push_back({"scene", s.id, "empty or inverted interval"});
    if (s.start < r->start - kTimeEps || s.end > r->end + kTimeEps) v.push_back({"scene", s.id, "outside ride bounds"});
  }
  // Partition: ordered, gap-free, non-overlapping, covering the ride.
  for (const auto& r : t.rides) {
    const auto scenes = store.scenes_of(r.id);
    if (scenes.empty()) {
      if (r.end > r.start) v.push_back({"ride", r.id, "has no scenes"});
      continue;
    }
    if (std::abs(scenes.front()->start - r.start) > kTimeEps) {
      v.push_back({"scene", scenes.front()->id, "first scene does not start at ride start"});
    }
    for (std::size_t k = 1; k < scenes.size(); ++k) {
      const double gap = scenes[k]->start - scenes[k - 1]->end;
      if (gap > kTimeEps) v.push_back({"scene", scenes[k]->id, fmt::format("gap of {:.6g} s before scene", gap)});
      if (gap < -kTimeEps) v.push_back({"scene", scenes[k]->id, "overlaps previous scene"});
    }
    if (std::abs(scenes.back()->end - r.end) > kTimeEps) {
      v.push_back({"scene", scenes.back()->id, "last scene does not end at ride end"});
    }
  }

  unique_ids(t.samples, id, "sample", v);
  std::map<std::string, std::set<std::string>> data_sensors;  // sample -> calibrated sensors
  for (const auto& d : t.sample_data) data_sensors[d.sample_id].insert(d.sensor_id);
  std::map<std::string, int> pose_count;
  for (const auto& p : t.ego_poses) ++pose_count[p.sample_id];
  for (const auto& s : t.samples) {
    const Scene* sc = store.find_scene(s.scene_id);
    if (!sc) {
      v.push_back({"sample", s.id, "unknown scene '" + s.scene_id + "'"});
    } else {
      if (s.timestamp < sc->start - kTimeEps || s.timestamp > sc->end + kTimeEps) {
        v.push_back({"sample", s.id, "timestamp outside its scene"});
      }
      const auto& have = data_sensors[s.id];
      for (const auto* c : store.sensors_of(sc->ride_id)) {
        if (!have.count(c->id)) v.push_back({"sample", s.id, "no data from sensor '" + c->id + "'"});
      }
    }
    const int n = pose_count.count(s.id) ? pose_count.at(s.id) : 0;
    if (n != 1) v.push_back({"sample", s.id, fmt::format("{} ego poses instead of one", n)});
  }

  unique_ids(t.sample_data, id, "sample_data", v);
  for (const auto& d : t.sample_data) {
    const Sample* s = store.find_sample(d.sample_id);
    if (!s) v.push_back({"sample_data", d.id, "unknown sample '" + d.sample_id + "'"});
    const CalibratedSensor* c = store.find_calibrated_sensor(d.sensor_id);
    if (!c) {
      v.push_back({"sample_data", d.id, "unknown sensor '" + d.sensor_id + "'"});
    } else if (s) {
      const Ride* r = store.ride_of_scene(s->scene_id);
      if (r && r->id != c->ride_id) v.push_back({"sample_data", d.id, "sensor belongs to another ride"});
    }
  }

  for (const auto& p : t.ego_poses) {
    if (!store.find_sample(p.sample_id)) v.push_back({"ego_pose", p.sample_id, "unknown sample"});
  }

  std::set<std::tuple<std::string, std::string, std::string, std::string>> tags;
  for (const auto& g : t.tags) {
    const std::string tid = fmt::format("{}:{}.{}.{}", g.scene_id, g.category, g.group, g.name);
    if (!store.find_scene(g.scene_id)) v.push_back({"tag", tid, "unknown scene"});
    if (!store.taxonomy().allows(g.category, g.group)) {
      v.push_back({"tag", tid, "group '" + g.group + "' does not belong to category '" + g.category + "'"});
    }
    if (!tags.insert({g.scene_id, g.category, g.group, g.name}).second) v.push_back({"tag", tid, "duplicate tag"});
  }
  return {std::move(v)};
}

}  // namespace edgar::store
