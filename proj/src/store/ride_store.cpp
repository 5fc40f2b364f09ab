#include "edgar/store/ride_store.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "edgar/store/align.hpp"
#include "edgar/store/scenes.hpp"

namespace edgar::store {

namespace {

template <class Rows, class Key>
void build(std::map<std::string, std::size_t, std::less<>>& ix, const Rows& rows, Key key) {
  ix.clear();
  for (std::size_t i = 0; i < rows.size(); ++i) ix.emplace(key(rows[i]), i);  // first wins on duplicates
}

template <class Rows>
auto* lookup(const std::map<std::string, std::size_t, std::less<>>& ix, const Rows& rows, std::string_view id) {
  const auto it = ix.find(id);
  return it == ix.end() ? nullptr : &rows[it->second];
}

[[noreturn]] void reject(const std::string& msg) { throw std::invalid_argument(msg); }

}  // namespace

RideStore RideStore::from_tables(Tables tables, Taxonomy taxonomy) {
  RideStore s(std::move(taxonomy));
  s.t_ = std::move(tables);
  s.dirty_ = true;
  return s;
}

void RideStore::reindex() const {
  if (!dirty_) return;
  auto id = [](const auto& r) { return r.id; };
  build(ride_ix_, t_.rides, id);
  build(map_ix_, t_.maps, id);
  build(cs_ix_, t_.calibrated_sensors, id);
  build(scene_ix_, t_.scenes, id);
  build(sample_ix_, t_.samples, id);
  build(pose_ix_, t_.ego_poses, [](const EgoPose& p) { return p.sample_id; });
  dirty_ = false;
}

const Ride* RideStore::find_ride(std::string_view id) const {
  reindex();
  return lookup(ride_ix_, t_.rides, id);
}
const MapRecord* RideStore::find_map(std::string_view id) const {
  reindex();
  return lookup(map_ix_, t_.maps, id);
}
const CalibratedSensor* RideStore::find_calibrated_sensor(std::string_view id) const {
  reindex();
  return lookup(cs_ix_, t_.calibrated_sensors, id);
}
const Scene* RideStore::find_scene(std::string_view id) const {
  reindex();
  return lookup(scene_ix_, t_.scenes, id);
}
const Sample* RideStore::find_sample(std::string_view id) const {
  reindex();
  return lookup(sample_ix_, t_.samples, id);
}
const EgoPose* RideStore::find_ego_pose(std::string_view sample_id) const {
  reindex();
  return lookup(pose_ix_, t_.ego_poses, sample_id);
}

std::vector<const Scene*> RideStore::scenes_of(std::string_view ride_id) const {
  std::vector<const Scene*> out;
  for (const auto& s : t_.scenes) {
    if (s.ride_id == ride_id) out.push_back(&s);
  }
  std::stable_sort(out.begin(), out.end(), [](const Scene* a, const Scene* b) { return a->start < b->start; });
  return out;
}

std::vector<const CalibratedSensor*> RideStore::sensors_of(std::string_view ride_id) const {
  std::vector<const CalibratedSensor*> out;
  for (const auto& c : t_.calibrated_sensors) {
    if (c.ride_id == ride_id) out.push_back(&c);
  }
  return out;
}

const Ride* RideStore::ride_of_scene(std::string_view scene_id) const {
  const Scene* s = find_scene(scene_id);
  return s ? find_ride(s->ride_id) : nullptr;
}

void RideStore::add_map(MapRecord m) {
  if (m.id.empty()) reject("map with empty id");
  if (find_map(m.id)) reject("duplicate map id '" + m.id + "'");
  t_.maps.push_back(std::move(m));
  dirty_ = true;
}

void RideStore::create_ride(Ride r) {
  if (r.id.empty()) reject("ride with empty id");
  if (find_ride(r.id)) reject("duplicate ride id '" + r.id + "'");
  if (!std::isfinite(r.start) || !std::isfinite(r.end) || r.end < r.start) {
    reject("ride '" + r.id + "': end must not precede start");
  }
  if (!r.map_id.empty() && !find_map(r.map_id)) reject("ride '" + r.id + "' references unknown map '" + r.map_id + "'");
  t_.rides.push_back(std::move(r));
  dirty_ = true;
}

void RideStore::add_calibrated_sensor(CalibratedSensor c) {
  if (c.id.empty()) reject("calibrated sensor with empty id");
  if (find_calibrated_sensor(c.id)) reject("duplicate calibrated sensor id '" + c.id + "'");
  if (!find_ride(c.ride_id)) reject("calibrated sensor '" + c.id + "' references unknown ride '" + c.ride_id + "'");
  for (const auto* o : sensors_of(c.ride_id)) {
    if (o->sensor_id == c.sensor_id) reject("sensor '" + c.sensor_id + "' already calibrated for ride '" + c.ride_id + "'");
  }
  t_.calibrated_sensors.push_back(std::move(c));
  dirty_ = true;
}

void RideStore::add_scene(Scene s) {
  if (s.id.empty()) reject("scene with empty id");
  if (find_scene(s.id)) reject("duplicate scene id '" + s.id + "'");
  const Ride* r = find_ride(s.ride_id);
  if (!r) reject("scene '" + s.id + "' references unknown ride '" + s.ride_id + "'");
  if (!(s.start >= r->start && s.end <= r->end && s.end > s.start)) {
    reject("scene '" + s.id + "' lies outside its ride or is empty");
  }
  const auto prev = scenes_of(s.ride_id);
  if (!prev.empty() && s.start < prev.back()->end) reject("scene '" + s.id + "' overlaps or precedes an earlier scene");
  t_.scenes.push_back(std::move(s));
  dirty_ = true;
}

void RideStore::add_sample(Sample s) {
  if (s.id.empty()) reject("sample with empty id");
  if (find_sample(s.id)) reject("duplicate sample id '" + s.id + "'");
  const Scene* sc = find_scene(s.scene_id);
  if (!sc) reject("sample '" + s.id + "' references unknown scene '" + s.scene_id + "'");
  if (!(s.timestamp >= sc->start && s.timestamp <= sc->end)) reject("sample '" + s.id + "' lies outside its scene");
  t_.samples.push_back(std::move(s));
  dirty_ = true;
}

void RideStore::add_sample_data(SampleData d) {
  if (d.id.empty()) reject("sample data with empty id");
  if (!find_sample(d.sample_id)) reject("sample data '" + d.id + "' references unknown sample '" + d.sample_id + "'");
  if (!find_calibrated_sensor(d.sensor_id)) {
    reject("sample data '" + d.id + "' references unknown sensor '" + d.sensor_id + "'");
  }
  t_.sample_data.push_back(std::move(d));
  dirty_ = true;
}

void RideStore::add_ego_pose(EgoPose p) {
  if (!find_sample(p.sample_id)) reject("ego pose references unknown sample '" + p.sample_id + "'");
  if (find_ego_pose(p.sample_id)) reject("sample '" + p.sample_id + "' already has an ego pose");
  t_.ego_poses.push_back(std::move(p));
  dirty_ = true;
}

void RideStore::add_tag(Tag t) {
  if (!find_scene(t.scene_id)) reject("tag references unknown scene '" + t.scene_id + "'");
  if (t.name.empty()) reject("tag with empty name");
  if (!taxonomy_.allows(t.category, t.group)) {
    reject("tag group '" + t.group + "' does not belong to category '" + t.category + "'");
  }
  for (const auto& o : t_.tags) {
    if (o.scene_id == t.scene_id && o.category == t.category && o.group == t.group && o.name == t.name) {
      reject(fmt::format("duplicate tag {}.{}.{} on scene '{}'", t.category, t.group, t.name, t.scene_id));
    }
  }
  t_.tags.push_back(std::move(t));
}

std::optional<std::array<double, 9>> pinhole_intrinsic(const sensors::SensorSpec& spec) {
  if (spec.image_width == 0 || spec.image_height == 0) return std::nullopt;
  const double w = spec.image_width, h = spec.image_height;
  const double fx = 0.5 * w / std::tan(0.5 * spec.h_fov);
  const double fy = 0.5 * h / std::tan(0.5 * spec.v_fov);
  return std::array<double, 9>{fx, 0.0, 0.5 * w, 0.0, fy, 0.5 * h, 0.0, 0.0, 1.0};
}

RecordingSummary record_ride(RideStore& store, const sensors::Rig& rig, const RideRecording& rec) {
  if (!rec.pose_at) reject("ride recording needs an ego pose source");
  RecordingSummary sum;
  if (rec.map) {
    if (const MapRecord* m = store.find_map(rec.map->id)) {
      if (!(*m == *rec.map)) reject("map '" + rec.map->id + "' already exists with different content");
    } else {
      store.add_map(*rec.map);
    }
  }
  store.create_ride(rec.ride);
  const Ride ride = rec.ride;

  // Registered sensors: rig order, those with a timestamp stream.
  std::vector<const sensors::MountedSensor*> used;
  for (const auto& m : rig.sensors()) {
    if (rec.timestamps.count(m.spec.id)) used.push_back(&m);
  }
  for (const auto& [id, ts] : rec.timestamps) {
    if (!rig.find(id)) reject("timestamps given for unknown rig sensor '" + id + "'");
  }
  if (used.empty()) reject("ride recording has no sensor streams");

  std::vector<std::string> cs_ids;
  std::vector<std::vector<double>> streams;
  std::vector<double> rates;
  for (const auto* m : used) {
    CalibratedSensor c;
    c.id = ride.id + "_cs_" + m->spec.id;
    c.ride_id = ride.id;
    c.sensor_id = m->spec.id;
    c.modality = std::string(sensors::to_string(m->spec.modality));
    if (m->spec.modality == sensors::Modality::camera) c.intrinsic = pinhole_intrinsic(m->spec);
    c.translation = {m->pose.translation.x(), m->pose.translation.y(), m->pose.translation.z()};
    c.rotation = {m->pose.roll, m->pose.pitch, m->pose.yaw};
    cs_ids.push_back(c.id);
    store.add_calibrated_sensor(std::move(c));
    auto ts = rec.timestamps.at(m->spec.id);
    std::sort(ts.begin(), ts.end());
    streams.push_back(std::move(ts));
    rates.push_back(m->spec.rate);
  }

  std::size_t anchor = 0;
  if (rec.anchor) {
    const auto it = std::find_if(used.begin(), used.end(), [&](const auto* m) { return m->spec.id == *rec.anchor; });
    if (it == used.end()) reject("anchor sensor '" + *rec.anchor + "' has no stream");
    anchor = static_cast<std::size_t>(it - used.begin());
  } else {
    for (std::size_t i = 1; i < used.size(); ++i) {
      if (rates[i] < rates[anchor]) anchor = i;
    }
  }
  sum.anchor = used[anchor]->spec.id;
  sum.tolerance = rec.tolerance.value_or(default_tolerance(rates));

  const auto windows = rec.scene_boundaries.empty()
                           ? segment_scenes(ride.start, ride.end, rec.scene_duration)
                           : segment_scenes_at(ride.start, ride.end, rec.scene_boundaries);
  std::vector<std::string> scene_ids;
  for (std::size_t k = 0; k < windows.size(); ++k) {
    scene_ids.push_back(fmt::format("{}_scene_{:04d}", ride.id, k));
    store.add_scene({scene_ids.back(), ride.id, windows[k].first, windows[k].second});
  }
  sum.scenes = windows.size();

  std::vector<std::vector<EgoPose>> poses_per_scene(windows.size());
  const auto aligned = align_samples(streams, sum.tolerance, anchor);
  std::size_t sd_counter = 0;
  for (const auto& a : aligned) {
    const double t = a.timestamp;
    if (t < ride.start || t > ride.end || windows.empty()) continue;
    // Half-open windows; the final one also takes the ride end.
    std::size_t k = static_cast<std::size_t>(
        std::upper_bound(windows.begin(), windows.end(), t, [](double v, const TimeWindow& w) { return v < w.first; }) -
        windows.begin());
    if (k == 0) continue;
    --k;
    const std::string sid = fmt::format("{}_sample_{:06d}", ride.id, sum.samples++);
    store.add_sample({sid, scene_ids[k], t});
    for (std::size_t s = 0; s < streams.size(); ++s) {
      const std::size_t j = a.measurements[s];
      store.add_sample_data({fmt::format("{}_sd_{:08d}", ride.id, sd_counter++), sid, cs_ids[s], streams[s][j],
                             fmt::format("sim://{}/{}", used[s]->spec.id, j)});
    }
    EgoPose p = rec.pose_at(t);
    p.sample_id = sid;
    poses_per_scene[k].push_back(p);
    store.add_ego_pose(std::move(p));
  }
  sum.sample_data = sd_counter;

  for (std::size_t k = 0; k < windows.size(); ++k) {
    if (poses_per_scene[k].empty()) continue;
    for (auto& tag : auto_tags(scene_ids[k], poses_per_scene[k], rig)) {
      store.add_tag(std::move(tag));
      ++sum.tags;
    }
  }
  for (Tag tag : rec.manual_tags) {
    std::size_t k = 0;
    try {
      k = std::stoul(tag.scene_id);
    } catch (const std::exception&) {
      reject("manual tag scene index '" + tag.scene_id + "' is not a number");
    }
    if (k >= scene_ids.size()) reject("manual tag scene index " + tag.scene_id + " out of range");
    tag.scene_id = scene_ids[k];
    tag.origin = TagOrigin::manual;
    store.add_tag(std::move(tag));
    ++sum.tags;
  }
  return sum;
}

}  // namespace edgar::store
