#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "edgar/sensors/rig.hpp"
#include "edgar/store/records.hpp"

namespace edgar::store {

struct Tables {
  std::vector<Ride> rides;
  std::vector<CalibratedSensor> calibrated_sensors;
  std::vector<MapRecord> maps;
  std::vector<Scene> scenes;
  std::vector<Sample> samples;
  std::vector<SampleData> sample_data;
  std::vector<EgoPose> ego_poses;
  std::vector<Tag> tags;
  bool operator==(const Tables&) const = default;
};

/// In-memory recording schema. The add_* operations reject dangling references
/// and duplicates with std::invalid_argument; loaded or raw-edited tables are
/// not validated, integrity_check reports their problems instead.
class RideStore {
 public:
  explicit RideStore(Taxonomy taxonomy = Taxonomy::standard()) : taxonomy_(std::move(taxonomy)) {}
  static RideStore from_tables(Tables tables, Taxonomy taxonomy = Taxonomy::standard());

  const Tables& tables() const { return t_; }
  /// Unchecked mutable access; lookups are rebuilt on next use.
  Tables& raw_tables() {
    dirty_ = true;
    return t_;
  }
  const Taxonomy& taxonomy() const { return taxonomy_; }

  void add_map(MapRecord m);
  void create_ride(Ride r);
  void add_calibrated_sensor(CalibratedSensor c);
  /// Scenes of one ride must be added in time order without overlap.
  void add_scene(Scene s);
  void add_sample(Sample s);
  void add_sample_data(SampleData d);
  void add_ego_pose(EgoPose p);
  void add_tag(Tag t);

  const Ride* find_ride(std::string_view id) const;
  const MapRecord* find_map(std::string_view id) const;
  const CalibratedSensor* find_calibrated_sensor(std::string_view id) const;
  const Scene* find_scene(std::string_view id) const;
  const Sample* find_sample(std::string_view id) const;
  const EgoPose* find_ego_pose(std::string_view sample_id) const;

  /// Scenes of a ride ordered by start time.
  std::vector<const Scene*> scenes_of(std::string_view ride_id) const;
  std::vector<const CalibratedSensor*> sensors_of(std::string_view ride_id) const;
  /// Ride owning a scene, or nullptr.
  const Ride* ride_of_scene(std::string_view scene_id) const;

 private:
  void reindex() const;
  Tables t_;
  Taxonomy taxonomy_;
  mutable bool dirty_ = true;
  mutable std::map<std::string, std::size_t, std::less<>> ride_ix_, map_ix_, cs_ix_, scene_ix_, sample_ix_, pose_ix_;
};

/// Pinhole intrinsics from field of view and image size; nullopt without image size.
std::optional<std::array<double, 9>> pinhole_intrinsic(const sensors::SensorSpec& spec);

/// Input for recording one simulated ride.
struct RideRecording {
  Ride ride;
  std::optional<MapRecord> map;
  /// Measurement timestamps per rig sensor id, in sensor-clock time [s].
  std::map<std::string, std::vector<double>> timestamps;
  /// Ego state at a sample time; the sample id is filled in by the recorder.
  std::function<EgoPose(double)> pose_at;
  double scene_duration = 20.0;
  std::optional<double> tolerance;       // default: half the fastest sensor period
  std::optional<std::string> anchor;     // default: slowest sensor
  std::vector<double> scene_boundaries;  // manual interior boundaries; empty means fixed duration
  std::vector<Tag> manual_tags;          // scene_id holds the scene index as text
};

struct RecordingSummary {
  std::size_t scenes = 0;
  std::size_t samples = 0;
  std::size_t sample_data = 0;
  std::size_t tags = 0;
  double tolerance = 0.0;
  std::string anchor;
};

/// Creates the ride, its calibrated sensors, scenes, aligned samples with data
/// and ego poses, and auto tags. Every rig sensor with a timestamp stream is
/// registered. Throws std::invalid_argument on bad input.
RecordingSummary record_ride(RideStore& store, const sensors::Rig& rig, const RideRecording& rec);

}  // namespace edgar::store
