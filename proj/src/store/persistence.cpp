#include "edgar/store/persistence.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include <fmt/format.h>
#include <json.hpp>

namespace edgar::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json to_json(const Ride& r) {
  return {{"id", r.id},
          {"start", r.start},
          {"end", r.end},
          {"vehicle_config", r.vehicle_config},
          {"rig_config", r.rig_config},
          {"map_id", r.map_id},
          {"source", std::string(to_string(r.source))}};
}

json to_json(const CalibratedSensor& c) {
  json j = {{"id", c.id},
            {"ride_id", c.ride_id},
            {"sensor_id", c.sensor_id},
            {"modality", c.modality},
            {"translation_m", c.translation},
            {"rotation_rad", c.rotation}};
  j["intrinsic"] = c.intrinsic ? json(*c.intrinsic) : json(nullptr);
  return j;
}

json to_json(const MapRecord& m) { return {{"id", m.id}, {"name", m.name}, {"reference", m.reference}}; }

json to_json(const Scene& s) { return {{"id", s.id}, {"ride_id", s.ride_id}, {"start", s.start}, {"end", s.end}}; }

json to_json(const Sample& s) { return {{"id", s.id}, {"scene_id", s.scene_id}, {"timestamp", s.timestamp}}; }

json to_json(const SampleData& d) {
  return {{"id", d.id},
          {"sample_id", d.sample_id},
          {"sensor_id", d.sensor_id},
          {"timestamp", d.timestamp},
          {"payload", d.payload}};
}

json to_json(const EgoPose& p) {
  return {{"sample_id", p.sample_id}, {"x", p.x},     {"y", p.y},
          {"psi", p.psi},             {"v_x", p.v_x}, {"v_y", p.v_y},
          {"psi_dot", p.psi_dot}};
}

json to_json(const Tag& t) {
  return {{"scene_id", t.scene_id},
          {"category", t.category},
          {"group", t.group},
          {"name", t.name},
          {"origin", std::string(to_string(t.origin))}};
}

struct Reader {
  const json& j;
  const std::string& where;

  template <class T>
  T get(const char* key) const {
    const auto it = j.find(key);
    if (it == j.end()) throw StoreFormatError(where + ": missing field '" + key + "'");
    try {
      return it->template get<T>();
    } catch (const json::exception&) {
      throw StoreFormatError(where + ": field '" + key + "' has the wrong type");
    }
  }
};

template <class Fn>
auto convert(const std::string& where, Fn fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    throw StoreFormatError(where + ": " + e.what());
  }
}

Ride ride_from(const Reader& r) {
  Ride x;
  x.id = r.get<std::string>("id");
  x.start = r.get<double>("start");
  x.end = r.get<double>("end");
  x.vehicle_config = r.get<std::string>("vehicle_config");
  x.rig_config = r.get<std::string>("rig_config");
  x.map_id = r.get<std::string>("map_id");
  x.source = convert(r.where, [&] { return ride_source_from_string(r.get<std::string>("source")); });
  return x;
}

CalibratedSensor cs_from(const Reader& r) {
  CalibratedSensor c;
  c.id = r.get<std::string>("id");
  c.ride_id = r.get<std::string>("ride_id");
  c.sensor_id = r.get<std::string>("sensor_id");
  c.modality = r.get<std::string>("modality");
  c.translation = r.get<std::array<double, 3>>("translation_m");
  c.rotation = r.get<std::array<double, 3>>("rotation_rad");
  if (!r.j.contains("intrinsic")) throw StoreFormatError(r.where + ": missing field 'intrinsic'");
  if (!r.j.at("intrinsic").is_null()) c.intrinsic = r.get<std::array<double, 9>>("intrinsic");
  return c;
}

MapRecord map_from(const Reader& r) {
  return {r.get<std::string>("id"), r.get<std::string>("name"), r.get<std::string>("reference")};
}

Scene scene_from(const Reader& r) {
  return {r.get<std::string>("id"), r.get<std::string>("ride_id"), r.get<double>("start"), r.get<double>("end")};
}

Sample sample_from(const Reader& r) {
  return {r.get<std::string>("id"), r.get<std::string>("scene_id"), r.get<double>("timestamp")};
}

SampleData sd_from(const Reader& r) {
  return {r.get<std::string>("id"), r.get<std::string>("sample_id"), r.get<std::string>("sensor_id"),
          r.get<double>("timestamp"), r.get<std::string>("payload")};
}

EgoPose pose_from(const Reader& r) {
  EgoPose p;
  p.sample_id = r.get<std::string>("sample_id");
  p.x = r.get<double>("x");
  p.y = r.get<double>("y");
  p.psi = r.get<double>("psi");
  p.v_x = r.get<double>("v_x");
  p.v_y = r.get<double>("v_y");
  p.psi_dot = r.get<double>("psi_dot");
  return p;
}

Tag tag_from(const Reader& r) {
  Tag t;
  t.scene_id = r.get<std::string>("scene_id");
  t.category = r.get<std::string>("category");
  t.group = r.get<std::string>("group");
  t.name = r.get<std::string>("name");
  t.origin = convert(r.where, [&] { return tag_origin_from_string(r.get<std::string>("origin")); });
  return t;
}

/// Rows of every table attributed to one directory.
struct Bucket {
  Tables t;
};

template <class Row, class Key>
void sort_rows(std::vector<Row>& rows, Key key) {
  std::stable_sort(rows.begin(), rows.end(), [&](const Row& a, const Row& b) { return key(a) < key(b); });
}

void canonicalize(Tables& t) {
  auto id = [](const auto& r) { return r.id; };
  sort_rows(t.rides, id);
  sort_rows(t.calibrated_sensors, id);
  sort_rows(t.maps, id);
  sort_rows(t.scenes, id);
  sort_rows(t.samples, id);
  sort_rows(t.sample_data, id);
  sort_rows(t.ego_poses, [](const EgoPose& p) { return p.sample_id; });
  sort_rows(t.tags, [](const Tag& x) {
    return std::make_tuple(x.scene_id, x.category, x.group, x.name, std::string(to_string(x.origin)));
  });
}

template <class Row>
void write_table(const fs::path& file, const std::vector<Row>& rows, bool always) {
  if (rows.empty() && !always) return;
  std::ofstream os(file, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot write " + file.string());
  for (const auto& r : rows) os << to_json(r).dump() << '\n';
  if (!os) throw std::runtime_error("write failed for " + file.string());
}

void write_tables(const fs::path& dir, Tables t, bool always) {
  canonicalize(t);
  write_table(dir / "ride.jsonl", t.rides, always);
  write_table(dir / "calibrated_sensor.jsonl", t.calibrated_sensors, always);
  write_table(dir / "map.jsonl", t.maps, always);
  write_table(dir / "scene.jsonl", t.scenes, always);
  write_table(dir / "sample.jsonl", t.samples, always);
  write_table(dir / "sample_data.jsonl", t.sample_data, always);
  write_table(dir / "ego_pose.jsonl", t.ego_poses, always);
  write_table(dir / "tag.jsonl", t.tags, always);
}

template <class Row, class Parse>
void read_table(const fs::path& file, std::vector<Row>& out, Parse parse) {
  if (!fs::exists(file)) return;
  std::ifstream is(file, std::ios::binary);
  if (!is) throw StoreFormatError("cannot read " + file.string());
  std::string line;
  std::size_t n = 0;
  while (std::getline(is, line)) {
    ++n;
    if (line.empty()) continue;
    const std::string where = fmt::format("{}:{}", file.string(), n);
    json j;
    try {
      j = json::parse(line);
    } catch (const json::parse_error& e) {
      throw StoreFormatError(where + ": " + e.what());
    }
    if (!j.is_object()) throw StoreFormatError(where + ": expected a JSON object");
    out.push_back(parse(Reader{j, where}));
  }
}

void read_tables(const fs::path& dir, Tables& t) {
  read_table(dir / "ride.jsonl", t.rides, ride_from);
  read_table(dir / "calibrated_sensor.jsonl", t.calibrated_sensors, cs_from);
  std::vector<MapRecord> maps;
  read_table(dir / "map.jsonl", maps, map_from);
  for (auto& m : maps) {
    if (std::find(t.maps.begin(), t.maps.end(), m) == t.maps.end()) t.maps.push_back(std::move(m));
  }
  read_table(dir / "scene.jsonl", t.scenes, scene_from);
  read_table(dir / "sample.jsonl", t.samples, sample_from);
  read_table(dir / "sample_data.jsonl", t.sample_data, sd_from);
  read_table(dir / "ego_pose.jsonl", t.ego_poses, pose_from);
  read_table(dir / "tag.jsonl", t.tags, tag_from);
}

bool safe_dir_name(const std::string& id) {
  if (id.empty() || id == "." || id == "..") return false;
  return std::all_of(id.begin(), id.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
  });
}

void remove_tables(const fs::path& dir) {
  for (const char* name : kTableNames) fs::remove(dir / (std::string(name) + ".jsonl"));
}

}  // namespace

void save_store(const RideStore& store, const fs::path& dir) {
  const Tables& t = store.tables();
  fs::create_directories(dir);
  // Clear previous output so stale rides do not linger.
  remove_tables(dir);
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::exists(e.path() / "ride.jsonl")) {
      remove_tables(e.path());
      if (fs::is_empty(e.path())) fs::remove(e.path());
    }
  }

  std::map<std::string, Bucket> buckets;
  Bucket root;
  std::set<std::string> ride_ids;
  for (const auto& r : t.rides) {
    if (!safe_dir_name(r.id)) throw std::invalid_argument("ride id '" + r.id + "' is not usable as a directory name");
    if (!ride_ids.insert(r.id).second) throw std::invalid_argument("duplicate ride id '" + r.id + "' cannot be saved");
    buckets[r.id].t.rides.push_back(r);
  }
  auto bucket_of = [&](const std::string& ride_id) -> Bucket& {
    return ride_ids.count(ride_id) ? buckets[ride_id] : root;
  };

  std::map<std::string, std::string> scene_ride, sample_ride, cs_ride;
  for (const auto& s : t.scenes) scene_ride.emplace(s.id, s.ride_id);
  for (const auto& s : t.samples) {
    const auto it = scene_ride.find(s.scene_id);
    sample_ride.emplace(s.id, it == scene_ride.end() ? std::string() : it->second);
  }
  for (const auto& c : t.calibrated_sensors) cs_ride.emplace(c.id, c.ride_id);
  auto find_or_empty = [](const std::map<std::string, std::string>& m, const std::string& k) {
    const auto it = m.find(k);
    return it == m.end() ? std::string() : it->second;
  };

  for (const auto& m : t.maps) {
    bool placed = false;
    for (const auto& r : t.rides) {
      if (r.map_id == m.id) {
        auto& maps = buckets[r.id].t.maps;
        if (std::find(maps.begin(), maps.end(), m) == maps.end()) maps.push_back(m);
        placed = true;
      }
    }
    if (!placed) root.t.maps.push_back(m);
  }
  for (const auto& c : t.calibrated_sensors) bucket_of(c.ride_id).t.calibrated_sensors.push_back(c);
  for (const auto& s : t.scenes) bucket_of(s.ride_id).t.scenes.push_back(s);
  for (const auto& s : t.samples) bucket_of(find_or_empty(sample_ride, s.id)).t.samples.push_back(s);
  for (const auto& d : t.sample_data) {
    std::string ride = find_or_empty(cs_ride, d.sensor_id);
    if (!ride_ids.count(ride)) ride = find_or_empty(sample_ride, d.sample_id);
    bucket_of(ride).t.sample_data.push_back(d);
  }
  for (const auto& p : t.ego_poses) bucket_of(find_or_empty(sample_ride, p.sample_id)).t.ego_poses.push_back(p);
  for (const auto& g : t.tags) bucket_of(find_or_empty(scene_ride, g.scene_id)).t.tags.push_back(g);

  for (const auto& [id, b] : buckets) {
    fs::create_directories(dir / id);
    write_tables(dir / id, b.t, true);
  }
  write_tables(dir, root.t, false);
}

RideStore load_store(const fs::path& dir, Taxonomy taxonomy) {
  if (!fs::is_directory(dir)) throw StoreFormatError("store directory " + dir.string() + " does not exist");
  Tables t;
  read_tables(dir, t);
  std::vector<fs::path> rides;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_directory() && fs::exists(e.path() / "ride.jsonl")) rides.push_back(e.path());
  }
  std::sort(rides.begin(), rides.end());
  for (const auto& p : rides) read_tables(p, t);
  return RideStore::from_tables(std::move(t), std::move(taxonomy));
}

void export_csv(const RideStore& store, const fs::path& dir) {
  fs::create_directories(dir);
  Tables t = store.tables();
  canonicalize(t);
  auto open = [&](const char* name) {
    std::ofstream os(dir / (std::string(name) + ".csv"), std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write CSV in " + dir.string());
    return os;
  };
  auto g = [](double v) { return fmt::format("{:.17g}", v); };
  {
    auto os = open("ride");
    os << "id,start_s,end_s,vehicle_config,rig_config,map_id,source\n";
    for (const auto& r : t.rides) {
      os << fmt::format("{},{},{},{},{},{},{}\n", r.id, g(r.start), g(r.end), r.vehicle_config, r.rig_config, r.map_id,
                        to_string(r.source));
    }
  }
  {
    auto os = open("calibrated_sensor");
    os << "id,ride_id,sensor_id,modality,x_m,y_m,z_m,roll_rad,pitch_rad,yaw_rad,fx,fy,cx,cy\n";
    for (const auto& c : t.calibrated_sensors) {
      os << fmt::format("{},{},{},{},{},{},{},{},{},{}", c.id, c.ride_id, c.sensor_id, c.modality, g(c.translation[0]),
                        g(c.translation[1]), g(c.translation[2]), g(c.rotation[0]), g(c.rotation[1]),
                        g(c.rotation[2]));
      if (c.intrinsic) {
        const auto& k = *c.intrinsic;
        os << fmt::format(",{},{},{},{}\n", g(k[0]), g(k[4]), g(k[2]), g(k[5]));
      } else {
        os << ",,,,\n";
      }
    }
  }
  {
    auto os = open("map");
    os << "id,name,reference\n";
    for (const auto& m : t.maps) os << fmt::format("{},{},{}\n", m.id, m.name, m.reference);
  }
  {
    auto os = open("scene");
    os << "id,ride_id,start_s,end_s\n";
    for (const auto& s : t.scenes) os << fmt::format("{},{},{},{}\n", s.id, s.ride_id, g(s.start), g(s.end));
  }
  {
    auto os = open("sample");
    os << "id,scene_id,timestamp_s\n";
    for (const auto& s : t.samples) os << fmt::format("{},{},{}\n", s.id, s.scene_id, g(s.timestamp));
  }
  {
    auto os = open("sample_data");
    os << "id,sample_id,sensor_id,timestamp_s,payload\n";
    for (const auto& d : t.sample_data) {
      os << fmt::format("{},{},{},{},{}\n", d.id, d.sample_id, d.sensor_id, g(d.timestamp), d.payload);
    }
  }
  {
    auto os = open("ego_pose");
    os << "sample_id,x_m,y_m,psi_rad,v_x_mps,v_y_mps,psi_dot_radps\n";
    for (const auto& p : t.ego_poses) {
      os << fmt::format("{},{},{},{},{},{},{}\n", p.sample_id, g(p.x), g(p.y), g(p.psi), g(p.v_x), g(p.v_y),
                        g(p.psi_dot));
    }
  }
  {
    auto os = open("tag");
    os << "scene_id,category,group,name,origin\n";
    for (const auto& x : t.tags) {
      os << fmt::format("{},{},{},{},{}\n", x.scene_id, x.category, x.group, x.name, to_string(x.origin));
    }
  }
}

}  // namespace edgar::store
