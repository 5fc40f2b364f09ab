#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <random>
#include <sstream>

#include <fmt/format.h>

#include "edgar/sensors/rig_config.hpp"
#include "edgar/store/align.hpp"
#include "edgar/store/integrity.hpp"
#include "edgar/store/persistence.hpp"
#include "edgar/store/scenes.hpp"
#include "edgar/store/tag_query.hpp"
#include "oracles.hpp"

using namespace edgar::store;
using edgar::oracle::brute_align;
namespace fs = std::filesystem;
using edgar::sensors::default_edgar_rig;

namespace {

fs::path temp_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("edgar_store_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = slurp(e.path());
  }
  return out;
}

/// Nominal timestamps at each sensor's rate over [0, duration), with a small
/// deterministic jitter standing in for residual clock offsets.
RideRecording synthetic_recording(const edgar::sensors::Rig& rig, const std::string& ride_id, double duration,
                                  double speed, std::uint64_t seed) {
  RideRecording rec;
  rec.ride.id = ride_id;
  rec.ride.start = 0.0;
  rec.ride.end = duration;
  rec.ride.map_id = "map_garching";
  rec.ride.vehicle_config = "data/vehicle_edgar.yaml";
  rec.ride.rig_config = "data/rig_edgar.yaml";
  rec.map = MapRecord{"map_garching", "Garching test field", "maps/garching.osm"};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> jitter(0.0, 200e-9);
  for (const auto& m : rig.sensors()) {
    auto& ts = rec.timestamps[m.spec.id];
    const double period = 1.0 / m.spec.rate;
    for (std::size_t k = 0;; ++k) {
      const double t = static_cast<double>(k) * period;
      if (t >= duration) break;
      ts.push_back(t + jitter(rng));
    }
  }
  rec.pose_at = [speed](double t) {
    EgoPose p;
    p.x = speed * t;
    p.v_x = speed;
    return p;
  };
  return rec;
}

std::set<TagKey> keys_of(const RideStore& st, const std::string& scene) {
  std::set<TagKey> out;
  for (const auto& t : st.tables().tags) {
    if (t.scene_id == scene) out.insert({t.category, t.group, t.name});
  }
  return out;
}

}  // namespace

TEST_CASE("create ride, map and calibrated sensors") {
  RideStore st;
  st.add_map({"m1", "test field", "maps/m1"});
  st.create_ride({"r1", 0.0, 10.0, "veh", "rig", "m1", RideSource::simulation});
  const auto rig = default_edgar_rig();
  std::size_t n = 0;
  for (const auto& m : rig.sensors()) {
    if (n == 18) break;
    st.add_calibrated_sensor({"r1_cs_" + m.spec.id, "r1", m.spec.id, "camera", std::nullopt, {}, {}});
    ++n;
  }
  st.add_scene({"r1_s0", "r1", 0.0, 10.0});
  CHECK(st.tables().calibrated_sensors.size() == 18);
  CHECK(integrity_check(st, &rig).ok());
  CHECK_THROWS_AS(st.add_calibrated_sensor({"x", "nope", "cam", "camera", std::nullopt, {}, {}}), std::invalid_argument);
  CHECK_THROWS_AS(st.create_ride({"r1", 0.0, 1.0, "", "", "", RideSource::replay}), std::invalid_argument);
  CHECK_THROWS_AS(st.create_ride({"r2", 0.0, 1.0, "", "", "missing", RideSource::replay}), std::invalid_argument);
  CHECK_THROWS_AS(st.create_ride({"r3", 2.0, 1.0, "", "", "", RideSource::replay}), std::invalid_argument);
  CHECK_THROWS_AS(st.add_scene({"r1_s1", "r1", 5.0, 8.0}), std::invalid_argument);  // overlaps
  CHECK_THROWS_AS(st.add_tag({"r1_s0", "dynamics", "modality", "x", TagOrigin::manual}), std::invalid_argument);
  st.add_tag({"r1_s0", "weather", "condition", "rain", TagOrigin::manual});
  CHECK_THROWS_AS(st.add_tag({"r1_s0", "weather", "condition", "rain", TagOrigin::automatic}), std::invalid_argument);
}

TEST_CASE("align_samples basic cases") {
  std::vector<std::vector<double>> s(3);
  for (int k = 0; k < 10; ++k) {
    for (auto& v : s) v.push_back(0.1 * k);
  }
  auto a = align_samples(s, 0.01);
  REQUIRE(a.size() == 10);
  for (int k = 0; k < 10; ++k) CHECK(a[static_cast<std::size_t>(k)].timestamp == doctest::Approx(0.1 * k));

  s[1].erase(s[1].begin() + 4);
  a = align_samples(s, 0.01);
  CHECK(a.size() == 9);
  CHECK(std::none_of(a.begin(), a.end(), [](const AlignedSample& x) { return std::abs(x.timestamp - 0.4) < 1e-9; }));

  CHECK(align_samples({{1.0}, {}}, 0.1).empty());
  CHECK_THROWS_AS(align_samples({{1.0}}, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(align_samples({}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(align_samples({{1.0}}, 0.1, 3), std::invalid_argument);
  const double rates[] = {10.0, 40.0, 20.0};
  CHECK(default_tolerance(rates) == doctest::Approx(0.0125));
  CHECK(default_anchor({{1, 2, 3}, {1}, {1, 2}}) == 1);
}

TEST_CASE("align_samples equals the brute-force oracle on random sets") {
  std::mt19937_64 rng(77);
  for (int trial = 0; trial < 100; ++trial) {
    const int ns = std::uniform_int_distribution<int>(1, 5)(rng);
    std::vector<std::vector<double>> streams(static_cast<std::size_t>(ns));
    std::vector<double> rates;
    for (auto& s : streams) {
      const double rate = std::uniform_real_distribution<double>(5.0, 50.0)(rng);
      rates.push_back(rate);
      const double phase = std::uniform_real_distribution<double>(0.0, 1.0 / rate)(rng);
      std::normal_distribution<double> jit(0.0, 0.1 / rate);
      for (double t = phase; t < 3.0; t += 1.0 / rate) {
        if (std::uniform_real_distribution<double>(0, 1)(rng) < 0.05) continue;  // lost frame
        // Millisecond grid produces exact ties.
        s.push_back(std::round((t + jit(rng)) * 1e3) * 1e-3);
      }
      std::shuffle(s.begin(), s.end(), rng);
    }
    const double tol = trial % 2 ? default_tolerance(rates) : std::uniform_real_distribution<double>(0.001, 0.05)(rng);
    const std::size_t anchor = default_anchor(streams);
    const auto got = align_samples(streams, tol);
    const auto want = brute_align(streams, tol, anchor);
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].timestamp == want[i].timestamp);
      CHECK(got[i].measurements == want[i].measurements);
    }
    // Order invariance.
    auto shuffled = streams;
    for (auto& s : shuffled) std::shuffle(s.begin(), s.end(), rng);
    const auto again = align_samples(shuffled, tol, anchor);
    REQUIRE(again.size() == got.size());
    for (std::size_t i = 0; i < got.size(); ++i) CHECK(again[i].timestamp == got[i].timestamp);
  }
}

TEST_CASE("scene segmentation") {
  CHECK(segment_scenes(0.0, 100.0, 20.0).size() == 5);
  const auto w = segment_scenes(0.0, 95.0, 20.0);
  REQUIRE(w.size() == 5);
  CHECK(w.back().second - w.back().first == doctest::Approx(15.0));
  CHECK(segment_scenes(3.0, 3.0, 1.0).empty());
  CHECK_THROWS_AS(segment_scenes(0.0, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(segment_scenes(1.0, 0.0, 1.0), std::invalid_argument);

  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const double a = std::uniform_real_distribution<double>(-100, 100)(rng);
    const double len = std::uniform_real_distribution<double>(0.01, 500)(rng);
    const double d = std::uniform_real_distribution<double>(0.1, 60)(rng);
    const auto ws = segment_scenes(a, a + len, d);
    REQUIRE(!ws.empty());
    CHECK(ws.size() == static_cast<std::size_t>(std::ceil(len / d - 1e-12)));
    CHECK(ws.front().first == a);
    CHECK(ws.back().second == a + len);
    for (std::size_t k = 1; k < ws.size(); ++k) CHECK(ws[k].first == ws[k - 1].second);
    for (const auto& x : ws) CHECK(x.second > x.first);
  }

  const double b[] = {10.0, 25.0};
  const auto m = segment_scenes_at(0.0, 30.0, b);
  REQUIRE(m.size() == 3);
  CHECK(m[1] == TimeWindow{10.0, 25.0});
  const double bad[] = {25.0, 10.0};
  CHECK_THROWS_AS(segment_scenes_at(0.0, 30.0, bad), std::invalid_argument);
}

TEST_CASE("auto tags") {
  const auto rig = default_edgar_rig();
  std::vector<EgoPose> still(3);
  auto tags = auto_tags("s", still, rig);
  CHECK(std::count(tags.begin(), tags.end(), Tag{"s", "dynamics", "speed", "standstill", TagOrigin::automatic}) == 1);
  CHECK(std::count(tags.begin(), tags.end(), Tag{"s", "sensors", "modality", "radar", TagOrigin::automatic}) == 1);
  std::vector<EgoPose> moving(1);
  moving[0].v_x = 10.0;
  tags = auto_tags("s", moving, rig);
  CHECK(tags.front().name == "medium");
  CHECK(speed_bucket(0.49) == "standstill");
  CHECK(speed_bucket(8.0) == "low");
  CHECK(speed_bucket(16.0) == "medium");
  CHECK(speed_bucket(36.1) == "high");
}

TEST_CASE("tag query grammar") {
  const auto q = TagQuery::parse("a.b.c OR d.e.f AND NOT g.h.i");
  CHECK(q.to_string() == "(a.b.c OR (d.e.f AND NOT g.h.i))");
  CHECK(TagQuery::parse("not (a.b.c or d.e.f)").to_string() == "NOT (a.b.c OR d.e.f)");
  CHECK(TagQuery::parse("and.or.not").to_string() == "and.or.not");
  auto err_at = [](const char* text) -> long {
    try {
      TagQuery::parse(text);
    } catch (const TagQueryError& e) {
      return static_cast<long>(e.position());
    }
    return -1;
  };
  CHECK(err_at("") == 0);
  CHECK(err_at("a.b") == 3);
  CHECK(err_at("a.b.c AND") == 9);
  CHECK(err_at("(a.b.c") == 6);
  CHECK(err_at("a.b.c d.e.f") == 6);
  CHECK(err_at("a.b.c $") == 6);
  CHECK(err_at("a.b.c)") == 5);
}

TEST_CASE("query_scenes against a brute-force filter") {
  RideStore st;
  st.create_ride({"r1", 0.0, 200.0, "", "", "", RideSource::simulation});
  st.create_ride({"r0", 0.0, 100.0, "", "", "", RideSource::replay});
  for (int k = 0; k < 10; ++k) st.add_scene({fmt::format("r1_s{}", k), "r1", 20.0 * k, 20.0 * (k + 1)});
  for (int k = 0; k < 5; ++k) st.add_scene({fmt::format("r0_s{}", k), "r0", 20.0 * k, 20.0 * (k + 1)});
  st.add_tag({"r1_s3", "scenario", "type", "overtaking", TagOrigin::manual});
  CHECK(query_scenes(st, "scenario.type.overtaking") == std::vector<std::string>{"r1_s3"});
  CHECK(query_scenes(st, "scenario.type.overtaking AND NOT scenario.type.overtaking").empty());

  const std::vector<TagKey> pool = {{"weather", "condition", "rain"},
                                    {"weather", "light", "night"},
                                    {"dynamics", "speed", "high"},
                                    {"scenario", "type", "overtaking"}};
  std::mt19937_64 rng(9);
  for (const auto& s : st.tables().scenes) {
    for (const auto& k : pool) {
      if (rng() % 2 && !keys_of(st, s.id).count(k)) {
        st.add_tag({s.id, std::get<0>(k), std::get<1>(k), std::get<2>(k), TagOrigin::manual});
      }
    }
  }
  auto lit = [&](std::size_t i) {
    return std::get<0>(pool[i]) + "." + std::get<1>(pool[i]) + "." + std::get<2>(pool[i]);
  };
  // Random expressions; the oracle evaluates set membership directly.
  std::function<std::pair<std::string, std::function<bool(const std::set<TagKey>&)>>(int)> gen = [&](int depth) {
    const int pick = depth == 0 ? 0 : static_cast<int>(rng() % 4);
    if (pick == 0) {
      const std::size_t i = rng() % pool.size();
      const TagKey k = pool[i];
      return std::pair<std::string, std::function<bool(const std::set<TagKey>&)>>(
          lit(i), [k](const std::set<TagKey>& s) { return s.count(k) > 0; });
    }
    auto a = gen(depth - 1);
    if (pick == 1) return std::pair<std::string, std::function<bool(const std::set<TagKey>&)>>(
        "NOT (" + a.first + ")", [f = a.second](const std::set<TagKey>& s) { return !f(s); });
    auto b = gen(depth - 1);
    const bool is_and = pick == 2;
    return std::pair<std::string, std::function<bool(const std::set<TagKey>&)>>(
        "(" + a.first + (is_and ? ") AND (" : ") OR (") + b.first + ")",
        [fa = a.second, fb = b.second, is_and](const std::set<TagKey>& s) { return is_and ? fa(s) && fb(s) : fa(s) || fb(s); });
  };
  for (int trial = 0; trial < 200; ++trial) {
    const auto [text, oracle] = gen(3);
    std::vector<std::pair<std::tuple<std::string, double, std::string>, std::string>> want;
    for (const auto& s : st.tables().scenes) {
      if (oracle(keys_of(st, s.id))) want.push_back({{s.ride_id, s.start, s.id}, s.id});
    }
    std::sort(want.begin(), want.end());
    std::vector<std::string> ids;
    for (auto& w : want) ids.push_back(w.second);
    CHECK(query_scenes(st, text) == ids);
  }
  // Distributes over OR.
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = 0; j < pool.size(); ++j) {
      auto a = query_scenes(st, lit(i));
      const auto b = query_scenes(st, lit(j));
      const auto both = query_scenes(st, lit(i) + " OR " + lit(j));
      std::set<std::string> u(a.begin(), a.end());
      u.insert(b.begin(), b.end());
      CHECK(std::set<std::string>(both.begin(), both.end()) == u);
    }
  }
  // Ordering is (ride id, start).
  const auto all = query_scenes(st, "NOT x.y.z");
  REQUIRE(all.size() == 15);
  CHECK(all.front() == "r0_s0");
  CHECK(all[5] == "r1_s0");
}

TEST_CASE("recorded ride passes integrity and round-trips byte for byte") {
  const auto rig = default_edgar_rig();
  RideStore st;
  auto rec = synthetic_recording(rig, "ride_0001", 45.0, 25.0 / 3.6, 1);
  rec.manual_tags.push_back({"1", "weather", "condition", "dry", TagOrigin::manual});
  const auto sum = record_ride(st, rig, rec);
  CHECK(sum.scenes == 3);
  CHECK(sum.anchor == "lidar_mr_left");
  CHECK(sum.tolerance == doctest::Approx(0.005));
  CHECK(sum.samples >= 440);  // 10 Hz anchor over 45 s
  CHECK(sum.sample_data == sum.samples * rig.sensors().size());
  const auto rep = integrity_check(st, &rig);
  for (const auto& v : rep.violations) INFO(v.table << " " << v.id << " " << v.message);
  CHECK(rep.ok());
  CHECK(query_scenes(st, "dynamics.speed.medium").empty());
  CHECK(query_scenes(st, "dynamics.speed.low").size() == 3);
  CHECK(query_scenes(st, "weather.condition.dry") == std::vector<std::string>{"ride_0001_scene_0001"});

  // Second ride on the same map.
  record_ride(st, rig, synthetic_recording(rig, "ride_0002", 12.0, 0.0, 2));
  CHECK(integrity_check(st, &rig).ok());

  const auto d1 = temp_dir("rt1");
  const auto d2 = temp_dir("rt2");
  save_store(st, d1);
  CHECK(fs::exists(d1 / "ride_0001" / "sample_data.jsonl"));
  CHECK(fs::exists(d1 / "ride_0002" / "map.jsonl"));
  const auto loaded = load_store(d1);
  CHECK(integrity_check(loaded, &rig).ok());
  save_store(loaded, d2);
  CHECK(snapshot(d1) == snapshot(d2));
  // Saving again into the same directory is stable too.
  save_store(load_store(d2), d2);
  CHECK(snapshot(d1) == snapshot(d2));
  export_csv(loaded, d2 / "csv");
  CHECK(slurp(d2 / "csv" / "scene.csv").rfind("id,ride_id,start_s,end_s\n", 0) == 0);
}

TEST_CASE("deleted sample is reported through its sample data") {
  // Single-sensor ride: removing a sample and its one-to-one ego pose leaves one dangling record.
  const auto rig = default_edgar_rig();
  RideStore st;
  auto rec = synthetic_recording(rig, "solo", 5.0, 1.0, 3);
  const auto keep = rec.timestamps.at("lidar_mr_left");
  rec.timestamps.clear();
  rec.timestamps["lidar_mr_left"] = keep;
  record_ride(st, rig, rec);
  REQUIRE(integrity_check(st, &rig).ok());
  const auto dir = temp_dir("corrupt");
  save_store(st, dir);

  const std::string victim = "solo_sample_000007";
  for (const char* table : {"sample.jsonl", "ego_pose.jsonl"}) {
    const auto path = dir / "solo" / table;
    std::istringstream in(slurp(path));
    std::ofstream out(path, std::ios::trunc);
    for (std::string line; std::getline(in, line);) {
      if (line.find("\"" + victim + "\"") == std::string::npos) out << line << '\n';
    }
  }
  const auto broken = load_store(dir);
  std::string sd_id;
  for (const auto& d : broken.tables().sample_data) {
    if (d.sample_id == victim) sd_id = d.id;
  }
  const auto rep = integrity_check(broken, &rig);
  REQUIRE(rep.violations.size() == 1);
  CHECK(rep.violations[0].table == "sample_data");
  CHECK(rep.violations[0].id == sd_id);
  CHECK(integrity_check(broken, &rig).violations == rep.violations);  // idempotent
}

TEST_CASE("deleting a sample in a full ride names every orphan") {
  const auto rig = default_edgar_rig();
  RideStore st;
  record_ride(st, rig, synthetic_recording(rig, "full", 3.0, 5.0, 4));
  auto& t = st.raw_tables();
  const std::string victim = t.samples[3].id;
  t.samples.erase(t.samples.begin() + 3);
  const auto rep = integrity_check(st, &rig);
  CHECK(rep.violations.size() == rig.sensors().size() + 1);
  for (const auto& v : rep.violations) {
    if (v.table == "sample_data") CHECK(v.message == "unknown sample '" + victim + "'");
    else CHECK((v.table == "ego_pose" && v.id == victim));
  }
}

TEST_CASE("malformed store files name file and line") {
  const auto dir = temp_dir("malformed");
  fs::create_directories(dir / "r");
  std::ofstream(dir / "r" / "ride.jsonl")
      << R"({"end":1.0,"id":"r","map_id":"","rig_config":"","source":"simulation","start":0.0,"vehicle_config":""})"
      << "\n{not json\n";
  try {
    load_store(dir);
    FAIL("expected a format error");
  } catch (const StoreFormatError& e) {
    CHECK(std::string(e.what()).find("ride.jsonl:2") != std::string::npos);
  }
  std::ofstream(dir / "r" / "ride.jsonl", std::ios::trunc) << R"({"id":"r"})" << "\n";
  CHECK_THROWS_AS(load_store(dir), StoreFormatError);
  CHECK_THROWS_AS(load_store(dir / "missing"), StoreFormatError);
}
