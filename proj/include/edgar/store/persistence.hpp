#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "edgar/store/ride_store.hpp"

namespace edgar::store {

class StoreFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Table file names, without the .jsonl suffix.
inline constexpr const char* kTableNames[] = {"ride",   "calibrated_sensor", "map",      "scene",
                                              "sample", "sample_data",       "ego_pose", "tag"};

/// Writes one directory per ride, <dir>/<ride id>/<table>.jsonl, one JSON object
/// per line with sorted keys, rows sorted by id. Maps go to every ride that
/// references them. Rows that cannot be attributed to a ride (unreferenced maps,
/// dangling records) go to <dir>/<table>.jsonl. Existing table files under `dir`
/// are replaced. The output depends only on the table contents.
void save_store(const RideStore& store, const std::filesystem::path& dir);

/// Reads the layout written by save_store without validating references;
/// identical maps repeated across rides are merged. Throws StoreFormatError
/// naming file and line on malformed JSON or missing fields.
RideStore load_store(const std::filesystem::path& dir, Taxonomy taxonomy = Taxonomy::standard());

/// One CSV per table under `dir`.
void export_csv(const RideStore& store, const std::filesystem::path& dir);

}  // namespace edgar::store
