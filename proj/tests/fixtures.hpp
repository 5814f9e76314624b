#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "dspace/dspace.hpp"

namespace fixtures {

inline const std::string kBase = "http://dspace.example.org/ds/";
inline const std::string kCupboard = kBase + "cupboard";

inline std::filesystem::path samples() { return DSPACE_SAMPLES_DIR; }

inline dspace::DomainSpaceDef load_def(const std::string& name) {
  return dspace::parse_ds_definition(dspace::read_file(samples() / "cupboard" / (name + ".json")));
}

inline void register_cupboard(dspace::Registry& r) {
  for (const auto* n : {"finances", "size", "cupboard"}) r.put(load_def(n));
}

inline std::vector<dspace::DVGroup> cupboard_groups(const dspace::Registry& r) {
  std::map<std::string, dspace::FlatSchema> flat;
  for (const auto& d : r.all()) flat.emplace(d->dsi, dspace::flatten(*d, r));
  return dspace::parse_dv_log(dspace::read_file(samples() / "cupboard" / "dvs.log"),
                              [&](std::string_view dsi) -> const dspace::FlatSchema* {
                                auto it = flat.find(std::string(dsi));
                                return it == flat.end() ? nullptr : &it->second;
                              });
}

// Rows of the cupboard fixture in c order: price, width, depth, height.
struct CupboardRow {
  double price, width, depth, height;
};

inline std::vector<CupboardRow> cupboard_rows() {
  return {{175.40, 258, 30, 124}, {99.00, 37, 40, 190},    {90.00, 50, 60, 236},    {199.00, 75, 44, 131},
          {199.00, 120, 50, 76},  {170.00, 174, 30, 179},  {362.90, 174, 50, 179},  {532.70, 383, 50, 226},
          {258.90, 174, 50, 179}, {59.00, 80, 30, 83},     {130.00, 100, 60, 236},  {399.00, 181, 58, 210},
          {449.00, 225, 58, 210}, {499.00, 270, 58, 210},  {599.00, 200, 65, 218},  {599.00, 250, 65, 218},
          {899.00, 300, 65, 218}, {1799.99, 163, 60, 197}, {1099.00, 157, 57, 203}, {659.00, 200, 68, 216},
          {699.00, 250, 68, 216}, {799.00, 300, 68, 216},  {299.00, 150, 68, 216},  {1099.99, 250, 63, 223}};
}

/// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    static std::mt19937_64 rng(std::random_device{}());
    path_ = std::filesystem::temp_directory_path() / ("dspace-test-" + std::to_string(rng()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  [[nodiscard]] const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fixtures
