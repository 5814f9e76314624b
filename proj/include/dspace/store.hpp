#pragma once

// On-disk store: a data directory holding
//
//   definitions/<pct-encoded DSI>/<version>.json   canonical definition documents
//   dvs.log                                          DV groups, short grammar, "+" continuation
//   counters.json                                    search counts s and access counts a
//   index.dsix                                       last built snapshot
//
// A torn last line of dvs.log (no trailing newline) is dropped on open, so a
// restart after an interrupted ingest sees a prefix of the log.

#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <vector>

#include "dspace/dv.hpp"
#include "dspace/index.hpp"
#include "dspace/registry.hpp"
#include "dspace/search.hpp"
#include "dspace/snapshot_io.hpp"

namespace dspace {

namespace fs = std::filesystem;

inline std::string read_file(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  if (!is) fail(Errc::io_error, "cannot read " + p.string());
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

inline void write_file_atomic(const fs::path& p, std::string_view data) {
  auto tmp = p;
  tmp += ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(Errc::io_error, "cannot write " + tmp.string());
    os.write(data.data(), static_cast<std::streamsize>(data.size()));
    if (!os) fail(Errc::io_error, "cannot write " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) fail(Errc::io_error, "cannot replace " + p.string() + ": " + ec.message());
}

/// Data directory from DSPACE_DATA_DIR, else ./dspace-data.
inline fs::path default_data_dir() {
  if (const char* env = std::getenv("DSPACE_DATA_DIR"); env && *env) return env;
  return "dspace-data";
}

class Store {
 public:
  struct IngestResult {
    std::size_t groups = 0;
    std::size_t first = 0;  // position of the first new group in the log
  };

  explicit Store(fs::path dir, IndexOptions options = {}) : dir_(std::move(dir)), options_(options) {
    fs::create_directories(dir_ / "definitions");
    load_definitions();
    load_log();
    if (fs::exists(dir_ / "counters.json")) counters_.load(Json::parse(read_file(dir_ / "counters.json")));
    if (fs::exists(dir_ / "index.dsix")) {
      snapshot_ = std::make_shared<const IndexSnapshot>(load_snapshot((dir_ / "index.dsix").string()));
    }
  }

  [[nodiscard]] const fs::path& dir() const noexcept { return dir_; }
  [[nodiscard]] const Registry& registry() const noexcept { return registry_; }
  [[nodiscard]] Counters& counters() noexcept { return counters_; }

  Registry::PutResult define(DomainSpaceDef def, std::optional<std::int64_t> actor = std::nullopt) {
    std::lock_guard lock(write_mu_);
    auto res = registry_.put(std::move(def), actor);
    if (res.version > persisted(res.def->dsi)) {
      const auto d = dir_ / "definitions" / text::percent_encode(res.def->dsi);
      fs::create_directories(d);
      write_file_atomic(d / (std::to_string(res.version) + ".json"), serialize_ds_definition(*res.def));
    }
    schemas_.clear();
    return res;
  }

  /// Validates groups against the current definitions and appends them.
  IngestResult ingest(const std::vector<DVGroup>& groups) {
    std::lock_guard lock(write_mu_);
    auto lookup = schema_lookup();
    std::string text;
    for (const auto& g : groups) {
      if (g.members.empty()) fail(Errc::invalid_argument, "empty DV group");
      auto line = serialize_dv_group(g, lookup);
      // what is written must read back to the same group
      auto back = parse_dv_log(line, lookup);
      if (back.size() != 1) fail(Errc::invalid_argument, "DV group does not serialize to one log block");
      text += line;
    }
    {
      std::ofstream os(dir_ / "dvs.log", std::ios::binary | std::ios::app);
      if (!os) fail(Errc::io_error, "cannot append to dvs.log");
      os.write(text.data(), static_cast<std::streamsize>(text.size()));
      os.flush();
      if (!os) fail(Errc::io_error, "cannot append to dvs.log");
    }
    IngestResult r{groups.size(), groups_.size()};
    groups_.insert(groups_.end(), groups.begin(), groups.end());
    return r;
  }

  /// Parses DV log text against the current definitions.
  [[nodiscard]] std::vector<DVGroup> parse_log(std::string_view log) {
    std::lock_guard lock(write_mu_);
    return parse_dv_log(log, schema_lookup());
  }

  IngestResult ingest_text(std::string_view log) { return ingest(parse_log(log)); }

  /// Flattened schema of the latest definition, or nullptr.
  [[nodiscard]] std::optional<FlatSchema> schema(std::string_view dsi) {
    std::lock_guard lock(write_mu_);
    const auto* s = schema_lookup()(dsi);
    return s ? std::optional<FlatSchema>(*s) : std::nullopt;
  }

  [[nodiscard]] std::vector<DVGroup> groups() const {
    std::lock_guard lock(write_mu_);
    return groups_;
  }

  [[nodiscard]] std::optional<DVGroup> group(std::size_t i) const {
    std::lock_guard lock(write_mu_);
    if (i >= groups_.size()) return std::nullopt;
    return groups_[i];
  }

  [[nodiscard]] std::size_t group_count() const {
    std::lock_guard lock(write_mu_);
    return groups_.size();
  }

  /// Builds from the current log, persists, then swaps the served snapshot.
  std::shared_ptr<const IndexSnapshot> build_index() {
    std::vector<DVGroup> groups;
    {
      std::lock_guard lock(write_mu_);
      groups = groups_;
    }
    auto snap = std::make_shared<const IndexSnapshot>(dspace::build_index(groups, registry_, options_));
    std::lock_guard build(build_mu_);
    save_snapshot(*snap, (dir_ / "index.dsix").string());
    std::lock_guard lock(snap_mu_);
    snapshot_ = snap;
    return snap;
  }

  [[nodiscard]] std::shared_ptr<const IndexSnapshot> snapshot() const {
    std::lock_guard lock(snap_mu_);
    return snapshot_;
  }

  [[nodiscard]] std::shared_ptr<const IndexSnapshot> require_snapshot() const {
    auto s = snapshot();
    if (!s) fail(Errc::no_snapshot, "no index built yet");
    return s;
  }

  void save_counters() {
    std::lock_guard lock(counter_mu_);
    write_file_atomic(dir_ / "counters.json", counters_.to_json().dump(2) + "\n");
  }

 private:
  std::size_t persisted(const std::string& dsi) const {
    const auto d = dir_ / "definitions" / text::percent_encode(dsi);
    std::size_t n = 0;
    while (fs::exists(d / (std::to_string(n + 1) + ".json"))) ++n;
    return n;
  }

  void load_definitions() {
    std::vector<fs::path> dirs;
    for (const auto& e : fs::directory_iterator(dir_ / "definitions")) {
      if (e.is_directory()) dirs.push_back(e.path());
    }
    std::sort(dirs.begin(), dirs.end());
    for (const auto& d : dirs) {
      for (std::size_t v = 1;; ++v) {
        const auto p = d / (std::to_string(v) + ".json");
        if (!fs::exists(p)) break;
        try {
          registry_.put(parse_ds_definition(read_file(p)));
        } catch (const Error& e) {
          throw Error(e.code(), p.string() + ": " + e.what());
        }
      }
    }
  }

  void load_log() {
    const auto p = dir_ / "dvs.log";
    if (!fs::exists(p)) return;
    auto log = read_file(p);
    const auto last_nl = log.rfind('\n');
    const std::size_t keep = last_nl == std::string::npos ? 0 : last_nl + 1;
    if (keep != log.size()) {
      log.resize(keep);
      write_file_atomic(p, log);
    }
    try {
      groups_ = parse_dv_log(log, schema_lookup());
    } catch (const Error& e) {
      throw Error(e.code(), "dvs.log: " + std::string(e.what()));
    }
  }

  SchemaLookup schema_lookup() {
    return [this](std::string_view dsi) -> const FlatSchema* {
      auto it = schemas_.find(std::string(dsi));
      if (it != schemas_.end()) return &it->second;
      auto def = registry_.find(dsi);
      if (!def) return nullptr;
      return &schemas_.emplace(std::string(dsi), flatten(*def, registry_, options_.depth_limit)).first->second;
    };
  }

  fs::path dir_;
  IndexOptions options_;
  Registry registry_;
  std::map<std::string, FlatSchema> schemas_;  // flatten cache, cleared on define
  std::vector<DVGroup> groups_;
  Counters counters_;
  std::shared_ptr<const IndexSnapshot> snapshot_;
  mutable std::mutex write_mu_;
  mutable std::mutex build_mu_;
  mutable std::mutex snap_mu_;
  mutable std::mutex counter_mu_;
};

}  // namespace dspace
