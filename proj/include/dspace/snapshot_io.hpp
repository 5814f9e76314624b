#pragma once

// DSIX1 snapshot files. Layout, all integers little-endian:
//
//   "DSIX1\0"
//   u32 column count
//   per column: u32 url length, url bytes (UTF-8), u64 record count,
//               records of u64 c + f64 value
//   u32 section count
//   per section: u32 name length, name, u64 entry count, entries
//
// Sections: "kinds" (u8 leaf kind per column), "sorted <url>" (16-byte
// records in value order), "records" (u64 c, u32 length, JSON), "postings
// <url>" (u32 word length, word, u64 n, n x u64 c), "interns" (u32 length,
// bytes; the ID is the position), "meta" (one u32 length + JSON entry with
// definitions, sameAs routes, options and the build report).

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>

#include "dspace/index.hpp"

namespace dspace {

inline constexpr char kSnapshotMagic[6] = {'D', 'S', 'I', 'X', '1', '\0'};

namespace detail {

class LeWriter {
 public:
  explicit LeWriter(std::ostream& os) : os_(os) {}

  void u8(std::uint8_t v) { os_.put(static_cast<char>(v)); }
  void u32(std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os_.write(b, 4);
  }
  void u64(std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xFF);
    os_.write(b, 8);
  }
  void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
  void str(std::string_view s) {
    if (s.size() > UINT32_MAX) fail(Errc::io_error, "string too long for snapshot");
    u32(static_cast<std::uint32_t>(s.size()));
    os_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void records(std::span<const ColumnRecord> rs) {
    for (const auto& r : rs) {
      u64(r.c);
      f64(r.value);
    }
  }
  void section(std::string_view name, std::uint64_t count) {
    str(name);
    u64(count);
  }

 private:
  std::ostream& os_;
};

class LeReader {
 public:
  explicit LeReader(std::istream& is) : is_(is) {}

  void raw(char* p, std::size_t n) {
    is_.read(p, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) fail(Errc::io_error, "truncated snapshot");
  }
  std::uint8_t u8() {
    char b = 0;
    raw(&b, 1);
    return static_cast<std::uint8_t>(b);
  }
  std::uint32_t u32() {
    unsigned char b[4];
    raw(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    raw(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  double f64() { return std::bit_cast<double>(u64()); }
  std::string str() {
    const auto n = u32();
    std::string s(n, '\0');
    if (n) raw(s.data(), n);
    return s;
  }
  std::vector<ColumnRecord> records(std::uint64_t n) {
    std::vector<ColumnRecord> out;
    out.reserve(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      const auto c = u64();
      out.push_back(ColumnRecord{c, f64()});
    }
    return out;
  }

 private:
  std::istream& is_;
};

inline Json record_to_json(const RecordEntry& r) {
  Json j = {{"c", r.c}, {"dsis", r.dsis}, {"group", r.group}};
  if (r.vl) j["vl"] = *r.vl;
  if (r.resource) j["resource"] = *r.resource;
  if (r.keycomment) j["keycomment"] = *r.keycomment;
  if (r.owner) j["owner"] = *r.owner;
  if (r.offered) j["offered"] = *r.offered;
  if (r.wanted) j["wanted"] = *r.wanted;
  return j;
}

inline RecordEntry record_from_json(const Json& j) {
  RecordEntry r;
  r.c = j.at("c").get<std::uint64_t>();
  r.dsis = j.at("dsis").get<std::vector<std::string>>();
  r.group = j.at("group").get<std::uint64_t>();
  if (j.contains("vl")) r.vl = j.at("vl").get<std::string>();
  if (j.contains("resource")) r.resource = j.at("resource").get<std::string>();
  if (j.contains("keycomment")) r.keycomment = j.at("keycomment").get<std::string>();
  if (j.contains("owner")) r.owner = j.at("owner").get<std::int64_t>();
  if (j.contains("offered")) r.offered = j.at("offered").get<bool>();
  if (j.contains("wanted")) r.wanted = j.at("wanted").get<bool>();
  return r;
}

}  // namespace detail

inline void write_snapshot(const IndexSnapshot& snap, std::ostream& os) {
  detail::LeWriter w(os);
  os.write(kSnapshotMagic, sizeof kSnapshotMagic);
  w.u32(static_cast<std::uint32_t>(snap.columns_.size()));
  for (const auto& col : snap.columns_) {
    w.str(col.url);
    w.u64(col.records.size());
    w.records(col.records);
  }

  std::uint32_t sections = 4;  // kinds, records, interns, meta
  for (const auto& col : snap.columns_) sections += col.sorted_index ? 1 : 0;
  sections += static_cast<std::uint32_t>(snap.postings_.size());
  w.u32(sections);

  w.section("kinds", snap.columns_.size());
  for (const auto& col : snap.columns_) w.u8(static_cast<std::uint8_t>(col.kind));

  for (const auto& col : snap.columns_) {
    if (!col.sorted_index) continue;
    w.section("sorted " + col.url, col.by_value.size());
    w.records(col.by_value);
  }

  w.section("records", snap.records_.size());
  for (const auto& r : snap.records_) {
    w.u64(r.c);
    w.str(detail::record_to_json(r).dump());
  }

  for (const auto& [column, words] : snap.postings_) {
    w.section("postings " + column, words.size());
    for (const auto& [word, cs] : words) {
      w.str(word);
      w.u64(cs.size());
      for (auto c : cs) w.u64(c);
    }
  }

  w.section("interns", snap.interns_.size());
  for (const auto& s : snap.interns_) w.str(s);

  Json defs = Json::array();
  for (const auto& d : snap.definitions_) defs.push_back(to_json(d));
  Json routes = Json::object();
  for (const auto& [url, r] : snap.same_as_.routes) routes[url] = Json{{"column", r.column}, {"a", r.a}, {"b", r.b}};
  const auto& rep = snap.report_;
  Json meta = {
      {"definitions", std::move(defs)},
      {"sameAs", std::move(routes)},
      {"options",
       {{"sortedIndex", snap.options_.sorted_index},
        {"postings", snap.options_.postings},
        {"depthLimit", snap.options_.depth_limit}}},
      {"report",
       {{"groups", rep.groups},
        {"accepted", rep.accepted},
        {"rejected", rep.rejected},
        {"records", rep.records},
        {"errors", rep.errors}}},
  };
  w.section("meta", 1);
  w.str(meta.dump());
  if (!os) fail(Errc::io_error, "snapshot write failed");
}

inline IndexSnapshot read_snapshot(std::istream& is) {
  detail::LeReader r(is);
  char magic[sizeof kSnapshotMagic];
  r.raw(magic, sizeof magic);
  if (std::memcmp(magic, kSnapshotMagic, sizeof magic) != 0) fail(Errc::io_error, "not a DSIX1 snapshot");
  IndexSnapshot snap;
  const auto ncols = r.u32();
  for (std::uint32_t i = 0; i < ncols; ++i) {
    Column col;
    col.url = r.str();
    col.records = r.records(r.u64());
    snap.columns_.push_back(std::move(col));
  }
  std::map<std::string, std::size_t> by_url;
  for (std::size_t i = 0; i < snap.columns_.size(); ++i) by_url.emplace(snap.columns_[i].url, i);

  const auto nsections = r.u32();
  for (std::uint32_t s = 0; s < nsections; ++s) {
    const auto name = r.str();
    const auto count = r.u64();
    if (name == "kinds") {
      if (count != snap.columns_.size()) fail(Errc::io_error, "kinds section size mismatch");
      for (auto& col : snap.columns_) col.kind = static_cast<LeafKind>(r.u8());
    } else if (name.starts_with("sorted ")) {
      auto it = by_url.find(name.substr(7));
      if (it == by_url.end()) fail(Errc::io_error, "sorted section for unknown column");
      auto& col = snap.columns_[it->second];
      col.by_value = r.records(count);
      col.sorted_index = true;
    } else if (name == "records") {
      for (std::uint64_t i = 0; i < count; ++i) {
        r.u64();
        snap.records_.push_back(detail::record_from_json(Json::parse(r.str())));
      }
    } else if (name.starts_with("postings ")) {
      auto& words = snap.postings_[name.substr(9)];
      for (std::uint64_t i = 0; i < count; ++i) {
        auto word = r.str();
        const auto n = r.u64();
        std::vector<std::uint64_t> cs(n);
        for (auto& c : cs) c = r.u64();
        words.emplace(std::move(word), std::move(cs));
      }
    } else if (name == "interns") {
      for (std::uint64_t i = 0; i < count; ++i) snap.interns_.push_back(r.str());
    } else if (name == "meta") {
      const auto meta = Json::parse(r.str());
      const auto& o = meta.at("options");
      snap.options_.sorted_index = o.at("sortedIndex").get<bool>();
      snap.options_.postings = o.at("postings").get<bool>();
      snap.options_.depth_limit = o.at("depthLimit").get<int>();
      const auto& rep = meta.at("report");
      snap.report_.groups = rep.at("groups").get<std::uint64_t>();
      snap.report_.accepted = rep.at("accepted").get<std::uint64_t>();
      snap.report_.rejected = rep.at("rejected").get<std::uint64_t>();
      snap.report_.records = rep.at("records").get<std::uint64_t>();
      snap.report_.errors = rep.at("errors").get<std::vector<std::string>>();
      for (const auto& [url, route] : meta.at("sameAs").items()) {
        snap.same_as_.routes[url] =
            ColumnRoute{route.at("column").get<std::string>(), route.at("a").get<double>(), route.at("b").get<double>()};
      }
      Registry registry;
      for (const auto& d : meta.at("definitions")) {
        auto def = ds_definition_from_json(d);
        snap.definitions_.push_back(def);
        registry.put(std::move(def));
      }
      snap.schemas_ = flatten_all(registry, snap.options_.depth_limit);
    } else {
      fail(Errc::io_error, "unknown snapshot section '" + name + "'");
    }
  }
  snap.finalize();
  return snap;
}

inline void save_snapshot(const IndexSnapshot& snap, const std::string& path) {
  const auto tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) fail(Errc::io_error, "cannot write " + tmp);
    write_snapshot(snap, os);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) fail(Errc::io_error, "cannot replace " + path);
}

inline IndexSnapshot load_snapshot(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) fail(Errc::no_snapshot, "no snapshot at " + path);
  return read_snapshot(is);
}

inline std::string snapshot_bytes(const IndexSnapshot& snap) {
  std::ostringstream os(std::ios::binary);
  write_snapshot(snap, os);
  return os.str();
}

}  // namespace dspace
