#pragma once

// RDF bridge: N-Triples in and out, and the mapping of triples to DVs.
// Every subject becomes one DV group (one c), every distinct predicate one
// text dimension of a generated space; a subject with several objects for a
// predicate fills replica dimensions of that predicate.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include "dspace/dv.hpp"
#include "dspace/error.hpp"
#include "dspace/schema.hpp"

namespace dspace {

struct Triple {
  std::string subject;
  std::string predicate;
  std::string object;

  friend bool operator==(const Triple&, const Triple&) = default;
  friend auto operator<=>(const Triple&, const Triple&) = default;
};

inline constexpr std::size_t kRdfChunkDims = 256;
inline constexpr std::string_view kReplicaPrefix = "replica:";

namespace detail {

// Reads one N-Triples term starting at pos; terms are kept verbatim.
inline std::string read_term(std::string_view line, std::size_t& pos, std::size_t line_no) {
  auto err = [&](const std::string& what) -> std::string {
    throw ParseError(what, line_no, pos + 1);
  };
  while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
  if (pos >= line.size()) return err("expected a term");
  const std::size_t start = pos;
  const char ch = line[pos];
  if (ch == '<') {
    const auto end = line.find('>', pos);
    if (end == std::string_view::npos) return err("unterminated IRI");
    pos = end + 1;
  } else if (ch == '_' && pos + 1 < line.size() && line[pos + 1] == ':') {
    while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
  } else if (ch == '"') {
    ++pos;
    while (pos < line.size() && line[pos] != '"') pos += line[pos] == '\\' ? 2 : 1;
    if (pos >= line.size()) return err("unterminated literal");
    ++pos;
    if (pos < line.size() && line[pos] == '@') {
      while (pos < line.size() && line[pos] != ' ' && line[pos] != '\t') ++pos;
    } else if (line.substr(pos).starts_with("^^<")) {
      const auto end = line.find('>', pos);
      if (end == std::string_view::npos) return err("unterminated datatype IRI");
      pos = end + 1;
    }
  } else {
    return err("unexpected character");
  }
  return std::string(line.substr(start, pos - start));
}

}  // namespace detail

inline std::vector<Triple> parse_ntriples(std::string_view doc) {
  std::vector<Triple> out;
  std::size_t line_no = 0, start = 0;
  while (start < doc.size()) {
    auto end = doc.find('\n', start);
    if (end == std::string_view::npos) end = doc.size();
    ++line_no;
    std::string_view line = doc.substr(start, end - start);
    start = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    std::size_t pos = static_cast<std::size_t>(body.data() - line.data());
    Triple t;
    t.subject = detail::read_term(line, pos, line_no);
    t.predicate = detail::read_term(line, pos, line_no);
    t.object = detail::read_term(line, pos, line_no);
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
    if (pos >= line.size() || line[pos] != '.') throw ParseError("expected ' .'", line_no, pos + 1);
    ++pos;
    const auto rest = text::trim(line.substr(pos));
    if (!rest.empty() && rest.front() != '#') throw ParseError("trailing characters", line_no, pos + 1);
    out.push_back(std::move(t));
  }
  return out;
}

inline std::string write_ntriples(std::span<const Triple> triples) {
  std::string out;
  for (const auto& t : triples) {
    out += t.subject;
    out += ' ';
    out += t.predicate;
    out += ' ';
    out += t.object;
    out += " .\n";
  }
  return out;
}

struct RdfMapping {
  std::vector<DomainSpaceDef> spaces;  // chunks of at most 256 dimensions
  std::vector<DVGroup> groups;         // one per subject, subjects ascending
};

/// Triples to generated spaces plus one DV group per subject. Duplicate
/// triples collapse.
inline RdfMapping triples_to_dvs(std::span<const Triple> triples, const std::string& base = "urn:dspace:rdf") {
  for (const auto& t : triples) {
    if (t.subject.empty() || t.predicate.empty()) fail(Errc::invalid_argument, "triple with empty subject or predicate");
  }
  const std::set<Triple> unique(triples.begin(), triples.end());

  // replicas needed per predicate = max objects per (subject, predicate)
  std::map<std::string, std::size_t> replicas;
  {
    std::map<std::pair<std::string, std::string>, std::size_t> counts;
    for (const auto& t : unique) ++counts[{t.subject, t.predicate}];
    for (const auto& [sp, n] : counts) replicas[sp.second] = std::max(replicas[sp.second], n);
  }

  struct Slot {
    std::size_t chunk;
    std::string di;
  };
  std::map<std::pair<std::string, std::size_t>, Slot> slots;  // (predicate, replica 1-based)
  RdfMapping out;
  std::size_t n = 0;
  for (const auto& [pred, count] : replicas) {
    for (std::size_t m = 1; m <= count; ++m, ++n) {
      const auto chunk = n / kRdfChunkDims;
      if (chunk == out.spaces.size()) {
        DomainSpaceDef def;
        def.dsi = base + "/" + std::to_string(chunk);
        def.pair.fixed.keywords.push_back(Keyword{"rdf-predicates", std::nullopt});
        def.pair.fixed.comment = "Generated from RDF triples";
        out.spaces.push_back(std::move(def));
        if (chunk > 0) out.spaces[chunk - 1].extra["next"] = out.spaces[chunk].dsi;
      }
      DimensionDef d;
      d.di = "p" + std::to_string(n);
      d.pair.fixed.keywords.push_back(Keyword{pred, std::nullopt});
      d.pair.fixed.keywords.push_back(Keyword{std::string(kReplicaPrefix) + std::to_string(m), std::nullopt});
      LeafContent leaf;
      leaf.kind = LeafKind::text;
      d.content = leaf;
      slots.emplace(std::pair{pred, m}, Slot{chunk, d.di});
      out.spaces[chunk].dimensions.push_back(std::move(d));
    }
  }

  auto it = unique.begin();
  while (it != unique.end()) {
    const auto& subject = it->subject;
    DVGroup group;
    std::map<std::size_t, std::size_t> member_of_chunk;
    std::string pred;
    std::size_t m = 0;
    for (; it != unique.end() && it->subject == subject; ++it) {
      m = it->predicate == pred ? m + 1 : 1;
      pred = it->predicate;
      const auto& slot = slots.at({pred, m});
      auto [mit, fresh] = member_of_chunk.try_emplace(slot.chunk, group.members.size());
      if (fresh) {
        DomainVector dv;
        dv.dsi = out.spaces[slot.chunk].dsi;
        dv.resource = subject;
        group.members.push_back(std::move(dv));
      }
      group.members[mit->second].dims.push_back(DimensionInstance{slot.di, it->object, std::nullopt});
    }
    std::sort(group.members.begin(), group.members.end(),
              [](const DomainVector& a, const DomainVector& b) { return a.dsi < b.dsi; });
    out.groups.push_back(std::move(group));
  }
  return out;
}

/// Inverse of triples_to_dvs. Throws Errc::not_bridge_generated for spaces
/// lacking the predicate/replica keywords.
inline std::vector<Triple> dvs_to_triples(std::span<const DomainSpaceDef> spaces, std::span<const DVGroup> groups) {
  std::map<std::string, std::map<std::string, std::string>> predicate_of;  // dsi -> di -> predicate
  for (const auto& s : spaces) {
    auto& dims = predicate_of[s.dsi];
    for (const auto& d : s.dimensions) {
      const auto& kws = d.pair.fixed.keywords;
      const auto* leaf = d.leaf();
      if (kws.size() != 2 || !kws[1].text.starts_with(kReplicaPrefix) || !leaf || leaf->kind != LeafKind::text) {
        fail(Errc::not_bridge_generated, "dimension " + dimension_url(s.dsi, d.di) + " was not generated from RDF");
      }
      dims.emplace(d.di, kws[0].text);
    }
  }
  std::vector<Triple> out;
  for (const auto& g : groups) {
    for (const auto& dv : g.members) {
      auto sp = predicate_of.find(dv.dsi);
      if (sp == predicate_of.end()) fail(Errc::not_bridge_generated, "DV of unknown space " + dv.dsi);
      if (!dv.resource) fail(Errc::not_bridge_generated, "DV without subject resource");
      for (const auto& inst : dv.dims) {
        auto p = sp->second.find(inst.path);
        const auto* obj = std::get_if<std::string>(&inst.value);
        if (p == sp->second.end() || !obj) fail(Errc::not_bridge_generated, "unexpected dimension " + inst.path);
        out.push_back(Triple{*dv.resource, p->second, *obj});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dspace
