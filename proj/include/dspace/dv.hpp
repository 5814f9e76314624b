#pragma once

// Domain Vectors: the short "dsi; v1; v2; DI=v" grammar, the embedded
// "<v dsi; ...>text</v>" form, DV groups, and normalization against a
// flattened schema.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "dspace/error.hpp"
#include "dspace/registry.hpp"
#include "dspace/text.hpp"
#include "dspace/values.hpp"

namespace dspace {

/// Reference to another DV by URL (`u` prefix in the short grammar).
struct DvRef {
  std::string url;
  friend bool operator==(const DvRef&, const DvRef&) = default;
};

/// Canonical scalar for numeric, date, list and tux kinds; string for text.
using DimensionValue = std::variant<double, std::string, DvRef>;

struct DimensionInstance {
  DimensionPath path;
  DimensionValue value;
  std::optional<double> reliability;  // standard-deviation estimate
  friend bool operator==(const DimensionInstance&, const DimensionInstance&) = default;
};

struct DomainVector {
  std::string dsi;
  std::optional<std::string> vl;
  std::optional<std::string> resource;
  std::optional<Keycomment> keycomment;
  std::optional<std::int64_t> owner;
  std::optional<bool> offered;
  std::optional<bool> wanted;
  std::optional<double> date;  // DV-level date, epoch seconds
  std::vector<DimensionInstance> dims;
  std::optional<std::string> anchor;  // clickable text of the embedded form

  [[nodiscard]] const DimensionInstance* find(std::string_view path) const {
    for (const auto& d : dims) {
      if (d.path == path) return &d;
    }
    return nullptr;
  }
  friend bool operator==(const DomainVector&, const DomainVector&) = default;
};

/// DVs describing one resource; they share one record counter c.
struct DVGroup {
  std::vector<DomainVector> members;

  [[nodiscard]] std::optional<std::string> resource() const {
    for (const auto& m : members) {
      if (m.resource) return m.resource;
    }
    return std::nullopt;
  }
  friend bool operator==(const DVGroup&, const DVGroup&) = default;
};

using SchemaLookup = std::function<const FlatSchema*(std::string_view dsi)>;

enum class DvForm { short_form, embedded };

namespace detail {

/// Splits on ';' outside double quotes.
inline std::vector<std::string_view> split_fields(std::string_view s) {
  std::vector<std::string_view> out;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char ch = s[i];
    if (quoted && ch == '\\') {
      ++i;
    } else if (ch == '"') {
      quoted = !quoted;
    } else if (ch == ';' && !quoted) {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (quoted) fail(Errc::parse_error, "unterminated quoted text");
  out.push_back(s.substr(start));
  return out;
}

inline bool is_quoted(std::string_view s) { return s.size() >= 2 && s.front() == '"' && s.back() == '"'; }

inline std::string unquote(std::string_view s) {
  if (!is_quoted(s)) return text::nfc(s);
  std::string out;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    char ch = s[i];
    if (ch == '\\' && i + 2 < s.size()) {
      ch = s[++i];
      if (ch == 'n') ch = '\n';
    }
    out.push_back(ch);
  }
  return text::nfc(out);
}

inline std::string quote(std::string_view s) {
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"' || ch == '\\') out.push_back('\\');
    if (ch == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(ch);
  }
  out.push_back('"');
  return out;
}

inline bool is_tag_name(std::string_view s) {
  if (s.empty()) return false;
  return std::all_of(s.begin(), s.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '/';
  });
}

inline bool is_numeric_kind(LeafKind k) {
  return k == LeafKind::integer || k == LeafKind::money || k == LeafKind::float_medium ||
         k == LeafKind::float_max || k == LeafKind::date;
}

inline bool looks_like_date_shorthand(std::string_view raw) {
  if (raw.size() < 5 || raw.front() != 'd') return false;
  try {
    parse_civil(raw.substr(1));
    return true;
  } catch (const Error&) {
    return false;
  }
}

inline std::optional<bool> parse_flag(std::string_view v) {
  if (v == "1" || v == "true") return true;
  if (v == "0" || v == "false") return false;
  return std::nullopt;
}

/// Leaves that accept given values, in original order (computed leaves are
/// derived at ingest).
inline std::vector<std::size_t> positional_leaves(const FlatSchema& schema) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < schema.leaves.size(); ++i) {
    if (!schema.leaves[i].computed) out.push_back(i);
  }
  return out;
}

inline bool is_branch_path(const FlatSchema& schema, std::string_view path) {
  for (const auto& c : schema.cuts) {
    if (c.path == path) return true;
  }
  const std::string prefix = std::string(path) + "/";
  return std::any_of(schema.leaves.begin(), schema.leaves.end(),
                     [&](const FlatLeaf& l) { return l.path.starts_with(prefix); });
}

inline DimensionInstance parse_leaf_value(const FlatLeaf& leaf, std::string_view raw) {
  DimensionInstance inst;
  inst.path = leaf.path;
  const auto kind = leaf.content.kind;
  if (is_numeric_kind(kind) && !is_quoted(raw)) {
    if (const auto s = raw.rfind('s'); s != std::string_view::npos && s > 0) {
      if (auto r = text::parse_double(raw.substr(s + 1))) {
        if (*r < 0) fail(Errc::parse_error, "reliability must be >= 0 in '" + std::string(raw) + "'");
        inst.reliability = *r;
        raw = raw.substr(0, s);
      }
    }
  }
  if (!raw.empty() && raw.front() == 'u' && raw.find(':') != std::string_view::npos && !is_quoted(raw)) {
    fail(Errc::kind_mismatch, "DV reference given for leaf dimension " + leaf.path);
  }
  try {
    if (kind == LeafKind::text) {
      inst.value = unquote(raw);
    } else if (kind == LeafKind::list || kind == LeafKind::tux) {
      const auto label = unquote(raw);
      inst.value = encode_value(leaf.content, label);
    } else {
      if (is_quoted(raw)) fail(Errc::kind_mismatch, "quoted text given for " + std::string(leaf_kind_name(kind)));
      inst.value = encode_value(leaf.content, raw);
    }
  } catch (const Error& e) {
    if (e.code() == Errc::parse_error) {
      fail(Errc::kind_mismatch, leaf.path + " (" + std::string(leaf_kind_name(kind)) + "): " + e.what());
    }
    throw;
  }
  return inst;
}

inline void normalize(DomainVector& dv, const FlatSchema& schema) {
  auto order = [&](const DimensionInstance& d) -> std::pair<std::size_t, std::string> {
    if (auto i = schema.index_of(d.path)) return {*i, {}};
    return {schema.leaves.size(), d.path};
  };
  std::stable_sort(dv.dims.begin(), dv.dims.end(),
                   [&](const auto& a, const auto& b) { return order(a) < order(b); });
}

}  // namespace detail

/// Parses the short form, optionally wrapped as `<v ...>text</v>`.
inline DomainVector parse_dv(std::string_view input, const SchemaLookup& lookup) {
  std::string_view body = text::trim(input);
  DomainVector dv;
  if (body.starts_with("<v") && body.size() > 2 && std::isspace(static_cast<unsigned char>(body[2]))) {
    bool quoted = false;
    std::size_t gt = std::string_view::npos;
    for (std::size_t i = 2; i < body.size(); ++i) {
      if (quoted && body[i] == '\\') ++i;
      else if (body[i] == '"') quoted = !quoted;
      else if (body[i] == '>' && !quoted) {
        gt = i;
        break;
      }
    }
    if (gt == std::string_view::npos || !body.ends_with("</v>")) fail(Errc::parse_error, "malformed <v ...> element");
    dv.anchor = std::string(body.substr(gt + 1, body.size() - 4 - gt - 1));
    body = text::trim(body.substr(3, gt - 3));
  }

  const auto fields = detail::split_fields(body);
  dv.dsi = std::string(text::trim(fields.front()));
  if (dv.dsi.empty()) fail(Errc::parse_error, "DV without DSI");
  const FlatSchema* schema = lookup(dv.dsi);
  if (!schema) fail(Errc::unknown_dsi, "unknown DSI '" + dv.dsi + "'");

  const auto positional = detail::positional_leaves(*schema);
  std::size_t cursor = 0;
  std::vector<bool> bound(schema->leaves.size(), false);
  auto bind = [&](DimensionInstance inst) {
    if (dv.find(inst.path)) fail(Errc::invalid_argument, "dimension " + inst.path + " bound twice");
    dv.dims.push_back(std::move(inst));
  };

  for (std::size_t f = 1; f < fields.size(); ++f) {
    const std::string_view field = text::trim(fields[f]);
    if (field.empty()) {
      ++cursor;
      continue;
    }
    if (field.front() == '@') {
      const auto eq = field.find('=');
      if (eq == std::string_view::npos) fail(Errc::parse_error, "system field without '=': " + std::string(field));
      const auto name = field.substr(1, eq - 1);
      const auto value = text::trim(field.substr(eq + 1));
      if (name == "vl") dv.vl = detail::unquote(value);
      else if (name == "resource") dv.resource = detail::unquote(value);
      else if (name == "owner") {
        auto v = text::parse_double(value);
        if (!v || *v != std::trunc(*v)) fail(Errc::parse_error, "malformed owner '" + std::string(value) + "'");
        dv.owner = static_cast<std::int64_t>(*v);
      } else if (name == "o" || name == "w") {
        auto b = detail::parse_flag(value);
        if (!b) fail(Errc::parse_error, "flag must be 0 or 1: " + std::string(field));
        (name == "o" ? dv.offered : dv.wanted) = *b;
      } else if (name == "date") {
        auto v = value;
        if (!v.empty() && v.front() == 'd') v.remove_prefix(1);
        dv.date = static_cast<double>(parse_date(v));
      } else if (name == "kw") {
        if (!dv.keycomment) dv.keycomment = Keycomment{};
        dv.keycomment->keywords.push_back(Keyword{detail::unquote(value), std::nullopt});
      } else if (name == "link") {
        if (!dv.keycomment || dv.keycomment->keywords.empty()) fail(Errc::parse_error, "@link before any @kw");
        dv.keycomment->keywords.back().url = detail::unquote(value);
      } else if (name == "comment") {
        if (!dv.keycomment) dv.keycomment = Keycomment{};
        dv.keycomment->comment = detail::unquote(value);
      } else {
        fail(Errc::parse_error, "unknown system field '@" + std::string(name) + "'");
      }
      continue;
    }

    const auto eq = field.find('=');
    if (field.front() != '"' && eq != std::string_view::npos && detail::is_tag_name(field.substr(0, eq))) {
      const auto name = field.substr(0, eq);
      const auto raw = text::trim(field.substr(eq + 1));
      if (schema->index_of(name) == std::nullopt && detail::is_branch_path(*schema, name)) {
        if (raw.size() < 2 || raw.front() != 'u') fail(Errc::kind_mismatch, "branch " + std::string(name) + " needs a u<url> reference");
        bind(DimensionInstance{std::string(name), DvRef{std::string(raw.substr(1))}, std::nullopt});
        continue;
      }
      const auto i = schema->resolve(name);
      if (schema->leaves[i].computed) fail(Errc::kind_mismatch, "computed dimension " + schema->leaves[i].path + " cannot be given");
      bind(detail::parse_leaf_value(schema->leaves[i], raw));
      bound[i] = true;
      continue;
    }

    const FlatLeaf* target = cursor < positional.size() ? &schema->leaves[positional[cursor]] : nullptr;
    if (detail::looks_like_date_shorthand(field) &&
        !(target && (target->content.kind == LeafKind::date || target->content.kind == LeafKind::tux ||
                     target->content.kind == LeafKind::text))) {
      if (dv.date) fail(Errc::invalid_argument, "DV date given twice");
      dv.date = static_cast<double>(parse_date(field.substr(1)));
      continue;
    }
    if (!target) {
      fail(Errc::arity_overflow, "more values than the " + std::to_string(positional.size()) + " dimensions of " + dv.dsi);
    }
    bind(detail::parse_leaf_value(*target, field));
    ++cursor;
  }
  detail::normalize(dv, *schema);
  return dv;
}

inline DomainVector parse_dv(std::string_view input, const FlatSchema& schema) {
  return parse_dv(input, [&](std::string_view dsi) -> const FlatSchema* { return dsi == schema.dsi ? &schema : nullptr; });
}

/// Puts instances in original dimension order and checks their bindings.
inline DomainVector normalized(DomainVector dv, const FlatSchema& schema) {
  for (const auto& d : dv.dims) {
    if (!schema.index_of(d.path) && !detail::is_branch_path(schema, d.path)) {
      fail(Errc::unknown_dimension, "no dimension '" + d.path + "' in " + schema.dsi);
    }
  }
  detail::normalize(dv, schema);
  return dv;
}

namespace detail {

inline std::string format_instance_value(const FlatSchema& schema, const DimensionInstance& d) {
  if (const auto* ref = std::get_if<DvRef>(&d.value)) return "u" + ref->url;
  const auto& leaf = schema.leaves[*schema.index_of(d.path)];
  std::string out;
  if (const auto* s = std::get_if<std::string>(&d.value)) {
    out = quote(*s);
  } else {
    const double v = std::get<double>(d.value);
    out = decode_value(leaf.content, v);
    if (leaf.content.kind == LeafKind::list) out = quote(out);
  }
  if (d.reliability) out += "s" + text::format_double(*d.reliability);
  return out;
}

}  // namespace detail

/// Short form; values are positional when the defined dimensions form a
/// prefix of the original order, DI-tagged otherwise.
inline std::string serialize_dv(const DomainVector& dv, const FlatSchema& schema, DvForm form = DvForm::short_form) {
  std::string out = dv.dsi;
  auto field = [&](const std::string& f) {
    out += "; ";
    out += f;
  };
  if (dv.vl) field("@vl=" + detail::quote(*dv.vl));
  if (dv.resource) field("@resource=" + detail::quote(*dv.resource));
  if (dv.owner) field("@owner=" + std::to_string(*dv.owner));
  if (dv.offered) field(std::string("@o=") + (*dv.offered ? "1" : "0"));
  if (dv.wanted) field(std::string("@w=") + (*dv.wanted ? "1" : "0"));
  if (dv.date) {
    const auto secs = static_cast<std::int64_t>(*dv.date);
    field("@date=" + format_date(secs, secs % 86400 == 0 ? 3 : 6));
  }
  if (dv.keycomment) {
    for (const auto& k : dv.keycomment->keywords) {
      field("@kw=" + detail::quote(k.text));
      if (k.url) field("@link=" + detail::quote(*k.url));
    }
    if (!dv.keycomment->comment.empty()) field("@comment=" + detail::quote(dv.keycomment->comment));
  }

  const auto sorted = normalized(dv, schema);
  const auto positional = detail::positional_leaves(schema);
  bool prefix = sorted.dims.size() <= positional.size();
  for (std::size_t i = 0; prefix && i < sorted.dims.size(); ++i) {
    prefix = sorted.dims[i].path == schema.leaves[positional[i]].path;
  }
  for (const auto& d : sorted.dims) {
    const auto value = detail::format_instance_value(schema, d);
    if (prefix) {
      field(value);
    } else {
      const auto i = schema.index_of(d.path);
      field((i ? schema.short_name(*i) : d.path) + "=" + value);
    }
  }
  if (form == DvForm::embedded) return "<v " + out + ">" + dv.anchor.value_or("") + "</v>";
  return out;
}

/// A `<v ...>text</v>` span found in an arbitrary document.
struct EmbeddedSpan {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::string element;  // the full span, parseable by parse_dv
};

/// Finds every embedded DV in a document; surrounding markup is opaque.
inline std::vector<EmbeddedSpan> extract_embedded(std::string_view doc) {
  std::vector<EmbeddedSpan> out;
  std::size_t pos = 0;
  while ((pos = doc.find("<v", pos)) != std::string_view::npos) {
    if (pos + 2 >= doc.size() || !std::isspace(static_cast<unsigned char>(doc[pos + 2]))) {
      pos += 2;
      continue;
    }
    bool quoted = false;
    std::size_t gt = std::string_view::npos;
    for (std::size_t i = pos + 2; i < doc.size(); ++i) {
      if (quoted && doc[i] == '\\') ++i;
      else if (doc[i] == '"') quoted = !quoted;
      else if (doc[i] == '>' && !quoted) {
        gt = i;
        break;
      }
    }
    if (gt == std::string_view::npos) break;
    const auto close = doc.find("</v>", gt);
    if (close == std::string_view::npos) break;
    const auto len = close + 4 - pos;
    out.push_back(EmbeddedSpan{pos, len, std::string(doc.substr(pos, len))});
    pos = close + 4;
  }
  return out;
}

/// DV log: one group per block, first member on its own line, further
/// members on lines starting with "+".
inline std::vector<DVGroup> parse_dv_log(std::string_view log, const SchemaLookup& lookup) {
  std::vector<DVGroup> groups;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= log.size()) {
    auto end = log.find('\n', start);
    if (end == std::string_view::npos) end = log.size();
    ++line_no;
    const auto line = text::trim(log.substr(start, end - start));
    start = end + 1;
    if (line.empty() || line.front() == '#') {
      if (end == log.size()) break;
      continue;
    }
    try {
      if (line.front() == '+') {
        if (groups.empty()) fail(Errc::parse_error, "group continuation without a group");
        groups.back().members.push_back(parse_dv(line.substr(1), lookup));
      } else {
        groups.push_back(DVGroup{{parse_dv(line, lookup)}});
      }
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw Error(e.code(), "line " + std::to_string(line_no) + ": " + e.what());
    }
    if (end == log.size()) break;
  }
  return groups;
}

inline std::string serialize_dv_group(const DVGroup& g, const SchemaLookup& lookup) {
  std::string out;
  for (std::size_t i = 0; i < g.members.size(); ++i) {
    const auto* schema = lookup(g.members[i].dsi);
    if (!schema) fail(Errc::unknown_dsi, "unknown DSI '" + g.members[i].dsi + "'");
    if (i > 0) out += "+";
    out += serialize_dv(g.members[i], *schema);
    out += "\n";
  }
  return out;
}

}  // namespace dspace
