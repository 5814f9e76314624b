#pragma once

// Domain Space definitions: types, the JSON document format (canonical
// serialization is bit-stable), structural validation and the fixed-part
// checksum.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "dspace/error.hpp"
#include "dspace/expr.hpp"
#include "dspace/metric.hpp"
#include "dspace/text.hpp"

namespace dspace {

using Json = nlohmann::json;

struct Keyword {
  std::string text;
  std::optional<std::string> url;
  friend bool operator==(const Keyword&, const Keyword&) = default;
};

struct Keycomment {
  std::vector<Keyword> keywords;
  std::string comment;

  [[nodiscard]] std::string kw0() const { return keywords.empty() ? std::string{} : keywords.front().text; }
  friend bool operator==(const Keycomment&, const Keycomment&) = default;
};

enum class PairState { draft, ok, deprecated };

struct KeycommentPair {
  Keycomment fixed;
  Keycomment changeable;
  PairState state = PairState::draft;
  friend bool operator==(const KeycommentPair&, const KeycommentPair&) = default;
};

/// "this = a * target + b". A general algebraic expression is kept verbatim
/// in `expr` and not resolved.
struct SameAs {
  double a = 1.0;
  double b = 0.0;
  std::string url;
  std::optional<std::string> expr;
  friend bool operator==(const SameAs&, const SameAs&) = default;
};

enum class LeafKind { integer, money, float_medium, float_max, date, list, tux, text };

struct Interval {
  std::string label;
  std::optional<double> lower;
  std::optional<double> upper;
  friend bool operator==(const Interval&, const Interval&) = default;
};

struct LeafContent {
  LeafKind kind = LeafKind::float_max;
  std::optional<double> min;
  std::optional<double> max;
  std::vector<std::string> items;     // list labels (index mode)
  std::vector<Interval> intervals;    // list labels with borders
  bool interval_mode = false;         // list scalar = interval mean instead of index
  std::optional<std::string> date_format;
  Json extra = Json::object();

  /// Labels of a list dimension in order.
  [[nodiscard]] std::vector<std::string> labels() const {
    if (!intervals.empty()) {
      std::vector<std::string> out;
      for (const auto& iv : intervals) out.push_back(iv.label);
      return out;
    }
    return items;
  }
  friend bool operator==(const LeafContent&, const LeafContent&) = default;
};

struct BranchContent {
  std::string dsi;
  friend bool operator==(const BranchContent&, const BranchContent&) = default;
};
struct ExternalContent {
  std::string url;
  friend bool operator==(const ExternalContent&, const ExternalContent&) = default;
};
struct ComputedContent {
  std::string expr;
  friend bool operator==(const ComputedContent&, const ComputedContent&) = default;
};

using DimensionContent = std::variant<LeafContent, BranchContent, ExternalContent, ComputedContent>;

struct DimensionDef {
  std::string di;
  std::optional<std::int64_t> rank;
  std::optional<SameAs> same_as;
  KeycommentPair pair;
  double weight = 1.0;
  DimensionContent content;
  Json extra = Json::object();

  [[nodiscard]] const LeafContent* leaf() const { return std::get_if<LeafContent>(&content); }
  [[nodiscard]] const BranchContent* branch() const { return std::get_if<BranchContent>(&content); }
  friend bool operator==(const DimensionDef&, const DimensionDef&) = default;
};

enum class MetricKind { minkowski, geodesic };

struct MetricSpec {
  MetricKind kind = MetricKind::minkowski;
  Order order;
  friend bool operator==(const MetricSpec&, const MetricSpec&) = default;
};

struct DomainSpaceDef {
  std::string dsi;
  std::optional<SameAs> same_as;
  KeycommentPair pair;
  std::int64_t owner = 0;
  std::optional<MetricSpec> metric;  // absent: Manhattan
  std::vector<std::string> attributes;
  std::optional<KeycommentPair> relation;
  std::vector<DimensionDef> dimensions;
  Json extra = Json::object();

  [[nodiscard]] MetricSpec effective_metric() const { return metric.value_or(MetricSpec{}); }

  [[nodiscard]] const DimensionDef* find(std::string_view di) const {
    for (const auto& d : dimensions) {
      if (d.di == di) return &d;
    }
    return nullptr;
  }
  friend bool operator==(const DomainSpaceDef&, const DomainSpaceDef&) = default;
};

/// Dimension URL: DSI + "#" + DI (or a nested leaf path).
inline std::string dimension_url(std::string_view dsi, std::string_view di) {
  std::string out(dsi);
  out += '#';
  out += di;
  return out;
}

// ---------------------------------------------------------------------------
// names

inline std::string_view leaf_kind_name(LeafKind k) {
  switch (k) {
    case LeafKind::integer: return "integer";
    case LeafKind::money: return "money";
    case LeafKind::float_medium: return "float-medium";
    case LeafKind::float_max: return "float-max";
    case LeafKind::date: return "date";
    case LeafKind::list: return "list";
    case LeafKind::tux: return "tux";
    case LeafKind::text: return "text";
  }
  return "float-max";
}

inline std::optional<LeafKind> parse_leaf_kind(std::string_view s) {
  for (auto k : {LeafKind::integer, LeafKind::money, LeafKind::float_medium, LeafKind::float_max,
                 LeafKind::date, LeafKind::list, LeafKind::tux, LeafKind::text}) {
    if (leaf_kind_name(k) == s) return k;
  }
  return std::nullopt;
}

/// Kinds compared with the discrete metric rather than |x - y|.
inline Comparison comparison_for(LeafKind k) {
  return (k == LeafKind::text || k == LeafKind::tux) ? Comparison::discrete : Comparison::numeric;
}

inline std::string_view pair_state_name(PairState s) {
  switch (s) {
    case PairState::draft: return "draft";
    case PairState::ok: return "ok";
    case PairState::deprecated: return "deprecated";
  }
  return "draft";
}

inline const std::vector<std::string>& date_formats() {
  static const std::vector<std::string> kFormats = {
      "yyyy-mm-dd hh:mm:ss", "yyyy-mm-dd hh:mm", "yyyy-mm-dd hh", "yyyy-mm-dd",
      "yyyy-mm",             "yyyy",             "hh:mm:ss",      "hh:mm"};
  return kFormats;
}

inline std::string metric_string(const MetricSpec& m) {
  if (m.kind == MetricKind::geodesic) return "GPS";
  if (m.order.is_infinite()) return "Minf";
  return "M" + text::format_double(m.order.value());
}

inline std::optional<MetricSpec> parse_metric_string(std::string_view s) {
  if (s == "GPS") return MetricSpec{MetricKind::geodesic, Order{}};
  if (s.size() < 2 || s.front() != 'M') return std::nullopt;
  const auto rest = s.substr(1);
  if (rest == "inf") return MetricSpec{MetricKind::minkowski, Order::infinity()};
  if (rest.front() == '+' || rest.front() == '-') return std::nullopt;
  auto k = text::parse_double(rest);
  if (!k || *k < 1.0 || text::format_double(*k) != rest) return std::nullopt;
  return MetricSpec{MetricKind::minkowski, Order{*k}};
}

inline bool valid_di(std::string_view di) {
  if (di.empty()) return false;
  return std::all_of(di.begin(), di.end(), [](char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  });
}

// ---------------------------------------------------------------------------
// JSON -> types

namespace detail {

struct JsonReader {
  std::string where;

  [[noreturn]] void error(const std::string& what) const { fail(Errc::parse_error, where + ": " + what); }

  const Json& require(const Json& obj, std::string_view key) const {
    if (!obj.is_object()) error("expected an object");
    auto it = obj.find(key);
    if (it == obj.end()) error("missing field '" + std::string(key) + "'");
    return *it;
  }
  std::string string_at(const Json& obj, std::string_view key) const {
    const Json& v = require(obj, key);
    if (!v.is_string()) error("field '" + std::string(key) + "' must be a string");
    return text::nfc(v.get<std::string>());
  }
  std::optional<std::string> opt_string(const Json& obj, std::string_view key) const {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_string()) error("field '" + std::string(key) + "' must be a string");
    return text::nfc(it->get<std::string>());
  }
  double number_at(const Json& obj, std::string_view key) const {
    const Json& v = require(obj, key);
    if (!v.is_number()) error("field '" + std::string(key) + "' must be a number");
    return v.get<double>();
  }
  std::optional<double> opt_number(const Json& obj, std::string_view key) const {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) error("field '" + std::string(key) + "' must be a number");
    return it->get<double>();
  }
  std::optional<std::int64_t> opt_integer(const Json& obj, std::string_view key) const {
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) return std::nullopt;
    if (!it->is_number_integer()) error("field '" + std::string(key) + "' must be an integer");
    return it->get<std::int64_t>();
  }
  const Json& array_at(const Json& obj, std::string_view key) const {
    const Json& v = require(obj, key);
    if (!v.is_array()) error("field '" + std::string(key) + "' must be an array");
    return v;
  }
};

inline Json unknown_fields(const Json& obj, std::initializer_list<std::string_view> known) {
  Json extra = Json::object();
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (std::find(known.begin(), known.end(), it.key()) == known.end()) extra[it.key()] = it.value();
  }
  return extra;
}

inline Keycomment keycomment_from_json(const Json& j, const JsonReader& r) {
  Keycomment kc;
  for (const auto& kw : r.array_at(j, "keywords")) {
    Keyword k;
    k.text = r.string_at(kw, "text");
    k.url = r.opt_string(kw, "url");
    kc.keywords.push_back(std::move(k));
  }
  kc.comment = r.opt_string(j, "comment").value_or("");
  return kc;
}

inline KeycommentPair pair_from_json(const Json& j, const JsonReader& r) {
  KeycommentPair p;
  p.fixed = keycomment_from_json(r.require(j, "fixed"), JsonReader{r.where + ".fixed"});
  if (j.contains("changeable")) {
    p.changeable = keycomment_from_json(j.at("changeable"), JsonReader{r.where + ".changeable"});
  }
  const auto state = r.opt_string(j, "state").value_or("draft");
  if (state == "draft") p.state = PairState::draft;
  else if (state == "ok") p.state = PairState::ok;
  else if (state == "deprecated") p.state = PairState::deprecated;
  else r.error("unknown pair state '" + state + "'");
  return p;
}

inline SameAs same_as_from_json(const Json& j, const JsonReader& r) {
  SameAs s;
  if (auto e = r.opt_string(j, "expr")) {
    s.expr = *e;
    s.url = r.opt_string(j, "url").value_or("");
    return s;
  }
  s.url = r.string_at(j, "url");
  s.a = r.opt_number(j, "a").value_or(1.0);
  s.b = r.opt_number(j, "b").value_or(0.0);
  return s;
}

inline LeafContent leaf_from_json(const Json& j, const JsonReader& r) {
  LeafContent leaf;
  const auto kind = r.string_at(j, "kind");
  auto k = parse_leaf_kind(kind);
  if (!k) r.error("unknown leaf kind '" + kind + "'");
  leaf.kind = *k;
  leaf.min = r.opt_number(j, "min");
  leaf.max = r.opt_number(j, "max");
  if (j.contains("items")) {
    for (const auto& it : r.array_at(j, "items")) {
      if (!it.is_string()) r.error("list items must be strings");
      leaf.items.push_back(text::nfc(it.get<std::string>()));
    }
  }
  if (j.contains("intervals")) {
    for (const auto& iv : r.array_at(j, "intervals")) {
      Interval x;
      x.label = r.string_at(iv, "label");
      x.lower = r.opt_number(iv, "lower");
      x.upper = r.opt_number(iv, "upper");
      leaf.intervals.push_back(std::move(x));
    }
  }
  if (auto mode = r.opt_string(j, "listMode")) {
    if (*mode == "interval") leaf.interval_mode = true;
    else if (*mode != "index") r.error("listMode must be 'index' or 'interval'");
  }
  leaf.date_format = r.opt_string(j, "dateFormat");
  leaf.extra = unknown_fields(j, {"kind", "min", "max", "items", "intervals", "listMode", "dateFormat"});
  return leaf;
}

inline DimensionDef dimension_from_json(const Json& j, const JsonReader& r) {
  DimensionDef d;
  d.di = r.string_at(j, "di");
  JsonReader rr{r.where + "[" + d.di + "]"};
  d.rank = rr.opt_integer(j, "rank");
  if (j.contains("sameAs") && !j.at("sameAs").is_null()) d.same_as = same_as_from_json(j.at("sameAs"), rr);
  d.pair = pair_from_json(rr.require(j, "pair"), JsonReader{rr.where + ".pair"});
  d.weight = rr.opt_number(j, "weight").value_or(1.0);
  const Json& content = rr.require(j, "content");
  if (!content.is_object() || content.size() != 1) {
    rr.error("content must hold exactly one of leaf, branch, external, computed");
  }
  if (content.contains("leaf")) {
    d.content = leaf_from_json(content.at("leaf"), JsonReader{rr.where + ".leaf"});
  } else if (content.contains("branch")) {
    d.content = BranchContent{rr.string_at(content.at("branch"), "dsi")};
  } else if (content.contains("external")) {
    d.content = ExternalContent{rr.string_at(content.at("external"), "url")};
  } else if (content.contains("computed")) {
    d.content = ComputedContent{rr.string_at(content.at("computed"), "expr")};
  } else {
    rr.error("unknown content variant");
  }
  d.extra = unknown_fields(j, {"di", "rank", "sameAs", "pair", "weight", "content"});
  return d;
}

// types -> JSON

inline Json to_json(const Keycomment& kc) {
  Json kws = Json::array();
  for (const auto& k : kc.keywords) {
    Json o = {{"text", k.text}};
    if (k.url) o["url"] = *k.url;
    kws.push_back(std::move(o));
  }
  return Json{{"keywords", std::move(kws)}, {"comment", kc.comment}};
}

inline Json to_json(const KeycommentPair& p) {
  return Json{{"fixed", to_json(p.fixed)}, {"changeable", to_json(p.changeable)},
              {"state", std::string(pair_state_name(p.state))}};
}

inline Json to_json(const SameAs& s) {
  if (s.expr) {
    Json o = {{"expr", *s.expr}};
    if (!s.url.empty()) o["url"] = s.url;
    return o;
  }
  return Json{{"a", s.a}, {"b", s.b}, {"url", s.url}};
}

inline Json to_json(const LeafContent& l) {
  Json o = l.extra;
  o["kind"] = std::string(leaf_kind_name(l.kind));
  if (l.min) o["min"] = *l.min;
  if (l.max) o["max"] = *l.max;
  if (!l.items.empty()) o["items"] = l.items;
  if (!l.intervals.empty()) {
    Json arr = Json::array();
    for (const auto& iv : l.intervals) {
      Json x = {{"label", iv.label}};
      if (iv.lower) x["lower"] = *iv.lower;
      if (iv.upper) x["upper"] = *iv.upper;
      arr.push_back(std::move(x));
    }
    o["intervals"] = std::move(arr);
  }
  if (l.kind == LeafKind::list) o["listMode"] = l.interval_mode ? "interval" : "index";
  if (l.date_format) o["dateFormat"] = *l.date_format;
  return o;
}

inline Json to_json(const DimensionContent& c) {
  return std::visit(
      [](const auto& v) -> Json {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, LeafContent>) return Json{{"leaf", to_json(v)}};
        else if constexpr (std::is_same_v<T, BranchContent>) return Json{{"branch", {{"dsi", v.dsi}}}};
        else if constexpr (std::is_same_v<T, ExternalContent>) return Json{{"external", {{"url", v.url}}}};
        else return Json{{"computed", {{"expr", v.expr}}}};
      },
      c);
}

inline Json to_json(const DimensionDef& d) {
  Json o = d.extra;
  o["di"] = d.di;
  if (d.rank) o["rank"] = *d.rank;
  if (d.same_as) o["sameAs"] = to_json(*d.same_as);
  o["pair"] = to_json(d.pair);
  o["weight"] = d.weight;
  o["content"] = to_json(d.content);
  return o;
}

}  // namespace detail

inline Json to_json(const DomainSpaceDef& def) {
  Json o = def.extra;
  o["dsi"] = def.dsi;
  if (def.same_as) o["sameAs"] = detail::to_json(*def.same_as);
  o["pair"] = detail::to_json(def.pair);
  o["owner"] = def.owner;
  if (def.metric) o["metric"] = metric_string(*def.metric);
  o["attributes"] = def.attributes;
  if (def.relation) o["relation"] = detail::to_json(*def.relation);
  Json dims = Json::array();
  for (const auto& d : def.dimensions) dims.push_back(detail::to_json(d));
  o["dimensions"] = std::move(dims);
  return o;
}

/// Canonical text: sorted keys, original array order, UTF-8, 2-space indent,
/// LF newlines, trailing newline.
inline std::string canonical_dump(const Json& j) { return j.dump(2, ' ', false) + "\n"; }

// ---------------------------------------------------------------------------
// validation

namespace detail {

inline void validate_keycomment(const Keycomment& kc, const std::string& where, bool mandatory) {
  if (mandatory && (kc.keywords.empty() || kc.keywords.front().text.empty())) {
    fail(Errc::invalid_argument, where + ": keycomment needs a non-empty first keyword");
  }
}

inline void validate_leaf(const LeafContent& l, const std::string& where) {
  if (l.min && l.max && *l.min > *l.max) fail(Errc::invalid_argument, where + ": min > max");
  if (l.kind == LeafKind::date) {
    const auto& f = date_formats();
    if (l.date_format && std::find(f.begin(), f.end(), *l.date_format) == f.end()) {
      fail(Errc::invalid_argument, where + ": unknown date format '" + *l.date_format + "'");
    }
  }
  if (l.kind == LeafKind::list) {
    if (l.items.empty() && l.intervals.empty()) {
      fail(Errc::invalid_interval, where + ": list dimension needs items or intervals");
    }
    if (!l.items.empty() && !l.intervals.empty() && l.items != l.labels()) {
      fail(Errc::invalid_interval, where + ": items and interval labels disagree");
    }
    auto labels = l.labels();
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() != labels.size()) fail(Errc::invalid_interval, where + ": duplicate list label");
    if (l.interval_mode && l.intervals.empty()) {
      fail(Errc::invalid_interval, where + ": interval mode needs an interval table");
    }
    std::optional<double> prev_upper;
    for (std::size_t i = 0; i < l.intervals.size(); ++i) {
      const auto& iv = l.intervals[i];
      const bool first = i == 0;
      const bool last = i + 1 == l.intervals.size();
      const auto lower = iv.lower ? iv.lower : prev_upper;
      if (!lower && !first) fail(Errc::invalid_interval, where + ": only the first interval may lack a lower border");
      if (!iv.upper && !last) fail(Errc::invalid_interval, where + ": only the last interval may lack an upper border");
      if (!lower && !iv.upper) fail(Errc::invalid_interval, where + ": interval '" + iv.label + "' has no border");
      if (lower && iv.upper && *lower > *iv.upper) {
        fail(Errc::invalid_interval, where + ": interval '" + iv.label + "' has decreasing borders");
      }
      if (prev_upper && lower && *lower < *prev_upper) {
        fail(Errc::invalid_interval, where + ": intervals overlap at '" + iv.label + "'");
      }
      prev_upper = iv.upper;
    }
  } else if (!l.items.empty() || !l.intervals.empty()) {
    fail(Errc::invalid_interval, where + ": items/intervals are only valid on list dimensions");
  }
}

}  // namespace detail

/// Structural validation of one definition (no cross-definition checks).
inline void validate(const DomainSpaceDef& def) {
  if (def.dsi.empty()) fail(Errc::invalid_argument, "definition has an empty dsi");
  detail::validate_keycomment(def.pair.fixed, def.dsi, true);
  if (def.relation) detail::validate_keycomment(def.relation->fixed, def.dsi + " relation", true);
  for (const auto& a : def.attributes) {
    if (a != "c" && a != "f" && a != "n") fail(Errc::invalid_argument, "unknown attribute '" + a + "'");
  }
  if (def.same_as && !def.same_as->expr && def.same_as->a == 0.0) {
    fail(Errc::invalid_argument, def.dsi + ": sameAs factor must be nonzero");
  }
  std::set<std::string> seen;
  for (const auto& d : def.dimensions) {
    const std::string where = def.dsi + "#" + d.di;
    if (!valid_di(d.di)) fail(Errc::invalid_argument, where + ": DI must match [A-Za-z0-9_-]+");
    if (!seen.insert(d.di).second) fail(Errc::duplicate_di, "duplicate DI '" + d.di + "' in " + def.dsi);
    if (!(d.weight > 0.0) || !std::isfinite(d.weight)) {
      fail(Errc::invalid_weight, where + ": weight must be > 0");
    }
    detail::validate_keycomment(d.pair.fixed, where, true);
    if (d.same_as && !d.same_as->expr && d.same_as->a == 0.0) {
      fail(Errc::invalid_argument, where + ": sameAs factor must be nonzero");
    }
    if (const auto* leaf = d.leaf()) detail::validate_leaf(*leaf, where);
    if (const auto* comp = std::get_if<ComputedContent>(&d.content)) {
      const auto expr = Expression::parse(comp->expr);
      for (const auto& id : expr.identifiers()) {
        const auto* sib = def.find(id);
        if (!sib || id == d.di) fail(Errc::invalid_argument, where + ": unknown sibling '" + id + "' in expression");
      }
    }
  }
  if (def.metric && def.metric->kind == MetricKind::geodesic) {
    std::size_t numeric = 0;
    for (const auto& d : def.dimensions) {
      if (d.leaf() && comparison_for(d.leaf()->kind) == Comparison::numeric) ++numeric;
    }
    if (numeric < 2) fail(Errc::invalid_argument, def.dsi + ": GPS metric needs (lat, lon) leaf dimensions");
  }
}

/// Builds a definition from a parsed JSON value and validates it.
inline DomainSpaceDef ds_definition_from_json(const Json& j) {
  detail::JsonReader r{"definition"};
  if (!j.is_object()) r.error("expected a JSON object");
  DomainSpaceDef def;
  def.dsi = r.string_at(j, "dsi");
  r.where = def.dsi;
  if (j.contains("sameAs") && !j.at("sameAs").is_null()) def.same_as = detail::same_as_from_json(j.at("sameAs"), r);
  def.pair = detail::pair_from_json(r.require(j, "pair"), detail::JsonReader{def.dsi + ".pair"});
  def.owner = r.opt_integer(j, "owner").value_or(0);
  if (auto m = r.opt_string(j, "metric")) {
    def.metric = parse_metric_string(*m);
    if (!def.metric) r.error("unknown metric '" + *m + "'");
  }
  if (j.contains("attributes")) {
    for (const auto& a : r.array_at(j, "attributes")) {
      if (!a.is_string()) r.error("attributes must be strings");
      def.attributes.push_back(a.get<std::string>());
    }
  }
  if (j.contains("relation") && !j.at("relation").is_null()) {
    def.relation = detail::pair_from_json(j.at("relation"), detail::JsonReader{def.dsi + ".relation"});
  }
  for (const auto& d : r.array_at(j, "dimensions")) {
    def.dimensions.push_back(detail::dimension_from_json(d, detail::JsonReader{def.dsi}));
  }
  def.extra = detail::unknown_fields(
      j, {"dsi", "sameAs", "pair", "owner", "metric", "attributes", "relation", "dimensions"});
  validate(def);
  return def;
}

/// Parses a definition document. Syntax errors carry line/column.
inline DomainSpaceDef parse_ds_definition(std::string_view document) {
  Json j;
  try {
    j = Json::parse(document);
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, document.size());
    for (std::size_t i = 0; i < end; ++i) {
      if (document[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    if (auto p = msg.find("syntax error"); p != std::string::npos) msg = msg.substr(p);
    throw ParseError(msg, line, col);
  }
  return ds_definition_from_json(j);
}

inline std::string serialize_ds_definition(const DomainSpaceDef& def) { return canonical_dump(to_json(def)); }

/// SHA-256 over the canonical form of the fixed parts: fixed keycomments,
/// metric string, attributes and the original dimension order and contents.
/// `dimension_prefix` restricts the dimension list to its first n entries.
inline std::string fixed_part_checksum(const DomainSpaceDef& def,
                                       std::optional<std::size_t> dimension_prefix = std::nullopt) {
  Json dims = Json::array();
  const std::size_t n = std::min(def.dimensions.size(), dimension_prefix.value_or(def.dimensions.size()));
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = def.dimensions[i];
    dims.push_back(Json{{"di", d.di}, {"content", detail::to_json(d.content)}, {"fixed", detail::to_json(d.pair.fixed)}});
  }
  Json fixed = {
      {"dsi", def.dsi},
      {"fixed", detail::to_json(def.pair.fixed)},
      {"metric", metric_string(def.effective_metric())},
      {"attributes", def.attributes},
      {"relation", def.relation ? detail::to_json(def.relation->fixed) : Json(nullptr)},
      {"dimensions", std::move(dims)},
  };
  return text::sha256_hex(canonical_dump(fixed));
}

}  // namespace dspace
