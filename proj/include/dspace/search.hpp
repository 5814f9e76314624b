#pragma once

// Two-step Numeric Search: prefix search over the first keywords of the
// registered spaces, then similarity/range search of one space's DVs over
// the synchronized index, with statistics and scatter data.

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "dspace/index.hpp"
#include "dspace/metric.hpp"
#include "dspace/registry.hpp"
#include "dspace/values.hpp"

namespace dspace {

inline constexpr std::size_t kMaxPcnt = 1000;

/// Search count s per space and access count a per record; monotone.
class Counters {
 public:
  void count_search(const std::string& dsi) {
    std::lock_guard lock(mu_);
    ++searches_[dsi];
  }
  std::uint64_t touch(std::uint64_t c) {
    std::lock_guard lock(mu_);
    return ++access_[c];
  }
  [[nodiscard]] std::uint64_t searches(const std::string& dsi) const {
    std::lock_guard lock(mu_);
    auto it = searches_.find(dsi);
    return it == searches_.end() ? 0 : it->second;
  }
  [[nodiscard]] std::uint64_t access(std::uint64_t c) const {
    std::lock_guard lock(mu_);
    auto it = access_.find(c);
    return it == access_.end() ? 0 : it->second;
  }

  [[nodiscard]] Json to_json() const {
    std::lock_guard lock(mu_);
    Json a = Json::object();
    for (const auto& [c, n] : access_) a[std::to_string(c)] = n;
    return Json{{"searches", searches_}, {"access", std::move(a)}};
  }

  void load(const Json& j) {
    std::lock_guard lock(mu_);
    searches_ = j.value("searches", std::map<std::string, std::uint64_t>{});
    access_.clear();
    if (j.contains("access")) {
      for (const auto& [k, v] : j.at("access").items()) access_[std::stoull(k)] = v.get<std::uint64_t>();
    }
  }

 private:
  mutable std::mutex mu_;
  std::map<std::string, std::uint64_t> searches_;
  std::map<std::uint64_t, std::uint64_t> access_;
};

// ---------------------------------------------------------------------------
// step 1: spaces

struct DsHit {
  std::string dsi;
  std::string kw0;
  std::uint64_t s = 0;  // search count
  std::uint64_t r = 0;  // resource count
};

/// Case-insensitive prefix match of `query` against each space's first
/// keyword, ranked by resource count (descending), then DSI.
inline std::vector<DsHit> find_ds(std::string_view query, const Registry& registry,
                                  const IndexSnapshot* snap = nullptr, const Counters* counters = nullptr) {
  const auto q = text::nfc(text::trim(query));
  std::vector<DsHit> out;
  for (const auto& def : registry.all()) {
    const auto kw0 = def->pair.fixed.kw0();
    if (!text::starts_with_icase(kw0, q)) continue;
    out.push_back(DsHit{def->dsi, kw0, counters ? counters->searches(def->dsi) : 0,
                        snap ? snap->resource_count(def->dsi) : 0});
  }
  std::sort(out.begin(), out.end(), [](const DsHit& a, const DsHit& b) {
    return a.r != b.r ? a.r > b.r : a.dsi < b.dsi;
  });
  return out;
}

// ---------------------------------------------------------------------------
// step 2: request / result

/// A number in canonical units, or a lexical value (date, list label, tux,
/// text) encoded by the dimension's kind.
using QueryValue = std::variant<double, std::string>;

struct DimCondition {
  std::string path;
  std::optional<QueryValue> sim;
  std::optional<QueryValue> min;
  std::optional<QueryValue> max;
  bool g = false;
  std::optional<std::string> word;
  std::optional<std::string> tux;  // prefix

  [[nodiscard]] bool searched() const { return sim || min || max || word || tux; }
};

struct SearchRequest {
  std::string dsi;
  std::vector<DimCondition> dims;
  std::optional<bool> offered;
  std::optional<bool> wanted;
  std::size_t pcnt = kMaxPcnt;
};

struct Hit {
  std::uint64_t c = 0;
  double d = 0.0;
  std::optional<std::string> vl;
  std::optional<std::string> resource;
  std::optional<std::string> keycomment;
  Json values = Json::object();
  std::uint64_t a = 0;
};

struct DimStats {
  double av = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct SearchResult {
  std::vector<Hit> hits;
  std::map<std::string, DimStats> stats;
  std::vector<std::pair<double, double>> scatter;
  std::uint64_t total = 0;
};

/// Arithmetic mean, population standard deviation, min and max.
inline DimStats compute_stats(std::span<const double> values) {
  if (values.empty()) fail(Errc::invalid_argument, "stats of an empty match set");
  DimStats s;
  s.min = values.front();
  s.max = values.front();
  double sum = 0.0;
  for (double v : values) {
    sum += v;
    s.min = std::min(s.min, v);
    s.max = std::max(s.max, v);
  }
  s.av = sum / static_cast<double>(values.size());
  double ss = 0.0;
  for (double v : values) ss += (v - s.av) * (v - s.av);
  s.sd = std::sqrt(ss / static_cast<double>(values.size()));
  return s;
}

/// (x, y) per hit where both values are numbers, in hit order.
inline std::vector<std::pair<double, double>> scatter_data(std::span<const Hit> hits, const std::string& x,
                                                           const std::string& y) {
  std::vector<std::pair<double, double>> out;
  for (const auto& h : hits) {
    if (!h.values.contains(x) || !h.values.contains(y)) {
      fail(Errc::unknown_dimension, "scatter dimension not available on hit " + std::to_string(h.c));
    }
    const auto& vx = h.values.at(x);
    const auto& vy = h.values.at(y);
    if (!vx.is_number() || !vy.is_number()) fail(Errc::kind_mismatch, "scatter needs numeric dimensions");
    out.emplace_back(vx.get<double>(), vy.get<double>());
  }
  return out;
}

// ---------------------------------------------------------------------------
// JSON

namespace detail {

inline std::optional<QueryValue> query_value(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  const auto& v = j.at(key);
  if (v.is_number()) return QueryValue{v.get<double>()};
  if (v.is_string()) return QueryValue{v.get<std::string>()};
  fail(Errc::invalid_argument, std::string("'") + key + "' must be a number or string");
}

inline Json query_value_json(const QueryValue& v) {
  if (const auto* d = std::get_if<double>(&v)) return *d;
  return std::get<std::string>(v);
}

}  // namespace detail

inline SearchRequest search_request_from_json(const Json& j) {
  if (!j.is_object()) fail(Errc::invalid_argument, "search request must be a JSON object");
  SearchRequest req;
  try {
    req.dsi = j.at("dsi").get<std::string>();
    if (j.contains("dims")) {
      for (const auto& d : j.at("dims")) {
        DimCondition c;
        c.path = d.at("path").get<std::string>();
        c.sim = detail::query_value(d, "sim");
        c.min = detail::query_value(d, "min");
        c.max = detail::query_value(d, "max");
        c.g = d.value("g", false);
        if (d.contains("word")) c.word = d.at("word").get<std::string>();
        if (d.contains("tux")) c.tux = d.at("tux").get<std::string>();
        req.dims.push_back(std::move(c));
      }
    }
    if (j.contains("offered")) req.offered = j.at("offered").get<bool>();
    if (j.contains("wanted")) req.wanted = j.at("wanted").get<bool>();
    if (j.contains("pcnt")) {
      const auto p = j.at("pcnt").get<std::int64_t>();
      if (p < 1 || p > static_cast<std::int64_t>(kMaxPcnt)) fail(Errc::invalid_argument, "pcnt must be in [1, 1000]");
      req.pcnt = static_cast<std::size_t>(p);
    }
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::invalid_argument, std::string("malformed search request: ") + e.what());
  }
  return req;
}

inline Json to_json(const SearchRequest& req) {
  Json dims = Json::array();
  for (const auto& d : req.dims) {
    Json o = {{"path", d.path}};
    if (d.sim) o["sim"] = detail::query_value_json(*d.sim);
    if (d.min) o["min"] = detail::query_value_json(*d.min);
    if (d.max) o["max"] = detail::query_value_json(*d.max);
    if (d.g) o["g"] = true;
    if (d.word) o["word"] = *d.word;
    if (d.tux) o["tux"] = *d.tux;
    dims.push_back(std::move(o));
  }
  Json j = {{"dsi", req.dsi}, {"dims", std::move(dims)}, {"pcnt", req.pcnt}};
  if (req.offered) j["offered"] = *req.offered;
  if (req.wanted) j["wanted"] = *req.wanted;
  return j;
}

inline Json to_json(const SearchResult& r) {
  Json hits = Json::array();
  for (const auto& h : r.hits) {
    Json o = {{"c", h.c}, {"d", h.d}, {"values", h.values}, {"a", h.a}};
    if (h.vl) o["vl"] = *h.vl;
    if (h.resource) o["resource"] = *h.resource;
    if (h.keycomment) o["keycomment"] = *h.keycomment;
    hits.push_back(std::move(o));
  }
  Json stats = Json::object();
  for (const auto& [p, s] : r.stats) stats[p] = Json{{"av", s.av}, {"sd", s.sd}, {"min", s.min}, {"max", s.max}};
  Json scatter = Json::array();
  for (const auto& [x, y] : r.scatter) scatter.push_back(Json::array({x, y}));
  return Json{{"hits", std::move(hits)}, {"stats", std::move(stats)}, {"scatter", std::move(scatter)}, {"total", r.total}};
}

// ---------------------------------------------------------------------------
// execution

namespace detail {

// A request dimension resolved against the schema and snapshot.
struct ResolvedDim {
  std::string path;  // full leaf path, or a system path
  const FlatLeaf* leaf = nullptr;
  LeafKind kind = LeafKind::float_max;
  ColumnRoute route;
  const DimCondition* cond = nullptr;
  std::optional<double> sim;  // own units
  std::optional<double> min;  // canonical units
  std::optional<double> max;
  bool scanned = false;       // part of the column join
  bool missing_column = false;
};

inline double resolve_query_value(const ResolvedDim& d, const QueryValue& v, const IndexSnapshot& snap, int slot) {
  if (const auto* x = std::get_if<double>(&v)) return *x;
  const auto& s = std::get<std::string>(v);
  if (d.kind == LeafKind::text) {
    if (auto id = snap.intern_id(text::nfc(s))) return static_cast<double>(*id);
    return -1.0;  // matches nothing under the discrete metric
  }
  if (!d.leaf) {
    if (d.kind == LeafKind::date) return static_cast<double>(parse_date(s));
    auto n = text::parse_double(s);
    if (!n) fail(Errc::invalid_argument, "malformed value '" + s + "' for " + d.path);
    return *n;
  }
  const auto& content = d.leaf->content;
  if (content.kind == LeafKind::list && content.interval_mode) {
    const auto p = interval_search_params(content, s);
    const auto& pick = slot == 0 ? p.sim : (slot == 1 ? p.min : p.max);
    if (!pick) return slot == 1 ? -INFINITY : INFINITY;
    return *pick;
  }
  try {
    LeafContent unbounded = content;
    unbounded.min.reset();
    unbounded.max.reset();
    return encode_value(unbounded, s);
  } catch (const Error& e) {
    fail(Errc::invalid_argument, d.path + ": " + e.what());
  }
}

inline Json display_value(const ResolvedDim& d, double own, const IndexSnapshot& snap) {
  switch (d.kind) {
    case LeafKind::integer:
    case LeafKind::money:
    case LeafKind::float_medium:
    case LeafKind::float_max: return own;
    case LeafKind::text: return snap.interned(static_cast<std::uint64_t>(own));
    default:
      if (d.leaf) return decode_value(d.leaf->content, own);
      if (d.kind == LeafKind::date) return format_date(static_cast<std::int64_t>(own), 6);
      return own;
  }
}

}  // namespace detail

/// Similarity/range search over one space. Candidates are the DVs defined
/// on every searched dimension (sim, bounded, word/tux); d is the space's
/// metric restricted to the sim dimensions; bounded-only dimensions filter
/// without contributing. Stats cover all matches, hits the pcnt best.
inline SearchResult numeric_search(const SearchRequest& req, const IndexSnapshot& snap,
                                   Counters* counters = nullptr) {
  const FlatSchema* schema = snap.schema(req.dsi);
  if (!schema) fail(Errc::unknown_dsi, "unknown DSI '" + req.dsi + "'");
  if (req.pcnt < 1 || req.pcnt > kMaxPcnt) fail(Errc::invalid_argument, "pcnt must be in [1, 1000]");

  std::vector<detail::ResolvedDim> dims;
  for (const auto& cond : req.dims) {
    detail::ResolvedDim d;
    d.cond = &cond;
    if (cond.path == kOwnerPath || cond.path == kDatePath || cond.path == kKeycommentPath) {
      d.path = cond.path;
      d.kind = cond.path == kOwnerPath ? LeafKind::integer : (cond.path == kDatePath ? LeafKind::date : LeafKind::text);
      d.route = ColumnRoute{system_column(req.dsi, cond.path), 1.0, 0.0};
      if (cond.path == kKeycommentPath && (cond.sim || cond.min || cond.max || cond.tux || cond.g)) {
        fail(Errc::invalid_argument, "@keycomment only supports word conditions");
      }
    } else {
      const auto i = schema->resolve(cond.path);
      d.leaf = &schema->leaves[i];
      d.path = d.leaf->path;
      d.kind = d.leaf->content.kind;
      d.route = snap.same_as().route(d.leaf->column);
    }
    for (const auto& other : dims) {
      if (other.path == d.path) fail(Errc::invalid_argument, "dimension " + d.path + " given twice");
    }
    if (cond.word && d.kind != LeafKind::text) fail(Errc::kind_mismatch, d.path + ": word conditions need a text dimension");
    if (cond.tux && d.kind != LeafKind::tux) fail(Errc::kind_mismatch, d.path + ": tux conditions need a tux dimension");
    if (cond.sim) d.sim = detail::resolve_query_value(d, *cond.sim, snap, 0);
    std::optional<double> lo, hi;
    if (cond.min) lo = detail::resolve_query_value(d, *cond.min, snap, 1);
    if (cond.max) hi = detail::resolve_query_value(d, *cond.max, snap, 2);
    if (lo && std::isinf(*lo)) lo.reset();
    if (hi && std::isinf(*hi)) hi.reset();
    if (lo || hi) {
      auto a = lo ? std::optional(d.route.to_canonical(*lo)) : std::nullopt;
      auto b = hi ? std::optional(d.route.to_canonical(*hi)) : std::nullopt;
      if (d.route.a < 0) std::swap(a, b);
      d.min = a;
      d.max = b;
    }
    if (cond.tux) {
      const auto [tlo, thi] = tux_prefix_range(*cond.tux);
      d.min = std::max(d.min.value_or(-INFINITY), static_cast<double>(tlo));
      d.max = std::min(d.max.value_or(INFINITY), static_cast<double>(thi));
    }
    d.scanned = cond.sim || d.min || d.max;
    d.missing_column = !snap.column(d.route.column);
    dims.push_back(std::move(d));
  }
  const bool any_searched = std::any_of(req.dims.begin(), req.dims.end(), [](const auto& c) { return c.searched(); });
  if (!any_searched) fail(Errc::invalid_argument, "search needs at least one sim, min/max, word or tux condition");
  if (counters) counters->count_search(req.dsi);

  // sim dimensions in request order define the restricted metric
  std::vector<DimensionPath> sim_paths;
  std::vector<double> query;
  for (const auto& d : dims) {
    if (d.sim) {
      if (!d.leaf) fail(Errc::invalid_argument, "system dimension " + d.path + " cannot be a similarity target");
      sim_paths.push_back(d.path);
      query.push_back(*d.sim);
    }
  }
  const RestrictedMetric metric(schema->tree, sim_paths);

  SearchResult result;
  for (const auto& d : dims) {
    if ((d.scanned || d.cond->word) && d.missing_column && !(d.cond->word && snap.has_postings(d.route.column))) {
      return result;  // no DV defines a searched dimension
    }
  }

  // output columns: searched plus g, request order
  std::vector<std::size_t> shown;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (dims[i].kind == LeafKind::text && dims[i].path == kKeycommentPath) continue;
    if (dims[i].scanned || dims[i].cond->g || dims[i].cond->word) shown.push_back(i);
  }

  struct Payload {
    std::vector<double> values;  // canonical, per `shown`; NaN = undefined
  };
  TopK<Payload> top(req.pcnt);
  std::map<std::size_t, std::vector<double>> g_values;  // dims index -> own-unit values

  auto own = [&](std::size_t di, double canonical) { return dims[di].route.from_canonical(canonical); };

  const bool record_filter = req.offered.has_value() || req.wanted.has_value();
  auto record_ok = [&](std::uint64_t c) {
    if (!record_filter) return true;
    const auto* r = snap.record(c);
    if (!r) return false;
    if (req.offered && r->offered.value_or(false) != *req.offered) return false;
    if (req.wanted && r->wanted.value_or(false) != *req.wanted) return false;
    return true;
  };

  std::size_t searched_count = 0;
  std::size_t g_only = 0;
  for (const auto& d : dims) {
    searched_count += d.cond->searched() ? 1 : 0;
    g_only += (!d.cond->searched() && d.cond->g) ? 1 : 0;
  }

  // Single similarity dimension with a value-sorted index: walk outward
  // from the target in distance order.
  if (searched_count == 1 && g_only == 0 && !record_filter && dims.size() == 1 && dims[0].sim && !dims[0].cond->g && !dims[0].min &&
      !dims[0].max && comparison_for(dims[0].kind) == Comparison::numeric) {
    const auto& d = dims[0];
    const auto col_id = *snap.column_index(d.route.column);
    const auto& col = snap.columns()[col_id];
    if (col.sorted_index) {
      const auto& v = col.by_value;
      const double t = d.route.to_canonical(*d.sim);
      auto pos = static_cast<std::size_t>(
          std::lower_bound(v.begin(), v.end(), t, [](const ColumnRecord& r, double x) { return r.value < x; }) -
          v.begin());
      std::ptrdiff_t left = static_cast<std::ptrdiff_t>(pos) - 1;
      std::size_t right = pos;
      auto dist = [&](const ColumnRecord& r) {
        const double x = own(0, r.value);
        return metric(std::span<const double>(&query[0], 1), std::span<const double>(&x, 1));
      };
      std::vector<RankedHit<Payload>> picked;
      double last = -1.0;
      std::uint64_t reads = 2;
      for (;;) {
        const bool has_l = left >= 0, has_r = right < v.size();
        if (!has_l && !has_r) break;
        const double dl = has_l ? dist(v[static_cast<std::size_t>(left)]) : INFINITY;
        const double dr = has_r ? dist(v[right]) : INFINITY;
        const bool take_left = dl <= dr;
        const double dd = take_left ? dl : dr;
        if (picked.size() >= req.pcnt && dd > last) break;
        const auto& rec = take_left ? v[static_cast<std::size_t>(left--)] : v[right++];
        ++reads;
        picked.push_back(RankedHit<Payload>{dd, rec.c, Payload{{rec.value}}});
        last = dd;
      }
      snap.add_reads(col_id, reads);
      std::sort(picked.begin(), picked.end(), [](const auto& a, const auto& b) {
        return a.d < b.d || (a.d == b.d && a.c < b.c);
      });
      if (picked.size() > req.pcnt) picked.resize(req.pcnt);
      for (auto& p : picked) top.push(p.d, p.c, std::move(p.payload));
      result.total = v.size();
      shown = {0};
      goto assemble;
    }
  }

  {
    std::vector<ScanTerm> terms;
    std::vector<std::size_t> term_dims;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (!dims[i].scanned) continue;
      terms.push_back(ScanTerm{dims[i].route.column, dims[i].min, dims[i].max});
      term_dims.push_back(i);
    }
    std::vector<std::vector<std::uint64_t>> owned_lists;
    for (const auto& d : dims) {
      if (d.cond->word) owned_lists.push_back(text_lookup(snap, d.route.column, *d.cond->word, TextQuery::word));
    }
    // Tightest bound with a sorted-value index becomes the jump set.
    std::optional<std::size_t> best;
    std::size_t best_count = 0;
    for (std::size_t t = 0; t < terms.size(); ++t) {
      if (!terms[t].min && !terms[t].max) continue;
      const auto* col = snap.column(terms[t].column);
      if (!col || !col->sorted_index) continue;
      const auto n = range_count(snap, terms[t].column, terms[t].min, terms[t].max);
      if (!best || n < best_count) {
        best = t;
        best_count = n;
      }
    }
    if (best) owned_lists.push_back(range_prefilter(snap, terms[*best].column, terms[*best].min, terms[*best].max));
    std::vector<std::span<const std::uint64_t>> lists(owned_lists.begin(), owned_lists.end());

    // g-only and word-only dimensions are probed, not joined
    std::vector<std::pair<std::size_t, ColumnCursor>> probes;
    for (std::size_t i = 0; i < dims.size(); ++i) {
      if (dims[i].scanned || dims[i].missing_column || dims[i].path == kKeycommentPath) continue;
      if (dims[i].cond->g || dims[i].cond->word) {
        probes.emplace_back(i, ColumnCursor(snap, *snap.column_index(dims[i].route.column)));
      }
    }

    std::vector<int> slot_of(dims.size(), -1);
    for (std::size_t k = 0; k < shown.size(); ++k) slot_of[shown[k]] = static_cast<int>(k);
    std::vector<std::size_t> sim_terms;  // term index per sim slot
    for (const auto& p : sim_paths) {
      for (std::size_t t = 0; t < term_dims.size(); ++t) {
        if (dims[term_dims[t]].path == p) sim_terms.push_back(t);
      }
    }
    std::vector<double> cand(sim_terms.size());

    auto on_match = [&](std::uint64_t c, std::span<const double> vals) {
      if (!record_ok(c)) return;
      ++result.total;
      for (std::size_t s = 0; s < sim_terms.size(); ++s) cand[s] = own(term_dims[sim_terms[s]], vals[sim_terms[s]]);
      const double d = metric(query, cand);
      Payload p;
      p.values.assign(shown.size(), NAN);
      for (std::size_t t = 0; t < term_dims.size(); ++t) p.values[slot_of[term_dims[t]]] = vals[t];
      for (auto& [i, cur] : probes) {
        if (auto v = cur.probe(c)) p.values[slot_of[i]] = *v;
      }
      for (std::size_t k = 0; k < shown.size(); ++k) {
        const auto i = shown[k];
        if (dims[i].cond->g && !std::isnan(p.values[k]) && dims[i].kind != LeafKind::text) {
          g_values[i].push_back(own(i, p.values[k]));
        }
      }
      top.push(d, c, std::move(p));
    };

    if (terms.empty()) {
      // word conditions only: walk the intersection of the postings lists
      const auto probe_lists = lists;
      std::vector<detail::ListCursor> cur;
      for (auto l : probe_lists) cur.push_back(detail::ListCursor{l, 0});
      if (!cur.empty()) {
        for (std::size_t k = 0; k < cur[0].data.size(); ++k) {
          const auto c = cur[0].data[k];
          bool all = true;
          for (std::size_t j = 1; j < cur.size() && all; ++j) {
            const auto p = cur[j].seek(c);
            all = p < cur[j].data.size() && cur[j].data[p] == c;
          }
          if (all) on_match(c, {});
        }
      }
    } else {
      scan(snap, terms, lists, on_match);
    }
  }

assemble:
  auto ranked = top.take();
  for (auto& r : ranked) {
    Hit h;
    h.c = r.c;
    h.d = r.d;
    if (const auto* rec = snap.record(r.c)) {
      h.vl = rec->vl;
      h.resource = rec->resource;
      h.keycomment = rec->keycomment;
    }
    for (std::size_t k = 0; k < shown.size(); ++k) {
      const double v = r.payload.values[k];
      if (std::isnan(v)) continue;
      const auto& d = dims[shown[k]];
      h.values[d.path] = detail::display_value(d, own(shown[k], v), snap);
    }
    h.a = counters ? counters->access(r.c) : 0;
    result.hits.push_back(std::move(h));
  }
  for (const auto& [i, vals] : g_values) {
    if (!vals.empty()) result.stats[dims[i].path] = compute_stats(vals);
  }
  std::vector<std::string> g_paths;
  for (const auto& d : dims) {
    if (d.cond->g) g_paths.push_back(d.path);
  }
  if (g_paths.size() >= 2) {
    for (const auto& h : result.hits) {
      if (!h.values.contains(g_paths[0]) || !h.values.contains(g_paths[1])) continue;
      const auto& x = h.values.at(g_paths[0]);
      const auto& y = h.values.at(g_paths[1]);
      if (x.is_number() && y.is_number()) result.scatter.emplace_back(x.get<double>(), y.get<double>());
    }
  }
  return result;
}

}  // namespace dspace
