#pragma once

// The definition registry (append-only evolution, keycomment-pair
// lifecycle), nesting/flattening into a leaf list plus metric tree, sameAs
// column resolution and evaluation-space derivation.

#include <map>
#include <memory>
#include <mutex>
#include <queue>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "dspace/schema.hpp"

namespace dspace {

inline constexpr int kDefaultDepthLimit = 8;

using DefinitionPtr = std::shared_ptr<const DomainSpaceDef>;

/// Single-writer, multi-reader store of definition versions. Readers get
/// immutable snapshots of a version; `put` validates and publishes
/// atomically.
class Registry {
 public:
  struct PutResult {
    DefinitionPtr def;
    std::size_t version = 0;  // 1-based
    bool created = false;
  };

  /// Registers a new definition or a new version of an existing one.
  /// `actor` is the owner ID performing the change; nullopt skips the
  /// ownership check (replay from disk).
  PutResult put(DomainSpaceDef def, std::optional<std::int64_t> actor = std::nullopt) {
    validate(def);
    std::unique_lock lock(mu_);
    auto& versions = versions_[def.dsi];
    if (!versions.empty()) {
      const auto& prev = *versions.back();
      check_evolution(prev, def, actor);
      if (prev == def) return PutResult{versions.back(), versions.size(), false};
    } else if (actor && def.pair.state != PairState::draft && *actor != def.owner) {
      fail(Errc::forbidden, "only the owner may register a definition outside draft state");
    }
    versions.push_back(std::make_shared<const DomainSpaceDef>(std::move(def)));
    return PutResult{versions.back(), versions.size(), versions.size() == 1};
  }

  [[nodiscard]] DefinitionPtr find(std::string_view dsi) const {
    std::shared_lock lock(mu_);
    auto it = versions_.find(std::string(dsi));
    if (it == versions_.end() || it->second.empty()) return nullptr;
    return it->second.back();
  }

  [[nodiscard]] DefinitionPtr find_version(std::string_view dsi, std::size_t version) const {
    std::shared_lock lock(mu_);
    auto it = versions_.find(std::string(dsi));
    if (it == versions_.end() || version == 0 || version > it->second.size()) return nullptr;
    return it->second[version - 1];
  }

  [[nodiscard]] std::size_t version_count(std::string_view dsi) const {
    std::shared_lock lock(mu_);
    auto it = versions_.find(std::string(dsi));
    return it == versions_.end() ? 0 : it->second.size();
  }

  /// Latest version of every definition, ordered by DSI.
  [[nodiscard]] std::vector<DefinitionPtr> all() const {
    std::shared_lock lock(mu_);
    std::vector<DefinitionPtr> out;
    for (const auto& [dsi, v] : versions_) {
      if (!v.empty()) out.push_back(v.back());
    }
    return out;
  }

  [[nodiscard]] std::size_t size() const {
    std::shared_lock lock(mu_);
    return versions_.size();
  }

 private:
  static void check_pair(const KeycommentPair& before, const KeycommentPair& after, bool owner,
                         const std::string& where) {
    if (before.state != PairState::draft && before.fixed != after.fixed) {
      fail(Errc::fixed_part_mutation, where + ": fixed keycomment is immutable once out of draft");
    }
    if (before.state == after.state) return;
    const bool forward = (before.state == PairState::draft && after.state == PairState::ok) ||
                         (before.state == PairState::ok && after.state == PairState::deprecated);
    if (!forward) {
      fail(Errc::invalid_transition, where + ": state may only move draft->ok or ok->deprecated");
    }
    if (before.state == PairState::draft && !owner) {
      fail(Errc::forbidden, where + ": only the owner may move a pair out of draft");
    }
  }

  static void check_evolution(const DomainSpaceDef& before, const DomainSpaceDef& after,
                              std::optional<std::int64_t> actor) {
    const bool owner = !actor || *actor == before.owner;
    if (after.owner != before.owner) fail(Errc::fixed_part_mutation, before.dsi + ": owner cannot change");
    check_pair(before.pair, after.pair, owner, before.dsi);
    if (before.pair.state != PairState::draft &&
        (before.effective_metric() != after.effective_metric() || before.attributes != after.attributes)) {
      fail(Errc::fixed_part_mutation, before.dsi + ": metric and attributes are fixed once out of draft");
    }
    if (before.relation) {
      if (!after.relation) fail(Errc::fixed_part_mutation, before.dsi + ": relation cannot be removed");
      check_pair(*before.relation, *after.relation, owner, before.dsi + " relation");
    }
    if (after.dimensions.size() < before.dimensions.size()) {
      fail(Errc::fixed_part_mutation, before.dsi + ": dimensions may only be appended");
    }
    for (std::size_t i = 0; i < before.dimensions.size(); ++i) {
      const auto& a = before.dimensions[i];
      const auto& b = after.dimensions[i];
      if (a.di != b.di || a.content != b.content) {
        fail(Errc::fixed_part_mutation,
             before.dsi + ": dimension " + std::to_string(i) + " ('" + a.di + "') may not be reordered or changed");
      }
      check_pair(a.pair, b.pair, owner, dimension_url(before.dsi, a.di));
    }
  }

  mutable std::shared_mutex mu_;
  std::map<std::string, std::vector<DefinitionPtr>, std::less<>> versions_;
};

// ---------------------------------------------------------------------------
// flattening

struct FlatLeaf {
  DimensionPath path;
  std::string column;         // dimension URL identifying the index column
  std::string defining_dsi;   // DS whose dimension list holds this leaf
  DimensionDef def;           // resolved definition (external leaves: the foreign leaf, local DI)
  LeafContent content;        // computed leaves: float-max
  std::optional<std::string> computed;  // expression over sibling DIs
  std::vector<std::size_t> tree_position;

  [[nodiscard]] std::string_view di() const {
    const auto p = path.rfind('/');
    return p == std::string::npos ? std::string_view(path) : std::string_view(path).substr(p + 1);
  }
};

struct CutRecord {
  DimensionPath path;  // branch dimension where expansion stopped
  std::string dsi;     // DS that would have been expanded
  bool circular = false;

  friend bool operator==(const CutRecord&, const CutRecord&) = default;
};

/// Depth-first expansion of a definition into leaves and a metric tree.
struct FlatSchema {
  std::string dsi;
  std::vector<FlatLeaf> leaves;
  MetricTree tree;
  std::vector<CutRecord> cuts;

  [[nodiscard]] bool circular() const {
    return std::any_of(cuts.begin(), cuts.end(), [](const CutRecord& c) { return c.circular; });
  }

  [[nodiscard]] std::optional<std::size_t> index_of(std::string_view path) const {
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (leaves[i].path == path) return i;
    }
    return std::nullopt;
  }

  /// Resolves a full leaf path or a leaf DI that is unique in the schema.
  [[nodiscard]] std::size_t resolve(std::string_view name) const {
    if (auto i = index_of(name)) return *i;
    std::optional<std::size_t> hit;
    for (std::size_t i = 0; i < leaves.size(); ++i) {
      if (leaves[i].di() == name) {
        if (hit) fail(Errc::unknown_dimension, "dimension name '" + std::string(name) + "' is ambiguous in " + dsi);
        hit = i;
      }
    }
    if (!hit) fail(Errc::unknown_dimension, "no dimension '" + std::string(name) + "' in " + dsi);
    return *hit;
  }

  /// Shortest unambiguous name of a leaf: its DI if unique, else its path.
  [[nodiscard]] std::string short_name(std::size_t i) const {
    const auto di = leaves[i].di();
    std::size_t count = 0;
    for (const auto& l : leaves) count += l.di() == di ? 1 : 0;
    return count == 1 ? std::string(di) : leaves[i].path;
  }
};

namespace detail {

struct Flattener {
  const Registry& registry;
  int depth_limit;
  FlatSchema out;
  std::vector<std::string> stack;  // DSIs on the current expansion path

  static std::string join(const DimensionPath& prefix, std::string_view di) {
    return prefix.empty() ? std::string(di) : prefix + "/" + std::string(di);
  }

  // Resolves an external dimension URL to a leaf definition.
  DimensionDef resolve_external(const std::string& url, int hops) const {
    const auto hash = url.rfind('#');
    if (hash == std::string::npos) fail(Errc::unresolvable, "external dimension URL without '#': " + url);
    auto target = registry.find(url.substr(0, hash));
    if (!target) fail(Errc::unresolvable, "unresolvable DSI in external dimension " + url);
    const auto* d = target->find(url.substr(hash + 1));
    if (!d) fail(Errc::unresolvable, "unresolvable dimension " + url);
    if (const auto* ext = std::get_if<ExternalContent>(&d->content)) {
      if (hops >= depth_limit) fail(Errc::unresolvable, "external dimension chain too long at " + url);
      return resolve_external(ext->url, hops + 1);
    }
    if (!d->leaf()) fail(Errc::unresolvable, "external dimension " + url + " is not a leaf");
    return *d;
  }

  MetricTree expand(const DomainSpaceDef& def, const DimensionPath& prefix, int level,
                    std::vector<std::size_t> position, double weight) {
    stack.push_back(def.dsi);
    const auto metric = def.effective_metric();
    std::vector<MetricTree> children;
    std::vector<std::size_t> leaf_indices;

    for (const auto& d : def.dimensions) {
      const auto path = join(prefix, d.di);
      auto child_pos = position;
      child_pos.push_back(children.size());

      if (const auto* br = d.branch()) {
        auto target = registry.find(br->dsi);
        if (!target) fail(Errc::unresolvable, "unresolvable DSI '" + br->dsi + "' in " + dimension_url(def.dsi, d.di));
        const bool cyclic = std::find(stack.begin(), stack.end(), br->dsi) != stack.end();
        if (level + 1 > depth_limit) {
          out.cuts.push_back(CutRecord{path, br->dsi, cyclic});
          continue;
        }
        auto sub = expand(*target, path, level + 1, child_pos, d.weight);
        children.push_back(std::move(sub));
        continue;
      }

      FlatLeaf leaf;
      leaf.path = path;
      leaf.defining_dsi = def.dsi;
      leaf.tree_position = child_pos;
      if (const auto* ext = std::get_if<ExternalContent>(&d.content)) {
        leaf.def = resolve_external(ext->url, 1);
        leaf.def.di = d.di;
        leaf.def.weight = d.weight;
        leaf.content = *leaf.def.leaf();
        leaf.column = ext->url;
      } else if (const auto* comp = std::get_if<ComputedContent>(&d.content)) {
        leaf.def = d;
        leaf.content = LeafContent{};
        leaf.computed = comp->expr;
        leaf.column = dimension_url(out.dsi, path);
      } else {
        leaf.def = d;
        leaf.content = *d.leaf();
        leaf.column = dimension_url(out.dsi, path);
      }
      leaf_indices.push_back(out.leaves.size());
      children.push_back(MetricTree::dimension(path, d.weight, comparison_for(leaf.content.kind)));
      out.leaves.push_back(std::move(leaf));
    }
    stack.pop_back();

    if (metric.kind == MetricKind::geodesic) {
      std::vector<DimensionPath> coords;
      for (auto i : leaf_indices) {
        if (comparison_for(out.leaves[i].content.kind) == Comparison::numeric) coords.push_back(out.leaves[i].path);
      }
      if (coords.size() < 2) fail(Errc::invalid_argument, def.dsi + ": GPS metric needs (lat, lon) leaves");
      for (std::size_t k = 0; k < leaf_indices.size(); ++k) {
        auto& pos = out.leaves[leaf_indices[k]].tree_position;
        const auto& p = out.leaves[leaf_indices[k]].path;
        pos.back() = p == coords[0] ? 0 : (p == coords[1] ? 1 : 2);
      }
      return MetricTree::geodesic(coords[0], coords[1], weight);
    }
    return MetricTree::minkowski(metric.order, std::move(children), weight);
  }
};

}  // namespace detail

/// Expands branch dimensions depth-first into a leaf list and the composed
/// metric tree. Expansion stops below `depth_limit` levels (root = level 1);
/// cut branches are recorded, flagged circular when the target DSI is
/// already on the expansion path.
inline FlatSchema flatten(const DomainSpaceDef& def, const Registry& registry, int depth_limit = kDefaultDepthLimit) {
  if (depth_limit < 1) fail(Errc::invalid_argument, "depth_limit must be >= 1");
  detail::Flattener f{registry, depth_limit, {}, {}};
  f.out.dsi = def.dsi;
  f.out.tree = f.expand(def, "", 1, {}, 1.0);
  return std::move(f.out);
}

// ---------------------------------------------------------------------------
// sameAs

/// Affine map a*x + b from a dimension's unit into its canonical column.
struct ColumnRoute {
  std::string column;
  double a = 1.0;
  double b = 0.0;

  [[nodiscard]] double to_canonical(double x) const noexcept { return a * x + b; }
  [[nodiscard]] double from_canonical(double y) const noexcept { return (y - b) / a; }
  friend bool operator==(const ColumnRoute&, const ColumnRoute&) = default;
};

struct SameAsMapping {
  std::map<std::string, ColumnRoute> routes;

  /// Route for a dimension URL; identity onto itself when unlinked.
  [[nodiscard]] ColumnRoute route(const std::string& url) const {
    auto it = routes.find(url);
    if (it == routes.end()) return ColumnRoute{url, 1.0, 0.0};
    return it->second;
  }
};

/// Groups sameAs-linked dimension URLs into canonical columns. Within a
/// connected component the canonical column is the smallest URL among the
/// dimensions no other dimension declares itself equal to.
inline SameAsMapping resolve_same_as(const Registry& registry) {
  struct Edge {
    std::string from, to;  // from = a * to + b
    double a, b;
  };
  std::vector<Edge> edges;
  auto add = [&](const std::string& from, const SameAs& s, const std::string& to) {
    if (s.expr) return;
    if (s.a == 0.0 || !std::isfinite(s.a) || !std::isfinite(s.b)) {
      fail(Errc::inconsistent_same_as, "sameAs factor of " + from + " must be finite and nonzero");
    }
    edges.push_back(Edge{from, to, s.a, s.b});
  };
  for (const auto& def : registry.all()) {
    for (const auto& d : def->dimensions) {
      if (d.same_as) add(dimension_url(def->dsi, d.di), *d.same_as, d.same_as->url);
    }
    if (def->same_as && !def->same_as->expr) {
      auto target = registry.find(def->same_as->url);
      if (!target) continue;
      for (const auto& d : def->dimensions) {
        const auto* other = target->find(d.di);
        if (d.leaf() && other && other->leaf()) {
          add(dimension_url(def->dsi, d.di), *def->same_as, dimension_url(target->dsi, d.di));
        }
      }
    }
  }

  struct Link {
    std::string peer;
    double a, b;
    bool forward;  // this node is `from`
  };
  std::map<std::string, std::vector<Link>> adj;
  std::map<std::string, int> indegree;
  for (const auto& e : edges) {
    adj[e.from].push_back(Link{e.to, e.a, e.b, true});
    adj[e.to].push_back(Link{e.from, e.a, e.b, false});
    indegree[e.from] += 0;
    indegree[e.to] += 1;
  }
  for (auto& [node, links] : adj) {
    std::sort(links.begin(), links.end(), [](const Link& x, const Link& y) {
      return std::tie(x.peer, x.forward, x.a, x.b) < std::tie(y.peer, y.forward, y.a, y.b);
    });
  }

  SameAsMapping mapping;
  std::set<std::string> done;
  for (const auto& [start, unused] : adj) {
    if (done.contains(start)) continue;
    // collect component
    std::vector<std::string> comp;
    std::queue<std::string> q;
    q.push(start);
    done.insert(start);
    while (!q.empty()) {
      auto n = q.front();
      q.pop();
      comp.push_back(n);
      for (const auto& l : adj[n]) {
        if (done.insert(l.peer).second) q.push(l.peer);
      }
    }
    std::sort(comp.begin(), comp.end());
    std::string canonical;
    for (const auto& n : comp) {
      if (indegree[n] == 0) {
        canonical = n;
        break;
      }
    }
    if (canonical.empty()) canonical = comp.front();

    std::map<std::string, std::pair<double, double>> f;  // node unit -> canonical unit
    f[canonical] = {1.0, 0.0};
    q.push(canonical);
    while (!q.empty()) {
      auto n = q.front();
      q.pop();
      const auto [alpha, beta] = f[n];
      for (const auto& l : adj[n]) {
        std::pair<double, double> g;
        if (l.forward) {
          g = {alpha * l.a, alpha * l.b + beta};  // peer = target, n = a*peer + b
        } else {
          g = {alpha / l.a, beta - alpha * l.b / l.a};  // peer = a*n + b
        }
        auto it = f.find(l.peer);
        if (it == f.end()) {
          f.emplace(l.peer, g);
          q.push(l.peer);
        } else {
          auto close = [](double x, double y) { return std::abs(x - y) <= 1e-9 * std::max({1.0, std::abs(x), std::abs(y)}); };
          if (!close(it->second.first, g.first) || !close(it->second.second, g.second)) {
            fail(Errc::inconsistent_same_as, "inconsistent sameAs cycle through " + l.peer);
          }
        }
      }
    }
    for (const auto& [node, ab] : f) mapping.routes[node] = ColumnRoute{canonical, ab.first, ab.second};
  }
  return mapping;
}

// ---------------------------------------------------------------------------
// evaluation spaces

struct EvaluationSpaces {
  DomainSpaceDef space;
  std::vector<DomainSpaceDef> components;  // one branch target per original leaf
};

namespace detail {

inline DimensionDef simple_dimension(std::string di, std::string keyword, LeafContent content) {
  DimensionDef d;
  d.di = std::move(di);
  d.pair.fixed.keywords.push_back(Keyword{std::move(keyword), std::nullopt});
  d.content = std::move(content);
  return d;
}

inline LeafContent grade_list() {
  LeafContent l;
  l.kind = LeafKind::list;
  for (int i = 0; i <= 15; ++i) l.items.push_back(std::to_string(i));
  return l;
}

}  // namespace detail

inline constexpr double kEvaluationRatioCap = 1e6;

/// Derives the evaluation space of a definition: first dimension is the URL
/// of the evaluated DV, then one branch per original leaf holding correct
/// value, |value|/|correct value| (capped), precision grade and reliability
/// grade.
inline EvaluationSpaces derive_evaluation_ds(const DomainSpaceDef& def, const Registry& registry) {
  const auto flat = flatten(def, registry);
  EvaluationSpaces out;
  auto& ev = out.space;
  ev.dsi = def.dsi + "~eval";
  ev.pair.fixed.keywords.push_back(Keyword{"evaluation-of-" + def.pair.fixed.kw0(), def.dsi});
  ev.pair.fixed.comment = "Evaluation space of " + def.dsi;
  ev.owner = def.owner;
  ev.metric = MetricSpec{};

  LeafContent url_leaf;
  url_leaf.kind = LeafKind::text;
  ev.dimensions.push_back(detail::simple_dimension("dv", "evaluated-dv-url", url_leaf));

  for (std::size_t i = 0; i < flat.leaves.size(); ++i) {
    const auto& leaf = flat.leaves[i];
    DomainSpaceDef comp;
    comp.dsi = ev.dsi + "/" + std::to_string(i);
    comp.pair.fixed.keywords.push_back(Keyword{"evaluation-of-" + leaf.path, dimension_url(def.dsi, leaf.path)});
    comp.owner = def.owner;
    LeafContent correct = leaf.content;
    correct.extra = Json::object();
    comp.dimensions.push_back(detail::simple_dimension("correct", "correct value", correct));
    LeafContent ratio;
    ratio.kind = LeafKind::float_max;
    ratio.min = 0.0;
    ratio.max = kEvaluationRatioCap;
    comp.dimensions.push_back(detail::simple_dimension("ratio", "|value| / |correct value|", ratio));
    comp.dimensions.push_back(detail::simple_dimension("precision", "precision grade", detail::grade_list()));
    comp.dimensions.push_back(detail::simple_dimension("reliability", "reliability grade", detail::grade_list()));

    DimensionDef branch;
    branch.di = "e" + std::to_string(i);
    branch.pair.fixed.keywords.push_back(Keyword{leaf.path, std::nullopt});
    branch.content = BranchContent{comp.dsi};
    ev.dimensions.push_back(std::move(branch));
    out.components.push_back(std::move(comp));
  }
  return out;
}

/// |value| / |correct value| capped for the evaluation ratio dimension.
inline double evaluation_ratio(double value, double correct) {
  if (correct == 0.0) return value == 0.0 ? 1.0 : kEvaluationRatioCap;
  return std::min(std::abs(value) / std::abs(correct), kEvaluationRatioCap);
}

}  // namespace dspace
