#pragma once

// Distance mathematics: weighted Minkowski metrics, metrics induced on a
// subset of dimensions, nested metric composition, the discrete metric for
// non-numeric dimensions, great-circle distance and weight estimation.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "dspace/error.hpp"

namespace dspace {

using Scalar = double;

/// Slash-separated DI path of a leaf dimension, e.g. "Size/Width".
using DimensionPath = std::string;

/// Exponent k of a Minkowski form. Always >= 1; infinity is a distinct
/// state, never approximated by a large finite k.
class Order {
 public:
  constexpr Order() noexcept = default;

  explicit Order(double k) : k_(k) {
    if (!(k >= 1.0)) {  // also rejects NaN
      fail(Errc::invalid_argument, "metric order must be >= 1, got " + std::to_string(k));
    }
  }

  static constexpr Order infinity() noexcept {
    Order o;
    o.k_ = std::numeric_limits<double>::infinity();
    return o;
  }
  static constexpr Order manhattan() noexcept { return Order{}; }
  static Order euclidean() { return Order{2.0}; }

  [[nodiscard]] constexpr bool is_infinite() const noexcept { return std::isinf(k_); }
  [[nodiscard]] constexpr double value() const noexcept { return k_; }

  friend constexpr bool operator==(Order a, Order b) noexcept { return a.k_ == b.k_; }

 private:
  double k_ = 1.0;
};

namespace detail {

/// Accumulates terms t_j >= 0 into (sum t_j^k)^(1/k) or max t_j.
class MinkowskiAccumulator {
 public:
  explicit MinkowskiAccumulator(Order k) noexcept : k_(k) {}

  void add(double term) noexcept {
    if (k_.is_infinite()) {
      acc_ = std::max(acc_, term);
    } else if (k_.value() == 1.0) {
      acc_ += term;
    } else if (k_.value() == 2.0) {
      acc_ += term * term;
    } else {
      acc_ += std::pow(term, k_.value());
    }
  }

  [[nodiscard]] double result() const noexcept {
    if (k_.is_infinite() || k_.value() == 1.0) return acc_;
    if (k_.value() == 2.0) return std::sqrt(acc_);
    return std::pow(acc_, 1.0 / k_.value());
  }

 private:
  Order k_;
  double acc_ = 0.0;
};

inline void check_weight(double w) {
  if (!(w > 0.0) || !std::isfinite(w)) {
    fail(Errc::invalid_weight, "weights must be finite and > 0, got " + std::to_string(w));
  }
}

}  // namespace detail

/// Weighted Minkowski distance (sum_j (r_j |x_j - y_j|)^k)^(1/k); for k = inf
/// the maximum weighted component difference.
inline double minkowski_distance(std::span<const double> x, std::span<const double> y,
                                 std::span<const double> r, Order k) {
  if (x.size() != y.size() || x.size() != r.size()) {
    fail(Errc::invalid_argument, "minkowski_distance: length mismatch");
  }
  detail::MinkowskiAccumulator acc(k);
  for (std::size_t j = 0; j < x.size(); ++j) {
    detail::check_weight(r[j]);
    if (!std::isfinite(x[j]) || !std::isfinite(y[j])) {
      fail(Errc::invalid_argument, "minkowski_distance: non-finite value");
    }
    acc.add(r[j] * std::abs(x[j] - y[j]));
  }
  return acc.result();
}

/// Discrete (equality) metric for non-numeric values.
template <class T>
[[nodiscard]] constexpr int discrete_distance(const T& a, const T& b) {
  return a == b ? 0 : 1;
}

inline constexpr double kEarthRadiusKm = 6371.0088;

/// Haversine great-circle distance in km between two (lat, lon) pairs in
/// degrees.
inline double haversine_km(double lat1, double lon1, double lat2, double lon2) noexcept {
  constexpr double kRad = 3.14159265358979323846 / 180.0;
  const double dphi = (lat2 - lat1) * kRad;
  const double dlambda = (lon2 - lon1) * kRad;
  const double s1 = std::sin(dphi / 2.0);
  const double s2 = std::sin(dlambda / 2.0);
  double h = s1 * s1 + std::cos(lat1 * kRad) * std::cos(lat2 * kRad) * s2 * s2;
  h = std::clamp(h, 0.0, 1.0);
  return 2.0 * kEarthRadiusKm * std::asin(std::sqrt(h));
}

/// Partially defined feature vector keyed by leaf path. Values are finite.
class FeatureVector {
 public:
  FeatureVector() = default;
  FeatureVector(std::initializer_list<std::pair<const DimensionPath, double>> init) {
    for (const auto& [k, v] : init) set(k, v);
  }

  void set(const DimensionPath& path, double value) {
    if (!std::isfinite(value)) {
      fail(Errc::invalid_argument, "non-finite value for dimension '" + path + "'");
    }
    entries_[path] = value;
  }

  void erase(const DimensionPath& path) { entries_.erase(path); }

  [[nodiscard]] std::optional<double> get(const DimensionPath& path) const {
    auto it = entries_.find(path);
    if (it == entries_.end()) return std::nullopt;
    return it->second;
  }
  [[nodiscard]] bool defines(const DimensionPath& path) const { return entries_.contains(path); }
  [[nodiscard]] std::size_t size() const noexcept { return entries_.size(); }
  [[nodiscard]] auto begin() const noexcept { return entries_.begin(); }
  [[nodiscard]] auto end() const noexcept { return entries_.end(); }

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::map<DimensionPath, double> entries_;
};

enum class Comparison { numeric, discrete };

enum class NodeKind { dimension, minkowski, geodesic };

/// Nested weighted Minkowski metric. A node is either a leaf dimension
/// (difference |x_j - y_j| or discrete 0/1), a Minkowski composition of
/// weighted children, or a geodesic node over (lat, lon) children.
/// `weight` is the factor the parent applies to this node's distance: r_j on
/// a dimension, w_j on a composite.
struct MetricTree {
  NodeKind kind = NodeKind::minkowski;
  double weight = 1.0;
  DimensionPath path;
  Comparison comparison = Comparison::numeric;
  Order order;
  std::vector<MetricTree> children;

  static MetricTree dimension(DimensionPath path, double weight = 1.0,
                              Comparison cmp = Comparison::numeric) {
    MetricTree t;
    t.kind = NodeKind::dimension;
    t.path = std::move(path);
    t.weight = weight;
    t.comparison = cmp;
    return t;
  }

  static MetricTree minkowski(Order order, std::vector<MetricTree> children, double weight = 1.0) {
    MetricTree t;
    t.kind = NodeKind::minkowski;
    t.order = order;
    t.children = std::move(children);
    t.weight = weight;
    return t;
  }

  static MetricTree geodesic(DimensionPath lat, DimensionPath lon, double weight = 1.0) {
    MetricTree t;
    t.kind = NodeKind::geodesic;
    t.weight = weight;
    t.children.push_back(dimension(std::move(lat)));
    t.children.push_back(dimension(std::move(lon)));
    return t;
  }

  /// Throws on non-positive weights or malformed geodesic nodes.
  void validate() const {
    detail::check_weight(weight);
    switch (kind) {
      case NodeKind::dimension:
        if (!children.empty()) fail(Errc::invalid_argument, "dimension node with children");
        break;
      case NodeKind::geodesic:
        if (children.size() != 2 || children[0].kind != NodeKind::dimension ||
            children[1].kind != NodeKind::dimension) {
          fail(Errc::invalid_argument, "geodesic node needs exactly (lat, lon) dimension children");
        }
        break;
      case NodeKind::minkowski:
        for (const auto& c : children) c.validate();
        break;
    }
  }

  [[nodiscard]] std::vector<DimensionPath> leaf_paths() const {
    std::vector<DimensionPath> out;
    collect_leaves(out);
    return out;
  }

 private:
  void collect_leaves(std::vector<DimensionPath>& out) const {
    if (kind == NodeKind::dimension) {
      out.push_back(path);
      return;
    }
    for (const auto& c : children) c.collect_leaves(out);
  }
};

/// The set J of dimensions selected for comparison, in caller order.
class SubspaceSelection {
 public:
  SubspaceSelection() = default;
  SubspaceSelection(std::initializer_list<DimensionPath> dims) : SubspaceSelection(std::vector(dims)) {}
  explicit SubspaceSelection(std::vector<DimensionPath> dims) : dims_(std::move(dims)) {
    std::vector<DimensionPath> sorted = dims_;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
      fail(Errc::invalid_argument, "subspace selection contains a dimension twice");
    }
  }

  [[nodiscard]] bool contains(const DimensionPath& p) const {
    return std::find(dims_.begin(), dims_.end(), p) != dims_.end();
  }
  [[nodiscard]] const std::vector<DimensionPath>& dimensions() const noexcept { return dims_; }
  [[nodiscard]] bool empty() const noexcept { return dims_.empty(); }
  [[nodiscard]] std::size_t size() const noexcept { return dims_.size(); }

 private:
  std::vector<DimensionPath> dims_;
};

namespace detail {

// Pairwise value lookup: returns the two values for a leaf path, or nullopt
// when the leaf is outside the compared subspace (zero-filled).
template <class Lookup>
double evaluate(const MetricTree& node, const Lookup& lookup) {
  switch (node.kind) {
    case NodeKind::dimension: {
      auto v = lookup(node.path);
      if (!v) return 0.0;
      if (node.comparison == Comparison::discrete) {
        return static_cast<double>(discrete_distance(v->first, v->second));
      }
      return std::abs(v->first - v->second);
    }
    case NodeKind::geodesic: {
      auto lat = lookup(node.children[0].path);
      auto lon = lookup(node.children[1].path);
      const auto a = lat.value_or(std::pair{0.0, 0.0});
      const auto b = lon.value_or(std::pair{0.0, 0.0});
      return haversine_km(a.first, b.first, a.second, b.second);
    }
    case NodeKind::minkowski: {
      MinkowskiAccumulator acc(node.order);
      for (const auto& c : node.children) acc.add(c.weight * evaluate(c, lookup));
      return acc.result();
    }
  }
  return 0.0;
}

}  // namespace detail

/// Distance on the subspace selected by `sel`: leaves outside J are mapped to
/// 0 in both vectors and therefore contribute nothing. Throws
/// Errc::not_comparable if either vector lacks a value on a dimension of J.
inline double induced_distance(const FeatureVector& x, const FeatureVector& y,
                               const SubspaceSelection& sel, const MetricTree& tree) {
  const auto leaves = tree.leaf_paths();
  for (const auto& p : sel.dimensions()) {
    if (std::find(leaves.begin(), leaves.end(), p) == leaves.end()) {
      fail(Errc::unknown_dimension, "dimension '" + p + "' is not part of the metric");
    }
    if (!x.defines(p) || !y.defines(p)) {
      fail(Errc::not_comparable, "vectors are not comparable on '" + p + "'");
    }
  }
  return detail::evaluate(tree, [&](const DimensionPath& p) -> std::optional<std::pair<double, double>> {
    if (!sel.contains(p)) return std::nullopt;
    return std::pair{*x.get(p), *y.get(p)};
  });
}

/// Non-throwing variant: nullopt when the vectors are not comparable on J.
inline std::optional<double> try_induced_distance(const FeatureVector& x, const FeatureVector& y,
                                                  const SubspaceSelection& sel,
                                                  const MetricTree& tree) {
  for (const auto& p : sel.dimensions()) {
    if (!x.defines(p) || !y.defines(p)) return std::nullopt;
  }
  return induced_distance(x, y, sel, tree);
}

/// Full nested distance over every leaf the tree reaches.
inline double nested_distance(const FeatureVector& x, const FeatureVector& y, const MetricTree& tree) {
  return induced_distance(x, y, SubspaceSelection(tree.leaf_paths()), tree);
}

/// A metric tree pruned to a selection of leaves and bound to slot positions,
/// evaluated over dense value vectors. Used on the search hot path.
class RestrictedMetric {
 public:
  RestrictedMetric() = default;

  RestrictedMetric(const MetricTree& tree, std::span<const DimensionPath> slots) {
    std::unordered_map<DimensionPath, int> index;
    for (std::size_t i = 0; i < slots.size(); ++i) index.emplace(slots[i], static_cast<int>(i));
    if (auto root = prune(tree, index)) root_ = std::move(*root);
    arity_ = slots.size();
  }

  [[nodiscard]] bool empty() const noexcept { return !root_.has_value(); }
  [[nodiscard]] std::size_t arity() const noexcept { return arity_; }

  [[nodiscard]] double operator()(std::span<const double> x, std::span<const double> y) const {
    if (!root_) return 0.0;
    return eval(*root_, x, y);
  }

 private:
  struct Node {
    NodeKind kind;
    double weight;
    int slot;  // -1: not selected (geodesic coordinates only)
    Comparison comparison;
    Order order;
    std::vector<Node> children;
  };

  static std::optional<Node> prune(const MetricTree& t, const std::unordered_map<DimensionPath, int>& index) {
    switch (t.kind) {
      case NodeKind::dimension: {
        auto it = index.find(t.path);
        if (it == index.end()) return std::nullopt;
        return Node{t.kind, t.weight, it->second, t.comparison, t.order, {}};
      }
      case NodeKind::geodesic: {
        Node n{t.kind, t.weight, -1, t.comparison, t.order, {}};
        bool any = false;
        for (const auto& c : t.children) {
          auto it = index.find(c.path);
          const int slot = it == index.end() ? -1 : it->second;
          any = any || slot >= 0;
          n.children.push_back(Node{NodeKind::dimension, 1.0, slot, Comparison::numeric, Order{}, {}});
        }
        if (!any) return std::nullopt;
        return n;
      }
      case NodeKind::minkowski: {
        Node n{t.kind, t.weight, -1, t.comparison, t.order, {}};
        for (const auto& c : t.children) {
          if (auto p = prune(c, index)) n.children.push_back(std::move(*p));
        }
        if (n.children.empty()) return std::nullopt;
        return n;
      }
    }
    return std::nullopt;
  }

  static double eval(const Node& n, std::span<const double> x, std::span<const double> y) {
    switch (n.kind) {
      case NodeKind::dimension:
        if (n.comparison == Comparison::discrete) {
          return static_cast<double>(discrete_distance(x[n.slot], y[n.slot]));
        }
        return std::abs(x[n.slot] - y[n.slot]);
      case NodeKind::geodesic: {
        auto at = [](std::span<const double> v, int slot) { return slot < 0 ? 0.0 : v[slot]; };
        return haversine_km(at(x, n.children[0].slot), at(x, n.children[1].slot),
                            at(y, n.children[0].slot), at(y, n.children[1].slot));
      }
      case NodeKind::minkowski: {
        detail::MinkowskiAccumulator acc(n.order);
        for (const auto& c : n.children) acc.add(c.weight * eval(c, x, y));
        return acc.result();
      }
    }
    return 0.0;
  }

  std::optional<Node> root_;
  std::size_t arity_ = 0;
};

/// How r_j = 1/s_j is estimated per dimension.
struct WeightEstimation {
  enum class Method { standard_deviation, percentile_spread };
  Method method = Method::standard_deviation;
  double p_lo = 25.0;
  double p_hi = 75.0;
  bool sample_sd = false;  // divide by n-1 instead of n
};

/// Linear-interpolated percentile (p in [0,100]) of an unsorted sample.
inline double percentile(std::vector<double> values, double p) {
  if (values.empty()) fail(Errc::invalid_argument, "percentile of empty sample");
  std::sort(values.begin(), values.end());
  const double pos = p / 100.0 * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

/// r_j = 1/s_j per dimension; s_j = 0 falls back to r_j = 1.
inline std::vector<double> estimate_weights(const std::vector<std::vector<double>>& samples,
                                            const WeightEstimation& how = {}) {
  if (samples.empty()) fail(Errc::invalid_argument, "estimate_weights: empty sample list");
  std::vector<double> weights;
  weights.reserve(samples.size());
  for (const auto& column : samples) {
    double spread = 0.0;
    if (how.method == WeightEstimation::Method::standard_deviation) {
      if (column.size() < 2) {
        fail(Errc::invalid_argument, "estimate_weights: need at least 2 samples per dimension");
      }
      double mean = 0.0;
      for (double v : column) mean += v;
      mean /= static_cast<double>(column.size());
      double ss = 0.0;
      for (double v : column) ss += (v - mean) * (v - mean);
      const double n = static_cast<double>(column.size()) - (how.sample_sd ? 1.0 : 0.0);
      spread = std::sqrt(ss / n);
    } else {
      if (!(how.p_lo >= 0.0 && how.p_hi <= 100.0 && how.p_lo < how.p_hi)) {
        fail(Errc::invalid_argument, "estimate_weights: need 0 <= p_lo < p_hi <= 100");
      }
      if (column.empty()) fail(Errc::invalid_argument, "estimate_weights: empty dimension sample");
      spread = percentile(column, how.p_hi) - percentile(column, how.p_lo);
    }
    weights.push_back(spread > 0.0 ? 1.0 / spread : 1.0);
  }
  return weights;
}

}  // namespace dspace
