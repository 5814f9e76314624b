#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "dspace/metric.hpp"

using namespace dspace;

namespace {

std::vector<double> v(std::initializer_list<double> xs) { return xs; }

// Random tree over leaves "x0".."x{n-1}" with depth <= max_depth.
MetricTree random_tree(std::mt19937_64& rng, int depth, int max_depth, int& next_leaf, Order order) {
  std::uniform_real_distribution<double> w(0.1, 3.0);
  std::uniform_int_distribution<int> fan(1, 3);
  std::vector<MetricTree> kids;
  const int n = fan(rng);
  for (int i = 0; i < n; ++i) {
    if (depth < max_depth && rng() % 3 == 0) {
      kids.push_back(random_tree(rng, depth + 1, max_depth, next_leaf, order));
    } else {
      kids.push_back(MetricTree::dimension("x" + std::to_string(next_leaf++), w(rng)));
    }
  }
  return MetricTree::minkowski(order, std::move(kids), depth == 1 ? 1.0 : w(rng));
}

}  // namespace

TEST(Minkowski, KnownValues) {
  const auto x = v({0, 0}), y = v({3, 4}), ones = v({1, 1});
  EXPECT_DOUBLE_EQ(minkowski_distance(x, y, ones, Order::manhattan()), 7.0);
  EXPECT_DOUBLE_EQ(minkowski_distance(x, y, ones, Order::euclidean()), 5.0);
  EXPECT_DOUBLE_EQ(minkowski_distance(x, y, ones, Order::infinity()), 4.0);
  EXPECT_NEAR(minkowski_distance(x, y, ones, Order(3.0)), std::cbrt(27.0 + 64.0), 1e-12);
}

TEST(Minkowski, WeightsScaleTerms) {
  const auto x = v({1, 5}), y = v({2, 1}), r = v({2, 0.5});
  EXPECT_DOUBLE_EQ(minkowski_distance(x, y, r, Order::manhattan()), 2.0 * 1 + 0.5 * 4);
  EXPECT_DOUBLE_EQ(minkowski_distance(x, y, r, Order::infinity()), 2.0);
}

TEST(Minkowski, OrderBelowOneRejected) {
  EXPECT_THROW(Order(0.5), Error);
  EXPECT_THROW(Order(std::nan("")), Error);
  EXPECT_TRUE(Order::infinity().is_infinite());
}

TEST(Minkowski, LengthMismatchRejected) {
  const auto x = v({1, 2}), y = v({1}), r = v({1, 1});
  EXPECT_THROW(minkowski_distance(x, y, r, Order::manhattan()), Error);
}

TEST(Haversine, MeridianArcs) {
  const double pi = std::acos(-1.0);
  EXPECT_NEAR(haversine_km(0, 0, 90, 0), pi / 2 * kEarthRadiusKm, 1e-9);
  EXPECT_NEAR(haversine_km(0, 0, 0, 180), pi * kEarthRadiusKm, 1e-9);
  EXPECT_DOUBLE_EQ(haversine_km(48.1, 11.6, 48.1, 11.6), 0.0);
}

TEST(InducedMetric, IgnoresDimensionsOutsideSelection) {
  const auto tree = MetricTree::minkowski(Order::manhattan(), {MetricTree::dimension("a"), MetricTree::dimension("b"),
                                                               MetricTree::dimension("c")});
  FeatureVector x{{"a", 1}, {"b", 100}};
  FeatureVector y{{"a", 4}, {"c", -7}};
  EXPECT_DOUBLE_EQ(induced_distance(x, y, SubspaceSelection{"a"}, tree), 3.0);
  EXPECT_THROW(induced_distance(x, y, SubspaceSelection{"a", "b"}, tree), Error);
  EXPECT_FALSE(try_induced_distance(x, y, SubspaceSelection{"c"}, tree).has_value());
  EXPECT_THROW(induced_distance(x, y, SubspaceSelection{"zzz"}, tree), Error);
}

TEST(InducedMetric, DuplicateSelectionRejected) { EXPECT_THROW(SubspaceSelection({"a", "a"}), Error); }

TEST(NestedMetric, EuclidOfManhattanByHand) {
  // outer L2 over (inner L1 over p,q weighted 2) and r
  const auto tree = MetricTree::minkowski(
      Order::euclidean(),
      {MetricTree::minkowski(Order::manhattan(), {MetricTree::dimension("p"), MetricTree::dimension("q")}, 2.0),
       MetricTree::dimension("r")});
  FeatureVector x{{"p", 0}, {"q", 0}, {"r", 0}};
  FeatureVector y{{"p", 1}, {"q", 2}, {"r", 8}};
  EXPECT_DOUBLE_EQ(nested_distance(x, y, tree), std::sqrt(36.0 + 64.0));
}

TEST(NestedMetric, DiscreteLeaves) {
  const auto tree = MetricTree::minkowski(Order::manhattan(),
                                          {MetricTree::dimension("t", 1.0, Comparison::discrete), MetricTree::dimension("n")});
  FeatureVector x{{"t", 3}, {"n", 1}};
  FeatureVector y{{"t", 5}, {"n", 1}};
  FeatureVector z{{"t", 3}, {"n", 2.5}};
  EXPECT_DOUBLE_EQ(nested_distance(x, y, tree), 1.0);
  EXPECT_DOUBLE_EQ(nested_distance(x, z, tree), 1.5);
}

TEST(NestedMetric, GeodesicNode) {
  const auto tree = MetricTree::minkowski(Order::manhattan(), {MetricTree::geodesic("lat", "lon")});
  FeatureVector x{{"lat", 0}, {"lon", 0}};
  FeatureVector y{{"lat", 0}, {"lon", 90}};
  EXPECT_NEAR(nested_distance(x, y, tree), std::acos(-1.0) / 2 * kEarthRadiusKm, 1e-9);
}

TEST(NestedMetric, LeafWeightScalingIsHomogeneous) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (auto order : {Order::manhattan(), Order::euclidean(), Order(3.0), Order::infinity()}) {
    for (int rep = 0; rep < 50; ++rep) {
      int n = 0;
      auto tree = random_tree(rng, 1, 3, n, order);
      auto scaled = tree;
      const double lambda = 2.5;
      std::function<void(MetricTree&)> scale = [&](MetricTree& t) {
        if (t.kind == NodeKind::dimension) t.weight *= lambda;
        for (auto& c : t.children) scale(c);
      };
      scale(scaled);
      FeatureVector x, y;
      for (int i = 0; i < n; ++i) {
        x.set("x" + std::to_string(i), u(rng));
        y.set("x" + std::to_string(i), u(rng));
      }
      const double d = nested_distance(x, y, tree);
      EXPECT_NEAR(nested_distance(x, y, scaled), lambda * d, 1e-9 * std::max(1.0, d));
    }
  }
}

TEST(RestrictedMetric, MatchesInducedDistance) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-5, 5);
  for (int rep = 0; rep < 300; ++rep) {
    const Order order = rep % 2 ? Order::manhattan() : Order::euclidean();
    int n = 0;
    const auto tree = random_tree(rng, 1, 3, n, order);
    std::vector<DimensionPath> slots;
    for (int i = 0; i < n; ++i) {
      if (rng() % 2) slots.push_back("x" + std::to_string(i));
    }
    if (slots.empty()) slots.push_back("x0");
    std::vector<double> xs, ys;
    FeatureVector fx, fy;
    for (const auto& s : slots) {
      xs.push_back(u(rng));
      ys.push_back(u(rng));
      fx.set(s, xs.back());
      fy.set(s, ys.back());
    }
    const RestrictedMetric m(tree, slots);
    EXPECT_DOUBLE_EQ(m(xs, ys), induced_distance(fx, fy, SubspaceSelection(slots), tree));
  }
}

TEST(WeightEstimation, InverseOfPopulationSd) {
  const std::vector<std::vector<double>> samples = {{2, 4, 4, 4, 5, 5, 7, 9}, {3, 3, 3}};
  const auto r = estimate_weights(samples);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r[0], 0.5);  // population sd of the first sample is 2
  EXPECT_DOUBLE_EQ(r[1], 1.0);  // zero spread falls back to 1
}

TEST(WeightEstimation, SampleSdAndPercentiles) {
  const std::vector<std::vector<double>> samples = {{1, 2, 3, 4, 5}};
  WeightEstimation how;
  how.sample_sd = true;
  EXPECT_NEAR(estimate_weights(samples, how)[0], 1.0 / std::sqrt(2.5), 1e-15);
  how.method = WeightEstimation::Method::percentile_spread;
  EXPECT_DOUBLE_EQ(estimate_weights(samples, how)[0], 0.5);  // IQR = 4 - 2
  EXPECT_DOUBLE_EQ(percentile({10, 0, 5}, 50), 5.0);
  EXPECT_THROW(estimate_weights({{1.0}}), Error);
}

TEST(MetricAxioms, RandomTreesSmallSample) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-100, 100);
  for (auto order : {Order::manhattan(), Order::euclidean(), Order(3.0), Order::infinity()}) {
    for (int rep = 0; rep < 200; ++rep) {
      int n = 0;
      const auto tree = random_tree(rng, 1, 3, n, order);
      FeatureVector x, y, z;
      for (int i = 0; i < n; ++i) {
        const auto p = "x" + std::to_string(i);
        x.set(p, u(rng));
        y.set(p, u(rng));
        z.set(p, u(rng));
      }
      const double dxy = nested_distance(x, y, tree), dyx = nested_distance(y, x, tree);
      const double dxz = nested_distance(x, z, tree), dzy = nested_distance(z, y, tree);
      EXPECT_GE(dxy, 0.0);
      EXPECT_EQ(dxy, dyx);
      EXPECT_EQ(nested_distance(x, x, tree), 0.0);
      EXPECT_LE(dxy, (dxz + dzy) * (1 + 1e-9));
    }
  }
}
