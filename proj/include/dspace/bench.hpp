#pragma once

// Synthetic benchmark: a space of `dims` float dimensions filled with
// uniform values in [0, 10), searched by similarity on 1..10 random
// dimensions.
//
// PRNG (xorshift64*), reproducible in any language:
//   x ^= x >> 12; x ^= x << 25; x ^= x >> 27; out = x * 0x2545F4914F6CDD1D
//   uniform = (out >> 11) * 2^-53 * 10
// Data: for each DV in order, for each dimension in order, one uniform draw
// from a generator seeded with `seed`. Queries use a second generator seeded
// with seed ^ 0x9E3779B97F4A7C15.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

#include "dspace/index.hpp"
#include "dspace/search.hpp"

namespace dspace {

class XorShift64Star {
 public:
  explicit XorShift64Star(std::uint64_t seed) : x_(seed ? seed : 0x853C49E6748FEA9BULL) {}

  std::uint64_t next() {
    x_ ^= x_ >> 12;
    x_ ^= x_ << 25;
    x_ ^= x_ >> 27;
    return x_ * 0x2545F4914F6CDD1DULL;
  }

  /// Uniform in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform10() { return unit() * 10.0; }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) { return n ? next() % n : 0; }

 private:
  std::uint64_t x_;
};

struct BenchConfig {
  std::size_t dims = 64;
  std::size_t dvs = 100000;
  std::size_t searches = 20;
  std::uint64_t seed = 1;
  std::size_t max_d = 10;
  std::size_t pcnt = kMaxPcnt;
  std::size_t rounds = 1;  // repeated batches; the fastest batch mean is reported
  Order order = Order::manhattan();
};

inline std::string bench_dsi(std::size_t dims) { return "urn:dspace:bench:" + std::to_string(dims); }

inline DomainSpaceDef bench_space(std::size_t dims, Order order = Order::manhattan()) {
  DomainSpaceDef def;
  def.dsi = bench_dsi(dims);
  def.pair.fixed.keywords.push_back(Keyword{"Benchmark", std::nullopt});
  def.metric = MetricSpec{MetricKind::minkowski, order};
  for (std::size_t i = 0; i < dims; ++i) {
    DimensionDef d;
    d.di = "d" + std::to_string(i);
    d.pair.fixed.keywords.push_back(Keyword{d.di, std::nullopt});
    LeafContent leaf;
    leaf.kind = LeafKind::float_max;
    d.content = leaf;
    def.dimensions.push_back(std::move(d));
  }
  return def;
}

/// Builds the synthetic store directly through IndexBuilder (no DV log).
inline IndexSnapshot build_bench_index(const BenchConfig& cfg, IndexOptions options = {}) {
  if (cfg.dims < 1 || cfg.dvs < 1) fail(Errc::invalid_argument, "bench needs dims >= 1 and dvs >= 1");
  Registry registry;
  registry.put(bench_space(cfg.dims, cfg.order));
  options.postings = false;
  IndexBuilder b(options);
  const auto dsi = bench_dsi(cfg.dims);
  std::vector<std::size_t> cols(cfg.dims);
  for (std::size_t i = 0; i < cfg.dims; ++i) cols[i] = b.column_id(dimension_url(dsi, "d" + std::to_string(i)), LeafKind::float_max);
  XorShift64Star rng(cfg.seed);
  for (std::size_t n = 0; n < cfg.dvs; ++n) {
    RecordEntry meta;
    meta.dsis = {dsi};
    meta.group = n;
    b.begin(std::move(meta));
    for (std::size_t i = 0; i < cfg.dims; ++i) b.add(cols[i], rng.uniform10());
    b.commit();
  }
  std::vector<DomainSpaceDef> defs;
  for (const auto& d : registry.all()) defs.push_back(*d);
  b.set_schemas(flatten_all(registry, options.depth_limit), std::move(defs), resolve_same_as(registry));
  return b.finish();
}

/// `d` distinct dimensions with random sim targets.
inline SearchRequest bench_query(std::size_t dims, std::size_t d, XorShift64Star& rng, std::size_t pcnt = kMaxPcnt) {
  std::vector<std::size_t> pick(dims);
  std::iota(pick.begin(), pick.end(), 0);
  for (std::size_t i = 0; i < d; ++i) std::swap(pick[i], pick[i + rng.below(dims - i)]);
  SearchRequest req;
  req.dsi = bench_dsi(dims);
  req.pcnt = pcnt;
  for (std::size_t i = 0; i < d; ++i) {
    DimCondition c;
    c.path = "d" + std::to_string(pick[i]);
    c.sim = rng.uniform10();
    req.dims.push_back(std::move(c));
  }
  return req;
}

struct BenchPoint {
  std::size_t d = 0;
  double mean_ms = 0.0;
  std::vector<std::size_t> columns_read;  // per search
  std::uint64_t records_read = 0;         // summed over the batch
};

struct BenchReport {
  std::size_t dims = 0;
  std::size_t dvs = 0;
  std::uint64_t seed = 0;
  double build_ms = 0.0;
  std::vector<BenchPoint> points;
};

inline std::vector<BenchPoint> run_bench_searches(const IndexSnapshot& snap, const BenchConfig& cfg) {
  const std::size_t max_d = std::min(cfg.max_d, cfg.dims);
  std::vector<BenchPoint> points(max_d);
  for (std::size_t d = 1; d <= max_d; ++d) points[d - 1].d = d;
  std::vector<double> best(max_d, INFINITY);
  for (std::size_t round = 0; round < std::max<std::size_t>(cfg.rounds, 1); ++round) {
    XorShift64Star qrng(cfg.seed ^ 0x9E3779B97F4A7C15ULL);
    for (std::size_t d = 1; d <= max_d; ++d) {
      std::vector<SearchRequest> batch;
      for (std::size_t s = 0; s < cfg.searches; ++s) batch.push_back(bench_query(cfg.dims, d, qrng, cfg.pcnt));
      auto& pt = points[d - 1];
      pt.columns_read.clear();
      pt.records_read = 0;
      double total = 0.0;
      for (const auto& req : batch) {
        snap.reset_reads();
        const auto t0 = std::chrono::steady_clock::now();
        const auto res = numeric_search(req, snap);
        const auto t1 = std::chrono::steady_clock::now();
        total += std::chrono::duration<double, std::milli>(t1 - t0).count();
        pt.columns_read.push_back(snap.columns_read());
        for (std::size_t i = 0; i < snap.columns().size(); ++i) pt.records_read += snap.reads(i);
        if (res.hits.empty()) fail(Errc::invalid_argument, "bench search returned no hits");
      }
      best[d - 1] = std::min(best[d - 1], total / static_cast<double>(std::max<std::size_t>(cfg.searches, 1)));
    }
  }
  for (std::size_t i = 0; i < max_d; ++i) points[i].mean_ms = best[i];
  return points;
}

inline BenchReport run_bench(const BenchConfig& cfg) {
  BenchReport r{cfg.dims, cfg.dvs, cfg.seed, 0.0, {}};
  IndexOptions options;
  options.sorted_index = false;
  const auto t0 = std::chrono::steady_clock::now();
  const auto snap = build_bench_index(cfg, options);
  r.build_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  r.points = run_bench_searches(snap, cfg);
  return r;
}

inline Json to_json(const BenchReport& r) {
  Json pts = Json::array();
  for (const auto& p : r.points) {
    pts.push_back(Json{{"d", p.d}, {"meanMs", p.mean_ms}, {"columnsRead", p.columns_read}, {"recordsRead", p.records_read}});
  }
  return Json{{"dims", r.dims}, {"dvs", r.dvs}, {"seed", r.seed}, {"buildMs", r.build_ms}, {"points", std::move(pts)}};
}

}  // namespace dspace
