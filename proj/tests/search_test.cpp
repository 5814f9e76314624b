#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "dspace/search.hpp"
#include "fixtures.hpp"

using namespace dspace;

namespace {

DimCondition sim(const std::string& path, double v, bool g = false) {
  DimCondition c;
  c.path = path;
  c.sim = v;
  c.g = g;
  return c;
}

class CupboardSearch : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    registry_ = new Registry;
    fixtures::register_cupboard(*registry_);
    snap_ = new IndexSnapshot(build_index(fixtures::cupboard_groups(*registry_), *registry_));
  }
  static void TearDownTestSuite() {
    delete snap_;
    delete registry_;
  }

  static Registry* registry_;
  static IndexSnapshot* snap_;
};

Registry* CupboardSearch::registry_ = nullptr;
IndexSnapshot* CupboardSearch::snap_ = nullptr;

std::vector<std::uint64_t> order(const SearchResult& r) {
  std::vector<std::uint64_t> out;
  for (const auto& h : r.hits) out.push_back(h.c);
  return out;
}

}  // namespace

TEST_F(CupboardSearch, PriceRankingMatchesTable) {
  SearchRequest req;
  req.dsi = fixtures::kCupboard;
  req.dims = {sim("Price", 0, true), DimCondition{"Width", {}, {}, {}, true, {}, {}}};
  const auto res = numeric_search(req, *snap_);
  EXPECT_EQ(order(res), (std::vector<std::uint64_t>{9, 2, 1, 10, 5, 0, 3, 4, 8, 22, 6, 11, 12, 13, 7, 14, 15, 19, 20,
                                                    21, 16, 18, 23, 17}));
  const auto rows = fixtures::cupboard_rows();
  for (const auto& h : res.hits) {
    EXPECT_DOUBLE_EQ(h.d, rows[h.c].price);
    EXPECT_EQ(h.values.at("Finances/Price").get<double>(), rows[h.c].price);
    EXPECT_EQ(h.values.at("Size/Width").get<double>(), rows[h.c].width);
  }
  EXPECT_EQ(res.total, 24u);
  EXPECT_EQ(res.scatter.size(), 24u);
  const auto& w = res.stats.at("Size/Width");
  EXPECT_DOUBLE_EQ(w.av, 188.375);
  EXPECT_EQ(w.min, 37);
  EXPECT_EQ(w.max, 383);
}

TEST_F(CupboardSearch, SingleDimensionWalkMatchesJoin) {
  for (double target : {0.0, 200.0, 599.0, 5000.0}) {
    SearchRequest walk;
    walk.dsi = fixtures::kCupboard;
    walk.dims = {sim("Price", target)};
    walk.pcnt = 7;
    SearchRequest join = walk;
    join.dims[0].min = -1e9;  // forces the column join path
    const auto a = numeric_search(walk, *snap_), b = numeric_search(join, *snap_);
    EXPECT_EQ(order(a), order(b)) << target;
  }
}

TEST_F(CupboardSearch, RangesPcntAndErrors) {
  SearchRequest req;
  req.dsi = fixtures::kCupboard;
  auto h = sim("Height", 200);
  h.min = 200.0;
  h.max = 220.0;
  DimCondition d{"Depth", {}, 60.0, {}, false, {}, {}};
  req.dims = {h, d};
  req.pcnt = 3;
  const auto res = numeric_search(req, *snap_);
  const auto rows = fixtures::cupboard_rows();
  std::size_t expected = 0;
  double closest = INFINITY;
  for (const auto& r : rows) {
    if (r.height < 200 || r.height > 220 || r.depth < 60) continue;
    ++expected;
    closest = std::min(closest, std::abs(r.height - 200));
  }
  EXPECT_EQ(res.total, expected);
  ASSERT_EQ(res.hits.size(), 3u);
  EXPECT_EQ(res.hits[0].d, closest);

  req.pcnt = 0;
  EXPECT_THROW(numeric_search(req, *snap_), Error);
  req.pcnt = 10;
  req.dsi = "urn:none";
  EXPECT_THROW(numeric_search(req, *snap_), Error);
  req.dsi = fixtures::kCupboard;
  req.dims = {DimCondition{"Width", {}, {}, {}, true, {}, {}}};
  EXPECT_THROW(numeric_search(req, *snap_), Error);
}

TEST_F(CupboardSearch, KeycommentWords) {
  SearchRequest req;
  req.dsi = fixtures::kCupboard;
  DimCondition w;
  w.path = std::string(kKeycommentPath);
  w.word = "Schrank";
  req.dims = {w, sim("Price", 0)};
  const auto res = numeric_search(req, *snap_);
  auto got = order(res);
  std::sort(got.begin(), got.end());
  EXPECT_EQ(got, (std::vector<std::uint64_t>{0, 5, 6, 7, 8, 10}));
}

TEST_F(CupboardSearch, FindDsByKeywordPrefix) {
  const auto hits = find_ds("cup", *registry_, snap_);
  ASSERT_EQ(hits.size(), 1u);
  EXPECT_EQ(hits[0].dsi, fixtures::kCupboard);
  EXPECT_EQ(hits[0].r, 24u);
  EXPECT_EQ(find_ds("", *registry_).size(), 3u);
}

TEST_F(CupboardSearch, CountersAndJson) {
  Counters counters;
  SearchRequest req;
  req.dsi = fixtures::kCupboard;
  req.dims = {sim("Price", 0)};
  counters.touch(9);
  const auto res = numeric_search(req, *snap_, &counters);
  EXPECT_EQ(counters.searches(fixtures::kCupboard), 1u);
  EXPECT_EQ(res.hits[0].a, 1u);
  const auto j = to_json(req);
  EXPECT_EQ(to_json(search_request_from_json(j)), j);
  EXPECT_THROW(search_request_from_json(Json{{"dsi", "x"}, {"pcnt", 5000}}), Error);
}

TEST(Stats, PopulationSd) {
  const std::vector<double> v = {2, 4, 4, 4, 5, 5, 7, 9};
  const auto s = compute_stats(v);
  EXPECT_EQ(s.av, 5.0);
  EXPECT_EQ(s.sd, 2.0);
  EXPECT_EQ(s.min, 2.0);
  EXPECT_EQ(s.max, 9.0);
}

TEST(Search, SameAsQueriesInOwnUnits) {
  Registry r;
  auto mk = [](const std::string& dsi) {
    DomainSpaceDef def;
    def.dsi = dsi;
    def.pair.fixed.keywords.push_back(Keyword{dsi, std::nullopt});
    DimensionDef d;
    d.di = "len";
    d.pair.fixed.keywords.push_back(Keyword{"len", std::nullopt});
    d.content = LeafContent{};
    def.dimensions.push_back(d);
    return def;
  };
  auto cm = mk("urn:cm");
  auto mm = mk("urn:mm");
  mm.dimensions[0].same_as = SameAs{10.0, 0.0, "urn:cm#len", std::nullopt};  // mm = 10 * cm
  r.put(cm);
  r.put(mm);
  std::map<std::string, FlatSchema> flat;
  for (const auto& d : r.all()) flat.emplace(d->dsi, flatten(*d, r));
  const auto groups = parse_dv_log("urn:cm; 10\nurn:mm; 250\nurn:cm; 40\n", [&](std::string_view dsi) -> const FlatSchema* {
    auto it = flat.find(std::string(dsi));
    return it == flat.end() ? nullptr : &it->second;
  });
  const auto snap = build_index(groups, r);
  EXPECT_EQ(snap.columns().size(), 1u);
  SearchRequest q;
  q.dsi = "urn:cm";
  q.dims = {sim("len", 20, true)};
  const auto res = numeric_search(q, snap);
  EXPECT_EQ(order(res), (std::vector<std::uint64_t>{1, 0, 2}));  // 25, 10, 40 cm
  EXPECT_DOUBLE_EQ(res.hits[0].values.at("len").get<double>(), 25.0);
  q.dsi = "urn:mm";
  q.dims = {sim("len", 200)};
  q.dims[0].max = 300.0;
  const auto mres = numeric_search(q, snap);
  EXPECT_EQ(order(mres), (std::vector<std::uint64_t>{1, 0}));
  EXPECT_DOUBLE_EQ(mres.hits[0].values.at("len").get<double>(), 250.0);
}

TEST(Search, RandomAgainstBruteForce) {
  std::mt19937_64 rng(21);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t dims = 1 + rng() % 6;
    DomainSpaceDef def;
    def.dsi = "urn:rand";
    def.pair.fixed.keywords.push_back(Keyword{"R", std::nullopt});
    def.metric = MetricSpec{MetricKind::minkowski, rep % 2 ? Order::euclidean() : Order::manhattan()};
    for (std::size_t i = 0; i < dims; ++i) {
      DimensionDef d;
      d.di = "v" + std::to_string(i);
      d.pair.fixed.keywords.push_back(Keyword{d.di, std::nullopt});
      d.weight = 0.5 + static_cast<double>(rng() % 4);
      LeafContent l;
      l.kind = LeafKind::integer;
      d.content = l;
      def.dimensions.push_back(d);
    }
    Registry r;
    r.put(def);
    const auto flat = flatten(def, r);
    std::vector<DVGroup> groups;
    std::vector<std::vector<std::optional<double>>> data;
    for (int n = 0; n < 300; ++n) {
      DomainVector dv;
      dv.dsi = def.dsi;
      std::vector<std::optional<double>> row(dims);
      for (std::size_t i = 0; i < dims; ++i) {
        if (rng() % 4 == 0) continue;
        row[i] = static_cast<double>(rng() % 20);
        dv.dims.push_back(DimensionInstance{"v" + std::to_string(i), *row[i], std::nullopt});
      }
      data.push_back(row);
      groups.push_back(DVGroup{{dv}});
    }
    const auto snap = build_index(groups, r);

    SearchRequest req;
    req.dsi = def.dsi;
    req.pcnt = 1 + rng() % 50;
    std::vector<std::size_t> searched;
    for (std::size_t i = 0; i < dims; ++i) {
      if (rng() % 2 == 0 && !(i + 1 == dims && searched.empty())) continue;
      searched.push_back(i);
      DimCondition c = sim("v" + std::to_string(i), static_cast<double>(rng() % 20));
      if (rng() % 3 == 0) c.min = static_cast<double>(rng() % 10);
      if (rng() % 3 == 0) c.max = static_cast<double>(10 + rng() % 10);
      req.dims.push_back(c);
    }
    std::vector<DimensionPath> paths;
    std::vector<double> query;
    for (const auto& c : req.dims) {
      paths.push_back(c.path);
      query.push_back(std::get<double>(*c.sim));
    }
    const RestrictedMetric metric(flat.tree, paths);
    std::vector<std::pair<double, std::uint64_t>> expected;
    for (std::uint64_t c = 0; c < data.size(); ++c) {
      std::vector<double> x;
      bool ok = true;
      for (std::size_t k = 0; k < searched.size() && ok; ++k) {
        const auto& v = data[c][searched[k]];
        const auto& cond = req.dims[k];
        ok = v && (!cond.min || *v >= std::get<double>(*cond.min)) && (!cond.max || *v <= std::get<double>(*cond.max));
        if (ok) x.push_back(*v);
      }
      if (ok) expected.emplace_back(metric(query, x), c);
    }
    std::sort(expected.begin(), expected.end());
    const auto res = numeric_search(req, snap);
    EXPECT_EQ(res.total, expected.size());
    expected.resize(std::min(expected.size(), req.pcnt));
    ASSERT_EQ(res.hits.size(), expected.size());
    for (std::size_t i = 0; i < expected.size(); ++i) {
      EXPECT_EQ(res.hits[i].c, expected[i].second);
      EXPECT_EQ(res.hits[i].d, expected[i].first);
    }
  }
}
