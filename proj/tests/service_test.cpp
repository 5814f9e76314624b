#include <gtest/gtest.h>

#include <fstream>

#include "dspace/service.hpp"
#include "fixtures.hpp"

using namespace dspace;

namespace {

class ServiceTest : public ::testing::Test {
 protected:
  HttpResponse call(const std::string& method, const std::string& target, const std::string& body = "",
                    std::optional<std::string> owner = std::nullopt) {
    return service_.handle(HttpRequest{method, target, body, std::move(owner)});
  }

  static Json json(const HttpResponse& r) { return Json::parse(r.body); }

  void load_cupboard() {
    for (const auto* n : {"finances", "size", "cupboard"}) {
      const auto r = call("POST", "/ds", read_file(fixtures::samples() / "cupboard" / (std::string(n) + ".json")), "1");
      ASSERT_EQ(r.status, 201) << r.body;
    }
    const auto log = read_file(fixtures::samples() / "cupboard" / "dvs.log");
    const auto r = call("POST", "/ds/" + text::percent_encode(fixtures::kCupboard) + "/dv", Json{{"log", log}}.dump());
    ASSERT_EQ(r.status, 201) << r.body;
    ASSERT_EQ(call("POST", "/index/build").status, 200);
  }

  fixtures::TempDir dir_;
  Store store_{dir_.path()};
  Service service_{store_};
};

}  // namespace

TEST_F(ServiceTest, HealthAndRouting) {
  auto r = call("GET", "/healthz");
  EXPECT_EQ(r.status, 200);
  EXPECT_EQ(json(r)["snapshot"], false);
  EXPECT_EQ(call("GET", "/nowhere").status, 404);
  EXPECT_EQ(call("DELETE", "/ds").status, 405);
  EXPECT_EQ(call("GET", "/search").status, 405);
}

TEST_F(ServiceTest, DefineIsIdempotentWithStableChecksum) {
  const auto doc = read_file(fixtures::samples() / "cupboard" / "size.json");
  const auto a = call("POST", "/ds", doc, "1");
  EXPECT_EQ(a.status, 201);
  const auto b = call("POST", "/ds", doc, "1");
  EXPECT_EQ(b.status, 200);
  EXPECT_EQ(json(a)["checksum"], json(b)["checksum"]);
  EXPECT_EQ(json(b)["version"], 1);
  const auto g = call("GET", "/ds/" + text::percent_encode(fixtures::kBase + "size"));
  EXPECT_EQ(g.status, 200);
  EXPECT_EQ(json(g)["checksum"], json(a)["checksum"]);
  EXPECT_EQ(call("GET", "/ds/urn%3Amissing").status, 404);
}

TEST_F(ServiceTest, DefinitionErrors) {
  auto def = fixtures::load_def("size");
  call("POST", "/ds", serialize_ds_definition(def), "1");
  auto changed = def;
  changed.pair.fixed.keywords[0].text = "Dimensions";
  auto r = call("POST", "/ds", serialize_ds_definition(changed), "1");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(json(r)["code"], "fixed_part_mutation");
  auto dep = def;
  dep.pair.state = PairState::draft;
  EXPECT_EQ(call("POST", "/ds", serialize_ds_definition(dep), "1").status, 409);
  auto other = def;
  other.dsi = "urn:other";
  EXPECT_EQ(call("POST", "/ds", serialize_ds_definition(other), "2").status, 403);
  EXPECT_EQ(call("POST", "/ds", serialize_ds_definition(other), "abc").status, 400);
  r = call("POST", "/ds", "{ not json");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(json(r)["code"], "parse_error");
}

TEST_F(ServiceTest, SearchBeforeIndexIs503) {
  auto r = call("POST", "/search", R"({"dsi":"x","dims":[{"path":"a","sim":1}]})");
  EXPECT_EQ(r.status, 503);
  EXPECT_EQ(json(r)["code"], "no_snapshot");
}

TEST_F(ServiceTest, CupboardWorkflow) {
  load_cupboard();
  const auto found = json(call("GET", "/ds?query=cup"));
  ASSERT_EQ(found["results"].size(), 1u);
  EXPECT_EQ(found["results"][0]["r"], 24);

  const auto req = read_file(fixtures::samples() / "cupboard" / "queries" / "price.json");
  const auto r = call("POST", "/search", req);
  ASSERT_EQ(r.status, 200) << r.body;
  const auto res = json(r);
  ASSERT_EQ(res["hits"].size(), 24u);
  EXPECT_EQ(res["hits"][0]["c"], 9);
  EXPECT_EQ(res["hits"][0]["d"], 59.0);

  const auto d = call("GET", "/dv/6");
  ASSERT_EQ(d.status, 200) << d.body;
  const auto detail = json(d);
  const auto& v = detail["members"][0]["values"];
  EXPECT_EQ(v["Finances/Price"], 362.9);
  EXPECT_EQ(v["Size/Width"], 174);
  EXPECT_EQ(v["Size/Depth"], 50);
  EXPECT_EQ(v["Size/Height"], 179);
  EXPECT_EQ(detail["a"], 1);
  EXPECT_EQ(json(call("GET", "/dv/6"))["a"], 2);
  EXPECT_EQ(call("GET", "/dv/99").status, 404);
  EXPECT_EQ(call("GET", "/dv/x").status, 400);

  // the access count shows up in later searches
  const auto again = json(call("POST", "/search", req));
  for (const auto& h : again["hits"]) {
    if (h["c"] == 6) {
      EXPECT_EQ(h["a"], 2);
    }
  }
}

TEST_F(ServiceTest, HttpMatchesLibrarySearch) {
  load_cupboard();
  SearchRequest req;
  req.dsi = fixtures::kCupboard;
  DimCondition c;
  c.path = "Height";
  c.sim = 200.0;
  c.min = 150.0;
  req.dims = {c};
  const auto via_http = json(call("POST", "/search", to_json(req).dump()));
  const auto direct = to_json(numeric_search(req, *store_.require_snapshot()));
  EXPECT_EQ(via_http["hits"], direct["hits"]);
  EXPECT_EQ(via_http["total"], direct["total"]);
}

TEST_F(ServiceTest, IngestVariants) {
  for (const auto* n : {"finances", "size", "cupboard"}) {
    call("POST", "/ds", read_file(fixtures::samples() / "cupboard" / (std::string(n) + ".json")), "1");
  }
  const auto url = "/ds/" + text::percent_encode(fixtures::kCupboard) + "/dv";
  auto r = call("POST", url, Json{{"dv", fixtures::kCupboard + "; 10; 20; 30; 40"}}.dump());
  EXPECT_EQ(r.status, 201) << r.body;
  EXPECT_EQ(json(r)["first"], 0);
  r = call("POST", url, Json{{"group", {fixtures::kCupboard + "; 11", fixtures::kBase + "size; 1; 2; 3"}}}.dump());
  EXPECT_EQ(r.status, 201) << r.body;
  EXPECT_EQ(json(r)["first"], 1);
  EXPECT_EQ(store_.group(1)->members.size(), 2u);
  r = call("POST", url, Json{{"dv", fixtures::kBase + "size; 1; 2; 3"}}.dump());
  EXPECT_EQ(r.status, 400);
  r = call("POST", url, Json{{"dv", fixtures::kCupboard + "; 1; 2; 3; 4; 5"}}.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(json(r)["code"], "arity_overflow");
  EXPECT_EQ(call("POST", "/ds/urn%3Anone/dv", R"({"dv":"x"})").status, 404);
  EXPECT_EQ(store_.group_count(), 2u);
}

TEST(Store, ReopensAndDropsTornLine) {
  fixtures::TempDir dir;
  {
    Store s(dir.path());
    for (const auto* n : {"finances", "size", "cupboard"}) s.define(fixtures::load_def(n));
    s.ingest_text(read_file(fixtures::samples() / "cupboard" / "dvs.log"));
    s.build_index();
  }
  {
    std::ofstream os(dir.path() / "dvs.log", std::ios::app);
    os << fixtures::kCupboard << "; 1; 2";  // no newline: an interrupted append
  }
  Store s(dir.path());
  EXPECT_EQ(s.registry().size(), 3u);
  EXPECT_EQ(s.group_count(), 24u);
  ASSERT_NE(s.snapshot(), nullptr);
  EXPECT_EQ(s.snapshot()->report().accepted, 24u);
  EXPECT_EQ(read_file(dir.path() / "dvs.log").back(), '\n');
  EXPECT_TRUE(std::filesystem::exists(dir.path() / "definitions" / text::percent_encode(fixtures::kCupboard) / "1.json"));
}
