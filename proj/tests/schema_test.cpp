#include <gtest/gtest.h>

#include "dspace/schema.hpp"
#include "fixtures.hpp"

using namespace dspace;

namespace {

std::string minimal(const std::string& dims) {
  return R"({"dsi":"urn:t:a","owner":1,"metric":"M2","pair":{"fixed":{"keywords":[{"text":"A"}],"comment":""},"state":"ok"},"dimensions":[)" +
         dims + "]}";
}

std::string leaf_dim(const std::string& di, const std::string& leaf) {
  return R"({"di":")" + di + R"(","pair":{"fixed":{"keywords":[{"text":")" + di + R"("}]},"state":"ok"},"content":{"leaf":)" +
         leaf + "}}";
}

std::optional<Errc> code_of(const std::string& doc) {
  try {
    parse_ds_definition(doc);
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace

TEST(Definition, CanonicalRoundTrip) {
  for (const auto* name : {"finances", "size", "cupboard"}) {
    const auto def = fixtures::load_def(name);
    const auto text = serialize_ds_definition(def);
    const auto again = parse_ds_definition(text);
    EXPECT_EQ(again, def) << name;
    EXPECT_EQ(serialize_ds_definition(again), text) << name;
  }
}

TEST(Definition, UnknownFieldsSurvive) {
  const auto doc = minimal(leaf_dim("x", R"({"kind":"integer","unit":"cm"})"));
  const auto def = parse_ds_definition(doc);
  const auto j = to_json(def);
  EXPECT_EQ(j["dimensions"][0]["content"]["leaf"]["unit"], "cm");
  EXPECT_EQ(parse_ds_definition(serialize_ds_definition(def)), def);
}

TEST(Definition, ChecksumIgnoresChangeablePart) {
  auto def = fixtures::load_def("size");
  const auto before = fixed_part_checksum(def);
  EXPECT_EQ(before.size(), 64u);
  def.pair.changeable.comment = "new wording";
  def.dimensions[0].pair.changeable.keywords.push_back(Keyword{"Breite2", std::nullopt});
  EXPECT_EQ(fixed_part_checksum(def), before);
  def.dimensions[0].pair.fixed.keywords.push_back(Keyword{"Breite2", std::nullopt});
  EXPECT_NE(fixed_part_checksum(def), before);
}

TEST(Definition, ChecksumPrefixIsStableUnderAppend) {
  auto def = fixtures::load_def("size");
  const auto full = fixed_part_checksum(def);
  auto extra = def.dimensions.back();
  extra.di = "Weight";
  def.dimensions.push_back(extra);
  EXPECT_NE(fixed_part_checksum(def), full);
  EXPECT_EQ(fixed_part_checksum(def, 3), full);
}

TEST(Definition, SyntaxErrorsCarryPosition) {
  try {
    parse_ds_definition("{\n  \"dsi\": \"x\",\n  oops\n}");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_GE(e.column(), 3u);
  }
}

TEST(Definition, ValidationErrors) {
  EXPECT_EQ(code_of(minimal(leaf_dim("x", R"({"kind":"integer"})") + "," + leaf_dim("x", R"({"kind":"integer"})"))),
            Errc::duplicate_di);
  EXPECT_EQ(code_of(minimal(leaf_dim("bad di", R"({"kind":"integer"})"))), Errc::invalid_argument);
  EXPECT_EQ(code_of(minimal(leaf_dim("x", R"({"kind":"integer","min":5,"max":1})"))), Errc::invalid_argument);
  EXPECT_EQ(code_of(minimal(leaf_dim("x", R"({"kind":"list"})"))), Errc::invalid_interval);
  EXPECT_EQ(code_of(minimal(leaf_dim("x", R"({"kind":"integer","items":["a"]})"))), Errc::invalid_interval);
  EXPECT_EQ(code_of(minimal(leaf_dim("x", R"({"kind":"date","dateFormat":"dd.mm.yyyy"})"))), Errc::invalid_argument);
  auto weighted = minimal(leaf_dim("x", R"({"kind":"integer"})"));
  weighted.replace(weighted.find(R"("content")"), 0, R"("weight":0,)");
  EXPECT_EQ(code_of(weighted), Errc::invalid_weight);
}

TEST(Definition, IntervalTables) {
  auto list = [](const std::string& intervals) {
    return minimal(leaf_dim("g", R"({"kind":"list","listMode":"interval","intervals":)" + intervals + "}"));
  };
  EXPECT_EQ(code_of(list(R"([{"label":"low","upper":10},{"label":"mid","upper":20},{"label":"high"}])")), std::nullopt);
  EXPECT_EQ(code_of(list(R"([{"label":"low","upper":10},{"label":"mid","lower":5,"upper":20}])")),
            Errc::invalid_interval);
  EXPECT_EQ(code_of(list(R"([{"label":"low"},{"label":"high","lower":3}])")), Errc::invalid_interval);
  EXPECT_EQ(code_of(list(R"([{"label":"a","lower":9,"upper":3}])")), Errc::invalid_interval);
  EXPECT_EQ(code_of(list(R"([{"label":"a","upper":3},{"label":"a"}])")), Errc::invalid_interval);
}

TEST(Definition, MetricStrings) {
  EXPECT_EQ(parse_metric_string("M1")->order.value(), 1.0);
  EXPECT_TRUE(parse_metric_string("Minf")->order.is_infinite());
  EXPECT_EQ(parse_metric_string("GPS")->kind, MetricKind::geodesic);
  EXPECT_FALSE(parse_metric_string("M0.5"));
  EXPECT_FALSE(parse_metric_string("L2"));
  EXPECT_EQ(metric_string(*parse_metric_string("M2.5")), "M2.5");
}

TEST(Definition, ComputedDimensionNeedsSiblings) {
  const auto ok = minimal(leaf_dim("w", R"({"kind":"integer"})") + "," + leaf_dim("h", R"({"kind":"integer"})") +
                          R"(,{"di":"area","pair":{"fixed":{"keywords":[{"text":"area"}]}},"content":{"computed":{"expr":"w*h"}}})");
  EXPECT_EQ(code_of(ok), std::nullopt);
  auto bad = ok;
  bad.replace(bad.find("w*h"), 3, "w*z");
  EXPECT_EQ(code_of(bad), Errc::invalid_argument);
}

TEST(Definition, GeodesicNeedsTwoNumericLeaves) {
  auto doc = minimal(leaf_dim("lat", R"({"kind":"float-max"})"));
  doc.replace(doc.find("\"M2\""), 4, "\"GPS\"");
  EXPECT_EQ(code_of(doc), Errc::invalid_argument);
}
