#include <gtest/gtest.h>

#include <random>

#include "dspace/rdf.hpp"
#include "dspace/registry.hpp"

using namespace dspace;

TEST(NTriples, ParsesTermsVerbatim) {
  const std::string doc =
      "# header\n"
      "<http://ex/s> <http://ex/p> \"hello \\\"world\\\"\"@en .\n"
      "_:b1 <http://ex/p> \"42\"^^<http://www.w3.org/2001/XMLSchema#integer> .\r\n"
      "\n"
      "<http://ex/s> <http://ex/q> <http://ex/o> . # trailing comment\n";
  const auto t = parse_ntriples(doc);
  ASSERT_EQ(t.size(), 3u);
  EXPECT_EQ(t[0].object, "\"hello \\\"world\\\"\"@en");
  EXPECT_EQ(t[1].subject, "_:b1");
  EXPECT_EQ(t[1].object, "\"42\"^^<http://www.w3.org/2001/XMLSchema#integer>");
  EXPECT_EQ(t[2].object, "<http://ex/o>");
  EXPECT_EQ(parse_ntriples(write_ntriples(t)), t);
}

TEST(NTriples, ErrorsCarryLine) {
  try {
    parse_ntriples("<a> <b> <c> .\n<a> <b> \"open .\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
  }
  EXPECT_THROW(parse_ntriples("<a> <b> <c>\n"), ParseError);
  EXPECT_THROW(parse_ntriples("<a> <b> <c> . extra\n"), ParseError);
}

TEST(RdfBridge, MultiValuedPredicatesUseReplicas) {
  const std::vector<Triple> triples = {
      {"<s1>", "<knows>", "<a>"}, {"<s1>", "<knows>", "<b>"}, {"<s1>", "<name>", "\"S\""},
      {"<s2>", "<knows>", "<a>"}, {"<s1>", "<knows>", "<a>"},
  };
  const auto m = triples_to_dvs(triples);
  ASSERT_EQ(m.spaces.size(), 1u);
  ASSERT_EQ(m.spaces[0].dimensions.size(), 3u);  // knows x2, name x1
  EXPECT_EQ(m.spaces[0].dimensions[1].pair.fixed.keywords[1].text, "replica:2");
  ASSERT_EQ(m.groups.size(), 2u);
  EXPECT_EQ(m.groups[0].resource(), "<s1>");
  EXPECT_EQ(m.groups[0].members[0].dims.size(), 3u);
  auto back = dvs_to_triples(m.spaces, m.groups);
  std::set<Triple> expected(triples.begin(), triples.end());
  EXPECT_EQ(back, std::vector<Triple>(expected.begin(), expected.end()));
}

TEST(RdfBridge, ChunksChainAndRoundTrip) {
  std::vector<Triple> triples;
  for (int p = 0; p < 600; ++p) triples.push_back({"<s>", "<p" + std::to_string(p) + ">", "\"v\""});
  const auto m = triples_to_dvs(triples, "urn:chunk");
  ASSERT_EQ(m.spaces.size(), 3u);
  EXPECT_EQ(m.spaces[0].dimensions.size(), kRdfChunkDims);
  EXPECT_EQ(m.spaces[0].extra["next"], "urn:chunk/1");
  EXPECT_EQ(m.spaces[1].extra["next"], "urn:chunk/2");
  EXPECT_FALSE(m.spaces[2].extra.contains("next"));
  ASSERT_EQ(m.groups.size(), 1u);
  EXPECT_EQ(m.groups[0].members.size(), 3u);
  auto sorted = triples;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(dvs_to_triples(m.spaces, m.groups), sorted);
  for (const auto& s : m.spaces) EXPECT_NO_THROW(validate(s));
}

TEST(RdfBridge, ForeignSpacesRejected) {
  DomainSpaceDef def;
  def.dsi = "urn:plain";
  def.pair.fixed.keywords.push_back(Keyword{"Plain", std::nullopt});
  DimensionDef d;
  d.di = "x";
  d.pair.fixed.keywords.push_back(Keyword{"x", std::nullopt});
  d.content = LeafContent{};
  def.dimensions.push_back(d);
  const std::vector<DomainSpaceDef> spaces = {def};
  try {
    dvs_to_triples(spaces, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::not_bridge_generated);
  }
}

TEST(RdfBridge, RandomRoundTrip) {
  std::mt19937_64 rng(31);
  std::vector<Triple> triples;
  for (int i = 0; i < 2000; ++i) {
    triples.push_back({"<s" + std::to_string(rng() % 50) + ">", "<p" + std::to_string(rng() % 20) + ">",
                       "\"o" + std::to_string(rng() % 30) + "\""});
  }
  const auto m = triples_to_dvs(triples);
  std::set<Triple> expected(triples.begin(), triples.end());
  EXPECT_EQ(dvs_to_triples(m.spaces, m.groups), std::vector<Triple>(expected.begin(), expected.end()));
}
