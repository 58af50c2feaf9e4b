#include <gtest/gtest.h>

#include "fedra/query.hpp"
#include "support.hpp"

namespace fedra {
namespace {

using testing::running_query;
using testing::tp;

TEST(ParseQuery, Q1IsConstructWithOneBgp) {
  const Query q = running_query(1);
  EXPECT_EQ(q.form, QueryForm::Construct);
  ASSERT_EQ(q.body.size(), 1U);
  EXPECT_EQ(q.body[0].patterns, std::vector<TriplePattern>{tp("?x1 p1 ?x2")});
}

TEST(ParseQuery, Q3IsDistinctUnionOfThreeBgps) {
  const Query q = running_query(3);
  EXPECT_EQ(q.form, QueryForm::Select);
  EXPECT_TRUE(q.distinct);
  ASSERT_EQ(q.body.size(), 3U);
  for (const auto& bgp : q.body) EXPECT_EQ(bgp.patterns.size(), 2U);
  EXPECT_EQ(q.body[1].patterns[1], tp("?x2 p5 ?x3"));
  EXPECT_EQ(q.triple_pattern_count(), 6U);
}

TEST(ParseQuery, OptionalIsUnsupported) {
  try {
    parse_query("SELECT * WHERE { ?x p ?y OPTIONAL { ?y q ?z } }");
    FAIL() << "expected an error";
  } catch (const UnsupportedOperator& e) {
    EXPECT_NE(std::string(e.what()).find("unsupported operator"), std::string::npos);
  }
  EXPECT_THROW(parse_query("SELECT * WHERE { ?x p ?y FILTER(?y) }"), UnsupportedOperator);
}

TEST(ParseQuery, MixedConjunctionAndUnionRejected) {
  EXPECT_THROW(parse_query("SELECT * WHERE { ?x p ?y . { ?x q ?z } UNION { ?x r ?z } }"), ParseError);
}

TEST(ParseQuery, NestedUnionsFlatten) {
  const Query q = parse_query("SELECT * WHERE { { { ?x p ?y } UNION { ?x q ?y } } UNION { ?x r ?y } }");
  EXPECT_EQ(q.body.size(), 3U);
}

TEST(ParseQuery, ModifiersAndWarnings) {
  const Query q = parse_query("SELECT ?x WHERE { ?x p ?y } ORDER BY ?x LIMIT 5");
  EXPECT_EQ(q.projection, std::vector<std::string>{"x"});
  EXPECT_EQ(q.order_by, std::vector<std::string>{"x"});
  ASSERT_TRUE(q.limit.has_value());
  EXPECT_EQ(*q.limit, 5U);
  EXPECT_TRUE(q.warnings.empty());
  EXPECT_EQ(parse_query("SELECT * WHERE { ?x p ?y } LIMIT 5").warnings.size(), 1U);
}

TEST(ParseQuery, UnboundProjectionIsError) {
  EXPECT_THROW(parse_query("SELECT ?z WHERE { ?x p ?y }"), QueryValidationError);
  EXPECT_THROW(parse_query("SELECT * WHERE { ?x p ?y } ORDER BY ?z"), QueryValidationError);
}

TEST(ParseQuery, SyntaxErrorCarriesPosition) {
  try {
    parse_query("SELECT * WHERE {\n ?x p }");
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2U);
  }
}

TEST(ParseQuery, PrintParseFixedPoint) {
  for (int n = 1; n <= 5; ++n) {
    const Query q = running_query(n);
    const Query again = parse_query(to_string(q));
    EXPECT_EQ(again, q) << to_string(q);
    EXPECT_EQ(to_string(again), to_string(q));
  }
  const Query modifiers = parse_query("SELECT DISTINCT ?x ?y WHERE { ?x <http://x/p> \"lit\"@en . ?x p ?y } ORDER BY ?y LIMIT 3");
  EXPECT_EQ(parse_query(to_string(modifiers)), modifiers);
}

TEST(ParseSelector, FragmentSelectors) {
  EXPECT_EQ(parse_selector("CONSTRUCT WHERE { ?x p1 ?y }"),
            TriplePattern(PatternTerm::var("x"), Term::local("p1"), PatternTerm::var("y")));
  EXPECT_EQ(parse_selector("Construct where{ ?x p7 m }"),
            TriplePattern(PatternTerm::var("x"), Term::local("p7"), Term::local("m")));
}

TEST(ParseSelector, MultiplePatternsRejected) {
  try {
    parse_selector("CONSTRUCT WHERE { ?x p ?y . ?y q ?z }");
    FAIL() << "expected an error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("selector must be a single triple pattern"), std::string::npos);
  }
}

TEST(ParseSelector, PrintRoundTrip) {
  const TriplePattern s = tp("?x p1 c1");
  EXPECT_EQ(parse_selector(selector_to_string(s)), s);
}

}  // namespace
}  // namespace fedra
