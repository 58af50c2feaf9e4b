#include <gtest/gtest.h>

#include <random>

#include "fedra/rdf.hpp"
#include "support.hpp"

namespace fedra {
namespace {

using testing::fixture_path;
using testing::tp;

TEST(NTriples, DuplicateTriplesCollapse) {
  EXPECT_EQ(parse_ntriples("t1 p1 c1 .\nt1 p1 c1 .").size(), 1U);
}

TEST(NTriples, RunningExampleP1HasSixTriples) {
  EXPECT_EQ(load_ntriples_file(fixture_path("P1.nt")).size(), 6U);
  EXPECT_EQ(load_ntriples_file(fixture_path("P2.nt")).size(), 8U);
}

TEST(NTriples, CompactAndFullFormsAgree) {
  const TripleStore compact = parse_ntriples("t1 p1 c1 .");
  const TripleStore full = parse_ntriples("<http://fedra.local/t1> <http://fedra.local/p1> <http://fedra.local/c1> .");
  EXPECT_EQ(compact.sorted(), full.sorted());
}

TEST(NTriples, BlankNodesRejected) {
  try {
    parse_ntriples("_:b p1 c1 .");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("blank nodes unsupported"), std::string::npos);
    EXPECT_EQ(e.line(), 1U);
  }
}

TEST(NTriples, ReportsLineOfMalformedInput) {
  try {
    parse_ntriples("# header\nt1 p1 c1 .\nt1 p1\n");
    FAIL() << "expected a parse error";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3U);
  }
}

TEST(NTriples, LiteralsAndComments) {
  const TripleStore store = parse_ntriples(
      "# comment\n"
      "<http://x/a> <http://x/p> \"plain\" .\n"
      "<http://x/a> <http://x/p> \"tagged\"@en .\n"
      "<http://x/a> <http://x/p> \"5\"^^<http://www.w3.org/2001/XMLSchema#integer> .\n"
      "<http://x/a> <http://x/p> \"esc \\\"q\\\"\\n\" .\n");
  ASSERT_EQ(store.size(), 4U);
  EXPECT_TRUE(store.contains(Triple(Term::iri("http://x/a"), Term::iri("http://x/p"), Term::literal("tagged", "", "en"))));
  EXPECT_TRUE(store.contains(Triple(Term::iri("http://x/a"), Term::iri("http://x/p"), Term::literal("esc \"q\"\n"))));
}

TEST(NTriples, RoundTripIsFixedPoint) {
  const TripleStore store = load_ntriples_file(fixture_path("P2.nt"));
  const std::string once = serialize_ntriples(store);
  EXPECT_EQ(serialize_ntriples(parse_ntriples(once)), once);
  const TripleStore lit = parse_ntriples("<http://x/a> <http://x/p> \"a\\tb\"@en-GB .\n");
  EXPECT_EQ(serialize_ntriples(parse_ntriples(serialize_ntriples(lit))), serialize_ntriples(lit));
}

TEST(TripleStoreTest, InsertIsIdempotent) {
  TripleStore store;
  const Triple t(Term::local("a"), Term::local("p"), Term::local("b"));
  EXPECT_TRUE(store.insert(t));
  EXPECT_FALSE(store.insert(t));
  EXPECT_EQ(store.size(), 1U);
}

TEST(MatchPattern, RunningExampleP1) {
  TripleStore all = load_ntriples_file(fixture_path("P1.nt"));
  all.insert_all(load_ntriples_file(fixture_path("P2.nt")));
  const auto result = match_pattern(all, tp("?x p1 ?y"));
  const std::set<SolutionMapping> expected{{{"x", Term::local("t1")}, {"y", Term::local("c1")}},
                                           {{"x", Term::local("t1")}, {"y", Term::local("c2")}}};
  EXPECT_EQ(result, expected);
}

TEST(MatchPattern, GroundPatternYieldsEmptyMapping) {
  const TripleStore store = parse_ntriples("t1 p1 c1 .");
  EXPECT_EQ(match_pattern(store, tp("t1 p1 c1")), std::set<SolutionMapping>{SolutionMapping{}});
  EXPECT_TRUE(match_pattern(store, tp("t1 p1 c2")).empty());
}

TEST(MatchPattern, RepeatedVariableConstrains) {
  const TripleStore store = parse_ntriples("a p a .\na p b .");
  EXPECT_EQ(match_pattern(store, tp("?x p ?x")), (std::set<SolutionMapping>{{{"x", Term::local("a")}}}));
}

// Brute-force check of soundness and completeness on random stores.
TEST(MatchPattern, AgreesWithBruteForce) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> names{"a", "b", "c"};
  auto any = [&] { return names[rng() % names.size()]; };
  for (int round = 0; round < 50; ++round) {
    TripleStore store;
    for (int i = 0; i < 12; ++i) store.insert(Triple(Term::local(any()), Term::local(any()), Term::local(any())));
    std::vector<PatternTerm> slots;
    for (int i = 0; i < 3; ++i) {
      const auto r = rng() % 5;
      slots.push_back(r < 2 ? PatternTerm::var(r == 0 ? "x" : "y") : PatternTerm(Term::local(any())));
    }
    const TriplePattern pattern(slots[0], slots[1], slots[2]);
    std::set<SolutionMapping> expected;
    for (const auto& t : store.triples()) {
      if (auto mu = unify_with_triple(pattern, t)) expected.insert(*mu);
    }
    const auto got = match_pattern(store, pattern);
    EXPECT_EQ(got, expected);
    for (const auto& mu : got) {
      const TriplePattern ground = substitute(pattern, mu);
      ASSERT_TRUE(ground.is_ground());
      EXPECT_TRUE(store.contains(Triple(ground.subject().term(), ground.predicate().term(), ground.object().term())));
    }
  }
}

TEST(EvaluateBgp, JoinsOnSharedVariables) {
  TripleStore all = load_ntriples_file(fixture_path("P1.nt"));
  all.insert_all(load_ntriples_file(fixture_path("P2.nt")));
  const auto result = evaluate_bgp(all, {tp("?x1 p1 ?x2"), tp("?x2 p4 ?x3")});
  EXPECT_EQ(result.size(), 2U);
  EXPECT_TRUE(evaluate_bgp(all, {tp("?x1 p4 ?x2"), tp("?x1 p7 ?x3")}).empty());
}

TEST(Join, CrossProductWithoutSharedVariables) {
  const std::set<SolutionMapping> left{{{"a", Term::local("1")}}, {{"a", Term::local("2")}}};
  const std::set<SolutionMapping> right{{{"b", Term::local("3")}}};
  EXPECT_EQ(join(left, right).size(), 2U);
  EXPECT_TRUE(join(left, {}).empty());
}

TEST(TermTest, LocalTermsPrintBare) {
  EXPECT_EQ(Term::local("t1").to_string(), "t1");
  EXPECT_EQ(Term::iri("http://x/y").to_string(), "<http://x/y>");
  EXPECT_EQ(Term::literal("v", "", "en").to_string(), "\"v\"@en");
}

}  // namespace
}  // namespace fedra
