#include <gtest/gtest.h>

#include "fedra/harness.hpp"
#include "fedra/selection.hpp"
#include "support.hpp"

namespace fedra {
namespace {

using testing::running_catalog;
using testing::running_federation;
using testing::running_query;
using testing::tp;

std::vector<std::string> trace_lines(const std::vector<GroupingStep>& trace) {
  std::vector<std::string> out;
  for (const auto& step : trace) out.push_back(std::to_string(step.line) + " " + format_groups(step.groups));
  return out;
}

TEST(GroupFragments, TraceQ3FirstPattern) {
  const FederationCatalog c = running_catalog();
  const Federation fed = running_federation();
  std::vector<GroupingStep> trace;
  const auto groups = group_fragments(tp("?x1 p1 ?x2"), c, build_containment(c), fed, &trace);
  EXPECT_EQ(format_groups(groups), "{ { (f1, C1), (f1, C3), (f1, P1) } }");
  EXPECT_EQ(trace_lines(trace), (std::vector<std::string>{
                                    "4 { }",
                                    "24 { { (f1, C1) } }",
                                    "11 { { (f1, C1), (f1, C3) } }",
                                    "11 { { (f1, C1), (f1, C3), (f1, P1) } }",
                                }));
}

TEST(GroupFragments, TraceQ2SecondPattern) {
  const FederationCatalog c = running_catalog();
  const Federation fed = running_federation();
  std::vector<GroupingStep> trace;
  const auto groups = group_fragments(tp("?x1 p7 ?x3"), c, build_containment(c), fed, &trace);
  EXPECT_EQ(format_groups(groups), "{ { (f7, C3), (f7, P2) }, { (f8, C4), (f8, P2) } }");
  EXPECT_EQ(trace_lines(trace), (std::vector<std::string>{
                                    "4 { }",
                                    "24 { { (f7, C3) } }",
                                    "24 { { (f7, C3) }, { (f8, C4) } }",
                                    "11 { { (f7, C3), (f7, P2) }, { (f8, C4) } }",
                                    "11 { { (f7, C3), (f7, P2) }, { (f8, C4), (f8, P2) } }",
                                }));
}

// A broader fragment arriving after a narrower one replaces its group (line 15).
TEST(GroupFragments, RemovesContainedGroup) {
  const FederationCatalog c = load_catalog(R"({
    "endpoints": [{"iri": "P", "role": "public"},
                  {"iri": "A", "role": "consumer", "fragments": ["narrow"]},
                  {"iri": "B", "role": "consumer", "fragments": ["wide"]}],
    "fragments": [{"id": "narrow", "selector": "CONSTRUCT WHERE { ?x p k }", "source": "P"},
                  {"id": "wide", "selector": "CONSTRUCT WHERE { ?x p ?y }", "source": "P"}]})");
  const Federation fed = materialize_federation(c, {{"P", parse_ntriples("a p k .\nb p m .")}});
  std::vector<GroupingStep> trace;
  const auto groups = group_fragments(tp("?s p ?o"), c, build_containment(c), fed, &trace);
  EXPECT_EQ(format_groups(groups), "{ { (wide, B), (wide, P) } }");
  EXPECT_EQ(trace_lines(trace), (std::vector<std::string>{
                                    "4 { }",
                                    "24 { { (narrow, A) } }",
                                    "15 { }",
                                    "24 { { (wide, B) } }",
                                    "11 { { (wide, B), (wide, P) } }",
                                }));
}

TEST(GroupFragments, SingleFragmentSingleEndpoint) {
  const FederationCatalog c = load_catalog(R"({
    "endpoints": [{"iri": "P", "role": "public"}],
    "fragments": [{"id": "f", "selector": "CONSTRUCT WHERE { ?x p ?y }", "source": "P"}]})");
  const Federation fed = materialize_federation(c, {{"P", parse_ntriples("a p b .")}});
  EXPECT_EQ(format_groups(group_fragments(tp("?s p ?o"), c, build_containment(c), fed)), "{ { (f, P) } }");
}

TEST(GetEndpoints, Examples) {
  const std::set<std::string> publics{"P1", "P2"};
  EXPECT_EQ(format_endpoint_sets(get_endpoints({{{"f1", "C1"}, {"f1", "C3"}, {"f1", "P1"}}}, publics)), "{{C1,C3}}");
  EXPECT_EQ(format_endpoint_sets(get_endpoints({{{"f", "P1"}}}, publics)), "{{P1}}");
  EXPECT_EQ(format_endpoint_sets(get_endpoints({{{"f7", "C3"}, {"f7", "P2"}}, {{"f8", "C4"}, {"f8", "P2"}}}, publics)),
            "{{C3},{C4}}");
}

TEST(CoverInstance, Q2) {
  const GroupingG g{{tp("?x1 p4 ?x2"), {{"C2", "C3"}}}, {tp("?x1 p7 ?x3"), {{"C3"}, {"C4"}}}};
  const Query q2 = running_query(2);
  const SetCoverInstance instance = build_cover_instance(q2.body[0], g);
  EXPECT_EQ(format_cover_instance(instance),
            "S = {s1,1 s2,1 s2,2}\nC = {C2: {s1,1}, C3: {s1,1 s2,1}, C4: {s2,2}}");
}

TEST(CoverInstance, SingleEndpointCoversAll) {
  const GroupingG g{{tp("?x p ?y"), {{"E"}}}};
  const SetCoverInstance instance = build_cover_instance(BasicGraphPattern{{tp("?x p ?y")}}, g);
  EXPECT_EQ(format_cover_instance(instance), "S = {s1,1}\nC = {E: {s1,1}}");
  EXPECT_THROW(build_cover_instance(BasicGraphPattern{{tp("?x q ?y")}}, g), SelectionError);
}

TEST(FedraSelect, Q1PicksC1) {
  const FederationCatalog c = running_catalog();
  const auto result = fedra_select(running_query(1), c, build_containment(c), running_federation());
  EXPECT_EQ(format_selection_map(result.map), "bgp 1 | ?x1 p1 ?x2 -> {C1}\n");
  EXPECT_EQ(format_endpoint_sets(result.diagnostics.triple_patterns[0].endpoints), "{{C1,C3}}");
}

TEST(FedraSelect, Q2CoverAndMap) {
  const FederationCatalog c = running_catalog();
  const auto result = fedra_select(running_query(2), c, build_containment(c), running_federation());
  ASSERT_EQ(result.diagnostics.bgps.size(), 1U);
  EXPECT_EQ(result.diagnostics.bgps[0].cover, (std::vector<std::string>{"C3", "C4"}));
  EXPECT_EQ(format_selection_map(result.map),
            "bgp 1 | ?x1 p4 ?x2 -> {C3}\n"
            "bgp 1 | ?x1 p7 ?x3 -> {C3,C4}\n");
  EXPECT_EQ(result.map.nsps(c.public_endpoints()), 0U);
}

TEST(FedraSelect, Q3OneEndpointPerBranch) {
  const FederationCatalog c = running_catalog();
  const auto result = fedra_select(running_query(3), c, build_containment(c), running_federation());
  EXPECT_EQ(format_selection_map(result.map),
            "bgp 1 | ?x1 p1 ?x2 -> {C3}\n"
            "bgp 1 | ?x2 p4 ?x3 -> {C3}\n"
            "bgp 2 | ?x1 p2 ?x2 -> {C4}\n"
            "bgp 2 | ?x2 p5 ?x3 -> {C4}\n"
            "bgp 3 | ?x1 p3 ?x2 -> {C5}\n"
            "bgp 3 | ?x2 p6 ?x3 -> {C5}\n");
  EXPECT_EQ(result.map.nss(), 6U);
  EXPECT_EQ(result.map.at(2, 1).tp, tp("?x2 p6 ?x3"));
  EXPECT_THROW(result.map.at(3, 0), SelectionError);
}

TEST(FedraSelect, ConstantPatternIsProbedOnce) {
  const FederationCatalog c = running_catalog();
  const Federation fed = running_federation();
  const auto result = fedra_select(parse_query("SELECT * WHERE { ?x p1 c2 . ?y p1 c2 }"), c, build_containment(c), fed);
  EXPECT_EQ(format_selection_map(result.map), "bgp 1 | ?x p1 c2 -> {C1}\nbgp 1 | ?y p1 c2 -> {C1}\n");
  // f1 at C1, C3 and P1. Both patterns specialize f1 to the same probe.
  EXPECT_EQ(result.diagnostics.probes, 3U);
}

TEST(FedraSelect, FallbackToPublicAsk) {
  const FederationCatalog c = load_catalog(R"({
    "endpoints": [{"iri": "P", "role": "public"}, {"iri": "C", "role": "consumer", "fragments": ["f"]}],
    "fragments": [{"id": "f", "selector": "CONSTRUCT WHERE { ?x p ?y }", "source": "P"}]})");
  const Federation fed = materialize_federation(c, {{"P", parse_ntriples("a p b .\na q c .")}});
  const ContainmentRelation rel = build_containment(c);
  const auto result = fedra_select(parse_query("SELECT * WHERE { ?x p ?y . ?x q ?z }"), c, rel, fed);
  EXPECT_EQ(format_selection_map(result.map), "bgp 1 | ?x p ?y -> {C}\nbgp 1 | ?x q ?z -> {P}\n");
  EXPECT_TRUE(result.diagnostics.triple_patterns[1].fallback);

  const auto missing = fedra_select(parse_query("SELECT * WHERE { ?x r ?y }"), c, rel, fed);
  EXPECT_TRUE(missing.map.at(0, 0).endpoints.empty());

  EXPECT_THROW(fedra_select(parse_query("SELECT * WHERE { ?x q ?z }"), c, rel, fed, SelectionOptions{Fallback::Fail}),
               SelectionError);
}

TEST(FedraSelect, DiagnosticsAreStable) {
  const FederationCatalog c = running_catalog();
  const Federation fed = running_federation();
  const ContainmentRelation rel = build_containment(c);
  for (int n = 1; n <= 5; ++n) {
    const Query q = running_query(n);
    EXPECT_EQ(format_diagnostics(fedra_select(q, c, rel, fed), c), format_diagnostics(fedra_select(q, c, rel, fed), c));
  }
}

TEST(AskBaseline, Q3FirstPattern) {
  const FederationCatalog c = running_catalog();
  const auto result = ask_baseline_select(running_query(3), c, running_federation());
  EXPECT_EQ(result.map.at(0, 0).endpoints, (std::set<std::string>{"C1", "C3", "C5", "P1"}));
  EXPECT_EQ(result.map.nsps(c.public_endpoints()), 6U);
}

TEST(AskBaseline, EmptyFederation) {
  const FederationCatalog c;
  const Federation fed = materialize_federation(c, {});
  const auto result = ask_baseline_select(parse_query("SELECT * WHERE { ?x p ?y }"), c, fed);
  ASSERT_EQ(result.map.entries.size(), 1U);
  EXPECT_TRUE(result.map.entries[0].endpoints.empty());
}

TEST(AskBaseline, DuplicatedPublicCopiesBothSelected) {
  const FederationCatalog c = load_catalog(R"({
    "endpoints": [{"iri": "P", "role": "public"}, {"iri": "Q", "role": "public"}]})");
  const TripleStore data = parse_ntriples("a p b .\nb q c .");
  const Federation fed = materialize_federation(c, {{"P", data}, {"Q", data}});
  const auto result = ask_baseline_select(parse_query("SELECT * WHERE { ?x p ?y . ?y q ?z }"), c, fed);
  for (const auto& e : result.map.entries) EXPECT_EQ(e.endpoints, (std::set<std::string>{"P", "Q"}));
}

struct RandomCase {
  GeneratedFederation generated;
  Federation federation;
  std::vector<Query> queries;
};

RandomCase random_case(std::uint64_t seed) {
  const TripleStore data = generate_dataset(DatasetOptions{30, 6, 0.7, 2, 5, 0.5, seed});
  RandomCase rc{generate_federation(data, FederationOptions{3 + seed % 10, 1 + seed % 2, 1 + seed % 3, 1, 1, seed}),
                {}, generate_queries(data, QueryGenOptions{5, 1, 4, QueryShape::Mixed, 0.3, seed})};
  rc.federation = materialize_federation(rc.generated.catalog, rc.generated.datasets);
  return rc;
}

TEST(SelectionProperties, CoverageMinimalityAndBaselineBound) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RandomCase rc = random_case(seed);
    const FederationCatalog& c = rc.generated.catalog;
    const auto publics = c.public_endpoints();
    const ContainmentRelation rel = build_containment(c);
    for (const Query& q : rc.queries) {
      const auto result = fedra_select(q, c, rel, rc.federation);
      const auto baseline = ask_baseline_select(q, c, rc.federation);
      EXPECT_LE(result.map.nss(), baseline.map.nss()) << to_string(q);
      for (const auto& entry : result.map.entries) {
        const auto& diag = *std::find_if(result.diagnostics.triple_patterns.begin(),
                                         result.diagnostics.triple_patterns.end(),
                                         [&](const TpDiagnostics& d) { return d.tp == entry.tp; });
        for (const auto& group : diag.groups) {
          bool covered = false;
          bool has_consumer = false;
          for (const auto& ref : group) {
            covered |= entry.endpoints.contains(ref.endpoint);
            has_consumer |= !publics.contains(ref.endpoint);
          }
          EXPECT_TRUE(covered) << entry.tp.to_string();
          if (has_consumer) {
            for (const auto& ref : group) {
              if (publics.contains(ref.endpoint)) EXPECT_FALSE(entry.endpoints.contains(ref.endpoint));
            }
          }
        }
      }
    }
  }
}

TEST(SelectionProperties, FullKnowledgeNeverSelectsMore) {
  std::size_t violations = 0;
  std::size_t checks = 0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    RandomCase rc = random_case(seed);
    FederationCatalog full = rc.generated.catalog;
    const ContainmentRelation full_rel = build_containment(full);
    for (const double v : {0.0, 0.25, 0.5, 0.75}) {
      FederationCatalog masked = rc.generated.catalog;
      masked.containment_visibility = v;
      masked.containment_seed = seed;
      const ContainmentRelation masked_rel = build_containment(masked);
      for (const Query& q : rc.queries) {
        ++checks;
        const auto a = fedra_select(q, full, full_rel, rc.federation).map.nss();
        const auto b = fedra_select(q, masked, masked_rel, rc.federation).map.nss();
        if (a > b) ++violations;
      }
    }
  }
  EXPECT_EQ(violations, 0U) << "of " << checks;
}

}  // namespace
}  // namespace fedra
