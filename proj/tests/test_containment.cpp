#include <gtest/gtest.h>

#include <random>

#include "fedra/containment.hpp"
#include "support.hpp"

namespace fedra {
namespace {

using testing::running_catalog;
using testing::tp;

TEST(Subsumes, Examples) {
  EXPECT_TRUE(subsumes(tp("?x p1 ?y"), tp("?x p1 c1")));
  EXPECT_FALSE(subsumes(tp("?x p1 c1"), tp("?x p1 ?y")));
  EXPECT_TRUE(subsumes(tp("?x p1 ?y"), tp("?x p1 ?y")));
  EXPECT_FALSE(subsumes(tp("?x p ?x"), tp("?x p ?y")));
  EXPECT_TRUE(subsumes(tp("?x p ?y"), tp("?z p ?z")));
}

std::vector<TriplePattern> random_patterns(std::mt19937_64& rng, std::size_t n) {
  const std::vector<std::string> vars{"a", "b"};
  const std::vector<std::string> consts{"k", "m"};
  std::vector<TriplePattern> out;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<PatternTerm> slots;
    for (int j = 0; j < 3; ++j) {
      slots.push_back(rng() % 2 == 0 ? PatternTerm::var(vars[rng() % 2]) : PatternTerm(Term::local(consts[rng() % 2])));
    }
    out.emplace_back(slots[0], slots[1], slots[2]);
  }
  return out;
}

TEST(Subsumes, IsPreorder) {
  std::mt19937_64 rng(11);
  const auto patterns = random_patterns(rng, 40);
  for (const auto& a : patterns) {
    EXPECT_TRUE(subsumes(a, a));
    for (const auto& b : patterns) {
      for (const auto& c : patterns) {
        if (subsumes(a, b) && subsumes(b, c)) EXPECT_TRUE(subsumes(a, c));
      }
    }
  }
}

// Every ground triple matching the specific pattern matches the general one.
TEST(Subsumes, SoundAgainstBruteForce) {
  std::mt19937_64 rng(3);
  const auto patterns = random_patterns(rng, 30);
  std::vector<Triple> universe;
  for (const char* s : {"k", "m"}) {
    for (const char* p : {"k", "m"}) {
      for (const char* o : {"k", "m"}) universe.emplace_back(Term::local(s), Term::local(p), Term::local(o));
    }
  }
  for (const auto& g : patterns) {
    for (const auto& s : patterns) {
      bool semantic = true;
      for (const auto& t : universe) {
        if (unify_with_triple(s, t) && !unify_with_triple(g, t)) semantic = false;
      }
      if (subsumes(g, s)) EXPECT_TRUE(semantic) << g.to_string() << " / " << s.to_string();
    }
  }
}

TEST(Unify, SpecializesSelectorByPattern) {
  EXPECT_EQ(unify(tp("?x p1 ?y"), tp("?a p1 c1")), tp("?x p1 c1"));
  EXPECT_FALSE(unify(tp("?x p7 m"), tp("?x p7 z")).has_value());
  EXPECT_EQ(unify(tp("?x p ?x"), tp("a p ?z")), tp("a p a"));
  EXPECT_FALSE(unify(tp("?x p ?x"), tp("a p b")).has_value());
}

TEST(ContainedWrt, RunningExample) {
  const FederationCatalog c = running_catalog();
  const TriplePattern q1 = tp("?x1 p1 ?x2");
  EXPECT_TRUE(contained_wrt(q1, c.fragment("f9"), c.fragment("f1")));
  EXPECT_FALSE(contained_wrt(q1, c.fragment("f1"), c.fragment("f9")));
  EXPECT_TRUE(contained_wrt(q1, c.fragment("f1"), c.fragment("f1")));
  const TriplePattern q2 = tp("?x1 p7 ?x3");
  EXPECT_FALSE(contained_wrt(q2, c.fragment("f7"), c.fragment("f8")));
  EXPECT_FALSE(contained_wrt(q2, c.fragment("f8"), c.fragment("f7")));
  // Regarding a pattern with the constant c1, f1 contributes exactly what f9 does.
  const TriplePattern bound = tp("?x p1 c1");
  EXPECT_TRUE(contained_wrt(bound, c.fragment("f1"), c.fragment("f9")));
}

TEST(ContainedWrt, DifferentSourcesNeverContained) {
  const FragmentDef a{"a", tp("?x p ?y"), "P1"};
  const FragmentDef b{"b", tp("?x p ?y"), "P2"};
  EXPECT_FALSE(contained_wrt(tp("?s p ?o"), a, b));
}

TEST(Relevant, StaticAndProbed) {
  const FederationCatalog c = running_catalog();
  int probes = 0;
  const FragmentProbe yes = [&](const std::string&, const FragmentDef&, const TriplePattern&) {
    ++probes;
    return true;
  };
  EXPECT_TRUE(relevant("C1", c.fragment("f1"), tp("?x1 p1 ?x2"), yes));
  EXPECT_TRUE(relevant("C5", c.fragment("f9"), tp("?x1 p1 ?x2"), yes));
  EXPECT_EQ(probes, 0);
  for (const auto& [id, f] : c.fragments()) EXPECT_FALSE(relevant("C1", f, tp("?x p9 ?y"), yes));
  EXPECT_FALSE(relevant("C3", c.fragment("f7"), tp("?x p7 z"), yes));
  EXPECT_EQ(probes, 0);
  const FragmentProbe no = [&](const std::string&, const FragmentDef&, const TriplePattern&) {
    ++probes;
    return false;
  };
  EXPECT_FALSE(relevant("C1", c.fragment("f1"), tp("?x p1 zz"), no));
  EXPECT_EQ(probes, 1);
}

TEST(BuildContainment, RunningExample) {
  const FederationCatalog c = running_catalog();
  const ContainmentRelation rel = build_containment(c);
  EXPECT_EQ(rel.dump(), "f9 <= f1\n");
  for (const auto& [id, f] : c.fragments()) EXPECT_TRUE(rel.contains(id, id));
  const auto classes = rel.equivalence_classes();
  EXPECT_EQ(classes.at(c.fragment("f1").logical_key()), (std::set<std::set<std::string>>{{"C1", "C3", "P1"}}));
  EXPECT_EQ(classes.at(c.fragment("f7").logical_key()), (std::set<std::set<std::string>>{{"C3", "P2"}}));
  EXPECT_TRUE(rel.endpoints_equivalent(c.fragment("f1").logical_key(), "C1", "C3"));
}

TEST(BuildContainment, SingleFragmentOnlyReflexive) {
  const FederationCatalog c = load_catalog(R"({
    "endpoints": [{"iri": "P", "role": "public"}],
    "fragments": [{"id": "f", "selector": "CONSTRUCT WHERE { ?x p ?y }", "source": "P"}]})");
  const ContainmentRelation rel = build_containment(c);
  EXPECT_EQ(rel.pairs().size(), 1U);
  EXPECT_TRUE(rel.contains("f", "f"));
  EXPECT_EQ(rel.dump(), "");
}

TEST(BuildContainment, VisibilityZeroHidesEverything) {
  const FederationCatalog c = running_catalog(0.0);
  const ContainmentRelation rel = build_containment(c);
  EXPECT_EQ(rel.dump(), "");
  for (const auto& [key, classes] : rel.equivalence_classes()) {
    for (const auto& cls : classes) EXPECT_EQ(cls.size(), 1U) << key;
  }
  EXPECT_FALSE(rel.related(c.fragment("f9"), c.fragment("f1")));
}

TEST(BuildContainment, MaskingIsMonotone) {
  const std::vector<double> levels{0.0, 0.25, 0.5, 0.75, 1.0};
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    std::vector<ContainmentRelation> rels;
    for (const double v : levels) rels.push_back(build_containment(running_catalog(v, seed)));
    const FederationCatalog c = running_catalog();
    for (std::size_t i = 0; i + 1 < rels.size(); ++i) {
      const auto& lo = rels[i];
      const auto& hi = rels[i + 1];
      for (const auto& p : lo.pairs()) EXPECT_TRUE(hi.pairs().contains(p));
      for (const auto& [key, classes] : lo.equivalence_classes()) {
        for (const auto& cls : classes) {
          for (const auto& a : cls) {
            for (const auto& b : cls) EXPECT_TRUE(hi.endpoints_equivalent(key, a, b));
          }
        }
      }
      for (const auto& [ia, a] : c.fragments()) {
        for (const auto& [ib, b] : c.fragments()) {
          if (lo.related(a, b)) EXPECT_TRUE(hi.related(a, b));
        }
      }
    }
  }
}

TEST(VisibilityDraw, DeterministicAndInRange) {
  for (int i = 0; i < 100; ++i) {
    const double u = visibility_draw(42, "a" + std::to_string(i), "b");
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
    EXPECT_EQ(u, visibility_draw(42, "a" + std::to_string(i), "b"));
  }
  EXPECT_NE(visibility_draw(1, "a", "b"), visibility_draw(2, "a", "b"));
}

}  // namespace
}  // namespace fedra
