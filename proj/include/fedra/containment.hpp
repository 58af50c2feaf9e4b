#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <utility>

#include "fedra/catalog.hpp"
#include "fedra/rdf.hpp"

namespace fedra {

// True iff some substitution of `general`'s variables yields `specific`,
// i.e. every triple matching `specific` also matches `general`.
bool subsumes(const TriplePattern& general, const TriplePattern& specific);

// Most general common instance of two patterns with disjoint variable scopes.
// Variables of the result are named after `a`'s where possible.
std::optional<TriplePattern> unify(const TriplePattern& a, const TriplePattern& b);

// Regarding `tp`, every triple `inner` contributes is also contributed by `outer`.
bool contained_wrt(const TriplePattern& tp, const FragmentDef& inner, const FragmentDef& outer);

// Answers whether `endpoint`'s copy of `fragment` has a match for `pattern`.
using FragmentProbe =
    std::function<bool(const std::string& endpoint, const FragmentDef& fragment, const TriplePattern& pattern)>;

// Fragment relevance: static unification check, then an ASK probe when `tp`
// is more specific than the selector.
bool relevant(const std::string& endpoint, const FragmentDef& fragment, const TriplePattern& tp,
              const FragmentProbe& probe);

// Selector-level containment and endpoint equivalence of a catalog, restricted
// to the part visible under the catalog's containment visibility.
class ContainmentRelation {
 public:
  // Strict selector containments plus reflexive pairs, transitively closed.
  const std::set<std::pair<std::string, std::string>>& pairs() const { return pairs_; }
  bool contains(const std::string& inner_id, const std::string& outer_id) const;

  // Whether selection may use the relationship between two fragments.
  bool related(const FragmentDef& a, const FragmentDef& b) const;

  // Endpoint containment for one logical fragment.
  bool endpoints_equivalent(const std::string& logical_key, const std::string& e1, const std::string& e2) const;

  // Endpoint classes per logical fragment key, each sorted.
  std::map<std::string, std::set<std::set<std::string>>> equivalence_classes() const;

  // `f9 <= f1` edges for strict pairs, sorted.
  std::string dump() const;

 private:
  friend ContainmentRelation build_containment(const FederationCatalog& catalog);

  std::set<std::pair<std::string, std::string>> pairs_;
  std::set<std::pair<std::string, std::string>> visible_logical_pairs_;
  // logical key -> endpoint -> class representative
  std::map<std::string, std::map<std::string, std::string>> classes_;
};

ContainmentRelation build_containment(const FederationCatalog& catalog);

// Deterministic value in [0, 1) for a masked relationship.
double visibility_draw(std::uint64_t seed, const std::string& a, const std::string& b);

}  // namespace fedra
