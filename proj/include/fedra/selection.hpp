#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "fedra/catalog.hpp"
#include "fedra/containment.hpp"
#include "fedra/query.hpp"

namespace fedra {

class SelectionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Source of ASK answers. The simulator answers from materialized data; a
// networked implementation would issue boolean requests.
class DataProbe {
 public:
  virtual ~DataProbe() = default;
  // Does the endpoint hold any triple matching `tp`?
  virtual bool ask(const std::string& endpoint, const TriplePattern& tp) const = 0;
  // Does the endpoint's copy of `fragment` hold any triple matching `tp`?
  virtual bool ask_fragment(const std::string& endpoint, const FragmentDef& fragment,
                            const TriplePattern& tp) const = 0;
};

struct FragmentRef {
  std::string fragment;
  std::string endpoint;

  auto operator<=>(const FragmentRef&) const = default;
  bool operator==(const FragmentRef&) const = default;
};

// Fragment copies that provide identical data for one triple pattern, in
// insertion order. The first member is the group's representative.
using FragmentGroup = std::vector<FragmentRef>;

// Snapshot of the candidate groups after a change, tagged with the step of
// the grouping procedure that caused it: 4 init, 11 merge, 15 removal of a
// contained group, 24 new group.
struct GroupingStep {
  int line;
  std::vector<FragmentGroup> groups;
};

using EndpointSets = std::vector<std::set<std::string>>;
using GroupingG = std::map<TriplePattern, EndpointSets>;

std::vector<FragmentGroup> group_fragments(const TriplePattern& tp, const FederationCatalog& catalog,
                                           const ContainmentRelation& containment, const DataProbe& probe,
                                           std::vector<GroupingStep>* trace = nullptr);

// Projects groups to endpoints; public endpoints are removed from any group
// that also has a consumer. Identical endpoint sets collapse.
EndpointSets get_endpoints(const std::vector<FragmentGroup>& groups, const std::set<std::string>& public_endpoints);

// Element s(i,j): j-th endpoint set of the i-th triple pattern, both 1-based.
struct CoverElement {
  std::size_t tp;
  std::size_t group;

  auto operator<=>(const CoverElement&) const = default;
  bool operator==(const CoverElement&) const = default;
  std::string to_string() const;
};

struct SetCoverInstance {
  std::vector<CoverElement> elements;
  std::map<std::string, std::set<CoverElement>> sets;
};

SetCoverInstance build_cover_instance(const BasicGraphPattern& bgp, const GroupingG& grouping);

// Greedy cover: repeatedly take the set covering most uncovered elements,
// ties to consumers first, then lexicographic IRI. Returned in pick order.
std::vector<std::string> greedy_set_cover(const SetCoverInstance& instance, const EndpointPreference& preference);

struct SelectionEntry {
  std::size_t bgp;
  std::size_t position;
  TriplePattern tp;
  std::set<std::string> endpoints;
};

// The map D: one entry per triple pattern occurrence (BGP index, position).
struct SelectionMap {
  std::vector<SelectionEntry> entries;

  const SelectionEntry& at(std::size_t bgp, std::size_t position) const;
  std::size_t nss() const;
  std::size_t nsps(const std::set<std::string>& public_endpoints) const;
};

struct TpDiagnostics {
  TriplePattern tp;
  std::vector<GroupingStep> trace;
  std::vector<FragmentGroup> groups;
  EndpointSets endpoints;
  bool fallback = false;
};

struct BgpDiagnostics {
  SetCoverInstance instance;
  std::vector<std::string> cover;
  std::vector<EndpointSets> filtered;
};

struct SelectionDiagnostics {
  std::vector<TpDiagnostics> triple_patterns;
  std::vector<BgpDiagnostics> bgps;
  std::size_t probes = 0;
};

struct SelectionResult {
  SelectionMap map;
  SelectionDiagnostics diagnostics;
};

enum class Fallback : std::uint8_t { PublicAsk, Fail };

struct SelectionOptions {
  Fallback fallback = Fallback::PublicAsk;
};

SelectionResult fedra_select(const Query& query, const FederationCatalog& catalog,
                             const ContainmentRelation& containment, const DataProbe& probe,
                             const SelectionOptions& options = {});

// Every endpoint with at least one match for the triple pattern.
SelectionResult ask_baseline_select(const Query& query, const FederationCatalog& catalog, const DataProbe& probe);

std::string format_groups(const std::vector<FragmentGroup>& groups);
std::string format_endpoint_sets(const EndpointSets& sets);
std::string format_cover_instance(const SetCoverInstance& instance);
std::string format_selection_map(const SelectionMap& map);

// Stable text rendering: per-pattern groups, per-BGP cover instances and D.
std::string format_diagnostics(const SelectionResult& result, const FederationCatalog& catalog);

}  // namespace fedra
