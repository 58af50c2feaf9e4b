#include "fedra/selection.hpp"

#include <algorithm>
#include <sstream>
#include <tuple>

namespace fedra {

namespace {

// Memoizes ASK answers for one selection run and counts the distinct probes.
class CachingProbe {
 public:
  explicit CachingProbe(const DataProbe& inner) : inner_(inner) {}

  bool ask(const std::string& endpoint, const TriplePattern& tp) {
    auto key = std::make_tuple(endpoint, std::string(), tp.to_string());
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const bool answer = inner_.ask(endpoint, tp);
    cache_.emplace(std::move(key), answer);
    return answer;
  }

  bool ask_fragment(const std::string& endpoint, const FragmentDef& fragment, const TriplePattern& tp) {
    auto key = std::make_tuple(endpoint, fragment.id, tp.to_string());
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    const bool answer = inner_.ask_fragment(endpoint, fragment, tp);
    cache_.emplace(std::move(key), answer);
    return answer;
  }

  std::size_t probes() const { return cache_.size(); }

 private:
  const DataProbe& inner_;
  std::map<std::tuple<std::string, std::string, std::string>, bool> cache_;
};

class Grouper {
 public:
  Grouper(const FederationCatalog& catalog, const ContainmentRelation& containment, CachingProbe& probe)
      : catalog_(catalog), containment_(containment), probe_(probe) {}

  std::vector<FragmentGroup> run(const TriplePattern& tp, std::vector<GroupingStep>* trace) {
    std::vector<FragmentGroup> groups;
    auto record = [&](int line) {
      if (trace != nullptr) trace->push_back(GroupingStep{line, groups});
    };
    record(4);
    const FragmentProbe ask = [this](const std::string& e, const FragmentDef& f, const TriplePattern& p) {
      return probe_.ask_fragment(e, f, p);
    };
    for (const auto& endpoint : catalog_.endpoint_order()) {
      for (const FragmentDef* fragment : catalog_.fragments_of(endpoint)) {
        if (!relevant(endpoint, *fragment, tp, ask)) continue;
        const FragmentRef current{fragment->id, endpoint};
        bool include = true;
        for (std::size_t i = 0; i < groups.size();) {
          const FragmentRef representative = groups[i].front();
          const bool forward = provides(tp, current, representative);
          const bool backward = provides(tp, representative, current);
          if (forward && backward) {
            groups[i].push_back(current);
            include = false;
            record(11);
          } else if (backward) {
            groups.erase(groups.begin() + static_cast<std::ptrdiff_t>(i));
            record(15);
            continue;
          } else if (forward) {
            include = false;
          }
          ++i;
        }
        if (include) {
          groups.push_back({current});
          record(24);
        }
      }
    }
    return groups;
  }

 private:
  // Everything `inner` contributes for `tp` is also provided by `outer`.
  bool provides(const TriplePattern& tp, const FragmentRef& inner, const FragmentRef& outer) const {
    if (inner == outer) return true;
    const FragmentDef& fi = catalog_.fragment(inner.fragment);
    const FragmentDef& fo = catalog_.fragment(outer.fragment);
    const std::string key = fi.logical_key();
    if (key == fo.logical_key()) return containment_.endpoints_equivalent(key, inner.endpoint, outer.endpoint);
    return containment_.related(fi, fo) && contained_wrt(tp, fi, fo);
  }

  const FederationCatalog& catalog_;
  const ContainmentRelation& containment_;
  CachingProbe& probe_;
};

std::string join_strings(const std::vector<std::string>& parts, const std::string& sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i > 0) out += sep;
    out += parts[i];
  }
  return out;
}

std::string format_set(const std::set<std::string>& s) {
  return "{" + join_strings({s.begin(), s.end()}, ",") + "}";
}

}  // namespace

std::vector<FragmentGroup> group_fragments(const TriplePattern& tp, const FederationCatalog& catalog,
                                           const ContainmentRelation& containment, const DataProbe& probe,
                                           std::vector<GroupingStep>* trace) {
  CachingProbe cache(probe);
  return Grouper(catalog, containment, cache).run(tp, trace);
}

EndpointSets get_endpoints(const std::vector<FragmentGroup>& groups, const std::set<std::string>& public_endpoints) {
  EndpointSets out;
  for (const auto& group : groups) {
    std::set<std::string> endpoints;
    for (const auto& ref : group) endpoints.insert(ref.endpoint);
    const bool has_consumer = std::any_of(endpoints.begin(), endpoints.end(),
                                          [&](const std::string& e) { return !public_endpoints.contains(e); });
    if (has_consumer) {
      std::erase_if(endpoints, [&](const std::string& e) { return public_endpoints.contains(e); });
    }
    if (std::find(out.begin(), out.end(), endpoints) == out.end()) out.push_back(std::move(endpoints));
  }
  return out;
}

std::string CoverElement::to_string() const { return "s" + std::to_string(tp) + "," + std::to_string(group); }

SetCoverInstance build_cover_instance(const BasicGraphPattern& bgp, const GroupingG& grouping) {
  SetCoverInstance instance;
  for (std::size_t i = 0; i < bgp.patterns.size(); ++i) {
    auto it = grouping.find(bgp.patterns[i]);
    if (it == grouping.end()) throw SelectionError("no grouping for " + bgp.patterns[i].to_string());
    for (std::size_t j = 0; j < it->second.size(); ++j) {
      const CoverElement element{i + 1, j + 1};
      instance.elements.push_back(element);
      for (const auto& endpoint : it->second[j]) instance.sets[endpoint].insert(element);
    }
  }
  return instance;
}

std::vector<std::string> greedy_set_cover(const SetCoverInstance& instance, const EndpointPreference& preference) {
  std::set<CoverElement> uncovered(instance.elements.begin(), instance.elements.end());
  std::set<CoverElement> reachable;
  for (const auto& [endpoint, elements] : instance.sets) reachable.insert(elements.begin(), elements.end());
  if (!std::includes(reachable.begin(), reachable.end(), uncovered.begin(), uncovered.end())) {
    throw SelectionError("uncoverable instance");
  }

  std::vector<std::string> candidates;
  for (const auto& [endpoint, _] : instance.sets) candidates.push_back(endpoint);
  std::sort(candidates.begin(), candidates.end(), preference);

  std::vector<std::string> chosen;
  while (!uncovered.empty()) {
    const std::string* best = nullptr;
    std::size_t best_gain = 0;
    for (const auto& endpoint : candidates) {
      const auto& elements = instance.sets.at(endpoint);
      const auto gain = static_cast<std::size_t>(
          std::count_if(elements.begin(), elements.end(), [&](const CoverElement& e) { return uncovered.contains(e); }));
      if (gain > best_gain) {
        best = &endpoint;
        best_gain = gain;
      }
    }
    chosen.push_back(*best);
    for (const auto& e : instance.sets.at(*best)) uncovered.erase(e);
  }
  return chosen;
}

const SelectionEntry& SelectionMap::at(std::size_t bgp, std::size_t position) const {
  for (const auto& entry : entries) {
    if (entry.bgp == bgp && entry.position == position) return entry;
  }
  throw SelectionError("no selection for bgp " + std::to_string(bgp) + " position " + std::to_string(position));
}

std::size_t SelectionMap::nss() const {
  std::size_t n = 0;
  for (const auto& entry : entries) n += entry.endpoints.size();
  return n;
}

std::size_t SelectionMap::nsps(const std::set<std::string>& public_endpoints) const {
  std::size_t n = 0;
  for (const auto& entry : entries) {
    n += static_cast<std::size_t>(std::count_if(entry.endpoints.begin(), entry.endpoints.end(),
                                                [&](const std::string& e) { return public_endpoints.contains(e); }));
  }
  return n;
}

SelectionResult fedra_select(const Query& query, const FederationCatalog& catalog,
                             const ContainmentRelation& containment, const DataProbe& probe,
                             const SelectionOptions& options) {
  CachingProbe cache(probe);
  Grouper grouper(catalog, containment, cache);
  const std::set<std::string> publics = catalog.public_endpoints();
  const EndpointPreference preference{&catalog};

  SelectionResult result;
  GroupingG grouping;
  for (const auto& bgp : query.body) {
    for (const auto& tp : bgp.patterns) {
      if (grouping.contains(tp)) continue;
      TpDiagnostics diag{tp, {}, {}, {}, false};
      diag.groups = grouper.run(tp, &diag.trace);
      if (!diag.groups.empty()) {
        diag.endpoints = get_endpoints(diag.groups, publics);
      } else if (options.fallback == Fallback::Fail) {
        throw SelectionError("no relevant fragment for " + tp.to_string());
      } else {
        diag.fallback = true;
        for (const auto& p : publics) {
          if (cache.ask(p, tp)) diag.endpoints.push_back({p});
        }
      }
      grouping.emplace(tp, diag.endpoints);
      result.diagnostics.triple_patterns.push_back(std::move(diag));
    }
  }

  for (std::size_t b = 0; b < query.body.size(); ++b) {
    const auto& bgp = query.body[b];
    BgpDiagnostics diag;
    diag.instance = build_cover_instance(bgp, grouping);
    diag.cover = greedy_set_cover(diag.instance, preference);
    const std::set<std::string> cover(diag.cover.begin(), diag.cover.end());
    for (std::size_t i = 0; i < bgp.patterns.size(); ++i) {
      EndpointSets filtered;
      std::set<std::string> chosen;
      for (const auto& set : grouping.at(bgp.patterns[i])) {
        std::set<std::string> kept;
        std::set_intersection(set.begin(), set.end(), cover.begin(), cover.end(), std::inserter(kept, kept.end()));
        if (kept.empty()) throw std::logic_error("cover left a group of " + bgp.patterns[i].to_string() + " empty");
        chosen.insert(*std::min_element(kept.begin(), kept.end(), preference));
        filtered.push_back(std::move(kept));
      }
      diag.filtered.push_back(std::move(filtered));
      result.map.entries.push_back(SelectionEntry{b, i, bgp.patterns[i], std::move(chosen)});
    }
    result.diagnostics.bgps.push_back(std::move(diag));
  }
  result.diagnostics.probes = cache.probes();
  return result;
}

SelectionResult ask_baseline_select(const Query& query, const FederationCatalog& catalog, const DataProbe& probe) {
  CachingProbe cache(probe);
  SelectionResult result;
  for (std::size_t b = 0; b < query.body.size(); ++b) {
    const auto& bgp = query.body[b];
    for (std::size_t i = 0; i < bgp.patterns.size(); ++i) {
      std::set<std::string> endpoints;
      for (const auto& [iri, _] : catalog.endpoints()) {
        if (cache.ask(iri, bgp.patterns[i])) endpoints.insert(iri);
      }
      result.map.entries.push_back(SelectionEntry{b, i, bgp.patterns[i], std::move(endpoints)});
    }
  }
  result.diagnostics.probes = cache.probes();
  return result;
}

std::string format_groups(const std::vector<FragmentGroup>& groups) {
  if (groups.empty()) return "{ }";
  std::vector<std::string> parts;
  for (const auto& group : groups) {
    std::vector<std::string> members;
    for (const auto& ref : group) members.push_back("(" + ref.fragment + ", " + ref.endpoint + ")");
    parts.push_back("{ " + join_strings(members, ", ") + " }");
  }
  return "{ " + join_strings(parts, ", ") + " }";
}

std::string format_endpoint_sets(const EndpointSets& sets) {
  std::vector<std::string> parts;
  for (const auto& s : sets) parts.push_back(format_set(s));
  return "{" + join_strings(parts, ",") + "}";
}

std::string format_cover_instance(const SetCoverInstance& instance) {
  std::vector<std::string> elements;
  for (const auto& e : instance.elements) elements.push_back(e.to_string());
  std::vector<std::string> sets;
  for (const auto& [endpoint, members] : instance.sets) {
    std::vector<std::string> m;
    for (const auto& e : members) m.push_back(e.to_string());
    sets.push_back(endpoint + ": {" + join_strings(m, " ") + "}");
  }
  return "S = {" + join_strings(elements, " ") + "}\nC = {" + join_strings(sets, ", ") + "}";
}

std::string format_selection_map(const SelectionMap& map) {
  std::string out;
  for (const auto& entry : map.entries) {
    out += "bgp " + std::to_string(entry.bgp + 1) + " | " + entry.tp.to_string() + " -> " +
           format_set(entry.endpoints) + "\n";
  }
  return out;
}

std::string format_diagnostics(const SelectionResult& result, const FederationCatalog& catalog) {
  std::ostringstream out;
  for (const auto& tp : result.diagnostics.triple_patterns) {
    out << "tp " << tp.tp.to_string() << "\n";
    for (const auto& step : tp.trace) out << "  line " << step.line << ": " << format_groups(step.groups) << "\n";
    if (tp.fallback) out << "  fallback: public ask\n";
    out << "  groups: " << format_groups(tp.groups) << "\n";
    out << "  G: " << format_endpoint_sets(tp.endpoints) << "\n";
  }
  for (std::size_t b = 0; b < result.diagnostics.bgps.size(); ++b) {
    const auto& bgp = result.diagnostics.bgps[b];
    out << "bgp " << (b + 1) << "\n";
    std::istringstream instance(format_cover_instance(bgp.instance));
    for (std::string line; std::getline(instance, line);) out << "  " << line << "\n";
    out << "  C' = " << format_set({bgp.cover.begin(), bgp.cover.end()}) << "\n";
    for (std::size_t i = 0; i < bgp.filtered.size(); ++i) {
      out << "  filtered " << (i + 1) << ": " << format_endpoint_sets(bgp.filtered[i]) << "\n";
    }
  }
  out << "D\n";
  std::istringstream map(format_selection_map(result.map));
  for (std::string line; std::getline(map, line);) out << "  " << line << "\n";
  out << "NSS " << result.map.nss() << "\n";
  out << "NSPS " << result.map.nsps(catalog.public_endpoints()) << "\n";
  out << "probes " << result.diagnostics.probes << "\n";
  return out.str();
}

}  // namespace fedra
