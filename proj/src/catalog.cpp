#include "fedra/catalog.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fedra/query.hpp"

namespace fedra {

using nlohmann::json;

std::string_view to_string(EndpointRole role) { return role == EndpointRole::Public ? "public" : "consumer"; }

TriplePattern canonical_selector(const TriplePattern& selector) {
  std::map<std::string, std::string> renaming;
  auto rename = [&](const PatternTerm& t) -> PatternTerm {
    if (!t.is_variable()) return t;
    auto [it, inserted] = renaming.emplace(t.variable(), "v" + std::to_string(renaming.size()));
    return PatternTerm::var(it->second);
  };
  PatternTerm s = rename(selector.subject());
  PatternTerm p = rename(selector.predicate());
  PatternTerm o = rename(selector.object());
  return TriplePattern(std::move(s), std::move(p), std::move(o));
}

std::string FragmentDef::logical_key() const { return canonical_selector(selector).to_string() + " @ " + source; }

FederationCatalog::FederationCatalog(std::vector<EndpointDescriptor> endpoints, std::vector<FragmentDef> fragments,
                                     std::map<std::string, std::string> datasets, CatalogLoadOptions options)
    : datasets_(std::move(datasets)) {
  for (auto& e : endpoints) {
    if (e.iri.empty()) throw CatalogError("endpoint IRI must be non-empty");
    const std::string iri = e.iri;
    if (!endpoints_.emplace(iri, std::move(e)).second) throw CatalogError("duplicate endpoint " + iri);
  }
  std::set<std::string> dropped;
  for (auto& f : fragments) {
    if (f.id.empty()) throw CatalogError("fragment id must be non-empty");
    auto src = endpoints_.find(f.source);
    if (src == endpoints_.end()) {
      if (!options.tolerate_unknown_sources) {
        throw CatalogError("fragment " + f.id + " references undeclared source " + f.source);
      }
      warnings_.push_back("fragment " + f.id + " dropped: undeclared source " + f.source);
      dropped.insert(f.id);
      continue;
    }
    if (src->second.role != EndpointRole::Public) {
      throw CatalogError("fragment " + f.id + " has non-public source " + f.source);
    }
    const std::string id = f.id;
    if (!fragments_.emplace(id, std::move(f)).second) throw CatalogError("duplicate fragment id " + id);
  }
  for (auto& [iri, e] : endpoints_) {
    for (const auto& id : dropped) e.fragments.erase(id);
    for (const auto& id : e.fragments) {
      auto f = fragments_.find(id);
      if (f == fragments_.end()) throw CatalogError("endpoint " + iri + " exposes unknown fragment " + id);
      if (e.role == EndpointRole::Public && f->second.source != iri) {
        throw CatalogError("public endpoint " + iri + " exposes fragment " + id + " of another source");
      }
    }
  }
  for (const auto& [id, f] : fragments_) endpoints_.at(f.source).fragments.insert(id);
  for (const auto& [iri, path] : datasets_) {
    if (!endpoints_.contains(iri)) throw CatalogError("dataset given for undeclared endpoint " + iri);
  }
}

const EndpointDescriptor& FederationCatalog::endpoint(const std::string& iri) const {
  auto it = endpoints_.find(iri);
  if (it == endpoints_.end()) throw CatalogError("unknown endpoint " + iri);
  return it->second;
}

const FragmentDef& FederationCatalog::fragment(const std::string& id) const {
  auto it = fragments_.find(id);
  if (it == fragments_.end()) throw CatalogError("unknown fragment " + id);
  return it->second;
}

bool FederationCatalog::is_public(const std::string& iri) const {
  return endpoint(iri).role == EndpointRole::Public;
}

std::set<std::string> FederationCatalog::public_endpoints() const {
  std::set<std::string> out;
  for (const auto& [iri, e] : endpoints_) {
    if (e.role == EndpointRole::Public) out.insert(iri);
  }
  return out;
}

std::vector<std::string> FederationCatalog::endpoint_order() const {
  std::vector<std::string> out;
  for (const auto& [iri, e] : endpoints_) {
    if (e.role == EndpointRole::Consumer) out.push_back(iri);
  }
  for (const auto& [iri, e] : endpoints_) {
    if (e.role == EndpointRole::Public) out.push_back(iri);
  }
  return out;
}

std::vector<const FragmentDef*> FederationCatalog::fragments_of(const std::string& iri) const {
  std::vector<const FragmentDef*> out;
  for (const auto& id : endpoint(iri).fragments) out.push_back(&fragments_.at(id));
  return out;
}

bool EndpointPreference::operator()(const std::string& a, const std::string& b) const {
  const bool a_public = catalog->is_public(a);
  const bool b_public = catalog->is_public(b);
  if (a_public != b_public) return !a_public;
  return a < b;
}

FederationCatalog load_catalog(std::string_view json_text, CatalogLoadOptions options) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw CatalogError(std::string("catalog is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw CatalogError("catalog must be a JSON object");

  auto require_string = [](const json& obj, const char* key, const std::string& where) -> std::string {
    if (!obj.contains(key) || !obj.at(key).is_string()) {
      throw CatalogError(where + ": missing string field '" + key + "'");
    }
    return obj.at(key).get<std::string>();
  };

  std::vector<EndpointDescriptor> endpoints;
  if (doc.contains("endpoints")) {
    if (!doc["endpoints"].is_array()) throw CatalogError("'endpoints' must be an array");
    for (const auto& e : doc["endpoints"]) {
      if (!e.is_object()) throw CatalogError("endpoint entries must be objects");
      EndpointDescriptor d;
      d.iri = require_string(e, "iri", "endpoint");
      const std::string role = require_string(e, "role", "endpoint " + d.iri);
      if (role == "public") {
        d.role = EndpointRole::Public;
      } else if (role == "consumer") {
        d.role = EndpointRole::Consumer;
      } else {
        throw CatalogError("endpoint " + d.iri + ": role must be 'public' or 'consumer'");
      }
      if (e.contains("fragments")) {
        if (!e["fragments"].is_array()) throw CatalogError("endpoint " + d.iri + ": 'fragments' must be an array");
        for (const auto& id : e["fragments"]) {
          if (!id.is_string()) throw CatalogError("endpoint " + d.iri + ": fragment ids must be strings");
          d.fragments.insert(id.get<std::string>());
        }
      }
      endpoints.push_back(std::move(d));
    }
  }

  std::vector<FragmentDef> fragments;
  if (doc.contains("fragments")) {
    if (!doc["fragments"].is_array()) throw CatalogError("'fragments' must be an array");
    for (const auto& f : doc["fragments"]) {
      if (!f.is_object()) throw CatalogError("fragment entries must be objects");
      const std::string id = require_string(f, "id", "fragment");
      const std::string selector = require_string(f, "selector", "fragment " + id);
      const std::string source = require_string(f, "source", "fragment " + id);
      try {
        fragments.push_back(FragmentDef{id, parse_selector(selector), source});
      } catch (const ParseError& e) {
        throw CatalogError("fragment " + id + ": bad selector: " + e.what());
      }
    }
  }

  std::map<std::string, std::string> datasets;
  if (doc.contains("datasets")) {
    if (!doc["datasets"].is_object()) throw CatalogError("'datasets' must be an object");
    for (const auto& [iri, path] : doc["datasets"].items()) {
      if (!path.is_string()) throw CatalogError("dataset path for " + iri + " must be a string");
      datasets.emplace(iri, path.get<std::string>());
    }
  }
  return FederationCatalog(std::move(endpoints), std::move(fragments), std::move(datasets), options);
}

FederationCatalog load_catalog_file(const std::string& path, CatalogLoadOptions options) {
  std::ifstream in(path);
  if (!in) throw CatalogError("cannot open catalog " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return load_catalog(buffer.str(), options);
}

std::string serialize_catalog(const FederationCatalog& catalog) {
  json doc;
  doc["endpoints"] = json::array();
  for (const auto& [iri, e] : catalog.endpoints()) {
    json entry;
    entry["iri"] = iri;
    entry["role"] = std::string(to_string(e.role));
    entry["fragments"] = json::array();
    for (const auto& id : e.fragments) entry["fragments"].push_back(id);
    doc["endpoints"].push_back(std::move(entry));
  }
  doc["fragments"] = json::array();
  for (const auto& [id, f] : catalog.fragments()) {
    doc["fragments"].push_back({{"id", id}, {"selector", selector_to_string(f.selector)}, {"source", f.source}});
  }
  doc["datasets"] = json::object();
  for (const auto& [iri, path] : catalog.datasets()) doc["datasets"][iri] = path;
  return doc.dump(2) + "\n";
}

FederationCatalog merge_service_descriptions(const std::vector<ServiceDescription>& descriptions,
                                             const std::vector<std::string>& public_endpoints,
                                             std::map<std::string, std::string> datasets) {
  std::vector<EndpointDescriptor> endpoints;
  std::vector<FragmentDef> fragments;
  for (const auto& iri : public_endpoints) endpoints.push_back(EndpointDescriptor{iri, EndpointRole::Public, {}});
  for (const auto& d : descriptions) {
    endpoints.push_back(d.endpoint);
    fragments.insert(fragments.end(), d.fragments.begin(), d.fragments.end());
  }
  return FederationCatalog(std::move(endpoints), std::move(fragments), std::move(datasets));
}

}  // namespace fedra
