#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "fedra/rdf.hpp"

namespace fedra {

class CatalogError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EndpointRole : std::uint8_t { Public, Consumer };

std::string_view to_string(EndpointRole role);

// A triple pattern fragment: the data of `source` matching `selector`.
struct FragmentDef {
  std::string id;
  TriplePattern selector;
  std::string source;

  // Identity used for endpoint containment: selector up to variable renaming
  // plus authoritative source.
  std::string logical_key() const;
};

// Selector with variables renamed ?v0, ?v1, ... in order of appearance.
TriplePattern canonical_selector(const TriplePattern& selector);

struct EndpointDescriptor {
  std::string iri;
  EndpointRole role = EndpointRole::Consumer;
  std::set<std::string> fragments;
};

struct CatalogLoadOptions {
  // Drop fragments whose source is undeclared instead of failing.
  bool tolerate_unknown_sources = false;
};

class FederationCatalog {
 public:
  FederationCatalog() = default;

  // Validates references. A public endpoint implicitly exposes every fragment
  // it is the authoritative source of.
  FederationCatalog(std::vector<EndpointDescriptor> endpoints, std::vector<FragmentDef> fragments,
                    std::map<std::string, std::string> datasets = {}, CatalogLoadOptions options = {});

  const std::map<std::string, EndpointDescriptor>& endpoints() const { return endpoints_; }
  const std::map<std::string, FragmentDef>& fragments() const { return fragments_; }
  const std::map<std::string, std::string>& datasets() const { return datasets_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  const EndpointDescriptor& endpoint(const std::string& iri) const;
  const FragmentDef& fragment(const std::string& id) const;
  bool is_public(const std::string& iri) const;

  std::set<std::string> public_endpoints() const;

  // Consumers before public endpoints, lexicographic within each role.
  std::vector<std::string> endpoint_order() const;

  // Fragments exposed by `iri`, ordered by id.
  std::vector<const FragmentDef*> fragments_of(const std::string& iri) const;

  double containment_visibility = 1.0;
  std::uint64_t containment_seed = 0;

 private:
  std::map<std::string, EndpointDescriptor> endpoints_;
  std::map<std::string, FragmentDef> fragments_;
  std::map<std::string, std::string> datasets_;
  std::vector<std::string> warnings_;
};

// Orders endpoint IRIs consumer-first, then lexicographically.
struct EndpointPreference {
  const FederationCatalog* catalog;
  bool operator()(const std::string& a, const std::string& b) const;
};

FederationCatalog load_catalog(std::string_view json_text, CatalogLoadOptions options = {});
FederationCatalog load_catalog_file(const std::string& path, CatalogLoadOptions options = {});
std::string serialize_catalog(const FederationCatalog& catalog);

struct ServiceDescription {
  EndpointDescriptor endpoint;
  std::vector<FragmentDef> fragments;
};

// Restricted Turtle: `@prefix` lines and one `sd:endpoint` block with
// `dcterms:hasPart [ dc:description "..."; dcterms:source <...> ]` entries.
ServiceDescription parse_service_description(std::string_view text);
std::string write_service_description(const ServiceDescription& description);

// Builds a catalog from consumer descriptions plus the public endpoints.
FederationCatalog merge_service_descriptions(const std::vector<ServiceDescription>& descriptions,
                                             const std::vector<std::string>& public_endpoints,
                                             std::map<std::string, std::string> datasets = {});

}  // namespace fedra
