#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "fedra/catalog.hpp"
#include "fedra/containment.hpp"
#include "fedra/engine.hpp"
#include "fedra/query.hpp"

namespace fedra::testing {

inline std::string fixture_path(const std::string& name) { return std::string(FEDRA_FIXTURE_DIR) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name), std::ios::binary);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

inline FederationCatalog running_catalog(double visibility = 1.0, std::uint64_t seed = 0) {
  FederationCatalog catalog = load_catalog_file(fixture_path("catalog.json"));
  catalog.containment_visibility = visibility;
  catalog.containment_seed = seed;
  return catalog;
}

inline Federation running_federation() {
  const FederationCatalog catalog = running_catalog();
  return materialize_federation(catalog, load_datasets(catalog, FEDRA_FIXTURE_DIR));
}

inline Query running_query(int n) { return parse_query(read_fixture("q" + std::to_string(n) + ".rq")); }

inline TriplePattern tp(const std::string& text) { return parse_selector("CONSTRUCT WHERE { " + text + " }"); }

}  // namespace fedra::testing
