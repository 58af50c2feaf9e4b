#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stop_token>
#include <string>
#include <vector>

#include "fedra/catalog.hpp"
#include "fedra/engine.hpp"
#include "fedra/query.hpp"
#include "fedra/rdf.hpp"

namespace fedra {

struct DatasetOptions {
  std::size_t subjects = 100;
  std::size_t predicates = 10;
  // Probability that a subject has a given predicate at all.
  double density = 1.0;
  // Objects per (subject, predicate); 1 makes every predicate functional.
  std::size_t max_objects = 1;
  // Size of the constant object pool.
  std::size_t constants = 10;
  // Probability that an object is another subject rather than a constant.
  double link_probability = 0.5;
  std::uint64_t seed = 0;
};

// Synthetic dataset over local terms s<i>, p<j>, o<k>.
TripleStore generate_dataset(const DatasetOptions& options);

struct FederationOptions {
  std::size_t consumers = 4;
  std::size_t fragments_per_consumer = 1;
  std::size_t replication = 1;
  std::size_t publics = 1;
  // Constant-object fragments `?x p o` per predicate, for its most frequent objects.
  std::size_t specializations = 0;
  std::uint64_t seed = 0;
};

struct GeneratedFederation {
  FederationCatalog catalog;
  // Authoritative data per public endpoint.
  std::map<std::string, TripleStore> datasets;
  // Endpoint IRI -> file stem used when writing to disk.
  std::map<std::string, std::string> file_stems;
};

// One `?x p ?y` fragment per predicate plus optional specializations. Each
// fragment goes to `replication` distinct consumers with free capacity; a
// fragment that cannot be placed that many times stays with its public source.
GeneratedFederation generate_federation(const TripleStore& data, const FederationOptions& options);

// Writes catalog.json and one N-Triples file per endpoint into `directory`.
void write_federation(const GeneratedFederation& federation, const std::string& directory);

enum class QueryShape : std::uint8_t { Star, Path, Mixed };

struct QueryGenOptions {
  std::size_t count = 10;
  std::size_t min_patterns = 1;
  std::size_t max_patterns = 4;
  QueryShape shape = QueryShape::Mixed;
  // Probability that a pattern keeps its object as a constant.
  double constant_probability = 0.2;
  std::uint64_t seed = 0;
};

// Star and path queries drawn from random walks over `data`, so each has answers.
std::vector<Query> generate_queries(const TripleStore& data, const QueryGenOptions& options);

// Runs `task` on a worker thread; on timeout requests a stop and returns nullopt.
std::optional<ExecutionReport> run_with_timeout(const std::function<ExecutionReport(std::stop_token)>& task,
                                                std::chrono::duration<double> timeout);

struct QuerySpec {
  std::string id;
  std::string file;
};

struct SuiteManifest {
  std::string catalog;
  // Overrides for the catalog's dataset paths.
  std::map<std::string, std::string> datasets;
  std::vector<QuerySpec> queries;
  std::vector<Strategy> strategies{Strategy::Fedra, Strategy::Ask};
  std::vector<ExecutionMode> modes{ExecutionMode::Delegated};
  std::uint64_t seed = 0;
  std::vector<double> visibility{0.0, 0.25, 0.5, 0.75, 1.0};
  double timeout = 300;
  std::string output;
  Fallback fallback = Fallback::PublicAsk;
};

class ManifestError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Relative paths are resolved against `base_dir`.
SuiteManifest parse_manifest(std::string_view json_text, const std::string& base_dir);
SuiteManifest load_manifest(const std::string& path);

struct SummaryRow {
  std::string strategy;
  std::string mode;
  std::size_t rows = 0;
  std::size_t total_nss = 0;
  std::size_t total_nsps = 0;
  std::uint64_t total_ir = 0;
  double mean_nss = 0;
  double mean_nsps = 0;
  double mean_ir = 0;
  double mean_sst = 0;
  double mean_tet = 0;
  double mean_recall = 0;
};

struct BenchResult {
  std::vector<CsvRow> rows;
  std::vector<SummaryRow> summary;
};

BenchResult run_bench(const SuiteManifest& manifest);

std::string format_csv(const std::vector<CsvRow>& rows);
std::string format_summary(const std::vector<SummaryRow>& summary);
std::vector<SummaryRow> summarize(const std::vector<CsvRow>& rows);

}  // namespace fedra
