#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stop_token>
#include <string>
#include <vector>

#include "fedra/catalog.hpp"
#include "fedra/containment.hpp"
#include "fedra/query.hpp"
#include "fedra/rdf.hpp"
#include "fedra/selection.hpp"

namespace fedra {

class ExecutionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExecutionCancelled : public ExecutionError {
 public:
  ExecutionCancelled() : ExecutionError("execution cancelled") {}
};

struct SimulatedEndpoint {
  EndpointDescriptor descriptor;
  // Union of the endpoint's fragments.
  TripleStore store;
  // Fragment id -> the endpoint's copy of that fragment.
  std::map<std::string, TripleStore> fragment_stores;
  // Tuples sent to the query engine.
  mutable std::atomic<std::uint64_t> transferred{0};
};

class Federation : public DataProbe {
 public:
  Federation() = default;
  Federation(Federation&&) = default;
  Federation& operator=(Federation&&) = default;

  const SimulatedEndpoint& endpoint(const std::string& iri) const;
  const std::map<std::string, SimulatedEndpoint>& endpoints() const { return endpoints_; }
  const std::map<std::string, TripleStore>& datasets() const { return datasets_; }

  // All authoritative data in one store.
  const TripleStore& union_store() const { return union_; }

  bool ask(const std::string& endpoint, const TriplePattern& tp) const override;
  bool ask_fragment(const std::string& endpoint, const FragmentDef& fragment, const TriplePattern& tp) const override;

  std::uint64_t total_transferred() const;
  std::uint64_t asks() const { return asks_->load(); }
  void reset_counters() const;

 private:
  friend Federation materialize_federation(const FederationCatalog& catalog,
                                           std::map<std::string, TripleStore> datasets);

  std::map<std::string, SimulatedEndpoint> endpoints_;
  std::map<std::string, TripleStore> datasets_;
  TripleStore union_;
  std::unique_ptr<std::atomic<std::uint64_t>> asks_ = std::make_unique<std::atomic<std::uint64_t>>(0);
};

Federation materialize_federation(const FederationCatalog& catalog, std::map<std::string, TripleStore> datasets);

// Loads the catalog's dataset files, resolving relative paths against `base_dir`.
std::map<std::string, TripleStore> load_datasets(const FederationCatalog& catalog, const std::string& base_dir);

// Evaluates the conjunction at one endpoint and counts the returned mappings.
std::set<SolutionMapping> endpoint_eval(const SimulatedEndpoint& endpoint, const BasicGraphPattern& patterns);

enum class ExecutionMode : std::uint8_t { Delegated, PerTriple };
enum class Strategy : std::uint8_t { Fedra, Ask };

std::string_view to_string(ExecutionMode mode);
std::string_view to_string(Strategy strategy);
ExecutionMode parse_mode(std::string_view text);
Strategy parse_strategy(std::string_view text);

// One result tuple over the query's result variables; unbound positions are empty.
using Row = std::vector<std::optional<Term>>;

struct QueryResult {
  std::vector<std::string> variables;
  std::vector<Row> rows;
};

struct ExecutionReport {
  QueryResult result;
  SelectionMap selection;
  std::size_t nss = 0;
  std::size_t nsps = 0;
  std::uint64_t ir = 0;
  std::size_t probes = 0;
  double sst = 0;
  double tet = 0;
  double recall = 1.0;
};

struct ExecuteOptions {
  ExecutionMode mode = ExecutionMode::Delegated;
  std::stop_token stop;
};

ExecutionReport execute(const Query& query, const SelectionMap& selection, const Federation& federation,
                        const FederationCatalog& catalog, const ExecuteOptions& options = {});

// Ground truth: the query evaluated over all authoritative data.
QueryResult oracle_execute(const Query& query, const Federation& federation);

double recall(const QueryResult& answers, const QueryResult& oracle);

struct RunOptions {
  Strategy strategy = Strategy::Fedra;
  ExecutionMode mode = ExecutionMode::Delegated;
  SelectionOptions selection;
  std::stop_token stop;
};

// Selection followed by execution, with SST covering selection and TET the whole run.
ExecutionReport run_query(const Query& query, const FederationCatalog& catalog, const ContainmentRelation& containment,
                          const Federation& federation, const RunOptions& options = {});

std::string format_row(const Row& row);

struct CsvRow {
  std::string query_id;
  std::string strategy;
  std::string mode;
  std::size_t nss = 0;
  std::size_t nsps = 0;
  std::uint64_t ir = 0;
  double sst = 0;
  double tet = 0;
  double recall = 0;
  std::size_t answers = 0;
  double visibility = 1.0;
  std::size_t probes = 0;
  std::string status = "ok";

  bool operator==(const CsvRow&) const = default;
};

std::string csv_header();
std::string to_csv(const CsvRow& row);
CsvRow parse_csv_row(std::string_view line);

CsvRow make_csv_row(const std::string& query_id, Strategy strategy, ExecutionMode mode, double visibility,
                    const ExecutionReport& report);

}  // namespace fedra
