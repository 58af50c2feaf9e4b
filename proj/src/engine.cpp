#include "fedra/engine.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace fedra {

const SimulatedEndpoint& Federation::endpoint(const std::string& iri) const {
  auto it = endpoints_.find(iri);
  if (it == endpoints_.end()) throw ExecutionError("endpoint " + iri + " missing from federation");
  return it->second;
}

bool Federation::ask(const std::string& endpoint, const TriplePattern& tp) const {
  ++*asks_;
  return this->endpoint(endpoint).store.has_match(tp);
}

bool Federation::ask_fragment(const std::string& endpoint, const FragmentDef& fragment,
                              const TriplePattern& tp) const {
  ++*asks_;
  const auto& stores = this->endpoint(endpoint).fragment_stores;
  auto it = stores.find(fragment.id);
  return it != stores.end() && it->second.has_match(tp);
}

std::uint64_t Federation::total_transferred() const {
  std::uint64_t total = 0;
  for (const auto& [iri, e] : endpoints_) total += e.transferred.load();
  return total;
}

void Federation::reset_counters() const {
  for (const auto& [iri, e] : endpoints_) e.transferred.store(0);
  asks_->store(0);
}

Federation materialize_federation(const FederationCatalog& catalog, std::map<std::string, TripleStore> datasets) {
  Federation fed;
  std::map<std::string, TripleStore> gamma;
  for (const auto& [id, f] : catalog.fragments()) {
    auto source = datasets.find(f.source);
    if (source == datasets.end()) throw ExecutionError("missing dataset for source " + f.source);
    TripleStore data;
    for (const Triple* t : source->second.candidates(f.selector)) {
      if (unify_with_triple(f.selector, *t)) data.insert(*t);
    }
    gamma.emplace(id, std::move(data));
  }

  for (const auto& [iri, descriptor] : catalog.endpoints()) {
    SimulatedEndpoint& e = fed.endpoints_[iri];
    e.descriptor = descriptor;
    for (const auto& id : descriptor.fragments) {
      const TripleStore& data = gamma.at(id);
      e.store.insert_all(data);
      e.fragment_stores.emplace(id, data);
    }
    if (descriptor.role == EndpointRole::Public) {
      auto it = datasets.find(iri);
      if (it != datasets.end()) {
        e.store = it->second;
        fed.union_.insert_all(it->second);
        fed.datasets_.emplace(iri, std::move(it->second));
      }
    }
  }
  return fed;
}

std::map<std::string, TripleStore> load_datasets(const FederationCatalog& catalog, const std::string& base_dir) {
  std::map<std::string, TripleStore> out;
  for (const auto& [iri, path] : catalog.datasets()) {
    if (!catalog.is_public(iri)) continue;
    std::filesystem::path p(path);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    out.emplace(iri, load_ntriples_file(p.string()));
  }
  return out;
}

std::set<SolutionMapping> endpoint_eval(const SimulatedEndpoint& endpoint, const BasicGraphPattern& patterns) {
  if (patterns.patterns.empty()) throw ExecutionError("endpoint_eval needs at least one pattern");
  auto result = evaluate_bgp(endpoint.store, patterns.patterns);
  endpoint.transferred += result.size();
  return result;
}

std::string_view to_string(ExecutionMode mode) {
  return mode == ExecutionMode::Delegated ? "delegated" : "per-triple";
}

std::string_view to_string(Strategy strategy) { return strategy == Strategy::Fedra ? "fedra" : "ask"; }

ExecutionMode parse_mode(std::string_view text) {
  if (text == "delegated") return ExecutionMode::Delegated;
  if (text == "per-triple") return ExecutionMode::PerTriple;
  throw std::invalid_argument("unknown mode '" + std::string(text) + "'");
}

Strategy parse_strategy(std::string_view text) {
  if (text == "fedra") return Strategy::Fedra;
  if (text == "ask") return Strategy::Ask;
  throw std::invalid_argument("unknown strategy '" + std::string(text) + "'");
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

// Unbound < IRI < literal, then serialized form.
bool term_less(const std::optional<Term>& a, const std::optional<Term>& b) {
  if (!a || !b) return !a && b;
  if (a->kind() != b->kind()) return a->kind() < b->kind();
  return a->to_string() < b->to_string();
}

bool row_less(const Row& a, const Row& b, const std::vector<std::size_t>& keys) {
  for (const std::size_t k : keys) {
    if (term_less(a[k], b[k])) return true;
    if (term_less(b[k], a[k])) return false;
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (term_less(a[k], b[k])) return true;
    if (term_less(b[k], a[k])) return false;
  }
  return false;
}

QueryResult finalize(const Query& query, const std::set<SolutionMapping>& solutions) {
  QueryResult out;
  out.variables = query.result_variables();
  for (const auto& mapping : solutions) {
    Row row;
    for (const auto& v : out.variables) {
      auto it = mapping.find(v);
      row.push_back(it == mapping.end() ? std::nullopt : std::optional<Term>(it->second));
    }
    out.rows.push_back(std::move(row));
  }
  std::vector<std::size_t> keys;
  for (const auto& v : query.order_by) {
    keys.push_back(static_cast<std::size_t>(std::find(out.variables.begin(), out.variables.end(), v) -
                                            out.variables.begin()));
  }
  std::stable_sort(out.rows.begin(), out.rows.end(),
                   [&](const Row& a, const Row& b) { return row_less(a, b, keys); });
  if (query.distinct) {
    out.rows.erase(std::unique(out.rows.begin(), out.rows.end()), out.rows.end());
  }
  if (query.limit && out.rows.size() > *query.limit) out.rows.resize(*query.limit);
  return out;
}

class Executor {
 public:
  Executor(const Federation& federation, const FederationCatalog& catalog, const ExecuteOptions& options)
      : federation_(federation), preference_{&catalog}, options_(options) {}

  std::set<SolutionMapping> run_bgp(const BasicGraphPattern& bgp, const std::vector<const SelectionEntry*>& entries) {
    std::vector<std::set<SolutionMapping>> partials;
    std::vector<std::size_t> single;
    for (std::size_t i = 0; i < bgp.patterns.size(); ++i) {
      const auto& endpoints = entries[i]->endpoints;
      if (options_.mode == ExecutionMode::Delegated && endpoints.size() == 1) {
        single.push_back(i);
      } else {
        partials.push_back(union_over(bgp.patterns[i], endpoints));
      }
    }

    // Greedy partition of single-endpoint patterns into delegated groups.
    while (!single.empty()) {
      std::map<std::string, std::size_t> counts;
      for (const std::size_t i : single) ++counts[*entries[i]->endpoints.begin()];
      const auto best = std::min_element(counts.begin(), counts.end(), [&](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return preference_(a.first, b.first);
      });
      BasicGraphPattern group;
      std::vector<std::size_t> rest;
      for (const std::size_t i : single) {
        if (*entries[i]->endpoints.begin() == best->first) {
          group.patterns.push_back(bgp.patterns[i]);
        } else {
          rest.push_back(i);
        }
      }
      partials.push_back(eval(best->first, group));
      single = std::move(rest);
    }

    std::stable_sort(partials.begin(), partials.end(),
                     [](const auto& a, const auto& b) { return a.size() < b.size(); });
    std::set<SolutionMapping> result = std::move(partials.front());
    for (std::size_t i = 1; i < partials.size(); ++i) result = join(result, partials[i]);
    return result;
  }

  std::uint64_t ir() const { return ir_; }

 private:
  std::set<SolutionMapping> union_over(const TriplePattern& tp, const std::set<std::string>& endpoints) {
    std::set<SolutionMapping> out;
    for (const auto& e : endpoints) out.merge(eval(e, BasicGraphPattern{{tp}}));
    return out;
  }

  std::set<SolutionMapping> eval(const std::string& endpoint, const BasicGraphPattern& patterns) {
    if (options_.stop.stop_requested()) throw ExecutionCancelled();
    auto result = endpoint_eval(federation_.endpoint(endpoint), patterns);
    ir_ += result.size();
    return result;
  }

  const Federation& federation_;
  EndpointPreference preference_;
  const ExecuteOptions& options_;
  std::uint64_t ir_ = 0;
};

ExecutionReport execute_plan(const Query& query, const SelectionMap& selection, const Federation& federation,
                             const FederationCatalog& catalog, const ExecuteOptions& options) {
  for (const auto& entry : selection.entries) {
    for (const auto& e : entry.endpoints) federation.endpoint(e);
  }
  Executor executor(federation, catalog, options);
  std::set<SolutionMapping> solutions;
  for (std::size_t b = 0; b < query.body.size(); ++b) {
    const auto& bgp = query.body[b];
    std::vector<const SelectionEntry*> entries;
    for (std::size_t i = 0; i < bgp.patterns.size(); ++i) entries.push_back(&selection.at(b, i));
    solutions.merge(executor.run_bgp(bgp, entries));
  }
  ExecutionReport report;
  report.result = finalize(query, solutions);
  report.selection = selection;
  report.nss = selection.nss();
  report.nsps = selection.nsps(catalog.public_endpoints());
  report.ir = executor.ir();
  return report;
}

}  // namespace

ExecutionReport execute(const Query& query, const SelectionMap& selection, const Federation& federation,
                        const FederationCatalog& catalog, const ExecuteOptions& options) {
  const auto start = Clock::now();
  ExecutionReport report = execute_plan(query, selection, federation, catalog, options);
  report.tet = seconds_since(start);
  report.recall = recall(report.result, oracle_execute(query, federation));
  return report;
}

QueryResult oracle_execute(const Query& query, const Federation& federation) {
  std::set<SolutionMapping> solutions;
  for (const auto& bgp : query.body) solutions.merge(evaluate_bgp(federation.union_store(), bgp.patterns));
  return finalize(query, solutions);
}

double recall(const QueryResult& answers, const QueryResult& oracle) {
  const std::set<Row> expected(oracle.rows.begin(), oracle.rows.end());
  if (expected.empty()) return 1.0;
  const std::set<Row> got(answers.rows.begin(), answers.rows.end());
  const auto hits = std::count_if(expected.begin(), expected.end(), [&](const Row& r) { return got.contains(r); });
  return static_cast<double>(hits) / static_cast<double>(expected.size());
}

ExecutionReport run_query(const Query& query, const FederationCatalog& catalog, const ContainmentRelation& containment,
                          const Federation& federation, const RunOptions& options) {
  const auto start = Clock::now();
  const SelectionResult selection = options.strategy == Strategy::Fedra
                                        ? fedra_select(query, catalog, containment, federation, options.selection)
                                        : ask_baseline_select(query, catalog, federation);
  const double sst = seconds_since(start);
  ExecutionReport report =
      execute_plan(query, selection.map, federation, catalog, ExecuteOptions{options.mode, options.stop});
  report.tet = seconds_since(start);
  report.sst = sst;
  report.probes = selection.diagnostics.probes;
  report.recall = recall(report.result, oracle_execute(query, federation));
  return report;
}

std::string format_row(const Row& row) {
  std::string out;
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out += '\t';
    out += row[i] ? row[i]->to_string() : "UNDEF";
  }
  return out;
}

std::string csv_header() {
  return "query_id,strategy,mode,nss,nsps,ir,sst,tet,recall,answers,visibility,probes,status";
}

namespace {

std::string fixed(double value, int digits) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", digits, value);
  return buffer;
}

void check_field(const std::string& value) {
  if (value.find_first_of(",\n\"") != std::string::npos) {
    throw std::invalid_argument("CSV field contains a separator: " + value);
  }
}

}  // namespace

std::string to_csv(const CsvRow& row) {
  check_field(row.query_id);
  check_field(row.strategy);
  check_field(row.mode);
  check_field(row.status);
  std::ostringstream out;
  out << row.query_id << ',' << row.strategy << ',' << row.mode << ',' << row.nss << ',' << row.nsps << ','
      << row.ir << ',' << fixed(row.sst, 3) << ',' << fixed(row.tet, 3) << ',' << fixed(row.recall, 4) << ','
      << row.answers << ',' << fixed(row.visibility, 2) << ',' << row.probes << ',' << row.status;
  return out.str();
}

CsvRow parse_csv_row(std::string_view line) {
  std::vector<std::string> fields;
  std::string current;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(std::move(current));
      current.clear();
    } else if (c != '\r' && c != '\n') {
      current += c;
    }
  }
  fields.push_back(std::move(current));
  if (fields.size() != 13) {
    throw std::invalid_argument("expected 13 CSV fields, found " + std::to_string(fields.size()));
  }
  CsvRow row;
  row.query_id = fields[0];
  row.strategy = fields[1];
  row.mode = fields[2];
  row.nss = std::stoull(fields[3]);
  row.nsps = std::stoull(fields[4]);
  row.ir = std::stoull(fields[5]);
  row.sst = std::stod(fields[6]);
  row.tet = std::stod(fields[7]);
  row.recall = std::stod(fields[8]);
  row.answers = std::stoull(fields[9]);
  row.visibility = std::stod(fields[10]);
  row.probes = std::stoull(fields[11]);
  row.status = fields[12];
  return row;
}

CsvRow make_csv_row(const std::string& query_id, Strategy strategy, ExecutionMode mode, double visibility,
                    const ExecutionReport& report) {
  CsvRow row;
  row.query_id = query_id;
  row.strategy = std::string(to_string(strategy));
  row.mode = std::string(to_string(mode));
  row.nss = report.nss;
  row.nsps = report.nsps;
  row.ir = report.ir;
  row.sst = report.sst;
  row.tet = report.tet;
  row.recall = report.recall;
  row.answers = report.result.rows.size();
  row.visibility = visibility;
  row.probes = report.probes;
  return row;
}

}  // namespace fedra
