#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fedra/catalog.hpp"
#include "fedra/containment.hpp"
#include "fedra/engine.hpp"
#include "fedra/harness.hpp"
#include "fedra/query.hpp"
#include "fedra/selection.hpp"

namespace {

using namespace fedra;

struct CommonOptions {
  std::string catalog;
  std::string query;
  std::string strategy = "fedra";
  double visibility = 1.0;
  std::uint64_t seed = 0;
  std::string fallback = "public-ask";
  std::string out;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void emit(const std::string& text, const std::string& out) {
  if (out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + out);
  file << text;
}

FederationCatalog masked_catalog(const CommonOptions& o) {
  FederationCatalog catalog = load_catalog_file(o.catalog);
  catalog.containment_visibility = o.visibility;
  catalog.containment_seed = o.seed;
  return catalog;
}

Federation load_federation(const FederationCatalog& catalog, const std::string& catalog_path) {
  const std::string base = std::filesystem::path(catalog_path).parent_path().string();
  return materialize_federation(catalog, load_datasets(catalog, base));
}

SelectionOptions selection_options(const CommonOptions& o) {
  return SelectionOptions{o.fallback == "fail" ? Fallback::Fail : Fallback::PublicAsk};
}

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--catalog", o.catalog, "Federation catalog JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--query", o.query, "SPARQL query file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--strategy", o.strategy, "Source selection strategy")
      ->check(CLI::IsMember({"fedra", "ask"}));
  cmd->add_option("--visibility", o.visibility, "Fraction of containment knowledge visible")
      ->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--seed", o.seed, "Seed for containment masking");
  cmd->add_option("--fallback", o.fallback, "Behavior when no fragment is relevant")
      ->check(CLI::IsMember({"public-ask", "fail"}));
  cmd->add_option("--out", o.out, "Output file instead of stdout");
}

int cmd_select(const CommonOptions& o) {
  const FederationCatalog catalog = masked_catalog(o);
  const Query query = parse_query(read_file(o.query));
  const Federation federation = load_federation(catalog, o.catalog);
  const SelectionResult result =
      o.strategy == "fedra" ? fedra_select(query, catalog, build_containment(catalog), federation, selection_options(o))
                            : ask_baseline_select(query, catalog, federation);
  emit(format_diagnostics(result, catalog), o.out);
  return 0;
}

int cmd_run(const CommonOptions& o, const std::string& mode, double timeout, const std::string& id, bool answers) {
  const FederationCatalog catalog = masked_catalog(o);
  const Query query = parse_query(read_file(o.query));
  for (const auto& w : query.warnings) std::cerr << "warning: " << w << "\n";
  const Federation federation = load_federation(catalog, o.catalog);
  const ContainmentRelation containment = build_containment(catalog);
  const Strategy strategy = parse_strategy(o.strategy);
  const ExecutionMode exec_mode = parse_mode(mode);
  const std::string query_id = id.empty() ? std::filesystem::path(o.query).stem().string() : id;

  const auto report = run_with_timeout(
      [&](std::stop_token stop) {
        RunOptions options{strategy, exec_mode, selection_options(o), std::move(stop)};
        return run_query(query, catalog, containment, federation, options);
      },
      std::chrono::duration<double>(timeout));

  std::string text = csv_header() + "\n";
  if (report) {
    text += to_csv(make_csv_row(query_id, strategy, exec_mode, o.visibility, *report)) + "\n";
    if (answers) {
      std::string header;
      for (const auto& v : report->result.variables) header += (header.empty() ? "?" : "\t?") + v;
      text += header + "\n";
      for (const auto& row : report->result.rows) text += format_row(row) + "\n";
    }
  } else {
    CsvRow row;
    row.query_id = query_id;
    row.strategy = o.strategy;
    row.mode = mode;
    row.visibility = o.visibility;
    row.tet = timeout;
    row.status = "timeout";
    text += to_csv(row) + "\n";
  }
  emit(text, o.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Replication-aware source selection for federated SPARQL queries"};
  app.require_subcommand(1);

  CommonOptions select_opts;
  auto* select = app.add_subcommand("select", "Print source selection diagnostics for a query");
  add_common(select, select_opts);

  CommonOptions run_opts;
  std::string mode = "delegated";
  double timeout = 300;
  std::string run_id;
  bool show_answers = false;
  auto* run = app.add_subcommand("run", "Select sources, execute and report metrics");
  add_common(run, run_opts);
  run->add_option("--mode", mode, "Execution mode")->check(CLI::IsMember({"delegated", "per-triple"}));
  run->add_option("--timeout", timeout, "Wall-clock timeout in seconds")->check(CLI::PositiveNumber);
  run->add_option("--id", run_id, "Query id for the report row");
  run->add_flag("--answers", show_answers, "Print the answers after the report row");

  std::string manifest_path;
  std::string bench_out;
  std::string summary_out;
  auto* bench = app.add_subcommand("bench", "Run a benchmark manifest and write CSV rows");
  bench->add_option("manifest", manifest_path, "Benchmark manifest JSON")->required()->check(CLI::ExistingFile);
  bench->add_option("--out", bench_out, "CSV output file (defaults to the manifest's output)");
  bench->add_option("--summary", summary_out, "Per-strategy summary output file");

  std::string dataset_path;
  std::string federation_dir;
  FederationOptions fed_opts;
  auto* gen_fed = app.add_subcommand("gen-federation", "Generate a replicated federation from a dataset");
  gen_fed->add_option("--dataset", dataset_path, "Public dataset in N-Triples")->required()->check(CLI::ExistingFile);
  gen_fed->add_option("--consumers", fed_opts.consumers, "Number of consumer endpoints")->check(CLI::PositiveNumber);
  gen_fed->add_option("--fragments-per-consumer", fed_opts.fragments_per_consumer, "Fragments per consumer")
      ->check(CLI::PositiveNumber);
  gen_fed->add_option("--replication", fed_opts.replication, "Consumers per replicated fragment")
      ->check(CLI::PositiveNumber);
  gen_fed->add_option("--publics", fed_opts.publics, "Number of public endpoints")->check(CLI::PositiveNumber);
  gen_fed->add_option("--specializations", fed_opts.specializations, "Constant-object fragments per predicate");
  gen_fed->add_option("--seed", fed_opts.seed, "Placement seed");
  gen_fed->add_option("--out", federation_dir, "Output directory")->required();

  DatasetOptions data_opts;
  std::string dataset_out;
  auto* gen_data = app.add_subcommand("gen-dataset", "Generate a synthetic N-Triples dataset");
  gen_data->add_option("--subjects", data_opts.subjects, "Number of subjects")->check(CLI::PositiveNumber);
  gen_data->add_option("--predicates", data_opts.predicates, "Number of predicates")->check(CLI::PositiveNumber);
  gen_data->add_option("--max-objects", data_opts.max_objects, "Objects per subject and predicate")
      ->check(CLI::PositiveNumber);
  gen_data->add_option("--constants", data_opts.constants, "Constant object pool size");
  gen_data->add_option("--density", data_opts.density, "Probability a subject uses a predicate")
      ->check(CLI::Range(0.0, 1.0));
  gen_data->add_option("--seed", data_opts.seed, "Generator seed");
  gen_data->add_option("--out", dataset_out, "Output file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (select->parsed()) return cmd_select(select_opts);
    if (run->parsed()) return cmd_run(run_opts, mode, timeout, run_id, show_answers);
    if (bench->parsed()) {
      SuiteManifest manifest = load_manifest(manifest_path);
      if (!bench_out.empty()) manifest.output = bench_out;
      const BenchResult result = run_bench(manifest);
      emit(format_csv(result.rows), manifest.output);
      if (!summary_out.empty()) {
        emit(format_summary(result.summary), summary_out);
      } else {
        std::cerr << format_summary(result.summary);
      }
      return 0;
    }
    if (gen_fed->parsed()) {
      write_federation(generate_federation(load_ntriples_file(dataset_path), fed_opts), federation_dir);
      return 0;
    }
    if (gen_data->parsed()) {
      emit(serialize_ntriples(generate_dataset(data_opts)), dataset_out);
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
