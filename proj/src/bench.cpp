#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fedra/harness.hpp"

namespace fedra {

using json = nlohmann::json;

std::optional<ExecutionReport> run_with_timeout(const std::function<ExecutionReport(std::stop_token)>& task,
                                                std::chrono::duration<double> timeout) {
  std::promise<ExecutionReport> promise;
  std::future<ExecutionReport> result = promise.get_future();
  std::jthread worker([&task, &promise](std::stop_token stop) {
    try {
      promise.set_value(task(stop));
    } catch (...) {
      promise.set_exception(std::current_exception());
    }
  });
  if (result.wait_for(timeout) == std::future_status::timeout) {
    worker.request_stop();
    return std::nullopt;
  }
  return result.get();
}

namespace {

std::string resolve(const std::string& path, const std::string& base_dir) {
  std::filesystem::path p(path);
  if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
  return p.lexically_normal().string();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

SuiteManifest parse_manifest(std::string_view json_text, const std::string& base_dir) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ManifestError("manifest must be a JSON object");

  SuiteManifest m;
  try {
    if (!doc.contains("catalog")) throw ManifestError("manifest needs a 'catalog' path");
    m.catalog = resolve(doc.at("catalog").get<std::string>(), base_dir);
    if (doc.contains("datasets")) {
      for (const auto& [iri, path] : doc.at("datasets").items()) {
        m.datasets[iri] = resolve(path.get<std::string>(), base_dir);
      }
    }
    if (doc.contains("queries")) {
      for (const auto& q : doc.at("queries")) {
        m.queries.push_back(QuerySpec{q.at("id").get<std::string>(), resolve(q.at("file").get<std::string>(), base_dir)});
      }
    }
    if (doc.contains("strategies")) {
      m.strategies.clear();
      for (const auto& s : doc.at("strategies")) m.strategies.push_back(parse_strategy(s.get<std::string>()));
    }
    if (doc.contains("modes")) {
      m.modes.clear();
      for (const auto& s : doc.at("modes")) m.modes.push_back(parse_mode(s.get<std::string>()));
    }
    if (doc.contains("seed")) m.seed = doc.at("seed").get<std::uint64_t>();
    if (doc.contains("visibility")) m.visibility = doc.at("visibility").get<std::vector<double>>();
    if (doc.contains("timeout")) m.timeout = doc.at("timeout").get<double>();
    if (doc.contains("output")) m.output = resolve(doc.at("output").get<std::string>(), base_dir);
    if (doc.contains("fallback")) {
      const auto f = doc.at("fallback").get<std::string>();
      if (f != "public-ask" && f != "fail") throw ManifestError("fallback must be 'public-ask' or 'fail'");
      m.fallback = f == "fail" ? Fallback::Fail : Fallback::PublicAsk;
    }
  } catch (const json::exception& e) {
    throw ManifestError(std::string("malformed manifest: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ManifestError(e.what());
  }

  for (const double v : m.visibility) {
    if (v < 0.0 || v > 1.0) throw ManifestError("visibility levels must lie in [0, 1]");
  }
  if (m.timeout <= 0) throw ManifestError("timeout must be positive");
  if (!std::filesystem::exists(m.catalog)) throw ManifestError("catalog not found: " + m.catalog);
  for (const auto& [iri, path] : m.datasets) {
    if (!std::filesystem::exists(path)) throw ManifestError("dataset not found: " + path);
  }
  for (const auto& q : m.queries) {
    if (!std::filesystem::exists(q.file)) throw ManifestError("query file not found: " + q.file);
  }
  return m;
}

SuiteManifest load_manifest(const std::string& path) {
  const std::string base = std::filesystem::path(path).parent_path().string();
  return parse_manifest(read_file(path), base);
}

BenchResult run_bench(const SuiteManifest& manifest) {
  const FederationCatalog catalog = load_catalog_file(manifest.catalog);
  auto datasets = load_datasets(catalog, std::filesystem::path(manifest.catalog).parent_path().string());
  for (const auto& [iri, path] : manifest.datasets) datasets[iri] = load_ntriples_file(path);
  const Federation federation = materialize_federation(catalog, std::move(datasets));

  std::vector<std::pair<FederationCatalog, ContainmentRelation>> levels;
  for (const double v : manifest.visibility) {
    FederationCatalog masked = catalog;
    masked.containment_visibility = v;
    masked.containment_seed = manifest.seed;
    ContainmentRelation containment = build_containment(masked);
    levels.emplace_back(std::move(masked), std::move(containment));
  }

  BenchResult result;
  for (const auto& spec : manifest.queries) {
    std::optional<Query> query;
    std::string parse_error;
    try {
      query = parse_query(read_file(spec.file));
    } catch (const std::exception& e) {
      parse_error = e.what();
    }
    for (const Strategy strategy : manifest.strategies) {
      for (const ExecutionMode mode : manifest.modes) {
        for (std::size_t v = 0; v < levels.size(); ++v) {
          const auto& [masked, containment] = levels[v];
          CsvRow row;
          row.query_id = spec.id;
          row.strategy = std::string(to_string(strategy));
          row.mode = std::string(to_string(mode));
          row.visibility = manifest.visibility[v];
          if (!query) {
            row.status = "error";
            std::cerr << spec.id << ": " << parse_error << "\n";
            result.rows.push_back(std::move(row));
            continue;
          }
          try {
            const auto report = run_with_timeout(
                [&](std::stop_token stop) {
                  RunOptions options{strategy, mode, SelectionOptions{manifest.fallback}, std::move(stop)};
                  return run_query(*query, masked, containment, federation, options);
                },
                std::chrono::duration<double>(manifest.timeout));
            if (report) {
              row = make_csv_row(spec.id, strategy, mode, manifest.visibility[v], *report);
            } else {
              row.status = "timeout";
              row.tet = manifest.timeout;
            }
          } catch (const std::exception& e) {
            row.status = "error";
            std::cerr << spec.id << " " << row.strategy << " " << row.mode << ": " << e.what() << "\n";
          }
          result.rows.push_back(std::move(row));
        }
      }
    }
  }
  result.summary = summarize(result.rows);
  return result;
}

std::string format_csv(const std::vector<CsvRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const auto& row : rows) out += to_csv(row) + "\n";
  return out;
}

std::vector<SummaryRow> summarize(const std::vector<CsvRow>& rows) {
  std::vector<SummaryRow> out;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(),
                           [&](const SummaryRow& s) { return s.strategy == row.strategy && s.mode == row.mode; });
    if (it == out.end()) {
      out.push_back(SummaryRow{row.strategy, row.mode});
      it = std::prev(out.end());
    }
    ++it->rows;
    it->total_nss += row.nss;
    it->total_nsps += row.nsps;
    it->total_ir += row.ir;
    it->mean_sst += row.sst;
    it->mean_tet += row.tet;
    it->mean_recall += row.recall;
  }
  for (auto& s : out) {
    const auto n = static_cast<double>(s.rows);
    s.mean_nss = static_cast<double>(s.total_nss) / n;
    s.mean_nsps = static_cast<double>(s.total_nsps) / n;
    s.mean_ir = static_cast<double>(s.total_ir) / n;
    s.mean_sst /= n;
    s.mean_tet /= n;
    s.mean_recall /= n;
  }
  return out;
}

std::string format_summary(const std::vector<SummaryRow>& summary) {
  std::ostringstream out;
  out << "strategy,mode,rows,total_nss,total_nsps,total_ir,mean_nss,mean_nsps,mean_ir,mean_sst,mean_tet,mean_recall\n";
  out.setf(std::ios::fixed);
  out.precision(3);
  for (const auto& s : summary) {
    out << s.strategy << ',' << s.mode << ',' << s.rows << ',' << s.total_nss << ',' << s.total_nsps << ','
        << s.total_ir << ',' << s.mean_nss << ',' << s.mean_nsps << ',' << s.mean_ir << ',' << s.mean_sst << ','
        << s.mean_tet << ',' << s.mean_recall << '\n';
  }
  return out.str();
}

}  // namespace fedra
