#include <algorithm>
#include <filesystem>
#include <fstream>
#include <random>

#include "fedra/harness.hpp"

namespace fedra {

namespace {

Term local_term(const char* prefix, std::size_t index) { return Term::local(prefix + std::to_string(index)); }

std::size_t pick(std::mt19937_64& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

bool chance(std::mt19937_64& rng, double p) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p; }

}  // namespace

TripleStore generate_dataset(const DatasetOptions& options) {
  if (options.subjects == 0 || options.predicates == 0 || options.max_objects == 0) {
    throw std::invalid_argument("dataset needs subjects, predicates and objects");
  }
  std::mt19937_64 rng(options.seed);
  TripleStore store;
  for (std::size_t s = 0; s < options.subjects; ++s) {
    for (std::size_t p = 0; p < options.predicates; ++p) {
      if (!chance(rng, options.density)) continue;
      const std::size_t objects = 1 + pick(rng, options.max_objects);
      for (std::size_t k = 0; k < objects; ++k) {
        const bool link = options.constants == 0 || chance(rng, options.link_probability);
        const Term object =
            link ? local_term("s", pick(rng, options.subjects)) : local_term("o", pick(rng, options.constants));
        store.insert(Triple(local_term("s", s), local_term("p", p), object));
      }
    }
  }
  return store;
}

GeneratedFederation generate_federation(const TripleStore& data, const FederationOptions& options) {
  const std::vector<Term> predicates = data.predicates();
  if (predicates.empty()) throw std::invalid_argument("dataset has no predicates");
  if (options.consumers == 0 || options.fragments_per_consumer == 0 || options.replication == 0 ||
      options.publics == 0) {
    throw std::invalid_argument("federation parameters must be positive");
  }

  GeneratedFederation out;
  std::vector<EndpointDescriptor> endpoints;
  std::vector<std::string> publics;
  for (std::size_t k = 1; k <= options.publics; ++k) {
    const std::string iri = "http://publicEndpoint" + std::to_string(k) + "/sparql";
    publics.push_back(iri);
    out.file_stems[iri] = "public" + std::to_string(k);
    endpoints.push_back(EndpointDescriptor{iri, EndpointRole::Public, {}});
  }

  std::vector<FragmentDef> fragments;
  auto add_fragment = [&](TriplePattern selector, const std::string& source) {
    fragments.push_back(FragmentDef{"f" + std::to_string(fragments.size() + 1), std::move(selector), source});
  };
  for (std::size_t j = 0; j < predicates.size(); ++j) {
    const std::string& source = publics[j % publics.size()];
    const Term& p = predicates[j];
    TripleStore& dataset = out.datasets[source];
    std::map<Term, std::size_t> object_counts;
    for (const Triple* t : data.candidates(TriplePattern(PatternTerm::var("x"), p, PatternTerm::var("y")))) {
      dataset.insert(*t);
      ++object_counts[t->object];
    }
    add_fragment(TriplePattern(PatternTerm::var("x"), p, PatternTerm::var("y")), source);

    std::vector<std::pair<Term, std::size_t>> frequent(object_counts.begin(), object_counts.end());
    std::stable_sort(frequent.begin(), frequent.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    for (std::size_t k = 0; k < std::min(options.specializations, frequent.size()); ++k) {
      add_fragment(TriplePattern(PatternTerm::var("x"), p, frequent[k].first), source);
    }
  }
  for (const auto& iri : publics) out.datasets.try_emplace(iri);

  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(fragments.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<EndpointDescriptor> consumers;
  std::vector<std::size_t> capacity(options.consumers, options.fragments_per_consumer);
  for (std::size_t c = 1; c <= options.consumers; ++c) {
    const std::string iri = "http://consumer" + std::to_string(c) + "/sparql";
    out.file_stems[iri] = "consumer" + std::to_string(c);
    consumers.push_back(EndpointDescriptor{iri, EndpointRole::Consumer, {}});
  }
  for (const std::size_t f : order) {
    std::vector<std::size_t> free;
    for (std::size_t c = 0; c < capacity.size(); ++c) {
      if (capacity[c] > 0) free.push_back(c);
    }
    if (free.size() < options.replication) continue;
    std::shuffle(free.begin(), free.end(), rng);
    std::stable_sort(free.begin(), free.end(), [&](std::size_t a, std::size_t b) { return capacity[a] > capacity[b]; });
    for (std::size_t k = 0; k < options.replication; ++k) {
      --capacity[free[k]];
      consumers[free[k]].fragments.insert(fragments[f].id);
    }
  }
  endpoints.insert(endpoints.end(), consumers.begin(), consumers.end());

  std::map<std::string, std::string> dataset_files;
  for (const auto& iri : publics) dataset_files[iri] = out.file_stems.at(iri) + ".nt";
  out.catalog = FederationCatalog(std::move(endpoints), std::move(fragments), std::move(dataset_files));
  return out;
}

void write_federation(const GeneratedFederation& federation, const std::string& directory) {
  const std::filesystem::path dir(directory);
  std::filesystem::create_directories(dir);
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
  };
  write(dir / "catalog.json", serialize_catalog(federation.catalog) + "\n");
  const Federation fed = materialize_federation(federation.catalog, federation.datasets);
  for (const auto& [iri, endpoint] : fed.endpoints()) {
    write(dir / (federation.file_stems.at(iri) + ".nt"), serialize_ntriples(endpoint.store));
  }
}

namespace {

std::string pattern_text(const std::string& subject, const Term& predicate, const std::string& object) {
  return subject + " " + predicate.to_string() + " " + object;
}

}  // namespace

std::vector<Query> generate_queries(const TripleStore& data, const QueryGenOptions& options) {
  if (data.empty()) throw std::invalid_argument("cannot generate queries over an empty dataset");
  if (options.min_patterns == 0 || options.min_patterns > options.max_patterns) {
    throw std::invalid_argument("invalid pattern count range");
  }
  const std::vector<Triple> triples = data.sorted();
  std::map<Term, std::vector<const Triple*>> by_subject;
  for (const auto& t : triples) by_subject[t.subject].push_back(&t);
  std::vector<Term> subjects;
  for (const auto& [s, ts] : by_subject) subjects.push_back(s);

  std::mt19937_64 rng(options.seed);
  auto object_text = [&](const Triple& t, const std::string& var) {
    return chance(rng, options.constant_probability) ? t.object.to_string() : var;
  };

  auto star = [&](std::size_t k) {
    const Term& subject = subjects[pick(rng, subjects.size())];
    std::map<Term, std::vector<const Triple*>> by_predicate;
    for (const Triple* t : by_subject.at(subject)) by_predicate[t->predicate].push_back(t);
    std::vector<Term> predicates;
    for (const auto& [p, ts] : by_predicate) predicates.push_back(p);
    std::shuffle(predicates.begin(), predicates.end(), rng);
    if (predicates.size() > k) predicates.erase(predicates.begin() + static_cast<std::ptrdiff_t>(k), predicates.end());
    std::vector<std::string> patterns;
    for (std::size_t i = 0; i < predicates.size(); ++i) {
      const auto& candidates = by_predicate.at(predicates[i]);
      const Triple& t = *candidates[pick(rng, candidates.size())];
      patterns.push_back(pattern_text("?x", t.predicate, object_text(t, "?o" + std::to_string(i))));
    }
    return patterns;
  };

  auto path = [&](std::size_t k) {
    const Triple* t = &triples[pick(rng, triples.size())];
    std::vector<const Triple*> walk{t};
    while (walk.size() < k) {
      auto next = by_subject.find(walk.back()->object);
      if (next == by_subject.end()) break;
      walk.push_back(next->second[pick(rng, next->second.size())]);
    }
    std::vector<std::string> patterns;
    for (std::size_t i = 0; i < walk.size(); ++i) {
      const std::string object = "?v" + std::to_string(i + 1);
      const bool last = i + 1 == walk.size();
      patterns.push_back(pattern_text("?v" + std::to_string(i), walk[i]->predicate,
                                      last ? object_text(*walk[i], object) : object));
    }
    return patterns;
  };

  std::vector<Query> queries;
  while (queries.size() < options.count) {
    const std::size_t k = options.min_patterns + pick(rng, options.max_patterns - options.min_patterns + 1);
    const bool use_star = options.shape == QueryShape::Star || (options.shape == QueryShape::Mixed && chance(rng, 0.5));
    const std::vector<std::string> patterns = use_star ? star(k) : path(k);
    std::string text = "SELECT * WHERE { ";
    for (std::size_t i = 0; i < patterns.size(); ++i) text += (i > 0 ? " . " : "") + patterns[i];
    text += " }";
    queries.push_back(parse_query(text));
  }
  return queries;
}

}  // namespace fedra
