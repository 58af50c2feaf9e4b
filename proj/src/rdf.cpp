#include "fedra/rdf.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "text_cursor.hpp"

namespace fedra {

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t column)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

Term Term::iri(std::string value) {
  if (value.empty()) throw std::invalid_argument("IRI must be non-empty");
  return Term(Kind::Iri, std::move(value), {}, {});
}

Term Term::local(std::string_view name) { return iri(std::string(kLocalNamespace) + std::string(name)); }

Term Term::literal(std::string lexical, std::string datatype, std::string language) {
  if (!datatype.empty() && !language.empty()) {
    throw std::invalid_argument("literal cannot carry both a datatype and a language tag");
  }
  return Term(Kind::Literal, std::move(lexical), std::move(datatype), std::move(language));
}

namespace {

std::string iri_to_string(const std::string& iri) {
  if (iri.starts_with(kLocalNamespace)) {
    const std::string_view rest = std::string_view(iri).substr(kLocalNamespace.size());
    if (detail::is_local_name(rest)) return std::string(rest);
  }
  return "<" + iri + ">";
}

}  // namespace

std::string Term::to_string() const {
  if (is_iri()) return iri_to_string(value_);
  std::string out = "\"" + detail::escape_literal(value_) + "\"";
  if (!language_.empty()) out += "@" + language_;
  if (!datatype_.empty()) out += "^^" + iri_to_string(datatype_);
  return out;
}

std::size_t TermHash::operator()(const Term& term) const noexcept {
  std::size_t h = std::hash<std::string>{}(term.value());
  h ^= std::hash<std::string>{}(term.datatype()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  h ^= std::hash<std::string>{}(term.language()) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h ^ static_cast<std::size_t>(term.kind());
}

PatternTerm::PatternTerm(Variable var) : value_(std::move(var)) {
  if (std::get<Variable>(value_).name.empty()) throw std::invalid_argument("variable name must be non-empty");
}

std::string PatternTerm::to_string() const { return is_variable() ? "?" + variable() : term().to_string(); }

Triple::Triple(Term s, Term p, Term o) : subject(std::move(s)), predicate(std::move(p)), object(std::move(o)) {
  if (!subject.is_iri() || !predicate.is_iri()) {
    throw std::invalid_argument("triple subject and predicate must be IRIs");
  }
}

std::string Triple::to_string() const {
  return subject.to_string() + " " + predicate.to_string() + " " + object.to_string() + " .";
}

TriplePattern::TriplePattern(PatternTerm subject, PatternTerm predicate, PatternTerm object)
    : terms_{std::move(subject), std::move(predicate), std::move(object)} {
  for (std::size_t i = 0; i < 2; ++i) {
    if (terms_[i].is_ground() && terms_[i].term().is_literal()) {
      throw std::invalid_argument("literal in subject or predicate position");
    }
  }
}

std::vector<std::string> TriplePattern::variables() const {
  std::vector<std::string> vars;
  for (const auto& t : terms_) {
    if (t.is_variable() && std::find(vars.begin(), vars.end(), t.variable()) == vars.end()) {
      vars.push_back(t.variable());
    }
  }
  return vars;
}

bool TriplePattern::is_ground() const {
  return std::none_of(terms_.begin(), terms_.end(), [](const PatternTerm& t) { return t.is_variable(); });
}

std::string TriplePattern::to_string() const {
  return terms_[0].to_string() + " " + terms_[1].to_string() + " " + terms_[2].to_string();
}

std::string to_string(const SolutionMapping& mapping) {
  std::string out = "{";
  bool first = true;
  for (const auto& [name, value] : mapping) {
    if (!first) out += ", ";
    first = false;
    out += "?" + name + "=" + value.to_string();
  }
  return out + "}";
}

TriplePattern substitute(const TriplePattern& tp, const SolutionMapping& mapping) {
  auto apply = [&](const PatternTerm& t) -> PatternTerm {
    if (t.is_variable()) {
      if (auto it = mapping.find(t.variable()); it != mapping.end()) return it->second;
    }
    return t;
  };
  return TriplePattern(apply(tp.subject()), apply(tp.predicate()), apply(tp.object()));
}

std::optional<SolutionMapping> unify_with_triple(const TriplePattern& tp, const Triple& triple) {
  SolutionMapping mapping;
  const Term* values[3] = {&triple.subject, &triple.predicate, &triple.object};
  for (std::size_t i = 0; i < 3; ++i) {
    const PatternTerm& t = tp.at(i);
    if (t.is_ground()) {
      if (t.term() != *values[i]) return std::nullopt;
      continue;
    }
    auto [it, inserted] = mapping.emplace(t.variable(), *values[i]);
    if (!inserted && it->second != *values[i]) return std::nullopt;
  }
  return mapping;
}

TripleStore::TripleStore(const std::vector<Triple>& triples) {
  for (const auto& t : triples) insert(t);
}

bool TripleStore::insert(const Triple& triple) {
  if (!lookup_.insert(triple).second) return false;
  const std::size_t index = triples_.size();
  triples_.push_back(triple);
  by_subject_[triple.subject].push_back(index);
  by_predicate_[triple.predicate].push_back(index);
  by_object_[triple.object].push_back(index);
  return true;
}

void TripleStore::insert_all(const TripleStore& other) {
  for (const auto& t : other.triples_) insert(t);
}

std::vector<Triple> TripleStore::sorted() const { return {lookup_.begin(), lookup_.end()}; }

std::vector<const Triple*> TripleStore::candidates(const TriplePattern& tp) const {
  // Narrowest index among the bound positions.
  const std::vector<std::size_t>* best = nullptr;
  const std::unordered_map<Term, std::vector<std::size_t>, TermHash>* indexes[3] = {&by_subject_, &by_predicate_,
                                                                                    &by_object_};
  static const std::vector<std::size_t> kNone;
  for (std::size_t i = 0; i < 3; ++i) {
    if (!tp.at(i).is_ground()) continue;
    const auto it = indexes[i]->find(tp.at(i).term());
    if (it == indexes[i]->end()) return {};
    if (best == nullptr || it->second.size() < best->size()) best = &it->second;
  }
  std::vector<const Triple*> out;
  if (best == nullptr) {
    out.reserve(triples_.size());
    for (const auto& t : triples_) {
      if (unify_with_triple(tp, t)) out.push_back(&t);
    }
    return out;
  }
  for (const std::size_t index : *best) {
    if (unify_with_triple(tp, triples_[index])) out.push_back(&triples_[index]);
  }
  return out;
}

bool TripleStore::has_match(const TriplePattern& tp) const { return !candidates(tp).empty(); }

std::vector<Term> TripleStore::predicates() const {
  std::vector<Term> out;
  out.reserve(by_predicate_.size());
  for (const auto& [p, _] : by_predicate_) out.push_back(p);
  std::sort(out.begin(), out.end());
  return out;
}

namespace {

Term read_ntriples_term(detail::TextCursor& cursor, bool allow_literal) {
  const char c = cursor.peek();
  if (c == '_' && cursor.peek(1) == ':') cursor.fail("blank nodes unsupported");
  if (c == '<') return Term::iri(detail::read_iri_ref(cursor));
  if (c == '"') {
    if (!allow_literal) cursor.fail("literal only allowed in object position");
    return detail::read_literal(cursor);
  }
  if (detail::is_name_start(c)) {
    std::string name = detail::read_name(cursor);
    return Term::local(name);
  }
  if (cursor.at_end()) cursor.fail("unexpected end of line");
  cursor.fail(std::string("unexpected character '") + c + "'");
}

void skip_inline_space(detail::TextCursor& cursor) {
  while (!cursor.at_end() && (cursor.peek() == ' ' || cursor.peek() == '\t')) cursor.advance();
}

}  // namespace

TripleStore parse_ntriples(std::istream& input) {
  TripleStore store;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(input, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    detail::TextCursor cursor(line, line_number);
    skip_inline_space(cursor);
    if (cursor.at_end() || cursor.peek() == '#') continue;

    Term s = read_ntriples_term(cursor, false);
    skip_inline_space(cursor);
    Term p = read_ntriples_term(cursor, false);
    skip_inline_space(cursor);
    Term o = read_ntriples_term(cursor, true);
    skip_inline_space(cursor);
    if (cursor.peek() != '.') cursor.fail("expected '.'");
    cursor.advance();
    skip_inline_space(cursor);
    if (!cursor.at_end() && cursor.peek() != '#') cursor.fail("trailing characters after '.'");
    store.insert(Triple(std::move(s), std::move(p), std::move(o)));
  }
  return store;
}

TripleStore parse_ntriples(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_ntriples(in);
}

TripleStore load_ntriples_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return parse_ntriples(in);
}

std::string serialize_ntriples(const TripleStore& store) {
  std::string out;
  for (const auto& t : store.sorted()) out += t.to_string() + "\n";
  return out;
}

std::set<SolutionMapping> match_pattern(const TripleStore& store, const TriplePattern& tp) {
  std::set<SolutionMapping> out;
  for (const Triple* t : store.candidates(tp)) out.insert(*unify_with_triple(tp, *t));
  return out;
}

namespace {

std::size_t bound_positions(const TriplePattern& tp, const std::set<std::string>& bound) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < 3; ++i) {
    const auto& t = tp.at(i);
    if (t.is_ground() || bound.contains(t.variable())) ++n;
  }
  return n;
}

bool compatible(const SolutionMapping& a, const SolutionMapping& b) {
  const auto& small = a.size() <= b.size() ? a : b;
  const auto& large = a.size() <= b.size() ? b : a;
  for (const auto& [name, value] : small) {
    if (auto it = large.find(name); it != large.end() && it->second != value) return false;
  }
  return true;
}

}  // namespace

std::set<SolutionMapping> evaluate_bgp(const TripleStore& store, const std::vector<TriplePattern>& patterns) {
  if (patterns.empty()) return {SolutionMapping{}};

  // Greedy order: next pattern with the most bound positions, first-seen on ties.
  std::vector<std::size_t> remaining(patterns.size());
  for (std::size_t i = 0; i < patterns.size(); ++i) remaining[i] = i;
  std::set<std::string> bound;
  std::vector<const TriplePattern*> order;
  while (!remaining.empty()) {
    auto best = remaining.begin();
    for (auto it = remaining.begin(); it != remaining.end(); ++it) {
      if (bound_positions(patterns[*it], bound) > bound_positions(patterns[*best], bound)) best = it;
    }
    order.push_back(&patterns[*best]);
    for (const auto& v : patterns[*best].variables()) bound.insert(v);
    remaining.erase(best);
  }

  std::vector<SolutionMapping> partial{SolutionMapping{}};
  for (const TriplePattern* tp : order) {
    std::vector<SolutionMapping> next;
    for (const auto& mu : partial) {
      const TriplePattern bound_tp = substitute(*tp, mu);
      for (const Triple* t : store.candidates(bound_tp)) {
        const auto match = unify_with_triple(bound_tp, *t);
        if (!match) continue;
        SolutionMapping extended = mu;
        for (const auto& [name, value] : *match) extended.emplace(name, value);
        next.push_back(std::move(extended));
      }
    }
    partial = std::move(next);
    if (partial.empty()) break;
  }
  return {partial.begin(), partial.end()};
}

std::set<SolutionMapping> join(const std::set<SolutionMapping>& left, const std::set<SolutionMapping>& right) {
  std::set<SolutionMapping> out;
  if (left.empty() || right.empty()) return out;

  std::set<std::string> left_vars;
  std::set<std::string> right_vars;
  for (const auto& mu : left) {
    for (const auto& [name, _] : mu) left_vars.insert(name);
  }
  for (const auto& mu : right) {
    for (const auto& [name, _] : mu) right_vars.insert(name);
  }
  std::vector<std::string> shared;
  std::set_intersection(left_vars.begin(), left_vars.end(), right_vars.begin(), right_vars.end(),
                        std::back_inserter(shared));

  // Hash on the shared variables both sides always bind; verify the rest.
  auto key_of = [&](const SolutionMapping& mu) {
    std::vector<std::optional<Term>> key;
    key.reserve(shared.size());
    for (const auto& name : shared) {
      auto it = mu.find(name);
      key.push_back(it == mu.end() ? std::nullopt : std::optional<Term>(it->second));
    }
    return key;
  };
  std::map<std::vector<std::optional<Term>>, std::vector<const SolutionMapping*>> buckets;
  bool partial_keys = false;
  for (const auto& mu : right) {
    auto key = key_of(mu);
    partial_keys |= std::any_of(key.begin(), key.end(), [](const auto& k) { return !k.has_value(); });
    buckets[std::move(key)].push_back(&mu);
  }
  for (const auto& mu : left) {
    auto key = key_of(mu);
    const bool complete = std::all_of(key.begin(), key.end(), [](const auto& k) { return k.has_value(); });
    if (complete && !partial_keys) {
      auto it = buckets.find(key);
      if (it == buckets.end()) continue;
      for (const SolutionMapping* other : it->second) {
        SolutionMapping merged = mu;
        merged.insert(other->begin(), other->end());
        out.insert(std::move(merged));
      }
      continue;
    }
    for (const auto& other : right) {
      if (!compatible(mu, other)) continue;
      SolutionMapping merged = mu;
      merged.insert(other.begin(), other.end());
      out.insert(std::move(merged));
    }
  }
  return out;
}

}  // namespace fedra
