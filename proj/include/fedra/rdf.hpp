#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace fedra {

// Bare tokens such as `t1` or `p1` live in this namespace so fixtures can be
// written the way the running example prints them.
inline constexpr std::string_view kLocalNamespace = "http://fedra.local/";

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& message, std::size_t line, std::size_t column);

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// An IRI or a literal. Blank nodes are not representable.
class Term {
 public:
  enum class Kind : std::uint8_t { Iri, Literal };

  static Term iri(std::string value);
  // Bare token in the local namespace.
  static Term local(std::string_view name);
  static Term literal(std::string lexical, std::string datatype = {}, std::string language = {});

  Kind kind() const { return kind_; }
  bool is_iri() const { return kind_ == Kind::Iri; }
  bool is_literal() const { return kind_ == Kind::Literal; }
  const std::string& value() const { return value_; }
  const std::string& datatype() const { return datatype_; }
  const std::string& language() const { return language_; }

  // N-Triples style rendering; local IRIs print as bare tokens.
  std::string to_string() const;

  auto operator<=>(const Term&) const = default;
  bool operator==(const Term&) const = default;

 private:
  Term(Kind kind, std::string value, std::string datatype, std::string language)
      : kind_(kind), value_(std::move(value)), datatype_(std::move(datatype)), language_(std::move(language)) {}

  Kind kind_;
  std::string value_;
  std::string datatype_;
  std::string language_;
};

struct TermHash {
  std::size_t operator()(const Term& term) const noexcept;
};

struct Variable {
  std::string name;

  auto operator<=>(const Variable&) const = default;
  bool operator==(const Variable&) const = default;
};

// A position of a triple pattern: either a ground term or a variable.
class PatternTerm {
 public:
  PatternTerm(Term term) : value_(std::move(term)) {}  // NOLINT(google-explicit-constructor)
  PatternTerm(Variable var);                           // NOLINT(google-explicit-constructor)

  static PatternTerm var(std::string name) { return PatternTerm(Variable{std::move(name)}); }

  bool is_variable() const { return std::holds_alternative<Variable>(value_); }
  bool is_ground() const { return !is_variable(); }
  const Term& term() const { return std::get<Term>(value_); }
  const std::string& variable() const { return std::get<Variable>(value_).name; }

  std::string to_string() const;

  auto operator<=>(const PatternTerm&) const = default;
  bool operator==(const PatternTerm&) const = default;

 private:
  std::variant<Term, Variable> value_;
};

struct Triple {
  Term subject;
  Term predicate;
  Term object;

  Triple(Term s, Term p, Term o);

  std::string to_string() const;

  auto operator<=>(const Triple&) const = default;
  bool operator==(const Triple&) const = default;
};

class TriplePattern {
 public:
  TriplePattern(PatternTerm subject, PatternTerm predicate, PatternTerm object);

  const PatternTerm& subject() const { return terms_[0]; }
  const PatternTerm& predicate() const { return terms_[1]; }
  const PatternTerm& object() const { return terms_[2]; }
  const PatternTerm& at(std::size_t position) const { return terms_.at(position); }

  // Distinct variable names in subject, predicate, object order.
  std::vector<std::string> variables() const;
  bool is_ground() const;

  std::string to_string() const;

  auto operator<=>(const TriplePattern&) const = default;
  bool operator==(const TriplePattern&) const = default;

 private:
  std::vector<PatternTerm> terms_;
};

using SolutionMapping = std::map<std::string, Term>;

std::string to_string(const SolutionMapping& mapping);

// Substitutes bound variables; unbound ones stay variables.
TriplePattern substitute(const TriplePattern& tp, const SolutionMapping& mapping);

// Returns the mapping that turns `tp` into `triple`, if one exists.
std::optional<SolutionMapping> unify_with_triple(const TriplePattern& tp, const Triple& triple);

// Set of distinct triples with subject/predicate/object indexes.
class TripleStore {
 public:
  TripleStore() = default;
  explicit TripleStore(const std::vector<Triple>& triples);

  // Returns false when the triple was already present.
  bool insert(const Triple& triple);
  void insert_all(const TripleStore& other);

  std::size_t size() const { return triples_.size(); }
  bool empty() const { return triples_.empty(); }
  bool contains(const Triple& triple) const { return lookup_.contains(triple); }
  const std::vector<Triple>& triples() const { return triples_; }

  // Sorted copy of all triples.
  std::vector<Triple> sorted() const;

  // Triples unifiable with `tp`.
  std::vector<const Triple*> candidates(const TriplePattern& tp) const;
  bool has_match(const TriplePattern& tp) const;

  // Distinct predicates in sorted order.
  std::vector<Term> predicates() const;

 private:
  std::vector<Triple> triples_;
  std::set<Triple> lookup_;
  std::unordered_map<Term, std::vector<std::size_t>, TermHash> by_subject_;
  std::unordered_map<Term, std::vector<std::size_t>, TermHash> by_predicate_;
  std::unordered_map<Term, std::vector<std::size_t>, TermHash> by_object_;
};

TripleStore parse_ntriples(std::istream& input);
TripleStore parse_ntriples(std::string_view text);
TripleStore load_ntriples_file(const std::string& path);

// One triple per line in sorted order.
std::string serialize_ntriples(const TripleStore& store);

std::set<SolutionMapping> match_pattern(const TripleStore& store, const TriplePattern& tp);

// Conjunctive evaluation of a basic graph pattern against one store.
std::set<SolutionMapping> evaluate_bgp(const TripleStore& store, const std::vector<TriplePattern>& patterns);

// Joins two mapping sets on their shared variables.
std::set<SolutionMapping> join(const std::set<SolutionMapping>& left, const std::set<SolutionMapping>& right);

}  // namespace fedra
