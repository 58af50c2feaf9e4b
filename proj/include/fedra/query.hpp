#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fedra/rdf.hpp"

namespace fedra {

// Raised for syntactically valid input that uses operators outside the
// supported grammar (OPTIONAL, FILTER, SERVICE, ...).
class UnsupportedOperator : public ParseError {
 public:
  UnsupportedOperator(const std::string& op, std::size_t line, std::size_t column);
};

// Raised when a query is well-formed but semantically invalid.
class QueryValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct BasicGraphPattern {
  std::vector<TriplePattern> patterns;

  std::vector<std::string> variables() const;
  bool operator==(const BasicGraphPattern&) const = default;
};

enum class QueryForm : std::uint8_t { Select, Construct };

struct Query {
  QueryForm form = QueryForm::Select;
  bool distinct = false;
  // Empty means all variables (`*`, or CONSTRUCT).
  std::vector<std::string> projection;
  // Union of basic graph patterns.
  std::vector<BasicGraphPattern> body;
  std::vector<std::string> order_by;
  std::optional<std::uint64_t> limit;
  std::vector<std::string> warnings;

  // Variables visible in the result, in first-appearance order.
  std::vector<std::string> result_variables() const;
  std::size_t triple_pattern_count() const;

  bool operator==(const Query& other) const {
    return form == other.form && distinct == other.distinct && projection == other.projection &&
           body == other.body && order_by == other.order_by && limit == other.limit;
  }
};

Query parse_query(std::string_view text);

// `CONSTRUCT WHERE { tp }` with exactly one triple pattern.
TriplePattern parse_selector(std::string_view text);

std::string to_string(const Query& query);
std::string selector_to_string(const TriplePattern& selector);

}  // namespace fedra
