#include "fedra/query.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <variant>

#include "text_cursor.hpp"

namespace fedra {

UnsupportedOperator::UnsupportedOperator(const std::string& op, std::size_t line, std::size_t column)
    : ParseError("unsupported operator " + op, line, column) {}

std::vector<std::string> BasicGraphPattern::variables() const {
  std::vector<std::string> vars;
  for (const auto& tp : patterns) {
    for (auto& v : tp.variables()) {
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(std::move(v));
    }
  }
  return vars;
}

std::vector<std::string> Query::result_variables() const {
  if (!projection.empty()) return projection;
  std::vector<std::string> vars;
  for (const auto& bgp : body) {
    for (auto& v : bgp.variables()) {
      if (std::find(vars.begin(), vars.end(), v) == vars.end()) vars.push_back(std::move(v));
    }
  }
  return vars;
}

std::size_t Query::triple_pattern_count() const {
  std::size_t n = 0;
  for (const auto& bgp : body) n += bgp.patterns.size();
  return n;
}

namespace {

enum class Tok { LBrace, RBrace, Dot, Star, LParen, RParen, Var, Term, Name, Integer, End };

struct Token {
  Tok kind;
  std::string text;
  std::optional<Term> term;
  std::size_t line;
  std::size_t column;
};

std::string upper(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return out;
}

constexpr std::array kUnsupported = {"OPTIONAL", "FILTER", "SERVICE", "MINUS", "BIND",  "VALUES", "GRAPH",
                                     "GROUP",    "HAVING", "OFFSET",  "PREFIX", "BASE", "DESC",   "REDUCED",
                                     "ASK",      "DESCRIBE", "FROM",  "NOT",    "EXISTS"};

bool is_unsupported_keyword(std::string_view upper_name) {
  return std::find(kUnsupported.begin(), kUnsupported.end(), upper_name) != kUnsupported.end();
}

std::vector<Token> tokenize(std::string_view text) {
  std::vector<Token> tokens;
  detail::TextCursor cursor(text);
  while (true) {
    cursor.skip_space_and_comments();
    const std::size_t line = cursor.line();
    const std::size_t column = cursor.column();
    if (cursor.at_end()) {
      tokens.push_back({Tok::End, "", std::nullopt, line, column});
      break;
    }
    const char c = cursor.peek();
    auto simple = [&](Tok kind) {
      tokens.push_back({kind, std::string(1, cursor.advance()), std::nullopt, line, column});
    };
    switch (c) {
      case '{': simple(Tok::LBrace); continue;
      case '}': simple(Tok::RBrace); continue;
      case '.': simple(Tok::Dot); continue;
      case '*': simple(Tok::Star); continue;
      case '(': simple(Tok::LParen); continue;
      case ')': simple(Tok::RParen); continue;
      default: break;
    }
    if (c == '?' || c == '$') {
      cursor.advance();
      std::string name;
      while (!cursor.at_end() &&
             (std::isalnum(static_cast<unsigned char>(cursor.peek())) || cursor.peek() == '_')) {
        name += cursor.advance();
      }
      if (name.empty()) cursor.fail("empty variable name");
      tokens.push_back({Tok::Var, name, std::nullopt, line, column});
    } else if (c == '<') {
      tokens.push_back({Tok::Term, "", Term::iri(detail::read_iri_ref(cursor)), line, column});
    } else if (c == '"') {
      tokens.push_back({Tok::Term, "", detail::read_literal(cursor), line, column});
    } else if (c == '_' && cursor.peek(1) == ':') {
      cursor.fail("blank nodes unsupported");
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::string digits;
      while (!cursor.at_end() && std::isdigit(static_cast<unsigned char>(cursor.peek()))) digits += cursor.advance();
      tokens.push_back({Tok::Integer, digits, std::nullopt, line, column});
    } else if (detail::is_name_start(c)) {
      tokens.push_back({Tok::Name, detail::read_name(cursor), std::nullopt, line, column});
    } else {
      cursor.fail(std::string("unexpected character '") + c + "'");
    }
  }
  return tokens;
}

// A parsed `{ ... }`: a single BGP or a flattened union of BGPs.
using Group = std::vector<BasicGraphPattern>;

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : tokens_(tokenize(text)) {}

  Query parse() {
    Query query;
    if (keyword_is("SELECT")) {
      next();
      query.form = QueryForm::Select;
      if (keyword_is("DISTINCT")) {
        next();
        query.distinct = true;
      }
      if (peek().kind == Tok::Star) {
        next();
      } else {
        while (peek().kind == Tok::Var) query.projection.push_back(next().text);
        if (query.projection.empty()) fail("expected '*' or projection variables");
      }
    } else if (keyword_is("CONSTRUCT")) {
      next();
      query.form = QueryForm::Construct;
      if (peek().kind == Tok::LBrace) unsupported("CONSTRUCT template");
    } else {
      check_unsupported();
      fail("expected SELECT or CONSTRUCT");
    }
    if (keyword_is("WHERE")) next();
    query.body = parse_group();

    if (keyword_is("ORDER")) {
      next();
      if (!keyword_is("BY")) fail("expected BY");
      next();
      while (true) {
        if (peek().kind == Tok::Var) {
          query.order_by.push_back(next().text);
        } else if (keyword_is("ASC")) {
          next();
          expect(Tok::LParen, "'('");
          if (peek().kind != Tok::Var) fail("expected variable");
          query.order_by.push_back(next().text);
          expect(Tok::RParen, "')'");
        } else {
          break;
        }
      }
      if (query.order_by.empty()) check_unsupported(), fail("expected ORDER BY variables");
    }
    if (keyword_is("LIMIT")) {
      next();
      if (peek().kind != Tok::Integer) fail("expected non-negative integer after LIMIT");
      query.limit = std::stoull(next().text);
    }
    if (peek().kind != Tok::End) {
      check_unsupported();
      fail("unexpected trailing input");
    }
    validate(query);
    return query;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& next() { return tokens_[pos_ == tokens_.size() - 1 ? pos_ : pos_++]; }

  bool keyword_is(std::string_view kw) const { return peek().kind == Tok::Name && upper(peek().text) == kw; }

  [[noreturn]] void fail(const std::string& message) const {
    throw ParseError(message, peek().line, peek().column);
  }
  [[noreturn]] void unsupported(const std::string& op) const {
    throw UnsupportedOperator(op, peek().line, peek().column);
  }
  void check_unsupported() const {
    if (peek().kind == Tok::Name && is_unsupported_keyword(upper(peek().text))) unsupported(upper(peek().text));
  }

  void expect(Tok kind, const std::string& what) {
    if (peek().kind != kind) fail("expected " + what);
    next();
  }

  Group parse_group() {
    expect(Tok::LBrace, "'{'");
    check_unsupported();
    if (peek().kind == Tok::RBrace) fail("empty group pattern");
    Group result;
    if (peek().kind == Tok::LBrace) {
      Group first = parse_group();
      result.insert(result.end(), first.begin(), first.end());
      while (keyword_is("UNION")) {
        next();
        Group branch = parse_group();
        result.insert(result.end(), branch.begin(), branch.end());
      }
      check_unsupported();
      if (peek().kind != Tok::RBrace) fail("mixing conjunction and UNION in one group is not supported");
      next();
      return result;
    }

    BasicGraphPattern bgp;
    while (true) {
      check_unsupported();
      bgp.patterns.push_back(parse_triple_pattern());
      if (peek().kind == Tok::Dot) next();
      check_unsupported();
      if (peek().kind == Tok::RBrace) break;
      if (peek().kind == Tok::LBrace || keyword_is("UNION")) {
        fail("mixing conjunction and UNION in one group is not supported");
      }
      if (tokens_[pos_ - 1].kind != Tok::Dot) fail("expected '.' between triple patterns");
    }
    next();
    result.push_back(std::move(bgp));
    return result;
  }

  PatternTerm parse_pattern_term(bool allow_literal) {
    const Token& tok = peek();
    switch (tok.kind) {
      case Tok::Var: return PatternTerm::var(next().text);
      case Tok::Term:
        if (tok.term->is_literal() && !allow_literal) fail("literal only allowed in object position");
        return *next().term;
      case Tok::Name: {
        const std::string u = upper(tok.text);
        if (u == "UNION" || u == "WHERE" || u == "SELECT" || u == "CONSTRUCT") fail("expected term, found " + u);
        return Term::local(next().text);
      }
      case Tok::Integer:
        if (!allow_literal) fail("literal only allowed in object position");
        return Term::literal(next().text, "http://www.w3.org/2001/XMLSchema#integer");
      default: fail("expected term");
    }
  }

  TriplePattern parse_triple_pattern() {
    PatternTerm s = parse_pattern_term(false);
    PatternTerm p = parse_pattern_term(false);
    PatternTerm o = parse_pattern_term(true);
    return TriplePattern(std::move(s), std::move(p), std::move(o));
  }

  static void validate(Query& query) {
    std::vector<std::string> body_vars;
    for (const auto& bgp : query.body) {
      for (auto& v : bgp.variables()) body_vars.push_back(std::move(v));
    }
    auto in_body = [&](const std::string& v) {
      return std::find(body_vars.begin(), body_vars.end(), v) != body_vars.end();
    };
    for (const auto& v : query.projection) {
      if (!in_body(v)) throw QueryValidationError("projected variable ?" + v + " is not bound in the query body");
    }
    for (const auto& v : query.order_by) {
      if (!in_body(v)) throw QueryValidationError("ORDER BY variable ?" + v + " is not bound in the query body");
    }
    if (query.limit && query.order_by.empty()) {
      query.warnings.emplace_back("LIMIT without ORDER BY: answer may be ambiguous");
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

std::string bgp_to_string(const BasicGraphPattern& bgp) {
  std::string out = "{ ";
  for (std::size_t i = 0; i < bgp.patterns.size(); ++i) {
    if (i > 0) out += " . ";
    out += bgp.patterns[i].to_string();
  }
  return out + " }";
}

}  // namespace

Query parse_query(std::string_view text) { return QueryParser(text).parse(); }

TriplePattern parse_selector(std::string_view text) {
  Query q = parse_query(text);
  if (q.form != QueryForm::Construct) throw ParseError("selector must be a CONSTRUCT query", 1, 1);
  if (q.body.size() != 1 || q.body.front().patterns.size() != 1) {
    throw ParseError("selector must be a single triple pattern", 1, 1);
  }
  if (q.limit || !q.order_by.empty()) throw ParseError("selector cannot carry solution modifiers", 1, 1);
  return q.body.front().patterns.front();
}

std::string to_string(const Query& query) {
  std::string out;
  if (query.form == QueryForm::Construct) {
    out = "CONSTRUCT WHERE ";
  } else {
    out = "SELECT ";
    if (query.distinct) out += "DISTINCT ";
    if (query.projection.empty()) {
      out += "*";
    } else {
      for (std::size_t i = 0; i < query.projection.size(); ++i) out += (i ? " ?" : "?") + query.projection[i];
    }
    out += " WHERE ";
  }
  if (query.body.size() == 1) {
    out += bgp_to_string(query.body.front());
  } else {
    out += "{ ";
    for (std::size_t i = 0; i < query.body.size(); ++i) {
      if (i > 0) out += " UNION ";
      out += bgp_to_string(query.body[i]);
    }
    out += " }";
  }
  if (!query.order_by.empty()) {
    out += " ORDER BY";
    for (const auto& v : query.order_by) out += " ?" + v;
  }
  if (query.limit) out += " LIMIT " + std::to_string(*query.limit);
  return out;
}

std::string selector_to_string(const TriplePattern& selector) {
  return "CONSTRUCT WHERE { " + selector.to_string() + " }";
}

}  // namespace fedra
