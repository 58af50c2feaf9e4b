#pragma once

// Character-level scanning shared by the N-Triples, query and service
// description readers.

#include <cctype>
#include <cstddef>
#include <string>
#include <string_view>

#include "fedra/rdf.hpp"

namespace fedra::detail {

class TextCursor {
 public:
  explicit TextCursor(std::string_view text, std::size_t first_line = 1) : text_(text), line_(first_line) {}

  bool at_end() const { return pos_ >= text_.size(); }
  char peek(std::size_t ahead = 0) const { return pos_ + ahead < text_.size() ? text_[pos_ + ahead] : '\0'; }
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }
  std::size_t offset() const { return pos_; }

  char advance() {
    const char c = text_[pos_++];
    if (c == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    return c;
  }

  // Skips whitespace and `#` comments running to end of line.
  void skip_space_and_comments() {
    while (!at_end()) {
      const char c = peek();
      if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else if (c == '#') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, line_, column_); }

  bool starts_with(std::string_view prefix) const { return text_.substr(pos_).starts_with(prefix); }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_;
  std::size_t column_ = 1;
};

inline bool is_name_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }

inline bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == ':';
}

inline bool is_local_name(std::string_view name) {
  if (name.empty() || !is_name_start(name.front())) return false;
  for (const char c : name) {
    if (!is_name_char(c)) return false;
  }
  return true;
}

// `<...>`, cursor on '<'.
inline std::string read_iri_ref(TextCursor& cursor) {
  cursor.advance();
  std::string iri;
  while (!cursor.at_end() && cursor.peek() != '>') {
    const char c = cursor.peek();
    if (c == '\n' || c == ' ' || c == '<' || c == '"') cursor.fail("malformed IRI");
    iri += cursor.advance();
  }
  if (cursor.at_end()) cursor.fail("unterminated IRI");
  cursor.advance();
  if (iri.empty()) cursor.fail("empty IRI");
  return iri;
}

inline std::string read_name(TextCursor& cursor) {
  std::string name;
  while (!cursor.at_end() && is_name_char(cursor.peek())) name += cursor.advance();
  // A trailing ':' belongs to the name, a trailing '.' never does.
  return name;
}

// `"..."` with `\` escapes, cursor on '"'.
inline std::string read_quoted(TextCursor& cursor) {
  cursor.advance();
  std::string out;
  while (true) {
    if (cursor.at_end() || cursor.peek() == '\n') cursor.fail("unterminated literal");
    const char c = cursor.advance();
    if (c == '"') break;
    if (c != '\\') {
      out += c;
      continue;
    }
    if (cursor.at_end()) cursor.fail("unterminated escape");
    switch (const char e = cursor.advance()) {
      case 'n': out += '\n'; break;
      case 't': out += '\t'; break;
      case 'r': out += '\r'; break;
      case '"': out += '"'; break;
      case '\\': out += '\\'; break;
      default: cursor.fail(std::string("unsupported escape \\") + e);
    }
  }
  return out;
}

// Literal with optional `@lang` or `^^<datatype>` / `^^name` suffix.
inline Term read_literal(TextCursor& cursor) {
  std::string lexical = read_quoted(cursor);
  if (cursor.peek() == '@') {
    cursor.advance();
    std::string lang;
    while (!cursor.at_end() &&
           (std::isalnum(static_cast<unsigned char>(cursor.peek())) || cursor.peek() == '-')) {
      lang += cursor.advance();
    }
    if (lang.empty()) cursor.fail("empty language tag");
    return Term::literal(std::move(lexical), {}, std::move(lang));
  }
  if (cursor.peek() == '^' && cursor.peek(1) == '^') {
    cursor.advance();
    cursor.advance();
    if (cursor.peek() == '<') return Term::literal(std::move(lexical), read_iri_ref(cursor));
    if (is_name_start(cursor.peek())) {
      const std::string name = read_name(cursor);
      return Term::literal(std::move(lexical), Term::local(name).value());
    }
    cursor.fail("malformed datatype");
  }
  return Term::literal(std::move(lexical));
}

inline std::string escape_literal(std::string_view lexical) {
  std::string out;
  for (const char c : lexical) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace fedra::detail
