#include <map>
#include <memory>

#include "fedra/catalog.hpp"
#include "fedra/query.hpp"
#include "text_cursor.hpp"

namespace fedra {

namespace {

constexpr std::string_view kSd = "http://www.w3.org/ns/sparql-service-description#";
constexpr std::string_view kDc = "http://purl.org/dc/elements/1.1/";
constexpr std::string_view kDcterms = "http://purl.org/dc/terms/";
constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

struct Node {
  enum class Kind { Iri, Literal, Blank } kind = Kind::Blank;
  std::string value;
  std::vector<std::pair<std::string, Node>> properties;
  std::size_t line = 0;
};

class TurtleReader {
 public:
  explicit TurtleReader(std::string_view text) : cursor_(text) {}

  std::vector<Node> read() {
    std::vector<Node> subjects;
    while (true) {
      cursor_.skip_space_and_comments();
      if (cursor_.at_end()) break;
      if (cursor_.peek() == '@') {
        read_prefix();
        continue;
      }
      Node subject = read_subject();
      read_property_list(subject);
      cursor_.skip_space_and_comments();
      if (cursor_.peek() == '.') {
        cursor_.advance();
      } else if (!cursor_.at_end()) {
        cursor_.fail("expected '.' after statement");
      }
      subjects.push_back(std::move(subject));
    }
    return subjects;
  }

 private:
  void read_prefix() {
    cursor_.advance();
    if (detail::read_name(cursor_) != "prefix") cursor_.fail("only @prefix directives are supported");
    cursor_.skip_space_and_comments();
    std::string name = detail::read_name(cursor_);
    if (name.empty() || name.back() != ':') cursor_.fail("expected prefix name ending in ':'");
    name.pop_back();
    cursor_.skip_space_and_comments();
    if (cursor_.peek() != '<') cursor_.fail("expected prefix IRI");
    prefixes_[name] = detail::read_iri_ref(cursor_);
    cursor_.skip_space_and_comments();
    if (cursor_.peek() != '.') cursor_.fail("expected '.' after @prefix");
    cursor_.advance();
  }

  std::string expand(const std::string& pname) {
    if (pname == "a") return std::string(kRdfType);
    const auto colon = pname.find(':');
    if (colon == std::string::npos) cursor_.fail("expected prefixed name, found '" + pname + "'");
    auto it = prefixes_.find(pname.substr(0, colon));
    if (it == prefixes_.end()) cursor_.fail("undeclared prefix '" + pname.substr(0, colon) + "'");
    return it->second + pname.substr(colon + 1);
  }

  Node read_subject() {
    Node node;
    node.line = cursor_.line();
    if (cursor_.peek() == '[') {
      cursor_.advance();
      cursor_.skip_space_and_comments();
      if (cursor_.peek() != ']') cursor_.fail("expected '[]' subject");
      cursor_.advance();
      return node;
    }
    node.kind = Node::Kind::Iri;
    node.value = read_iri();
    return node;
  }

  std::string read_iri() {
    if (cursor_.peek() == '<') return detail::read_iri_ref(cursor_);
    if (detail::is_name_start(cursor_.peek())) return expand(detail::read_name(cursor_));
    cursor_.fail("expected IRI");
  }

  Node read_object() {
    cursor_.skip_space_and_comments();
    Node node;
    node.line = cursor_.line();
    if (cursor_.peek() == '"') {
      node.kind = Node::Kind::Literal;
      node.value = detail::read_quoted(cursor_);
      return node;
    }
    if (cursor_.peek() == '[') {
      cursor_.advance();
      read_property_list(node);
      cursor_.skip_space_and_comments();
      if (cursor_.peek() != ']') cursor_.fail("expected ']'");
      cursor_.advance();
      return node;
    }
    node.kind = Node::Kind::Iri;
    node.value = read_iri();
    return node;
  }

  // verb object (',' object)* (';' (verb object ...)?)*
  void read_property_list(Node& subject) {
    while (true) {
      cursor_.skip_space_and_comments();
      const char c = cursor_.peek();
      if (cursor_.at_end() || c == '.' || c == ']') return;
      const std::string predicate = read_iri();
      while (true) {
        subject.properties.emplace_back(predicate, read_object());
        cursor_.skip_space_and_comments();
        if (cursor_.peek() != ',') break;
        cursor_.advance();
      }
      cursor_.skip_space_and_comments();
      if (cursor_.peek() != ';') return;
      while (cursor_.peek() == ';') {
        cursor_.advance();
        cursor_.skip_space_and_comments();
      }
    }
  }

  detail::TextCursor cursor_;
  std::map<std::string, std::string> prefixes_;
};

std::string prop(const std::string_view ns, std::string_view local) { return std::string(ns) + std::string(local); }

}  // namespace

ServiceDescription parse_service_description(std::string_view text) {
  const std::vector<Node> subjects = TurtleReader(text).read();
  const std::string endpoint_prop = prop(kSd, "endpoint");
  const std::string has_part = prop(kDcterms, "hasPart");
  const std::string description = prop(kDc, "description");
  const std::string source = prop(kDcterms, "source");

  const Node* service = nullptr;
  for (const auto& s : subjects) {
    for (const auto& [p, o] : s.properties) {
      if (p == endpoint_prop) {
        if (service != nullptr && service != &s) throw ParseError("more than one sd:endpoint block", s.line, 1);
        service = &s;
      }
    }
  }
  if (service == nullptr) throw ParseError("no sd:endpoint found", 1, 1);

  ServiceDescription out;
  out.endpoint.role = EndpointRole::Consumer;
  std::vector<const Node*> parts;
  for (const auto& [p, o] : service->properties) {
    if (p == endpoint_prop) {
      if (o.kind != Node::Kind::Iri) throw ParseError("sd:endpoint must be an IRI", o.line, 1);
      if (!out.endpoint.iri.empty()) throw ParseError("sd:endpoint given twice", o.line, 1);
      out.endpoint.iri = o.value;
    } else if (p == has_part) {
      if (o.kind != Node::Kind::Blank) throw ParseError("dcterms:hasPart must be a [ ... ] block", o.line, 1);
      parts.push_back(&o);
    }
  }

  for (std::size_t k = 0; k < parts.size(); ++k) {
    const Node& part = *parts[k];
    const Node* selector_text = nullptr;
    const Node* source_iri = nullptr;
    for (const auto& [p, o] : part.properties) {
      if (p == description) selector_text = &o;
      if (p == source) source_iri = &o;
    }
    if (selector_text == nullptr || selector_text->kind != Node::Kind::Literal) {
      throw ParseError("fragment description needs a dc:description string", part.line, 1);
    }
    if (source_iri == nullptr || source_iri->kind != Node::Kind::Iri) {
      throw ParseError("fragment description needs a dcterms:source IRI", part.line, 1);
    }
    TriplePattern selector = [&] {
      try {
        return parse_selector(selector_text->value);
      } catch (const ParseError& e) {
        throw ParseError(std::string("bad fragment selector: ") + e.what(), selector_text->line, 1);
      }
    }();
    const std::string id = out.endpoint.iri + "#frag" + std::to_string(k + 1);
    out.endpoint.fragments.insert(id);
    out.fragments.push_back(FragmentDef{id, std::move(selector), source_iri->value});
  }
  return out;
}

std::string write_service_description(const ServiceDescription& description) {
  std::string out;
  out += "@prefix sd: <" + std::string(kSd) + "> .\n";
  out += "@prefix dc: <" + std::string(kDc) + "> .\n";
  out += "@prefix dcterms: <" + std::string(kDcterms) + "> .\n";
  out += "[] <" + std::string(kRdfType) + "> sd:Service ;\n";
  out += " sd:endpoint <" + description.endpoint.iri + ">";
  for (const auto& f : description.fragments) {
    out += " ;\n dcterms:hasPart [\n";
    out += "  dc:description \"" + detail::escape_literal(selector_to_string(f.selector)) + "\";\n";
    out += "  dcterms:source <" + f.source + ">; ]";
  }
  out += " .\n";
  return out;
}

}  // namespace fedra
