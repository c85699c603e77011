#include <cctype>
#include <map>
#include <optional>
#include <set>

#include "cekab/dllite.hpp"

namespace cekab {

namespace {

const std::string kRdf = "http://www.w3.org/1999/02/22-rdf-syntax-ns#";
const std::string kRdfs = "http://www.w3.org/2000/01/rdf-schema#";
const std::string kOwl = "http://www.w3.org/2002/07/owl#";
const std::string kXsd = "http://www.w3.org/2001/XMLSchema#";

struct Node {
  enum class Kind { Iri, Blank, Literal } kind = Kind::Iri;
  std::string value;
  friend bool operator==(const Node&, const Node&) = default;
  friend auto operator<=>(const Node&, const Node&) = default;
};

struct Triple {
  Node s, p, o;
  int line = 0;
};

std::string show(const Node& n) {
  switch (n.kind) {
    case Node::Kind::Iri:
      return "<" + n.value + ">";
    case Node::Kind::Blank:
      return "_:" + n.value;
    case Node::Kind::Literal:
      return "\"" + n.value + "\"";
  }
  return "";
}

std::string show(const Triple& t) { return show(t.s) + " " + show(t.p) + " " + show(t.o) + " ."; }

class TurtleParser {
 public:
  explicit TurtleParser(const std::string& text) : text_(text) {
    prefixes_["rdf"] = kRdf;
    prefixes_["rdfs"] = kRdfs;
    prefixes_["owl"] = kOwl;
    prefixes_["xsd"] = kXsd;
  }

  std::vector<Triple> parse() {
    while (true) {
      skip();
      if (pos_ >= text_.size()) break;
      if (accept_keyword("@prefix")) {
        prefix_decl(true);
      } else if (accept_keyword("@base") || accept_keyword_ci("BASE")) {
        skip();
        base_ = iriref();
        skip();
        accept('.');
      } else if (accept_keyword_ci("PREFIX")) {
        prefix_decl(false);
      } else {
        Node s = subject();
        skip();
        if (!(s.kind == Node::Kind::Blank && peek() == '.' && last_was_bnode_list_))
          predicate_object_list(s);
        expect('.');
      }
    }
    return std::move(triples_);
  }

 private:
  [[noreturn]] void fail(const std::string& expected) {
    std::string found = pos_ < text_.size() ? text_.substr(pos_, 16) : "end of input";
    throw ParseError(line_, col(), expected, found);
  }

  int col() const {
    std::size_t nl = text_.rfind('\n', pos_ == 0 ? 0 : pos_ - 1);
    return static_cast<int>(nl == std::string::npos ? pos_ + 1 : pos_ - nl);
  }

  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        if (c == '\n') ++line_;
        ++pos_;
      } else {
        break;
      }
    }
  }

  bool accept(char c) {
    skip();
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) fail(std::string("'") + c + "'");
  }

  bool accept_keyword(std::string_view kw) {
    skip();
    if (text_.compare(pos_, kw.size(), kw) != 0) return false;
    char after = pos_ + kw.size() < text_.size() ? text_[pos_ + kw.size()] : ' ';
    if (std::isalnum(static_cast<unsigned char>(after)) || after == ':') return false;
    pos_ += kw.size();
    return true;
  }

  bool accept_keyword_ci(std::string_view kw) {
    skip();
    if (pos_ + kw.size() > text_.size() || !iequals(std::string_view(text_).substr(pos_, kw.size()), kw)) return false;
    char after = pos_ + kw.size() < text_.size() ? text_[pos_ + kw.size()] : ' ';
    if (!std::isspace(static_cast<unsigned char>(after))) return false;
    pos_ += kw.size();
    return true;
  }

  void prefix_decl(bool dotted) {
    skip();
    std::size_t b = pos_;
    while (pos_ < text_.size() && text_[pos_] != ':' && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    std::string name = text_.substr(b, pos_ - b);
    if (peek() != ':') fail("':' in prefix declaration");
    ++pos_;
    skip();
    prefixes_[name] = iriref();
    if (dotted) expect('.');
  }

  std::string iriref() {
    if (peek() != '<') fail("IRI");
    std::size_t e = text_.find('>', pos_);
    if (e == std::string::npos) fail("'>'");
    std::string iri = text_.substr(pos_ + 1, e - pos_ - 1);
    pos_ = e + 1;
    if (!base_.empty() && iri.find(':') == std::string::npos) iri = base_ + iri;
    return iri;
  }

  static bool pn_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           static_cast<unsigned char>(c) >= 0x80;
  }

  Node prefixed_name() {
    std::size_t b = pos_;
    while (pos_ < text_.size() && text_[pos_] != ':' && pn_char(text_[pos_])) ++pos_;
    if (peek() != ':') {
      pos_ = b;
      fail("prefixed name");
    }
    std::string pfx = text_.substr(b, pos_ - b);
    ++pos_;
    std::size_t lb = pos_;
    while (pos_ < text_.size() && pn_char(text_[pos_])) ++pos_;
    // A trailing '.' terminates the statement and is not part of the name.
    while (pos_ > lb && text_[pos_ - 1] == '.') --pos_;
    auto it = prefixes_.find(pfx);
    if (it == prefixes_.end()) {
      pos_ = b;
      fail("declared prefix");
    }
    return Node{Node::Kind::Iri, it->second + text_.substr(lb, pos_ - lb)};
  }

  Node iri_or_prefixed() {
    skip();
    if (peek() == '<') return Node{Node::Kind::Iri, iriref()};
    return prefixed_name();
  }

  Node fresh_blank() { return Node{Node::Kind::Blank, "b" + std::to_string(blank_counter_++)}; }

  Node blank_label() {
    pos_ += 2;
    std::size_t b = pos_;
    while (pos_ < text_.size() && pn_char(text_[pos_])) ++pos_;
    while (pos_ > b && text_[pos_ - 1] == '.') --pos_;
    return Node{Node::Kind::Blank, "L" + text_.substr(b, pos_ - b)};
  }

  Node subject() {
    skip();
    last_was_bnode_list_ = false;
    if (peek() == '[') {
      Node b = bnode_property_list();
      last_was_bnode_list_ = true;
      return b;
    }
    if (peek() == '(') fail("subject (collections are not supported)");
    if (text_.compare(pos_, 2, "_:") == 0) return blank_label();
    return iri_or_prefixed();
  }

  Node bnode_property_list() {
    expect('[');
    Node b = fresh_blank();
    skip();
    if (peek() != ']') predicate_object_list(b);
    expect(']');
    return b;
  }

  Node verb() {
    skip();
    if (peek() == 'a') {
      char after = pos_ + 1 < text_.size() ? text_[pos_ + 1] : ' ';
      if (std::isspace(static_cast<unsigned char>(after)) || after == '[' || after == '<') {
        ++pos_;
        return Node{Node::Kind::Iri, kRdf + "type"};
      }
    }
    return iri_or_prefixed();
  }

  Node object() {
    skip();
    char c = peek();
    if (c == '[') return bnode_property_list();
    if (c == '(') fail("object (collections are not supported)");
    if (c == '"' || c == '\'') return literal();
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '+' || c == '-') {
      std::size_t b = pos_;
      ++pos_;
      while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                                     text_[pos_] == 'e' || text_[pos_] == 'E'))
        ++pos_;
      while (pos_ > b + 1 && text_[pos_ - 1] == '.') --pos_;
      return Node{Node::Kind::Literal, text_.substr(b, pos_ - b)};
    }
    if (text_.compare(pos_, 2, "_:") == 0) return blank_label();
    if (accept_keyword("true")) return Node{Node::Kind::Literal, "true"};
    if (accept_keyword("false")) return Node{Node::Kind::Literal, "false"};
    return iri_or_prefixed();
  }

  Node literal() {
    char q = peek();
    bool long_form = text_.compare(pos_, 3, std::string(3, q)) == 0;
    std::string close = long_form ? std::string(3, q) : std::string(1, q);
    pos_ += close.size();
    std::string value;
    while (true) {
      if (pos_ >= text_.size()) fail("closing quote");
      if (text_.compare(pos_, close.size(), close) == 0) {
        pos_ += close.size();
        break;
      }
      char c = text_[pos_++];
      if (c == '\\' && pos_ < text_.size()) c = text_[pos_++];
      if (c == '\n') ++line_;
      value += c;
    }
    if (peek() == '@') {
      ++pos_;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-'))
        ++pos_;
    } else if (text_.compare(pos_, 2, "^^") == 0) {
      pos_ += 2;
      iri_or_prefixed();
    }
    return Node{Node::Kind::Literal, value};
  }

  void predicate_object_list(const Node& s) {
    while (true) {
      Node p = verb();
      while (true) {
        int line = line_;
        Node o = object();
        triples_.push_back(Triple{s, p, o, line});
        if (!accept(',')) break;
      }
      if (!accept(';')) break;
      skip();
      while (accept(';')) {
      }
      skip();
      if (peek() == '.' || peek() == ']') break;
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  std::map<std::string, std::string> prefixes_;
  std::string base_;
  int blank_counter_ = 0;
  bool last_was_bnode_list_ = false;
  std::vector<Triple> triples_;
};

std::string local_name(const std::string& iri) {
  std::size_t cut = iri.find_last_of("#/:");
  return cut == std::string::npos ? iri : iri.substr(cut + 1);
}

class OntologyBuilder {
 public:
  explicit OntologyBuilder(std::vector<Triple> triples) : triples_(std::move(triples)), used_(triples_.size(), 0) {
    for (std::size_t i = 0; i < triples_.size(); ++i)
      if (triples_[i].s.kind == Node::Kind::Blank) by_subject_[triples_[i].s].push_back(i);
  }

  Tbox build() {
    for (std::size_t i = 0; i < triples_.size(); ++i) {
      const Triple& t = triples_[i];
      if (t.s.kind == Node::Kind::Blank && is_description_predicate(t.p)) continue;
      std::string p = t.p.value;
      if (p == kRdfs + "label" || p == kRdfs + "comment") {
        used_[i] = 1;
      } else if (p == kRdf + "type") {
        type_triple(i);
      } else if (p == kRdfs + "subClassOf") {
        used_[i] = 1;
        BasicConcept a = concept_of(t.s, t);
        bool neg = false;
        BasicConcept b = *concept_or_none(t.o, t, neg);
        tbox_.add(TboxAxiom::concept_incl(a, b, neg));
      } else if (p == kOwl + "equivalentClass") {
        used_[i] = 1;
        BasicConcept a = concept_of(t.s, t), b = concept_of(t.o, t);
        tbox_.add(TboxAxiom::concept_incl(a, b));
        tbox_.add(TboxAxiom::concept_incl(b, a));
      } else if (p == kOwl + "disjointWith") {
        used_[i] = 1;
        tbox_.add(TboxAxiom::concept_incl(concept_of(t.s, t), concept_of(t.o, t), true));
      } else if (p == kRdfs + "subPropertyOf") {
        used_[i] = 1;
        tbox_.add(TboxAxiom::role_incl(role(t.s, t), role(t.o, t)));
      } else if (p == kOwl + "propertyDisjointWith") {
        used_[i] = 1;
        tbox_.add(TboxAxiom::role_incl(role(t.s, t), role(t.o, t), true));
      } else if (p == kOwl + "inverseOf") {
        used_[i] = 1;
        BasicRole a = role(t.s, t), b = role(t.o, t).inverse();
        tbox_.add(TboxAxiom::role_incl(a, b));
        tbox_.add(TboxAxiom::role_incl(b, a));
      } else {
        unsupported(t);
      }
    }
    for (std::size_t i = 0; i < triples_.size(); ++i)
      if (!used_[i]) unsupported(triples_[i]);
    return tbox_;
  }

 private:
  [[noreturn]] static void unsupported(const Triple& t) {
    throw LoadError("unsupported ontology construct at line " + std::to_string(t.line) + ": " + show(t));
  }

  static bool is_description_predicate(const Node& p) {
    return p.value == kRdf + "type" || p.value == kOwl + "onProperty" || p.value == kOwl + "someValuesFrom" ||
           p.value == kOwl + "complementOf" || p.value == kOwl + "inverseOf";
  }

  void type_triple(std::size_t i) {
    const Triple& t = triples_[i];
    if (t.s.kind != Node::Kind::Iri) unsupported(t);
    std::string o = t.o.value;
    used_[i] = 1;
    if (o == kOwl + "Class") {
      tbox_.declare_concept(name(t.s));
    } else if (o == kOwl + "ObjectProperty") {
      tbox_.declare_role(name(t.s));
    } else if (o == kOwl + "FunctionalProperty") {
      tbox_.add(TboxAxiom::funct(BasicRole{name(t.s), false}));
    } else if (o == kOwl + "InverseFunctionalProperty") {
      tbox_.add(TboxAxiom::funct(BasicRole{name(t.s), true}));
    } else if (o == kOwl + "Ontology") {
    } else {
      unsupported(t);
    }
  }

  Sym name(const Node& n) const { return Sym(local_name(n.value)); }

  // Values of a blank node's description triples; marks them consumed.
  std::map<std::string, Node> describe(const Node& b, const Triple& ctx) {
    std::map<std::string, Node> out;
    auto it = by_subject_.find(b);
    if (it == by_subject_.end()) unsupported(ctx);
    for (std::size_t i : it->second) {
      const Triple& t = triples_[i];
      if (!is_description_predicate(t.p)) continue;
      if (t.p.value == kRdf + "type") {
        if (t.o.value != kOwl + "Restriction" && t.o.value != kOwl + "Class" &&
            t.o.value != kOwl + "ObjectProperty")
          unsupported(t);
        used_[i] = 1;
        continue;
      }
      if (out.count(t.p.value)) unsupported(t);
      out[t.p.value] = t.o;
      used_[i] = 1;
    }
    return out;
  }

  BasicRole role(const Node& n, const Triple& ctx) {
    if (n.kind == Node::Kind::Iri) {
      Sym r = name(n);
      tbox_.declare_role(r);
      return BasicRole{r, false};
    }
    if (n.kind != Node::Kind::Blank) unsupported(ctx);
    auto d = describe(n, ctx);
    if (d.size() != 1 || !d.count(kOwl + "inverseOf")) unsupported(ctx);
    return role(d[kOwl + "inverseOf"], ctx).inverse();
  }

  std::optional<BasicConcept> concept_or_none(const Node& n, const Triple& ctx, bool& negated) {
    if (n.kind == Node::Kind::Iri) {
      if (n.value == kOwl + "Thing") unsupported(ctx);
      Sym c = name(n);
      tbox_.declare_concept(c);
      return BasicConcept::named(c);
    }
    if (n.kind != Node::Kind::Blank) unsupported(ctx);
    auto d = describe(n, ctx);
    if (d.count(kOwl + "complementOf")) {
      if (d.size() != 1 || negated) unsupported(ctx);
      negated = true;
      return concept_or_none(d[kOwl + "complementOf"], ctx, negated);
    }
    if (d.size() != 2 || !d.count(kOwl + "onProperty") || !d.count(kOwl + "someValuesFrom")) unsupported(ctx);
    if (d[kOwl + "someValuesFrom"].value != kOwl + "Thing") unsupported(ctx);
    return BasicConcept::exists(role(d[kOwl + "onProperty"], ctx));
  }

  BasicConcept concept_of(const Node& n, const Triple& ctx) {
    bool neg = false;
    BasicConcept c = *concept_or_none(n, ctx, neg);
    if (neg) unsupported(ctx);
    return c;
  }

 private:
  std::vector<Triple> triples_;
  std::vector<char> used_;
  std::map<Node, std::vector<std::size_t>> by_subject_;
  Tbox tbox_;
};

}  // namespace

// Turtle declares kinds explicitly, so the hint is not consulted.
Tbox parse_turtle(const std::string& text, const Signature*) {
  TurtleParser parser(text);
  return OntologyBuilder(parser.parse()).build();
}

}  // namespace cekab
