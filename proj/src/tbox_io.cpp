#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "cekab/dllite.hpp"

namespace cekab {

namespace {

// Operand before kind resolution. `ex Q` and `Q-` are known to involve a
// role; a bare name is ambiguous until the other side or a hint decides.
struct RawOperand {
  Sym name;
  bool exists = false;
  bool inverted = false;
  int col = 1;
};

struct RawAxiom {
  enum class Kind { Incl, Equiv, Funct, DeclConcept, DeclRole } kind;
  RawOperand lhs, rhs;
  bool negated = false;
  int line = 0;
};

enum class NameKind { Unknown, Concept, Role };

class LineLexer {
 public:
  LineLexer(const std::string& text, int line) : text_(text), line_(line) {}

  bool at_end() {
    skip();
    return pos_ >= text_.size();
  }
  int col() {
    skip();
    return static_cast<int>(pos_) + 1;
  }

  std::string word() {
    skip();
    std::size_t b = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_' ||
                                   text_[pos_] == '.' ||
                                   (text_[pos_] == '-' && pos_ + 1 < text_.size() && is_name_char(text_[pos_ + 1]))))
      ++pos_;
    return text_.substr(b, pos_ - b);
  }

  bool accept(std::string_view tok) {
    skip();
    if (text_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& expected) {
    skip();
    std::string found = pos_ < text_.size() ? text_.substr(pos_, 12) : "end of line";
    throw ParseError(line_, static_cast<int>(pos_) + 1, expected, found);
  }

 private:
  static bool is_name_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
  void skip() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  const std::string& text_;
  int line_;
  std::size_t pos_ = 0;
};

RawOperand parse_operand(LineLexer& lx) {
  RawOperand op;
  op.col = lx.col();
  std::string w = lx.word();
  if (w == "ex" || w == "exists") {
    op.exists = true;
    op.col = lx.col();
    w = lx.word();
  }
  if (w.empty()) lx.fail("concept or role name");
  op.name = Sym(w);
  if (lx.accept("-")) op.inverted = true;
  return op;
}

}  // namespace

Tbox parse_tbox(const std::string& text, const Signature* hint) {
  std::vector<RawAxiom> raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    LineLexer lx(line, lineno);
    if (lx.at_end()) continue;
    RawAxiom ax;
    ax.line = lineno;
    std::string first = lx.word();
    if (first == "funct" || first == "concept" || first == "role") {
      ax.kind = first == "funct" ? RawAxiom::Kind::Funct
                : first == "concept" ? RawAxiom::Kind::DeclConcept
                                     : RawAxiom::Kind::DeclRole;
      ax.lhs = parse_operand(lx);
      if (ax.lhs.exists || (ax.kind != RawAxiom::Kind::Funct && ax.lhs.inverted)) lx.fail("predicate name");
    } else {
      LineLexer relex(line, lineno);
      ax.lhs = parse_operand(relex);
      if (relex.accept("[=")) {
        ax.kind = RawAxiom::Kind::Incl;
      } else if (relex.accept("==")) {
        ax.kind = RawAxiom::Kind::Equiv;
      } else {
        relex.fail("'[=' or '=='");
      }
      int ncol = relex.col();
      if (relex.accept("not ")) {
        if (ax.kind == RawAxiom::Kind::Equiv) throw ParseError(lineno, ncol, "positive operand after '=='", "not");
        ax.negated = true;
      }
      ax.rhs = parse_operand(relex);
      if (!relex.at_end()) relex.fail("end of axiom");
      raw.push_back(ax);
      continue;
    }
    if (!lx.at_end()) lx.fail("end of axiom");
    raw.push_back(ax);
  }

  std::map<Sym, NameKind> kind;
  auto get = [&](Sym s) {
    auto it = kind.find(s);
    return it == kind.end() ? NameKind::Unknown : it->second;
  };
  auto set = [&](Sym s, NameKind k, int line, int col) {
    NameKind old = get(s);
    if (old != NameKind::Unknown && old != k)
      throw ParseError(line, col, std::string(old == NameKind::Role ? "role" : "concept") + " use of " + s.str(),
                       s.str());
    kind[s] = k;
    return old != k;
  };
  if (hint) {
    for (const auto& [n, p] : hint->all()) {
      if (p.arity == 1) kind[n] = NameKind::Concept;
      if (p.arity == 2) kind[n] = NameKind::Role;
    }
  }
  // Operand-level kind: a role operand is a bare role, a concept operand is a
  // named concept or an existential.
  auto operand_kind = [&](const RawOperand& o) {
    if (o.exists) return NameKind::Concept;
    if (o.inverted) return NameKind::Role;
    return get(o.name);
  };
  for (const RawAxiom& ax : raw) {
    switch (ax.kind) {
      case RawAxiom::Kind::DeclConcept:
        set(ax.lhs.name, NameKind::Concept, ax.line, ax.lhs.col);
        break;
      case RawAxiom::Kind::DeclRole:
      case RawAxiom::Kind::Funct:
        set(ax.lhs.name, NameKind::Role, ax.line, ax.lhs.col);
        break;
      default:
        if (ax.lhs.exists || ax.lhs.inverted) set(ax.lhs.name, NameKind::Role, ax.line, ax.lhs.col);
        if (ax.rhs.exists || ax.rhs.inverted) set(ax.rhs.name, NameKind::Role, ax.line, ax.rhs.col);
    }
  }
  bool changed = true;
  while (changed) {
    changed = false;
    for (const RawAxiom& ax : raw) {
      if (ax.kind != RawAxiom::Kind::Incl && ax.kind != RawAxiom::Kind::Equiv) continue;
      NameKind l = operand_kind(ax.lhs), r = operand_kind(ax.rhs);
      if (l != NameKind::Unknown && r == NameKind::Unknown) changed |= set(ax.rhs.name, l, ax.line, ax.rhs.col);
      if (r != NameKind::Unknown && l == NameKind::Unknown) changed |= set(ax.lhs.name, r, ax.line, ax.lhs.col);
    }
  }

  Tbox t;
  for (const RawAxiom& ax : raw) {
    auto concept_of = [&](const RawOperand& o) {
      return o.exists ? BasicConcept::exists(BasicRole{o.name, o.inverted}) : BasicConcept::named(o.name);
    };
    switch (ax.kind) {
      case RawAxiom::Kind::DeclConcept:
        t.declare_concept(ax.lhs.name);
        break;
      case RawAxiom::Kind::DeclRole:
        t.declare_role(ax.lhs.name);
        break;
      case RawAxiom::Kind::Funct:
        t.add(TboxAxiom::funct(BasicRole{ax.lhs.name, ax.lhs.inverted}));
        break;
      case RawAxiom::Kind::Incl:
      case RawAxiom::Kind::Equiv: {
        NameKind l = operand_kind(ax.lhs);
        if (l == NameKind::Unknown) l = NameKind::Concept;
        if (l == NameKind::Concept && operand_kind(ax.rhs) == NameKind::Unknown)
          set(ax.rhs.name, NameKind::Concept, ax.line, ax.rhs.col);
        if (l == NameKind::Concept && !ax.lhs.exists) set(ax.lhs.name, l, ax.line, ax.lhs.col);
        NameKind r = operand_kind(ax.rhs);
        if (l != r)
          throw ParseError(ax.line, ax.rhs.col, l == NameKind::Role ? "role operand" : "concept operand",
                           ax.rhs.name.str());
        if (l == NameKind::Role) {
          BasicRole a{ax.lhs.name, ax.lhs.inverted}, b{ax.rhs.name, ax.rhs.inverted};
          t.add(TboxAxiom::role_incl(a, b, ax.negated));
          if (ax.kind == RawAxiom::Kind::Equiv) t.add(TboxAxiom::role_incl(b, a));
        } else {
          BasicConcept a = concept_of(ax.lhs), b = concept_of(ax.rhs);
          t.add(TboxAxiom::concept_incl(a, b, ax.negated));
          if (ax.kind == RawAxiom::Kind::Equiv) t.add(TboxAxiom::concept_incl(b, a));
        }
        break;
      }
    }
  }
  return t;
}

std::string print_tbox(const Tbox& t) {
  std::string out;
  for (const auto& [n, p] : t.signature().all()) out += (p.arity == 1 ? "concept " : "role ") + n.str() + "\n";
  for (const TboxAxiom& ax : t.axioms()) out += to_string(ax) + "\n";
  return out;
}

Tbox load_ontology(const std::string& path, const Signature* hint) {
  std::ifstream f(path);
  if (!f) throw LoadError("cannot read ontology file " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  if (iends_with(path, ".ttl")) return parse_turtle(ss.str(), hint);
  return parse_tbox(ss.str(), hint);
}

}  // namespace cekab
