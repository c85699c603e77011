#include "cekab/core.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace cekab {

ParseError::ParseError(int line, int col, std::string expected, std::string found)
    : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": expected " + expected +
            (found.empty() ? std::string() : ", found '" + found + "'")),
      line_(line),
      col_(col),
      expected_(std::move(expected)) {}

std::string to_string(const Term& t) { return t.is_var ? "?" + t.name.str() : t.name.str(); }

bool Atom::is_ground() const {
  return std::none_of(args.begin(), args.end(), [](const Term& t) { return t.is_var; });
}

Atom fact(Sym pred, std::initializer_list<Sym> consts) { return fact(pred, std::vector<Sym>(consts)); }

Atom fact(Sym pred, const std::vector<Sym>& consts) {
  std::vector<Term> args;
  args.reserve(consts.size());
  for (Sym c : consts) args.push_back(Term::cst(c));
  return Atom(pred, std::move(args));
}

std::string to_string(const Atom& a) {
  std::string out = a.pred.str() + "(";
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (i) out += ",";
    out += to_string(a.args[i]);
  }
  return out + ")";
}

void Signature::add(Sym name, int arity, PredKind kind) {
  if (name.empty()) throw SignatureMismatch("empty predicate name");
  if ((kind == PredKind::Concept && arity != 1) || (kind == PredKind::Role && arity != 2))
    throw SignatureMismatch("predicate " + name.str() + " has arity " + std::to_string(arity) +
                            (kind == PredKind::Concept ? " but is a concept" : " but is a role"));
  auto it = preds_.find(name);
  if (it == preds_.end()) {
    preds_.emplace(name, PredicateSymbol{name, arity, kind});
    return;
  }
  if (it->second.arity != arity)
    throw SignatureMismatch("predicate " + name.str() + " used with arity " + std::to_string(arity) +
                            " and " + std::to_string(it->second.arity));
}

void Signature::merge(const Signature& other) {
  for (const auto& [n, p] : other.preds_) add(p);
}

const PredicateSymbol* Signature::find(Sym name) const {
  auto it = preds_.find(name);
  return it == preds_.end() ? nullptr : &it->second;
}

int Signature::arity(Sym name) const {
  const PredicateSymbol* p = find(name);
  return p ? p->arity : -1;
}

Term apply(const Term& t, const Substitution& subst) {
  if (!t.is_var) return t;
  auto it = subst.find(t.name);
  if (it == subst.end()) throw UnboundVariable("unbound variable ?" + t.name.str());
  return Term::cst(it->second);
}

Atom ground(const Atom& atom, const Substitution& subst) {
  std::vector<Term> args;
  args.reserve(atom.args.size());
  for (const Term& t : atom.args) args.push_back(apply(t, subst));
  return Atom(atom.pred, std::move(args));
}

Atom apply_partial(const Atom& atom, const Substitution& subst) {
  Atom out = atom;
  for (Term& t : out.args) {
    if (!t.is_var) continue;
    auto it = subst.find(t.name);
    if (it != subst.end()) t = Term::cst(it->second);
  }
  return out;
}

std::set<Sym> active_domain(const State& state) {
  std::set<Sym> out;
  for (const Atom& a : state)
    for (const Term& t : a.args) out.insert(t.name);
  return out;
}

std::string to_string(const State& s) {
  std::vector<std::string> parts;
  for (const Atom& a : s) parts.push_back(to_string(a));
  std::sort(parts.begin(), parts.end());
  std::string out = "{";
  for (std::size_t i = 0; i < parts.size(); ++i) out += (i ? ", " : "") + parts[i];
  return out + "}";
}

std::string dump_facts(const State& s) {
  std::vector<std::string> lines;
  for (const Atom& a : s) lines.push_back(to_string(a));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

namespace {

bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
}

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

Atom parse_atom(const std::string& raw) {
  std::string text = trim(raw);
  std::size_t i = 0;
  auto fail = [&](const std::string& what) { throw ParseError(1, static_cast<int>(i) + 1, what, text); };
  while (i < text.size() && ident_char(text[i])) ++i;
  if (i == 0) fail("predicate name");
  Atom a;
  a.pred = Sym(text.substr(0, i));
  if (i == text.size()) return a;
  if (text[i] != '(') fail("'('");
  ++i;
  while (true) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size() && text[i] == ')' && a.args.empty()) {
      ++i;
      break;
    }
    bool var = false;
    if (i < text.size() && text[i] == '?') {
      var = true;
      ++i;
    }
    std::size_t b = i;
    while (i < text.size() && ident_char(text[i])) ++i;
    if (b == i) fail("term");
    a.args.push_back(Term{Sym(text.substr(b, i - b)), var});
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i < text.size() && text[i] == ',') {
      ++i;
      continue;
    }
    if (i < text.size() && text[i] == ')') {
      ++i;
      break;
    }
    fail("',' or ')'");
  }
  if (i != text.size()) fail("end of atom");
  return a;
}

State parse_facts(const std::string& text) {
  State out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    try {
      Atom a = parse_atom(line);
      if (!a.is_ground()) throw ParseError(lineno, 1, "ground fact", line);
      out.insert(std::move(a));
    } catch (const ParseError& e) {
      throw ParseError(lineno, e.col(), e.expected(), line);
    }
  }
  return out;
}

}  // namespace cekab
