#pragma once

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "cekab/symbol.hpp"

namespace cekab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CEKAB_ERROR(Name)                 \
  class Name : public Error {             \
   public:                                \
    using Error::Error;                   \
  };

CEKAB_ERROR(UnboundVariable)
CEKAB_ERROR(InvalidTbox)
CEKAB_ERROR(InconsistentKb)
CEKAB_ERROR(SignatureMismatch)
CEKAB_ERROR(IncompatibleUpdate)
CEKAB_ERROR(PreconditionFailed)
CEKAB_ERROR(InconsistentSuccessor)
CEKAB_ERROR(SearchSpaceLimitExceeded)
CEKAB_ERROR(InvalidTask)
CEKAB_ERROR(HasDerivedPredicates)
CEKAB_ERROR(OracleLimitExceeded)
CEKAB_ERROR(LoadError)

#undef CEKAB_ERROR

class ParseError : public Error {
 public:
  ParseError(int line, int col, std::string expected, std::string found = {});
  int line() const { return line_; }
  int col() const { return col_; }
  const std::string& expected() const { return expected_; }

 private:
  int line_;
  int col_;
  std::string expected_;
};

struct Term {
  Sym name;
  bool is_var = false;

  static Term var(Sym n) { return Term{n, true}; }
  static Term cst(Sym n) { return Term{n, false}; }

  friend bool operator==(const Term&, const Term&) = default;
  friend auto operator<=>(const Term&, const Term&) = default;
};

std::string to_string(const Term& t);

struct Atom {
  Sym pred;
  std::vector<Term> args;

  Atom() = default;
  Atom(Sym p, std::vector<Term> a) : pred(p), args(std::move(a)) {}

  std::size_t arity() const { return args.size(); }
  bool is_ground() const;

  friend bool operator==(const Atom&, const Atom&) = default;
  friend auto operator<=>(const Atom&, const Atom&) = default;
};

/// Ground atom from a predicate and constant names.
Atom fact(Sym pred, std::initializer_list<Sym> consts);
Atom fact(Sym pred, const std::vector<Sym>& consts);

std::string to_string(const Atom& a);

using State = std::set<Atom>;
using Substitution = std::map<Sym, Sym>;

enum class PredKind { Concept, Role, General, Derived, Request, Internal };

struct PredicateSymbol {
  Sym name;
  int arity = 0;
  PredKind kind = PredKind::General;

  friend bool operator==(const PredicateSymbol&, const PredicateSymbol&) = default;
};

/// Name-indexed predicate table; arity conflicts are signature errors.
class Signature {
 public:
  void add(Sym name, int arity, PredKind kind);
  void add(const PredicateSymbol& p) { add(p.name, p.arity, p.kind); }
  void merge(const Signature& other);
  bool contains(Sym name) const { return preds_.count(name) != 0; }
  const PredicateSymbol* find(Sym name) const;
  int arity(Sym name) const;
  const std::map<Sym, PredicateSymbol>& all() const { return preds_; }
  std::size_t size() const { return preds_.size(); }

 private:
  std::map<Sym, PredicateSymbol> preds_;
};

Atom ground(const Atom& atom, const Substitution& subst);
Term apply(const Term& t, const Substitution& subst);
/// Substitutes bound variables and leaves the others in place.
Atom apply_partial(const Atom& atom, const Substitution& subst);

std::set<Sym> active_domain(const State& state);

std::string to_string(const State& s);
/// One fact per line, sorted by printed form.
std::string dump_facts(const State& s);

/// Parses `p(c1,c2)`, `p()` or `p`; `?x` denotes a variable.
Atom parse_atom(const std::string& text);
/// Reads a fact file: one atom per line, `#` comments, blank lines ignored.
State parse_facts(const std::string& text);

}  // namespace cekab
