#pragma once

#include <functional>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cekab/core.hpp"

namespace cekab {

/// Conjunctive query: exists exist_vars . atoms, answer tuple free_vars.
struct Cq {
  std::vector<Sym> free_vars;
  std::vector<Sym> exist_vars;
  std::vector<Atom> atoms;

  friend bool operator==(const Cq&, const Cq&) = default;
};

struct Ucq {
  std::vector<Sym> free_vars;
  std::vector<Cq> disjuncts;

  friend bool operator==(const Ucq&, const Ucq&) = default;
};

/// Single-atom query whose arguments are the given terms' variables.
Ucq atomic_ucq(const Atom& atom);
/// Checks the scoping invariants of Cq and Ucq.
void validate(const Ucq& q);
std::string canonical_string(const Ucq& q);

enum class FKind { True, False, Atom, Eq, Not, And, Or, Exists, Forall, Bracket };

struct FNode;
using Formula = std::shared_ptr<const FNode>;

/// Shared AST for FO formulas and ECQs. ECQs use Bracket nodes; an FO formula
/// has none. Or, Forall, Eq and True are admitted in ECQs as definable sugar.
struct FNode {
  FKind kind = FKind::True;
  Atom atom;                  // Atom
  Term lhs, rhs;              // Eq
  std::vector<Formula> kids;  // Not (one), And, Or, quantifiers (one)
  std::vector<Sym> vars;      // quantifiers
  std::shared_ptr<const Ucq> ucq;  // Bracket
};

Formula f_true();
Formula f_false();
Formula f_atom(Atom a);
Formula f_eq(Term a, Term b);
Formula f_neq(Term a, Term b);
Formula f_not(Formula f);
Formula f_and(std::vector<Formula> fs);
Formula f_or(std::vector<Formula> fs);
Formula f_exists(std::vector<Sym> vars, Formula body);
Formula f_forall(std::vector<Sym> vars, Formula body);
Formula f_bracket(Ucq q);
Formula f_bracket(const Atom& a);

bool equal(const Formula& a, const Formula& b);
std::set<Sym> free_vars(const Formula& f);
std::set<Sym> constants(const Formula& f);
bool has_bracket(const Formula& f);
/// Every atom occurring in the formula, brackets included.
void for_each_atom(const Formula& f, const std::function<void(const Atom&, bool in_bracket)>& fn);

/// Capture-avoiding replacement of free variables by terms.
Formula substitute(const Formula& f, const std::map<Sym, Term>& m);
Formula substitute(const Formula& f, const Substitution& s);
/// Renames predicate symbols everywhere, including inside brackets.
Formula rename_predicates(const Formula& f, const std::function<Sym(Sym)>& fn);
/// Replaces each bracket by the result of fn.
Formula map_brackets(const Formula& f, const std::function<Formula(const Ucq&)>& fn);

/// Negation normal form: negation only above atoms and equalities.
Formula nnf(const Formula& f);
bool is_literal(const Formula& f);

/// PDDL-style s-expression; brackets print as (know ...).
std::string to_pddl(const Formula& f);

Sym fresh_var(const std::set<Sym>& used, std::string_view base);

}  // namespace cekab
