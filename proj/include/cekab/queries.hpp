#pragma once

#include <memory>
#include <set>
#include <string>
#include <vector>

#include "cekab/datalog.hpp"
#include "cekab/dllite.hpp"
#include "cekab/formula.hpp"

namespace cekab {

/// A query program and the atom that answers the query inside it. For a
/// single-atom query p(t) the program defines P_p for all arguments and the
/// answer atom is P_p(t); otherwise it is P_q_<hash>(free vars).
struct Rewriting {
  Program program;
  Sym query_predicate;
  Atom query_atom;
};

/// Name of the nullary inconsistency predicate.
Sym bot_predicate();

/// True when `q` is one atom without existential variables.
bool is_atomic(const Ucq& q);

/// Rewriting of a UCQ w.r.t. the TBox. `prefix` starts every generated name.
Rewriting rewrite_ucq(const Tbox& tbox, const Ucq& q, const std::string& prefix = "P_");

/// Program deriving the nullary P_bot iff the state is inconsistent.
Rewriting bot_rewriting(const Tbox& tbox, const std::string& prefix = "P_");

/// The CQs produced by backward chaining of the positive inclusions; each
/// disjunct's free variables may be instantiated, yielding head terms.
struct RewrittenCq {
  std::vector<Term> head;
  std::vector<Atom> atoms;
};
std::vector<RewrittenCq> perfect_ref(const Tbox& tbox, const Ucq& q);

struct EcqRewriting {
  Formula formula;
  Program program;
};

/// Replaces each bracket by its answer atom and unions the programs.
EcqRewriting rewrite_ecq(const Tbox& tbox, const Formula& ecq, const std::string& prefix = "P_");

/// Certain answer of a boolean CQ/UCQ (all free variables bound by `subst`).
/// Inconsistent KBs entail everything.
class CertainAnswers {
 public:
  CertainAnswers(const Tbox& tbox, const State& state);
  bool consistent() const { return sat_.consistent; }
  bool holds(const Ucq& q, const Substitution& subst) const;
  bool holds(const Cq& q, const Substitution& subst) const;

 private:
  struct Impl;
  const Tbox& tbox_;
  const ClosureIndex& cl_;
  AboxSaturation sat_;
  std::vector<int> reachable_;  // roles that type some anonymous element
};

/// Direct ECQ semantics over one state, sharing the certain-answer index
/// across queries. The state and TBox must outlive the evaluator.
class EcqEvaluator {
 public:
  EcqEvaluator(const State& state, const Tbox& tbox, const std::set<Sym>* domain = nullptr);
  ~EcqEvaluator();
  bool holds(const Formula& ecq, const Substitution& subst = {}) const;
  bool consistent() const;
  const std::vector<Sym>& domain() const { return domain_; }

 private:
  const State& state_;
  const Tbox& tbox_;
  std::vector<Sym> domain_;
  mutable std::unique_ptr<CertainAnswers> ca_;
};

/// Direct ECQ semantics. Quantifiers range over `domain` when given and
/// over adom(state) otherwise.
bool eval_ecq(const State& state, const Tbox& tbox, const Formula& ecq, const Substitution& subst = {},
              const std::set<Sym>* domain = nullptr);

}  // namespace cekab
