#pragma once

#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cekab/core.hpp"
#include "cekab/formula.hpp"

namespace cekab {

/// head <- body. Body variables that do not occur in the head are read
/// existentially; unbound variables range over the evaluation domain.
struct Rule {
  Atom head;
  Formula body;
};

std::string to_string(const Rule& r);

class NotStratified : public Error {
 public:
  NotStratified(const std::string& msg, std::vector<Sym> cycle) : Error(msg), cycle_(std::move(cycle)) {}
  /// Predicates of a dependency cycle through negation, first == last.
  const std::vector<Sym>& cycle() const { return cycle_; }

 private:
  std::vector<Sym> cycle_;
};

class Program {
 public:
  /// Appends a rule unless a structurally equal one is present.
  void add(Rule r);
  void append(const Program& other);
  const std::vector<Rule>& rules() const { return rules_; }
  std::set<Sym> derived() const;
  std::set<Sym> constants() const;
  bool empty() const { return rules_.empty(); }
  std::size_t size() const { return rules_.size(); }

 private:
  std::vector<Rule> rules_;
  std::set<std::string> seen_;
};

struct Stratification {
  /// Derived predicates start at stratum 1; body-only predicates sit at 0.
  /// num_strata is the highest derived stratum.
  std::map<Sym, int> stratum;
  int num_strata = 0;
};

Stratification stratify(const Program& program);

using Tuple = std::vector<Sym>;

struct TupleHash {
  std::size_t operator()(const Tuple& t) const noexcept {
    std::size_t h = 1469598103934665603ull;
    for (Sym s : t) h = (h ^ s.id()) * 1099511628211ull;
    return h;
  }
};

/// Indexed set of ground facts used by the evaluators.
class FactStore {
 public:
  FactStore() = default;
  explicit FactStore(const State& s);

  bool insert(Sym pred, const Tuple& args);
  bool contains(Sym pred, const Tuple& args) const;
  bool contains(const Atom& ground_atom) const;
  const std::vector<Tuple>& rows(Sym pred) const;
  /// Rows whose column `col` holds `value`.
  const std::vector<std::size_t>& lookup(Sym pred, std::size_t col, Sym value) const;
  std::set<Sym> predicates() const;
  State to_state() const;
  std::size_t size() const;

 private:
  struct Relation {
    std::vector<Tuple> rows;
    std::unordered_set<Tuple, TupleHash> set;
    mutable std::vector<std::unordered_map<Sym, std::vector<std::size_t>>> index;
    mutable std::vector<char> indexed;
  };
  std::unordered_map<Sym, Relation> rels_;
};

/// Minimal model of a stratified program over `state`. The evaluation domain
/// is adom(state) plus program constants plus `objects`.
State minimal_model(const Program& program, const State& state, const std::set<Sym>& objects = {});
FactStore minimal_model_store(const Program& program, const State& state, const std::set<Sym>& objects = {});

/// Closed-world evaluation. Quantifiers range over `domain` when given and
/// over adom(model) otherwise.
bool eval_fo(const State& model, const Formula& f, const Substitution& subst = {},
             const std::set<Sym>* domain = nullptr);
bool eval_fo(const FactStore& model, const Formula& f, const Substitution& subst, const std::vector<Sym>& domain);

/// Rules one per line in insertion order.
std::string dump_program(const Program& p);

}  // namespace cekab
