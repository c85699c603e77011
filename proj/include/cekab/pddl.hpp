#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cekab/datalog.hpp"
#include "cekab/tasks.hpp"

namespace cekab {

/// Untyped PDDL domain with derived predicates. Action conditions are FO
/// formulas; `know` brackets are kept as ECQ brackets and only make sense
/// when the domain is read as a ceKAB task.
struct PddlDomain {
  std::string name = "domain";
  Signature predicates;  // base predicates
  Signature derived;     // heads of :derived rules
  std::set<Sym> constants;
  std::vector<ActionSchema> actions;
  Program rules;
};

struct PddlTask {
  PddlDomain domain;
  std::string name = "problem";
  std::set<Sym> objects;
  State init;
  Formula goal = f_true();
};

/// Requirement flags printed on every domain.
const std::vector<std::string>& printed_requirements();

PddlDomain parse_domain(const std::string& text);
PddlTask parse_problem(const std::string& text, const PddlDomain& domain);
/// Parses one condition, e.g. `(and (p ?x) (not (q ?x)))`.
Formula parse_condition(const std::string& text);

std::string print_domain(const PddlDomain& d);
std::string print_problem(const PddlTask& t);

/// Throws InvalidTask when effects touch derived predicates, arities clash
/// or names are unknown; throws NotStratified for unstratified rules.
void validate_pddl_task(const PddlTask& t);

/// Interpreter of the PDDL transition semantics. The task must outlive it.
class PddlRunner {
 public:
  explicit PddlRunner(const PddlTask& task);

  const PddlTask& task() const { return task_; }
  std::vector<GroundAction> ground_actions() const;
  /// Minimal model of the rules over the state.
  FactStore model(const State& s) const;
  std::vector<Sym> domain(const State& s) const;

  std::optional<State> try_step(const FactStore& model, const State& s, const GroundAction& a) const;
  State step(const State& s, const GroundAction& a) const;
  bool goal_holds(const State& s) const;
  bool goal_holds(const FactStore& model, const State& s) const;

 private:
  const ActionSchema& schema(const GroundAction& a) const;

  const PddlTask& task_;
  std::set<Sym> objects_;
};

State step_pddl(const PddlTask& task, const State& s, const GroundAction& a);
Verdict validate_pddl_plan(const PddlTask& task, const Plan& plan);

/// Shortest plan within the bound by breadth-first search.
std::optional<Plan> pddl_bounded_search(const PddlTask& task, int max_depth, std::size_t max_states = 200000);
/// Every applicable action sequence of length <= max_depth that ends in a
/// goal state. Throws SearchSpaceLimitExceeded past max_nodes expansions.
std::set<Plan> enumerate_plans(const PddlTask& task, int max_depth, std::size_t max_nodes = 2000000);

}  // namespace cekab
