#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "cekab/coherence.hpp"
#include "cekab/dllite.hpp"
#include "cekab/formula.hpp"
#include "cekab/queries.hpp"

namespace cekab {

struct Effect {
  std::vector<Sym> vars;
  Formula cond = f_true();
  std::vector<Atom> add;
  std::vector<Atom> del;
};

struct ActionSchema {
  Sym name;
  std::vector<Sym> params;
  Formula pre = f_true();
  std::vector<Effect> effects;
};

struct CekabTask {
  std::string name = "task";
  std::string domain_name = "domain";
  Signature predicates;
  std::vector<ActionSchema> actions;
  Tbox tbox;
  std::set<Sym> objects;
  State init;
  Formula goal = f_true();

  const ActionSchema* find_action(Sym name) const;
};

/// Checks the structural task invariants; throws InvalidTask.
void validate_task(const CekabTask& task);

struct GroundAction {
  Sym name;
  std::vector<Sym> args;

  friend bool operator==(const GroundAction&, const GroundAction&) = default;
  friend auto operator<=>(const GroundAction&, const GroundAction&) = default;
};
using Plan = std::vector<GroundAction>;

std::string to_string(const GroundAction& a);
/// One `(name arg...)` per line; `;` starts a comment.
Plan parse_plan(const std::string& text);
std::string print_plan(const Plan& plan);

enum class Semantics { Ekab, Cekab };
const char* to_string(Semantics s);

/// Stepping engine for one task. Keeps the update program of the task
/// signature so repeated steps do not rebuild it. The task must outlive it.
class TaskRunner {
 public:
  explicit TaskRunner(const CekabTask& task);

  const CekabTask& task() const { return task_; }
  const UpdateProgram& update_program() const { return prog_; }
  /// Quantifier and effect-variable range: task objects plus adom(state).
  std::set<Sym> domain(const State& s) const;

  std::vector<GroundAction> ground_actions() const;
  Substitution bind(const GroundAction& a) const;

  Update associated_update(const State& s, const GroundAction& a) const;
  State step_cekab(const State& s, const GroundAction& a) const;
  State step_ekab(const State& s, const GroundAction& a) const;
  State step(const State& s, const GroundAction& a, Semantics sem) const;
  bool goal_holds(const State& s) const;

  /// Successor when the action is applicable, nullopt otherwise. The
  /// evaluator must be built over `s` with domain(s).
  std::optional<State> try_step(const EcqEvaluator& ev, const State& s, const GroundAction& a, Semantics sem) const;

 private:
  Update effects(const EcqEvaluator& ev, const State& s, const ActionSchema& schema, const Substitution& binding) const;

  const CekabTask& task_;
  UpdateProgram prog_;
};

Update associated_update(const CekabTask& task, const State& s, const GroundAction& a);
State step_cekab(const CekabTask& task, const State& s, const GroundAction& a);
State step_ekab(const CekabTask& task, const State& s, const GroundAction& a);

struct Verdict {
  bool valid = false;
  bool goal_satisfied = false;
  std::vector<State> trace;  // initial state followed by each successor
  int failed_step = -1;      // index of the first inapplicable action
  std::string failure_kind;  // exception class name of the failure
  std::string reason;
};

Verdict validate_plan(const CekabTask& task, const Plan& plan, Semantics sem);
std::string render_verdict(const Verdict& v, const Plan& plan);

constexpr int kMaxSearchDepth = 16;

/// Shortest plan of length <= max_depth by breadth-first search, or nullopt
/// when none exists within the bound. Throws SearchSpaceLimitExceeded when
/// max_depth exceeds kMaxSearchDepth or more than max_states are visited.
std::optional<Plan> bounded_search(const CekabTask& task, int max_depth, Semantics sem,
                                   std::size_t max_states = 200000);

}  // namespace cekab
