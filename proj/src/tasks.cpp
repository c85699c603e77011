#include "cekab/tasks.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace cekab {

const ActionSchema* CekabTask::find_action(Sym n) const {
  for (const ActionSchema& a : actions)
    if (a.name == n) return &a;
  return nullptr;
}

namespace {

void check_atom(const CekabTask& t, const Atom& a, const std::set<Sym>& scope, const std::string& where) {
  int ar = t.predicates.arity(a.pred);
  if (ar < 0) ar = t.tbox.signature().arity(a.pred);
  if (ar < 0) throw InvalidTask(where + ": undeclared predicate " + a.pred.str());
  if (ar != static_cast<int>(a.arity()))
    throw InvalidTask(where + ": " + to_string(a) + " does not match arity " + std::to_string(ar));
  for (const Term& term : a.args) {
    if (term.is_var && !scope.count(term.name)) throw InvalidTask(where + ": unbound variable ?" + term.name.str());
    if (!term.is_var && !t.objects.count(term.name)) throw InvalidTask(where + ": unknown object " + term.name.str());
  }
}

void check_formula(const CekabTask& t, const Formula& f, const std::set<Sym>& scope, const std::string& where) {
  for (Sym v : free_vars(f))
    if (!scope.count(v)) throw InvalidTask(where + ": free variable ?" + v.str() + " is not a parameter");
  for (Sym c : constants(f))
    if (!t.objects.count(c)) throw InvalidTask(where + ": unknown object " + c.str());
  for_each_atom(f, [&](const Atom& a, bool) {
    int ar = t.predicates.arity(a.pred);
    if (ar < 0) ar = t.tbox.signature().arity(a.pred);
    if (ar < 0) throw InvalidTask(where + ": undeclared predicate " + a.pred.str());
    if (ar != static_cast<int>(a.arity()))
      throw InvalidTask(where + ": " + to_string(a) + " does not match arity " + std::to_string(ar));
  });
}

}  // namespace

void validate_task(const CekabTask& t) {
  try {
    t.tbox.check_valid();
  } catch (const InvalidTbox& e) {
    throw InvalidTask(e.what());
  }
  for (const auto& [n, p] : t.tbox.signature().all()) {
    int ar = t.predicates.arity(n);
    if (ar >= 0 && ar != p.arity)
      throw InvalidTask("predicate " + n.str() + " has arity " + std::to_string(ar) + " but the ontology uses " +
                        std::to_string(p.arity));
  }
  std::set<Sym> names;
  for (const ActionSchema& a : t.actions) {
    if (!names.insert(a.name).second) throw InvalidTask("duplicate action " + a.name.str());
    std::set<Sym> scope(a.params.begin(), a.params.end());
    if (scope.size() != a.params.size()) throw InvalidTask("action " + a.name.str() + " repeats a parameter");
    check_formula(t, a.pre, scope, "precondition of " + a.name.str());
    for (const Effect& e : a.effects) {
      std::set<Sym> es = scope;
      es.insert(e.vars.begin(), e.vars.end());
      std::string where = "effect of " + a.name.str();
      check_formula(t, e.cond, es, where);
      for (const Atom& x : e.add) check_atom(t, x, es, where);
      for (const Atom& x : e.del) check_atom(t, x, es, where);
    }
  }
  for (const Atom& a : t.init) check_atom(t, a, {}, "initial state");
  check_formula(t, t.goal, {}, "goal");
  if (!is_consistent(t.tbox, t.init)) throw InvalidTask("initial state is inconsistent with the ontology");
}

std::string to_string(const GroundAction& a) {
  std::string out = "(" + a.name.str();
  for (Sym s : a.args) out += " " + s.str();
  return out + ")";
}

Plan parse_plan(const std::string& text) {
  Plan plan;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto semi = line.find(';');
    if (semi != std::string::npos) line = line.substr(0, semi);
    std::size_t i = line.find_first_not_of(" \t\r");
    if (i == std::string::npos) continue;
    if (line[i] != '(') throw ParseError(lineno, static_cast<int>(i) + 1, "'('", line.substr(i));
    std::size_t close = line.find(')', i);
    if (close == std::string::npos) throw ParseError(lineno, static_cast<int>(line.size()) + 1, "')'", "end of line");
    if (line.find_first_not_of(" \t\r", close + 1) != std::string::npos)
      throw ParseError(lineno, static_cast<int>(close) + 2, "end of line", line.substr(close + 1));
    std::istringstream words(line.substr(i + 1, close - i - 1));
    std::string w;
    GroundAction ga;
    while (words >> w) {
      if (ga.name.empty())
        ga.name = Sym(w);
      else
        ga.args.push_back(Sym(w));
    }
    if (ga.name.empty()) throw ParseError(lineno, static_cast<int>(i) + 2, "action name", ")");
    plan.push_back(std::move(ga));
  }
  return plan;
}

std::string print_plan(const Plan& plan) {
  std::string out;
  for (const GroundAction& a : plan) out += to_string(a) + "\n";
  return out;
}

const char* to_string(Semantics s) { return s == Semantics::Ekab ? "ekab" : "cekab"; }

// ---------------------------------------------------------------------------

namespace {

Signature task_signature(const CekabTask& t) {
  Signature sig = t.predicates;
  for (const auto& [n, p] : t.tbox.signature().all())
    if (!sig.contains(n)) sig.add(p);
  return sig;
}

}  // namespace

TaskRunner::TaskRunner(const CekabTask& task) : task_(task), prog_(build_update_program(task.tbox, task_signature(task))) {}

std::set<Sym> TaskRunner::domain(const State& s) const {
  std::set<Sym> d = task_.objects;
  for (Sym c : active_domain(s)) d.insert(c);
  return d;
}

std::vector<GroundAction> TaskRunner::ground_actions() const {
  std::vector<Sym> objs(task_.objects.begin(), task_.objects.end());
  std::vector<GroundAction> out;
  for (const ActionSchema& a : task_.actions) {
    std::size_t n = a.params.size();
    if (n > 0 && objs.empty()) continue;
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      GroundAction ga{a.name, {}};
      for (std::size_t i = 0; i < n; ++i) ga.args.push_back(objs[idx[i]]);
      out.push_back(std::move(ga));
      std::size_t i = n;
      while (i > 0 && ++idx[i - 1] == objs.size()) idx[--i] = 0;
      if (i == 0) break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

Substitution TaskRunner::bind(const GroundAction& a) const {
  const ActionSchema* schema = task_.find_action(a.name);
  if (!schema) throw InvalidTask("unknown action " + a.name.str());
  if (schema->params.size() != a.args.size())
    throw InvalidTask("action " + a.name.str() + " expects " + std::to_string(schema->params.size()) + " arguments");
  Substitution s;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!task_.objects.count(a.args[i])) throw InvalidTask("unknown object " + a.args[i].str() + " in " + to_string(a));
    s[schema->params[i]] = a.args[i];
  }
  return s;
}

Update TaskRunner::effects(const EcqEvaluator& ev, const State&, const ActionSchema& schema,
                           const Substitution& binding) const {
  Update u;
  const std::vector<Sym>& dom = ev.domain();
  for (const Effect& e : schema.effects) {
    std::vector<std::size_t> idx(e.vars.size(), 0);
    if (!e.vars.empty() && dom.empty()) continue;
    while (true) {
      Substitution th = binding;
      for (std::size_t i = 0; i < e.vars.size(); ++i) th[e.vars[i]] = dom[idx[i]];
      if (ev.holds(e.cond, th)) {
        for (const Atom& a : e.add) u.insertions.insert(ground(a, th));
        for (const Atom& a : e.del) u.deletions.insert(ground(a, th));
      }
      std::size_t i = e.vars.size();
      while (i > 0 && ++idx[i - 1] == dom.size()) idx[--i] = 0;
      if (i == 0) break;
    }
  }
  return u;
}

Update TaskRunner::associated_update(const State& s, const GroundAction& a) const {
  Substitution b = bind(a);
  const ActionSchema& schema = *task_.find_action(a.name);
  std::set<Sym> d = domain(s);
  EcqEvaluator ev(s, task_.tbox, &d);
  if (!ev.holds(schema.pre, b)) throw PreconditionFailed("precondition of " + to_string(a) + " does not hold");
  return effects(ev, s, schema, b);
}

std::optional<State> TaskRunner::try_step(const EcqEvaluator& ev, const State& s, const GroundAction& a,
                                          Semantics sem) const {
  Substitution b = bind(a);
  const ActionSchema& schema = *task_.find_action(a.name);
  if (!ev.holds(schema.pre, b)) return std::nullopt;
  Update u = effects(ev, s, schema, b);
  if (sem == Semantics::Cekab) {
    DerivedOps ops = derived_operations(prog_, s, u);
    if (ops.incompatible) return std::nullopt;
    State out = s;
    for (const Atom& x : ops.deletions) out.erase(x);
    for (const Atom& x : ops.insertions) out.insert(x);
    return out;
  }
  State out = s;
  for (const Atom& x : u.deletions) out.erase(x);
  for (const Atom& x : u.insertions) out.insert(x);
  if (!is_consistent(task_.tbox, out)) return std::nullopt;
  return out;
}

State TaskRunner::step_cekab(const State& s, const GroundAction& a) const {
  Update u = associated_update(s, a);
  return apply_update(task_.tbox, prog_, s, u);
}

State TaskRunner::step_ekab(const State& s, const GroundAction& a) const {
  Update u = associated_update(s, a);
  State out = s;
  for (const Atom& x : u.deletions) out.erase(x);
  for (const Atom& x : u.insertions) out.insert(x);
  if (!is_consistent(task_.tbox, out))
    throw InconsistentSuccessor("successor of " + to_string(a) + " is inconsistent with the ontology");
  return out;
}

State TaskRunner::step(const State& s, const GroundAction& a, Semantics sem) const {
  return sem == Semantics::Cekab ? step_cekab(s, a) : step_ekab(s, a);
}

bool TaskRunner::goal_holds(const State& s) const {
  std::set<Sym> d = domain(s);
  return EcqEvaluator(s, task_.tbox, &d).holds(task_.goal);
}

Update associated_update(const CekabTask& task, const State& s, const GroundAction& a) {
  return TaskRunner(task).associated_update(s, a);
}

State step_cekab(const CekabTask& task, const State& s, const GroundAction& a) {
  return TaskRunner(task).step_cekab(s, a);
}

State step_ekab(const CekabTask& task, const State& s, const GroundAction& a) {
  return TaskRunner(task).step_ekab(s, a);
}

// ---------------------------------------------------------------------------

Verdict validate_plan(const CekabTask& task, const Plan& plan, Semantics sem) {
  Verdict v;
  TaskRunner run(task);
  v.trace.push_back(task.init);
  if (!is_consistent(task.tbox, task.init)) {
    v.failure_kind = "InconsistentKb";
    v.reason = "initial state is inconsistent with the ontology";
    return v;
  }
  State cur = task.init;
  for (std::size_t i = 0; i < plan.size(); ++i) {
    try {
      cur = run.step(cur, plan[i], sem);
    } catch (const PreconditionFailed& e) {
      v.failure_kind = "PreconditionFailed";
      v.reason = e.what();
    } catch (const IncompatibleUpdate& e) {
      v.failure_kind = "IncompatibleUpdate";
      v.reason = e.what();
    } catch (const InconsistentSuccessor& e) {
      v.failure_kind = "InconsistentSuccessor";
      v.reason = e.what();
    } catch (const InvalidTask& e) {
      v.failure_kind = "InvalidAction";
      v.reason = e.what();
    }
    if (!v.failure_kind.empty()) {
      v.failed_step = static_cast<int>(i);
      return v;
    }
    v.trace.push_back(cur);
  }
  v.goal_satisfied = run.goal_holds(cur);
  v.valid = v.goal_satisfied;
  if (!v.valid) {
    v.failure_kind = "GoalNotSatisfied";
    v.reason = "goal does not hold in the final state";
  }
  return v;
}

std::string render_verdict(const Verdict& v, const Plan& plan) {
  std::ostringstream out;
  out << "step 0 (initial): " << to_string(v.trace.front()) << "\n";
  for (std::size_t i = 1; i < v.trace.size(); ++i)
    out << "step " << i << " " << to_string(plan[i - 1]) << ": " << to_string(v.trace[i]) << "\n";
  if (v.failed_step >= 0)
    out << "step " << v.failed_step + 1 << " " << to_string(plan[v.failed_step]) << ": " << v.failure_kind << ": "
        << v.reason << "\n";
  else if (!v.goal_satisfied)
    out << "goal: not satisfied\n";
  else
    out << "goal: satisfied\n";
  out << (v.valid ? "plan valid" : "plan invalid") << "\n";
  return out.str();
}

namespace {

// Closed-world atoms over ontology predicates can tell closure-equal states
// apart, and eKAB successors depend on the explicit facts.
bool closure_dedup_sound(const CekabTask& t, Semantics sem) {
  if (sem != Semantics::Cekab) return false;
  bool ok = true;
  auto visit = [&](const Formula& f) {
    for_each_atom(f, [&](const Atom& a, bool in_bracket) {
      if (!in_bracket && t.tbox.signature().contains(a.pred)) ok = false;
    });
  };
  visit(t.goal);
  for (const ActionSchema& a : t.actions) {
    visit(a.pre);
    for (const Effect& e : a.effects) visit(e.cond);
  }
  return ok;
}

}  // namespace

std::optional<Plan> bounded_search(const CekabTask& task, int max_depth, Semantics sem, std::size_t max_states) {
  if (max_depth < 0 || max_depth > kMaxSearchDepth)
    throw SearchSpaceLimitExceeded("search depth " + std::to_string(max_depth) + " exceeds the limit of " +
                                   std::to_string(kMaxSearchDepth));
  if (!is_consistent(task.tbox, task.init)) return std::nullopt;
  TaskRunner run(task);
  std::vector<GroundAction> acts = run.ground_actions();
  bool by_closure = closure_dedup_sound(task, sem);
  auto key = [&](const State& s) { return by_closure ? abox_closure(task.tbox, s) : s; };

  struct Node {
    State state;
    int parent;
    int action;
    int depth;
  };
  std::vector<Node> nodes{{task.init, -1, -1, 0}};
  std::set<State> seen{key(task.init)};
  auto extract = [&](int i) {
    Plan p;
    for (; nodes[i].parent >= 0; i = nodes[i].parent) p.push_back(acts[nodes[i].action]);
    std::reverse(p.begin(), p.end());
    return p;
  };
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    if (run.goal_holds(nodes[head].state)) return extract(static_cast<int>(head));
    if (nodes[head].depth == max_depth) continue;
    State cur = nodes[head].state;
    std::set<Sym> d = run.domain(cur);
    EcqEvaluator ev(cur, task.tbox, &d);
    for (std::size_t ai = 0; ai < acts.size(); ++ai) {
      std::optional<State> next = run.try_step(ev, cur, acts[ai], sem);
      if (!next || !seen.insert(key(*next)).second) continue;
      if (nodes.size() >= max_states)
        throw SearchSpaceLimitExceeded("bounded search visited more than " + std::to_string(max_states) + " states");
      nodes.push_back({std::move(*next), static_cast<int>(head), static_cast<int>(ai), nodes[head].depth + 1});
    }
  }
  return std::nullopt;
}

}  // namespace cekab
