#include "cekab/compile.hpp"

#include <algorithm>
#include <map>
#include <regex>

#include "cekab/coherence.hpp"
#include "cekab/queries.hpp"

namespace cekab {

Sym primed(Sym pred) { return Sym(pred.str() + "_x"); }
Sym updating_predicate() { return Sym("updating"); }
Sym update_action_name() { return Sym("a_update"); }

namespace {

std::vector<Term> arg_vars(int arity) {
  std::vector<Term> out;
  for (int i = 1; i <= arity; ++i) out.push_back(Term::var(Sym("x" + std::to_string(i))));
  return out;
}

std::vector<Sym> var_names(const std::vector<Term>& ts) {
  std::vector<Sym> out;
  for (const Term& t : ts) out.push_back(t.name);
  return out;
}

BasicRole rename_role(BasicRole q, const std::function<Sym(Sym)>& fn) {
  q.base = fn(q.base);
  return q;
}

BasicConcept rename_concept(BasicConcept b, const std::function<Sym(Sym)>& fn) {
  if (b.is_named())
    b.name = fn(b.name);
  else
    b.role = rename_role(b.role, fn);
  return b;
}

Tbox rename_tbox(const Tbox& t, const std::function<Sym(Sym)>& fn) {
  Tbox out;
  for (const auto& [n, p] : t.signature().all()) {
    if (p.arity == 1)
      out.declare_concept(fn(n));
    else
      out.declare_role(fn(n));
  }
  for (TboxAxiom ax : t.axioms()) {
    ax.lhs_c = rename_concept(ax.lhs_c, fn);
    ax.rhs_c = rename_concept(ax.rhs_c, fn);
    ax.lhs_r = rename_role(ax.lhs_r, fn);
    ax.rhs_r = rename_role(ax.rhs_r, fn);
    out.add(ax);
  }
  return out;
}

Formula prime_brackets(const Formula& f) {
  return map_brackets(f, [](const Ucq& q) {
    Ucq r = q;
    for (Cq& c : r.disjuncts)
      for (Atom& a : c.atoms) a.pred = primed(a.pred);
    return f_bracket(r);
  });
}

// Collects predicate arities of everything a PDDL domain mentions.
void note_arities(const Formula& f, std::map<Sym, int>& ar) {
  for_each_atom(f, [&](const Atom& a, bool) { ar.emplace(a.pred, static_cast<int>(a.arity())); });
}

std::map<Sym, int> mentioned_arities(const PddlDomain& d, const Formula& goal) {
  std::map<Sym, int> ar;
  for (const Rule& r : d.rules.rules()) {
    ar.emplace(r.head.pred, static_cast<int>(r.head.arity()));
    note_arities(r.body, ar);
  }
  for (const ActionSchema& a : d.actions) {
    note_arities(a.pre, ar);
    for (const Effect& e : a.effects) {
      note_arities(e.cond, ar);
      for (const Atom& x : e.add) ar.emplace(x.pred, static_cast<int>(x.arity()));
      for (const Atom& x : e.del) ar.emplace(x.pred, static_cast<int>(x.arity()));
    }
  }
  note_arities(goal, ar);
  return ar;
}

// Rule heads become derived; anything else mentioned but undeclared is base.
void finalize(PddlTask& t) {
  std::set<Sym> heads;
  for (const Rule& r : t.domain.rules.rules()) heads.insert(r.head.pred);
  Signature base = t.domain.predicates, derived;
  for (const auto& [n, ar] : mentioned_arities(t.domain, t.goal)) {
    if (heads.count(n))
      derived.add(n, ar, PredKind::Derived);
    else if (!base.contains(n))
      base.add(n, ar, PredKind::General);
  }
  for (const auto& [n, p] : t.domain.derived.all())
    if (!base.contains(n)) derived.add(n, p.arity, PredKind::Derived);
  Signature clean;
  for (const auto& [n, p] : base.all())
    if (!derived.contains(n)) clean.add(p);
  t.domain.predicates = clean;
  t.domain.derived = derived;
}

class ConditionCompiler {
 public:
  ConditionCompiler(const Tbox& tbox, Program& rules) : tbox_(rename_tbox(tbox, primed)), rules_(rules) {}

  const Tbox& primed_tbox() const { return tbox_; }

  Formula operator()(const Formula& f) {
    EcqRewriting rw = rewrite_ecq(tbox_, prime_brackets(f), "P_");
    rules_.append(rw.program);
    return rw.formula;
  }

 private:
  Tbox tbox_;
  Program& rules_;
};

Signature user_predicates(const CekabTask& task) {
  Signature p = task.predicates;
  for (const auto& [n, s] : task.tbox.signature().all())
    if (!p.contains(n)) p.add(n, s.arity, PredKind::General);
  return p;
}

struct Common {
  PddlTask out;
  Signature preds;
};

// Shared part of both schemes: bridges, inconsistency rules and rewritten
// conditions. `guard` is conjoined to every precondition and to the goal.
Common compile_common(const CekabTask& task, const Formula& guard) {
  validate_task(task);
  check_name_hygiene(task);
  Common c;
  c.preds = user_predicates(task);
  PddlTask& t = c.out;
  t.name = task.name;
  t.domain.name = task.domain_name;
  t.objects = task.objects;
  t.init = task.init;
  for (const auto& [n, p] : c.preds.all()) t.domain.predicates.add(n, p.arity, PredKind::General);

  Program& R = t.domain.rules;
  for (const auto& [n, p] : c.preds.all()) {
    std::vector<Term> xs = arg_vars(p.arity);
    R.add(Rule{Atom(primed(n), xs), f_atom(Atom(n, xs))});
  }
  ConditionCompiler cc(task.tbox, R);
  R.append(bot_rewriting(cc.primed_tbox(), "P_").program);
  for (const ActionSchema& a : task.actions) {
    ActionSchema s = a;
    s.pre = f_and({guard, cc(a.pre)});
    for (Effect& e : s.effects) e.cond = cc(e.cond);
    t.domain.actions.push_back(std::move(s));
  }
  t.goal = f_and({guard, cc(task.goal)});
  return c;
}

}  // namespace

void check_name_hygiene(const CekabTask& task) {
  static const std::regex aux("aux_[0-9]+");
  const Signature preds = user_predicates(task);
  for (const auto& [n, p] : preds.all()) {
    const std::string& k = n.key();
    bool bad = istarts_with(k, "ins_") || istarts_with(k, "del_") || iends_with(k, "_request") ||
               iends_with(k, "_closure") || iends_with(k, "_x") || k == "updating" || k == "incompatible_update" ||
               istarts_with(k, "p_") || std::regex_match(k, aux);
    if (bad) throw LoadError("predicate " + n.str() + " clashes with a generated name");
  }
  for (const ActionSchema& a : task.actions)
    if (a.name == update_action_name()) throw LoadError("action name " + a.name.str() + " is reserved");
}

PddlTask compile_ekab(const CekabTask& task) {
  Common c = compile_common(task, f_not(f_atom(Atom(bot_predicate(), {}))));
  finalize(c.out);
  stratify(c.out.domain.rules);
  return c.out;
}

PddlTask compile_cekab(const CekabTask& task, const CompileOptions& opts) {
  Atom updating(updating_predicate(), {});
  Common c = compile_common(task, f_not(f_atom(updating)));
  PddlTask& t = c.out;
  bool set_up = opts.variant == Variant::SetUp;

  UpdateProgram up = build_update_program(task.tbox, c.preds);
  t.domain.rules.append(up.program);
  for (const auto& [n, p] : c.preds.all()) {
    UpdateNames un = update_names(n);
    t.domain.predicates.add(un.ins_request, p.arity, PredKind::Request);
    t.domain.predicates.add(un.del_request, p.arity, PredKind::Request);
    if (!set_up) {
      std::vector<Term> xs = arg_vars(p.arity);
      t.domain.rules.add(Rule{updating, f_atom(Atom(un.ins_request, xs))});
      t.domain.rules.add(Rule{updating, f_atom(Atom(un.del_request, xs))});
    }
  }
  if (set_up) t.domain.predicates.add(updating_predicate(), 0, PredKind::General);

  for (ActionSchema& a : t.domain.actions)
    for (Effect& e : a.effects) {
      std::vector<Atom> add;
      for (const Atom& x : e.add) add.push_back(Atom(update_names(x.pred).ins_request, x.args));
      for (const Atom& x : e.del) add.push_back(Atom(update_names(x.pred).del_request, x.args));
      if (set_up && !add.empty()) add.push_back(updating);
      e.add = std::move(add);
      e.del.clear();
    }

  ActionSchema upd;
  upd.name = update_action_name();
  upd.pre = f_and({f_atom(updating), f_not(f_atom(Atom(incompatible_predicate(), {})))});
  if (set_up) upd.effects.push_back(Effect{{}, f_true(), {}, {updating}});
  for (const auto& [n, p] : c.preds.all()) {
    UpdateNames un = update_names(n);
    std::vector<Term> xs = arg_vars(p.arity);
    std::vector<Sym> vs = var_names(xs);
    Atom base(n, xs);
    upd.effects.push_back(Effect{vs, f_atom(Atom(un.ins, xs)), {base}, {}});
    upd.effects.push_back(Effect{vs, f_atom(Atom(un.del, xs)), {}, {base}});
    upd.effects.push_back(Effect{vs, f_atom(Atom(un.ins_request, xs)), {}, {Atom(un.ins_request, xs)}});
    upd.effects.push_back(Effect{vs, f_atom(Atom(un.del_request, xs)), {}, {Atom(un.del_request, xs)}});
  }
  t.domain.actions.push_back(std::move(upd));
  finalize(t);
  stratify(t.domain.rules);
  return t;
}

PddlTask compile(const CekabTask& task, const CompileOptions& opts) {
  PddlTask t = opts.scheme == Scheme::Ekab ? compile_ekab(task) : compile_cekab(task, opts);
  return opts.tseitin ? tseitin_transform(t) : t;
}

// ---------------------------------------------------------------------------

namespace {

class Tseitin {
 public:
  Tseitin(const PddlTask& t, Program& out) : out_(out) {
    std::map<Sym, int> ar = mentioned_arities(t.domain, t.goal);
    for (const auto& [n, p] : t.domain.predicates.all()) ar.emplace(n, p.arity);
    for (const auto& [n, p] : t.domain.derived.all()) ar.emplace(n, p.arity);
    for (const auto& [n, a] : ar) used_.insert(n);
  }

  // Condition position: a non-literal becomes one auxiliary atom.
  Formula condition(const Formula& f) {
    if (has_bracket(f)) throw Error("knowledge brackets cannot be Tseitin-transformed");
    return lower(nnf(f));
  }

  // Rule body position: the top connective stays, its operands are lowered.
  Formula body(const Formula& f) {
    Formula g = nnf(f);
    return is_literal(g) ? g : flatten(g);
  }

 private:
  Formula lower(const Formula& f) {
    if (is_literal(f)) return f;
    Sym name = fresh();
    std::set<Sym> fv = free_vars(f);
    std::vector<Term> head;
    for (Sym v : fv) head.push_back(Term::var(v));
    Atom a(name, head);
    out_.add(Rule{a, flatten(f)});
    return f_atom(a);
  }

  Formula flatten(const Formula& f) {
    std::vector<Formula> ks;
    switch (f->kind) {
      case FKind::And:
      case FKind::Or:
        for (const Formula& k : f->kids) ks.push_back(lower(k));
        return f->kind == FKind::And ? f_and(ks) : f_or(ks);
      case FKind::Exists:
        return f_exists(f->vars, lower(f->kids[0]));
      case FKind::Forall:
        return f_forall(f->vars, lower(f->kids[0]));
      default:
        return f;
    }
  }

  Sym fresh() {
    while (true) {
      Sym s("aux_" + std::to_string(next_++));
      if (used_.insert(s).second) return s;
    }
  }

  Program& out_;
  std::set<Sym> used_;
  int next_ = 0;
};

}  // namespace

PddlTask tseitin_transform(const PddlTask& task) {
  stratify(task.domain.rules);
  PddlTask t = task;
  Program aux;
  Tseitin ts(task, aux);
  Program rules;
  for (const Rule& r : task.domain.rules.rules()) rules.add(Rule{r.head, ts.body(r.body)});
  for (ActionSchema& a : t.domain.actions) {
    a.pre = ts.condition(a.pre);
    for (Effect& e : a.effects) e.cond = ts.condition(e.cond);
  }
  t.goal = ts.condition(t.goal);
  rules.append(aux);
  t.domain.rules = rules;
  finalize(t);
  stratify(t.domain.rules);
  return t;
}

// ---------------------------------------------------------------------------

CekabTask split_conflicting_effects(const PddlTask& task) {
  if (!task.domain.rules.empty() || task.domain.derived.size() != 0)
    throw HasDerivedPredicates("the reduction needs a task without derived predicates");
  CekabTask out;
  out.name = task.name;
  out.domain_name = task.domain.name;
  out.predicates = task.domain.predicates;
  out.objects = task.objects;
  for (Sym c : task.domain.constants) out.objects.insert(c);
  out.init = task.init;
  out.goal = task.goal;
  for (const ActionSchema& a : task.domain.actions) {
    ActionSchema s{a.name, a.params, a.pre, {}};
    for (const Effect& ep : a.effects) {
      Effect plus{ep.vars, ep.cond, ep.add, {}};
      std::vector<Effect> minus;
      for (const Atom& d : ep.del) {
        std::set<Sym> used(a.params.begin(), a.params.end());
        used.insert(ep.vars.begin(), ep.vars.end());
        for (Sym v : free_vars(ep.cond)) used.insert(v);
        for (const Term& t : d.args)
          if (t.is_var) used.insert(t.name);
        std::vector<Formula> guards;
        for (const Effect& e : a.effects)
          for (const Atom& x : e.add) {
            if (x.pred != d.pred) continue;
            std::map<Sym, Term> ren;
            std::vector<Sym> bound;
            for (Sym v : e.vars) {
              Sym nv = fresh_var(used, v.str());
              used.insert(nv);
              ren[v] = Term::var(nv);
              bound.push_back(nv);
            }
            std::vector<Formula> conj{substitute(e.cond, ren)};
            for (std::size_t i = 0; i < x.args.size(); ++i) {
              Term xi = x.args[i];
              if (xi.is_var && ren.count(xi.name)) xi = ren[xi.name];
              conj.push_back(f_eq(xi, d.args[i]));
            }
            Formula body = f_and(conj);
            guards.push_back(f_not(bound.empty() ? body : f_exists(bound, body)));
          }
        if (guards.empty()) {
          plus.del.push_back(d);
          continue;
        }
        guards.insert(guards.begin(), ep.cond);
        minus.push_back(Effect{ep.vars, f_and(guards), {}, {d}});
      }
      if (!(plus.add.empty() && plus.del.empty()) || minus.empty()) s.effects.push_back(std::move(plus));
      for (Effect& m : minus) s.effects.push_back(std::move(m));
    }
    out.actions.push_back(std::move(s));
  }
  return out;
}

CekabTask cekab_from_pddl(const PddlTask& pddl, const Tbox& tbox) {
  if (!pddl.domain.rules.empty() || pddl.domain.derived.size() != 0)
    throw InvalidTask("a ceKAB source domain cannot declare derived predicates");
  CekabTask t;
  t.name = pddl.name;
  t.domain_name = pddl.domain.name;
  for (const auto& [n, p] : pddl.domain.predicates.all()) {
    PredKind k = tbox.is_concept(n) ? PredKind::Concept : tbox.is_role(n) ? PredKind::Role : PredKind::General;
    t.predicates.add(n, p.arity, k);
  }
  t.actions = pddl.domain.actions;
  t.tbox = tbox;
  t.objects = pddl.objects;
  for (Sym c : pddl.domain.constants) t.objects.insert(c);
  t.init = pddl.init;
  t.goal = pddl.goal;
  validate_task(t);
  return t;
}

CekabTask load_cekab_task(const std::string& domain_text, const std::string& problem_text, const Tbox& tbox) {
  PddlDomain d = parse_domain(domain_text);
  return cekab_from_pddl(parse_problem(problem_text, d), tbox);
}

PddlTask cekab_to_pddl(const CekabTask& task) {
  PddlTask t;
  t.name = task.name;
  t.domain.name = task.domain_name;
  const Signature preds = user_predicates(task);
  for (const auto& [n, p] : preds.all()) t.domain.predicates.add(n, p.arity, PredKind::General);
  t.domain.actions = task.actions;
  t.objects = task.objects;
  t.init = task.init;
  t.goal = task.goal;
  return t;
}

CompileStats compile_stats(const PddlTask& t) {
  CompileStats s;
  s.base_predicates = t.domain.predicates.size();
  s.derived_predicates = t.domain.derived.size();
  s.rules = t.domain.rules.size();
  s.actions = t.domain.actions.size();
  s.strata = stratify(t.domain.rules).num_strata;
  return s;
}

std::optional<Plan> interleave_updates(const PddlTask& compiled, const Plan& plan) {
  PddlRunner r(compiled);
  const GroundAction up{update_action_name(), {}};
  const Atom flag = fact(updating_predicate(), {});
  State s = compiled.init;
  Plan out;
  for (const auto& a : plan) {
    auto next = r.try_step(r.model(s), s, a);
    if (!next) return std::nullopt;
    s = std::move(*next);
    out.push_back(a);
    FactStore m = r.model(s);
    if (!m.contains(flag)) continue;
    auto after = r.try_step(m, s, up);
    if (!after) return std::nullopt;
    s = std::move(*after);
    out.push_back(up);
  }
  return out;
}

}  // namespace cekab
