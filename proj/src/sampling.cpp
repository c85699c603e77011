#include "cekab/sampling.hpp"

#include <algorithm>

namespace cekab {

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <class T>
const T& pick(Rng& rng, const std::vector<T>& v) {
  return v[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(v.size()) - 1))];
}

BasicRole random_role(Rng& rng, const std::vector<Sym>& roles) { return BasicRole{pick(rng, roles), chance(rng, 0.4)}; }

BasicConcept random_concept(Rng& rng, const std::vector<Sym>& concepts, const std::vector<Sym>& roles) {
  if (chance(rng, 0.6)) return BasicConcept::named(pick(rng, concepts));
  return BasicConcept::exists(random_role(rng, roles));
}

std::vector<Sym> names(const char* prefix, int n) {
  std::vector<Sym> out;
  for (int i = 0; i < n; ++i) out.push_back(Sym(prefix + std::to_string(i)));
  return out;
}

std::vector<PredicateSymbol> preds_of(const Signature& s) {
  std::vector<PredicateSymbol> out;
  for (const auto& [n, p] : s.all()) out.push_back(p);
  return out;
}

// Generator of conditions over a fixed predicate table. With `brackets`,
// atoms are wrapped into knowledge brackets, sometimes with an existential
// variable inside.
class CondGen {
 public:
  CondGen(Rng& rng, std::vector<PredicateSymbol> preds, std::vector<Sym> consts, bool brackets)
      : rng_(rng), preds_(std::move(preds)), consts_(std::move(consts)), brackets_(brackets) {}

  Formula gen(const std::vector<Sym>& scope, int depth) {
    if (depth <= 0 || chance(rng_, 0.35)) return leaf(scope);
    switch (uniform(rng_, 0, 4)) {
      case 0:
        return f_not(gen(scope, depth - 1));
      case 1:
        return f_and({gen(scope, depth - 1), gen(scope, depth - 1)});
      case 2:
        return f_or({gen(scope, depth - 1), gen(scope, depth - 1)});
      case 3: {
        Sym v("e" + std::to_string(fresh_++));
        std::vector<Sym> inner = scope;
        inner.push_back(v);
        Formula body = gen(inner, depth - 1);
        return chance(rng_, 0.75) ? f_exists({v}, body) : f_forall({v}, body);
      }
      default:
        if (!scope.empty() && chance(rng_, 0.5)) {
          Formula eq = f_eq(term(scope), term(scope));
          return chance(rng_, 0.5) ? f_not(eq) : eq;
        }
        return leaf(scope);
    }
  }

  Atom atom(const std::vector<Sym>& scope) {
    const PredicateSymbol& p = pick(rng_, preds_);
    std::vector<Term> args;
    for (int i = 0; i < p.arity; ++i) args.push_back(term(scope));
    return Atom(p.name, args);
  }

  Term term(const std::vector<Sym>& scope) {
    if (!scope.empty() && (consts_.empty() || chance(rng_, 0.7))) return Term::var(pick(rng_, scope));
    return Term::cst(pick(rng_, consts_));
  }

 private:
  Formula leaf(const std::vector<Sym>& scope) {
    if (!brackets_) return f_atom(atom(scope));
    Atom a = atom(scope);
    if (a.arity() == 2 && chance(rng_, 0.25)) {
      // [exists y. a(t, y) & B(y)] style query
      Sym y("y" + std::to_string(fresh_++));
      a.args[1] = Term::var(y);
      Cq cq;
      cq.exist_vars = {y};
      cq.atoms.push_back(a);
      std::vector<PredicateSymbol> unary;
      for (const auto& p : preds_)
        if (p.arity == 1) unary.push_back(p);
      if (!unary.empty() && chance(rng_, 0.5)) cq.atoms.push_back(Atom(pick(rng_, unary).name, {Term::var(y)}));
      std::vector<Sym> fv;
      for (const Term& t : a.args)
        if (t.is_var && t.name != y && std::find(fv.begin(), fv.end(), t.name) == fv.end()) fv.push_back(t.name);
      cq.free_vars = fv;
      Ucq q;
      q.free_vars = fv;
      q.disjuncts.push_back(cq);
      return f_bracket(q);
    }
    return f_bracket(a);
  }

  Rng& rng_;
  std::vector<PredicateSymbol> preds_;
  std::vector<Sym> consts_;
  bool brackets_;
  int fresh_ = 0;
};

Effect random_effect(Rng& rng, CondGen& g, CondGen& atoms, const std::vector<Sym>& params, bool brackets) {
  Effect e;
  std::vector<Sym> scope = params;
  if (chance(rng, 0.25)) {
    e.vars.push_back(Sym("v"));
    scope.push_back(Sym("v"));
  }
  if (!e.vars.empty() || chance(rng, 0.5)) e.cond = g.gen(scope, brackets ? 1 : 2);
  int n = uniform(rng, 1, 2);
  for (int i = 0; i < n; ++i) (chance(rng, 0.5) ? e.add : e.del).push_back(atoms.atom(scope));
  return e;
}

}  // namespace

std::vector<Sym> sample_constants(int n) {
  std::vector<Sym> out;
  for (int i = 1; i <= n; ++i) out.push_back(Sym("c" + std::to_string(i)));
  return out;
}

Tbox random_tbox(Rng& rng, const SampleBounds& b) {
  std::vector<Sym> concepts = names("A", uniform(rng, 1, std::max(1, b.concepts)));
  std::vector<Sym> roles = names("r", uniform(rng, 1, std::max(1, b.roles)));
  int n = uniform(rng, 0, b.axioms);
  std::vector<TboxAxiom> axioms;
  for (int i = 0; i < n; ++i) {
    int k = uniform(rng, 0, 9);
    if (k < 6)
      axioms.push_back(TboxAxiom::concept_incl(random_concept(rng, concepts, roles),
                                               random_concept(rng, concepts, roles), chance(rng, 0.3)));
    else if (k < 8)
      axioms.push_back(TboxAxiom::role_incl(random_role(rng, roles), random_role(rng, roles), chance(rng, 0.3)));
    else
      axioms.push_back(TboxAxiom::funct(random_role(rng, roles)));
  }
  for (bool with_funct : {true, false}) {
    Tbox t;
    for (Sym c : concepts) t.declare_concept(c);
    for (Sym r : roles) t.declare_role(r);
    for (const TboxAxiom& ax : axioms)
      if (with_funct || ax.kind != TboxAxiom::Kind::Funct) t.add(ax);
    try {
      t.check_valid();
      return t;
    } catch (const InvalidTbox&) {
    }
  }
  return Tbox{};
}

Atom random_fact(Rng& rng, const Tbox& t, const std::vector<Sym>& consts) {
  std::vector<PredicateSymbol> ps = preds_of(t.signature());
  const PredicateSymbol& p = pick(rng, ps);
  std::vector<Sym> args;
  for (int i = 0; i < p.arity; ++i) args.push_back(pick(rng, consts));
  return fact(p.name, args);
}

State random_state(Rng& rng, const Tbox& t, const std::vector<Sym>& consts, int max_facts) {
  State s;
  int n = uniform(rng, 0, max_facts);
  for (int i = 0; i < n; ++i) s.insert(random_fact(rng, t, consts));
  return s;
}

State random_consistent_state(Rng& rng, const Tbox& t, const std::vector<Sym>& consts, int max_facts) {
  for (int tries = 0; tries < 50; ++tries) {
    State s = random_state(rng, t, consts, max_facts);
    if (is_consistent(t, s)) return s;
  }
  return {};
}

Update random_update(Rng& rng, const Tbox& t, const std::vector<Sym>& consts, int max_ins, int max_del) {
  Update u;
  int ni = uniform(rng, 0, max_ins), nd = uniform(rng, 0, max_del);
  for (int i = 0; i < ni; ++i) u.insertions.insert(random_fact(rng, t, consts));
  for (int i = 0; i < nd; ++i) u.deletions.insert(random_fact(rng, t, consts));
  return u;
}

Formula random_ecq(Rng& rng, const Tbox& t, const std::vector<Sym>& consts, const std::vector<Sym>& free,
                   int depth) {
  CondGen g(rng, preds_of(t.signature()), consts, true);
  return g.gen(free, depth);
}

CekabTask random_cekab_task(Rng& rng, const SampleBounds& b) {
  SampleBounds small{b.constants, std::min(b.concepts, 3), std::min(b.roles, 2), std::min(b.axioms, 6)};
  CekabTask t;
  t.name = "random";
  t.domain_name = "random";
  t.tbox = random_tbox(rng, small);
  for (const auto& [n, p] : t.tbox.signature().all()) t.predicates.add(p);
  std::vector<Sym> objs;
  int no = uniform(rng, 2, std::max(2, std::min(4, b.constants)));
  for (int i = 1; i <= no; ++i) objs.push_back(Sym("o" + std::to_string(i)));
  t.objects = std::set<Sym>(objs.begin(), objs.end());
  std::vector<PredicateSymbol> ps = preds_of(t.predicates);
  CondGen g(rng, ps, objs, true);
  CondGen atoms(rng, ps, objs, false);
  int na = uniform(rng, 1, 3);
  for (int i = 0; i < na; ++i) {
    ActionSchema a;
    a.name = Sym("act" + std::to_string(i));
    int np = uniform(rng, 0, 2);
    for (int j = 0; j < np; ++j) a.params.push_back(Sym("x" + std::to_string(j)));
    a.pre = chance(rng, 0.2) ? f_true() : g.gen(a.params, 2);
    int ne = uniform(rng, 1, 2);
    for (int j = 0; j < ne; ++j) a.effects.push_back(random_effect(rng, g, atoms, a.params, true));
    t.actions.push_back(std::move(a));
  }
  t.init = random_consistent_state(rng, t.tbox, objs, 4);
  t.goal = random_ecq(rng, t.tbox, objs, {}, 1);
  return t;
}

PddlTask random_pddl_task(Rng& rng, bool conflicts) {
  PddlTask t;
  t.name = "random";
  t.domain.name = "random";
  t.domain.predicates.add("p", 1, PredKind::General);
  t.domain.predicates.add("q", 1, PredKind::General);
  t.domain.predicates.add("r", 2, PredKind::General);
  std::vector<Sym> objs;
  int no = uniform(rng, 2, 3);
  for (int i = 1; i <= no; ++i) objs.push_back(Sym("o" + std::to_string(i)));
  t.objects = std::set<Sym>(objs.begin(), objs.end());
  std::vector<PredicateSymbol> ps = preds_of(t.domain.predicates);
  CondGen g(rng, ps, objs, false);
  int na = uniform(rng, 1, 2);
  for (int i = 0; i < na; ++i) {
    ActionSchema a;
    a.name = Sym("act" + std::to_string(i));
    int np = uniform(rng, 0, 2);
    for (int j = 0; j < np; ++j) a.params.push_back(Sym("x" + std::to_string(j)));
    a.pre = chance(rng, 0.3) ? f_true() : g.gen(a.params, 2);
    int ne = uniform(rng, 1, 2);
    for (int j = 0; j < ne; ++j) a.effects.push_back(random_effect(rng, g, g, a.params, false));
    if (conflicts && i == 0) {
      // One adder and one deleter of the same unary predicate.
      Effect add, del;
      std::vector<Sym> scope = a.params;
      if (scope.empty() || chance(rng, 0.4)) {
        del.vars.push_back(Sym("w"));
        scope.push_back(Sym("w"));
      }
      Sym pred = chance(rng, 0.5) ? Sym("p") : Sym("q");
      add.add.push_back(Atom(pred, {g.term(a.params)}));
      if (chance(rng, 0.5)) add.cond = g.gen(a.params, 1);
      del.del.push_back(Atom(pred, {g.term(scope)}));
      if (chance(rng, 0.5)) del.cond = g.gen(scope, 1);
      a.effects.push_back(std::move(add));
      a.effects.push_back(std::move(del));
    }
    t.domain.actions.push_back(std::move(a));
  }
  int nf = uniform(rng, 0, 4);
  for (int i = 0; i < nf; ++i) {
    const PredicateSymbol& p = pick(rng, ps);
    std::vector<Sym> args;
    for (int k = 0; k < p.arity; ++k) args.push_back(pick(rng, objs));
    t.init.insert(fact(p.name, args));
  }
  t.goal = g.gen({}, 2);
  return t;
}

Plan random_walk_cekab(Rng& rng, const CekabTask& t, int len, Semantics sem) {
  TaskRunner run(t);
  std::vector<GroundAction> acts = run.ground_actions();
  State s = t.init;
  Plan plan;
  for (int i = 0; i < len; ++i) {
    std::set<Sym> dom = run.domain(s);
    EcqEvaluator ev(s, t.tbox, &dom);
    std::vector<std::pair<GroundAction, State>> options;
    for (const GroundAction& a : acts)
      if (auto next = run.try_step(ev, s, a, sem)) options.emplace_back(a, std::move(*next));
    if (options.empty()) break;
    auto& [a, next] = options[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(options.size()) - 1))];
    plan.push_back(a);
    s = next;
  }
  return plan;
}

Plan random_walk_pddl(Rng& rng, const PddlTask& t, int len) {
  PddlRunner run(t);
  std::vector<GroundAction> acts = run.ground_actions();
  State s = t.init;
  Plan plan;
  for (int i = 0; i < len; ++i) {
    FactStore m = run.model(s);
    std::vector<std::pair<GroundAction, State>> options;
    for (const GroundAction& a : acts)
      if (auto next = run.try_step(m, s, a)) options.emplace_back(a, std::move(*next));
    if (options.empty()) break;
    auto& [a, next] = options[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(options.size()) - 1))];
    plan.push_back(a);
    s = next;
  }
  return plan;
}

}  // namespace cekab
