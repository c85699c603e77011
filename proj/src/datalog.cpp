#include "cekab/datalog.hpp"

#include <algorithm>
#include <functional>

namespace cekab {

namespace {

std::string body_text(const Formula& f);

std::string literal_text(const Formula& f) {
  switch (f->kind) {
    case FKind::Atom:
      return to_string(f->atom);
    case FKind::Eq:
      return to_string(f->lhs) + " = " + to_string(f->rhs);
    case FKind::True:
      return "true";
    case FKind::False:
      return "false";
    case FKind::Not:
      if (f->kids[0]->kind == FKind::Eq) return to_string(f->kids[0]->lhs) + " != " + to_string(f->kids[0]->rhs);
      if (f->kids[0]->kind == FKind::Atom) return "not " + to_string(f->kids[0]->atom);
      break;
    default:
      break;
  }
  return to_pddl(f);
}

std::string body_text(const Formula& f) {
  if (f->kind != FKind::And) return literal_text(f);
  std::string out;
  for (std::size_t i = 0; i < f->kids.size(); ++i) out += (i ? ", " : "") + literal_text(f->kids[i]);
  return out;
}

std::string rule_key(const Rule& r) { return to_pddl(f_atom(r.head)) + " <- " + to_pddl(r.body); }

}  // namespace

std::string to_string(const Rule& r) { return to_string(r.head) + " <- " + body_text(r.body); }

void Program::add(Rule r) {
  if (!seen_.insert(rule_key(r)).second) return;
  rules_.push_back(std::move(r));
}

void Program::append(const Program& other) {
  for (const Rule& r : other.rules()) add(r);
}

std::set<Sym> Program::derived() const {
  std::set<Sym> out;
  for (const Rule& r : rules_) out.insert(r.head.pred);
  return out;
}

std::set<Sym> Program::constants() const {
  std::set<Sym> out;
  for (const Rule& r : rules_) {
    for (const Term& t : r.head.args)
      if (!t.is_var) out.insert(t.name);
    for (Sym c : cekab::constants(r.body)) out.insert(c);
  }
  return out;
}

std::string dump_program(const Program& p) {
  std::string out;
  for (const Rule& r : p.rules()) out += to_string(r) + "\n";
  return out;
}

// ---------------------------------------------------------------------------
// Dependency analysis

namespace {

struct Edge {
  Sym to;
  bool negative;
};

void collect_deps(const Formula& f, bool neg, std::vector<Edge>& out) {
  switch (f->kind) {
    case FKind::Atom:
      out.push_back(Edge{f->atom.pred, neg});
      break;
    case FKind::Not:
      collect_deps(f->kids[0], !neg, out);
      break;
    case FKind::And:
    case FKind::Or:
    case FKind::Exists:
    case FKind::Forall:
      for (const auto& k : f->kids) collect_deps(k, neg, out);
      break;
    case FKind::Bracket:
      for (const Cq& cq : f->ucq->disjuncts)
        for (const Atom& a : cq.atoms) out.push_back(Edge{a.pred, neg});
      break;
    default:
      break;
  }
}

struct DepGraph {
  std::vector<Sym> nodes;
  std::map<Sym, int> id;
  std::vector<std::vector<std::pair<int, bool>>> out;
  std::vector<char> is_derived;

  int node(Sym s) {
    auto [it, fresh] = id.emplace(s, static_cast<int>(nodes.size()));
    if (fresh) {
      nodes.push_back(s);
      out.emplace_back();
      is_derived.push_back(0);
    }
    return it->second;
  }

  explicit DepGraph(const Program& p) {
    for (const Rule& r : p.rules()) {
      int h = node(r.head.pred);
      is_derived[h] = 1;
    }
    for (const Rule& r : p.rules()) {
      std::vector<Edge> es;
      collect_deps(r.body, false, es);
      int h = node(r.head.pred);
      for (const Edge& e : es) {
        int to = node(e.to);
        out[h].emplace_back(to, e.negative);
      }
    }
  }

  // Tarjan; components come out dependencies first.
  std::vector<std::vector<int>> sccs() const {
    int n = static_cast<int>(nodes.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::vector<int>> result;
    int counter = 0;
    std::function<void(int)> visit = [&](int v) {
      index[v] = low[v] = counter++;
      stack.push_back(v);
      on_stack[v] = 1;
      for (auto [w, neg] : out[v]) {
        (void)neg;
        if (index[w] < 0) {
          visit(w);
          low[v] = std::min(low[v], low[w]);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
      }
      if (low[v] == index[v]) {
        std::vector<int> c;
        while (true) {
          int w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          c.push_back(w);
          if (w == v) break;
        }
        std::sort(c.begin(), c.end(), [&](int a, int b) { return nodes[a] < nodes[b]; });
        result.push_back(std::move(c));
      }
    };
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](int a, int b) { return nodes[a] < nodes[b]; });
    for (int v : order)
      if (index[v] < 0) visit(v);
    return result;
  }

  // Path from `from` to `to` inside the component `members`.
  std::vector<int> path(int from, int to, const std::set<int>& members) const {
    std::map<int, int> parent{{from, from}};
    std::vector<int> queue{from};
    for (std::size_t qi = 0; qi < queue.size(); ++qi) {
      int v = queue[qi];
      if (v == to) break;
      for (auto [w, neg] : out[v]) {
        (void)neg;
        if (members.count(w) && !parent.count(w)) {
          parent[w] = v;
          queue.push_back(w);
        }
      }
    }
    std::vector<int> p;
    for (int v = to; v != from; v = parent[v]) p.push_back(v);
    p.push_back(from);
    std::reverse(p.begin(), p.end());
    return p;
  }
};

}  // namespace

Stratification stratify(const Program& program) {
  DepGraph g(program);
  auto comps = g.sccs();
  std::vector<int> comp_of(g.nodes.size(), -1);
  for (std::size_t c = 0; c < comps.size(); ++c)
    for (int v : comps[c]) comp_of[v] = static_cast<int>(c);
  Stratification st;
  std::vector<int> level(comps.size(), 0);
  for (std::size_t c = 0; c < comps.size(); ++c) {
    std::set<int> members(comps[c].begin(), comps[c].end());
    bool derived = false;
    int lv = 0;
    for (int v : comps[c]) {
      derived |= g.is_derived[v] != 0;
      for (auto [w, neg] : g.out[v]) {
        if (comp_of[w] == static_cast<int>(c)) {
          if (neg) {
            std::vector<int> back = g.path(w, v, members);
            std::vector<Sym> cycle{g.nodes[v]};
            for (int x : back) cycle.push_back(g.nodes[x]);
            std::string msg = "negative dependency on a cycle:";
            for (Sym s : cycle) msg += " " + s.str();
            throw NotStratified(msg, cycle);
          }
          continue;
        }
        lv = std::max(lv, level[comp_of[w]] + (neg ? 1 : 0));
      }
    }
    if (derived) lv = std::max(lv, 1);
    level[c] = lv;
    for (int v : comps[c]) st.stratum[g.nodes[v]] = lv;
    st.num_strata = std::max(st.num_strata, lv);
  }
  return st;
}

// ---------------------------------------------------------------------------
// Fact store

FactStore::FactStore(const State& s) {
  for (const Atom& a : s) {
    Tuple t;
    t.reserve(a.args.size());
    for (const Term& x : a.args) t.push_back(x.name);
    insert(a.pred, t);
  }
}

bool FactStore::insert(Sym pred, const Tuple& args) {
  Relation& r = rels_[pred];
  if (!r.set.insert(args).second) return false;
  std::size_t row = r.rows.size();
  r.rows.push_back(args);
  for (std::size_t c = 0; c < r.indexed.size(); ++c)
    if (r.indexed[c] && c < args.size()) r.index[c][args[c]].push_back(row);
  return true;
}

bool FactStore::contains(Sym pred, const Tuple& args) const {
  auto it = rels_.find(pred);
  return it != rels_.end() && it->second.set.count(args);
}

bool FactStore::contains(const Atom& a) const {
  Tuple t;
  t.reserve(a.args.size());
  for (const Term& x : a.args) t.push_back(x.name);
  return contains(a.pred, t);
}

const std::vector<Tuple>& FactStore::rows(Sym pred) const {
  static const std::vector<Tuple> empty;
  auto it = rels_.find(pred);
  return it == rels_.end() ? empty : it->second.rows;
}

const std::vector<std::size_t>& FactStore::lookup(Sym pred, std::size_t col, Sym value) const {
  static const std::vector<std::size_t> empty;
  auto it = rels_.find(pred);
  if (it == rels_.end()) return empty;
  const Relation& r = it->second;
  if (r.indexed.size() <= col) {
    r.indexed.resize(col + 1, 0);
    r.index.resize(col + 1);
  }
  if (!r.indexed[col]) {
    for (std::size_t i = 0; i < r.rows.size(); ++i)
      if (col < r.rows[i].size()) r.index[col][r.rows[i][col]].push_back(i);
    r.indexed[col] = 1;
  }
  auto jt = r.index[col].find(value);
  return jt == r.index[col].end() ? empty : jt->second;
}

std::set<Sym> FactStore::predicates() const {
  std::set<Sym> out;
  for (const auto& [p, r] : rels_)
    if (!r.rows.empty()) out.insert(p);
  return out;
}

State FactStore::to_state() const {
  State out;
  for (const auto& [p, r] : rels_)
    for (const Tuple& t : r.rows) out.insert(fact(p, t));
  return out;
}

std::size_t FactStore::size() const {
  std::size_t n = 0;
  for (const auto& [p, r] : rels_) n += r.rows.size();
  return n;
}

// ---------------------------------------------------------------------------
// FO evaluation

namespace {

class FoEval {
 public:
  FoEval(const FactStore& m, const std::vector<Sym>& dom) : model_(m), domain_(dom) {}

  std::vector<std::pair<Sym, Sym>> env;

  Sym resolve(const Term& t) const {
    if (!t.is_var) return t.name;
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == t.name) return it->second;
    throw UnboundVariable("unbound variable ?" + t.name.str());
  }

  bool eval(const Formula& f) {
    switch (f->kind) {
      case FKind::True:
        return true;
      case FKind::False:
        return false;
      case FKind::Atom: {
        Tuple t;
        t.reserve(f->atom.args.size());
        for (const Term& x : f->atom.args) t.push_back(resolve(x));
        return model_.contains(f->atom.pred, t);
      }
      case FKind::Eq:
        return resolve(f->lhs) == resolve(f->rhs);
      case FKind::Not:
        return !eval(f->kids[0]);
      case FKind::And:
        for (const auto& k : f->kids)
          if (!eval(k)) return false;
        return true;
      case FKind::Or:
        for (const auto& k : f->kids)
          if (eval(k)) return true;
        return false;
      case FKind::Exists:
        return quant(f, 0, true);
      case FKind::Forall:
        return !quant(f, 0, false);
      case FKind::Bracket:
        throw Error("bracket query inside a first-order formula");
    }
    return false;
  }

 private:
  // Exists: is there an assignment making the body true. Forall: is there
  // one making it false.
  bool quant(const Formula& f, std::size_t i, bool want) {
    if (i == f->vars.size()) return eval(f->kids[0]) == want;
    for (Sym d : domain_) {
      env.emplace_back(f->vars[i], d);
      bool hit = quant(f, i + 1, want);
      env.pop_back();
      if (hit) return true;
    }
    return false;
  }

  const FactStore& model_;
  const std::vector<Sym>& domain_;
};

}  // namespace

bool eval_fo(const FactStore& model, const Formula& f, const Substitution& subst, const std::vector<Sym>& domain) {
  FoEval ev(model, domain);
  for (const auto& [k, v] : subst) ev.env.emplace_back(k, v);
  return ev.eval(f);
}

bool eval_fo(const State& model, const Formula& f, const Substitution& subst, const std::set<Sym>* domain) {
  FactStore store(model);
  std::set<Sym> adom = domain ? *domain : active_domain(model);
  std::vector<Sym> dom(adom.begin(), adom.end());
  return eval_fo(store, f, subst, dom);
}

// ---------------------------------------------------------------------------
// Rule evaluation

namespace {

struct ArgRef {
  int slot = -1;  // -1 for constants
  Sym value;
};

struct Generator {
  Sym pred;
  std::vector<ArgRef> args;
};

struct Filter {
  Formula f;
  std::vector<int> slots;
  std::vector<Sym> vars;
};

struct Step {
  enum class Kind { Gen, Enum, Bind } kind;
  int gen = -1;   // Gen
  int slot = -1;  // Enum / Bind target
  ArgRef from;    // Bind source
  bool delta = false;
  int lookup_col = -1;
  std::vector<int> filters;  // checked after this step
};

struct Plan {
  std::vector<Step> steps;
  std::vector<int> initial_filters;
};

struct CompiledRule {
  Sym head_pred;
  std::vector<ArgRef> head;
  std::vector<Sym> slot_names;
  std::vector<Generator> gens;
  std::vector<Filter> filters;
  std::vector<std::pair<ArgRef, ArgRef>> eqs;  // var = term conjuncts
  bool dead = false;
};

// Splits a body into conjunct lists: top-level disjunctions become separate
// rules and top-level existentials are opened with fresh names.
void flatten(const Formula& f, std::set<Sym>& used, std::vector<Formula>& out) {
  if (f->kind == FKind::And) {
    for (const auto& k : f->kids) flatten(k, used, out);
    return;
  }
  if (f->kind == FKind::Exists) {
    std::map<Sym, Term> ren;
    for (Sym v : f->vars) {
      if (used.count(v)) {
        Sym nv = fresh_var(used, v.str());
        used.insert(nv);
        ren[v] = Term::var(nv);
      } else {
        used.insert(v);
      }
    }
    flatten(ren.empty() ? f->kids[0] : substitute(f->kids[0], ren), used, out);
    return;
  }
  out.push_back(f);
}

std::vector<Formula> split_disjuncts(const Formula& body) {
  Formula f = body;
  if (f->kind != FKind::Or) return {f};
  return f->kids;
}

CompiledRule compile_rule(const Atom& head, const Formula& disjunct) {
  CompiledRule cr;
  cr.head_pred = head.pred;
  std::map<Sym, int> slot;
  auto slot_of = [&](Sym v) {
    auto [it, fresh] = slot.emplace(v, static_cast<int>(cr.slot_names.size()));
    if (fresh) cr.slot_names.push_back(v);
    return it->second;
  };
  auto ref = [&](const Term& t) {
    ArgRef r;
    if (t.is_var)
      r.slot = slot_of(t.name);
    else
      r.value = t.name;
    return r;
  };
  std::set<Sym> used;
  for (const Term& t : head.args)
    if (t.is_var) used.insert(t.name);
  for (Sym v : free_vars(disjunct)) used.insert(v);
  std::vector<Formula> conj;
  flatten(disjunct, used, conj);
  for (const Term& t : head.args) cr.head.push_back(ref(t));
  for (const Formula& c : conj) {
    if (c->kind == FKind::True) continue;
    if (c->kind == FKind::False) {
      cr.dead = true;
      continue;
    }
    if (c->kind == FKind::Atom) {
      Generator g;
      g.pred = c->atom.pred;
      for (const Term& t : c->atom.args) g.args.push_back(ref(t));
      cr.gens.push_back(std::move(g));
      continue;
    }
    if (c->kind == FKind::Eq && (c->lhs.is_var || c->rhs.is_var)) {
      cr.eqs.emplace_back(ref(c->lhs), ref(c->rhs));
      continue;
    }
    Filter fl;
    fl.f = c;
    for (Sym v : free_vars(c)) {
      fl.vars.push_back(v);
      fl.slots.push_back(slot_of(v));
    }
    cr.filters.push_back(std::move(fl));
  }
  return cr;
}

Plan make_plan(const CompiledRule& cr, int delta_gen) {
  Plan plan;
  std::vector<char> bound(cr.slot_names.size(), 0);
  std::vector<char> gen_done(cr.gens.size(), 0), eq_done(cr.eqs.size(), 0), filter_done(cr.filters.size(), 0);
  auto place_filters = [&](std::vector<int>& into) {
    for (std::size_t i = 0; i < cr.filters.size(); ++i) {
      if (filter_done[i]) continue;
      bool ok = std::all_of(cr.filters[i].slots.begin(), cr.filters[i].slots.end(), [&](int s) { return bound[s]; });
      if (ok) {
        filter_done[i] = 1;
        into.push_back(static_cast<int>(i));
      }
    }
  };
  auto is_bound = [&](const ArgRef& a) { return a.slot < 0 || bound[a.slot]; };
  place_filters(plan.initial_filters);
  while (true) {
    Step st{};
    bool have = false;
    // Equalities with one known side bind the other side for free.
    for (std::size_t i = 0; i < cr.eqs.size() && !have; ++i) {
      if (eq_done[i]) continue;
      auto [l, r] = cr.eqs[i];
      if (!is_bound(l) && !is_bound(r)) continue;
      eq_done[i] = 1;
      st.kind = Step::Kind::Bind;
      if (is_bound(l) && is_bound(r)) {
        st.slot = -2 - static_cast<int>(i);  // pure check of eq i
      } else {
        st.slot = is_bound(l) ? r.slot : l.slot;
        st.from = is_bound(l) ? l : r;
      }
      have = true;
    }
    if (!have) {
      int best = -1, best_score = -1;
      for (std::size_t i = 0; i < cr.gens.size(); ++i) {
        if (gen_done[i]) continue;
        int score = 0;
        for (const ArgRef& a : cr.gens[i].args) score += is_bound(a) ? 2 : 0;
        if (static_cast<int>(i) == delta_gen) score += 1000;
        if (score > best_score) {
          best_score = score;
          best = static_cast<int>(i);
        }
      }
      if (best >= 0) {
        gen_done[best] = 1;
        st.kind = Step::Kind::Gen;
        st.gen = best;
        st.delta = best == delta_gen;
        for (std::size_t c = 0; c < cr.gens[best].args.size(); ++c)
          if (is_bound(cr.gens[best].args[c])) {
            st.lookup_col = static_cast<int>(c);
            break;
          }
        have = true;
      }
    }
    if (!have) {
      for (std::size_t s = 0; s < bound.size(); ++s)
        if (!bound[s]) {
          st.kind = Step::Kind::Enum;
          st.slot = static_cast<int>(s);
          have = true;
          break;
        }
    }
    if (!have) {
      // Remaining equalities with two unbound sides cannot exist once every
      // slot is bound; nothing left to schedule.
      break;
    }
    if (st.kind == Step::Kind::Gen) {
      for (const ArgRef& a : cr.gens[st.gen].args)
        if (a.slot >= 0) bound[a.slot] = 1;
    } else if (st.slot >= 0) {
      bound[st.slot] = 1;
    }
    place_filters(st.filters);
    plan.steps.push_back(std::move(st));
  }
  return plan;
}

class RuleRunner {
 public:
  RuleRunner(const CompiledRule& cr, const Plan& plan, const FactStore& full, const FactStore* delta,
             const std::vector<Sym>& domain, std::vector<Tuple>& out)
      : cr_(cr), plan_(plan), full_(full), delta_(delta), domain_(domain), out_(out), env_(cr.slot_names.size()) {}

  void run() {
    if (cr_.dead) return;
    if (!filters_ok(plan_.initial_filters)) return;
    go(0);
  }

 private:
  Sym val(const ArgRef& a) const { return a.slot < 0 ? a.value : env_[a.slot]; }

  bool filters_ok(const std::vector<int>& ids) {
    for (int i : ids) {
      const Filter& fl = cr_.filters[i];
      Substitution s;
      for (std::size_t k = 0; k < fl.vars.size(); ++k) s[fl.vars[k]] = env_[fl.slots[k]];
      if (!eval_fo(full_, fl.f, s, domain_)) return false;
    }
    return true;
  }

  void emit() {
    Tuple t;
    t.reserve(cr_.head.size());
    for (const ArgRef& a : cr_.head) t.push_back(val(a));
    out_.push_back(std::move(t));
  }

  void go(std::size_t i) {
    if (i == plan_.steps.size()) {
      emit();
      return;
    }
    const Step& st = plan_.steps[i];
    switch (st.kind) {
      case Step::Kind::Enum:
        for (Sym d : domain_) {
          env_[st.slot] = d;
          if (filters_ok(st.filters)) go(i + 1);
        }
        env_[st.slot] = Sym();
        return;
      case Step::Kind::Bind: {
        if (st.slot <= -2) {
          auto [l, r] = cr_.eqs[-2 - st.slot];
          if (val(l) == val(r) && filters_ok(st.filters)) go(i + 1);
          return;
        }
        env_[st.slot] = val(st.from);
        if (filters_ok(st.filters)) go(i + 1);
        env_[st.slot] = Sym();
        return;
      }
      case Step::Kind::Gen: {
        const Generator& g = cr_.gens[st.gen];
        const FactStore& src = st.delta ? *delta_ : full_;
        const std::vector<Tuple>& rows = src.rows(g.pred);
        auto try_row = [&](const Tuple& row) {
          if (row.size() != g.args.size()) return;
          std::vector<int> set_here;
          bool ok = true;
          for (std::size_t c = 0; c < row.size() && ok; ++c) {
            const ArgRef& a = g.args[c];
            if (a.slot < 0) {
              ok = a.value == row[c];
            } else if (env_[a.slot].empty()) {
              env_[a.slot] = row[c];
              set_here.push_back(a.slot);
            } else {
              ok = env_[a.slot] == row[c];
            }
          }
          if (ok && filters_ok(st.filters)) go(i + 1);
          for (int s : set_here) env_[s] = Sym();
        };
        if (st.lookup_col >= 0) {
          Sym key = val(g.args[st.lookup_col]);
          // Copy indices: the lookup vector is stable while we only read.
          for (std::size_t r : src.lookup(g.pred, st.lookup_col, key)) try_row(rows[r]);
        } else {
          for (std::size_t r = 0; r < rows.size(); ++r) try_row(rows[r]);
        }
        return;
      }
    }
  }

  const CompiledRule& cr_;
  const Plan& plan_;
  const FactStore& full_;
  const FactStore* delta_;
  const std::vector<Sym>& domain_;
  std::vector<Tuple>& out_;
  std::vector<Sym> env_;
};

bool mentions(const Formula& f, const std::set<Sym>& preds) {
  bool hit = false;
  for_each_atom(f, [&](const Atom& a, bool) { hit |= preds.count(a.pred) != 0; });
  return hit;
}

}  // namespace

FactStore minimal_model_store(const Program& program, const State& state, const std::set<Sym>& objects) {
  stratify(program);
  FactStore store(state);
  std::set<Sym> dom = active_domain(state);
  for (Sym c : program.constants()) dom.insert(c);
  dom.insert(objects.begin(), objects.end());
  std::vector<Sym> domain(dom.begin(), dom.end());

  DepGraph g(program);
  auto comps = g.sccs();
  std::map<Sym, std::vector<const Rule*>> by_head;
  for (const Rule& r : program.rules()) by_head[r.head.pred].push_back(&r);

  for (const auto& comp : comps) {
    std::set<Sym> preds;
    for (int v : comp) preds.insert(g.nodes[v]);
    std::vector<CompiledRule> rules;
    for (Sym p : preds) {
      auto it = by_head.find(p);
      if (it == by_head.end()) continue;
      for (const Rule* r : it->second)
        for (const Formula& d : split_disjuncts(r->body)) rules.push_back(compile_rule(r->head, d));
    }
    if (rules.empty()) continue;
    bool recursive = comp.size() > 1;
    bool filters_recursive = false;
    for (const CompiledRule& cr : rules) {
      for (const Generator& gen : cr.gens) recursive |= preds.count(gen.pred) != 0;
      for (const Filter& fl : cr.filters) filters_recursive |= mentions(fl.f, preds);
    }
    recursive |= filters_recursive;

    auto run_all = [&](FactStore* sink_delta) {
      bool any = false;
      for (const CompiledRule& cr : rules) {
        Plan plan = make_plan(cr, -1);
        std::vector<Tuple> out;
        RuleRunner(cr, plan, store, nullptr, domain, out).run();
        for (const Tuple& t : out)
          if (store.insert(cr.head_pred, t)) {
            any = true;
            if (sink_delta) sink_delta->insert(cr.head_pred, t);
          }
      }
      return any;
    };

    if (!recursive) {
      run_all(nullptr);
      continue;
    }
    if (filters_recursive) {
      while (run_all(nullptr)) {
      }
      continue;
    }
    // Semi-naive iteration: each round joins at least one atom against the
    // facts that were new in the previous round.
    struct Variant {
      const CompiledRule* cr;
      Plan plan;
    };
    std::vector<Variant> variants;
    for (const CompiledRule& cr : rules)
      for (std::size_t k = 0; k < cr.gens.size(); ++k)
        if (preds.count(cr.gens[k].pred)) variants.push_back(Variant{&cr, make_plan(cr, static_cast<int>(k))});
    FactStore delta;
    run_all(&delta);
    while (delta.size() > 0) {
      FactStore next;
      for (const Variant& v : variants) {
        std::vector<Tuple> out;
        RuleRunner(*v.cr, v.plan, store, &delta, domain, out).run();
        for (const Tuple& t : out)
          if (store.insert(v.cr->head_pred, t)) next.insert(v.cr->head_pred, t);
      }
      delta = std::move(next);
    }
  }
  return store;
}

State minimal_model(const Program& program, const State& state, const std::set<Sym>& objects) {
  return minimal_model_store(program, state, objects).to_state();
}

}  // namespace cekab
