#include "cekab/queries.hpp"

#include <algorithm>
#include <cstdio>
#include <functional>
#include <map>
#include <optional>

namespace cekab {

Sym bot_predicate() { return Sym("P_bot"); }

bool is_atomic(const Ucq& q) {
  return q.disjuncts.size() == 1 && q.disjuncts[0].atoms.size() == 1 && q.disjuncts[0].exist_vars.empty();
}

namespace {

enum class AtomKind { Concept, Role, Opaque };

AtomKind kind_of(const Tbox& t, const Atom& a) {
  if (a.arity() == 1 && t.is_concept(a.pred)) return AtomKind::Concept;
  if (a.arity() == 2 && t.is_role(a.pred)) return AtomKind::Role;
  return AtomKind::Opaque;
}

void check_arity(const Tbox& t, const Atom& a) {
  int ar = t.signature().arity(a.pred);
  if (ar >= 0 && ar != static_cast<int>(a.arity()))
    throw SignatureMismatch("query atom " + to_string(a) + " does not match the TBox arity of " + a.pred.str());
}

Atom role_pattern(const BasicRole& q, const Term& s, const Term& t) {
  return q.inverted ? Atom(q.base, {t, s}) : Atom(q.base, {s, t});
}

Atom concept_pattern(const BasicConcept& b, const Term& t, const Term& fresh) {
  if (b.is_named()) return Atom(b.name, {t});
  return role_pattern(b.role, t, fresh);
}

// ---------------------------------------------------------------------------
// Per-predicate programs for atomic queries

class AtomicPrograms {
 public:
  AtomicPrograms(const Tbox& t, const std::string& prefix, Program& out) : t_(t), prefix_(prefix), out_(out) {}

  Sym name(Sym pred) const { return Sym(prefix_ + pred.str()); }

  Sym require(Sym pred, std::size_t arity) {
    if (!done_.insert(pred).second) return name(pred);
    if (arity == 1 && t_.is_concept(pred))
      concept_rules(pred);
    else if (arity == 2 && t_.is_role(pred))
      role_rules(pred);
    else
      opaque_rules(pred, arity);
    return name(pred);
  }

 private:
  void concept_rules(Sym a) {
    const ClosureIndex& cl = t_.closure();
    Term x = Term::var("x"), z = Term::var("z");
    Atom head(name(a), {x});
    out_.add(Rule{head, f_atom(Atom(a, {x}))});
    for (const BasicConcept& b : cl.concept_subs(BasicConcept::named(a)))
      out_.add(Rule{head, f_atom(concept_pattern(b, x, z))});
    for (const TboxAxiom& ax : t_.axioms()) {
      if (ax.kind != TboxAxiom::Kind::ConceptIncl || ax.negated_rhs || ax.lhs_c.is_named()) continue;
      if (!(ax.rhs_c == BasicConcept::named(a))) continue;
      const BasicRole& r = ax.lhs_c.role;
      Sym pr = require(r.base, 2);
      out_.add(Rule{head, f_atom(r.inverted ? Atom(pr, {z, x}) : Atom(pr, {x, z}))});
    }
  }

  void role_rules(Sym p) {
    const ClosureIndex& cl = t_.closure();
    Term x = Term::var("x"), y = Term::var("y");
    Atom head(name(p), {x, y});
    out_.add(Rule{head, f_atom(Atom(p, {x, y}))});
    for (const BasicRole& q : cl.role_subs(BasicRole{p, false})) out_.add(Rule{head, f_atom(role_pattern(q, x, y))});
  }

  void opaque_rules(Sym p, std::size_t arity) {
    std::vector<Term> args;
    if (arity == 1) args = {Term::var("x")};
    if (arity == 2) args = {Term::var("x"), Term::var("y")};
    if (arity > 2)
      for (std::size_t i = 1; i <= arity; ++i) args.push_back(Term::var("x" + std::to_string(i)));
    out_.add(Rule{Atom(name(p), args), f_atom(Atom(p, args))});
  }

  const Tbox& t_;
  std::string prefix_;
  Program& out_;
  std::set<Sym> done_;
};

// ---------------------------------------------------------------------------
// Backward chaining with reduction

bool is_internal(Sym v) { return !v.str().empty() && v.str()[0] == '#'; }

std::string term_key(const Term& t, const std::set<Sym>& distinguished, bool mask) {
  if (!t.is_var) return "c:" + t.name.str();
  if (distinguished.count(t.name)) return "?" + t.name.str();
  return mask ? std::string("*") : "#" + t.name.str();
}

std::string atom_key(const Atom& a, const std::set<Sym>& dist, bool mask) {
  std::string k = a.pred.key() + "(";
  for (const Term& t : a.args) k += term_key(t, dist, mask) + ",";
  return k + ")";
}

std::set<Sym> distinguished(const RewrittenCq& q) {
  std::set<Sym> d;
  for (const Term& t : q.head)
    if (t.is_var) d.insert(t.name);
  return d;
}

// Renames existential variables to #e0, #e1, ... in a deterministic order
// and returns the resulting key.
std::string canonicalize(RewrittenCq& q) {
  std::set<Sym> dist = distinguished(q);
  for (int round = 0; round < 3; ++round) {
    std::stable_sort(q.atoms.begin(), q.atoms.end(), [&](const Atom& a, const Atom& b) {
      std::string ka = atom_key(a, dist, round == 0), kb = atom_key(b, dist, round == 0);
      return ka < kb;
    });
    std::map<Sym, Sym> ren;
    for (const Atom& a : q.atoms)
      for (const Term& t : a.args)
        if (t.is_var && !dist.count(t.name) && !ren.count(t.name))
          ren[t.name] = Sym("#e" + std::to_string(ren.size()));
    for (Atom& a : q.atoms)
      for (Term& t : a.args)
        if (t.is_var && ren.count(t.name)) t.name = ren[t.name];
  }
  std::sort(q.atoms.begin(), q.atoms.end(),
            [&](const Atom& a, const Atom& b) { return atom_key(a, dist, false) < atom_key(b, dist, false); });
  q.atoms.erase(std::unique(q.atoms.begin(), q.atoms.end()), q.atoms.end());
  std::string key;
  for (const Term& t : q.head) key += term_key(t, dist, false) + ";";
  key += "|";
  for (const Atom& a : q.atoms) key += atom_key(a, dist, false);
  return key;
}

bool unbound_at(const RewrittenCq& q, const Term& t) {
  if (!t.is_var) return false;
  for (const Term& h : q.head)
    if (h.is_var && h.name == t.name) return false;
  int n = 0;
  for (const Atom& a : q.atoms)
    for (const Term& u : a.args)
      if (u.is_var && u.name == t.name) ++n;
  return n == 1;
}

std::vector<Atom> rewrite_atom(const Tbox& t, const RewrittenCq& q, const Atom& g) {
  std::vector<Atom> out;
  Term fresh = Term::var("#n");
  AtomKind k = kind_of(t, g);
  if (k == AtomKind::Opaque) return out;
  for (const TboxAxiom& ax : t.axioms()) {
    if (!ax.positive()) continue;
    if (k == AtomKind::Concept) {
      if (ax.kind == TboxAxiom::Kind::ConceptIncl && ax.rhs_c == BasicConcept::named(g.pred))
        out.push_back(concept_pattern(ax.lhs_c, g.args[0], fresh));
      continue;
    }
    if (ax.kind == TboxAxiom::Kind::RoleIncl && ax.rhs_r.base == g.pred) {
      // g = rhs(s, t) read through the orientation of rhs.
      const Term& s = ax.rhs_r.inverted ? g.args[1] : g.args[0];
      const Term& u = ax.rhs_r.inverted ? g.args[0] : g.args[1];
      out.push_back(role_pattern(ax.lhs_r, s, u));
    }
    if (ax.kind == TboxAxiom::Kind::ConceptIncl && !ax.rhs_c.is_named() && ax.rhs_c.role.base == g.pred) {
      const BasicRole& r = ax.rhs_c.role;
      const Term& keep = r.inverted ? g.args[1] : g.args[0];
      const Term& drop = r.inverted ? g.args[0] : g.args[1];
      if (unbound_at(q, drop)) out.push_back(concept_pattern(ax.lhs_c, keep, fresh));
    }
  }
  return out;
}

std::optional<RewrittenCq> reduce(const RewrittenCq& q, std::size_t i, std::size_t j) {
  const Atom& a = q.atoms[i];
  const Atom& b = q.atoms[j];
  if (a.pred != b.pred || a.arity() != b.arity()) return std::nullopt;
  std::set<Sym> dist = distinguished(q);
  std::map<Sym, Term> bind;
  auto resolve = [&](Term t) {
    while (t.is_var) {
      auto it = bind.find(t.name);
      if (it == bind.end()) break;
      t = it->second;
    }
    return t;
  };
  for (std::size_t k = 0; k < a.arity(); ++k) {
    Term x = resolve(a.args[k]), y = resolve(b.args[k]);
    if (x == y) continue;
    if (!x.is_var && !y.is_var) return std::nullopt;
    if (!x.is_var) std::swap(x, y);
    // x is a variable; keep distinguished variables and constants as
    // representatives.
    if (y.is_var && dist.count(x.name) && !dist.count(y.name)) std::swap(x, y);
    bind[x.name] = y;
  }
  RewrittenCq r;
  for (const Term& t : q.head) r.head.push_back(resolve(t));
  for (std::size_t k = 0; k < q.atoms.size(); ++k) {
    if (k == j) continue;
    Atom c = q.atoms[k];
    for (Term& t : c.args) t = resolve(t);
    r.atoms.push_back(std::move(c));
  }
  return r;
}

std::string hash_name(const Ucq& q) {
  std::uint32_t h = 2166136261u;
  for (char c : canonical_string(q)) h = (h ^ static_cast<unsigned char>(c)) * 16777619u;
  char buf[16];
  std::snprintf(buf, sizeof buf, "%08x", h);
  return buf;
}

}  // namespace

std::vector<RewrittenCq> perfect_ref(const Tbox& tbox, const Ucq& q) {
  std::vector<RewrittenCq> result;
  std::set<std::string> seen;
  std::vector<RewrittenCq> work;
  auto push = [&](RewrittenCq c) {
    std::string k = canonicalize(c);
    if (seen.insert(k).second) work.push_back(std::move(c));
  };
  for (const Cq& cq : q.disjuncts) {
    RewrittenCq c;
    for (Sym v : q.free_vars) c.head.push_back(Term::var(v));
    c.atoms = cq.atoms;
    for (const Atom& a : c.atoms) check_arity(tbox, a);
    push(std::move(c));
  }
  while (!work.empty()) {
    RewrittenCq c = std::move(work.back());
    work.pop_back();
    for (std::size_t i = 0; i < c.atoms.size(); ++i) {
      for (const Atom& ng : rewrite_atom(tbox, c, c.atoms[i])) {
        RewrittenCq d = c;
        d.atoms[i] = ng;
        push(std::move(d));
      }
      for (std::size_t j = i + 1; j < c.atoms.size(); ++j)
        if (auto d = reduce(c, i, j)) push(std::move(*d));
    }
    result.push_back(std::move(c));
  }
  std::sort(result.begin(), result.end(), [](RewrittenCq& a, RewrittenCq& b) {
    return canonicalize(a) < canonicalize(b);
  });
  return result;
}

Rewriting rewrite_ucq(const Tbox& tbox, const Ucq& q, const std::string& prefix) {
  validate(q);
  Rewriting rw;
  if (is_atomic(q)) {
    const Atom& a = q.disjuncts[0].atoms[0];
    check_arity(tbox, a);
    AtomicPrograms ap(tbox, prefix, rw.program);
    rw.query_predicate = ap.require(a.pred, a.arity());
    rw.query_atom = Atom(rw.query_predicate, a.args);
    return rw;
  }
  rw.query_predicate = Sym(prefix + "q_" + hash_name(q));
  std::vector<Term> head;
  for (Sym v : q.free_vars) head.push_back(Term::var(v));
  rw.query_atom = Atom(rw.query_predicate, head);
  std::set<Sym> used(q.free_vars.begin(), q.free_vars.end());
  for (RewrittenCq& c : perfect_ref(tbox, q)) {
    std::map<Sym, Sym> ren;
    std::set<Sym> local = used;
    for (Atom& a : c.atoms)
      for (Term& t : a.args) {
        if (!t.is_var || !is_internal(t.name)) continue;
        auto it = ren.find(t.name);
        if (it == ren.end()) {
          Sym nv = fresh_var(local, "y");
          local.insert(nv);
          it = ren.emplace(t.name, nv).first;
        }
        t.name = it->second;
      }
    std::vector<Formula> body;
    for (const Atom& a : c.atoms) body.push_back(f_atom(a));
    for (std::size_t i = 0; i < head.size(); ++i) {
      Term hi = c.head[i];
      if (hi.is_var && ren.count(hi.name)) hi.name = ren[hi.name];
      if (!(hi == head[i])) body.push_back(f_eq(head[i], hi));
    }
    rw.program.add(Rule{Atom(rw.query_predicate, head), f_and(std::move(body))});
  }
  return rw;
}

Rewriting bot_rewriting(const Tbox& tbox, const std::string& prefix) {
  Rewriting rw;
  rw.query_predicate = Sym(prefix + "bot");
  rw.query_atom = Atom(rw.query_predicate, {});
  const ClosureIndex& cl = tbox.closure();
  AtomicPrograms ap(tbox, prefix, rw.program);
  Program bot;
  std::set<std::string> seen;
  Atom head = rw.query_atom;
  Term x = Term::var("x"), y = Term::var("y"), z = Term::var("z");
  auto emit = [&](std::vector<Atom> atoms, std::vector<Atom> swapped) {
    auto key = [](std::vector<Atom> v) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
      std::string k;
      for (const Atom& a : v) k += to_string(a) + ";";
      return k;
    };
    std::string k = key(atoms);
    if (seen.count(k)) return;
    seen.insert(k);
    if (!swapped.empty()) seen.insert(key(swapped));
    std::vector<Formula> body;
    for (std::size_t i = 0; i < atoms.size(); ++i)
      if (std::find(atoms.begin(), atoms.begin() + i, atoms[i]) == atoms.begin() + i) body.push_back(f_atom(atoms[i]));
    bot.add(Rule{head, f_and(std::move(body))});
  };
  auto operand = [&](const BasicConcept& b, const Term& fresh) {
    if (b.is_named()) return Atom(ap.require(b.name, 1), {x});
    return role_pattern(b.role, x, fresh);
  };
  for (int a = 0; a < cl.num_concepts(); ++a)
    for (int b = a; b < cl.num_concepts(); ++b) {
      if (!cl.concept_disj(a, b)) continue;
      const BasicConcept& ca = cl.concept_at(a);
      const BasicConcept& cb = cl.concept_at(b);
      emit({operand(ca, y), operand(cb, a == b ? y : z)}, {});
    }
  for (int a = 0; a < cl.num_roles(); ++a)
    for (int b = a; b < cl.num_roles(); ++b) {
      if (!cl.role_disj(a, b)) continue;
      auto op = [&](const BasicRole& q, const Term& s, const Term& t) {
        Sym p = ap.require(q.base, 2);
        return q.inverted ? Atom(p, {t, s}) : Atom(p, {s, t});
      };
      const BasicRole& qa = cl.role_at(a);
      const BasicRole& qb = cl.role_at(b);
      emit({op(qa, x, y), op(qb, x, y)}, {op(qa, y, x), op(qb, y, x)});
    }
  for (const BasicRole& q : cl.functional_roles()) {
    Atom p1 = q.inverted ? Atom(q.base, {y, x}) : Atom(q.base, {x, y});
    Atom p2 = q.inverted ? Atom(q.base, {z, x}) : Atom(q.base, {x, z});
    bot.add(Rule{head, f_and({f_atom(p1), f_atom(p2), f_neq(y, z)})});
  }
  Program all = bot;
  all.append(rw.program);
  rw.program = std::move(all);
  return rw;
}

EcqRewriting rewrite_ecq(const Tbox& tbox, const Formula& ecq, const std::string& prefix) {
  EcqRewriting out;
  AtomicPrograms ap(tbox, prefix, out.program);
  out.formula = map_brackets(ecq, [&](const Ucq& q) {
    if (is_atomic(q)) {
      const Atom& a = q.disjuncts[0].atoms[0];
      check_arity(tbox, a);
      return f_atom(Atom(ap.require(a.pred, a.arity()), a.args));
    }
    Rewriting rw = rewrite_ucq(tbox, q, prefix);
    out.program.append(rw.program);
    return f_atom(rw.query_atom);
  });
  return out;
}

// ---------------------------------------------------------------------------
// Certain answers by homomorphism into the unfolded canonical model

struct CertainAnswers::Impl {
  // A named individual followed by a path of generating roles, or, when `c`
  // is empty, a detached anonymous element of type `root` followed by a path.
  struct Elem {
    Sym c;
    int root = -1;
    std::vector<int> path;
    friend bool operator==(const Elem&, const Elem&) = default;
  };

  const CertainAnswers& ca;
  std::vector<Atom> atoms;
  std::map<Sym, int> var_index;
  std::vector<std::optional<Elem>> val;
  std::vector<char> done;
  std::vector<Sym> individuals;

  explicit Impl(const CertainAnswers& c) : ca(c) {
    std::set<Sym> ind = active_domain(ca.sat_.roles);
    for (const auto& [k, v] : ca.sat_.member) ind.insert(k);
    for (Sym s : active_domain(ca.sat_.other)) ind.insert(s);
    individuals.assign(ind.begin(), ind.end());
  }

  int type_role(const Elem& e) const {
    if (!e.path.empty()) return e.path.back();
    return e.c.empty() ? e.root : -1;
  }

  int inv_exists(int r) const { return ca.cl_.concept_id(BasicConcept::exists(ca.cl_.role_at(r).inverse())); }

  bool has_concept(const Elem& e, int cid) const {
    int r = type_role(e);
    if (r >= 0) return ca.cl_.concept_sub(inv_exists(r), cid);
    auto it = ca.sat_.member.find(e.c);
    return it != ca.sat_.member.end() && it->second[cid];
  }

  std::vector<Elem> children(const Elem& e) const {
    std::vector<Elem> out;
    for (int r = 0; r < ca.cl_.num_roles(); ++r) {
      int ex = ca.cl_.concept_id(BasicConcept::exists(ca.cl_.role_at(r)));
      if (!has_concept(e, ex)) continue;
      Elem ch = e;
      ch.path.push_back(r);
      out.push_back(std::move(ch));
    }
    return out;
  }

  // e2 is a child of e1; returns the generating role or -1.
  static int child_role(const Elem& e1, const Elem& e2) {
    if (e1.c != e2.c || e1.root != e2.root || e2.path.size() != e1.path.size() + 1) return -1;
    if (!std::equal(e1.path.begin(), e1.path.end(), e2.path.begin())) return -1;
    return e2.path.back();
  }

  static bool is_const(const Elem& e) { return !e.c.empty() && e.path.empty(); }

  bool check(const Atom& a, const std::vector<Elem>& args) const {
    AtomKind k = kind_of(ca.tbox_, a);
    if (k == AtomKind::Concept)
      return has_concept(args[0], ca.cl_.concept_id(BasicConcept::named(a.pred)));
    if (k == AtomKind::Role) {
      const Elem& s = args[0];
      const Elem& t = args[1];
      int pid = ca.cl_.role_id(BasicRole{a.pred, false});
      if (is_const(s) && is_const(t)) return ca.sat_.roles.count(fact(a.pred, {s.c, t.c})) != 0;
      if (int r = child_role(s, t); r >= 0) return ca.cl_.role_sub(r, pid);
      if (int r = child_role(t, s); r >= 0) return ca.cl_.role_sub(r, pid ^ 1);
      return false;
    }
    std::vector<Sym> cs;
    for (const Elem& e : args) {
      if (!is_const(e)) return false;
      cs.push_back(e.c);
    }
    return ca.sat_.other.count(fact(a.pred, cs)) != 0;
  }

  std::optional<Elem> term_value(const Term& t) const {
    if (!t.is_var) return Elem{t.name, -1, {}};
    return val[var_index.at(t.name)];
  }

  std::vector<int> component(int v) const {
    std::set<int> comp{v};
    bool grew = true;
    while (grew) {
      grew = false;
      for (const Atom& a : atoms) {
        bool touches = false;
        for (const Term& t : a.args)
          if (t.is_var && comp.count(var_index.at(t.name))) touches = true;
        if (!touches) continue;
        for (const Term& t : a.args)
          if (t.is_var) grew |= comp.insert(var_index.at(t.name)).second;
      }
    }
    return {comp.begin(), comp.end()};
  }

  bool assign_and_go(int v, const Elem& e) {
    val[v] = e;
    bool ok = search();
    val[v].reset();
    return ok;
  }

  bool search() {
    int best = -1, best_known = -1;
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      if (done[i]) continue;
      int known = 0;
      for (const Term& t : atoms[i].args) known += term_value(t) ? 1 : 0;
      if (known > best_known) {
        best_known = known;
        best = static_cast<int>(i);
      }
    }
    if (best < 0) return true;
    const Atom& a = atoms[best];
    if (best_known == static_cast<int>(a.arity())) {
      std::vector<Elem> args;
      for (const Term& t : a.args) args.push_back(*term_value(t));
      if (!check(a, args)) return false;
      done[best] = 1;
      bool ok = search();
      done[best] = 0;
      return ok;
    }
    int free_var = -1;
    for (const Term& t : a.args)
      if (!term_value(t)) {
        free_var = var_index.at(t.name);
        break;
      }
    if (best_known == 0) {
      // A fresh component: some variable maps to an individual, or the
      // image is anonymous and has a topmost element of some reachable type.
      std::vector<int> comp = component(free_var);
      for (int v : comp)
        for (Sym c : individuals)
          if (assign_and_go(v, Elem{c, -1, {}})) return true;
      for (int v : comp)
        for (int r : ca.reachable_)
          if (assign_and_go(v, Elem{Sym(), r, {}})) return true;
      return false;
    }
    // Extend from a known neighbour.
    std::vector<Elem> cands;
    AtomKind k = kind_of(ca.tbox_, a);
    if (k == AtomKind::Role) {
      for (const Term& t : a.args) {
        auto e = term_value(t);
        if (!e) continue;
        if (is_const(*e)) {
          for (const Atom& f : ca.sat_.roles) {
            if (f.pred != a.pred) continue;
            if (f.args[0].name == e->c) cands.push_back(Elem{f.args[1].name, -1, {}});
            if (f.args[1].name == e->c) cands.push_back(Elem{f.args[0].name, -1, {}});
          }
        }
        if (!e->path.empty()) {
          Elem p = *e;
          p.path.pop_back();
          cands.push_back(p);
        }
        for (Elem& ch : children(*e)) cands.push_back(std::move(ch));
        break;
      }
    } else {
      for (Sym c : individuals) cands.push_back(Elem{c, -1, {}});
    }
    for (const Elem& e : cands)
      if (assign_and_go(free_var, e)) return true;
    return false;
  }
};

CertainAnswers::CertainAnswers(const Tbox& tbox, const State& state)
    : tbox_(tbox), cl_(tbox.closure()), sat_(saturate_abox(tbox, state)) {
  std::vector<char> seen(cl_.num_roles(), 0);
  std::vector<int> queue;
  auto mark = [&](int r) {
    if (!seen[r]) {
      seen[r] = 1;
      queue.push_back(r);
    }
  };
  for (const auto& [ind, v] : sat_.member)
    for (int r = 0; r < cl_.num_roles(); ++r)
      if (v[cl_.concept_id(BasicConcept::exists(cl_.role_at(r)))]) mark(r);
  for (std::size_t i = 0; i < queue.size(); ++i) {
    int q = queue[i];
    int from = cl_.concept_id(BasicConcept::exists(cl_.role_at(q).inverse()));
    for (int r = 0; r < cl_.num_roles(); ++r)
      if (cl_.concept_sub(from, cl_.concept_id(BasicConcept::exists(cl_.role_at(r))))) mark(r);
  }
  reachable_ = queue;
  std::sort(reachable_.begin(), reachable_.end());
}

bool CertainAnswers::holds(const Cq& q, const Substitution& subst) const {
  if (!sat_.consistent) return true;
  Impl im(*this);
  for (const Atom& a : q.atoms) {
    Atom g = a;
    for (Term& t : g.args) {
      if (!t.is_var) continue;
      bool exist = std::find(q.exist_vars.begin(), q.exist_vars.end(), t.name) != q.exist_vars.end();
      if (exist) continue;
      auto it = subst.find(t.name);
      if (it == subst.end()) throw UnboundVariable("unbound variable ?" + t.name.str() + " in query");
      t = Term::cst(it->second);
    }
    im.atoms.push_back(std::move(g));
  }
  for (const Atom& a : im.atoms)
    for (const Term& t : a.args)
      if (t.is_var && !im.var_index.count(t.name)) {
        int n = static_cast<int>(im.var_index.size());
        im.var_index[t.name] = n;
      }
  im.val.assign(im.var_index.size(), std::nullopt);
  im.done.assign(im.atoms.size(), 0);
  return im.search();
}

bool CertainAnswers::holds(const Ucq& q, const Substitution& subst) const {
  if (!sat_.consistent) return true;
  for (const Cq& cq : q.disjuncts)
    if (holds(cq, subst)) return true;
  return false;
}

// ---------------------------------------------------------------------------
// Direct ECQ evaluation

namespace {

class EcqEval {
 public:
  EcqEval(const State& s, const std::vector<Sym>& dom, const std::function<const CertainAnswers&()>& ca)
      : state_(s), domain_(dom), ca_(ca) {}

  std::vector<std::pair<Sym, Sym>> env;

  bool eval(const Formula& f) {
    switch (f->kind) {
      case FKind::True:
        return true;
      case FKind::False:
        return false;
      case FKind::Atom: {
        Atom g = f->atom;
        for (Term& t : g.args) t = Term::cst(resolve(t));
        return state_.count(g) != 0;
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
      case FKind::Bracket: {
        Substitution s;
        for (Sym v : f->ucq->free_vars) s[v] = resolve(Term::var(v));
        return ca_().holds(*f->ucq, s);
      }
    }
    return false;
  }

 private:
  Sym resolve(const Term& t) const {
    if (!t.is_var) return t.name;
    for (auto it = env.rbegin(); it != env.rend(); ++it)
      if (it->first == t.name) return it->second;
    throw UnboundVariable("unbound variable ?" + t.name.str());
  }

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

  const State& state_;
  const std::vector<Sym>& domain_;
  const std::function<const CertainAnswers&()>& ca_;
};

}  // namespace

EcqEvaluator::EcqEvaluator(const State& state, const Tbox& tbox, const std::set<Sym>* domain)
    : state_(state), tbox_(tbox) {
  std::set<Sym> d = domain ? *domain : active_domain(state);
  domain_.assign(d.begin(), d.end());
}

EcqEvaluator::~EcqEvaluator() = default;

bool EcqEvaluator::holds(const Formula& ecq, const Substitution& subst) const {
  std::function<const CertainAnswers&()> ca = [this]() -> const CertainAnswers& {
    if (!ca_) ca_ = std::make_unique<CertainAnswers>(tbox_, state_);
    return *ca_;
  };
  EcqEval ev(state_, domain_, ca);
  for (const auto& [k, v] : subst) ev.env.emplace_back(k, v);
  return ev.eval(ecq);
}

bool EcqEvaluator::consistent() const {
  if (!ca_) ca_ = std::make_unique<CertainAnswers>(tbox_, state_);
  return ca_->consistent();
}

bool eval_ecq(const State& state, const Tbox& tbox, const Formula& ecq, const Substitution& subst,
              const std::set<Sym>* domain) {
  return EcqEvaluator(state, tbox, domain).holds(ecq, subst);
}

}  // namespace cekab
