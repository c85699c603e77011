#include "cekab/formula.hpp"

#include <algorithm>

namespace cekab {

Ucq atomic_ucq(const Atom& atom) {
  Cq cq;
  for (const Term& t : atom.args)
    if (t.is_var && std::find(cq.free_vars.begin(), cq.free_vars.end(), t.name) == cq.free_vars.end())
      cq.free_vars.push_back(t.name);
  cq.atoms.push_back(atom);
  Ucq q;
  q.free_vars = cq.free_vars;
  q.disjuncts.push_back(std::move(cq));
  return q;
}

void validate(const Ucq& q) {
  if (q.disjuncts.empty()) throw Error("UCQ without disjuncts");
  for (const Cq& cq : q.disjuncts) {
    if (cq.free_vars != q.free_vars) throw Error("UCQ disjuncts disagree on free variables");
    std::set<Sym> free(cq.free_vars.begin(), cq.free_vars.end());
    std::set<Sym> ex(cq.exist_vars.begin(), cq.exist_vars.end());
    for (Sym v : ex)
      if (free.count(v)) throw Error("variable ?" + v.str() + " is both free and existential");
    for (const Atom& a : cq.atoms)
      for (const Term& t : a.args)
        if (t.is_var && !free.count(t.name) && !ex.count(t.name))
          throw Error("variable ?" + t.name.str() + " is not scoped in CQ");
  }
}

std::string canonical_string(const Ucq& q) {
  std::string out = "(";
  for (Sym v : q.free_vars) out += v.key() + " ";
  out += ")";
  std::vector<std::string> ds;
  for (const Cq& cq : q.disjuncts) {
    std::vector<std::string> as;
    for (const Atom& a : cq.atoms) as.push_back(to_lower(to_string(a)));
    std::sort(as.begin(), as.end());
    std::vector<std::string> ev;
    for (Sym v : cq.exist_vars) ev.push_back(v.key());
    std::sort(ev.begin(), ev.end());
    std::string d = "[";
    for (auto& v : ev) d += v + " ";
    d += ":";
    for (auto& a : as) d += a + ";";
    ds.push_back(d + "]");
  }
  std::sort(ds.begin(), ds.end());
  for (auto& d : ds) out += d;
  return out;
}

namespace {

Formula make(FNode n) { return std::make_shared<const FNode>(std::move(n)); }

}  // namespace

Formula f_true() {
  static const Formula t = make(FNode{FKind::True, {}, {}, {}, {}, {}, {}});
  return t;
}

Formula f_false() {
  static const Formula f = make(FNode{FKind::False, {}, {}, {}, {}, {}, {}});
  return f;
}

Formula f_atom(Atom a) {
  FNode n;
  n.kind = FKind::Atom;
  n.atom = std::move(a);
  return make(std::move(n));
}

Formula f_eq(Term a, Term b) {
  FNode n;
  n.kind = FKind::Eq;
  n.lhs = a;
  n.rhs = b;
  return make(std::move(n));
}

Formula f_neq(Term a, Term b) { return f_not(f_eq(a, b)); }

Formula f_not(Formula f) {
  FNode n;
  n.kind = FKind::Not;
  n.kids.push_back(std::move(f));
  return make(std::move(n));
}

Formula f_and(std::vector<Formula> fs) {
  std::vector<Formula> flat;
  for (auto& f : fs) {
    if (f->kind == FKind::True) continue;
    if (f->kind == FKind::False) return f_false();
    if (f->kind == FKind::And)
      flat.insert(flat.end(), f->kids.begin(), f->kids.end());
    else
      flat.push_back(std::move(f));
  }
  if (flat.empty()) return f_true();
  if (flat.size() == 1) return flat[0];
  FNode n;
  n.kind = FKind::And;
  n.kids = std::move(flat);
  return make(std::move(n));
}

Formula f_or(std::vector<Formula> fs) {
  std::vector<Formula> flat;
  for (auto& f : fs) {
    if (f->kind == FKind::False) continue;
    if (f->kind == FKind::True) return f_true();
    if (f->kind == FKind::Or)
      flat.insert(flat.end(), f->kids.begin(), f->kids.end());
    else
      flat.push_back(std::move(f));
  }
  if (flat.empty()) return f_false();
  if (flat.size() == 1) return flat[0];
  FNode n;
  n.kind = FKind::Or;
  n.kids = std::move(flat);
  return make(std::move(n));
}

static Formula quant(FKind k, std::vector<Sym> vars, Formula body) {
  if (vars.empty()) return body;
  FNode n;
  n.kind = k;
  n.vars = std::move(vars);
  n.kids.push_back(std::move(body));
  return make(std::move(n));
}

Formula f_exists(std::vector<Sym> vars, Formula body) { return quant(FKind::Exists, std::move(vars), std::move(body)); }

Formula f_forall(std::vector<Sym> vars, Formula body) { return quant(FKind::Forall, std::move(vars), std::move(body)); }

Formula f_bracket(Ucq q) {
  validate(q);
  // Free variables are ordered by first occurrence so that printing and
  // parsing agree on the tuple order.
  std::vector<Sym> order;
  for (const Cq& cq : q.disjuncts)
    for (const Atom& a : cq.atoms)
      for (const Term& t : a.args)
        if (t.is_var && std::find(q.free_vars.begin(), q.free_vars.end(), t.name) != q.free_vars.end() &&
            std::find(order.begin(), order.end(), t.name) == order.end())
          order.push_back(t.name);
  for (Sym v : q.free_vars)
    if (std::find(order.begin(), order.end(), v) == order.end()) order.push_back(v);
  q.free_vars = order;
  for (Cq& cq : q.disjuncts) cq.free_vars = order;
  FNode n;
  n.kind = FKind::Bracket;
  n.ucq = std::make_shared<const Ucq>(std::move(q));
  return make(std::move(n));
}

Formula f_bracket(const Atom& a) { return f_bracket(atomic_ucq(a)); }

bool equal(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case FKind::True:
    case FKind::False:
      return true;
    case FKind::Atom:
      return a->atom == b->atom;
    case FKind::Eq:
      return a->lhs == b->lhs && a->rhs == b->rhs;
    case FKind::Bracket:
      return *a->ucq == *b->ucq;
    default:
      break;
  }
  if (a->vars != b->vars || a->kids.size() != b->kids.size()) return false;
  for (std::size_t i = 0; i < a->kids.size(); ++i)
    if (!equal(a->kids[i], b->kids[i])) return false;
  return true;
}

static void collect_free(const Formula& f, std::set<Sym>& bound, std::set<Sym>& out) {
  auto term = [&](const Term& t) {
    if (t.is_var && !bound.count(t.name)) out.insert(t.name);
  };
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
      return;
    case FKind::Atom:
      for (const Term& t : f->atom.args) term(t);
      return;
    case FKind::Eq:
      term(f->lhs);
      term(f->rhs);
      return;
    case FKind::Bracket:
      for (Sym v : f->ucq->free_vars)
        if (!bound.count(v)) out.insert(v);
      return;
    case FKind::Exists:
    case FKind::Forall: {
      std::vector<Sym> added;
      for (Sym v : f->vars)
        if (bound.insert(v).second) added.push_back(v);
      collect_free(f->kids[0], bound, out);
      for (Sym v : added) bound.erase(v);
      return;
    }
    default:
      for (const auto& k : f->kids) collect_free(k, bound, out);
  }
}

std::set<Sym> free_vars(const Formula& f) {
  std::set<Sym> bound, out;
  collect_free(f, bound, out);
  return out;
}

void for_each_atom(const Formula& f, const std::function<void(const Atom&, bool)>& fn) {
  switch (f->kind) {
    case FKind::Atom:
      fn(f->atom, false);
      return;
    case FKind::Bracket:
      for (const Cq& cq : f->ucq->disjuncts)
        for (const Atom& a : cq.atoms) fn(a, true);
      return;
    default:
      for (const auto& k : f->kids) for_each_atom(k, fn);
  }
}

std::set<Sym> constants(const Formula& f) {
  std::set<Sym> out;
  for_each_atom(f, [&](const Atom& a, bool) {
    for (const Term& t : a.args)
      if (!t.is_var) out.insert(t.name);
  });
  std::function<void(const Formula&)> eqs = [&](const Formula& g) {
    if (g->kind == FKind::Eq) {
      if (!g->lhs.is_var) out.insert(g->lhs.name);
      if (!g->rhs.is_var) out.insert(g->rhs.name);
    }
    for (const auto& k : g->kids) eqs(k);
  };
  eqs(f);
  return out;
}

bool has_bracket(const Formula& f) {
  if (f->kind == FKind::Bracket) return true;
  return std::any_of(f->kids.begin(), f->kids.end(), [](const Formula& k) { return has_bracket(k); });
}

Sym fresh_var(const std::set<Sym>& used, std::string_view base) {
  Sym s(base);
  if (!used.count(s)) return s;
  for (int i = 1;; ++i) {
    Sym c(std::string(base) + "_" + std::to_string(i));
    if (!used.count(c)) return c;
  }
}

namespace {

Term subst_term(const Term& t, const std::map<Sym, Term>& m) {
  if (!t.is_var) return t;
  auto it = m.find(t.name);
  return it == m.end() ? t : it->second;
}

std::set<Sym> range_vars(const std::map<Sym, Term>& m) {
  std::set<Sym> out;
  for (const auto& [k, v] : m)
    if (v.is_var) out.insert(v.name);
  return out;
}

Ucq subst_ucq(const Ucq& q, const std::map<Sym, Term>& m) {
  std::map<Sym, Term> local;
  for (Sym v : q.free_vars) {
    auto it = m.find(v);
    if (it != m.end()) local.emplace(v, it->second);
  }
  if (local.empty()) return q;
  std::set<Sym> targets = range_vars(local);
  Ucq out;
  for (Sym v : q.free_vars) {
    Term t = subst_term(Term::var(v), local);
    if (t.is_var && std::find(out.free_vars.begin(), out.free_vars.end(), t.name) == out.free_vars.end())
      out.free_vars.push_back(t.name);
  }
  for (const Cq& cq : q.disjuncts) {
    std::map<Sym, Term> m2 = local;
    std::set<Sym> used = targets;
    for (const Atom& a : cq.atoms)
      for (const Term& t : a.args)
        if (t.is_var) used.insert(t.name);
    Cq c;
    c.free_vars = out.free_vars;
    for (Sym e : cq.exist_vars) {
      if (targets.count(e)) {
        Sym f = fresh_var(used, e.str());
        used.insert(f);
        m2[e] = Term::var(f);
        c.exist_vars.push_back(f);
      } else {
        m2.erase(e);
        c.exist_vars.push_back(e);
      }
    }
    for (const Atom& a : cq.atoms) {
      Atom b = a;
      for (Term& t : b.args) t = subst_term(t, m2);
      c.atoms.push_back(std::move(b));
    }
    out.disjuncts.push_back(std::move(c));
  }
  return out;
}

Formula subst_rec(const Formula& f, const std::map<Sym, Term>& m) {
  if (m.empty()) return f;
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
      return f;
    case FKind::Atom: {
      Atom a = f->atom;
      for (Term& t : a.args) t = subst_term(t, m);
      return f_atom(std::move(a));
    }
    case FKind::Eq:
      return f_eq(subst_term(f->lhs, m), subst_term(f->rhs, m));
    case FKind::Bracket:
      return f_bracket(subst_ucq(*f->ucq, m));
    case FKind::Not:
      return f_not(subst_rec(f->kids[0], m));
    case FKind::And:
    case FKind::Or: {
      std::vector<Formula> ks;
      for (const auto& k : f->kids) ks.push_back(subst_rec(k, m));
      return f->kind == FKind::And ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    case FKind::Exists:
    case FKind::Forall: {
      std::map<Sym, Term> inner = m;
      for (Sym v : f->vars) inner.erase(v);
      std::set<Sym> targets = range_vars(inner);
      std::set<Sym> used = targets;
      for (Sym v : free_vars(f->kids[0])) used.insert(v);
      std::vector<Sym> vars;
      for (Sym v : f->vars) {
        if (targets.count(v)) {
          Sym nv = fresh_var(used, v.str());
          used.insert(nv);
          inner[v] = Term::var(nv);
          vars.push_back(nv);
        } else {
          vars.push_back(v);
        }
      }
      Formula body = subst_rec(f->kids[0], inner);
      return f->kind == FKind::Exists ? f_exists(std::move(vars), body) : f_forall(std::move(vars), body);
    }
  }
  return f;
}

}  // namespace

Formula substitute(const Formula& f, const std::map<Sym, Term>& m) { return subst_rec(f, m); }

Formula substitute(const Formula& f, const Substitution& s) {
  std::map<Sym, Term> m;
  for (const auto& [k, v] : s) m.emplace(k, Term::cst(v));
  return subst_rec(f, m);
}

Formula rename_predicates(const Formula& f, const std::function<Sym(Sym)>& fn) {
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
    case FKind::Eq:
      return f;
    case FKind::Atom: {
      Atom a = f->atom;
      a.pred = fn(a.pred);
      return f_atom(std::move(a));
    }
    case FKind::Bracket: {
      Ucq q = *f->ucq;
      for (Cq& cq : q.disjuncts)
        for (Atom& a : cq.atoms) a.pred = fn(a.pred);
      return f_bracket(std::move(q));
    }
    case FKind::Not:
      return f_not(rename_predicates(f->kids[0], fn));
    case FKind::And:
    case FKind::Or: {
      std::vector<Formula> ks;
      for (const auto& k : f->kids) ks.push_back(rename_predicates(k, fn));
      return f->kind == FKind::And ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    case FKind::Exists:
      return f_exists(f->vars, rename_predicates(f->kids[0], fn));
    case FKind::Forall:
      return f_forall(f->vars, rename_predicates(f->kids[0], fn));
  }
  return f;
}

Formula map_brackets(const Formula& f, const std::function<Formula(const Ucq&)>& fn) {
  switch (f->kind) {
    case FKind::Bracket:
      return fn(*f->ucq);
    case FKind::Not:
      return f_not(map_brackets(f->kids[0], fn));
    case FKind::And:
    case FKind::Or: {
      std::vector<Formula> ks;
      for (const auto& k : f->kids) ks.push_back(map_brackets(k, fn));
      return f->kind == FKind::And ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    case FKind::Exists:
      return f_exists(f->vars, map_brackets(f->kids[0], fn));
    case FKind::Forall:
      return f_forall(f->vars, map_brackets(f->kids[0], fn));
    default:
      return f;
  }
}

static Formula nnf_rec(const Formula& f, bool neg) {
  switch (f->kind) {
    case FKind::True:
      return neg ? f_false() : f;
    case FKind::False:
      return neg ? f_true() : f;
    case FKind::Atom:
    case FKind::Eq:
    case FKind::Bracket:
      return neg ? f_not(f) : f;
    case FKind::Not:
      return nnf_rec(f->kids[0], !neg);
    case FKind::And:
    case FKind::Or: {
      std::vector<Formula> ks;
      for (const auto& k : f->kids) ks.push_back(nnf_rec(k, neg));
      bool conj = (f->kind == FKind::And) != neg;
      return conj ? f_and(std::move(ks)) : f_or(std::move(ks));
    }
    case FKind::Exists:
    case FKind::Forall: {
      Formula body = nnf_rec(f->kids[0], neg);
      bool ex = (f->kind == FKind::Exists) != neg;
      return ex ? f_exists(f->vars, body) : f_forall(f->vars, body);
    }
  }
  return f;
}

Formula nnf(const Formula& f) { return nnf_rec(f, false); }

bool is_literal(const Formula& f) {
  switch (f->kind) {
    case FKind::True:
    case FKind::False:
    case FKind::Atom:
    case FKind::Eq:
    case FKind::Bracket:
      return true;
    case FKind::Not: {
      FKind k = f->kids[0]->kind;
      return k == FKind::Atom || k == FKind::Eq || k == FKind::Bracket;
    }
    default:
      return false;
  }
}

namespace {

std::string atom_pddl(const Atom& a) {
  std::string out = "(" + a.pred.str();
  for (const Term& t : a.args) out += " " + to_string(t);
  return out + ")";
}

std::string vars_pddl(const std::vector<Sym>& vs) {
  std::string out = "(";
  for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? " ?" : "?") + vs[i].str();
  return out + ")";
}

std::string cq_pddl(const Cq& cq) {
  std::string body;
  if (cq.atoms.size() == 1) {
    body = atom_pddl(cq.atoms[0]);
  } else {
    body = "(and";
    for (const Atom& a : cq.atoms) body += " " + atom_pddl(a);
    body += ")";
  }
  if (cq.exist_vars.empty()) return body;
  return "(exists " + vars_pddl(cq.exist_vars) + " " + body + ")";
}

}  // namespace

std::string to_pddl(const Formula& f) {
  switch (f->kind) {
    case FKind::True:
      return "(and)";
    case FKind::False:
      return "(or)";
    case FKind::Atom:
      return atom_pddl(f->atom);
    case FKind::Eq:
      return "(= " + to_string(f->lhs) + " " + to_string(f->rhs) + ")";
    case FKind::Bracket: {
      const Ucq& q = *f->ucq;
      if (q.disjuncts.size() == 1) return "(know " + cq_pddl(q.disjuncts[0]) + ")";
      std::string out = "(know (or";
      for (const Cq& cq : q.disjuncts) out += " " + cq_pddl(cq);
      return out + "))";
    }
    case FKind::Not:
      return "(not " + to_pddl(f->kids[0]) + ")";
    case FKind::And:
    case FKind::Or: {
      std::string out = f->kind == FKind::And ? "(and" : "(or";
      for (const auto& k : f->kids) out += " " + to_pddl(k);
      return out + ")";
    }
    case FKind::Exists:
    case FKind::Forall:
      return std::string(f->kind == FKind::Exists ? "(exists " : "(forall ") + vars_pddl(f->vars) + " " +
             to_pddl(f->kids[0]) + ")";
  }
  return "";
}

}  // namespace cekab
