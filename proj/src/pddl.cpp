#include "cekab/pddl.hpp"

#include <algorithm>
#include <functional>
#include <map>

#include "cekab/sexpr.hpp"

namespace cekab {

const std::vector<std::string>& printed_requirements() {
  static const std::vector<std::string> reqs{":adl", ":derived-predicates", ":equality", ":negative-preconditions",
                                             ":conditional-effects"};
  return reqs;
}

namespace {

const std::set<std::string> kAccepted{":strips",
                                      ":adl",
                                      ":derived-predicates",
                                      ":equality",
                                      ":negative-preconditions",
                                      ":disjunctive-preconditions",
                                      ":existential-preconditions",
                                      ":universal-preconditions",
                                      ":quantified-preconditions",
                                      ":conditional-effects"};

[[noreturn]] void fail(const SExpr& at, const std::string& expected, const std::string& found = {}) {
  throw ParseError(at.line, at.col, expected, found.empty() ? to_string(at) : found);
}

// Predicate arities visible while reading conditions; null accepts anything.
struct Scope {
  const std::map<Sym, int>* arity = nullptr;
};

Term read_term(const SExpr& e) {
  if (!e.is_symbol()) fail(e, "term");
  if (e.text[0] == '?') {
    if (e.text.size() == 1) fail(e, "variable name");
    return Term::var(Sym(e.text.substr(1)));
  }
  return Term::cst(Sym(e.text));
}

std::vector<Sym> read_vars(const SExpr& e) {
  if (!e.list) fail(e, "variable list");
  std::vector<Sym> out;
  for (const SExpr& v : e.items) {
    if (v.is("-")) fail(v, "untyped variable list", "-");
    Term t = read_term(v);
    if (!t.is_var) fail(v, "variable");
    out.push_back(t.name);
  }
  return out;
}

Atom read_atom(const SExpr& e, const Scope& sc) {
  if (!e.list || e.items.empty() || !e.items[0].is_symbol()) fail(e, "atom");
  const SExpr& head = e.items[0];
  if (head.text[0] == '?' || head.text[0] == ':') fail(head, "predicate name");
  Atom a;
  a.pred = Sym(head.text);
  for (std::size_t i = 1; i < e.items.size(); ++i) a.args.push_back(read_term(e.items[i]));
  if (sc.arity) {
    auto it = sc.arity->find(a.pred);
    if (it == sc.arity->end()) fail(head, "declared predicate", head.text);
    if (it->second != static_cast<int>(a.arity()))
      fail(e, std::to_string(it->second) + " arguments for " + head.text);
  }
  return a;
}

void read_cq(const SExpr& e, const Scope& sc, Cq& cq) {
  if (e.head_is("exists")) {
    if (e.items.size() != 3) fail(e, "(exists (vars) query)");
    for (Sym v : read_vars(e.items[1])) cq.exist_vars.push_back(v);
    read_cq(e.items[2], sc, cq);
  } else if (e.head_is("and")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) read_cq(e.items[i], sc, cq);
  } else {
    if (e.head_is("not") || e.head_is("or") || e.head_is("forall") || e.head_is("=") || e.head_is("know"))
      fail(e, "conjunctive query");
    cq.atoms.push_back(read_atom(e, sc));
  }
}

Ucq read_ucq(const SExpr& e, const Scope& sc) {
  std::vector<const SExpr*> parts;
  if (e.head_is("or")) {
    for (std::size_t i = 1; i < e.items.size(); ++i) parts.push_back(&e.items[i]);
    if (parts.empty()) fail(e, "at least one disjunct");
  } else {
    parts.push_back(&e);
  }
  Ucq q;
  for (std::size_t k = 0; k < parts.size(); ++k) {
    Cq cq;
    read_cq(*parts[k], sc, cq);
    if (cq.atoms.empty()) fail(*parts[k], "query atom");
    std::vector<Sym> fv;
    for (const Atom& a : cq.atoms)
      for (const Term& t : a.args)
        if (t.is_var && std::find(cq.exist_vars.begin(), cq.exist_vars.end(), t.name) == cq.exist_vars.end() &&
            std::find(fv.begin(), fv.end(), t.name) == fv.end())
          fv.push_back(t.name);
    if (k == 0) {
      q.free_vars = fv;
    } else if (std::set<Sym>(fv.begin(), fv.end()) != std::set<Sym>(q.free_vars.begin(), q.free_vars.end())) {
      fail(*parts[k], "disjunct with the same free variables");
    }
    cq.free_vars = q.free_vars;
    q.disjuncts.push_back(std::move(cq));
  }
  return q;
}

Formula read_formula(const SExpr& e, const Scope& sc) {
  if (!e.list || e.items.empty()) fail(e, "condition");
  const SExpr& h = e.items[0];
  auto kids = [&](std::size_t from) {
    std::vector<Formula> out;
    for (std::size_t i = from; i < e.items.size(); ++i) out.push_back(read_formula(e.items[i], sc));
    return out;
  };
  if (h.is("and")) return f_and(kids(1));
  if (h.is("or")) return f_or(kids(1));
  if (h.is("not")) {
    if (e.items.size() != 2) fail(e, "(not condition)");
    return f_not(read_formula(e.items[1], sc));
  }
  if (h.is("imply")) {
    if (e.items.size() != 3) fail(e, "(imply condition condition)");
    return f_or({f_not(read_formula(e.items[1], sc)), read_formula(e.items[2], sc)});
  }
  if (h.is("exists") || h.is("forall")) {
    if (e.items.size() != 3) fail(e, "(" + h.text + " (vars) condition)");
    std::vector<Sym> vs = read_vars(e.items[1]);
    Formula body = read_formula(e.items[2], sc);
    return h.is("exists") ? f_exists(vs, body) : f_forall(vs, body);
  }
  if (h.is("=")) {
    if (e.items.size() != 3) fail(e, "(= term term)");
    return f_eq(read_term(e.items[1]), read_term(e.items[2]));
  }
  if (h.is("know")) {
    if (e.items.size() != 2) fail(e, "(know query)");
    return f_bracket(read_ucq(e.items[1], sc));
  }
  if (h.is("when") || h.is("increase") || h.is("either")) fail(h, "condition", h.text);
  return f_atom(read_atom(e, sc));
}

bool is_literal_expr(const SExpr& e) {
  if (e.head_is("not")) return e.items.size() == 2 && !e.items[1].head_is("and");
  return e.list && !e.items.empty() && !e.head_is("and") && !e.head_is("when") && !e.head_is("forall");
}

class EffectReader {
 public:
  EffectReader(const Scope& sc, std::vector<Effect>& out) : sc_(sc), out_(out) {}

  void top(const SExpr& e) {
    out_.emplace_back();
    std::size_t idx = out_.size() - 1;
    collect(e, idx, {}, f_true());
    if (out_[idx].add.empty() && out_[idx].del.empty()) out_.erase(out_.begin() + static_cast<long>(idx));
  }

 private:
  void literal(const SExpr& e, std::size_t idx) {
    if (e.head_is("not")) {
      if (e.items.size() != 2) fail(e, "(not atom)");
      out_[idx].del.push_back(read_atom(e.items[1], sc_));
    } else {
      if (e.head_is("=")) fail(e, "effect literal");
      out_[idx].add.push_back(read_atom(e, sc_));
    }
  }

  void collect(const SExpr& e, std::size_t idx, const std::vector<Sym>& vars, const Formula& cond) {
    if (e.head_is("and")) {
      for (std::size_t i = 1; i < e.items.size(); ++i)
        if (is_literal_expr(e.items[i])) literal(e.items[i], idx);
      for (std::size_t i = 1; i < e.items.size(); ++i)
        if (!is_literal_expr(e.items[i])) complex(e.items[i], vars, cond);
    } else if (is_literal_expr(e)) {
      literal(e, idx);
    } else {
      complex(e, vars, cond);
    }
  }

  // An effect node owns literals directly unless it only wraps other
  // conditional or quantified effects.
  static bool owns_literals(const SExpr& body) {
    if (body.head_is("when") || body.head_is("forall")) return false;
    if (body.head_is("and") && body.items.size() > 1) {
      for (std::size_t i = 1; i < body.items.size(); ++i)
        if (is_literal_expr(body.items[i])) return true;
      return false;
    }
    return true;
  }

  void complex(const SExpr& e, const std::vector<Sym>& vars, const Formula& cond) {
    if (e.head_is("when")) {
      if (e.items.size() != 3) fail(e, "(when condition effect)");
      Formula c = f_and({cond, read_formula(e.items[1], sc_)});
      open(e.items[2], vars, c);
    } else if (e.head_is("forall")) {
      if (e.items.size() != 3) fail(e, "(forall (vars) effect)");
      std::vector<Sym> vs = vars;
      for (Sym v : read_vars(e.items[1])) vs.push_back(v);
      open(e.items[2], vs, cond);
    } else {
      fail(e, "effect");
    }
  }

  void open(const SExpr& body, const std::vector<Sym>& vars, const Formula& cond) {
    if (owns_literals(body)) {
      out_.push_back(Effect{vars, cond, {}, {}});
      collect(body, out_.size() - 1, vars, cond);
    } else {
      collect(body, 0, vars, cond);
    }
  }

  const Scope& sc_;
  std::vector<Effect>& out_;
};

std::string atom_text(const Atom& a) { return to_pddl(f_atom(a)); }

std::string vars_text(const std::vector<Sym>& vs) {
  std::string out = "(";
  for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? " ?" : "?") + vs[i].str();
  return out + ")";
}

std::vector<std::string> decl_vars(int arity) {
  if (arity == 1) return {"?x"};
  if (arity == 2) return {"?x", "?y"};
  std::vector<std::string> out;
  for (int i = 1; i <= arity; ++i) out.push_back("?x" + std::to_string(i));
  return out;
}

std::string literals_text(const Effect& e) {
  std::vector<std::string> lits;
  for (const Atom& a : e.add) lits.push_back(atom_text(a));
  for (const Atom& a : e.del) lits.push_back("(not " + atom_text(a) + ")");
  if (lits.size() == 1) return lits[0];
  std::string out = "(and";
  for (const auto& l : lits) out += " " + l;
  return out + ")";
}

std::string effect_text(const Effect& e, bool first) {
  bool plain_cond = e.cond->kind == FKind::True;
  if (first && e.vars.empty() && plain_cond && !(e.add.empty() && e.del.empty())) {
    std::string out;
    for (const Atom& a : e.add) out += " " + atom_text(a);
    for (const Atom& a : e.del) out += " (not " + atom_text(a) + ")";
    return out.substr(1);
  }
  std::string body = literals_text(e);
  if (!plain_cond || e.vars.empty()) body = "(when " + to_pddl(e.cond) + " " + body + ")";
  if (!e.vars.empty()) body = "(forall " + vars_text(e.vars) + " " + body + ")";
  return body;
}

std::map<Sym, int> arity_table(const Signature& a, const Signature& b) {
  std::map<Sym, int> out;
  for (const auto& [n, p] : a.all()) out[n] = p.arity;
  for (const auto& [n, p] : b.all()) out[n] = p.arity;
  return out;
}

}  // namespace

Formula parse_condition(const std::string& text) {
  std::vector<SExpr> es = parse_sexprs(text);
  if (es.size() != 1) throw ParseError(1, 1, "one condition", std::to_string(es.size()) + " expressions");
  return read_formula(es[0], Scope{});
}

PddlDomain parse_domain(const std::string& text) {
  std::vector<SExpr> es = parse_sexprs(text);
  if (es.size() != 1) throw ParseError(1, 1, "one (define ...) form", std::to_string(es.size()) + " expressions");
  const SExpr& root = es[0];
  if (!root.head_is("define") || root.items.size() < 2) fail(root, "(define (domain name) ...)");
  const SExpr& dn = root.items[1];
  if (!dn.head_is("domain") || dn.items.size() != 2 || !dn.items[1].is_symbol()) fail(dn, "(domain name)");
  PddlDomain d;
  d.name = dn.items[1].text;

  std::map<Sym, int> declared;
  std::vector<const SExpr*> derived, actions;
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& sec = root.items[i];
    if (!sec.list || sec.items.empty() || !sec.items[0].is_symbol()) fail(sec, "domain section");
    const SExpr& key = sec.items[0];
    if (key.is(":requirements")) {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const SExpr& r = sec.items[j];
        if (!r.is_symbol() || !kAccepted.count(to_lower(r.text))) fail(r, "supported requirement");
      }
    } else if (key.is(":constants")) {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const SExpr& c = sec.items[j];
        if (c.is("-")) fail(c, "untyped constant list", "-");
        Term t = read_term(c);
        if (t.is_var) fail(c, "constant");
        d.constants.insert(t.name);
      }
    } else if (key.is(":predicates")) {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const SExpr& p = sec.items[j];
        if (!p.list || p.items.empty() || !p.items[0].is_symbol()) fail(p, "predicate declaration");
        Sym name(p.items[0].text);
        std::vector<Sym> vs;
        for (std::size_t k = 1; k < p.items.size(); ++k) {
          if (p.items[k].is("-")) fail(p.items[k], "untyped predicate declaration", "-");
          Term t = read_term(p.items[k]);
          if (!t.is_var) fail(p.items[k], "variable");
        }
        int n = static_cast<int>(p.items.size()) - 1;
        if (declared.count(name)) fail(p, "predicate declared once", p.items[0].text);
        declared[name] = n;
      }
    } else if (key.is(":derived")) {
      derived.push_back(&sec);
    } else if (key.is(":action")) {
      actions.push_back(&sec);
    } else {
      fail(key, "supported domain section", key.text);
    }
  }
  Scope sc{&declared};
  std::set<Sym> heads;
  for (const SExpr* r : derived) {
    if (r->items.size() != 3) fail(*r, "(:derived (head) body)");
    Atom head = read_atom(r->items[1], sc);
    std::set<Sym> hv;
    for (const Term& t : head.args)
      if (!t.is_var || !hv.insert(t.name).second) fail(r->items[1], "distinct variables in rule head");
    Formula body = read_formula(r->items[2], sc);
    // Body variables missing from the head are read existentially.
    std::vector<Sym> extra;
    for (Sym v : free_vars(body))
      if (!hv.count(v)) extra.push_back(v);
    if (!extra.empty()) body = f_exists(extra, body);
    heads.insert(head.pred);
    d.rules.add(Rule{head, body});
  }
  for (const auto& [n, ar] : declared)
    (heads.count(n) ? d.derived : d.predicates).add(n, ar, heads.count(n) ? PredKind::Derived : PredKind::General);
  for (const SExpr* a : actions) {
    if (a->items.size() < 2 || !a->items[1].is_symbol()) fail(*a, "action name");
    ActionSchema s;
    s.name = Sym(a->items[1].text);
    std::size_t j = 2;
    while (j < a->items.size()) {
      const SExpr& k = a->items[j];
      if (j + 1 >= a->items.size()) fail(k, "value after " + to_string(k));
      const SExpr& val = a->items[j + 1];
      if (k.is(":parameters")) {
        s.params = read_vars(val);
      } else if (k.is(":precondition")) {
        s.pre = read_formula(val, sc);
      } else if (k.is(":effect")) {
        EffectReader(sc, s.effects).top(val);
      } else {
        fail(k, ":parameters, :precondition or :effect", k.text);
      }
      j += 2;
    }
    for (const Effect& e : s.effects)
      for (const std::vector<Atom>* lits : {&e.add, &e.del})
        for (const Atom& x : *lits)
          if (heads.count(x.pred)) fail(*a, "effects on base predicates only", x.pred.str());
    d.actions.push_back(std::move(s));
  }
  return d;
}

PddlTask parse_problem(const std::string& text, const PddlDomain& domain) {
  std::vector<SExpr> es = parse_sexprs(text);
  if (es.size() != 1) throw ParseError(1, 1, "one (define ...) form", std::to_string(es.size()) + " expressions");
  const SExpr& root = es[0];
  if (!root.head_is("define") || root.items.size() < 2) fail(root, "(define (problem name) ...)");
  const SExpr& pn = root.items[1];
  if (!pn.head_is("problem") || pn.items.size() != 2 || !pn.items[1].is_symbol()) fail(pn, "(problem name)");
  PddlTask t;
  t.domain = domain;
  t.name = pn.items[1].text;
  std::map<Sym, int> ar = arity_table(domain.predicates, domain.derived);
  std::map<Sym, int> base = arity_table(domain.predicates, Signature{});
  for (std::size_t i = 2; i < root.items.size(); ++i) {
    const SExpr& sec = root.items[i];
    if (!sec.list || sec.items.empty() || !sec.items[0].is_symbol()) fail(sec, "problem section");
    const SExpr& key = sec.items[0];
    if (key.is(":domain")) {
      if (sec.items.size() != 2 || !sec.items[1].is_symbol()) fail(sec, "(:domain name)");
      if (!iequals(sec.items[1].text, domain.name)) fail(sec.items[1], "domain " + domain.name);
    } else if (key.is(":objects")) {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        const SExpr& o = sec.items[j];
        if (o.is("-")) fail(o, "untyped object list", "-");
        Term term = read_term(o);
        if (term.is_var) fail(o, "object name");
        t.objects.insert(term.name);
      }
    } else if (key.is(":init")) {
      for (std::size_t j = 1; j < sec.items.size(); ++j) {
        Atom a = read_atom(sec.items[j], Scope{&base});
        if (!a.is_ground()) fail(sec.items[j], "ground fact");
        t.init.insert(a);
      }
    } else if (key.is(":goal")) {
      if (sec.items.size() != 2) fail(sec, "(:goal condition)");
      t.goal = read_formula(sec.items[1], Scope{&ar});
      if (!free_vars(t.goal).empty()) fail(sec.items[1], "closed goal");
    } else {
      fail(key, "supported problem section", key.text);
    }
  }
  for (Sym c : domain.constants) t.objects.insert(c);
  return t;
}

std::string print_domain(const PddlDomain& d) {
  std::string out = "(define (domain " + d.name + ")\n  (:requirements";
  for (const auto& r : printed_requirements()) out += " " + r;
  out += ")\n";
  if (!d.constants.empty()) {
    out += "  (:constants";
    for (Sym c : d.constants) out += " " + c.str();
    out += ")\n";
  }
  std::map<Sym, int> all = arity_table(d.predicates, d.derived);
  out += "  (:predicates";
  for (const auto& [n, ar] : all) {
    out += "\n    (" + n.str();
    for (const auto& v : decl_vars(ar)) out += " " + v;
    out += ")";
  }
  out += ")\n";
  for (const Rule& r : d.rules.rules()) {
    std::set<Sym> hv;
    for (const Term& t : r.head.args) hv.insert(t.name);
    std::vector<Sym> extra;
    for (Sym v : free_vars(r.body))
      if (!hv.count(v)) extra.push_back(v);
    Formula body = extra.empty() ? r.body : f_exists(extra, r.body);
    out += "  (:derived " + atom_text(r.head) + "\n    " + to_pddl(body) + ")\n";
  }
  for (const ActionSchema& a : d.actions) {
    out += "  (:action " + a.name.str() + "\n    :parameters " + vars_text(a.params) + "\n    :precondition " +
           to_pddl(a.pre) + "\n    :effect ";
    std::vector<std::string> parts;
    for (std::size_t i = 0; i < a.effects.size(); ++i) parts.push_back(effect_text(a.effects[i], i == 0));
    if (parts.empty()) {
      out += "(and)";
    } else {
      out += "(and";
      for (const auto& p : parts) out += "\n      " + p;
      out += ")";
    }
    out += ")\n";
  }
  return out + ")\n";
}

std::string print_problem(const PddlTask& t) {
  std::string out = "(define (problem " + t.name + ")\n  (:domain " + t.domain.name + ")\n  (:objects";
  for (Sym o : t.objects)
    if (!t.domain.constants.count(o)) out += " " + o.str();
  out += ")\n  (:init";
  for (const Atom& a : t.init) out += "\n    " + atom_text(a);
  out += ")\n  (:goal " + to_pddl(t.goal) + "))\n";
  return out;
}

void validate_pddl_task(const PddlTask& t) {
  const PddlDomain& d = t.domain;
  for (const auto& [n, p] : d.derived.all())
    if (d.predicates.contains(n)) throw InvalidTask("predicate " + n.str() + " is both base and derived");
  std::map<Sym, int> ar = arity_table(d.predicates, d.derived);
  auto check = [&](const Atom& a, const std::string& where) {
    auto it = ar.find(a.pred);
    if (it == ar.end()) throw InvalidTask(where + ": undeclared predicate " + a.pred.str());
    if (it->second != static_cast<int>(a.arity())) throw InvalidTask(where + ": arity mismatch in " + to_string(a));
  };
  auto check_f = [&](const Formula& f, const std::string& where) {
    for_each_atom(f, [&](const Atom& a, bool) { check(a, where); });
  };
  for (const Rule& r : d.rules.rules()) {
    if (!d.derived.contains(r.head.pred)) throw InvalidTask("rule head " + r.head.pred.str() + " is not derived");
    check(r.head, "rule");
    check_f(r.body, "rule for " + r.head.pred.str());
  }
  for (const ActionSchema& a : d.actions) {
    check_f(a.pre, "precondition of " + a.name.str());
    for (const Effect& e : a.effects) {
      check_f(e.cond, "effect of " + a.name.str());
      for (const std::vector<Atom>* lits : {&e.add, &e.del})
        for (const Atom& x : *lits) {
          check(x, "effect of " + a.name.str());
          if (d.derived.contains(x.pred))
            throw InvalidTask("effect of " + a.name.str() + " changes derived predicate " + x.pred.str());
        }
    }
  }
  for (const Atom& a : t.init) {
    check(a, "initial state");
    if (d.derived.contains(a.pred)) throw InvalidTask("initial state contains derived atom " + to_string(a));
  }
  check_f(t.goal, "goal");
  stratify(d.rules);
}

// ---------------------------------------------------------------------------

PddlRunner::PddlRunner(const PddlTask& task) : task_(task), objects_(task.objects) {
  for (Sym c : task.domain.constants) objects_.insert(c);
}

std::vector<GroundAction> PddlRunner::ground_actions() const {
  std::vector<Sym> objs(objects_.begin(), objects_.end());
  std::vector<GroundAction> out;
  for (const ActionSchema& a : task_.domain.actions) {
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

FactStore PddlRunner::model(const State& s) const { return minimal_model_store(task_.domain.rules, s, objects_); }

std::vector<Sym> PddlRunner::domain(const State& s) const {
  std::set<Sym> d = objects_;
  for (Sym c : active_domain(s)) d.insert(c);
  return std::vector<Sym>(d.begin(), d.end());
}

const ActionSchema& PddlRunner::schema(const GroundAction& a) const {
  for (const ActionSchema& s : task_.domain.actions)
    if (s.name == a.name) {
      if (s.params.size() != a.args.size())
        throw InvalidTask("action " + a.name.str() + " expects " + std::to_string(s.params.size()) + " arguments");
      for (Sym x : a.args)
        if (!objects_.count(x)) throw InvalidTask("unknown object " + x.str() + " in " + to_string(a));
      return s;
    }
  throw InvalidTask("unknown action " + a.name.str());
}

std::optional<State> PddlRunner::try_step(const FactStore& m, const State& s, const GroundAction& a) const {
  const ActionSchema& sc = schema(a);
  Substitution b;
  for (std::size_t i = 0; i < a.args.size(); ++i) b[sc.params[i]] = a.args[i];
  std::vector<Sym> dom = domain(s);
  if (!eval_fo(m, sc.pre, b, dom)) return std::nullopt;
  State add, del;
  for (const Effect& e : sc.effects) {
    if (!e.vars.empty() && dom.empty()) continue;
    std::vector<std::size_t> idx(e.vars.size(), 0);
    while (true) {
      Substitution th = b;
      for (std::size_t i = 0; i < e.vars.size(); ++i) th[e.vars[i]] = dom[idx[i]];
      if (eval_fo(m, e.cond, th, dom)) {
        for (const Atom& x : e.add) add.insert(ground(x, th));
        for (const Atom& x : e.del) del.insert(ground(x, th));
      }
      std::size_t i = e.vars.size();
      while (i > 0 && ++idx[i - 1] == dom.size()) idx[--i] = 0;
      if (i == 0) break;
    }
  }
  State out;
  for (const Atom& x : s)
    if (!del.count(x)) out.insert(x);
  out.insert(add.begin(), add.end());
  return out;
}

State PddlRunner::step(const State& s, const GroundAction& a) const {
  std::optional<State> next = try_step(model(s), s, a);
  if (!next) throw PreconditionFailed("precondition of " + to_string(a) + " does not hold");
  return *next;
}

bool PddlRunner::goal_holds(const FactStore& m, const State& s) const { return eval_fo(m, task_.goal, {}, domain(s)); }

bool PddlRunner::goal_holds(const State& s) const { return goal_holds(model(s), s); }

State step_pddl(const PddlTask& task, const State& s, const GroundAction& a) { return PddlRunner(task).step(s, a); }

Verdict validate_pddl_plan(const PddlTask& task, const Plan& plan) {
  Verdict v;
  PddlRunner run(task);
  State cur = task.init;
  v.trace.push_back(cur);
  for (std::size_t i = 0; i < plan.size(); ++i) {
    try {
      cur = run.step(cur, plan[i]);
      v.trace.push_back(cur);
      continue;
    } catch (const PreconditionFailed& e) {
      v.failure_kind = "PreconditionFailed";
      v.reason = e.what();
    } catch (const InvalidTask& e) {
      v.failure_kind = "InvalidAction";
      v.reason = e.what();
    }
    v.failed_step = static_cast<int>(i);
    return v;
  }
  v.goal_satisfied = run.goal_holds(cur);
  v.valid = v.goal_satisfied;
  if (!v.valid) {
    v.failure_kind = "GoalNotSatisfied";
    v.reason = "goal does not hold in the final state";
  }
  return v;
}

std::optional<Plan> pddl_bounded_search(const PddlTask& task, int max_depth, std::size_t max_states) {
  if (max_depth < 0 || max_depth > 2 * kMaxSearchDepth)
    throw SearchSpaceLimitExceeded("search depth " + std::to_string(max_depth) + " exceeds the limit");
  PddlRunner run(task);
  std::vector<GroundAction> acts = run.ground_actions();
  struct Node {
    State state;
    int parent;
    int action;
    int depth;
  };
  std::vector<Node> nodes{{task.init, -1, -1, 0}};
  std::set<State> seen{task.init};
  for (std::size_t head = 0; head < nodes.size(); ++head) {
    State cur = nodes[head].state;
    FactStore m = run.model(cur);
    if (run.goal_holds(m, cur)) {
      Plan p;
      for (int i = static_cast<int>(head); nodes[i].parent >= 0; i = nodes[i].parent) p.push_back(acts[nodes[i].action]);
      std::reverse(p.begin(), p.end());
      return p;
    }
    if (nodes[head].depth == max_depth) continue;
    for (std::size_t ai = 0; ai < acts.size(); ++ai) {
      std::optional<State> next = run.try_step(m, cur, acts[ai]);
      if (!next || !seen.insert(*next).second) continue;
      if (nodes.size() >= max_states)
        throw SearchSpaceLimitExceeded("bounded search visited more than " + std::to_string(max_states) + " states");
      nodes.push_back({std::move(*next), static_cast<int>(head), static_cast<int>(ai), nodes[head].depth + 1});
    }
  }
  return std::nullopt;
}

std::set<Plan> enumerate_plans(const PddlTask& task, int max_depth, std::size_t max_nodes) {
  PddlRunner run(task);
  std::vector<GroundAction> acts = run.ground_actions();
  std::set<Plan> out;
  std::size_t visited = 0;
  Plan prefix;
  // Successors per explicit state are memoised since many prefixes share states.
  std::map<State, std::pair<bool, std::vector<std::pair<int, State>>>> memo;
  std::function<void(const State&, int)> dfs = [&](const State& s, int depth) {
    if (++visited > max_nodes) throw SearchSpaceLimitExceeded("plan enumeration exceeded the node limit");
    auto it = memo.find(s);
    if (it == memo.end()) {
      FactStore m = run.model(s);
      std::pair<bool, std::vector<std::pair<int, State>>> entry;
      entry.first = run.goal_holds(m, s);
      for (std::size_t ai = 0; ai < acts.size(); ++ai)
        if (auto next = run.try_step(m, s, acts[ai])) entry.second.emplace_back(static_cast<int>(ai), std::move(*next));
      it = memo.emplace(s, std::move(entry)).first;
    }
    if (it->second.first) out.insert(prefix);
    if (depth == max_depth) return;
    auto succ = it->second.second;
    for (const auto& [ai, next] : succ) {
      prefix.push_back(acts[ai]);
      dfs(next, depth + 1);
      prefix.pop_back();
    }
  };
  dfs(task.init, 0);
  return out;
}

}  // namespace cekab
