#include "cekab/coherence.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

namespace cekab {

UpdateNames update_names(Sym pred) {
  std::string p = to_lower(pred.str());
  return UpdateNames{Sym("ins_" + p + "_request"), Sym("del_" + p + "_request"), Sym("ins_" + p), Sym("del_" + p),
                     Sym("ins_" + p + "_closure")};
}

Sym incompatible_predicate() { return Sym("incompatible_update"); }

State encode_dataset(const State& state, const Update& update) {
  State out = state;
  for (const Atom& a : update.insertions) out.insert(Atom(update_names(a.pred).ins_request, a.args));
  for (const Atom& a : update.deletions) out.insert(Atom(update_names(a.pred).del_request, a.args));
  return out;
}

namespace {

Term v(const char* n) { return Term::var(Sym(n)); }

std::vector<Term> pattern_vars(int arity) {
  if (arity == 1) return {v("x")};
  if (arity == 2) return {v("x"), v("y")};
  std::vector<Term> out;
  for (int i = 1; i <= arity; ++i) out.push_back(Term::var(Sym("x" + std::to_string(i))));
  return out;
}

Atom role_pattern(Sym pred, const BasicRole& q, const Term& s, const Term& t) {
  return q.inverted ? Atom(pred, {t, s}) : Atom(pred, {s, t});
}

Atom ins_req(const Atom& a) { return Atom(update_names(a.pred).ins_request, a.args); }
Atom del_req(const Atom& a) { return Atom(update_names(a.pred).del_request, a.args); }

// Assertion shape of a basic concept at `t`, with `w` filling the other
// position of an existential.
Atom concept_shape(const BasicConcept& b, const Term& t, const Term& w) {
  if (b.is_named()) return Atom(b.name, {t});
  return role_pattern(b.role.base, b.role, t, w);
}

Formula exists_if(const Atom& body, const Term& w) {
  for (const Term& t : body.args)
    if (t == w) return f_exists({w.name}, f_atom(body));
  return f_atom(body);
}

class Builder {
 public:
  Builder(const Tbox& t, const Signature& extra) : t_(t), cl_(t.closure()) {
    for (const auto& [n, p] : t.signature().all()) out_.arity[n] = p.arity;
    for (const auto& [n, p] : extra.all())
      if (!out_.arity.count(n)) out_.arity[n] = p.arity;
  }

  UpdateProgram build() {
    for (const auto& [p, n] : out_.arity) {
      UpdateNames nm = update_names(p);
      out_.ins_of[nm.ins] = p;
      out_.del_of[nm.del] = p;
      direct(p, n);
    }
    downward_deletion();
    conflict_deletion();
    closure_insertion();
    incompatibility();
    return std::move(out_);
  }

 private:
  bool in_tbox(Sym p, int n) const {
    return (n == 1 && t_.is_concept(p)) || (n == 2 && t_.is_role(p));
  }

  void add(Atom head, std::vector<Formula> body) { out_.program.add(Rule{std::move(head), f_and(std::move(body))}); }

  void direct(Sym p, int n) {
    Atom a(p, pattern_vars(n));
    UpdateNames nm = update_names(p);
    add(Atom(nm.del, a.args), {f_atom(a), f_atom(del_req(a))});
    add(Atom(nm.ins, a.args), {f_not(f_atom(a)), f_atom(ins_req(a))});
  }

  void del_rule(const Atom& fact_pattern, std::vector<Formula> trigger) {
    std::vector<Formula> body{f_atom(fact_pattern)};
    for (auto& f : trigger) body.push_back(std::move(f));
    add(Atom(update_names(fact_pattern.pred).del, fact_pattern.args), std::move(body));
  }

  // Explicit facts entailing a deleted assertion are deleted.
  void downward_deletion() {
    Term x = v("x"), y = v("y");
    for (Sym a : t_.concepts()) {
      Atom req = del_req(Atom(a, {x}));
      for (const BasicConcept& b : cl_.concept_subs(BasicConcept::named(a)))
        del_rule(concept_shape(b, x, y), {f_atom(req)});
    }
    for (Sym p : t_.roles()) {
      Atom req = del_req(Atom(p, {x, y}));
      for (const BasicRole& q : cl_.role_subs(BasicRole{p, false}))
        del_rule(role_pattern(q.base, q, x, y), {f_atom(req)});
    }
  }

  // Explicit facts that clash with an inserted assertion are deleted.
  void conflict_deletion() {
    Term x = v("x"), y = v("y"), w = v("w");
    for (int i = 0; i < cl_.num_concepts(); ++i)
      for (int j = 0; j < cl_.num_concepts(); ++j) {
        if (!cl_.concept_disj(i, j)) continue;
        Atom fact_pat = concept_shape(cl_.concept_at(i), x, y);
        Atom req = ins_req(concept_shape(cl_.concept_at(j), x, w));
        del_rule(fact_pat, {exists_if(req, w)});
      }
    for (int i = 0; i < cl_.num_roles(); ++i)
      for (int j = 0; j < cl_.num_roles(); ++j) {
        if (!cl_.role_disj(i, j)) continue;
        const BasicRole& e = cl_.role_at(i);
        const BasicRole& d = cl_.role_at(j);
        del_rule(role_pattern(e.base, e, x, y), {f_atom(ins_req(role_pattern(d.base, d, x, y)))});
      }
    for (const BasicRole& q : cl_.functional_roles()) {
      Term z = v("z");
      Atom fact_pat = role_pattern(q.base, q, x, y);
      Atom req = ins_req(role_pattern(q.base, q, x, z));
      del_rule(fact_pat, {f_atom(req), f_neq(y, z)});
    }
  }

  // Insertion requests whose closure contains `b`.
  std::vector<Formula> entailing_requests(const Atom& b) const {
    Term w = v("w");
    std::vector<Formula> out{f_atom(ins_req(b))};
    if (b.arity() == 1) {
      for (const BasicConcept& c : cl_.concept_subs(BasicConcept::named(b.pred)))
        out.push_back(exists_if(ins_req(concept_shape(c, b.args[0], w)), w));
    } else {
      for (const BasicRole& q : cl_.role_subs(BasicRole{b.pred, false}))
        out.push_back(f_atom(ins_req(role_pattern(q.base, q, b.args[0], b.args[1]))));
    }
    return out;
  }

  // Insertion requests that are inconsistent together with `b`.
  std::vector<Formula> conflicting_requests(const Atom& b) const {
    Term w = v("w");
    std::vector<Formula> out;
    auto concept_conflicts = [&](const BasicConcept& c, const Term& t) {
      for (const BasicConcept& d : cl_.concept_disjoint(c)) out.push_back(exists_if(ins_req(concept_shape(d, t, w)), w));
    };
    if (b.arity() == 1) {
      concept_conflicts(BasicConcept::named(b.pred), b.args[0]);
      return out;
    }
    const Term& s = b.args[0];
    const Term& t = b.args[1];
    BasicRole r{b.pred, false};
    concept_conflicts(BasicConcept::exists(r), s);
    concept_conflicts(BasicConcept::exists(r.inverse()), t);
    for (const BasicRole& d : cl_.role_disjoint(r)) out.push_back(f_atom(ins_req(role_pattern(d.base, d, s, t))));
    int rid = cl_.role_id(r);
    if (cl_.functional(rid))
      out.push_back(f_exists({w.name}, f_and({f_atom(ins_req(Atom(b.pred, {s, w}))), f_neq(w, t)})));
    if (cl_.functional(cl_.role_id(r.inverse())))
      out.push_back(f_exists({w.name}, f_and({f_atom(ins_req(Atom(b.pred, {w, t}))), f_neq(w, s)})));
    return out;
  }

  // Consequences of a deleted fact that survive the update are re-added.
  void closure_insertion() {
    std::set<Sym> targets;
    for (const auto& [p, n] : out_.arity) {
      if (!in_tbox(p, n)) continue;
      Atom e(p, pattern_vars(n));
      Atom trigger(update_names(p).del, e.args);
      for (const Atom& b : single_step_consequences(t_, e)) {
        if (b == e) continue;
        std::vector<Formula> body{f_atom(trigger), f_not(f_atom(b))};
        for (const Formula& f : entailing_requests(b)) body.push_back(f_not(f));
        for (const Atom& g : single_step_consequences(t_, b)) body.push_back(f_not(f_atom(del_req(g))));
        add(Atom(update_names(b.pred).closure, b.args), std::move(body));
        targets.insert(b.pred);
      }
    }
    for (Sym p : targets) {
      Atom b(p, pattern_vars(out_.arity.at(p)));
      UpdateNames nm = update_names(p);
      std::vector<Formula> body{f_atom(Atom(nm.closure, b.args))};
      for (const Formula& f : conflicting_requests(b)) body.push_back(f_not(f));
      add(Atom(nm.ins, b.args), std::move(body));
    }
  }

  void incompatibility() {
    Atom head(incompatible_predicate(), {});
    Term x = v("x"), y = v("y"), z = v("z"), w = v("w");
    for (int i = 0; i < cl_.num_concepts(); ++i)
      for (int j = i; j < cl_.num_concepts(); ++j) {
        if (!cl_.concept_disj(i, j)) continue;
        add(head, {f_atom(ins_req(concept_shape(cl_.concept_at(i), x, y))),
                   f_atom(ins_req(concept_shape(cl_.concept_at(j), x, w)))});
      }
    for (int i = 0; i < cl_.num_roles(); ++i)
      for (int j = i; j < cl_.num_roles(); ++j) {
        if (!cl_.role_disj(i, j)) continue;
        const BasicRole& a = cl_.role_at(i);
        const BasicRole& b = cl_.role_at(j);
        add(head, {f_atom(ins_req(role_pattern(a.base, a, x, y))), f_atom(ins_req(role_pattern(b.base, b, x, y)))});
      }
    for (const BasicRole& q : cl_.functional_roles())
      add(head, {f_atom(ins_req(role_pattern(q.base, q, x, y))), f_atom(ins_req(role_pattern(q.base, q, x, z))),
                 f_neq(y, z)});
    for (const auto& [p, n] : out_.arity) {
      Atom a(p, pattern_vars(n));
      std::vector<Atom> cons = in_tbox(p, n) ? single_step_consequences(t_, a) : std::vector<Atom>{a};
      for (const Atom& b : cons) add(head, {f_atom(ins_req(a)), f_atom(del_req(b))});
    }
  }

  const Tbox& t_;
  const ClosureIndex& cl_;
  UpdateProgram out_;
};

Signature signature_of(const State& s) {
  Signature sig;
  for (const Atom& a : s) sig.add(a.pred, static_cast<int>(a.arity()), PredKind::General);
  return sig;
}

void check_covered(const UpdateProgram& prog, const State& atoms) {
  for (const Atom& a : atoms) {
    auto it = prog.arity.find(a.pred);
    if (it == prog.arity.end() || it->second != static_cast<int>(a.arity()))
      throw SignatureMismatch("update atom " + to_string(a) + " is outside the update program signature");
  }
}

}  // namespace

UpdateProgram build_update_program(const Tbox& tbox, const Signature& extra) {
  tbox.check_valid();
  return Builder(tbox, extra).build();
}

DerivedOps derived_operations(const UpdateProgram& prog, const State& state, const Update& update) {
  check_covered(prog, update.insertions);
  check_covered(prog, update.deletions);
  FactStore model = minimal_model_store(prog.program, encode_dataset(state, update));
  DerivedOps out;
  out.incompatible = model.contains(incompatible_predicate(), {});
  for (const auto& [name, p] : prog.ins_of)
    for (const Tuple& t : model.rows(name)) out.insertions.insert(fact(p, t));
  for (const auto& [name, p] : prog.del_of)
    for (const Tuple& t : model.rows(name)) out.deletions.insert(fact(p, t));
  return out;
}

bool is_compatible(const Tbox& tbox, const Update& update) {
  if (!is_consistent(tbox, update.insertions)) return false;
  State cl = abox_closure(tbox, update.insertions);
  for (const Atom& a : update.deletions)
    if (cl.count(a)) return false;
  return true;
}

State apply_update(const Tbox& tbox, const UpdateProgram& prog, const State& state, const Update& update) {
  if (!is_consistent(tbox, state)) throw InconsistentKb("cannot update a state that is inconsistent with the TBox");
  DerivedOps ops = derived_operations(prog, state, update);
  if (ops.incompatible) throw IncompatibleUpdate("update is incompatible with the TBox: " + to_string(update));
  State out = state;
  for (const Atom& a : ops.deletions) out.erase(a);
  for (const Atom& a : ops.insertions) out.insert(a);
  return out;
}

State apply_update(const Tbox& tbox, const State& state, const Update& update) {
  Signature extra = signature_of(state);
  extra.merge(signature_of(update.insertions));
  extra.merge(signature_of(update.deletions));
  return apply_update(tbox, build_update_program(tbox, extra), state, update);
}

std::size_t oracle_limit() {
  if (const char* env = std::getenv("CEKABC_ORACLE_LIMIT")) {
    char* end = nullptr;
    unsigned long n = std::strtoul(env, &end, 10);
    if (end != env && *end == '\0') return n;
  }
  return 18;
}

State oracle_update(const Tbox& tbox, const State& state, const Update& update) {
  if (!is_consistent(tbox, state)) throw InconsistentKb("cannot update a state that is inconsistent with the TBox");
  if (!is_compatible(tbox, update)) throw IncompatibleUpdate("update is incompatible with the TBox: " + to_string(update));
  State closed = abox_closure(tbox, state);
  std::vector<Atom> base(closed.begin(), closed.end());
  std::size_t limit = oracle_limit();
  if (base.size() > limit)
    throw OracleLimitExceeded("oracle needs " + std::to_string(base.size()) + " closure atoms, limit is " +
                              std::to_string(limit));

  auto accomplishes = [&](const State& cand) {
    if (!is_consistent(tbox, cand)) return false;
    State cl = abox_closure(tbox, cand);
    for (const Atom& b : update.deletions)
      if (cl.count(b)) return false;
    return true;
  };

  const std::size_t n = base.size();
  for (std::size_t k = 0; k <= n; ++k) {
    std::vector<State> found;
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
      State cand;
      std::size_t r = 0;
      for (std::size_t i = 0; i < n; ++i) {
        if (r < k && idx[r] == i) {
          ++r;
          continue;
        }
        cand.insert(base[i]);
      }
      cand.insert(update.insertions.begin(), update.insertions.end());
      if (accomplishes(cand) && std::find(found.begin(), found.end(), cand) == found.end()) found.push_back(cand);
      // next k-combination of removed positions
      std::size_t i = k;
      while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
      if (i == 0) break;
      ++idx[i - 1];
      for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
    if (found.size() == 1) return found.front();
    if (found.size() > 1)
      throw Error("update oracle found " + std::to_string(found.size()) + " distinct maximal results");
  }
  throw Error("update oracle found no result for a compatible update");
}

Update parse_update(const std::string& text) {
  Update u;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    std::size_t b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    std::size_t e = line.find_first_of(" \t", b);
    std::string op = line.substr(b, e == std::string::npos ? std::string::npos : e - b);
    if (op != "ins" && op != "del") throw ParseError(lineno, static_cast<int>(b) + 1, "'ins' or 'del'", op);
    if (e == std::string::npos) throw ParseError(lineno, static_cast<int>(line.size()) + 1, "atom", "end of line");
    Atom a;
    try {
      a = parse_atom(line.substr(e));
    } catch (const ParseError& err) {
      throw ParseError(lineno, static_cast<int>(e) + err.col(), err.expected(), line);
    }
    if (!a.is_ground()) throw ParseError(lineno, static_cast<int>(e) + 1, "ground atom", to_string(a));
    (op == "ins" ? u.insertions : u.deletions).insert(a);
  }
  return u;
}

std::string to_string(const Update& u) {
  std::string out;
  for (const Atom& a : u.insertions) out += "ins " + to_string(a) + "\n";
  for (const Atom& a : u.deletions) out += "del " + to_string(a) + "\n";
  return out;
}

}  // namespace cekab
