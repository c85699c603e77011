#include "cekab/dllite.hpp"

#include <algorithm>
#include <deque>
#include <map>

namespace cekab {

TboxAxiom TboxAxiom::concept_incl(BasicConcept l, BasicConcept r, bool neg) {
  TboxAxiom ax;
  ax.kind = Kind::ConceptIncl;
  ax.lhs_c = l;
  ax.rhs_c = r;
  ax.negated_rhs = neg;
  return ax;
}

TboxAxiom TboxAxiom::role_incl(BasicRole l, BasicRole r, bool neg) {
  TboxAxiom ax;
  ax.kind = Kind::RoleIncl;
  ax.lhs_r = l;
  ax.rhs_r = r;
  ax.negated_rhs = neg;
  return ax;
}

TboxAxiom TboxAxiom::funct(BasicRole q) {
  TboxAxiom ax;
  ax.kind = Kind::Funct;
  ax.lhs_r = q;
  return ax;
}

std::string to_string(const BasicRole& q) { return q.base.str() + (q.inverted ? "-" : ""); }

std::string to_string(const BasicConcept& b) { return b.is_named() ? b.name.str() : "ex " + to_string(b.role); }

std::string to_string(const TboxAxiom& ax) {
  switch (ax.kind) {
    case TboxAxiom::Kind::Funct:
      return "funct " + to_string(ax.lhs_r);
    case TboxAxiom::Kind::ConceptIncl:
      return to_string(ax.lhs_c) + " [= " + (ax.negated_rhs ? "not " : "") + to_string(ax.rhs_c);
    case TboxAxiom::Kind::RoleIncl:
      return to_string(ax.lhs_r) + " [= " + (ax.negated_rhs ? "not " : "") + to_string(ax.rhs_r);
  }
  return "";
}

void Tbox::declare_concept(Sym a) {
  sig_.add(a, 1, PredKind::Concept);
  closure_.reset();
}

void Tbox::declare_role(Sym p) {
  sig_.add(p, 2, PredKind::Role);
  closure_.reset();
}

void Tbox::add(const TboxAxiom& ax) {
  auto reg_c = [&](const BasicConcept& b) {
    if (b.is_named())
      declare_concept(b.name);
    else
      declare_role(b.role.base);
  };
  switch (ax.kind) {
    case TboxAxiom::Kind::ConceptIncl:
      reg_c(ax.lhs_c);
      reg_c(ax.rhs_c);
      break;
    case TboxAxiom::Kind::RoleIncl:
      declare_role(ax.lhs_r.base);
      declare_role(ax.rhs_r.base);
      break;
    case TboxAxiom::Kind::Funct:
      declare_role(ax.lhs_r.base);
      break;
  }
  if (std::find(axioms_.begin(), axioms_.end(), ax) == axioms_.end()) axioms_.push_back(ax);
  closure_.reset();
}

std::vector<Sym> Tbox::concepts() const {
  std::vector<Sym> out;
  for (const auto& [n, p] : sig_.all())
    if (p.arity == 1) out.push_back(n);
  return out;
}

std::vector<Sym> Tbox::roles() const {
  std::vector<Sym> out;
  for (const auto& [n, p] : sig_.all())
    if (p.arity == 2) out.push_back(n);
  return out;
}

bool Tbox::is_concept(Sym s) const { return sig_.arity(s) == 1; }
bool Tbox::is_role(Sym s) const { return sig_.arity(s) == 2; }

const ClosureIndex& Tbox::closure() const {
  if (!closure_) closure_ = std::make_shared<const ClosureIndex>(*this);
  return *closure_;
}

void Tbox::check_valid() const {
  const ClosureIndex& cl = closure();
  for (int r = 0; r < cl.num_roles(); ++r) {
    if (!cl.functional(r)) continue;
    for (int x = 0; x < cl.num_roles(); ++x)
      if (x != r && cl.role_sub(x, r))
        throw InvalidTbox("functional role " + to_string(cl.role_at(r)) +
                          " occurs on the right-hand side of " + to_string(cl.role_at(x)) + " [= " +
                          to_string(cl.role_at(r)));
  }
}

ClosureIndex::ClosureIndex(const Tbox& t) {
  for (Sym a : t.concepts()) concepts_.push_back(BasicConcept::named(a));
  for (Sym p : t.roles()) {
    roles_.push_back(BasicRole{p, false});
    roles_.push_back(BasicRole{p, true});
    concepts_.push_back(BasicConcept::exists(BasicRole{p, false}));
    concepts_.push_back(BasicConcept::exists(BasicRole{p, true}));
  }
  const int nc = num_concepts(), nr = num_roles();
  auto mat = [](int n) { return std::vector<std::vector<char>>(n, std::vector<char>(n, 0)); };
  pc_ = mat(nc);
  nc_ = mat(nc);
  pr_ = mat(nr);
  nr_ = mat(nr);
  funct_.assign(nr, 0);
  for (int i = 0; i < nc; ++i) pc_[i][i] = 1;
  for (int i = 0; i < nr; ++i) pr_[i][i] = 1;
  for (const TboxAxiom& ax : t.axioms()) {
    switch (ax.kind) {
      case TboxAxiom::Kind::ConceptIncl:
        (ax.negated_rhs ? nc_ : pc_)[concept_id(ax.lhs_c)][concept_id(ax.rhs_c)] = 1;
        break;
      case TboxAxiom::Kind::RoleIncl:
        (ax.negated_rhs ? nr_ : pr_)[role_id(ax.lhs_r)][role_id(ax.rhs_r)] = 1;
        break;
      case TboxAxiom::Kind::Funct:
        funct_[role_id(ax.lhs_r)] = 1;
        break;
    }
  }
  auto inv = [](int r) { return r ^ 1; };
  auto ex = [&](int r) { return concept_id(BasicConcept::exists(roles_[r])); };
  auto set = [](std::vector<std::vector<char>>& m, int a, int b, bool& changed) {
    if (!m[a][b]) {
      m[a][b] = 1;
      changed = true;
    }
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < nr; ++a)
      for (int b = 0; b < nr; ++b) {
        if (pr_[a][b]) {
          set(pr_, inv(a), inv(b), changed);
          set(pc_, ex(a), ex(b), changed);
          for (int c = 0; c < nr; ++c)
            if (pr_[b][c]) set(pr_, a, c, changed);
        }
        if (nr_[a][b]) {
          set(nr_, b, a, changed);
          set(nr_, inv(a), inv(b), changed);
          for (int x = 0; x < nr; ++x)
            if (pr_[x][a]) set(nr_, x, b, changed);
        }
      }
    for (int r = 0; r < nr; ++r) {
      if (nr_[r][r]) set(nc_, ex(r), ex(r), changed);
      if (nc_[ex(r)][ex(r)]) set(nr_, r, r, changed);
    }
    for (int a = 0; a < nc; ++a)
      for (int b = 0; b < nc; ++b) {
        if (pc_[a][b])
          for (int c = 0; c < nc; ++c)
            if (pc_[b][c]) set(pc_, a, c, changed);
        if (nc_[a][b]) {
          set(nc_, b, a, changed);
          for (int x = 0; x < nc; ++x)
            if (pc_[x][a]) set(nc_, x, b, changed);
        }
      }
  }
}

int ClosureIndex::concept_id(const BasicConcept& b) const {
  // Named concepts come first, followed by (ex P, ex P-) pairs per role.
  if (b.is_named()) {
    for (int i = 0; i < num_concepts() && concepts_[i].is_named(); ++i)
      if (concepts_[i].name == b.name) return i;
    return -1;
  }
  int r = role_id(b.role);
  if (r < 0) return -1;
  int named = num_concepts() - num_roles();
  return named + r;
}

int ClosureIndex::role_id(const BasicRole& q) const {
  for (int i = 0; i < num_roles(); i += 2)
    if (roles_[i].base == q.base) return i + (q.inverted ? 1 : 0);
  return -1;
}

std::vector<BasicConcept> ClosureIndex::concept_supers(const BasicConcept& b) const {
  std::vector<BasicConcept> out;
  int i = concept_id(b);
  if (i < 0) return out;
  for (int j = 0; j < num_concepts(); ++j)
    if (j != i && pc_[i][j]) out.push_back(concepts_[j]);
  return out;
}

std::vector<BasicConcept> ClosureIndex::concept_subs(const BasicConcept& b) const {
  std::vector<BasicConcept> out;
  int i = concept_id(b);
  if (i < 0) return out;
  for (int j = 0; j < num_concepts(); ++j)
    if (j != i && pc_[j][i]) out.push_back(concepts_[j]);
  return out;
}

std::vector<BasicConcept> ClosureIndex::concept_disjoint(const BasicConcept& b) const {
  std::vector<BasicConcept> out;
  int i = concept_id(b);
  if (i < 0) return out;
  for (int j = 0; j < num_concepts(); ++j)
    if (nc_[i][j]) out.push_back(concepts_[j]);
  return out;
}

std::vector<BasicRole> ClosureIndex::role_supers(const BasicRole& q) const {
  std::vector<BasicRole> out;
  int i = role_id(q);
  if (i < 0) return out;
  for (int j = 0; j < num_roles(); ++j)
    if (j != i && pr_[i][j]) out.push_back(roles_[j]);
  return out;
}

std::vector<BasicRole> ClosureIndex::role_subs(const BasicRole& q) const {
  std::vector<BasicRole> out;
  int i = role_id(q);
  if (i < 0) return out;
  for (int j = 0; j < num_roles(); ++j)
    if (j != i && pr_[j][i]) out.push_back(roles_[j]);
  return out;
}

std::vector<BasicRole> ClosureIndex::role_disjoint(const BasicRole& q) const {
  std::vector<BasicRole> out;
  int i = role_id(q);
  if (i < 0) return out;
  for (int j = 0; j < num_roles(); ++j)
    if (nr_[i][j]) out.push_back(roles_[j]);
  return out;
}

std::vector<BasicRole> ClosureIndex::functional_roles() const {
  std::vector<BasicRole> out;
  for (int r = 0; r < num_roles(); ++r)
    if (funct_[r]) out.push_back(roles_[r]);
  return out;
}

std::vector<TboxAxiom> ClosureIndex::axioms() const {
  std::vector<TboxAxiom> out;
  for (int a = 0; a < num_concepts(); ++a)
    for (int b = 0; b < num_concepts(); ++b) {
      if (a != b && pc_[a][b]) out.push_back(TboxAxiom::concept_incl(concepts_[a], concepts_[b]));
      if (nc_[a][b]) out.push_back(TboxAxiom::concept_incl(concepts_[a], concepts_[b], true));
    }
  for (int a = 0; a < num_roles(); ++a) {
    for (int b = 0; b < num_roles(); ++b) {
      if (a != b && pr_[a][b]) out.push_back(TboxAxiom::role_incl(roles_[a], roles_[b]));
      if (nr_[a][b]) out.push_back(TboxAxiom::role_incl(roles_[a], roles_[b], true));
    }
    if (funct_[a]) out.push_back(TboxAxiom::funct(roles_[a]));
  }
  std::sort(out.begin(), out.end());
  return out;
}

Tbox tbox_closure(const Tbox& tbox) {
  tbox.check_valid();
  Tbox out;
  for (const auto& [n, p] : tbox.signature().all()) {
    if (p.arity == 1)
      out.declare_concept(n);
    else
      out.declare_role(n);
  }
  for (const TboxAxiom& ax : tbox.closure().axioms()) out.add(ax);
  return out;
}

namespace {

// Chase of the told positive inclusions over named individuals. Existential
// requirements are kept as memberships in ex Q without inventing witnesses.
struct Saturation {
  const Tbox& tbox;
  const ClosureIndex& cl;
  std::map<Sym, std::vector<char>> member;
  State roles;
  State passthrough;
  std::deque<std::pair<Sym, int>> mqueue;
  std::deque<Atom> rqueue;

  Saturation(const Tbox& t, const State& s) : tbox(t), cl(t.closure()) {
    for (const Atom& a : s) {
      if (a.arity() == 1 && tbox.is_concept(a.pred)) {
        add_member(a.args[0].name, cl.concept_id(BasicConcept::named(a.pred)));
      } else if (a.arity() == 2 && tbox.is_role(a.pred)) {
        add_role(a.pred, a.args[0].name, a.args[1].name);
      } else {
        passthrough.insert(a);
      }
    }
    run();
  }

  void add_member(Sym ind, int c) {
    auto& v = member[ind];
    if (v.empty()) v.assign(cl.num_concepts(), 0);
    if (v[c]) return;
    v[c] = 1;
    mqueue.emplace_back(ind, c);
  }

  void add_role(Sym p, Sym a, Sym b) {
    Atom f = fact(p, {a, b});
    if (!roles.insert(f).second) return;
    add_member(a, cl.concept_id(BasicConcept::exists(BasicRole{p, false})));
    add_member(b, cl.concept_id(BasicConcept::exists(BasicRole{p, true})));
    rqueue.push_back(f);
  }

  void run() {
    while (!mqueue.empty() || !rqueue.empty()) {
      while (!mqueue.empty()) {
        auto [ind, c] = mqueue.front();
        mqueue.pop_front();
        const BasicConcept& b = cl.concept_at(c);
        for (const TboxAxiom& ax : tbox.axioms()) {
          if (!ax.positive()) continue;
          if (ax.kind == TboxAxiom::Kind::ConceptIncl && ax.lhs_c == b) add_member(ind, cl.concept_id(ax.rhs_c));
          if (ax.kind == TboxAxiom::Kind::RoleIncl && !b.is_named()) {
            if (ax.lhs_r == b.role) add_member(ind, cl.concept_id(BasicConcept::exists(ax.rhs_r)));
            if (ax.lhs_r.inverse() == b.role)
              add_member(ind, cl.concept_id(BasicConcept::exists(ax.rhs_r.inverse())));
          }
        }
      }
      while (!rqueue.empty()) {
        Atom f = rqueue.front();
        rqueue.pop_front();
        Sym a = f.args[0].name, b = f.args[1].name;
        for (const TboxAxiom& ax : tbox.axioms()) {
          if (ax.kind != TboxAxiom::Kind::RoleIncl || ax.negated_rhs || ax.lhs_r.base != f.pred) continue;
          Sym x = ax.lhs_r.inverted ? b : a;
          Sym y = ax.lhs_r.inverted ? a : b;
          if (ax.rhs_r.inverted)
            add_role(ax.rhs_r.base, y, x);
          else
            add_role(ax.rhs_r.base, x, y);
        }
      }
    }
  }

  // Role facts of (x, y) seen through every basic role.
  std::vector<int> roles_between(Sym x, Sym y) const {
    std::vector<int> out;
    for (int r = 0; r < cl.num_roles(); ++r) {
      const BasicRole& q = cl.role_at(r);
      Atom f = q.inverted ? fact(q.base, {y, x}) : fact(q.base, {x, y});
      if (roles.count(f)) out.push_back(r);
    }
    return out;
  }

  bool consistent() const {
    for (const auto& [ind, v] : member)
      for (int i = 0; i < cl.num_concepts(); ++i) {
        if (!v[i]) continue;
        for (int j = i; j < cl.num_concepts(); ++j)
          if (v[j] && cl.concept_disj(i, j)) return false;
      }
    for (const Atom& f : roles) {
      std::vector<int> rs = roles_between(f.args[0].name, f.args[1].name);
      for (std::size_t i = 0; i < rs.size(); ++i)
        for (std::size_t j = i; j < rs.size(); ++j)
          if (cl.role_disj(rs[i], rs[j])) return false;
    }
    for (const BasicRole& q : cl.functional_roles()) {
      std::map<Sym, Sym> succ;
      for (const Atom& f : roles) {
        if (f.pred != q.base) continue;
        Sym from = q.inverted ? f.args[1].name : f.args[0].name;
        Sym to = q.inverted ? f.args[0].name : f.args[1].name;
        auto [it, fresh] = succ.emplace(from, to);
        if (!fresh && it->second != to) return false;
      }
    }
    return true;
  }

  State assertions() const {
    State out = passthrough;
    for (const auto& [ind, v] : member)
      for (int i = 0; i < cl.num_concepts(); ++i)
        if (v[i] && cl.concept_at(i).is_named()) out.insert(fact(cl.concept_at(i).name, {ind}));
    out.insert(roles.begin(), roles.end());
    return out;
  }
};

}  // namespace

AboxSaturation saturate_abox(const Tbox& tbox, const State& state) {
  Saturation sat(tbox, state);
  AboxSaturation out;
  out.consistent = sat.consistent();
  out.member = std::move(sat.member);
  out.roles = std::move(sat.roles);
  out.other = std::move(sat.passthrough);
  return out;
}

State abox_closure(const Tbox& tbox, const State& state) {
  Saturation sat(tbox, state);
  if (!sat.consistent()) throw InconsistentKb("state is inconsistent with the TBox");
  return sat.assertions();
}

bool is_consistent(const Tbox& tbox, const State& state) { return Saturation(tbox, state).consistent(); }

bool entails_assertion(const Tbox& tbox, const State& state, const Atom& atom) {
  Saturation sat(tbox, state);
  if (!sat.consistent()) return true;
  return sat.assertions().count(atom) != 0;
}

std::vector<Atom> single_step_consequences(const Tbox& tbox, const Atom& f) {
  const ClosureIndex& cl = tbox.closure();
  std::vector<Atom> out{f};
  if (f.arity() == 1 && tbox.is_concept(f.pred)) {
    for (const BasicConcept& b : cl.concept_supers(BasicConcept::named(f.pred)))
      if (b.is_named()) out.push_back(Atom(b.name, f.args));
  } else if (f.arity() == 2 && tbox.is_role(f.pred)) {
    const Term& x = f.args[0];
    const Term& y = f.args[1];
    for (const BasicRole& r : cl.role_supers(BasicRole{f.pred, false}))
      out.push_back(r.inverted ? Atom(r.base, {y, x}) : Atom(r.base, {x, y}));
    for (const BasicConcept& b : cl.concept_supers(BasicConcept::exists(BasicRole{f.pred, false})))
      if (b.is_named()) out.push_back(Atom(b.name, {x}));
    for (const BasicConcept& b : cl.concept_supers(BasicConcept::exists(BasicRole{f.pred, true})))
      if (b.is_named()) out.push_back(Atom(b.name, {y}));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace cekab
