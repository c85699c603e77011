#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "cekab/core.hpp"

namespace cekab {

struct BasicRole {
  Sym base;
  bool inverted = false;

  BasicRole inverse() const { return BasicRole{base, !inverted}; }
  friend bool operator==(const BasicRole&, const BasicRole&) = default;
  friend auto operator<=>(const BasicRole&, const BasicRole&) = default;
};

struct BasicConcept {
  enum class Kind { Named, Exists };
  Kind kind = Kind::Named;
  Sym name;        // Named
  BasicRole role;  // Exists

  static BasicConcept named(Sym a) { return BasicConcept{Kind::Named, a, {}}; }
  static BasicConcept exists(BasicRole q) { return BasicConcept{Kind::Exists, {}, q}; }
  bool is_named() const { return kind == Kind::Named; }
  friend bool operator==(const BasicConcept&, const BasicConcept&) = default;
  friend auto operator<=>(const BasicConcept&, const BasicConcept&) = default;
};

struct TboxAxiom {
  enum class Kind { ConceptIncl, RoleIncl, Funct };
  Kind kind = Kind::ConceptIncl;
  BasicConcept lhs_c, rhs_c;
  BasicRole lhs_r, rhs_r;  // RoleIncl; Funct uses lhs_r
  bool negated_rhs = false;

  static TboxAxiom concept_incl(BasicConcept l, BasicConcept r, bool neg = false);
  static TboxAxiom role_incl(BasicRole l, BasicRole r, bool neg = false);
  static TboxAxiom funct(BasicRole q);

  bool positive() const { return kind != Kind::Funct && !negated_rhs; }
  friend bool operator==(const TboxAxiom&, const TboxAxiom&) = default;
  friend auto operator<=>(const TboxAxiom&, const TboxAxiom&) = default;
};

std::string to_string(const BasicRole& q);
std::string to_string(const BasicConcept& b);
/// Native text form, e.g. `ex on_block- [= Block`.
std::string to_string(const TboxAxiom& ax);

class ClosureIndex;

/// Set of axioms plus the concept/role signature they range over.
class Tbox {
 public:
  Tbox() = default;

  void declare_concept(Sym a);
  void declare_role(Sym p);
  void add(const TboxAxiom& ax);

  const std::vector<TboxAxiom>& axioms() const { return axioms_; }
  const Signature& signature() const { return sig_; }
  std::vector<Sym> concepts() const;
  std::vector<Sym> roles() const;
  bool is_concept(Sym s) const;
  bool is_role(Sym s) const;
  bool empty() const { return axioms_.empty(); }

  /// Indexed deductive closure, computed on first use.
  const ClosureIndex& closure() const;
  /// Throws InvalidTbox if a functional role is specialised in cl(T).
  void check_valid() const;

  friend bool operator==(const Tbox& a, const Tbox& b) { return a.axioms_ == b.axioms_ && a.sig_.all() == b.sig_.all(); }

 private:
  std::vector<TboxAxiom> axioms_;
  Signature sig_;
  mutable std::shared_ptr<const ClosureIndex> closure_;
};

/// cl(T) as reachability tables over basic concepts and basic roles.
class ClosureIndex {
 public:
  explicit ClosureIndex(const Tbox& t);

  int concept_id(const BasicConcept& b) const;  // -1 if outside signature
  int role_id(const BasicRole& q) const;
  const BasicConcept& concept_at(int i) const { return concepts_[i]; }
  const BasicRole& role_at(int i) const { return roles_[i]; }
  int num_concepts() const { return static_cast<int>(concepts_.size()); }
  int num_roles() const { return static_cast<int>(roles_.size()); }

  bool concept_sub(int a, int b) const { return pc_[a][b]; }  // reflexive
  bool concept_disj(int a, int b) const { return nc_[a][b]; }
  bool role_sub(int a, int b) const { return pr_[a][b]; }
  bool role_disj(int a, int b) const { return nr_[a][b]; }
  bool functional(int r) const { return funct_[r]; }

  /// Non-reflexive positive supersumers / subsumees and disjoint partners.
  std::vector<BasicConcept> concept_supers(const BasicConcept& b) const;
  std::vector<BasicConcept> concept_subs(const BasicConcept& b) const;
  std::vector<BasicConcept> concept_disjoint(const BasicConcept& b) const;
  std::vector<BasicRole> role_supers(const BasicRole& q) const;
  std::vector<BasicRole> role_subs(const BasicRole& q) const;
  std::vector<BasicRole> role_disjoint(const BasicRole& q) const;
  std::vector<BasicRole> functional_roles() const;

  /// All entailed axioms with reflexive inclusions suppressed, sorted.
  std::vector<TboxAxiom> axioms() const;

 private:
  std::vector<BasicConcept> concepts_;
  std::vector<BasicRole> roles_;
  std::vector<std::vector<char>> pc_, nc_, pr_, nr_;
  std::vector<char> funct_;
};

Tbox tbox_closure(const Tbox& tbox);

/// Positive saturation of a state: basic-concept memberships per individual
/// (indexed by ClosureIndex concept ids) and entailed role facts.
struct AboxSaturation {
  std::map<Sym, std::vector<char>> member;
  State roles;
  State other;  // atoms outside the TBox signature
  bool consistent = true;
};

AboxSaturation saturate_abox(const Tbox& tbox, const State& state);

/// Entailed unary and binary assertions; other atoms pass through.
State abox_closure(const Tbox& tbox, const State& state);
bool is_consistent(const Tbox& tbox, const State& state);
bool entails_assertion(const Tbox& tbox, const State& state, const Atom& atom);

/// Consequences of one assertion taken from cl(T) in a single step.
std::vector<Atom> single_step_consequences(const Tbox& tbox, const Atom& fact);

/// Native TBox text format. Predicate kinds are resolved with `hint` first
/// and then by usage; unresolved names default to concepts.
Tbox parse_tbox(const std::string& text, const Signature* hint = nullptr);
std::string print_tbox(const Tbox& t);
/// Loads `.ttl` as Turtle and anything else as native text.
Tbox load_ontology(const std::string& path, const Signature* hint = nullptr);
Tbox parse_turtle(const std::string& text, const Signature* hint = nullptr);

}  // namespace cekab
