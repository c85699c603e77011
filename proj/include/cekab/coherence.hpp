#pragma once

#include <map>
#include <string>

#include "cekab/datalog.hpp"
#include "cekab/dllite.hpp"

namespace cekab {

struct Update {
  State insertions;
  State deletions;

  bool empty() const { return insertions.empty() && deletions.empty(); }
  friend bool operator==(const Update&, const Update&) = default;
};

/// Generated predicate names for one user predicate.
struct UpdateNames {
  Sym ins_request, del_request, ins, del, closure;
};
UpdateNames update_names(Sym pred);
Sym incompatible_predicate();

/// State plus the request atoms for every insertion and deletion.
State encode_dataset(const State& state, const Update& update);

struct UpdateProgram {
  Program program;
  std::map<Sym, int> arity;   // predicates the program handles
  std::map<Sym, Sym> ins_of;  // ins_p -> p
  std::map<Sym, Sym> del_of;  // del_p -> p
};

/// Program computing the coherence update for predicates of the TBox and of
/// `extra`. Predicates outside the TBox only get the direct operations.
UpdateProgram build_update_program(const Tbox& tbox, const Signature& extra = {});

struct DerivedOps {
  State insertions;
  State deletions;
  bool incompatible = false;
};
DerivedOps derived_operations(const UpdateProgram& prog, const State& state, const Update& update);

bool is_compatible(const Tbox& tbox, const Update& update);

State apply_update(const Tbox& tbox, const State& state, const Update& update);
/// Same, reusing a program built for a signature covering state and update.
State apply_update(const Tbox& tbox, const UpdateProgram& prog, const State& state, const Update& update);

/// Size gate for the brute-force oracle; CEKABC_ORACLE_LIMIT overrides 18.
std::size_t oracle_limit();
/// A'' union A+ for the unique maximal subset A'' of cl_T(A).
State oracle_update(const Tbox& tbox, const State& state, const Update& update);

/// Lines `ins p(c1,c2)` or `del p(c1)`; `#` starts a comment.
Update parse_update(const std::string& text);
std::string to_string(const Update& u);

}  // namespace cekab
