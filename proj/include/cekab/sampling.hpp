#pragma once

#include <random>

#include "cekab/compile.hpp"

namespace cekab {

/// Random small instances for the property suites. All generators are
/// deterministic for a given engine state.
using Rng = std::mt19937_64;

struct SampleBounds {
  int constants = 4;
  int concepts = 4;
  int roles = 3;
  int axioms = 8;
};

/// Valid TBox over concepts A0.. and roles r0.. (every name declared).
Tbox random_tbox(Rng& rng, const SampleBounds& b = {});
std::vector<Sym> sample_constants(int n);
/// Random ground atom over the TBox signature.
Atom random_fact(Rng& rng, const Tbox& t, const std::vector<Sym>& consts);
State random_state(Rng& rng, const Tbox& t, const std::vector<Sym>& consts, int max_facts);
/// Retries until the state is consistent; the empty state is the fallback.
State random_consistent_state(Rng& rng, const Tbox& t, const std::vector<Sym>& consts, int max_facts);
Update random_update(Rng& rng, const Tbox& t, const std::vector<Sym>& consts, int max_ins, int max_del);

/// Random ECQ over the TBox signature whose free variables are among `free`.
Formula random_ecq(Rng& rng, const Tbox& t, const std::vector<Sym>& consts, const std::vector<Sym>& free,
                   int depth);

/// Small ceKAB task (at most 3 actions and 4 objects) with a consistent
/// initial state.
CekabTask random_cekab_task(Rng& rng, const SampleBounds& b = {});

/// Small PDDL task without derived predicates. With `conflicts`, some
/// action both adds and deletes atoms of one predicate.
PddlTask random_pddl_task(Rng& rng, bool conflicts);

/// Random walk of applicable actions, at most `len` steps.
Plan random_walk_cekab(Rng& rng, const CekabTask& t, int len, Semantics sem);
Plan random_walk_pddl(Rng& rng, const PddlTask& t, int len);

}  // namespace cekab
