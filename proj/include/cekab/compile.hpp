#pragma once

#include <optional>
#include <string>

#include "cekab/pddl.hpp"
#include "cekab/tasks.hpp"

namespace cekab {

enum class Scheme { Ekab, Cekab };
enum class Variant { DeriveUp, SetUp };

struct CompileOptions {
  Variant variant = Variant::DeriveUp;
  bool tseitin = false;
  Scheme scheme = Scheme::Cekab;
};

Sym primed(Sym pred);
Sym updating_predicate();
Sym update_action_name();

/// Throws LoadError when a user predicate or action name clashes with a
/// generated name.
void check_name_hygiene(const CekabTask& task);

PddlTask compile_ekab(const CekabTask& task);
PddlTask compile_cekab(const CekabTask& task, const CompileOptions& opts = {});
/// Dispatches on opts.scheme and applies the Tseitin pass when requested.
PddlTask compile(const CekabTask& task, const CompileOptions& opts);

/// Replaces every non-literal condition by a fresh derived atom aux_k.
PddlTask tseitin_transform(const PddlTask& task);

/// Reduction of a PDDL task without derived predicates to a ceKAB task over
/// the empty TBox whose effects never insert and delete the same fact.
CekabTask split_conflicting_effects(const PddlTask& task);

/// Reads a ceKAB task from a PDDL pair whose conditions may use
/// `(know ...)` brackets. The domain must not declare derived predicates.
CekabTask cekab_from_pddl(const PddlTask& pddl, const Tbox& tbox);
CekabTask load_cekab_task(const std::string& domain_text, const std::string& problem_text, const Tbox& tbox);
/// Inverse of cekab_from_pddl for printing a source task.
PddlTask cekab_to_pddl(const CekabTask& task);

/// Inserts a_update after every request action whose execution leaves
/// updating() true. nullopt when some action of the result is inapplicable.
std::optional<Plan> interleave_updates(const PddlTask& compiled, const Plan& plan);

struct CompileStats {
  std::size_t base_predicates = 0;
  std::size_t derived_predicates = 0;
  std::size_t rules = 0;
  std::size_t actions = 0;
  int strata = 0;
};
CompileStats compile_stats(const PddlTask& t);

}  // namespace cekab
