#include "cekab/bench.hpp"

namespace cekab {

const std::string& example1_tbox_text() {
  static const std::string text =
      "on_block [= on\n"
      "ex on_block- [= Block\n"
      "funct on_block\n"
      "on_table [= on\n"
      "ex on_table- [= Table\n"
      "Block [= not Table\n"
      "Block == ex on\n"
      "ex on_block- [= Blocked\n"
      "ex on_block [= not ex on_table\n";
  return text;
}

Tbox example1_tbox() { return parse_tbox(example1_tbox_text()); }

State example1_abox() { return {fact("on_block", {"b1", "b2"}), fact("on_table", {"b3", "t"})}; }

namespace {

const char* kMoveDomain = R"((define (domain blocks-move)
  (:requirements :adl :negative-preconditions :conditional-effects)
  (:predicates (on ?x ?y) (on_block ?x ?y) (on_table ?x ?y) (Block ?x) (Table ?x) (Blocked ?x))
  (:action move
    :parameters (?x ?y ?z)
    :precondition (and (know (on ?x ?y)) (not (know (Blocked ?x))) (not (know (Blocked ?z))))
    :effect (and (not (on ?x ?y))
                 (when (know (Block ?z)) (on_block ?x ?z))
                 (when (know (Table ?z)) (on_table ?x ?z)))))
)";

const char* kMoveProblem = R"((define (problem example)
  (:domain blocks-move)
  (:objects b1 b2 b3 t)
  (:init (on_block b1 b2) (on_table b3 t))
  (:goal (know (on_block b1 b3))))
)";

const char* kBlocksDomain = R"((define (domain blocks)
  (:requirements :adl :negative-preconditions :conditional-effects)
  (:predicates (on ?x ?y) (on_block ?x ?y) (on_table ?x ?y) (Block ?x) (Table ?x) (Blocked ?x) (Holding ?x))
  (:action pick-up
    :parameters (?x ?y)
    :precondition (and (know (on ?x ?y)) (not (know (Blocked ?x))) (not (exists (?z) (know (Holding ?z)))))
    :effect (and (not (on ?x ?y)) (Holding ?x)
                 (when (know (Block ?y)) (not (Blocked ?y)))))
  (:action put-down
    :parameters (?x ?z)
    :precondition (and (know (Holding ?x)) (not (know (Blocked ?z))))
    :effect (and (not (Holding ?x)) (not (Blocked ?x))
                 (when (know (Block ?z)) (on_block ?x ?z))
                 (when (know (Table ?z)) (on_table ?x ?z)))))
)";

}  // namespace

CekabTask move_task() { return load_cekab_task(kMoveDomain, kMoveProblem, example1_tbox()); }

BenchFiles blocks_files(int n) {
  if (n < 1) throw InvalidTask("blocks instances need at least one block");
  BenchFiles f;
  f.name = "blocks-" + std::to_string(n);
  f.domain = kBlocksDomain;
  f.ontology = "# Blocks ontology: the running example plus Holding [= Blocked\n" + example1_tbox_text() +
               "Holding [= Blocked\n";
  std::string objs, init, goal;
  for (int i = 1; i <= n; ++i) {
    std::string b = "b" + std::to_string(i);
    objs += b + " ";
    init += "\n    (on_table " + b + " t)";
    if (i < n) goal += " (know (on_block " + b + " b" + std::to_string(i + 1) + "))";
  }
  if (n == 1) goal = " (know (on_table b1 t))";
  f.problem = "(define (problem " + f.name + ")\n  (:domain blocks)\n  (:objects " + objs + "t)\n  (:init" + init +
              ")\n  (:goal (and" + goal + ")))\n";
  return f;
}

CekabTask blocks_task(int n) {
  BenchFiles f = blocks_files(n);
  return load_cekab_task(f.domain, f.problem, parse_tbox(f.ontology));
}

}  // namespace cekab
