#include <gtest/gtest.h>

#include "cekab/bench.hpp"
#include "cekab/sampling.hpp"
#include "test_util.hpp"

using namespace cekab;
using cekab::testing::closure_equal;

namespace {

const char* kMoveDomain = R"(
(define (domain move4)
  (:requirements :adl :negative-preconditions :conditional-effects)
  (:predicates (on ?x ?y) (on_block ?x ?y) (on_table ?x ?y) (Block ?x) (Table ?x) (Blocked ?x)
               (Marked ?x) (p ?x))
  (:action move
    :parameters (?x ?y ?z)
    :precondition (and (know (on ?x ?y)) (not (know (Blocked ?x))) (not (know (Blocked ?z))))
    :effect (and (when (know (Block ?y)) (not (on_block ?x ?y)))
                 (when (know (Table ?y)) (not (on_table ?x ?y)))
                 (when (know (Block ?z)) (on_block ?x ?z))
                 (when (know (Table ?z)) (on_table ?x ?z))))
  (:action mark-blocks
    :parameters ()
    :effect (forall (?y) (when (know (Block ?y)) (Marked ?y))))
  (:action noop
    :parameters (?x)
    :precondition (know (Block ?x)))
  (:action drop-on
    :parameters (?x ?y)
    :effect (not (on ?x ?y)))
  (:action flip
    :parameters (?x)
    :effect (and (p ?x) (not (p ?x))))
  (:action never
    :parameters ()
    :precondition (know (Table b1))))
)";

const char* kMoveProblem = R"(
(define (problem move4-example)
  (:domain move4)
  (:objects b1 b2 b3 t)
  (:init (on_block b1 b2) (on_table b3 t))
  (:goal (know (on_block b1 b3))))
)";

CekabTask move4_task() { return load_cekab_task(kMoveDomain, kMoveProblem, example1_tbox()); }

GroundAction ga(const char* name, std::vector<Sym> args = {}) { return GroundAction{name, std::move(args)}; }

CekabTask blocks_on_example_state() {
  BenchFiles f = blocks_files(3);
  const char* problem = R"(
(define (problem blocks-example)
  (:domain blocks)
  (:objects b1 b2 b3 t)
  (:init (on_block b1 b2) (on_table b3 t))
  (:goal (know (on b1 b3))))
)";
  return load_cekab_task(f.domain, problem, parse_tbox(f.ontology));
}

}  // namespace

TEST(AssociatedUpdate, FourEffectMove) {
  CekabTask t = move4_task();
  Update u = associated_update(t, t.init, ga("move", {"b1", "b2", "b3"}));
  EXPECT_EQ(u.deletions, State{fact("on_block", {"b1", "b2"})});
  EXPECT_EQ(u.insertions, State{fact("on_block", {"b1", "b3"})});
}

TEST(AssociatedUpdate, NoSatisfiedConditions) {
  CekabTask t = move4_task();
  // No individual is known to be a block in the empty state.
  Update u = associated_update(t, {}, ga("mark-blocks"));
  EXPECT_TRUE(u.empty());
  EXPECT_TRUE(associated_update(t, t.init, ga("noop", {"b1"})).empty());
}

TEST(AssociatedUpdate, ExtraVariablesRangeOverBlocks) {
  CekabTask t = move4_task();
  Update u = associated_update(t, t.init, ga("mark-blocks"));
  EXPECT_EQ(u.insertions, (State{fact("Marked", {"b1"}), fact("Marked", {"b2"}), fact("Marked", {"b3"})}));
  EXPECT_TRUE(u.deletions.empty());
}

TEST(AssociatedUpdate, PreconditionFailed) {
  CekabTask t = move4_task();
  EXPECT_THROW(associated_update(t, t.init, ga("move", {"b3", "b2", "b1"})), PreconditionFailed);
  EXPECT_THROW(associated_update(t, t.init, ga("never")), PreconditionFailed);
}

TEST(StepCekab, WorkedMove) {
  CekabTask t = move_task();
  State r = step_cekab(t, t.init, ga("move", {"b1", "b2", "b3"}));
  State cl = abox_closure(t.tbox, r);
  EXPECT_TRUE(cl.count(fact("on_block", {"b1", "b3"})));
  EXPECT_TRUE(cl.count(fact("Block", {"b2"})));
  EXPECT_FALSE(cl.count(fact("on", {"b1", "b2"})));
  EXPECT_TRUE(closure_equal(t.tbox, r,
                            {fact("on_block", {"b1", "b3"}), fact("Block", {"b2"}), fact("Blocked", {"b2"}),
                             fact("on_table", {"b3", "t"})}));
  Update u = associated_update(t, t.init, ga("move", {"b1", "b2", "b3"}));
  EXPECT_TRUE(closure_equal(t.tbox, r, oracle_update(t.tbox, t.init, u)));
}

TEST(StepCekab, FourEffectMoveKeepsOn) {
  // Only on_block(b1,b2) is requested to go, so its consequence on(b1,b2) stays.
  CekabTask t = move4_task();
  State r = step_cekab(t, t.init, ga("move", {"b1", "b2", "b3"}));
  State cl = abox_closure(t.tbox, r);
  EXPECT_TRUE(cl.count(fact("on_block", {"b1", "b3"})));
  EXPECT_TRUE(cl.count(fact("on", {"b1", "b2"})));
  EXPECT_FALSE(cl.count(fact("on_block", {"b1", "b2"})));
  Update u = associated_update(t, t.init, ga("move", {"b1", "b2", "b3"}));
  EXPECT_TRUE(closure_equal(t.tbox, r, oracle_update(t.tbox, t.init, u)));
}

TEST(StepCekab, NoopKeepsClosure) {
  CekabTask t = move4_task();
  EXPECT_TRUE(closure_equal(t.tbox, step_cekab(t, t.init, ga("noop", {"b2"})), t.init));
}

TEST(StepCekab, SameAtomInsertedAndDeleted) {
  CekabTask t = move4_task();
  EXPECT_THROW(step_cekab(t, t.init, ga("flip", {"b1"})), IncompatibleUpdate);
}

TEST(StepEkab, MoveOntoBlockedTargetIsInconsistent) {
  CekabTask t = move_task();
  EXPECT_THROW(step_ekab(t, t.init, ga("move", {"b1", "b2", "b3"})), InconsistentSuccessor);
}

TEST(StepEkab, DeletingImplicitFactChangesNothing) {
  CekabTask t = move4_task();
  State r = step_ekab(t, t.init, ga("drop-on", {"b1", "b2"}));
  EXPECT_EQ(r, t.init);
  EXPECT_TRUE(eval_ecq(r, t.tbox, f_bracket(parse_atom("on(b1,b2)"))));
}

TEST(StepEkab, EmptyEffectIsIdentity) {
  CekabTask t = move4_task();
  EXPECT_EQ(step_ekab(t, t.init, ga("noop", {"b2"})), t.init);
  EXPECT_THROW(step_ekab(t, t.init, ga("noop", {"t"})), PreconditionFailed);
}

TEST(StepEkab, InsertionTakesPrecedence) {
  CekabTask t = move4_task();
  State r = step_ekab(t, t.init, ga("flip", {"b1"}));
  EXPECT_TRUE(r.count(fact("p", {"b1"})));
}

TEST(ValidatePlan, BlocksPickUpPutDown) {
  CekabTask t = blocks_on_example_state();
  Plan plan = parse_plan("(pick-up b1 b2)\n(put-down b1 b3)\n");
  Verdict v = validate_plan(t, plan, Semantics::Cekab);
  EXPECT_TRUE(v.valid) << render_verdict(v, plan);
  EXPECT_TRUE(v.goal_satisfied);
  ASSERT_EQ(v.trace.size(), 3u);
  State cl = abox_closure(t.tbox, v.trace.back());
  EXPECT_TRUE(cl.count(fact("on_block", {"b1", "b3"})));
  EXPECT_FALSE(cl.count(fact("Holding", {"b1"})));
  EXPECT_FALSE(cl.count(fact("Blocked", {"b1"})));

  Verdict e = validate_plan(t, plan, Semantics::Ekab);
  EXPECT_FALSE(e.valid);
  EXPECT_EQ(e.failed_step, 1);
  EXPECT_EQ(e.failure_kind, "InconsistentSuccessor");
}

TEST(ValidatePlan, EmptyPlanAndInapplicableAction) {
  CekabTask t = move4_task();
  t.goal = f_bracket(parse_atom("Blocked(b2)"));
  Verdict v = validate_plan(t, {}, Semantics::Cekab);
  EXPECT_TRUE(v.valid);
  EXPECT_EQ(v.trace.size(), 1u);

  Verdict bad = validate_plan(t, {ga("never"), ga("never")}, Semantics::Cekab);
  EXPECT_FALSE(bad.valid);
  EXPECT_EQ(bad.failed_step, 0);
  EXPECT_EQ(bad.failure_kind, "PreconditionFailed");
  EXPECT_NE(render_verdict(bad, {ga("never"), ga("never")}).find("never"), std::string::npos);
}

TEST(ValidatePlan, GoalNotReached) {
  CekabTask t = move4_task();
  Verdict v = validate_plan(t, {ga("noop", {"b1"})}, Semantics::Cekab);
  EXPECT_FALSE(v.valid);
  EXPECT_FALSE(v.goal_satisfied);
  EXPECT_EQ(v.failed_step, -1);
}

TEST(ValidatePlan, UnknownActionOrArity) {
  CekabTask t = move4_task();
  EXPECT_FALSE(validate_plan(t, {ga("fly", {"b1"})}, Semantics::Cekab).valid);
  EXPECT_FALSE(validate_plan(t, {ga("move", {"b1"})}, Semantics::Cekab).valid);
  EXPECT_FALSE(validate_plan(t, {ga("noop", {"zz"})}, Semantics::Cekab).valid);
}

TEST(BoundedSearch, TwoBlocks) {
  CekabTask t = blocks_task(2);
  auto plan = bounded_search(t, 4, Semantics::Cekab);
  ASSERT_TRUE(plan.has_value());
  EXPECT_LE(plan->size(), 2u);
  EXPECT_TRUE(validate_plan(t, *plan, Semantics::Cekab).valid);
}

TEST(BoundedSearch, ThreeBlocksShortest) {
  CekabTask t = blocks_task(3);
  auto plan = bounded_search(t, 6, Semantics::Cekab);
  ASSERT_TRUE(plan.has_value());
  // b2 onto b3, then b1 onto b2.
  EXPECT_EQ(plan->size(), 4u);
  EXPECT_FALSE(bounded_search(t, 3, Semantics::Cekab).has_value());
}

TEST(BoundedSearch, UnreachableAndTrivialGoals) {
  CekabTask t = move4_task();
  t.goal = f_atom(parse_atom("Marked(t)"));
  EXPECT_FALSE(bounded_search(t, 3, Semantics::Cekab).has_value());
  t.goal = f_bracket(parse_atom("Block(b1)"));
  auto p = bounded_search(t, 0, Semantics::Cekab);
  ASSERT_TRUE(p.has_value());
  EXPECT_TRUE(p->empty());
}

TEST(BoundedSearch, Limits) {
  CekabTask t = blocks_task(3);
  EXPECT_THROW(bounded_search(t, kMaxSearchDepth + 1, Semantics::Cekab), SearchSpaceLimitExceeded);
  EXPECT_THROW(bounded_search(t, 6, Semantics::Cekab, 3), SearchSpaceLimitExceeded);
}

TEST(BoundedSearch, MoveTaskDiffersBetweenSemantics) {
  CekabTask t = move_task();
  auto c = bounded_search(t, 2, Semantics::Cekab);
  ASSERT_TRUE(c.has_value());
  EXPECT_EQ(c->size(), 1u);
  EXPECT_FALSE(bounded_search(t, 2, Semantics::Ekab).has_value());
}

TEST(PlanIo, ParseAndPrint) {
  Plan p = parse_plan("; comment\n(move b1 b2 b3)\n\n(MOVE b3 t b1) ; trailing\n");
  ASSERT_EQ(p.size(), 2u);
  EXPECT_EQ(p[0], ga("move", {"b1", "b2", "b3"}));
  EXPECT_EQ(print_plan(p), "(move b1 b2 b3)\n(move b3 t b1)\n");
  EXPECT_EQ(parse_plan(print_plan(p)), p);
  EXPECT_THROW(parse_plan("(move b1"), ParseError);
  EXPECT_THROW(parse_plan("move b1"), ParseError);
  EXPECT_THROW(parse_plan("((move))"), ParseError);
}

TEST(ValidateTask, Errors) {
  CekabTask ok = move4_task();
  EXPECT_NO_THROW(validate_task(ok));

  CekabTask open_goal = ok;
  open_goal.goal = f_bracket(parse_atom("Block(?x)"));
  EXPECT_THROW(validate_task(open_goal), InvalidTask);

  CekabTask bad_init = ok;
  bad_init.init.insert(fact("on_block", {"b1", "b3"}));
  EXPECT_THROW(validate_task(bad_init), InvalidTask);

  CekabTask foreign = ok;
  foreign.init.insert(fact("Block", {"zz"}));
  EXPECT_THROW(validate_task(foreign), InvalidTask);

  CekabTask free_pre = ok;
  free_pre.actions[0].pre = f_bracket(parse_atom("Block(?w)"));
  EXPECT_THROW(validate_task(free_pre), InvalidTask);

  CekabTask arity = ok;
  arity.actions[0].effects[0].add.push_back(parse_atom("Block(?x,?y)"));
  EXPECT_THROW(validate_task(arity), InvalidTask);
}

TEST(TasksProperty, EmptyTboxSemanticsAgree) {
  Rng rng(51);
  int compared = 0;
  for (int i = 0; i < 150; ++i) {
    CekabTask t = random_cekab_task(rng);
    t.tbox = Tbox{};
    TaskRunner run(t);
    State s = t.init;
    for (int step = 0; step < 4; ++step) {
      std::set<Sym> dom = run.domain(s);
      EcqEvaluator evd(s, t.tbox, &dom);
      std::vector<GroundAction> acts = run.ground_actions();
      std::optional<State> next;
      for (const GroundAction& a : acts) {
        auto c = run.try_step(evd, s, a, Semantics::Cekab);
        if (!c) continue;
        Update u = run.associated_update(s, a);
        bool overlap = false;
        for (const Atom& x : u.insertions) overlap |= u.deletions.count(x) != 0;
        if (overlap) continue;
        auto e = run.try_step(evd, s, a, Semantics::Ekab);
        ASSERT_TRUE(e.has_value()) << to_string(a);
        ASSERT_EQ(*c, *e) << to_string(a);
        ++compared;
        if (!next) next = c;
      }
      if (!next) break;
      s = *next;
    }
  }
  EXPECT_GT(compared, 200);
}

TEST(TasksProperty, SteppingPreservesConsistency) {
  Rng rng(52);
  for (int i = 0; i < 100; ++i) {
    CekabTask t = random_cekab_task(rng);
    for (Semantics sem : {Semantics::Cekab, Semantics::Ekab}) {
      Plan p = random_walk_cekab(rng, t, 5, sem);
      Verdict v = validate_plan(t, p, sem);
      ASSERT_EQ(v.trace.size(), p.size() + 1) << render_verdict(v, p);
      for (const State& s : v.trace) ASSERT_TRUE(is_consistent(t.tbox, s)) << to_string(s);
    }
  }
}

TEST(TasksProperty, CekabSuccessorsMatchOracle) {
  Rng rng(53);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    CekabTask t = random_cekab_task(rng);
    TaskRunner run(t);
    Plan p = random_walk_cekab(rng, t, 4, Semantics::Cekab);
    State s = t.init;
    for (const GroundAction& a : p) {
      Update u = run.associated_update(s, a);
      State next = run.step_cekab(s, a);
      if (abox_closure(t.tbox, s).size() <= oracle_limit()) {
        ASSERT_TRUE(closure_equal(t.tbox, next, oracle_update(t.tbox, s, u)));
        ++checked;
      }
      s = next;
    }
  }
  EXPECT_GT(checked, 50);
}
