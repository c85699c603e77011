#include <gtest/gtest.h>

#include <cstdlib>

#include "cekab/bench.hpp"
#include "cekab/coherence.hpp"
#include "cekab/sampling.hpp"
#include "test_util.hpp"

using namespace cekab;
using cekab::testing::closure_equal;
using cekab::testing::data_path;
using cekab::testing::read_file;

namespace {

std::set<std::string> rule_strings(const Program& p) {
  std::set<std::string> out;
  for (const auto& r : p.rules()) out.insert(to_string(r));
  return out;
}

Update worked_update() { return parse_update("del on(b1,b2)\nins on_block(b1,b3)\n"); }

bool program_says_incompatible(const Tbox& t, const State& a, const Update& u) {
  UpdateProgram up = build_update_program(t);
  return derived_operations(up, a, u).incompatible;
}

}  // namespace

TEST(UpdateProgram, ContainsWorkedExampleRules) {
  auto rules = rule_strings(build_update_program(example1_tbox()).program);
  EXPECT_TRUE(rules.count("del_on_block(?x,?y) <- on_block(?x,?y), del_on_request(?x,?y)"));
  EXPECT_TRUE(rules.count("incompatible_update() <- ins_on_block_request(?x,?y), del_on_request(?x,?y)"));
  EXPECT_TRUE(rules.count("ins_on_block(?x,?y) <- not on_block(?x,?y), ins_on_block_request(?x,?y)"));
  EXPECT_TRUE(rules.count("del_on_block(?x,?y) <- on_block(?x,?y), ins_on_block_request(?x,?z), ?y != ?z"));
}

TEST(UpdateProgram, EmptyTboxHasOnlyDirectRules) {
  Signature sig;
  sig.add("p", 1, PredKind::General);
  sig.add("r", 2, PredKind::General);
  UpdateProgram up = build_update_program(Tbox{}, sig);
  EXPECT_EQ(rule_strings(up.program), (std::set<std::string>{
                                          "del_p(?x) <- p(?x), del_p_request(?x)",
                                          "ins_p(?x) <- not p(?x), ins_p_request(?x)",
                                          "del_r(?x,?y) <- r(?x,?y), del_r_request(?x,?y)",
                                          "ins_r(?x,?y) <- not r(?x,?y), ins_r_request(?x,?y)",
                                          "incompatible_update() <- ins_p_request(?x), del_p_request(?x)",
                                          "incompatible_update() <- ins_r_request(?x,?y), del_r_request(?x,?y)",
                                      }));
  EXPECT_EQ(up.ins_of.at("ins_p"), Sym("p"));
  EXPECT_EQ(up.del_of.at("del_r"), Sym("r"));
}

TEST(UpdateProgram, IsStratified) {
  EXPECT_NO_THROW(stratify(build_update_program(example1_tbox()).program));
}

TEST(UpdateProgram, InvalidTbox) {
  EXPECT_THROW(build_update_program(parse_tbox("role r\nrole s\nr [= s\nfunct s\n")), InvalidTbox);
}

TEST(UpdateNames, LowercaseGeneratedNames) {
  UpdateNames n = update_names("Block");
  EXPECT_EQ(n.ins_request.str(), "ins_block_request");
  EXPECT_EQ(n.del_request.str(), "del_block_request");
  EXPECT_EQ(n.ins.str(), "ins_block");
  EXPECT_EQ(n.del.str(), "del_block");
  EXPECT_EQ(n.closure.str(), "ins_block_closure");
  EXPECT_EQ(incompatible_predicate().str(), "incompatible_update");
}

TEST(EncodeDataset, WorkedExample) {
  State d = encode_dataset(example1_abox(), worked_update());
  EXPECT_EQ(d, (State{fact("on_block", {"b1", "b2"}), fact("on_table", {"b3", "t"}),
                      fact("del_on_request", {"b1", "b2"}), fact("ins_on_block_request", {"b1", "b3"})}));
}

TEST(EncodeDataset, EmptyAndSingleInsertion) {
  EXPECT_EQ(encode_dataset(example1_abox(), {}), example1_abox());
  Update u;
  u.insertions.insert(fact("Block", {"b2"}));
  State d = encode_dataset(example1_abox(), u);
  State expect = example1_abox();
  expect.insert(fact("ins_block_request", {"b2"}));
  EXPECT_EQ(d, expect);
}

TEST(IsCompatible, Examples) {
  Tbox t = example1_tbox();
  EXPECT_FALSE(is_compatible(t, parse_update("ins on_block(b1,b3)\ndel on(b1,b3)\n")));
  EXPECT_TRUE(is_compatible(t, {}));
  EXPECT_TRUE(is_compatible(Tbox{}, {}));
  EXPECT_TRUE(is_compatible(t, worked_update()));
  EXPECT_FALSE(is_compatible(t, parse_update("ins Block(t)\nins Table(t)\n")));
  EXPECT_FALSE(is_compatible(t, parse_update("ins on_block(a,b)\nins on_block(a,c)\n")));
  EXPECT_FALSE(is_compatible(Tbox{}, parse_update("ins p(a)\ndel p(a)\n")));
}

TEST(DerivedOperations, WorkedExample) {
  UpdateProgram up = build_update_program(example1_tbox());
  DerivedOps ops = derived_operations(up, example1_abox(), worked_update());
  EXPECT_FALSE(ops.incompatible);
  EXPECT_TRUE(ops.insertions.count(fact("on_block", {"b1", "b3"})));
  EXPECT_TRUE(ops.insertions.count(fact("Block", {"b2"})));
  EXPECT_EQ(ops.deletions, State{fact("on_block", {"b1", "b2"})});
  // Blocked(b2) stays in the maximal retained subset of the closure, so it is
  // restored along with Block(b2).
  EXPECT_EQ(ops.insertions, (State{fact("on_block", {"b1", "b3"}), fact("Block", {"b2"}), fact("Blocked", {"b2"})}));
}

TEST(ApplyUpdate, WorkedExample) {
  Tbox t = example1_tbox();
  State r = apply_update(t, example1_abox(), worked_update());
  EXPECT_EQ(r, (State{fact("on_block", {"b1", "b3"}), fact("Block", {"b2"}), fact("Blocked", {"b2"}),
                      fact("on_table", {"b3", "t"})}));
  State oracle = oracle_update(t, example1_abox(), worked_update());
  EXPECT_TRUE(closure_equal(t, r, oracle));
  State cl = abox_closure(t, r);
  EXPECT_TRUE(cl.count(fact("on_block", {"b1", "b3"})));
  EXPECT_TRUE(cl.count(fact("Block", {"b2"})));
  EXPECT_FALSE(cl.count(fact("on", {"b1", "b2"})));
}

TEST(ApplyUpdate, EmptyUpdateIsIdentity) {
  Tbox t = example1_tbox();
  EXPECT_EQ(apply_update(t, example1_abox(), {}), example1_abox());
  EXPECT_EQ(oracle_update(t, example1_abox(), {}), abox_closure(t, example1_abox()));
}

TEST(ApplyUpdate, Errors) {
  Tbox t = example1_tbox();
  EXPECT_THROW(apply_update(t, example1_abox(), parse_update("ins on_block(b1,b3)\ndel on(b1,b3)\n")),
               IncompatibleUpdate);
  State bad{fact("Block", {"t"}), fact("Table", {"t"})};
  EXPECT_THROW(apply_update(t, bad, {}), InconsistentKb);
  EXPECT_THROW(oracle_update(t, example1_abox(), parse_update("ins Block(t)\nins Table(t)\n")), IncompatibleUpdate);
}

TEST(ApplyUpdate, HigherArityDirectOps) {
  Tbox t = example1_tbox();
  State s = example1_abox();
  s.insert(fact("between", {"a", "b", "c"}));
  Update u = parse_update("del between(a,b,c)\nins between(c,b,a)\n");
  State r = apply_update(t, s, u);
  EXPECT_FALSE(r.count(fact("between", {"a", "b", "c"})));
  EXPECT_TRUE(r.count(fact("between", {"c", "b", "a"})));
  EXPECT_TRUE(r.count(fact("on_block", {"b1", "b2"})));
}

TEST(OracleUpdate, WorkedExampleClosure) {
  Tbox t = example1_tbox();
  State expect{fact("on_block", {"b1", "b3"}), fact("Block", {"b2"}), fact("Blocked", {"b2"}),
               fact("on_table", {"b3", "t"})};
  EXPECT_EQ(abox_closure(t, oracle_update(t, example1_abox(), worked_update())), abox_closure(t, expect));
}

TEST(OracleUpdate, DeleteBlockedGolden) {
  Tbox t = example1_tbox();
  State golden = parse_facts(read_file(data_path("golden/example1-del-blocked-b2.facts")));
  Update u = parse_update("del Blocked(b2)\n");
  State o = oracle_update(t, example1_abox(), u);
  EXPECT_EQ(dump_facts(o), dump_facts(golden));
  EXPECT_FALSE(o.count(fact("on_block", {"b1", "b2"})));
  EXPECT_TRUE(o.count(fact("on", {"b1", "b2"})));
  EXPECT_TRUE(closure_equal(t, apply_update(t, example1_abox(), u), o));
}

TEST(OracleUpdate, LimitGate) {
  Tbox t = example1_tbox();
  EXPECT_EQ(oracle_limit(), 18u);
  setenv("CEKABC_ORACLE_LIMIT", "3", 1);
  EXPECT_EQ(oracle_limit(), 3u);
  EXPECT_THROW(oracle_update(t, example1_abox(), worked_update()), OracleLimitExceeded);
  unsetenv("CEKABC_ORACLE_LIMIT");
  EXPECT_NO_THROW(oracle_update(t, example1_abox(), worked_update()));
}

TEST(ParseUpdate, FormatAndErrors) {
  Update u = parse_update(read_file(data_path("example1.update")));
  EXPECT_EQ(u, worked_update());
  EXPECT_EQ(parse_update(to_string(u)), u);
  EXPECT_THROW(parse_update("add p(a)\n"), ParseError);
  EXPECT_THROW(parse_update("ins p(?x)\n"), ParseError);
  EXPECT_THROW(parse_update("del\n"), ParseError);
  try {
    parse_update("ins p(a)\ndel q(b\n");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

// Compatibility is ABox-independent and the rule program detects exactly the
// incompatible updates.
TEST(CoherenceProperty, CompatibilityBiconditional) {
  Rng rng(41);
  SampleBounds b{4, 4, 3, 8};
  int incompatible = 0;
  for (int i = 0; i < 300; ++i) {
    Tbox t = random_tbox(rng, b);
    auto consts = sample_constants(1 + rng() % 4);
    Update u = random_update(rng, t, consts, 3, 2);
    bool compat = is_compatible(t, u);
    incompatible += !compat;
    for (int k = 0; k < 3; ++k) {
      State a = k == 0 ? State{} : random_state(rng, t, consts, 4);
      ASSERT_EQ(compat, !program_says_incompatible(t, a, u)) << print_tbox(t) << to_string(u);
    }
  }
  EXPECT_GT(incompatible, 20);
}

TEST(CoherenceProperty, ApplyMatchesOracle) {
  Rng rng(42);
  int checked = 0;
  while (checked < 250) {
    Tbox t = random_tbox(rng);
    auto consts = sample_constants(1 + rng() % 4);
    State a = random_consistent_state(rng, t, consts, 4);
    Update u = random_update(rng, t, consts, 2, 2);
    if (!is_compatible(t, u)) continue;
    if (abox_closure(t, a).size() > oracle_limit()) continue;
    State fast = apply_update(t, a, u);
    State slow = oracle_update(t, a, u);
    ASSERT_TRUE(closure_equal(t, fast, slow))
        << print_tbox(t) << "A: " << to_string(a) << "\nU: " << to_string(u) << "rules: " << to_string(fast)
        << "\noracle: " << to_string(slow);
    ++checked;
  }
}

TEST(CoherenceProperty, EntailedInsertionIsIdempotent) {
  Rng rng(43);
  int checked = 0;
  for (int i = 0; i < 400 && checked < 150; ++i) {
    Tbox t = random_tbox(rng);
    auto consts = sample_constants(1 + rng() % 3);
    State a = random_consistent_state(rng, t, consts, 4);
    State cl = abox_closure(t, a);
    if (cl.empty()) continue;
    auto it = cl.begin();
    std::advance(it, rng() % cl.size());
    Update u;
    u.insertions.insert(*it);
    EXPECT_TRUE(closure_equal(t, apply_update(t, a, u), a));
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(CoherenceProperty, DeletionIsEffectiveAndResultConsistent) {
  Rng rng(44);
  for (int i = 0; i < 300; ++i) {
    Tbox t = random_tbox(rng);
    auto consts = sample_constants(1 + rng() % 3);
    State a = random_consistent_state(rng, t, consts, 4);
    Update u = random_update(rng, t, consts, 2, 2);
    if (!is_compatible(t, u)) continue;
    State r = apply_update(t, a, u);
    ASSERT_TRUE(is_consistent(t, r)) << print_tbox(t) << to_string(a) << "\n" << to_string(u);
    for (const Atom& d : u.deletions) EXPECT_FALSE(entails_assertion(t, r, d)) << to_string(d);
    for (const Atom& ins : u.insertions) EXPECT_TRUE(entails_assertion(t, r, ins)) << to_string(ins);
  }
}
