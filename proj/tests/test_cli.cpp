#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdlib>
#include <algorithm>
#include <filesystem>
#include <fstream>

#include "cekab/pddl.hpp"
#include "json.hpp"
#include "test_util.hpp"

using cekab::testing::data_path;
using cekab::testing::read_file;
namespace fs = std::filesystem;

namespace {

struct CmdResult {
  int code;
  std::string out;
  std::string err;
};

fs::path scratch() {
  fs::path p = fs::temp_directory_path() / ("cekabc-test-" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

CmdResult cekabc(const std::string& args) {
  fs::path dir = scratch();
  std::string out = (dir / "stdout").string(), err = (dir / "stderr").string();
  std::string cmd = std::string(CEKABC_PATH) + " " + args + " >" + out + " 2>" + err;
  int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(out), read_file(err)};
}

std::string blocks(int n) {
  std::string b = data_path("blocks/blocks-" + std::to_string(n));
  return "--domain " + b + "-domain.pddl --problem " + b + "-problem.pddl --ontology " + b + ".tbox";
}

std::string move_task() {
  return "--domain " + data_path("move/move-domain.pddl") + " --problem " + data_path("move/move-problem.pddl") +
         " --ontology " + data_path("example1.tbox");
}

}  // namespace

TEST(CliCompile, BlocksWritesTwoFiles) {
  fs::path out = scratch() / "compile";
  fs::remove_all(out);
  CmdResult r = cekabc("compile " + blocks(3) + " --out-dir " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(out / "blocks-3-domain.pddl"));
  EXPECT_TRUE(fs::exists(out / "blocks-3-problem.pddl"));
  EXPECT_NE(r.out.find("rules: "), std::string::npos);
  EXPECT_NE(r.out.find("strata: "), std::string::npos);
  cekab::PddlDomain d = cekab::parse_domain(read_file((out / "blocks-3-domain.pddl").string()));
  EXPECT_NO_THROW(cekab::parse_problem(read_file((out / "blocks-3-problem.pddl").string()), d));
}

TEST(CliCompile, MatchesGoldenMoveOutput) {
  fs::path out = scratch() / "golden";
  CmdResult r = cekabc("compile " + move_task() + " --out-dir " + out.string());
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(read_file((out / "example-domain.pddl").string()), read_file(data_path("golden/move-cekab-domain.pddl")));
  EXPECT_EQ(read_file((out / "example-problem.pddl").string()), read_file(data_path("golden/move-cekab-problem.pddl")));
}

TEST(CliCompile, VariantsDiffer) {
  fs::path a = scratch() / "default", b = scratch() / "setup";
  ASSERT_EQ(cekabc("compile " + blocks(2) + " --out-dir " + a.string()).code, 0);
  ASSERT_EQ(cekabc("compile " + blocks(2) + " --variant set-up --tseitin --out-dir " + b.string()).code, 0);
  std::string da = read_file((a / "blocks-2-domain.pddl").string());
  std::string db = read_file((b / "blocks-2-domain.pddl").string());
  EXPECT_NE(da, db);
  EXPECT_EQ(da.find("aux_0"), std::string::npos);
  EXPECT_NE(db.find("aux_0"), std::string::npos);
  EXPECT_NE(da.find("(:derived (updating)"), std::string::npos);
  EXPECT_EQ(db.find("(:derived (updating)"), std::string::npos);
}

TEST(CliCompile, JsonReport) {
  CmdResult r = cekabc("compile " + blocks(2) + " --scheme ekab --json --out-dir " + (scratch() / "ekab").string());
  ASSERT_EQ(r.code, 0) << r.err;
  auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j["actions"], 2);
  EXPECT_GT(j["rules"].get<int>(), 0);
}

TEST(CliCompile, Errors) {
  CmdResult missing = cekabc("compile --domain " + data_path("move/move-domain.pddl") + " --problem " +
                       data_path("move/move-problem.pddl") + " --ontology /no/such/file.tbox");
  EXPECT_EQ(missing.code, 1);
  EXPECT_NE(missing.err.find("/no/such/file.tbox"), std::string::npos);
  fs::path bad = scratch() / "bad-domain.pddl";
  {
    std::ofstream(bad) << "(define (domain x) (:predicates (p ?x)";
  }
  CmdResult parse = cekabc("compile --domain " + bad.string() + " --problem " + data_path("move/move-problem.pddl") +
                     " --ontology " + data_path("example1.tbox"));
  EXPECT_EQ(parse.code, 1);
  EXPECT_NE(parse.err.find(bad.string()), std::string::npos);
  fs::path derived = scratch() / "derived-domain.pddl";
  {
    std::ofstream(derived) << "(define (domain d) (:requirements :derived-predicates) (:predicates (p ?x) (q ?x))"
                              " (:derived (q ?x) (p ?x)))";
  }
  fs::path prob = scratch() / "derived-problem.pddl";
  {
    std::ofstream(prob) << "(define (problem d1) (:domain d) (:objects o) (:init) (:goal (q o)))";
  }
  EXPECT_EQ(cekabc("compile --domain " + derived.string() + " --problem " + prob.string() + " --ontology " +
                   data_path("example1.tbox"))
                .code,
            2);
  EXPECT_EQ(cekabc("compile " + blocks(2) + " --variant sideways").code, 64);
  EXPECT_EQ(cekabc("compile --domain x").code, 64);
  EXPECT_EQ(cekabc("").code, 64);
}

TEST(CliValidate, BlocksPlanAndSemantics) {
  std::string plan = " --plan " + data_path("blocks/blocks-3.plan");
  EXPECT_EQ(cekabc("validate " + blocks(3) + plan).code, 0);
  CmdResult move = cekabc("validate " + move_task() + " --plan " + data_path("move/move.plan") + " --semantics cekab");
  EXPECT_EQ(move.code, 0) << move.out << move.err;
  CmdResult ekab = cekabc("validate " + move_task() + " --plan " + data_path("move/move.plan") + " --semantics ekab");
  EXPECT_EQ(ekab.code, 3);
  EXPECT_NE(ekab.out.find("InconsistentSuccessor"), std::string::npos);
  EXPECT_NE(ekab.out.find("step 0 (initial)"), std::string::npos);
}

TEST(CliValidate, EmptyPlanAndGoal) {
  fs::path empty = scratch() / "empty.plan";
  {
    std::ofstream(empty) << "; nothing to do\n";
  }
  EXPECT_EQ(cekabc("validate " + move_task() + " --plan " + empty.string()).code, 3);
  fs::path prob = scratch() / "done-problem.pddl";
  {
    std::ofstream(prob) << "(define (problem done) (:domain blocks-move) (:objects b1 b2)"
                           " (:init (on_block b1 b2)) (:goal (know (Block b2))))";
  }
  CmdResult r = cekabc("validate --domain " + data_path("move/move-domain.pddl") + " --problem " + prob.string() +
                 " --ontology " + data_path("example1.tbox") + " --plan " + empty.string() + " --json");
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_TRUE(nlohmann::json::parse(r.out)["valid"].get<bool>());
}

TEST(CliValidate, CompiledPlanUnderPddlSemantics) {
  fs::path out = scratch() / "pddl";
  ASSERT_EQ(cekabc("compile " + move_task() + " --out-dir " + out.string()).code, 0);
  fs::path plan = scratch() / "compiled.plan";
  {
    std::ofstream(plan) << "(move b1 b2 b3)\n(a_update)\n";
  }
  std::string task = "--domain " + (out / "example-domain.pddl").string() + " --problem " +
                     (out / "example-problem.pddl").string();
  EXPECT_EQ(cekabc("validate " + task + " --semantics pddl --plan " + plan.string()).code, 0);
  EXPECT_EQ(cekabc("validate " + task + " --semantics pddl --plan " + data_path("move/move.plan")).code, 3);
  fs::path bad = scratch() / "bad.plan";
  {
    std::ofstream(bad) << "(move b1\n";
  }
  EXPECT_EQ(cekabc("validate " + task + " --semantics pddl --plan " + bad.string()).code, 1);
}

TEST(CliSimulate, PrintsUpdatesAndStates) {
  CmdResult r = cekabc("simulate " + move_task() + " --plan " + data_path("move/move.plan"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("ins on_block(b1,b3)"), std::string::npos);
  EXPECT_NE(r.out.find("del on(b1,b2)"), std::string::npos);
  EXPECT_NE(r.out.find("goal: satisfied"), std::string::npos);
  CmdResult j = cekabc("simulate " + move_task() + " --plan " + data_path("move/move.plan") + " --semantics ekab --json");
  EXPECT_EQ(j.code, 3);
  EXPECT_EQ(nlohmann::json::parse(j.out)["failure_kind"], "InconsistentSuccessor");
}

TEST(CliOracle, DefaultRunPasses) {
  CmdResult r = cekabc("oracle-check --ontology " + data_path("example1.tbox") + " --samples 200 --seed 42");
  EXPECT_EQ(r.code, 0) << r.err;
  CmdResult t = cekabc("oracle-check " + move_task() + " --samples 40 --seed 7 --json");
  ASSERT_EQ(t.code, 0) << t.err;
  EXPECT_EQ(nlohmann::json::parse(t.out)["trace_checked"], 40);
}

TEST(CliOracle, InjectedFaultIsCaught) {
  fs::path repro = scratch() / "repro";
  fs::remove_all(repro);
  CmdResult r = cekabc("oracle-check --ontology " + data_path("example1.tbox") +
                 " --samples 200 --seed 42 --inject-fault --repro-dir " + repro.string());
  EXPECT_EQ(r.code, 4);
  ASSERT_TRUE(fs::exists(repro));
  auto first = fs::directory_iterator(repro)->path();
  EXPECT_NE(r.err.find(first.string()), std::string::npos);
  auto j = nlohmann::json::parse(read_file(first.string()));
  EXPECT_NE(j["apply_update"], j["oracle_update"]);
}

TEST(CliOracle, UsageErrors) {
  EXPECT_EQ(cekabc("oracle-check --ontology " + data_path("example1.tbox") + " --max-constants 7").code, 64);
  EXPECT_EQ(cekabc("oracle-check --ontology " + data_path("example1.tbox") + " --domain x.pddl").code, 64);
  EXPECT_EQ(cekabc("oracle-check --ontology /missing.tbox").code, 1);
}

TEST(CliGenBench, WritesSolvableDeterministicInstances) {
  fs::path a = scratch() / "bench-a", b = scratch() / "bench-b";
  ASSERT_EQ(cekabc("gen-bench --family blocks --size 2 --plan-depth 4 --out-dir " + a.string()).code, 0);
  EXPECT_TRUE(fs::exists(a / "blocks-2.plan"));
  ASSERT_EQ(cekabc("gen-bench --family blocks --size 3 --out-dir " + a.string()).code, 0);
  ASSERT_EQ(cekabc("gen-bench --family blocks --size 3 --out-dir " + b.string()).code, 0);
  for (const char* f : {"blocks-3-domain.pddl", "blocks-3-problem.pddl", "blocks-3.tbox"})
    EXPECT_EQ(read_file((a / f).string()), read_file((b / f).string())) << f;
  EXPECT_EQ(read_file((a / "blocks-3-problem.pddl").string()), read_file(data_path("blocks/blocks-3-problem.pddl")));
  EXPECT_EQ(cekabc("gen-bench --size 0").code, 64);
  EXPECT_EQ(cekabc("gen-bench --family cats --size 2").code, 64);
}

TEST(CliClosure, PrintsClosure) {
  CmdResult r = cekabc("closure --ontology " + data_path("example1.tbox") + " --facts " + data_path("example1.facts"));
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("Blocked(b2)\n"), std::string::npos);
  EXPECT_NE(r.out.find("on(b1,b2)\n"), std::string::npos);
  CmdResult t = cekabc("closure --ontology " + data_path("example1.ttl") + " --facts " + data_path("example1.facts") +
                 " --tbox --json");
  ASSERT_EQ(t.code, 0) << t.err;
  auto j = nlohmann::json::parse(t.out);
  EXPECT_TRUE(j["consistent"].get<bool>());
  auto axioms = j["tbox_closure"].get<std::vector<std::string>>();
  EXPECT_NE(std::find(axioms.begin(), axioms.end(), "ex on [= not Table"), axioms.end());
  fs::path bad = scratch() / "bad.facts";
  {
    std::ofstream(bad) << "Block(b1)\nBlock(\n";
  }
  CmdResult e = cekabc("closure --ontology " + data_path("example1.tbox") + " --facts " + bad.string());
  EXPECT_EQ(e.code, 1);
  EXPECT_NE(e.err.find("at 2:"), std::string::npos) << e.err;
}
