#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "cekab/bench.hpp"
#include "cekab/sampling.hpp"
#include "json.hpp"

using namespace cekab;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kLoad = 1, kInvalidTask = 2, kInvalidPlan = 3, kViolation = 4, kUsage = 64 };

struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

bool g_json = false;

void emit(const json& report, const std::string& text) {
  if (g_json)
    std::cout << report.dump(2) << "\n";
  else
    std::cout << text;
}

std::string read_text(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CliError(kLoad, "cannot read " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw CliError(kLoad, "cannot write " + path.string());
  out << text;
}

// Runs a loader and attributes its errors to the file.
template <class F>
auto from_file(const std::string& path, F&& load) {
  try {
    return load();
  } catch (const CliError&) {
    throw;
  } catch (const InvalidTask& e) {
    throw CliError(kInvalidTask, path + ": " + e.what());
  } catch (const HasDerivedPredicates& e) {
    throw CliError(kInvalidTask, path + ": " + e.what());
  } catch (const NotStratified& e) {
    throw CliError(kInvalidTask, path + ": " + e.what());
  } catch (const Error& e) {
    throw CliError(kLoad, path + ": " + e.what());
  }
}

Tbox load_tbox(const std::string& path, const Signature* hint) {
  if (!fs::exists(path)) throw CliError(kLoad, "cannot read ontology file " + path);
  return from_file(path, [&] { return load_ontology(path, hint); });
}

struct TaskFiles {
  std::string domain, problem, ontology;
};

void add_task_options(CLI::App* cmd, TaskFiles& f, bool need_ontology) {
  cmd->add_option("--domain", f.domain, "PDDL domain file")->required();
  cmd->add_option("--problem", f.problem, "PDDL problem file")->required();
  auto* o = cmd->add_option("--ontology", f.ontology, "TBox file (.tbox native or .ttl Turtle)");
  if (need_ontology) o->required();
}

PddlTask load_pddl(const TaskFiles& f) {
  PddlDomain d = from_file(f.domain, [&] { return parse_domain(read_text(f.domain)); });
  return from_file(f.problem, [&] { return parse_problem(read_text(f.problem), d); });
}

CekabTask load_task(const TaskFiles& f) {
  PddlTask p = load_pddl(f);
  Tbox t = f.ontology.empty() ? Tbox{} : load_tbox(f.ontology, &p.domain.predicates);
  CekabTask task = from_file(f.domain, [&] { return cekab_from_pddl(p, t); });
  try {
    validate_task(task);
  } catch (const Error& e) {
    throw CliError(kInvalidTask, e.what());
  }
  return task;
}

Plan load_plan(const std::string& path) {
  return from_file(path, [&] { return parse_plan(read_text(path)); });
}

Semantics parse_semantics(const std::string& s) { return s == "ekab" ? Semantics::Ekab : Semantics::Cekab; }

json state_json(const State& s) {
  json out = json::array();
  for (const Atom& a : s) out.push_back(to_string(a));
  return out;
}

json update_json(const Update& u) {
  return {{"insertions", state_json(u.insertions)}, {"deletions", state_json(u.deletions)}};
}

// ---------------------------------------------------------------- compile

struct CompileArgs {
  TaskFiles files;
  std::string scheme = "cekab", variant = "derive-up", out_dir = ".";
  bool tseitin = false;
};

int cmd_compile(const CompileArgs& a) {
  CekabTask task = load_task(a.files);
  CompileOptions opts;
  opts.scheme = a.scheme == "ekab" ? Scheme::Ekab : Scheme::Cekab;
  opts.variant = a.variant == "set-up" ? Variant::SetUp : Variant::DeriveUp;
  opts.tseitin = a.tseitin;
  PddlTask out;
  try {
    out = compile(task, opts);
  } catch (const LoadError& e) {
    throw CliError(kInvalidTask, e.what());
  }
  fs::create_directories(a.out_dir);
  fs::path dom = fs::path(a.out_dir) / (out.name + "-domain.pddl");
  fs::path prob = fs::path(a.out_dir) / (out.name + "-problem.pddl");
  write_text(dom, print_domain(out.domain));
  write_text(prob, print_problem(out));
  CompileStats s = compile_stats(out);
  json report{{"domain_file", dom.string()},   {"problem_file", prob.string()},
              {"base_predicates", s.base_predicates}, {"derived_predicates", s.derived_predicates},
              {"rules", s.rules},              {"actions", s.actions},
              {"strata", s.strata}};
  std::ostringstream text;
  text << "wrote " << dom.string() << "\nwrote " << prob.string() << "\n"
       << "base predicates: " << s.base_predicates << "\nderived predicates: " << s.derived_predicates
       << "\nrules: " << s.rules << "\nactions: " << s.actions << "\nstrata: " << s.strata << "\n";
  emit(report, text.str());
  return kOk;
}

// --------------------------------------------------------------- validate

struct PlanArgs {
  TaskFiles files;
  std::string plan, semantics = "cekab";
};

Verdict run_validation(const PlanArgs& a, Plan& plan) {
  plan = load_plan(a.plan);
  if (a.semantics == "pddl") {
    PddlTask t = load_pddl(a.files);
    try {
      validate_pddl_task(t);
    } catch (const Error& e) {
      throw CliError(kInvalidTask, e.what());
    }
    return validate_pddl_plan(t, plan);
  }
  return validate_plan(load_task(a.files), plan, parse_semantics(a.semantics));
}

json verdict_json(const Verdict& v, const Plan& plan) {
  json steps = json::array();
  for (std::size_t i = 0; i < v.trace.size(); ++i)
    steps.push_back({{"step", i}, {"action", i ? to_string(plan[i - 1]) : "initial"}, {"state", state_json(v.trace[i])}});
  json out{{"valid", v.valid}, {"goal_satisfied", v.goal_satisfied}, {"trace", steps}};
  if (v.failed_step >= 0) {
    out["failed_step"] = v.failed_step + 1;
    out["failure_kind"] = v.failure_kind;
    out["reason"] = v.reason;
  } else if (!v.goal_satisfied) {
    out["failure_kind"] = "GoalNotSatisfied";
  }
  return out;
}

int cmd_validate(const PlanArgs& a) {
  Plan plan;
  Verdict v = run_validation(a, plan);
  emit(verdict_json(v, plan),
       v.valid ? "plan valid: " + std::to_string(plan.size()) + " steps, goal satisfied\n" : render_verdict(v, plan));
  return v.valid ? kOk : kInvalidPlan;
}

// --------------------------------------------------------------- simulate

int cmd_simulate(const PlanArgs& a) {
  Plan plan = load_plan(a.plan);
  json steps = json::array();
  std::ostringstream text;
  bool ok = true;
  std::string failure;
  auto fail = [&](std::size_t i, const std::string& kind, const std::string& why) {
    ok = false;
    failure = kind;
    text << "step " << i + 1 << " " << to_string(plan[i]) << ": " << kind << ": " << why << "\n";
    steps.push_back({{"step", i + 1}, {"action", to_string(plan[i])}, {"failure_kind", kind}, {"reason", why}});
  };
  bool goal = false;
  if (a.semantics == "pddl") {
    PddlTask t = load_pddl(a.files);
    try {
      validate_pddl_task(t);
    } catch (const Error& e) {
      throw CliError(kInvalidTask, e.what());
    }
    PddlRunner r(t);
    State s = t.init;
    text << "step 0 (initial): " << to_string(s) << "\n";
    for (std::size_t i = 0; i < plan.size() && ok; ++i) {
      try {
        auto next = r.try_step(r.model(s), s, plan[i]);
        if (!next) {
          fail(i, "PreconditionFailed", "precondition does not hold");
          break;
        }
        s = *next;
        text << "step " << i + 1 << " " << to_string(plan[i]) << ": " << to_string(s) << "\n";
        steps.push_back({{"step", i + 1}, {"action", to_string(plan[i])}, {"state", state_json(s)}});
      } catch (const Error& e) {
        fail(i, "InvalidAction", e.what());
      }
    }
    goal = ok && r.goal_holds(s);
  } else {
    CekabTask t = load_task(a.files);
    Semantics sem = parse_semantics(a.semantics);
    TaskRunner r(t);
    State s = t.init;
    text << "step 0 (initial): " << to_string(s) << "\n";
    for (std::size_t i = 0; i < plan.size() && ok; ++i) {
      try {
        std::set<Sym> dom = r.domain(s);
        EcqEvaluator ev(s, t.tbox, &dom);
        Update u = r.associated_update(s, plan[i]);
        auto next = r.try_step(ev, s, plan[i], sem);
        if (!next) {
          // Stepping directly raises the specific failure.
          r.step(s, plan[i], sem);
          fail(i, "PreconditionFailed", "precondition does not hold");
          break;
        }
        s = *next;
        text << "step " << i + 1 << " " << to_string(plan[i]) << "\n";
        std::istringstream lines(to_string(u));
        for (std::string line; std::getline(lines, line);) text << "  " << line << "\n";
        text << "  state: " << to_string(s) << "\n";
        steps.push_back({{"step", i + 1},
                         {"action", to_string(plan[i])},
                         {"update", update_json(u)},
                         {"state", state_json(s)}});
      } catch (const InconsistentSuccessor& e) {
        fail(i, "InconsistentSuccessor", e.what());
      } catch (const IncompatibleUpdate& e) {
        fail(i, "IncompatibleUpdate", e.what());
      } catch (const PreconditionFailed& e) {
        fail(i, "PreconditionFailed", e.what());
      } catch (const Error& e) {
        fail(i, "InvalidAction", e.what());
      }
    }
    goal = ok && r.goal_holds(s);
  }
  if (ok) text << (goal ? "goal: satisfied\n" : "goal: not satisfied\n");
  json report{{"steps", steps}, {"goal_satisfied", goal}, {"valid", ok && goal}};
  if (!failure.empty()) report["failure_kind"] = failure;
  emit(report, text.str());
  return ok && goal ? kOk : kInvalidPlan;
}

// ----------------------------------------------------------- oracle-check

struct OracleArgs {
  TaskFiles files;
  int samples = 200, max_constants = 4;
  std::uint64_t seed = 42;
  std::string repro_dir = "cekabc-repro";
  bool inject_fault = false;
};

constexpr int kMaxOracleConstants = 6;

// The corrupted program used by the fault-injection hook: no closure
// re-insertions, so facts entailed only by deleted atoms are lost.
UpdateProgram without_closure_rules(const UpdateProgram& up) {
  UpdateProgram out = up;
  out.program = Program{};
  std::set<Sym> closure;
  for (const auto& [p, ar] : up.arity) closure.insert(update_names(p).closure);
  for (const Rule& r : up.program.rules())
    if (!closure.contains(r.head.pred)) out.program.add(r);
  return out;
}

struct UpdateCase {
  State state;
  Update update;
};

bool update_case_fails(const Tbox& t, const UpdateProgram& prog, const UpdateCase& c) {
  if (!is_compatible(t, c.update)) return false;
  State fast = apply_update(t, prog, c.state, c.update);
  State slow = oracle_update(t, c.state, c.update);
  return abox_closure(t, fast) != abox_closure(t, slow);
}

// Greedy one-element deletion while the failure persists.
UpdateCase minimize(const Tbox& t, const UpdateProgram& prog, UpdateCase c) {
  bool progress = true;
  auto try_sets = [&](State UpdateCase::*field_state, State Update::*field_update) {
    State& set = field_state ? c.*field_state : c.update.*field_update;
    for (auto it = set.begin(); it != set.end();) {
      Atom a = *it;
      it = set.erase(it);
      if (update_case_fails(t, prog, c)) {
        progress = true;
        continue;
      }
      it = set.insert(a).first;
      ++it;
    }
  };
  while (progress) {
    progress = false;
    try_sets(&UpdateCase::state, nullptr);
    try_sets(nullptr, &Update::insertions);
    try_sets(nullptr, &Update::deletions);
  }
  return c;
}

fs::path write_repro(const std::string& dir, const std::string& name, const json& body) {
  fs::create_directories(dir);
  fs::path p = fs::path(dir) / name;
  write_text(p, body.dump(2) + "\n");
  return p;
}

int cmd_oracle_check(const OracleArgs& a) {
  if (a.max_constants < 1 || a.max_constants > kMaxOracleConstants)
    throw CliError(kUsage, "--max-constants must be between 1 and " + std::to_string(kMaxOracleConstants));
  if ((a.files.domain.empty()) != (a.files.problem.empty()))
    throw CliError(kUsage, "--domain and --problem must be given together");
  std::optional<CekabTask> task;
  Tbox t;
  if (!a.files.domain.empty()) {
    task = load_task(a.files);
    t = task->tbox;
  } else {
    t = load_tbox(a.files.ontology, nullptr);
  }
  if (t.signature().all().empty()) throw CliError(kInvalidTask, "the ontology has an empty signature");
  UpdateProgram prog = build_update_program(t);
  if (a.inject_fault) prog = without_closure_rules(prog);

  Rng rng(a.seed);
  int update_checked = 0, update_skipped = 0, compat_checked = 0, trace_checked = 0;
  json report;
  for (int i = 0; i < a.samples; ++i) {
    auto consts = sample_constants(1 + static_cast<int>(rng() % a.max_constants));
    State s = random_consistent_state(rng, t, consts, 2 * a.max_constants);
    Update u = random_update(rng, t, consts, 2, 2);
    bool compat = is_compatible(t, u);
    ++compat_checked;
    if (compat == derived_operations(prog, s, u).incompatible) {
      fs::path p = write_repro(a.repro_dir, "compatibility-" + std::to_string(i) + ".json",
                               {{"property", "compatibility"},
                                {"tbox", print_tbox(t)},
                                {"state", state_json(s)},
                                {"update", update_json(u)},
                                {"is_compatible", compat}});
      std::cerr << "property violation: compatibility verdicts differ; counterexample " << p.string() << "\n";
      return kViolation;
    }
    if (!compat) continue;
    if (abox_closure(t, s).size() > oracle_limit()) {
      ++update_skipped;
      continue;
    }
    UpdateCase c{s, u};
    if (update_case_fails(t, prog, c)) {
      UpdateCase m = minimize(t, prog, c);
      fs::path p = write_repro(a.repro_dir, "update-" + std::to_string(i) + ".json",
                               {{"property", "apply_update equals oracle_update up to closure"},
                                {"tbox", print_tbox(t)},
                                {"state", state_json(m.state)},
                                {"update", update_json(m.update)},
                                {"apply_update", state_json(apply_update(t, prog, m.state, m.update))},
                                {"oracle_update", state_json(oracle_update(t, m.state, m.update))}});
      std::cerr << "property violation: apply_update differs from oracle_update; counterexample " << p.string()
                << "\n";
      return kViolation;
    }
    ++update_checked;
  }

  if (task) {
    PddlTask compiled = compile_cekab(*task);
    auto project = [&](const State& s) {
      State out;
      for (const Atom& x : s)
        if (task->predicates.contains(x.pred) || t.signature().contains(x.pred)) out.insert(x);
      return out;
    };
    for (int i = 0; i < a.samples; ++i) {
      Plan walk = random_walk_cekab(rng, *task, 4, Semantics::Cekab);
      Verdict direct = validate_plan(*task, walk, Semantics::Cekab);
      auto twice = interleave_updates(compiled, walk);
      std::string problem;
      if (!twice) {
        problem = "interleaved plan is inapplicable";
      } else {
        Verdict v = validate_pddl_plan(compiled, *twice);
        if (v.valid != direct.valid) problem = "plan validity differs";
        std::size_t k = 0;
        for (std::size_t j = 0; problem.empty() && j < twice->size(); ++j) {
          if (j + 1 < twice->size() && (*twice)[j + 1].name == update_action_name()) continue;
          ++k;
          if (v.trace.size() <= j + 1 || abox_closure(t, project(v.trace[j + 1])) != abox_closure(t, direct.trace[k]))
            problem = "states differ after step " + std::to_string(k);
        }
      }
      if (!problem.empty()) {
        fs::path p = write_repro(a.repro_dir, "trace-" + std::to_string(i) + ".json",
                                 {{"property", "compiled and direct traces agree"},
                                  {"problem", problem},
                                  {"plan", print_plan(walk)},
                                  {"domain", a.files.domain},
                                  {"task_problem", a.files.problem}});
        std::cerr << "property violation: " << problem << "; counterexample " << p.string() << "\n";
        return kViolation;
      }
      ++trace_checked;
    }
  }
  report = {{"seed", a.seed},
            {"compatibility_checked", compat_checked},
            {"update_checked", update_checked},
            {"update_skipped_over_gate", update_skipped},
            {"trace_checked", trace_checked},
            {"violations", 0}};
  std::ostringstream text;
  text << "compatibility: " << compat_checked << " samples agree\n"
       << "update oracle: " << update_checked << " samples agree (" << update_skipped << " over the oracle gate)\n";
  if (task) text << "compiled traces: " << trace_checked << " walks agree\n";
  emit(report, text.str());
  return kOk;
}

// -------------------------------------------------------------- gen-bench

struct BenchArgs {
  std::string family = "blocks", out_dir = ".";
  int size = 0;
  int plan_depth = 0;
};

int cmd_gen_bench(const BenchArgs& a) {
  if (a.family != "blocks") throw CliError(kUsage, "unknown benchmark family " + a.family);
  if (a.size < 1) throw CliError(kUsage, "--size must be at least 1");
  BenchFiles f = blocks_files(a.size);
  fs::create_directories(a.out_dir);
  fs::path dir(a.out_dir);
  std::vector<fs::path> written{dir / (f.name + "-domain.pddl"), dir / (f.name + "-problem.pddl"),
                                dir / (f.name + ".tbox")};
  write_text(written[0], f.domain);
  write_text(written[1], f.problem);
  write_text(written[2], f.ontology);
  json report{{"name", f.name}};
  if (a.plan_depth > 0) {
    CekabTask t = load_cekab_task(f.domain, f.problem, parse_tbox(f.ontology));
    auto plan = bounded_search(t, a.plan_depth, Semantics::Cekab);
    if (!plan) throw CliError(kInvalidTask, "no coherence plan within depth " + std::to_string(a.plan_depth));
    written.push_back(dir / (f.name + ".plan"));
    write_text(written.back(), print_plan(*plan));
    report["plan_length"] = plan->size();
  }
  std::string text;
  json files = json::array();
  for (const auto& p : written) {
    text += "wrote " + p.string() + "\n";
    files.push_back(p.string());
  }
  report["files"] = files;
  emit(report, text);
  return kOk;
}

// ---------------------------------------------------------------- closure

struct ClosureArgs {
  std::string ontology, facts;
  bool tbox = false;
};

int cmd_closure(const ClosureArgs& a) {
  State s = from_file(a.facts, [&] { return parse_facts(read_text(a.facts)); });
  Signature hint;
  for (const Atom& x : s) hint.add(x.pred, static_cast<int>(x.arity()), PredKind::General);
  Tbox t = load_tbox(a.ontology, &hint);
  bool consistent = is_consistent(t, s);
  State cl = abox_closure(t, s);
  json report{{"consistent", consistent}, {"closure", state_json(cl)}};
  std::string text = dump_facts(cl);
  if (a.tbox) {
    Tbox closed = tbox_closure(t);
    json axioms = json::array();
    for (const auto& ax : closed.axioms()) axioms.push_back(to_string(ax));
    report["tbox_closure"] = axioms;
    text = print_tbox(closed) + text;
  }
  if (!consistent && !g_json) std::cerr << "warning: the facts are inconsistent with the ontology\n";
  emit(report, text);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cekabc: coherence-aware knowledge and action base compiler"};
  app.require_subcommand(1);

  auto json_flag = [](CLI::App* c) { c->add_flag("--json", g_json, "Print a JSON report on standard output"); };
  const std::vector<std::string> semantics{"ekab", "cekab", "pddl"};

  CompileArgs ca;
  auto* compile_cmd = app.add_subcommand("compile", "Compile a ceKAB or eKAB task to PDDL with derived predicates");
  add_task_options(compile_cmd, ca.files, true);
  compile_cmd->add_option("--scheme", ca.scheme)->check(CLI::IsMember({"ekab", "cekab"}));
  compile_cmd->add_option("--variant", ca.variant)->check(CLI::IsMember({"derive-up", "set-up"}));
  compile_cmd->add_flag("--tseitin", ca.tseitin, "Replace complex conditions by auxiliary derived atoms");
  compile_cmd->add_option("--out-dir", ca.out_dir);
  json_flag(compile_cmd);

  PlanArgs va;
  auto* validate_cmd = app.add_subcommand("validate", "Check a plan against a task");
  add_task_options(validate_cmd, va.files, false);
  validate_cmd->add_option("--plan", va.plan)->required();
  validate_cmd->add_option("--semantics", va.semantics)->check(CLI::IsMember(semantics));
  json_flag(validate_cmd);

  PlanArgs sa;
  auto* simulate_cmd = app.add_subcommand("simulate", "Execute a plan and print each update and state");
  add_task_options(simulate_cmd, sa.files, false);
  simulate_cmd->add_option("--plan", sa.plan)->required();
  simulate_cmd->add_option("--semantics", sa.semantics)->check(CLI::IsMember(semantics));
  json_flag(simulate_cmd);

  OracleArgs oa;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Randomized equivalence checks against the update oracle");
  oracle_cmd->add_option("--ontology", oa.files.ontology)->required();
  oracle_cmd->add_option("--domain", oa.files.domain);
  oracle_cmd->add_option("--problem", oa.files.problem);
  oracle_cmd->add_option("--samples", oa.samples)->check(CLI::NonNegativeNumber);
  oracle_cmd->add_option("--seed", oa.seed);
  oracle_cmd->add_option("--max-constants", oa.max_constants);
  oracle_cmd->add_option("--repro-dir", oa.repro_dir);
  oracle_cmd->add_flag("--inject-fault", oa.inject_fault)->group("");
  json_flag(oracle_cmd);

  BenchArgs ba;
  auto* bench_cmd = app.add_subcommand("gen-bench", "Write a generated benchmark instance");
  bench_cmd->add_option("--family", ba.family);
  bench_cmd->add_option("--size", ba.size)->required();
  bench_cmd->add_option("--out-dir", ba.out_dir);
  bench_cmd->add_option("--plan-depth", ba.plan_depth, "Also write a shortest coherence plan found within this depth");
  json_flag(bench_cmd);

  ClosureArgs cla;
  auto* closure_cmd = app.add_subcommand("closure", "Print the closure of a fact file under an ontology");
  closure_cmd->add_option("--ontology", cla.ontology)->required();
  closure_cmd->add_option("--facts", cla.facts)->required();
  closure_cmd->add_flag("--tbox", cla.tbox, "Also print the TBox closure");
  json_flag(closure_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*compile_cmd) return cmd_compile(ca);
    if (*validate_cmd) return cmd_validate(va);
    if (*simulate_cmd) return cmd_simulate(sa);
    if (*oracle_cmd) return cmd_oracle_check(oa);
    if (*bench_cmd) return cmd_gen_bench(ba);
    if (*closure_cmd) return cmd_closure(cla);
  } catch (const CliError& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (g_json) std::cout << json{{"error", e.what()}, {"exit_code", e.code}}.dump(2) << "\n";
    return e.code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    if (g_json) std::cout << json{{"error", e.what()}, {"exit_code", kInvalidTask}}.dump(2) << "\n";
    return kInvalidTask;
  }
  return kUsage;
}
