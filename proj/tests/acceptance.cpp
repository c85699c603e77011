// Acceptance suite: one line per criterion, nonzero exit if any fails.
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "cekab/bench.hpp"
#include "cekab/sampling.hpp"

using namespace cekab;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::string& title, double budget_s, const std::function<Outcome()>& body) {
  auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (o.pass && secs > budget_s) {
    o.pass = false;
    o.detail += " (over the " + std::to_string(budget_s) + " s budget)";
  }
  if (!o.pass) ++failures;
  std::printf("[%s] C%-2d %-34s %8.2fs  %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

std::string read_file(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool closure_equal(const Tbox& t, const State& a, const State& b) { return abox_closure(t, a) == abox_closure(t, b); }

State project(const State& s, const CekabTask& src) {
  State out;
  for (const Atom& a : s)
    if (src.predicates.contains(a.pred) || src.tbox.signature().contains(a.pred)) out.insert(a);
  return out;
}

std::string ops_string(const DerivedOps& ops) {
  std::vector<std::string> parts;
  for (const Atom& a : ops.insertions) parts.push_back(update_names(a.pred).ins.str() + to_string(a).substr(a.pred.str().size()));
  for (const Atom& a : ops.deletions) parts.push_back(update_names(a.pred).del.str() + to_string(a).substr(a.pred.str().size()));
  std::sort(parts.begin(), parts.end());
  std::string out;
  for (const auto& p : parts) out += (out.empty() ? "" : " ") + p;
  return out;
}

Outcome c1() {
  Tbox t = example1_tbox();
  State cl = abox_closure(t, example1_abox());
  for (const char* f : {"on(b1,b2)", "Block(b1)", "Block(b2)", "Blocked(b2)"})
    if (!cl.contains(parse_atom(f))) return {false, std::string("missing ") + f};
  Tbox closed = tbox_closure(t);
  std::set<std::string> axioms;
  for (const auto& ax : closed.axioms()) axioms.insert(to_string(ax));
  for (const char* ax : {"ex on_block [= Block", "ex on [= not Table"})
    if (!axioms.count(ax)) return {false, std::string("cl(T) lacks ") + ax};
  return {true, std::to_string(cl.size()) + " closure atoms, " + std::to_string(axioms.size()) + " cl(T) axioms"};
}

Outcome c2() {
  Tbox t = example1_tbox();
  Update u = parse_update("del on(b1,b2)\nins on_block(b1,b3)\n");
  DerivedOps ops = derived_operations(build_update_program(t), example1_abox(), u);
  std::string got = ops_string(ops);
  const std::string want = "del_on_block(b1,b2) ins_block(b2) ins_on_block(b1,b3)";
  if (got == want && !ops.incompatible) return {true, got};
  return {false, "derived {" + got + "}, expected exactly {" + want +
                     "}; ins_blocked(b2) is required for agreement with the oracle update"};
}

Outcome c3() {
  Rng rng(1003);
  SampleBounds b{4, 4, 3, 8};
  int n = 0, incompatible = 0;
  for (; n < 600; ++n) {
    Tbox t = random_tbox(rng, b);
    auto consts = sample_constants(1 + rng() % 4);
    Update u = random_update(rng, t, consts, 3, 2);
    State a = random_state(rng, t, consts, 4);
    bool compat = is_compatible(t, u);
    incompatible += !compat;
    if (compat == derived_operations(build_update_program(t), a, u).incompatible)
      return {false, "discrepancy on sample " + std::to_string(n) + ": " + to_string(u)};
  }
  return {true, std::to_string(n) + " samples, " + std::to_string(incompatible) + " incompatible"};
}

Outcome c4() {
  Rng rng(1004);
  int checked = 0, tries = 0;
  while (checked < 520) {
    ++tries;
    Tbox t = random_tbox(rng);
    auto consts = sample_constants(1 + rng() % 4);
    State a = random_consistent_state(rng, t, consts, 4);
    Update u = random_update(rng, t, consts, 2, 2);
    if (!is_compatible(t, u) || abox_closure(t, a).size() > oracle_limit()) continue;
    if (!closure_equal(t, apply_update(t, a, u), oracle_update(t, a, u)))
      return {false, "discrepancy: A=" + to_string(a) + " U=" + to_string(u)};
    ++checked;
  }
  return {true, std::to_string(checked) + " compatible samples (" + std::to_string(tries) + " drawn)"};
}

Outcome c5() {
  Rng rng(1005);
  int checked = 0, samples = 0, truths = 0;
  while (samples < 320) {
    Tbox t = random_tbox(rng);
    auto consts = sample_constants(1 + rng() % 3);
    State s = random_consistent_state(rng, t, consts, 4);
    if (!is_consistent(t, s)) continue;
    std::vector<Sym> free{"x0", "x1"};
    Formula q = random_ecq(rng, t, consts, free, 3);
    EcqRewriting rw = rewrite_ecq(t, q);
    std::set<Sym> dom = active_domain(s);
    dom.insert(consts.begin(), consts.end());
    State m = minimal_model(rw.program, s, dom);
    ++samples;
    for (Sym a : consts)
      for (Sym b : consts) {
        Substitution theta{{"x0", a}, {"x1", b}};
        bool direct = eval_ecq(s, t, q, theta, &dom);
        if (direct != eval_fo(m, rw.formula, theta, &dom))
          return {false, "discrepancy: " + to_pddl(q) + " on " + to_string(s)};
        truths += direct;
        ++checked;
      }
  }
  return {true, std::to_string(samples) + " (T,Q,s) samples, " + std::to_string(checked) + " substitutions, " +
                    std::to_string(truths) + " true"};
}

Outcome c6() {
  Rng rng(1006);
  int solved = 0, drawn = 0, full_length = 0, reverse_checked = 0;
  while (solved < 55) {
    ++drawn;
    CekabTask src = random_cekab_task(rng);
    auto plan = bounded_search(src, 6, Semantics::Cekab);
    PddlTask c = compile_cekab(src);
    if (reverse_checked < 25) {
      bool compiled = pddl_bounded_search(c, 12).has_value();
      if (compiled && !plan) return {false, "compiled plan without source plan in task " + std::to_string(drawn)};
      ++reverse_checked;
    }
    if (!plan) continue;
    auto twice = interleave_updates(c, *plan);
    if (!twice) return {false, "interleaved plan inapplicable in task " + std::to_string(drawn)};
    full_length += twice->size() == 2 * plan->size();
    Verdict v = validate_pddl_plan(c, *twice);
    if (!v.valid) return {false, "interleaved plan invalid: " + v.reason};
    Verdict d = validate_plan(src, *plan, Semantics::Cekab);
    // Compare the state after each a_update (or after a request with no update).
    std::size_t k = 0;
    for (std::size_t i = 0; i < twice->size(); ++i) {
      bool last_of_step = i + 1 == twice->size() || (*twice)[i + 1].name != update_action_name();
      if (!last_of_step) continue;
      ++k;
      if (!closure_equal(src.tbox, project(v.trace[i + 1], src), d.trace[k]))
        return {false, "post-update state differs at step " + std::to_string(k)};
    }
    ++solved;
  }
  return {true, std::to_string(solved) + " solved tasks (" + std::to_string(full_length) +
                    " with length exactly 2n), reverse direction on " + std::to_string(reverse_checked)};
}

Outcome c7() {
  Rng rng(1007);
  int tasks = 0;
  std::size_t plans = 0;
  for (; tasks < 22; ++tasks) {
    CekabTask src = random_cekab_task(rng, SampleBounds{3, 3, 2, 5});
    PddlTask d = compile_cekab(src, CompileOptions{Variant::DeriveUp, false, Scheme::Cekab});
    PddlTask s = compile_cekab(src, CompileOptions{Variant::SetUp, false, Scheme::Cekab});
    auto pd = enumerate_plans(d, 4);
    if (pd != enumerate_plans(s, 4)) return {false, "plan sets differ on task " + std::to_string(tasks)};
    plans += pd.size();
  }
  return {true, std::to_string(tasks) + " tasks, " + std::to_string(plans) + " plans accepted by both"};
}

Outcome c8() {
  Rng rng(1008);
  int valid = 0, invalid = 0;
  while (valid + invalid < 120 || invalid < 12 || valid < 30) {
    CekabTask src = random_cekab_task(rng);
    PddlTask c = compile_cekab(src);
    PddlTask ts = tseitin_transform(c);
    auto found = pddl_bounded_search(c, 8, 20000);
    Plan p = found && rng() % 2 ? *found : random_walk_pddl(rng, c, 6);
    if ((valid + invalid) % 3 == 0) {
      auto acts = PddlRunner(c).ground_actions();
      p.push_back(acts[rng() % acts.size()]);
      if (rng() % 2 && p.size() > 1) p.erase(p.begin() + rng() % p.size());
    }
    bool a = validate_pddl_plan(c, p).valid;
    if (a != validate_pddl_plan(ts, p).valid) return {false, "validity differs on " + print_plan(p)};
    (a ? valid : invalid)++;
  }
  return {true, std::to_string(valid + invalid) + " pairs, " + std::to_string(invalid) + " invalid"};
}

Outcome c9() {
  Rng rng(1009);
  int tasks = 0, solvable = 0;
  for (; tasks < 25; ++tasks) {
    PddlTask t = random_pddl_task(rng, true);
    CekabTask s = split_conflicting_effects(t);
    bool a = pddl_bounded_search(t, 4).has_value();
    if (a != bounded_search(s, 4, Semantics::Cekab).has_value())
      return {false, "plan existence differs on task " + std::to_string(tasks)};
    solvable += a;
  }
  return {true, std::to_string(tasks) + " tasks, " + std::to_string(solvable) + " solvable"};
}

Outcome c10() {
  CekabTask t = move_task();
  GroundAction mv{"move", {"b1", "b2", "b3"}};
  bool ekab_inconsistent = false;
  try {
    step_ekab(t, t.init, mv);
  } catch (const InconsistentSuccessor&) {
    ekab_inconsistent = true;
  }
  if (!ekab_inconsistent) return {false, "eKAB successor is consistent"};
  State next = step_cekab(t, t.init, mv);
  State cl = abox_closure(t.tbox, next);
  if (!is_consistent(t.tbox, next)) return {false, "ceKAB successor inconsistent"};
  for (const char* f : {"on_block(b1,b3)", "Block(b2)"})
    if (!cl.contains(parse_atom(f))) return {false, std::string("ceKAB closure lacks ") + f};
  return {true, "eKAB inconsistent, ceKAB " + to_string(next)};
}

bool is_domain_text(const std::string& text) { return text.find("(domain") != std::string::npos; }

std::string round_trip_issue(const std::string& domain_text, const std::vector<std::string>& problems) {
  PddlDomain d = parse_domain(domain_text);
  std::string pd = print_domain(d);
  PddlDomain d2 = parse_domain(pd);
  if (print_domain(d2) != pd) return "domain " + d.name;
  for (const auto& p : problems) {
    std::string pp = print_problem(parse_problem(p, d));
    if (print_problem(parse_problem(pp, d2)) != pp) return "problem of " + d.name;
  }
  return {};
}

Outcome c11() {
  int files = 0;
  for (int n : {2, 3, 4}) {
    CekabTask b = blocks_task(n);
    for (auto variant : {Variant::DeriveUp, Variant::SetUp})
      for (bool ts : {false, true})
        for (auto scheme : {Scheme::Cekab, Scheme::Ekab}) {
          if (scheme == Scheme::Ekab && (ts || variant == Variant::SetUp)) continue;
          CompileOptions o{variant, ts, scheme};
          PddlTask x = compile(b, o), y = compile(blocks_task(n), o);
          std::string dx = print_domain(x.domain), px = print_problem(x);
          if (dx != print_domain(y.domain) || px != print_problem(y)) return {false, "non-deterministic output"};
          std::string issue = round_trip_issue(dx, {px});
          if (!issue.empty()) return {false, "generated " + issue + " does not round-trip"};
          files += 2;
        }
  }
  // Shipped files: every problem is paired with the domain it names in its directory.
  std::map<fs::path, std::vector<std::pair<std::string, std::string>>> by_dir;
  for (const auto& e : fs::recursive_directory_iterator(CEKAB_DATA_DIR))
    if (e.is_regular_file() && e.path().extension() == ".pddl")
      by_dir[e.path().parent_path()].push_back({e.path().string(), read_file(e.path())});
  int shipped = 0;
  for (const auto& [dir, entries] : by_dir)
    for (const auto& [path, text] : entries) {
      if (!is_domain_text(text)) continue;
      PddlDomain d = parse_domain(text);
      std::vector<std::string> problems;
      for (const auto& [p2, t2] : entries) {
        if (is_domain_text(t2)) continue;
        std::string needle = "(:domain " + d.name + ")";
        if (t2.find(needle) != std::string::npos) problems.push_back(t2);
      }
      std::string issue = round_trip_issue(text, problems);
      if (!issue.empty()) return {false, path + ": " + issue + " does not round-trip"};
      shipped += 1 + static_cast<int>(problems.size());
    }
  if (shipped == 0) return {false, "no shipped PDDL files found"};
  return {true, std::to_string(files) + " generated and " + std::to_string(shipped) + " shipped files"};
}

}  // namespace

int main() {
  run(1, "closure fidelity", 1, c1);
  run(2, "worked update operation set", 1, c2);
  run(3, "compatibility biconditional", 30, c3);
  run(4, "update oracle equivalence", 300, c4);
  run(5, "ECQ rewriting equivalence", 120, c5);
  run(6, "compilation round trip", 600, c6);
  run(7, "deriveUp/setUp plan sets", 300, c7);
  run(8, "Tseitin equisatisfiability", 120, c8);
  run(9, "conflicting-effect reduction", 300, c9);
  run(10, "eKAB/ceKAB divergence", 1, c10);
  run(11, "determinism and round trip", 60, c11);
  std::printf("%d of 11 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
