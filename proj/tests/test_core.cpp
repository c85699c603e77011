#include <gtest/gtest.h>

#include <random>

#include "cekab/core.hpp"
#include "cekab/formula.hpp"
#include "cekab/sexpr.hpp"

using namespace cekab;

namespace {

Atom on(Term a, Term b) { return Atom("on", {a, b}); }
Term v(const char* n) { return Term::var(n); }
Term c(const char* n) { return Term::cst(n); }

}  // namespace

TEST(Ground, SubstitutesAllVariables) {
  Atom g = ground(on(v("x"), v("y")), {{"x", "b1"}, {"y", "b2"}});
  EXPECT_EQ(g, fact("on", {"b1", "b2"}));
  EXPECT_TRUE(g.is_ground());
}

TEST(Ground, GroundAtomIsUnchanged) {
  Atom a = fact("on", {"b1", "b2"});
  EXPECT_EQ(ground(a, {}), a);
}

TEST(Ground, MissingBindingThrows) {
  EXPECT_THROW(ground(on(v("x"), v("y")), {{"x", "b1"}}), UnboundVariable);
}

TEST(Ground, ConstantsAreNotRebound) {
  Atom g = ground(on(c("x"), v("x")), {{"x", "b1"}});
  EXPECT_EQ(g, fact("on", {"x", "b1"}));
}

TEST(Ground, PartialLeavesUnbound) {
  Atom g = apply_partial(on(v("x"), v("y")), {{"x", "b1"}});
  EXPECT_EQ(g, on(c("b1"), v("y")));
}

TEST(ActiveDomain, ExampleAbox) {
  State s{fact("on_block", {"b1", "b2"}), fact("on_table", {"b3", "t"})};
  EXPECT_EQ(active_domain(s), (std::set<Sym>{"b1", "b2", "b3", "t"}));
}

TEST(ActiveDomain, EmptyAndSingle) {
  EXPECT_TRUE(active_domain({}).empty());
  EXPECT_EQ(active_domain({fact("Block", {"b1"})}), std::set<Sym>{"b1"});
}

TEST(Sym, CaseInsensitiveKeepsFirstSpelling) {
  Sym a("OnBlock_CaseTest");
  Sym b("onblock_casetest");
  EXPECT_EQ(a, b);
  EXPECT_EQ(b.str(), "OnBlock_CaseTest");
  EXPECT_EQ(b.key(), "onblock_casetest");
  EXPECT_NE(Sym("alpha_one"), Sym("alpha_two"));
  EXPECT_TRUE(Sym().empty());
}

TEST(Sym, OrderingUsesLowercase) {
  EXPECT_LT(Sym("Apple_ord"), Sym("banana_ord"));
  EXPECT_LT(Sym("apple_ord2"), Sym("BANANA_ord2"));
  EXPECT_TRUE(iequals("ABC", "abc"));
  EXPECT_TRUE(istarts_with("Ins_p", "ins_"));
  EXPECT_TRUE(iends_with("p_REQUEST", "_request"));
  EXPECT_FALSE(iends_with("st", "_request"));
}

TEST(Term, VariablesAndConstantsDiffer) {
  EXPECT_NE(Term::var("x"), Term::cst("x"));
  EXPECT_EQ(to_string(Term::var("x")), "?x");
}

TEST(ParseAtom, Forms) {
  EXPECT_EQ(parse_atom("on(b1, b2)"), fact("on", {"b1", "b2"}));
  EXPECT_EQ(parse_atom("p(?x,b)"), Atom("p", {v("x"), c("b")}));
  EXPECT_EQ(parse_atom("updating()").arity(), 0u);
  EXPECT_EQ(parse_atom("updating").arity(), 0u);
}

TEST(ParseAtom, Errors) {
  EXPECT_THROW(parse_atom("on(b1,b2"), ParseError);
  EXPECT_THROW(parse_atom("(b1)"), ParseError);
  EXPECT_THROW(parse_atom("on(b1,)"), ParseError);
}

TEST(ParseFacts, CommentsAndBlankLines) {
  State s = parse_facts("# header\n\non_block(b1,b2)\n  on_table(b3,t)  # trailing\n");
  EXPECT_EQ(s, (State{fact("on_block", {"b1", "b2"}), fact("on_table", {"b3", "t"})}));
}

TEST(ParseFacts, RejectsVariables) {
  EXPECT_THROW(parse_facts("on(?x,b)\n"), ParseError);
}

TEST(ParseFacts, ErrorCarriesLine) {
  try {
    parse_facts("p(a)\nq(b\n");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2);
  }
}

TEST(DumpFacts, SortedOneFactPerLine) {
  State s{fact("b", {"x"}), fact("a", {"y"})};
  EXPECT_EQ(dump_facts(s), "a(y)\nb(x)\n");
}

TEST(Signature, ArityConflictsAreErrors) {
  Signature sig;
  sig.add("p", 1, PredKind::Concept);
  EXPECT_TRUE(sig.contains("P"));
  EXPECT_EQ(sig.arity("p"), 1);
  EXPECT_EQ(sig.arity("q"), -1);
  EXPECT_THROW(sig.add("p", 2, PredKind::Role), SignatureMismatch);
  EXPECT_THROW(sig.add("r", 1, PredKind::Role), SignatureMismatch);
  EXPECT_THROW(sig.add("s", 2, PredKind::Concept), SignatureMismatch);
}

TEST(SExpr, ParsesNestedAndReportsUnclosed) {
  auto es = parse_sexprs("(define (domain d) ; note\n (:predicates (p ?x)))");
  ASSERT_EQ(es.size(), 1u);
  EXPECT_TRUE(es[0].head_is("define"));
  EXPECT_THROW(parse_sexprs("(a (b c)"), ParseError);
  EXPECT_THROW(parse_sexprs("a)"), ParseError);
}

TEST(Formula, FreeVarsAndSubstitution) {
  Formula f = f_exists({"y"}, f_and({f_atom(on(v("x"), v("y"))), f_not(f_atom(Atom("p", {v("y")})))}));
  EXPECT_EQ(free_vars(f), std::set<Sym>{"x"});
  Formula g = substitute(f, Substitution{{"x", "b1"}, {"y", "zz"}});
  EXPECT_TRUE(free_vars(g).empty());
  EXPECT_EQ(to_pddl(g), "(exists (?y) (and (on b1 ?y) (not (p ?y))))");
}

TEST(Formula, SubstitutionAvoidsCapture) {
  Formula f = f_exists({"y"}, f_atom(on(v("x"), v("y"))));
  Formula g = substitute(f, std::map<Sym, Term>{{"x", v("y")}});
  EXPECT_EQ(free_vars(g), std::set<Sym>{"y"});
}

TEST(Formula, NnfPushesNegation) {
  Formula f = f_not(f_and({f_atom(Atom("p", {})), f_exists({"x"}, f_atom(Atom("q", {v("x")})))}));
  Formula n = nnf(f);
  EXPECT_EQ(to_pddl(n), "(or (not (p)) (forall (?x) (not (q ?x))))");
  EXPECT_TRUE(is_literal(f_not(f_atom(Atom("p", {})))));
  EXPECT_FALSE(is_literal(f));
}

// Homomorphism: grounding with sigma then theta equals grounding with the
// composed substitution.
TEST(GroundProperty, Homomorphic) {
  std::mt19937 rng(7);
  std::vector<Sym> vars{"x", "y", "z", "w"};
  std::vector<Sym> consts{"a", "b", "c"};
  for (int iter = 0; iter < 500; ++iter) {
    std::vector<Term> args;
    int n = rng() % 4;
    for (int i = 0; i < n; ++i)
      args.push_back(rng() % 3 ? Term::var(vars[rng() % vars.size()]) : Term::cst(consts[rng() % consts.size()]));
    Atom a("p", args);
    Substitution sigma, theta;
    for (Sym x : vars) {
      int r = rng() % 3;
      if (r == 0) sigma[x] = consts[rng() % consts.size()];
      else theta[x] = consts[rng() % consts.size()];
    }
    Substitution comp = theta;
    for (auto& [k, val] : sigma) comp[k] = val;
    EXPECT_EQ(ground(a, comp), ground(apply_partial(a, sigma), theta));
  }
}

TEST(ActiveDomainProperty, UnionDistributes) {
  std::mt19937 rng(11);
  std::vector<Sym> consts{"a", "b", "c", "d", "e"};
  auto random_state = [&] {
    State s;
    int n = rng() % 5;
    for (int i = 0; i < n; ++i) s.insert(fact("r", {consts[rng() % 5], consts[rng() % 5]}));
    return s;
  };
  for (int iter = 0; iter < 300; ++iter) {
    State s1 = random_state(), s2 = random_state();
    State u = s1;
    u.insert(s2.begin(), s2.end());
    std::set<Sym> expect = active_domain(s1);
    auto d2 = active_domain(s2);
    expect.insert(d2.begin(), d2.end());
    EXPECT_EQ(active_domain(u), expect);
  }
}
