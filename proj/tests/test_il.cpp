#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "uturn/assertions.hpp"
#include "uturn/errors.hpp"
#include "uturn/il.hpp"
#include "uturn/lang.hpp"
#include "uturn/semantics.hpp"

using namespace uturn;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kCountdown = "vars x; x := 10; while (x > 0) { x := x - 1 }; error()";

}  // namespace

TEST_CASE("il validity is forward reachability containment") {
  Universe u(8, {"x"});
  REQUIRE(il_valid({parse_assertion("ok: true", {"x"}), nondet("x"), parse_assertion("ok: x > 0", {"x"})}, u));
  REQUIRE(il_valid({parse_assertion("ok: x = 1", {"x"}), skip(), parse_assertion("ok: x = 1", {"x"})}, u));
  // empty pre forces empty post in any valid triple
  REQUIRE_FALSE(il_valid({parse_assertion("ok: false", {"x"}), skip(), parse_assertion("ok: x = 0", {"x"})}, u));
}

TEST_CASE("the checker accepts rule instances and rejects mismatches") {
  Universe u(8, {"x"});
  AssertPtr p = parse_assertion("ok: x = 1", {"x"});

  ILDerivPtr good = il_node(ILRule::Skip, {p, skip(), p});
  REQUIRE_NOTHROW(check_il_derivation(*good, u));

  ILDerivPtr bad = il_node(ILRule::Skip, {p, skip(), parse_assertion("ok: x = 2", {"x"})});
  REQUIRE_THROWS_AS(check_il_derivation(*bad, u), CheckError);

  // a mismatch inside a subtree is rejected with a nonempty node path
  RCmdPtr two = seq(skip(), skip());
  AssertPtr q2 = parse_assertion("ok: x = 2", {"x"});
  ILDerivPtr seq_bad = il_node(ILRule::Seq, {p, two, q2},
                               {il_node(ILRule::Skip, {p, skip(), p}),
                                il_node(ILRule::Skip, {p, skip(), q2})});
  try {
    check_il_derivation(*seq_bad, u);
    FAIL("expected a CheckError");
  } catch (const CheckError& e) {
    REQUIRE_FALSE(e.path().empty());
  }
}

TEST_CASE("the consequence rule widens the pre and shrinks the post") {
  Universe u(8, {"x"});
  ACmd inc{Assign{"x", binop(AOp::Add, var("x"), lit(1))}};
  AssertPtr p = parse_assertion("ok: x = 1", {"x"});
  ILDerivPtr axiom = il_node(ILRule::Assign, {p, atom(inc), sp_atom(inc, p)});
  // conclusion: weaker pre (x >= 0), smaller post (false)
  ILDerivPtr cons = il_node(
      ILRule::Cons, {parse_assertion("ok: x >= 0", {"x"}), atom(inc), parse_assertion("ok: false", {"x"})},
      {axiom});
  REQUIRE_NOTHROW(check_il_derivation(*cons, u));

  // the reverse direction must be rejected
  ILDerivPtr wrong = il_node(
      ILRule::Cons, {parse_assertion("ok: false", {"x"}), atom(inc), parse_assertion("ok: x = 2 or x = 3", {"x"})},
      {axiom});
  REQUIRE_THROWS_AS(check_il_derivation(*wrong, u), CheckError);
}

TEST_CASE("synthesis of skip is a single axiom node") {
  Universe u(8, {"x"});
  AssertPtr p = parse_assertion("ok: true", {"x"});
  ILDerivPtr d = synthesize_forward(p, skip(), Heuristics{}, u);
  REQUIRE(d->rule == ILRule::Skip);
  REQUIRE(d->children.empty());
  REQUIRE(equiv(d->triple.post, p, u));
}

TEST_CASE("synthesis from an empty pre yields the empty axiom") {
  Universe u(8, {"x"});
  ILDerivPtr d = synthesize_forward(parse_assertion("ok: false", {"x"}), nondet("x"), Heuristics{}, u);
  REQUIRE(d->rule == ILRule::Empty);
  REQUIRE(is_empty(d->triple.post, u));
}

TEST_CASE("the example program derives the error postcondition") {
  Universe u(32, {"x"});
  Program prog = parse_program(kCountdown);
  Heuristics h;
  h.max_unroll = 10;
  ILDerivPtr d = synthesize_forward(parse_assertion("ok: true", {"x"}), prog.body, h, u);
  REQUIRE_NOTHROW(check_il_derivation(*d, u));
  REQUIRE(equiv(d->triple.post, parse_assertion("er: x = 0", {"x"}), u));
}

TEST_CASE("branch policies select the matching choice rule") {
  Universe u(8, {"x"});
  RCmdPtr c = choice(assign("x", lit(1)), assign("x", lit(2)));
  AssertPtr p = parse_assertion("ok: true", {"x"});

  Heuristics left;
  left.branch_policy = BranchPolicy::Left;
  ILDerivPtr dl = synthesize_forward(p, c, left, u);
  REQUIRE(dl->rule == ILRule::ChoiceL);
  REQUIRE(equiv(dl->triple.post, parse_assertion("ok: x = 1", {"x"}), u));

  Heuristics right;
  right.branch_policy = BranchPolicy::Right;
  ILDerivPtr dr = synthesize_forward(p, c, right, u);
  REQUIRE(dr->rule == ILRule::ChoiceR);
  REQUIRE(equiv(dr->triple.post, parse_assertion("ok: x = 2", {"x"}), u));

  Heuristics both;
  ILDerivPtr db = synthesize_forward(p, c, both, u);
  REQUIRE(db->rule == ILRule::Disj);
  REQUIRE(equiv(db->triple.post, parse_assertion("ok: x = 1 or x = 2", {"x"}), u));
}

TEST_CASE("the disjunct cap falls back to a single branch") {
  Universe u(8, {"x"});
  RCmdPtr c = choice(assign("x", lit(1)), error_cmd());
  Heuristics h;
  h.max_disjuncts = 1;
  ILDerivPtr d = synthesize_forward(parse_assertion("ok: true", {"x"}), c, h, u);
  // the er-reaching branch is preferred by the drop policy
  REQUIRE(d->rule == ILRule::ChoiceR);
}

TEST_CASE("mixed-flag preconditions split through disj and er-id") {
  Universe u(8, {"x"});
  AssertPtr p = parse_assertion("ok: x = 1 or er: x = 2", {"x"});
  ILDerivPtr d = synthesize_forward(p, assign("x", lit(0)), Heuristics{}, u);
  REQUIRE(d->rule == ILRule::Disj);
  REQUIRE_NOTHROW(check_il_derivation(*d, u));
  REQUIRE(equiv(d->triple.post, parse_assertion("ok: x = 0 or er: x = 2", {"x"}), u));
}

TEST_CASE("engine output is checker-accepted and oracle-valid") {
  testsupport::Rng rng(53);
  Universe u(8, {"x", "y"});
  std::vector<VarName> vars = {"x", "y"};
  Heuristics h;
  h.max_unroll = 4;
  for (int i = 0; i < 60; ++i) {
    RCmdPtr r = testsupport::gen_rcmd(rng, vars, 4);
    AssertPtr p = canonical(testsupport::random_state_set(rng, u), u);
    ILDerivPtr d = synthesize_forward(p, r, h, u);
    REQUIRE_NOTHROW(check_il_derivation(*d, u));
    REQUIRE(il_valid(d->triple, u));
  }
}

TEST_CASE("valid triples satisfy the emptiness lemma") {
  testsupport::Rng rng(59);
  Universe u(8, {"x", "y"});
  std::vector<VarName> vars = {"x", "y"};
  for (int i = 0; i < 150; ++i) {
    RCmdPtr r = testsupport::gen_rcmd(rng, vars, 3);
    StateSet pre = testsupport::random_state_set(rng, u, i % 3 == 0 ? 0 : 30);
    StateSet img = fwsem(*r, pre, u);
    StateSet post = img.empty() ? img : testsupport::random_nonempty_subset(rng, img, u);
    ILTriple t{canonical(pre, u), r, canonical(post, u)};
    REQUIRE(il_valid(t, u));
    if (pre.empty()) REQUIRE(post.empty());
    if (!post.empty()) REQUIRE(!pre.empty());
  }
}

TEST_CASE("the fixture file parses to the example program") {
  Program a = parse_program(read_file(std::string(TEST_DATA_DIR) + "/countdown.prog"));
  Program b = parse_program(kCountdown);
  REQUIRE(equal(a.body, b.body));
}
