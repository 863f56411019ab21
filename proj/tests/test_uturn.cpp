#include <catch2/catch_amalgamated.hpp>

#include <functional>

#include "support.hpp"
#include "uturn/assertions.hpp"
#include "uturn/errors.hpp"
#include "uturn/il.hpp"
#include "uturn/lang.hpp"
#include "uturn/semantics.hpp"
#include "uturn/sil.hpp"
#include "uturn/uturn.hpp"

using namespace uturn;

namespace {

const char* kCountdown = "vars x; x := 10; while (x > 0) { x := x - 1 }; error()";

const char* kFoo =
    "vars b x p;"
    "x := nondet();"
    "if (b != 0 and x != 0) { p := 1 } else { p := 0 };"
    "if (p = 0) { error() } else { skip }";

bool contains_rule(const UNodePtr& n, URule r) {
  if (n->rule == r) return true;
  for (const auto& c : n->children)
    if (contains_rule(c, r)) return true;
  return false;
}

}  // namespace

TEST_CASE("judgment validity conditions") {
  Universe u(8, {"x"});
  AssertPtr p = parse_assertion("ok: true", {"x"});
  ILDerivPtr d = synthesize_forward(p, assign("x", lit(0)), Heuristics{}, u);

  // both-empty SIL pair is valid alongside any derivation
  AssertPtr f = parse_assertion("ok: false", {"x"});
  REQUIRE(check_judgment_validity({d, f, d->triple.cmd, f}, u));

  // a nonempty pair below the derived triple is valid
  AssertPtr q = parse_assertion("ok: x = 0", {"x"});
  REQUIRE(check_judgment_validity({d, p, d->triple.cmd, q}, u));

  // P' outside P violates condition 2
  Universe u2(8, {"x"});
  ILDerivPtr d2 = synthesize_forward(parse_assertion("ok: x = 1", {"x"}), assign("x", lit(0)),
                                     Heuristics{}, u2);
  REQUIRE(judgment_violation({d2, parse_assertion("ok: x = 2", {"x"}), d2->triple.cmd, q}, u2) == 2);

  // Q' reachable through the command but outside the derived post violates
  // condition 3 (the dropped branch is still in the semantics)
  Heuristics left;
  left.branch_policy = BranchPolicy::Left;
  ILDerivPtr dl = synthesize_forward(p, choice(assign("x", lit(1)), assign("x", lit(2))), left, u);
  REQUIRE(judgment_violation({dl, p, dl->triple.cmd, parse_assertion("ok: x = 2", {"x"})}, u) == 3);

  // one side empty, the other not, violates condition 4 (if 1-3 hold)
  REQUIRE(judgment_violation({d, f, d->triple.cmd, q}, u) == 4);
}

TEST_CASE("replaying a single assignment recovers the precondition") {
  Universe u(8, {"x"});
  AssertPtr p = parse_assertion("ok: x = 1 or x = 2", {"x"});
  ACmd inc{Assign{"x", binop(AOp::Add, var("x"), lit(1))}};
  ILDerivPtr d = synthesize_forward(p, atom(inc), Heuristics{}, u);
  auto [pp, ud] = run_uturn(d, d->triple.post, u);
  REQUIRE(equiv(pp, p, u));
  UTurnJudgment j = check_uturn_derivation(ud, u);
  REQUIRE(check_judgment_validity(j, u));
}

TEST_CASE("the checker rejects a widened replay pre") {
  Universe u(8, {"x"});
  ILDerivPtr d = synthesize_forward(parse_assertion("ok: x = 1", {"x"}), assign("x", lit(0)),
                                    Heuristics{}, u);
  auto [pp, ud] = run_uturn(d, d->triple.post, u);
  // tamper with the root pre
  UNodePtr bad = u_node(ud.root->rule, ud.root->il_path, parse_assertion("ok: true", {"x"}),
                        ud.root->sil_post, ud.root->children);
  REQUIRE_THROWS_AS(check_uturn_derivation({ud.il, bad}, u), CheckError);
}

TEST_CASE("the checker rejects a replay rule mismatched with the il node") {
  Universe u(8, {"x"});
  AssertPtr p = parse_assertion("ok: true", {"x"});
  Heuristics right;
  right.branch_policy = BranchPolicy::Right;
  ILDerivPtr d = synthesize_forward(p, choice(assign("x", lit(1)), assign("x", lit(2))), right, u);
  REQUIRE(d->rule == ILRule::ChoiceR);
  auto [pp, ud] = run_uturn(d, d->triple.post, u);
  REQUIRE(ud.root->rule == URule::ChoiceR);
  UNodePtr bad = u_node(URule::ChoiceL, ud.root->il_path, ud.root->sil_pre, ud.root->sil_post,
                        ud.root->children);
  REQUIRE_THROWS_AS(check_uturn_derivation({ud.il, bad}, u), CheckError);
}

TEST_CASE("the example program replays to the full ok precondition") {
  Universe u(32, {"x"});
  Program prog = parse_program(kCountdown);
  Heuristics h;
  h.max_unroll = 10;
  ILDerivPtr d = synthesize_forward(parse_assertion("ok: true", {"x"}), prog.body, h, u);
  auto [pp, ud] = run_uturn(d, parse_assertion("er: x = 0", {"x"}), u);
  UTurnJudgment j = check_uturn_derivation(ud, u);
  REQUIRE(check_judgment_validity(j, u));
  // every ok start state reaches the error, so the replayed pre is all of ok
  REQUIRE(equiv(pp, parse_assertion("ok: true", {"x"}), u));
  REQUIRE(sil_valid({pp, prog.body, parse_assertion("er: x = 0", {"x"})}, u));
  REQUIRE(il_valid({pp, prog.body, parse_assertion("er: x = 0", {"x"})}, u));
}

TEST_CASE("replay preconditions are enforced") {
  Universe u(8, {"x"});
  ILDerivPtr d = synthesize_forward(parse_assertion("ok: true", {"x"}), assign("x", lit(0)),
                                    Heuristics{}, u);
  REQUIRE_THROWS_AS(run_uturn(d, parse_assertion("ok: false", {"x"}), u), PreconditionError);
  REQUIRE_THROWS_AS(run_uturn(d, parse_assertion("ok: x = 1", {"x"}), u), PreconditionError);
}

TEST_CASE("random replays produce valid judgments without the sil consequence rule") {
  testsupport::Rng rng(79);
  Universe u(8, {"x", "y"});
  std::vector<VarName> vars = {"x", "y"};
  Heuristics h;
  h.max_unroll = 4;
  int done = 0;
  while (done < 50) {
    RCmdPtr r = testsupport::gen_rcmd(rng, vars, 4);
    AssertPtr p = canonical(testsupport::random_nonempty_state_set(rng, u), u);
    ILDerivPtr d = synthesize_forward(p, r, h, u);
    StateSet post = extension(d->triple.post, u);
    if (post.empty()) continue;
    StateSet tgt = testsupport::random_nonempty_subset(rng, post, u);
    AssertPtr qp = canonical(tgt, u);
    auto [pp, ud] = run_uturn(d, qp, u);
    UTurnJudgment j{d, pp, d->triple.cmd, qp};
    REQUIRE(judgment_violation(j, u) == 0);
    REQUIRE(il_valid({pp, r, qp}, u));
    REQUIRE_FALSE(is_empty(pp, u));
    REQUIRE_FALSE(contains_rule(ud.root, URule::ConsSIL));
    UTurnJudgment jc = check_uturn_derivation(ud, u);
    REQUIRE(extension(jc.sil_pre, u) == extension(pp, u));
    REQUIRE(extension(jc.sil_post, u) == extension(qp, u));
    ++done;
  }
}

TEST_CASE("the dual replay runs a backward proof forward") {
  Universe u(8, {"x"});
  SILDerivPtr d = synthesize_backward(skip(), parse_assertion("ok: true", {"x"}), Heuristics{}, u);
  auto [qp, td] = run_turnu(d, parse_assertion("ok: x = 3", {"x"}), u);
  REQUIRE(equiv(qp, parse_assertion("ok: x = 3", {"x"}), u));
  REQUIRE(td.root->rule == TRule::Skip);
}

TEST_CASE("dual replay preconditions are enforced") {
  Universe u(8, {"x"});
  SILDerivPtr d = synthesize_backward(skip(), parse_assertion("ok: x = 1", {"x"}), Heuristics{}, u);
  REQUIRE_THROWS_AS(run_turnu(d, parse_assertion("ok: false", {"x"}), u), PreconditionError);
  REQUIRE_THROWS_AS(run_turnu(d, parse_assertion("ok: x = 2", {"x"}), u), PreconditionError);
}

TEST_CASE("the branching example pins the bug to the nondet pick") {
  Universe u(4, {"b", "x", "p"});
  std::set<VarName> vs = {"b", "x", "p"};
  Program prog = parse_program(kFoo);
  Heuristics h;

  // plain backward analysis from the error: every ok start can fail, because
  // the nondet may pick x = 0
  SILDerivPtr d = synthesize_backward(prog.body, parse_assertion("er: true", vs), h, u);
  REQUIRE_NOTHROW(check_sil_derivation(*d, u));
  AssertPtr manifest = parse_assertion("ok: b != 0", vs);
  REQUIRE(implies(manifest, d->triple.pre, u));

  // replaying forward from b != 0 recovers the exact failure post
  auto [qp, td] = run_turnu(d, manifest, u);
  AssertPtr expect = parse_assertion("er: b != 0 and x = 0 and p = 0", vs);
  REQUIRE(equiv(qp, expect, u));
  REQUIRE(sil_valid({manifest, prog.body, qp}, u));
  REQUIRE(il_valid({manifest, prog.body, qp}, u));
}

TEST_CASE("random dual replays yield both-valid triples") {
  testsupport::Rng rng(83);
  Universe u(8, {"x", "y"});
  std::vector<VarName> vars = {"x", "y"};
  Heuristics h;
  h.max_unroll = 4;
  int done = 0;
  while (done < 50) {
    RCmdPtr r = testsupport::gen_rcmd(rng, vars, 4);
    AssertPtr q = canonical(testsupport::random_nonempty_state_set(rng, u), u);
    SILDerivPtr d = synthesize_backward(r, q, h, u);
    StateSet pre = extension(d->triple.pre, u);
    if (pre.empty()) continue;
    StateSet src = testsupport::random_nonempty_subset(rng, pre, u);
    AssertPtr pp = canonical(src, u);
    auto [qp, td] = run_turnu(d, pp, u);
    REQUIRE(sil_valid({pp, r, qp}, u));
    REQUIRE(il_valid({pp, r, qp}, u));
    REQUIRE_FALSE(is_empty(qp, u));
    ++done;
  }
}
