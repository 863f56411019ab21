#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "uturn/assertions.hpp"
#include "uturn/il.hpp"
#include "uturn/json_io.hpp"
#include "uturn/lang.hpp"
#include "uturn/sil.hpp"
#include "uturn/uturn.hpp"

using namespace uturn;

namespace {

const std::set<VarName> kVars = {"x", "y"};

AssertPtr roundtrip(const AssertPtr& p, const Universe& u) {
  json j = to_json(*p);
  json reparsed = json::parse(j.dump());
  return assertion_from_json(reparsed, u);
}

}  // namespace

TEST_CASE("assertions survive a json round trip") {
  Universe u(4, {"x", "y"});
  for (const char* text : {
           "ok: true",
           "ok: false",
           "er: x = 0",
           "ok: x = 1 or er: y != 0",
           "ok: exists x. x = y and y > 0",
           "ok: not (x <= y)",
       }) {
    AssertPtr p = parse_assertion(text, kVars);
    REQUIRE(equiv(roundtrip(p, u), p, u));
  }
}

TEST_CASE("structured assertion nodes round trip") {
  Universe u(4, {"x", "y"});
  testsupport::Rng rng(103);
  StateSet s = testsupport::random_state_set(rng, u);
  AssertPtr states = canonical(s, u);
  REQUIRE(extension(roundtrip(states, u), u) == s);

  ACmd inc{Assign{"x", binop(AOp::Add, var("x"), lit(1))}};
  AssertPtr p = parse_assertion("ok: x = 0", kVars);
  for (AssertPtr q : {fwatom(inc, p), bwatom(inc, p), aimplies(p, atrue())}) {
    REQUIRE(equiv(roundtrip(q, u), q, u));
  }
}

TEST_CASE("il derivations round trip and re-check") {
  Universe u(32, {"x"});
  Program prog = parse_program("vars x; x := 10; while (x > 0) { x := x - 1 }; error()");
  Heuristics h;
  h.max_unroll = 10;
  ILDerivPtr d = synthesize_forward(parse_assertion("ok: true", {"x"}), prog.body, h, u);
  json j = json::parse(to_json(*d).dump());
  ILDerivPtr d2 = il_derivation_from_json(j, u);
  REQUIRE(d2->rule == d->rule);
  REQUIRE(equal(d2->triple.cmd, d->triple.cmd));
  REQUIRE_NOTHROW(check_il_derivation(*d2, u));
  REQUIRE(extension(d2->triple.pre, u) == extension(d->triple.pre, u));
  REQUIRE(extension(d2->triple.post, u) == extension(d->triple.post, u));
}

TEST_CASE("sil derivations round trip and re-check") {
  Universe u(8, {"x", "y"});
  testsupport::Rng rng(107);
  Heuristics h;
  h.max_unroll = 3;
  for (int i = 0; i < 20; ++i) {
    RCmdPtr r = testsupport::gen_rcmd(rng, {"x", "y"}, 3);
    AssertPtr q = canonical(testsupport::random_state_set(rng, u), u);
    SILDerivPtr d = synthesize_backward(r, q, h, u);
    SILDerivPtr d2 = sil_derivation_from_json(json::parse(to_json(*d).dump()), u);
    REQUIRE_NOTHROW(check_sil_derivation(*d2, u));
    REQUIRE(extension(d2->triple.pre, u) == extension(d->triple.pre, u));
  }
}

TEST_CASE("replay trees round trip to the same judgment") {
  Universe u(32, {"x"});
  Program prog = parse_program("vars x; x := 10; while (x > 0) { x := x - 1 }; error()");
  Heuristics h;
  h.max_unroll = 10;
  ILDerivPtr d = synthesize_forward(parse_assertion("ok: true", {"x"}), prog.body, h, u);
  auto [pp, ud] = run_uturn(d, parse_assertion("er: x = 0", {"x"}), u);

  UTurnDerivation ud2 = uturn_derivation_from_json(json::parse(to_json(ud).dump()), u);
  UTurnJudgment j1 = check_uturn_derivation(ud, u);
  UTurnJudgment j2 = check_uturn_derivation(ud2, u);
  REQUIRE(extension(j1.sil_pre, u) == extension(j2.sil_pre, u));
  REQUIRE(extension(j1.sil_post, u) == extension(j2.sil_post, u));
  REQUIRE(check_judgment_validity(j2, u));
}
