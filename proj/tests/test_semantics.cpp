#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"
#include "uturn/lang.hpp"
#include "uturn/semantics.hpp"
#include "uturn/state.hpp"

using namespace uturn;

namespace {

StateSet singleton(const FlaggedState& s, const Universe& u) {
  StateSet out(u);
  out.insert(s, u);
  return out;
}

}  // namespace

TEST_CASE("atomic steps follow the one-step semantics") {
  Universe u(32, {"x"});
  ACmd inc{Assign{"x", binop(AOp::Add, var("x"), lit(1))}};
  StateSet r = atomic_step(inc, {Flag::Ok, {1}}, u);
  REQUIRE(r == singleton({Flag::Ok, {2}}, u));

  ACmd guard{Assume{bcmp(CmpOp::Lt, lit(0), var("x"))}};
  REQUIRE(atomic_step(guard, {Flag::Ok, {0}}, u).empty());
  REQUIRE(atomic_step(guard, {Flag::Ok, {3}}, u) == singleton({Flag::Ok, {3}}, u));

  // every command is the identity on er states
  ACmd zero{Assign{"x", lit(0)}};
  REQUIRE(atomic_step(zero, {Flag::Er, {5}}, u) == singleton({Flag::Er, {5}}, u));

  ACmd err{Error{}};
  REQUIRE(atomic_step(err, {Flag::Ok, {7}}, u) == singleton({Flag::Er, {7}}, u));
}

TEST_CASE("nondet ranges over the whole residue range") {
  Universe u(4, {"x"});
  StateSet r = atomic_step(ACmd{Nondet{"x"}}, {Flag::Ok, {0}}, u);
  REQUIRE(r == StateSet::all_with_flag(u, Flag::Ok));
}

TEST_CASE("fwsem on skip is the identity") {
  Universe u(8, {"x"});
  testsupport::Rng rng(11);
  StateSet s = testsupport::random_state_set(rng, u);
  REQUIRE(fwsem(*skip(), s, u) == s);
}

TEST_CASE("the example loop drives x to zero") {
  Universe u(32, {"x"});
  Program p = parse_program("vars x; while (x > 0) { x := x - 1 }");
  StateSet out = fwsem(*p.body, singleton({Flag::Ok, {3}}, u), u);
  REQUIRE(out == singleton({Flag::Ok, {0}}, u));
}

TEST_CASE("bwsem reverses the forward relation") {
  Universe u(8, {"x"});
  RCmdPtr zero = assign("x", lit(0));
  StateSet post0(u);
  post0.insert({Flag::Ok, {0}}, u);
  REQUIRE(bwsem(*zero, post0, u) == StateSet::all_with_flag(u, Flag::Ok));

  StateSet post1(u);
  post1.insert({Flag::Ok, {1}}, u);
  REQUIRE(bwsem(*zero, post1, u).empty());

  testsupport::Rng rng(13);
  StateSet s = testsupport::random_state_set(rng, u);
  REQUIRE(bwsem(*skip(), s, u) == s);
}

TEST_CASE("forward and backward semantics are adjoint") {
  testsupport::Rng rng(17);
  Universe u(4, {"x", "y"});
  for (int i = 0; i < 25; ++i) {
    RCmdPtr r = testsupport::gen_rcmd(rng, u.vars(), 3);
    for (std::uint64_t a = 0; a < u.state_count(); ++a) {
      StateSet fw = fwsem(*r, singleton(state_at(a, u), u), u);
      for (std::uint64_t b = 0; b < u.state_count(); ++b) {
        StateSet bw = bwsem(*r, singleton(state_at(b, u), u), u);
        REQUIRE(fw.test(b) == bw.test(a));
      }
    }
  }
}

TEST_CASE("both semantics are additive") {
  testsupport::Rng rng(19);
  Universe u(4, {"x", "y"});
  for (int i = 0; i < 30; ++i) {
    RCmdPtr r = testsupport::gen_rcmd(rng, u.vars(), 3);
    StateSet s1 = testsupport::random_state_set(rng, u);
    StateSet s2 = testsupport::random_state_set(rng, u);
    REQUIRE(fwsem(*r, set_union(s1, s2), u) == set_union(fwsem(*r, s1, u), fwsem(*r, s2, u)));
    REQUIRE(bwsem(*r, set_union(s1, s2), u) == set_union(bwsem(*r, s1, u), bwsem(*r, s2, u)));
  }
}

TEST_CASE("er-only sets pass through every command unchanged") {
  testsupport::Rng rng(23);
  Universe u(4, {"x", "y"});
  for (int i = 0; i < 40; ++i) {
    RCmdPtr r = testsupport::gen_rcmd(rng, u.vars(), 3);
    StateSet er = set_intersect(testsupport::random_state_set(rng, u), StateSet::all_with_flag(u, Flag::Er));
    REQUIRE(fwsem(*r, er, u) == er);
  }
}

TEST_CASE("star satisfies its unfolding equation") {
  testsupport::Rng rng(29);
  Universe u(4, {"x", "y"});
  for (int i = 0; i < 30; ++i) {
    RCmdPtr r = testsupport::gen_rcmd(rng, u.vars(), 2);
    RCmdPtr looped = star(r);
    StateSet s = testsupport::random_state_set(rng, u);
    StateSet lhs = fwsem(*looped, s, u);
    StateSet rhs = set_union(s, fwsem(*looped, fwsem(*r, s, u), u));
    REQUIRE(lhs == rhs);
  }
}

TEST_CASE("divergent loops contribute only reachable states") {
  Universe u(8, {"x"});
  StateSet s(u);
  s.insert({Flag::Ok, {2}}, u);
  // iter { skip } reaches exactly the input states
  REQUIRE(fwsem(*star(skip()), s, u) == s);
  // iter { x := x + 1 } wraps around the whole residue ring
  StateSet out = fwsem(*star(assign("x", binop(AOp::Add, var("x"), lit(1)))), s, u);
  REQUIRE(out == StateSet::all_with_flag(u, Flag::Ok));
}

TEST_CASE("atomic preimages agree with brute-force reversal") {
  testsupport::Rng rng(31);
  Universe u(4, {"x", "y"});
  for (int i = 0; i < 60; ++i) {
    ACmd c = testsupport::gen_acmd(rng, u.vars());
    StateSet t = testsupport::random_state_set(rng, u);
    REQUIRE(atomic_preimage_set(c, t, u) == bwsem(*atom(c), t, u));
  }
}
