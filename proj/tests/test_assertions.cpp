#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "support.hpp"
#include "uturn/assertions.hpp"
#include "uturn/errors.hpp"
#include "uturn/semantics.hpp"

using namespace uturn;

namespace {

const std::set<VarName> kVars = {"x", "y"};

AssertPtr parse(const std::string& s) { return parse_assertion(s, kVars); }

}  // namespace

TEST_CASE("substitution rewrites free occurrences") {
  AssertPtr p = abool(bcmp(CmpOp::Eq, var("x"), lit(2)));
  AssertPtr q = substitute(p, binop(AOp::Add, var("x"), lit(1)), "x");
  const auto* b = std::get_if<ABool>(&q->node);
  REQUIRE(b != nullptr);
  REQUIRE(equal(b->expr, bcmp(CmpOp::Eq, binop(AOp::Add, var("x"), lit(1)), lit(2))));
}

TEST_CASE("substitution avoids capture by renaming binders") {
  // (exists x. x = y)[x / y]  ->  exists x'. x' = x
  AssertPtr p = aexists("x", abool(bcmp(CmpOp::Eq, var("x"), var("y"))));
  AssertPtr q = substitute(p, var("x"), "y");
  const auto* e = std::get_if<AExists>(&q->node);
  REQUIRE(e != nullptr);
  REQUIRE(e->var == "x'");
  const auto* b = std::get_if<ABool>(&e->body->node);
  REQUIRE(b != nullptr);
  REQUIRE(equal(b->expr, bcmp(CmpOp::Eq, var("x'"), var("x"))));
}

TEST_CASE("substitution under a shadowing binder is the identity") {
  AssertPtr p = aexists("x", abool(bcmp(CmpOp::Eq, var("x"), lit(0))));
  AssertPtr q = substitute(p, lit(5), "x");
  REQUIRE(equiv(p, q, Universe(4, {"x"})));
}

TEST_CASE("extensions denote the expected state sets") {
  Universe u2(2, {"x"});
  REQUIRE(extension(parse_assertion("ok: false", {"x"}), u2).empty());
  StateSet one = extension(parse_assertion("ok: x = 0", {"x"}), u2);
  REQUIRE(one.count() == 1);
  REQUIRE(one.contains({Flag::Ok, {0}}, u2));

  Universe u4(4, {"x"});
  REQUIRE(extension(parse_assertion("ok: exists x. x = 1", {"x"}), u4) ==
          StateSet::all_with_flag(u4, Flag::Ok));
}

TEST_CASE("implication is semantic containment") {
  Universe u(8, {"x", "y"});
  REQUIRE(implies(parse("ok: false"), parse("er: x = 3"), u));
  REQUIRE(implies(parse("ok: x = 0"), parse("ok: x >= 0"), u));
  REQUIRE_FALSE(implies(parse("ok: x >= 0"), parse("ok: x = 0"), u));
}

TEST_CASE("implication is a preorder") {
  testsupport::Rng rng(37);
  Universe u(4, {"x", "y"});
  std::vector<VarName> vars = {"x", "y"};
  for (int i = 0; i < 60; ++i) {
    AssertPtr a = testsupport::gen_ok_formula(rng, vars);
    AssertPtr b = testsupport::gen_ok_formula(rng, vars);
    AssertPtr c = testsupport::gen_ok_formula(rng, vars);
    REQUIRE(implies(a, a, u));
    if (implies(a, b, u) && implies(b, c, u)) REQUIRE(implies(a, c, u));
  }
}

TEST_CASE("strongest-post closed forms match the expected shapes") {
  Universe u(32, {"x"});
  ACmd ten{Assign{"x", lit(10)}};
  AssertPtr sp = sp_atom(ten, parse_assertion("ok: true", {"x"}));
  REQUIRE(equiv(sp, parse_assertion("ok: x = 10", {"x"}), u));

  AssertPtr p = parse_assertion("ok: x = 3", {"x"});
  REQUIRE(equiv(sp_atom(ACmd{Skip{}}, p), p, u));
}

TEST_CASE("backward closed forms match the expected shapes") {
  Universe u(32, {"x"});
  ACmd ten{Assign{"x", lit(10)}};
  AssertPtr wp = wp_atom(ten, parse_assertion("ok: x = 10", {"x"}));
  REQUIRE(equiv(wp, parse_assertion("ok: true", {"x"}), u));

  AssertPtr q = parse_assertion("ok: x = 3", {"x"});
  REQUIRE(equiv(wp_atom(ACmd{Skip{}}, q), q, u));
  // no ok state survives error() into an ok post
  REQUIRE(is_empty(wp_atom(ACmd{Error{}}, q), u));
}

TEST_CASE("transformers require ok-tagged arguments") {
  AssertPtr er = er_tag(atrue());
  REQUIRE_THROWS_AS(sp_atom(ACmd{Skip{}}, er), PreconditionError);
  REQUIRE_THROWS_AS(wp_atom(ACmd{Skip{}}, er), PreconditionError);
}

TEST_CASE("closed forms agree with the collecting semantics") {
  testsupport::Rng rng(41);
  Universe u(8, {"x", "y"});
  std::vector<VarName> vars = {"x", "y"};
  StateSet ok_states = StateSet::all_with_flag(u, Flag::Ok);
  for (int i = 0; i < 120; ++i) {
    ACmd c = testsupport::gen_acmd(rng, vars);
    AssertPtr p = testsupport::gen_ok_formula(rng, vars);
    REQUIRE(extension(sp_atom(c, p), u) == fwsem(*atom(c), extension(p, u), u));
    if (!std::holds_alternative<Error>(c.node)) {
      AssertPtr q = testsupport::gen_ok_formula(rng, vars);
      REQUIRE(extension(wp_atom(c, q), u) == set_intersect(bwsem(*atom(c), extension(q, u), u), ok_states));
    }
  }
}

TEST_CASE("assignment pre implies wp of its sp") {
  testsupport::Rng rng(43);
  Universe u(8, {"x", "y"});
  std::vector<VarName> vars = {"x", "y"};
  for (int i = 0; i < 100; ++i) {
    AssertPtr p = testsupport::gen_ok_formula(rng, vars);
    ACmd c{Assign{testsupport::pick_var(rng, vars), testsupport::gen_aexp(rng, vars, 2)}};
    REQUIRE(implies(p, wp_atom(c, sp_atom(c, p)), u));
  }
}

TEST_CASE("substitution is sound on extensions") {
  testsupport::Rng rng(47);
  Universe u(4, {"x", "y"});
  std::vector<VarName> vars = {"x", "y"};
  for (int i = 0; i < 80; ++i) {
    AssertPtr p = testsupport::gen_ok_formula(rng, vars);
    AExpPtr a = testsupport::gen_aexp(rng, vars, 2);
    const VarName& x = testsupport::pick_var(rng, vars);
    StateSet sub = extension(substitute(p, a, x), u);
    StateSet expect(u);
    StateSet pe = extension(p, u);
    std::size_t xi = u.var_index(x);
    for (std::uint64_t idx = 0; idx < u.state_count(); ++idx) {
      FlaggedState s = state_at(idx, u);
      s.store[xi] = eval_aexp(*a, s.store, u);
      if (pe.contains(s, u)) expect.set(idx);
    }
    REQUIRE(sub == expect);
  }
}

TEST_CASE("explicit state sets substitute pointwise") {
  Universe u(4, {"x"});
  StateSet s(u);
  s.insert({Flag::Ok, {0}}, u);
  AssertPtr p = canonical(s, u);
  // (x in {0})[x+1/x] = {x | x+1 = 0} = {-1}
  AssertPtr q = substitute(p, binop(AOp::Add, var("x"), lit(1)), "x");
  StateSet expect(u);
  expect.insert({Flag::Ok, {-1}}, u);
  REQUIRE(extension(q, u) == expect);
}

TEST_CASE("semantic atom nodes evaluate through the oracle") {
  Universe u(4, {"x"});
  ACmd inc{Assign{"x", binop(AOp::Add, var("x"), lit(1))}};
  AssertPtr p = parse_assertion("ok: x = 0", {"x"});
  StateSet fw = extension(fwatom(inc, p), u);
  REQUIRE(fw == fwsem(*atom(inc), extension(p, u), u));
  StateSet bw = extension(bwatom(inc, p), u);
  REQUIRE(bw == bwsem(*atom(inc), extension(p, u), u));
}

TEST_CASE("describe recovers simple formula shapes") {
  Universe u(4, {"x"});
  REQUIRE(describe(StateSet(u), u) == "false");
  REQUIRE(describe(StateSet::all_with_flag(u, Flag::Ok), u) == "ok: true");
  StateSet s(u);
  s.insert({Flag::Er, {0}}, u);
  REQUIRE(describe(s, u) == "er: x = 0");
}
