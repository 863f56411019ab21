#ifndef UTURN_TESTS_SUPPORT_HPP
#define UTURN_TESTS_SUPPORT_HPP

// Shared generators for the property suites: random expressions, commands,
// assertions, and state sets, all driven by a seeded mt19937_64 so failures
// are reproducible.

#include <cstdint>
#include <random>
#include <vector>

#include "uturn/assertions.hpp"
#include "uturn/lang.hpp"
#include "uturn/state.hpp"

namespace testsupport {

using namespace uturn;

using Rng = std::mt19937_64;

inline int pick(Rng& rng, int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); }

inline const VarName& pick_var(Rng& rng, const std::vector<VarName>& vars) {
  return vars[static_cast<std::size_t>(pick(rng, static_cast<int>(vars.size())))];
}

inline AExpPtr gen_aexp(Rng& rng, const std::vector<VarName>& vars, int depth) {
  int c = pick(rng, depth > 0 ? 4 : 2);
  switch (c) {
    case 0: return lit(pick(rng, 9) - 4);
    case 1: return var(pick_var(rng, vars));
    default: {
      AOp op = static_cast<AOp>(pick(rng, 3));
      return binop(op, gen_aexp(rng, vars, depth - 1), gen_aexp(rng, vars, depth - 1));
    }
  }
}

inline BExpPtr gen_bexp(Rng& rng, const std::vector<VarName>& vars, int depth) {
  int c = pick(rng, depth > 0 ? 10 : 6);
  if (c < 5) {
    CmpOp op = static_cast<CmpOp>(pick(rng, 4));
    return bcmp(op, gen_aexp(rng, vars, depth), gen_aexp(rng, vars, depth));
  }
  if (c == 5) return pick(rng, 2) ? btrue() : bfalse();
  if (c < 8) return bnot(gen_bexp(rng, vars, depth - 1));
  return band(gen_bexp(rng, vars, depth - 1), gen_bexp(rng, vars, depth - 1));
}

inline ACmd gen_acmd(Rng& rng, const std::vector<VarName>& vars) {
  int c = pick(rng, 100);
  if (c < 30) return ACmd{Assign{pick_var(rng, vars), gen_aexp(rng, vars, 2)}};
  if (c < 55) return ACmd{Assume{gen_bexp(rng, vars, 1)}};
  if (c < 70) return ACmd{Skip{}};
  if (c < 90) return ACmd{Nondet{pick_var(rng, vars)}};
  return ACmd{Error{}};
}

inline RCmdPtr gen_rcmd(Rng& rng, const std::vector<VarName>& vars, int depth) {
  int c = pick(rng, depth > 0 ? 100 : 35);
  if (c < 35) return atom(gen_acmd(rng, vars));
  if (c < 60) return seq(gen_rcmd(rng, vars, depth - 1), gen_rcmd(rng, vars, depth - 1));
  if (c < 80) return choice(gen_rcmd(rng, vars, depth - 1), gen_rcmd(rng, vars, depth - 1));
  return star(gen_rcmd(rng, vars, depth - 1));
}

/// Bernoulli subset of the whole state space; density in percent.
inline StateSet random_state_set(Rng& rng, const Universe& u, int density = 30) {
  StateSet s(u);
  for (std::uint64_t i = 0; i < u.state_count(); ++i)
    if (pick(rng, 100) < density) s.set(i);
  return s;
}

inline StateSet random_nonempty_state_set(Rng& rng, const Universe& u, int density = 30) {
  StateSet s = random_state_set(rng, u, density);
  if (s.empty()) s.set(static_cast<std::uint64_t>(rng() % u.state_count()));
  return s;
}

/// Random nonempty subset of a nonempty set.
inline StateSet random_nonempty_subset(Rng& rng, const StateSet& of, const Universe& u) {
  StateSet s(u);
  std::vector<std::uint64_t> members;
  of.for_each([&](std::uint64_t i) { members.push_back(i); });
  for (std::uint64_t i : members)
    if (pick(rng, 2)) s.set(i);
  if (s.empty()) s.set(members[static_cast<std::size_t>(rng() % members.size())]);
  return s;
}

/// Random ok-tagged symbolic formula (occasionally quantified).
inline AssertPtr gen_ok_formula(Rng& rng, const std::vector<VarName>& vars, int depth = 2) {
  AssertPtr body = abool(gen_bexp(rng, vars, depth));
  if (pick(rng, 5) == 0) body = aexists(pick_var(rng, vars), body);
  return ok_tag(body);
}

}  // namespace testsupport

#endif
