#ifndef UTURN_SEMANTICS_HPP
#define UTURN_SEMANTICS_HPP

// Exact collecting forward and backward semantics over the bounded universe.
// This is the ground-truth oracle: bwsem is computed by brute-force relation
// reversal (enumerate every state, test forward reachability) so that it does
// not depend on the symbolic transformer layer.

#include <cstdint>

#include "uturn/lang.hpp"
#include "uturn/state.hpp"

namespace uturn {

/// One-step semantics of an atomic command on a single flagged state.
/// Every command acts as the identity on er-flagged states.
inline StateSet atomic_step(const ACmd& c, const FlaggedState& s, const Universe& u) {
  StateSet out(u);
  if (s.flag == Flag::Er) {
    out.insert(s, u);
    return out;
  }
  if (std::holds_alternative<Skip>(c.node)) {
    out.insert(s, u);
  } else if (const auto* a = std::get_if<Assign>(&c.node)) {
    FlaggedState t = s;
    t.store[u.var_index(a->target)] = eval_aexp(*a->expr, s.store, u);
    out.insert(t, u);
  } else if (const auto* b = std::get_if<Assume>(&c.node)) {
    if (eval_bexp(*b->cond, s.store, u)) out.insert(s, u);
  } else if (const auto* n = std::get_if<Nondet>(&c.node)) {
    FlaggedState t = s;
    std::size_t xi = u.var_index(n->target);
    for (Value v = u.lo(); v <= u.hi(); ++v) {
      t.store[xi] = v;
      out.insert(t, u);
    }
  } else {  // Error
    out.insert(FlaggedState{Flag::Er, s.store}, u);
  }
  return out;
}

inline StateSet atomic_step_set(const ACmd& c, const StateSet& S, const Universe& u) {
  StateSet out(u);
  S.for_each([&](std::uint64_t i) { out.unite(atomic_step(c, state_at(i, u), u)); });
  return out;
}

/// Forward collecting semantics: the set of output states reachable from S.
/// Star is the least fixpoint, computed by Kleene iteration to stabilization
/// (guaranteed on the finite powerset lattice).
inline StateSet fwsem(const RCmd& r, const StateSet& S, const Universe& u) {
  if (const auto* a = std::get_if<Atom>(&r.node)) return atomic_step_set(a->cmd, S, u);
  if (const auto* s = std::get_if<Seq>(&r.node)) return fwsem(*s->second, fwsem(*s->first, S, u), u);
  if (const auto* c = std::get_if<Choice>(&r.node))
    return set_union(fwsem(*c->left, S, u), fwsem(*c->right, S, u));
  const auto& st = std::get<Star>(r.node);
  StateSet acc = S;
  StateSet frontier = S;
  for (;;) {
    StateSet next = fwsem(*st.body, frontier, u);
    next.subtract(acc);
    if (next.empty()) return acc;
    acc.unite(next);
    frontier = next;
  }
}

/// Preimage of a single state under one atomic step: { s | t ∈ step(c, s) }.
/// Cheap direct computation used by bwsem and the BwAtom assertion form.
inline StateSet atomic_preimage(const ACmd& c, const FlaggedState& t, const Universe& u) {
  StateSet out(u);
  // er states are fixed by every command, so any er target is its own preimage.
  if (t.flag == Flag::Er) out.insert(t, u);
  if (std::holds_alternative<Skip>(c.node)) {
    if (t.flag == Flag::Ok) out.insert(t, u);
  } else if (const auto* a = std::get_if<Assign>(&c.node)) {
    if (t.flag == Flag::Ok) {
      std::size_t xi = u.var_index(a->target);
      FlaggedState s = t;
      for (Value v = u.lo(); v <= u.hi(); ++v) {
        s.store[xi] = v;
        if (eval_aexp(*a->expr, s.store, u) == t.store[xi]) out.insert(s, u);
      }
    }
  } else if (const auto* b = std::get_if<Assume>(&c.node)) {
    if (t.flag == Flag::Ok && eval_bexp(*b->cond, t.store, u)) out.insert(t, u);
  } else if (const auto* n = std::get_if<Nondet>(&c.node)) {
    if (t.flag == Flag::Ok) {
      std::size_t xi = u.var_index(n->target);
      FlaggedState s = t;
      for (Value v = u.lo(); v <= u.hi(); ++v) {
        s.store[xi] = v;
        out.insert(s, u);
      }
    }
  } else {  // Error: er target reachable from the matching ok state too
    if (t.flag == Flag::Er) out.insert(FlaggedState{Flag::Ok, t.store}, u);
  }
  return out;
}

inline StateSet atomic_preimage_set(const ACmd& c, const StateSet& S, const Universe& u) {
  StateSet out(u);
  S.for_each([&](std::uint64_t i) { out.unite(atomic_preimage(c, state_at(i, u), u)); });
  return out;
}

/// Backward collecting semantics, the relational reverse of fwsem:
/// { s | fwsem(r, {s}) ∩ S ≠ ∅ }, by enumerating all flagged states.
inline StateSet bwsem(const RCmd& r, const StateSet& S, const Universe& u) {
  StateSet out(u);
  for (std::uint64_t i = 0; i < u.state_count(); ++i) {
    StateSet single(u);
    single.set(i);
    if (!set_intersect(fwsem(r, single, u), S).empty()) out.set(i);
  }
  return out;
}

}  // namespace uturn

#endif
