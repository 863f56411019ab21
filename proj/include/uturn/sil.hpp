#ifndef UTURN_SIL_HPP
#define UTURN_SIL_HPP

// Sufficient Incorrectness Logic: triples, derivations, checker, oracle
// validity, and the backward synthesis engine.
//
// A triple <P> r <Q> is SIL-valid iff every state of P can reach some state
// of Q: ext(P) <= bwsem(r, ext(Q)). Atom axioms run Hoare's backward
// transformer; composite rules mirror the forward system.

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "uturn/assertions.hpp"
#include "uturn/errors.hpp"
#include "uturn/il.hpp"
#include "uturn/lang.hpp"
#include "uturn/semantics.hpp"
#include "uturn/state.hpp"

namespace uturn {

struct SILTriple {
  AssertPtr pre;
  RCmdPtr cmd;
  AssertPtr post;
};

/// true iff ext(pre) is a subset of bwsem(cmd, ext(post)).
inline bool sil_valid(const SILTriple& t, const Universe& u) {
  return extension(t.pre, u).subset_of(bwsem(*t.cmd, extension(t.post, u), u));
}

enum class SILRule {
  Assign,
  Assume,
  Nondet,
  Skip,
  Error,
  ErId,
  Disj,
  Cons,
  Seq,
  ChoiceL,
  ChoiceR,
  Iter0,
  Unroll,
  Empty,
};

inline const char* to_string(SILRule r) {
  switch (r) {
    case SILRule::Assign: return "SILAssign";
    case SILRule::Assume: return "SILAssume";
    case SILRule::Nondet: return "SILNondet";
    case SILRule::Skip: return "SILSkip";
    case SILRule::Error: return "SILError";
    case SILRule::ErId: return "SILErId";
    case SILRule::Disj: return "SILDisj";
    case SILRule::Cons: return "SILCons";
    case SILRule::Seq: return "SILSeq";
    case SILRule::ChoiceL: return "SILChoiceL";
    case SILRule::ChoiceR: return "SILChoiceR";
    case SILRule::Iter0: return "SILIter0";
    case SILRule::Unroll: return "SILUnroll";
    default: return "SILEmpty";
  }
}

struct SILDerivation;
using SILDerivPtr = std::shared_ptr<const SILDerivation>;

struct SILDerivation {
  SILRule rule;
  SILTriple triple;
  std::vector<SILDerivPtr> children;
};

inline SILDerivPtr sil_node(SILRule rule, SILTriple t, std::vector<SILDerivPtr> children = {}) {
  return std::make_shared<SILDerivation>(SILDerivation{rule, std::move(t), std::move(children)});
}

// ---------------------------------------------------------------------------
// Derivation checker

namespace detail {

inline void check_sil_node(const SILDerivation& d, const Universe& u, std::vector<int>& path) {
  const SILTriple& t = d.triple;
  StateSet pre = extension(t.pre, u);
  StateSet post = extension(t.post, u);
  StateSet ok_states = StateSet::all_with_flag(u, Flag::Ok);
  StateSet er_states = StateSet::all_with_flag(u, Flag::Er);

  auto expect_children = [&](std::size_t n) {
    if (d.children.size() != n)
      il_fail(path, std::string(to_string(d.rule)) + " expects " + std::to_string(n) +
                        " children, has " + std::to_string(d.children.size()));
  };
  auto child = [&](std::size_t i) -> const SILDerivation& { return *d.children[i]; };
  auto check_child = [&](std::size_t i) {
    path.push_back(static_cast<int>(i));
    check_sil_node(child(i), u, path);
    path.pop_back();
  };
  auto child_cmd_equals = [&](std::size_t i, const RCmd& r) {
    if (!equal(*child(i).triple.cmd, r)) il_fail(path, "child command does not match the rule shape");
  };

  switch (d.rule) {
    case SILRule::Assign:
    case SILRule::Assume:
    case SILRule::Nondet:
    case SILRule::Skip: {
      expect_children(0);
      const Atom* a = as_atom(*t.cmd);
      bool kind_ok = a && ((d.rule == SILRule::Assign && std::holds_alternative<Assign>(a->cmd.node)) ||
                           (d.rule == SILRule::Assume && std::holds_alternative<Assume>(a->cmd.node)) ||
                           (d.rule == SILRule::Nondet && std::holds_alternative<Nondet>(a->cmd.node)) ||
                           (d.rule == SILRule::Skip && std::holds_alternative<Skip>(a->cmd.node)));
      if (!kind_ok) il_fail(path, std::string(to_string(d.rule)) + " applied to a non-matching command");
      if (!post.subset_of(ok_states)) il_fail(path, "backward atom axiom requires an ok-only post");
      StateSet wp = set_intersect(atomic_preimage_set(a->cmd, post, u), ok_states);
      if (!(pre == wp)) il_fail(path, "backward atom axiom pre is not the backward transformer of the post");
      return;
    }
    case SILRule::Error: {
      // <ok: R> error() <er: R>
      expect_children(0);
      if (!atom_is<Error>(*t.cmd)) il_fail(path, "SILError applied to a non-error command");
      if (!post.subset_of(er_states)) il_fail(path, "SILError requires an er-only post");
      StateSet wp = set_intersect(atomic_preimage_set(ACmd{Error{}}, post, u), ok_states);
      if (!(pre == wp)) il_fail(path, "SILError pre must be the ok-retagging of the post");
      return;
    }
    case SILRule::ErId: {
      expect_children(0);
      if (!set_intersect(pre, ok_states).empty()) il_fail(path, "er-id requires an er-only precondition");
      if (!(post == pre)) il_fail(path, "er-id requires post semantically equal to pre");
      return;
    }
    case SILRule::Empty: {
      expect_children(0);
      if (!pre.empty() || !post.empty()) il_fail(path, "empty axiom requires both assertions empty");
      return;
    }
    case SILRule::Disj: {
      expect_children(2);
      check_child(0);
      check_child(1);
      child_cmd_equals(0, *t.cmd);
      child_cmd_equals(1, *t.cmd);
      if (!(pre == set_union(extension(child(0).triple.pre, u), extension(child(1).triple.pre, u))))
        il_fail(path, "disj pre is not the union of the child pres");
      if (!(post == set_union(extension(child(0).triple.post, u), extension(child(1).triple.post, u))))
        il_fail(path, "disj post is not the union of the child posts");
      return;
    }
    case SILRule::Cons: {
      // conclusion <P> r <Q> from premise <P'> r <Q'> with P => P'
      // (pre may shrink) and Q' => Q (post may widen).
      expect_children(1);
      check_child(0);
      child_cmd_equals(0, *t.cmd);
      if (!pre.subset_of(extension(child(0).triple.pre, u)))
        il_fail(path, "cons: conclusion pre does not imply the premise pre");
      if (!extension(child(0).triple.post, u).subset_of(post))
        il_fail(path, "cons: premise post does not imply the conclusion post");
      return;
    }
    case SILRule::Seq: {
      expect_children(2);
      const auto* s = std::get_if<Seq>(&t.cmd->node);
      if (!s) il_fail(path, "seq rule on a non-sequence command");
      check_child(0);
      check_child(1);
      child_cmd_equals(0, *s->first);
      child_cmd_equals(1, *s->second);
      if (!(extension(child(0).triple.pre, u) == pre)) il_fail(path, "seq: left child pre mismatch");
      if (!(extension(child(0).triple.post, u) == extension(child(1).triple.pre, u)))
        il_fail(path, "seq: middle assertions mismatch");
      if (!(extension(child(1).triple.post, u) == post)) il_fail(path, "seq: right child post mismatch");
      return;
    }
    case SILRule::ChoiceL:
    case SILRule::ChoiceR: {
      expect_children(1);
      const auto* c = std::get_if<Choice>(&t.cmd->node);
      if (!c) il_fail(path, "choice rule on a non-choice command");
      check_child(0);
      child_cmd_equals(0, d.rule == SILRule::ChoiceL ? *c->left : *c->right);
      if (!(extension(child(0).triple.pre, u) == pre)) il_fail(path, "choice: child pre mismatch");
      if (!(extension(child(0).triple.post, u) == post)) il_fail(path, "choice: child post mismatch");
      return;
    }
    case SILRule::Iter0: {
      expect_children(0);
      if (!std::holds_alternative<Star>(t.cmd->node)) il_fail(path, "iter0 on a non-star command");
      if (!(post == pre)) il_fail(path, "iter0 requires post semantically equal to pre");
      return;
    }
    case SILRule::Unroll: {
      expect_children(1);
      const auto* st = std::get_if<Star>(&t.cmd->node);
      if (!st) il_fail(path, "unroll on a non-star command");
      check_child(0);
      RCmdPtr expected = seq(t.cmd, st->body);
      child_cmd_equals(0, *expected);
      if (!(extension(child(0).triple.pre, u) == pre)) il_fail(path, "unroll: child pre mismatch");
      if (!(extension(child(0).triple.post, u) == post)) il_fail(path, "unroll: child post mismatch");
      return;
    }
  }
}

}  // namespace detail

/// Checks every node against its rule's side conditions; returns the root
/// triple or throws CheckError with the offending node path.
inline SILTriple check_sil_derivation(const SILDerivation& d, const Universe& u) {
  std::vector<int> path;
  detail::check_sil_node(d, u, path);
  return d.triple;
}

// ---------------------------------------------------------------------------
// Backward synthesis engine

namespace detail {

class BackwardSynth {
public:
  BackwardSynth(const Heuristics& h, const Universe& u) : h_(h), u_(u), rng_(h.seed), disjuncts_(1) {}

  SILDerivPtr synth(const RCmdPtr& r, const StateSet& T) {
    if (T.empty()) return sil_node(SILRule::Empty, {canonical(T, u_), r, canonical(T, u_)});
    if (const auto* a = std::get_if<Atom>(&r->node)) return synth_atom(r, a->cmd, T);
    if (const auto* s = std::get_if<Seq>(&r->node)) {
      SILDerivPtr d2 = synth(s->second, T);
      SILDerivPtr d1 = synth(s->first, extension(d2->triple.pre, u_));
      return sil_node(SILRule::Seq, {d1->triple.pre, r, canonical(T, u_)}, {d1, d2});
    }
    if (const auto* c = std::get_if<Choice>(&r->node)) {
      BranchPolicy pol = h_.branch_policy;
      if (pol == BranchPolicy::Random) pol = (rng_() & 1) ? BranchPolicy::Left : BranchPolicy::Right;
      if (pol == BranchPolicy::Both && disjuncts_ >= h_.max_disjuncts)
        pol = prefer_branch(*c, T);
      if (pol == BranchPolicy::Both) {
        ++disjuncts_;
        SILDerivPtr dl = synth(c->left, T);
        SILDerivPtr dr = synth(c->right, T);
        SILDerivPtr nl = sil_node(SILRule::ChoiceL, {dl->triple.pre, r, canonical(T, u_)}, {dl});
        SILDerivPtr nr = sil_node(SILRule::ChoiceR, {dr->triple.pre, r, canonical(T, u_)}, {dr});
        StateSet pre = set_union(extension(dl->triple.pre, u_), extension(dr->triple.pre, u_));
        return sil_node(SILRule::Disj, {canonical(pre, u_), r, canonical(T, u_)}, {nl, nr});
      }
      if (pol == BranchPolicy::Left) {
        SILDerivPtr dl = synth(c->left, T);
        return sil_node(SILRule::ChoiceL, {dl->triple.pre, r, canonical(T, u_)}, {dl});
      }
      SILDerivPtr dr = synth(c->right, T);
      return sil_node(SILRule::ChoiceR, {dr->triple.pre, r, canonical(T, u_)}, {dr});
    }
    return synth_star(r, std::get<Star>(r->node), T, h_.max_unroll);
  }

private:
  SILDerivPtr synth_atom(const RCmdPtr& r, const ACmd& c, const StateSet& T) {
    StateSet ok = ok_part(T, u_);
    StateSet er = er_part(T, u_);
    if (!ok.empty() && !er.empty()) {
      SILDerivPtr dok = synth_atom(r, c, ok);
      SILDerivPtr der = synth_atom(r, c, er);
      StateSet pre = set_union(extension(dok->triple.pre, u_), extension(der->triple.pre, u_));
      return sil_node(SILRule::Disj, {canonical(pre, u_), r, canonical(T, u_)}, {dok, der});
    }
    if (!er.empty()) {
      if (std::holds_alternative<Error>(c.node)) {
        // <ok: R> error() <er: R>
        StateSet pre = set_intersect(atomic_preimage_set(c, er, u_), StateSet::all_with_flag(u_, Flag::Ok));
        return sil_node(SILRule::Error, {canonical(pre, u_), r, canonical(er, u_)});
      }
      return sil_node(SILRule::ErId, {canonical(er, u_), r, canonical(er, u_)});
    }
    if (std::holds_alternative<Error>(c.node)) {
      // no ok state steps to an ok post: weaken the empty axiom
      SILDerivPtr bot = sil_node(SILRule::Empty, {canonical(StateSet(u_), u_), r, canonical(StateSet(u_), u_)});
      return sil_node(SILRule::Cons, {canonical(StateSet(u_), u_), r, canonical(ok, u_)}, {bot});
    }
    SILRule rule = std::holds_alternative<Skip>(c.node)     ? SILRule::Skip
                   : std::holds_alternative<Assign>(c.node) ? SILRule::Assign
                   : std::holds_alternative<Assume>(c.node) ? SILRule::Assume
                                                            : SILRule::Nondet;
    StateSet pre = set_intersect(atomic_preimage_set(c, ok, u_), StateSet::all_with_flag(u_, Flag::Ok));
    return sil_node(rule, {canonical(pre, u_), r, canonical(ok, u_)});
  }

  SILDerivPtr synth_star(const RCmdPtr& r, const Star& st, const StateSet& T, int depth) {
    if (depth > 0) {
      SILDerivPtr body = synth(st.body, T);
      StateSet R = extension(body->triple.pre, u_);
      if (!R.empty() && !(R == T)) {
        SILDerivPtr inner = synth_star(r, st, R, depth - 1);
        SILDerivPtr chained = sil_node(SILRule::Seq, {inner->triple.pre, seq(r, st.body), canonical(T, u_)},
                                       {inner, body});
        return sil_node(SILRule::Unroll, {inner->triple.pre, r, canonical(T, u_)}, {chained});
      }
    }
    return sil_node(SILRule::Iter0, {canonical(T, u_), r, canonical(T, u_)});
  }

  /// Drop policy mirror: keep the branch whose preimage is larger; prefer a
  /// branch whose preimage reaches er posts (contains er states).
  BranchPolicy prefer_branch(const Choice& c, const StateSet& T) {
    StateSet lp = bwsem(*c.left, T, u_);
    StateSet rp = bwsem(*c.right, T, u_);
    bool ler = !er_part(lp, u_).empty();
    bool rer = !er_part(rp, u_).empty();
    if (ler != rer) return ler ? BranchPolicy::Left : BranchPolicy::Right;
    return lp.count() >= rp.count() ? BranchPolicy::Left : BranchPolicy::Right;
  }

  const Heuristics& h_;
  const Universe& u_;
  std::mt19937_64 rng_;
  int disjuncts_;
};

}  // namespace detail

/// Builds a checkable derivation rooted at <P> r <Q> for some P, applying the
/// backward transformers right-to-left with the configured heuristics.
inline SILDerivPtr synthesize_backward(const RCmdPtr& r, const AssertPtr& Q, const Heuristics& h,
                                       const Universe& u) {
  detail::BackwardSynth bs(h, u);
  SILDerivPtr d = bs.synth(r, extension(Q, u));
  // present the caller's post verbatim at the root (semantically unchanged)
  return sil_node(d->rule, {d->triple.pre, d->triple.cmd, Q}, d->children);
}

}  // namespace uturn

#endif
