#ifndef UTURN_IL_HPP
#define UTURN_IL_HPP

// Incorrectness Logic: triples, derivation trees, a rule-by-rule checker,
// oracle validity, and the forward synthesis engine with under-approximation
// heuristics (loop unrolling, branch selection, disjunct capping).
//
// A triple <P> r <Q> is IL-valid iff every state of Q is reachable from P:
// fwsem(r, ext(P)) >= ext(Q). All rule side conditions are checked
// semantically (extension containment/equality over the universe).

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "uturn/assertions.hpp"
#include "uturn/errors.hpp"
#include "uturn/lang.hpp"
#include "uturn/semantics.hpp"
#include "uturn/state.hpp"

namespace uturn {

struct ILTriple {
  AssertPtr pre;
  RCmdPtr cmd;
  AssertPtr post;
};

/// true iff ext(post) is a subset of fwsem(cmd, ext(pre)).
inline bool il_valid(const ILTriple& t, const Universe& u) {
  return extension(t.post, u).subset_of(fwsem(*t.cmd, extension(t.pre, u), u));
}

enum class ILRule {
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

inline const char* to_string(ILRule r) {
  switch (r) {
    case ILRule::Assign: return "ILAssign";
    case ILRule::Assume: return "ILAssume";
    case ILRule::Nondet: return "ILNondet";
    case ILRule::Skip: return "ILSkip";
    case ILRule::Error: return "ILError";
    case ILRule::ErId: return "ILErId";
    case ILRule::Disj: return "ILDisj";
    case ILRule::Cons: return "ILCons";
    case ILRule::Seq: return "ILSeq";
    case ILRule::ChoiceL: return "ILChoiceL";
    case ILRule::ChoiceR: return "ILChoiceR";
    case ILRule::Iter0: return "ILIter0";
    case ILRule::Unroll: return "ILUnroll";
    default: return "ILEmpty";
  }
}

struct ILDerivation;
using ILDerivPtr = std::shared_ptr<const ILDerivation>;

struct ILDerivation {
  ILRule rule;
  ILTriple triple;
  std::vector<ILDerivPtr> children;
};

inline ILDerivPtr il_node(ILRule rule, ILTriple t, std::vector<ILDerivPtr> children = {}) {
  return std::make_shared<ILDerivation>(ILDerivation{rule, std::move(t), std::move(children)});
}

// ---------------------------------------------------------------------------
// Derivation checker

namespace detail {

[[noreturn]] inline void il_fail(const std::vector<int>& path, const std::string& msg) {
  throw CheckError(path, msg);
}

inline const Atom* as_atom(const RCmd& r) { return std::get_if<Atom>(&r.node); }

template <typename AC>
inline bool atom_is(const RCmd& r) {
  const Atom* a = as_atom(r);
  return a && std::holds_alternative<AC>(a->cmd.node);
}

inline void check_il_node(const ILDerivation& d, const Universe& u, std::vector<int>& path) {
  const ILTriple& t = d.triple;
  StateSet pre = extension(t.pre, u);
  StateSet post = extension(t.post, u);
  StateSet ok_states = StateSet::all_with_flag(u, Flag::Ok);

  auto expect_children = [&](std::size_t n) {
    if (d.children.size() != n)
      il_fail(path, std::string(to_string(d.rule)) + " expects " + std::to_string(n) +
                        " children, has " + std::to_string(d.children.size()));
  };
  auto child = [&](std::size_t i) -> const ILDerivation& { return *d.children[i]; };
  auto check_child = [&](std::size_t i) {
    path.push_back(static_cast<int>(i));
    check_il_node(child(i), u, path);
    path.pop_back();
  };
  auto child_cmd_equals = [&](std::size_t i, const RCmd& r) {
    if (!equal(*child(i).triple.cmd, r)) il_fail(path, "child command does not match the rule shape");
  };

  switch (d.rule) {
    case ILRule::Assign:
    case ILRule::Assume:
    case ILRule::Nondet:
    case ILRule::Skip:
    case ILRule::Error: {
      expect_children(0);
      const Atom* a = as_atom(*t.cmd);
      bool kind_ok = a && ((d.rule == ILRule::Assign && std::holds_alternative<Assign>(a->cmd.node)) ||
                           (d.rule == ILRule::Assume && std::holds_alternative<Assume>(a->cmd.node)) ||
                           (d.rule == ILRule::Nondet && std::holds_alternative<Nondet>(a->cmd.node)) ||
                           (d.rule == ILRule::Skip && std::holds_alternative<Skip>(a->cmd.node)) ||
                           (d.rule == ILRule::Error && std::holds_alternative<Error>(a->cmd.node)));
      if (!kind_ok) il_fail(path, std::string(to_string(d.rule)) + " applied to a non-matching command");
      if (!pre.subset_of(ok_states)) il_fail(path, "atom axiom requires an ok-only precondition");
      if (!(post == atomic_step_set(a->cmd, pre, u)))
        il_fail(path, "atom axiom post is not the strongest postcondition of the pre");
      return;
    }
    case ILRule::ErId: {
      expect_children(0);
      if (!set_intersect(pre, ok_states).empty()) il_fail(path, "er-id requires an er-only precondition");
      if (!(post == pre)) il_fail(path, "er-id requires post semantically equal to pre");
      return;
    }
    case ILRule::Empty: {
      expect_children(0);
      if (!pre.empty() || !post.empty()) il_fail(path, "empty axiom requires both assertions empty");
      return;
    }
    case ILRule::Disj: {
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
    case ILRule::Cons: {
      // conclusion <P> r <Q> from premise <P'> r <Q'> with P' => P
      // (pre may widen) and Q => Q' (post may shrink).
      expect_children(1);
      check_child(0);
      child_cmd_equals(0, *t.cmd);
      if (!extension(child(0).triple.pre, u).subset_of(pre))
        il_fail(path, "cons: premise pre does not imply the conclusion pre");
      if (!post.subset_of(extension(child(0).triple.post, u)))
        il_fail(path, "cons: conclusion post does not imply the premise post");
      return;
    }
    case ILRule::Seq: {
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
    case ILRule::ChoiceL:
    case ILRule::ChoiceR: {
      expect_children(1);
      const auto* c = std::get_if<Choice>(&t.cmd->node);
      if (!c) il_fail(path, "choice rule on a non-choice command");
      check_child(0);
      child_cmd_equals(0, d.rule == ILRule::ChoiceL ? *c->left : *c->right);
      if (!(extension(child(0).triple.pre, u) == pre)) il_fail(path, "choice: child pre mismatch");
      if (!(extension(child(0).triple.post, u) == post)) il_fail(path, "choice: child post mismatch");
      return;
    }
    case ILRule::Iter0: {
      expect_children(0);
      if (!std::holds_alternative<Star>(t.cmd->node)) il_fail(path, "iter0 on a non-star command");
      if (!(post == pre)) il_fail(path, "iter0 requires post semantically equal to pre");
      return;
    }
    case ILRule::Unroll: {
      expect_children(1);
      const auto* st = std::get_if<Star>(&t.cmd->node);
      if (!st) il_fail(path, "unroll on a non-star command");
      check_child(0);
      // premise concludes <P> r*; r <Q>
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
inline ILTriple check_il_derivation(const ILDerivation& d, const Universe& u) {
  std::vector<int> path;
  detail::check_il_node(d, u, path);
  return d.triple;
}

// ---------------------------------------------------------------------------
// Forward synthesis engine

enum class BranchPolicy { Both, Left, Right, Random };

struct Heuristics {
  int max_unroll = 10;
  BranchPolicy branch_policy = BranchPolicy::Both;
  std::uint64_t seed = 0;
  int max_disjuncts = 64;
};

namespace detail {

inline StateSet ok_part(const StateSet& s, const Universe& u) {
  return set_intersect(s, StateSet::all_with_flag(u, Flag::Ok));
}
inline StateSet er_part(const StateSet& s, const Universe& u) {
  return set_intersect(s, StateSet::all_with_flag(u, Flag::Er));
}

class ForwardSynth {
public:
  ForwardSynth(const Heuristics& h, const Universe& u) : h_(h), u_(u), rng_(h.seed), disjuncts_(1) {}

  ILDerivPtr synth(const StateSet& S, const RCmdPtr& r) {
    if (S.empty()) return il_node(ILRule::Empty, {canonical(S, u_), r, canonical(S, u_)});
    StateSet ok = ok_part(S, u_);
    StateSet er = er_part(S, u_);
    if (!ok.empty() && !er.empty()) {
      // mixed flags: split with disj, routing the er part through er-id
      ILDerivPtr dok = synth(ok, r);
      ILDerivPtr der = il_node(ILRule::ErId, {canonical(er, u_), r, canonical(er, u_)});
      StateSet post = set_union(extension(dok->triple.post, u_), er);
      return il_node(ILRule::Disj, {canonical(S, u_), r, canonical(post, u_)}, {dok, der});
    }
    if (!er.empty()) return il_node(ILRule::ErId, {canonical(er, u_), r, canonical(er, u_)});
    return synth_ok(ok, r);
  }

private:
  ILDerivPtr synth_ok(const StateSet& S, const RCmdPtr& r) {
    if (const auto* a = std::get_if<Atom>(&r->node)) {
      StateSet post = atomic_step_set(a->cmd, S, u_);
      ILRule rule = std::holds_alternative<Skip>(a->cmd.node)     ? ILRule::Skip
                    : std::holds_alternative<Assign>(a->cmd.node) ? ILRule::Assign
                    : std::holds_alternative<Assume>(a->cmd.node) ? ILRule::Assume
                    : std::holds_alternative<Nondet>(a->cmd.node) ? ILRule::Nondet
                                                                  : ILRule::Error;
      return il_node(rule, {canonical(S, u_), r, canonical(post, u_)});
    }
    if (const auto* s = std::get_if<Seq>(&r->node)) {
      ILDerivPtr d1 = synth(S, s->first);
      ILDerivPtr d2 = synth(extension(d1->triple.post, u_), s->second);
      return il_node(ILRule::Seq, {canonical(S, u_), r, d2->triple.post}, {d1, d2});
    }
    if (const auto* c = std::get_if<Choice>(&r->node)) {
      BranchPolicy pol = h_.branch_policy;
      if (pol == BranchPolicy::Random) pol = (rng_() & 1) ? BranchPolicy::Left : BranchPolicy::Right;
      if (pol == BranchPolicy::Both && disjuncts_ >= h_.max_disjuncts)
        pol = prefer_branch(S, *c);  // disjunct budget exhausted: keep one branch
      if (pol == BranchPolicy::Both) {
        ++disjuncts_;
        ILDerivPtr dl = synth(S, c->left);
        ILDerivPtr dr = synth(S, c->right);
        ILDerivPtr nl = il_node(ILRule::ChoiceL, {canonical(S, u_), r, dl->triple.post}, {dl});
        ILDerivPtr nr = il_node(ILRule::ChoiceR, {canonical(S, u_), r, dr->triple.post}, {dr});
        StateSet post = set_union(extension(dl->triple.post, u_), extension(dr->triple.post, u_));
        return il_node(ILRule::Disj, {canonical(S, u_), r, canonical(post, u_)}, {nl, nr});
      }
      if (pol == BranchPolicy::Left) {
        ILDerivPtr dl = synth(S, c->left);
        return il_node(ILRule::ChoiceL, {canonical(S, u_), r, dl->triple.post}, {dl});
      }
      ILDerivPtr dr = synth(S, c->right);
      return il_node(ILRule::ChoiceR, {canonical(S, u_), r, dr->triple.post}, {dr});
    }
    const auto& st = std::get<Star>(r->node);
    // unroll chain: iter0 at the bottom, one unroll per executed body pass;
    // stop when the post stabilizes or the next pass yields no states.
    ILDerivPtr d = il_node(ILRule::Iter0, {canonical(S, u_), r, canonical(S, u_)});
    StateSet cur = S;
    for (int k = 0; k < h_.max_unroll; ++k) {
      ILDerivPtr body = synth(cur, st.body);
      StateSet next = extension(body->triple.post, u_);
      if (next.empty() || next == cur) break;
      ILDerivPtr chained = il_node(ILRule::Seq, {canonical(S, u_), seq(r, st.body), body->triple.post},
                                   {d, body});
      d = il_node(ILRule::Unroll, {canonical(S, u_), r, body->triple.post}, {chained});
      cur = next;
    }
    return d;
  }

  /// Drop policy when the disjunct cap is hit: keep the branch whose image
  /// contains er states; tie-break on the larger image.
  BranchPolicy prefer_branch(const StateSet& S, const Choice& c) {
    StateSet li = fwsem(*c.left, S, u_);
    StateSet ri = fwsem(*c.right, S, u_);
    bool ler = !er_part(li, u_).empty();
    bool rer = !er_part(ri, u_).empty();
    if (ler != rer) return ler ? BranchPolicy::Left : BranchPolicy::Right;
    return li.count() >= ri.count() ? BranchPolicy::Left : BranchPolicy::Right;
  }

  const Heuristics& h_;
  const Universe& u_;
  std::mt19937_64 rng_;
  int disjuncts_;
};

}  // namespace detail

/// Builds a checkable derivation rooted at <P> r <Q> for some Q, following
/// the configured unrolling/branching heuristics. Internal assertions are
/// explicit state sets; the root pre keeps the caller's formula.
inline ILDerivPtr synthesize_forward(const AssertPtr& P, const RCmdPtr& r, const Heuristics& h,
                                     const Universe& u) {
  detail::ForwardSynth fs(h, u);
  ILDerivPtr d = fs.synth(extension(P, u), r);
  // present the caller's pre verbatim at the root (semantically unchanged)
  return il_node(d->rule, {P, d->triple.cmd, d->triple.post}, d->children);
}

}  // namespace uturn

#endif
