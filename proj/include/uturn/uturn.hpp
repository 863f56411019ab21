#ifndef UTURN_UTURN_HPP
#define UTURN_UTURN_HPP

// The U-Turn layer: judgments pairing an IL derivation with a SIL triple,
// the replay proof system and its checker, the UTurn algorithm (backward
// replay of a forward proof) and the dual TurnU algorithm (forward replay of
// a backward proof).
//
// A judgment (d : <P> r <Q>, <P'> r <Q'>) is valid iff
//   (1) <P'> r <Q'> is SIL-valid, (2) P' => P, (3) Q' => Q,
//   (4) P' and Q' are both empty or both nonempty.

#include <cstdint>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "uturn/assertions.hpp"
#include "uturn/errors.hpp"
#include "uturn/il.hpp"
#include "uturn/lang.hpp"
#include "uturn/semantics.hpp"
#include "uturn/sil.hpp"
#include "uturn/state.hpp"

namespace uturn {

// ---------------------------------------------------------------------------
// Judgments

struct UTurnJudgment {
  ILDerivPtr il;       // derives <P> r <Q>
  AssertPtr sil_pre;   // P'
  RCmdPtr cmd;         // r (equals il root cmd)
  AssertPtr sil_post;  // Q'
};

/// Returns 0 if the judgment is valid, else the number (1-4) of the first
/// violated condition.
inline int judgment_violation(const UTurnJudgment& j, const Universe& u) {
  StateSet pp = extension(j.sil_pre, u);
  StateSet qp = extension(j.sil_post, u);
  if (!pp.subset_of(bwsem(*j.cmd, qp, u))) return 1;
  if (!pp.subset_of(extension(j.il->triple.pre, u))) return 2;
  if (!qp.subset_of(extension(j.il->triple.post, u))) return 3;
  if (pp.empty() != qp.empty()) return 4;
  return 0;
}

inline bool check_judgment_validity(const UTurnJudgment& j, const Universe& u) {
  return judgment_violation(j, u) == 0;
}

// ---------------------------------------------------------------------------
// Replay trees

enum class URule {
  Assign,
  Nondet,
  Assume,
  Skip,
  Error,
  ErId,
  Empty,
  Disj,
  Seq,
  ChoiceL,
  ChoiceR,
  Iter0,
  Unroll,
  ConsIL,
  ConsSIL,
};

inline const char* to_string(URule r) {
  switch (r) {
    case URule::Assign: return "UAssign";
    case URule::Nondet: return "UNondet";
    case URule::Assume: return "UAssume";
    case URule::Skip: return "USkip";
    case URule::Error: return "UError";
    case URule::ErId: return "UErId";
    case URule::Empty: return "UEmpty";
    case URule::Disj: return "UDisj";
    case URule::Seq: return "USeq";
    case URule::ChoiceL: return "UChoiceL";
    case URule::ChoiceR: return "UChoiceR";
    case URule::Iter0: return "UIter0";
    case URule::Unroll: return "UUnroll";
    case URule::ConsIL: return "UConsIL";
    default: return "UConsSIL";
  }
}

struct UTurnNode;
using UNodePtr = std::shared_ptr<const UTurnNode>;

struct UTurnNode {
  URule rule;
  std::vector<int> il_path;  // path of child indices to the replayed IL node
  AssertPtr sil_pre;         // P'
  AssertPtr sil_post;        // Q'
  std::vector<UNodePtr> children;
};

inline UNodePtr u_node(URule rule, std::vector<int> il_path, AssertPtr pre, AssertPtr post,
                       std::vector<UNodePtr> children = {}) {
  return std::make_shared<UTurnNode>(
      UTurnNode{rule, std::move(il_path), std::move(pre), std::move(post), std::move(children)});
}

struct UTurnDerivation {
  ILDerivPtr il;
  UNodePtr root;
};

/// Resolves a child-index path into the IL tree.
inline const ILDerivation* resolve_il(const ILDerivation& root, const std::vector<int>& path) {
  const ILDerivation* d = &root;
  for (int i : path) {
    if (i < 0 || static_cast<std::size_t>(i) >= d->children.size()) return nullptr;
    d = d->children[static_cast<std::size_t>(i)].get();
  }
  return d;
}

// ---------------------------------------------------------------------------
// Semantic helpers shared by the checker and the algorithms

namespace detail {

/// Extension of Q[a/x]: states whose a-update lands in Q.
inline StateSet subst_ext(const StateSet& q, const AExpPtr& a, const VarName& x, const Universe& u) {
  std::size_t xi = u.var_index(x);
  StateSet out(u);
  for (std::uint64_t i = 0; i < u.state_count(); ++i) {
    FlaggedState s = state_at(i, u);
    s.store[xi] = eval_aexp(*a, s.store, u);
    if (q.contains(s, u)) out.set(i);
  }
  return out;
}

/// Extension of exists x. Q.
inline StateSet exists_ext(const StateSet& q, const VarName& x, const Universe& u) {
  std::size_t xi = u.var_index(x);
  StateSet out(u);
  for (std::uint64_t i = 0; i < u.state_count(); ++i) {
    FlaggedState s = state_at(i, u);
    for (Value v = u.lo(); v <= u.hi(); ++v) {
      s.store[xi] = v;
      if (q.contains(s, u)) {
        out.set(i);
        break;
      }
    }
  }
  return out;
}

/// The same stores with the flag replaced.
inline StateSet retag_ext(const StateSet& q, Flag f, const Universe& u) {
  StateSet out(u);
  q.for_each([&](std::uint64_t i) { out.insert(FlaggedState{f, state_at(i, u).store}, u); });
  return out;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Replay-tree checker

namespace detail {

struct UCheckCtx {
  const ILDerivation* il_root;
  const Universe* u;
};

inline void check_u_node(const UTurnNode& n, const UCheckCtx& ctx, std::vector<int>& upath) {
  const Universe& u = *ctx.u;
  const ILDerivation* e = resolve_il(*ctx.il_root, n.il_path);
  if (!e) il_fail(upath, "il_ref path does not resolve in the IL derivation");
  StateSet P = extension(e->triple.pre, u);
  StateSet Q = extension(e->triple.post, u);
  StateSet Pp = extension(n.sil_pre, u);
  StateSet Qp = extension(n.sil_post, u);

  auto expect_children = [&](std::size_t k) {
    if (n.children.size() != k)
      il_fail(upath, std::string(to_string(n.rule)) + " expects " + std::to_string(k) +
                         " children, has " + std::to_string(n.children.size()));
  };
  auto expect_il_rule = [&](ILRule r) {
    if (e->rule != r)
      il_fail(upath, std::string(to_string(n.rule)) + " must replay an " + to_string(r) +
                         " node, found " + to_string(e->rule));
  };
  auto check_child = [&](std::size_t i) {
    upath.push_back(static_cast<int>(i));
    check_u_node(*n.children[i], ctx, upath);
    upath.pop_back();
  };
  auto expect_child_path = [&](std::size_t i, std::vector<int> want) {
    if (n.children[i]->il_path != want) il_fail(upath, "child il_ref does not extend the parent's path");
  };
  auto extended = [&](int i) {
    std::vector<int> p = n.il_path;
    p.push_back(i);
    return p;
  };
  const Atom* atom_cmd = as_atom(*e->triple.cmd);

  switch (n.rule) {
    case URule::Assign: {
      expect_children(0);
      expect_il_rule(ILRule::Assign);
      const auto& a = std::get<Assign>(atom_cmd->cmd.node);
      if (!Qp.subset_of(atomic_step_set(atom_cmd->cmd, P, u)))
        il_fail(upath, "UAssign: Q' is not below the strongest post of P");
      if (!(Pp == set_intersect(P, subst_ext(Qp, a.expr, a.target, u))))
        il_fail(upath, "UAssign: P' must equal P and Q'[a/x]");
      return;
    }
    case URule::Nondet: {
      expect_children(0);
      expect_il_rule(ILRule::Nondet);
      const auto& nd = std::get<Nondet>(atom_cmd->cmd.node);
      if (!Qp.subset_of(exists_ext(P, nd.target, u)))
        il_fail(upath, "UNondet: Q' is not below exists x. P");
      if (!(Pp == set_intersect(P, exists_ext(Qp, nd.target, u))))
        il_fail(upath, "UNondet: P' must equal P and exists x. Q'");
      return;
    }
    case URule::Assume: {
      expect_children(0);
      expect_il_rule(ILRule::Assume);
      if (!Qp.subset_of(atomic_step_set(atom_cmd->cmd, P, u)))
        il_fail(upath, "UAssume: Q' is not below P and b");
      if (!(Pp == Qp)) il_fail(upath, "UAssume: P' must equal Q'");
      return;
    }
    case URule::Skip: {
      expect_children(0);
      expect_il_rule(ILRule::Skip);
      if (!Qp.subset_of(P)) il_fail(upath, "USkip: Q' is not below P");
      if (!(Pp == Qp)) il_fail(upath, "USkip: P' must equal Q'");
      return;
    }
    case URule::Error: {
      expect_children(0);
      expect_il_rule(ILRule::Error);
      if (!Qp.subset_of(retag_ext(P, Flag::Er, u)))
        il_fail(upath, "UError: Q' is not below the er-retagging of P");
      if (!(Pp == retag_ext(Qp, Flag::Ok, u)))
        il_fail(upath, "UError: P' must be the ok-retagging of Q'");
      return;
    }
    case URule::ErId: {
      expect_children(0);
      expect_il_rule(ILRule::ErId);
      if (!Qp.subset_of(P)) il_fail(upath, "UErId: Q' is not below P");
      if (!(Pp == Qp)) il_fail(upath, "UErId: P' must equal Q'");
      return;
    }
    case URule::Empty: {
      expect_children(0);
      if (!Pp.empty() || !Qp.empty()) il_fail(upath, "UEmpty requires both assertions empty");
      return;
    }
    case URule::Disj: {
      expect_children(2);
      expect_il_rule(ILRule::Disj);
      expect_child_path(0, extended(0));
      expect_child_path(1, extended(1));
      check_child(0);
      check_child(1);
      StateSet q0 = extension(n.children[0]->sil_post, u);
      StateSet q1 = extension(n.children[1]->sil_post, u);
      if (!(Qp == set_union(q0, q1))) il_fail(upath, "UDisj: Q' must be the union of the child posts");
      StateSet p0 = extension(n.children[0]->sil_pre, u);
      StateSet p1 = extension(n.children[1]->sil_pre, u);
      if (!(Pp == set_union(p0, p1))) il_fail(upath, "UDisj: P' must be the union of the child pres");
      return;
    }
    case URule::Seq: {
      expect_children(2);
      expect_il_rule(ILRule::Seq);
      expect_child_path(0, extended(0));
      expect_child_path(1, extended(1));
      check_child(0);
      check_child(1);
      if (!(extension(n.children[1]->sil_post, u) == Qp)) il_fail(upath, "USeq: right child post mismatch");
      if (!(extension(n.children[0]->sil_post, u) == extension(n.children[1]->sil_pre, u)))
        il_fail(upath, "USeq: threaded middle assertion mismatch");
      if (!(extension(n.children[0]->sil_pre, u) == Pp)) il_fail(upath, "USeq: left child pre mismatch");
      return;
    }
    case URule::ChoiceL:
    case URule::ChoiceR: {
      expect_children(1);
      expect_il_rule(n.rule == URule::ChoiceL ? ILRule::ChoiceL : ILRule::ChoiceR);
      expect_child_path(0, extended(0));
      check_child(0);
      if (!(extension(n.children[0]->sil_post, u) == Qp)) il_fail(upath, "choice replay: post mismatch");
      if (!(extension(n.children[0]->sil_pre, u) == Pp)) il_fail(upath, "choice replay: pre mismatch");
      return;
    }
    case URule::Iter0: {
      expect_children(0);
      expect_il_rule(ILRule::Iter0);
      if (!Qp.subset_of(P)) il_fail(upath, "UIter0: Q' is not below P");
      if (!(Pp == Qp)) il_fail(upath, "UIter0: P' must equal Q'");
      return;
    }
    case URule::Unroll: {
      expect_children(1);
      expect_il_rule(ILRule::Unroll);
      expect_child_path(0, extended(0));
      check_child(0);
      if (!(extension(n.children[0]->sil_post, u) == Qp)) il_fail(upath, "UUnroll: post mismatch");
      if (!(extension(n.children[0]->sil_pre, u) == Pp)) il_fail(upath, "UUnroll: pre mismatch");
      return;
    }
    case URule::ConsIL: {
      // skips an IL consequence node: the premise replays its child
      expect_children(1);
      expect_il_rule(ILRule::Cons);
      expect_child_path(0, extended(0));
      check_child(0);
      if (!Qp.subset_of(Q)) il_fail(upath, "UConsIL: Q' is not below the conclusion post");
      if (!(extension(n.children[0]->sil_post, u) == Qp)) il_fail(upath, "UConsIL: post mismatch");
      if (!(extension(n.children[0]->sil_pre, u) == Pp)) il_fail(upath, "UConsIL: pre mismatch");
      return;
    }
    case URule::ConsSIL: {
      // SIL consequence on the replayed triple; same IL node as the premise
      expect_children(1);
      expect_child_path(0, n.il_path);
      check_child(0);
      if (Pp.empty()) il_fail(upath, "UConsSIL: P' must not be false");
      if (!Pp.subset_of(extension(n.children[0]->sil_pre, u)))
        il_fail(upath, "UConsSIL: P' is not below the premise pre");
      if (!extension(n.children[0]->sil_post, u).subset_of(Qp))
        il_fail(upath, "UConsSIL: premise post is not below Q'");
      if (!Qp.subset_of(Q)) il_fail(upath, "UConsSIL: Q' is not below the IL post");
      return;
    }
  }
}

}  // namespace detail

/// Checks the IL derivation and then the replay tree against the full rule
/// system; returns the root judgment or throws CheckError.
inline UTurnJudgment check_uturn_derivation(const UTurnDerivation& ud, const Universe& u) {
  check_il_derivation(*ud.il, u);
  if (!ud.root->il_path.empty())
    throw CheckError({}, "replay root must reference the IL root");
  std::vector<int> upath;
  detail::check_u_node(*ud.root, detail::UCheckCtx{ud.il.get(), &u}, upath);
  return UTurnJudgment{ud.il, ud.root->sil_pre, ud.il->triple.cmd, ud.root->sil_post};
}

// ---------------------------------------------------------------------------
// The UTurn algorithm: backward replay of a forward (IL) derivation

namespace detail {

class UTurnRunner {
public:
  explicit UTurnRunner(const Universe& u) : u_(u) {}

  /// Replays node e backward from the nonempty Q' <= post(e); returns the
  /// computed P' and the replay node.
  std::pair<StateSet, UNodePtr> go(const ILDerivation& e, const StateSet& Qp, std::vector<int>& path) {
    const StateSet P = extension(e.triple.pre, u_);
    auto leaf = [&](URule r, StateSet Pp) {
      UNodePtr n = u_node(r, path, canonical(Pp, u_), canonical(Qp, u_));
      return std::pair<StateSet, UNodePtr>{std::move(Pp), std::move(n)};
    };
    switch (e.rule) {
      case ILRule::Assign: {
        const auto& a = std::get<Assign>(as_atom(*e.triple.cmd)->cmd.node);
        return leaf(URule::Assign, set_intersect(P, subst_ext(Qp, a.expr, a.target, u_)));
      }
      case ILRule::Nondet: {
        const auto& nd = std::get<Nondet>(as_atom(*e.triple.cmd)->cmd.node);
        return leaf(URule::Nondet, set_intersect(P, exists_ext(Qp, nd.target, u_)));
      }
      case ILRule::Assume:
        return leaf(URule::Assume, Qp);
      case ILRule::Skip:
        return leaf(URule::Skip, Qp);
      case ILRule::Error:
        return leaf(URule::Error, retag_ext(Qp, Flag::Ok, u_));
      case ILRule::ErId:
        return leaf(URule::ErId, Qp);
      case ILRule::Iter0:
        return leaf(URule::Iter0, Qp);
      case ILRule::Seq: {
        // right subtree first, threading its pre into the left subtree
        path.push_back(1);
        auto [Rp, n2] = go(*e.children[1], Qp, path);
        path.pop_back();
        if (Rp.empty())
          throw PreconditionError("replay reached an empty intermediate assertion; "
                                  "the input derivation violates progress");
        path.push_back(0);
        auto [Pp, n1] = go(*e.children[0], Rp, path);
        path.pop_back();
        UNodePtr n = u_node(URule::Seq, path, canonical(Pp, u_), canonical(Qp, u_), {n1, n2});
        return {std::move(Pp), std::move(n)};
      }
      case ILRule::ChoiceL:
      case ILRule::ChoiceR:
      case ILRule::Unroll:
      case ILRule::Cons: {
        URule r = e.rule == ILRule::ChoiceL   ? URule::ChoiceL
                  : e.rule == ILRule::ChoiceR ? URule::ChoiceR
                  : e.rule == ILRule::Unroll  ? URule::Unroll
                                              : URule::ConsIL;
        path.push_back(0);
        auto [Pp, child] = go(*e.children[0], Qp, path);
        path.pop_back();
        UNodePtr n = u_node(r, path, canonical(Pp, u_), canonical(Qp, u_), {child});
        return {std::move(Pp), std::move(n)};
      }
      case ILRule::Disj: {
        StateSet q0 = set_intersect(Qp, extension(e.children[0]->triple.post, u_));
        StateSet q1 = set_intersect(Qp, extension(e.children[1]->triple.post, u_));
        auto part = [&](int i, const StateSet& qi) -> std::pair<StateSet, UNodePtr> {
          path.push_back(i);
          if (qi.empty()) {
            // an empty split part contributes false via the empty axiom
            UNodePtr n = u_node(URule::Empty, path, canonical(StateSet(u_), u_),
                                canonical(StateSet(u_), u_));
            path.pop_back();
            return {StateSet(u_), std::move(n)};
          }
          auto res = go(*e.children[static_cast<std::size_t>(i)], qi, path);
          path.pop_back();
          return res;
        };
        auto [p0, n0] = part(0, q0);
        auto [p1, n1] = part(1, q1);
        StateSet Pp = set_union(p0, p1);
        UNodePtr n = u_node(URule::Disj, path, canonical(Pp, u_), canonical(Qp, u_), {n0, n1});
        return {std::move(Pp), std::move(n)};
      }
      default:  // ILRule::Empty: post is empty, unreachable under the invariant
        throw PreconditionError("replay reached an empty-axiom node with a nonempty target");
    }
  }

private:
  const Universe& u_;
};

}  // namespace detail

/// Runs the backward replay: given an IL derivation of <P> r <Q> and a
/// nonempty Q' => Q, computes P' with <P'> r <Q'> SIL- and IL-valid, plus the
/// replay tree. Never emits UConsSIL.
inline std::pair<AssertPtr, UTurnDerivation> run_uturn(const ILDerivPtr& d, const AssertPtr& Qp,
                                                       const Universe& u) {
  StateSet target = extension(Qp, u);
  if (target.empty()) throw PreconditionError("UTurn requires a nonempty target post (false != Q')");
  if (!target.subset_of(extension(d->triple.post, u)))
    throw PreconditionError("UTurn requires Q' => Q (target must refine the derived post)");
  detail::UTurnRunner runner(u);
  std::vector<int> path;
  auto [Pp, root] = runner.go(*d, target, path);
  // present the caller's target verbatim at the root (semantically unchanged)
  UNodePtr pretty = u_node(root->rule, root->il_path, root->sil_pre, Qp, root->children);
  return {canonical(Pp, u), UTurnDerivation{d, pretty}};
}

// ---------------------------------------------------------------------------
// The TurnU algorithm: forward replay of a backward (SIL) derivation

enum class TRule {
  Assign,
  Nondet,
  Assume,
  Skip,
  Error,
  ErId,
  Empty,
  Disj,
  Seq,
  ChoiceL,
  ChoiceR,
  Iter0,
  Unroll,
  ConsSIL,
};

inline const char* to_string(TRule r) {
  switch (r) {
    case TRule::Assign: return "TAssign";
    case TRule::Nondet: return "TNondet";
    case TRule::Assume: return "TAssume";
    case TRule::Skip: return "TSkip";
    case TRule::Error: return "TError";
    case TRule::ErId: return "TErId";
    case TRule::Empty: return "TEmpty";
    case TRule::Disj: return "TDisj";
    case TRule::Seq: return "TSeq";
    case TRule::ChoiceL: return "TChoiceL";
    case TRule::ChoiceR: return "TChoiceR";
    case TRule::Iter0: return "TIter0";
    case TRule::Unroll: return "TUnroll";
    default: return "TConsSIL";
  }
}

struct TurnUNode;
using TNodePtr = std::shared_ptr<const TurnUNode>;

struct TurnUNode {
  TRule rule;
  std::vector<int> sil_path;  // path to the replayed SIL node
  AssertPtr il_pre;           // P'
  AssertPtr il_post;          // Q'
  std::vector<TNodePtr> children;
};

inline TNodePtr t_node(TRule rule, std::vector<int> sil_path, AssertPtr pre, AssertPtr post,
                       std::vector<TNodePtr> children = {}) {
  return std::make_shared<TurnUNode>(
      TurnUNode{rule, std::move(sil_path), std::move(pre), std::move(post), std::move(children)});
}

struct TurnUDerivation {
  SILDerivPtr sil;
  TNodePtr root;
};

namespace detail {

class TurnURunner {
public:
  explicit TurnURunner(const Universe& u) : u_(u) {}

  /// Replays SIL node e forward from the nonempty P' <= pre(e); returns the
  /// computed Q' and the replay node.
  std::pair<StateSet, TNodePtr> go(const SILDerivation& e, const StateSet& Pp, std::vector<int>& path) {
    const StateSet Q = extension(e.triple.post, u_);
    auto leaf = [&](TRule r, StateSet Qp) {
      TNodePtr n = t_node(r, path, canonical(Pp, u_), canonical(Qp, u_));
      return std::pair<StateSet, TNodePtr>{std::move(Qp), std::move(n)};
    };
    switch (e.rule) {
      case SILRule::Assign: {
        const auto& a = as_atom(*e.triple.cmd)->cmd;
        return leaf(TRule::Assign, set_intersect(Q, atomic_step_set(a, Pp, u_)));
      }
      case SILRule::Nondet: {
        const auto& nd = std::get<Nondet>(as_atom(*e.triple.cmd)->cmd.node);
        return leaf(TRule::Nondet, set_intersect(Q, exists_ext(Pp, nd.target, u_)));
      }
      case SILRule::Assume:
        return leaf(TRule::Assume, Pp);
      case SILRule::Skip:
        return leaf(TRule::Skip, Pp);
      case SILRule::Error:
        return leaf(TRule::Error, retag_ext(Pp, Flag::Er, u_));
      case SILRule::ErId:
        return leaf(TRule::ErId, Pp);
      case SILRule::Iter0:
        return leaf(TRule::Iter0, Pp);
      case SILRule::Seq: {
        // left subtree first, threading its post into the right subtree
        path.push_back(0);
        auto [Rp, n1] = go(*e.children[0], Pp, path);
        path.pop_back();
        if (Rp.empty())
          throw PreconditionError("replay reached an empty intermediate assertion; "
                                  "the input derivation violates progress");
        path.push_back(1);
        auto [Qp, n2] = go(*e.children[1], Rp, path);
        path.pop_back();
        TNodePtr n = t_node(TRule::Seq, path, canonical(Pp, u_), canonical(Qp, u_), {n1, n2});
        return {std::move(Qp), std::move(n)};
      }
      case SILRule::ChoiceL:
      case SILRule::ChoiceR:
      case SILRule::Unroll:
      case SILRule::Cons: {
        TRule r = e.rule == SILRule::ChoiceL   ? TRule::ChoiceL
                  : e.rule == SILRule::ChoiceR ? TRule::ChoiceR
                  : e.rule == SILRule::Unroll  ? TRule::Unroll
                                               : TRule::ConsSIL;
        path.push_back(0);
        auto [Qp, child] = go(*e.children[0], Pp, path);
        path.pop_back();
        TNodePtr n = t_node(r, path, canonical(Pp, u_), canonical(Qp, u_), {child});
        return {std::move(Qp), std::move(n)};
      }
      case SILRule::Disj: {
        StateSet p0 = set_intersect(Pp, extension(e.children[0]->triple.pre, u_));
        StateSet p1 = set_intersect(Pp, extension(e.children[1]->triple.pre, u_));
        auto part = [&](int i, const StateSet& pi) -> std::pair<StateSet, TNodePtr> {
          path.push_back(i);
          if (pi.empty()) {
            TNodePtr n = t_node(TRule::Empty, path, canonical(StateSet(u_), u_),
                                canonical(StateSet(u_), u_));
            path.pop_back();
            return {StateSet(u_), std::move(n)};
          }
          auto res = go(*e.children[static_cast<std::size_t>(i)], pi, path);
          path.pop_back();
          return res;
        };
        auto [q0, n0] = part(0, p0);
        auto [q1, n1] = part(1, p1);
        StateSet Qp = set_union(q0, q1);
        TNodePtr n = t_node(TRule::Disj, path, canonical(Pp, u_), canonical(Qp, u_), {n0, n1});
        return {std::move(Qp), std::move(n)};
      }
      default:  // SILRule::Empty: pre is empty, unreachable under the invariant
        throw PreconditionError("replay reached an empty-axiom node with a nonempty source");
    }
  }

private:
  const Universe& u_;
};

}  // namespace detail

/// Runs the forward replay: given a SIL derivation of <P> r <Q> and a
/// nonempty P' => P, computes Q' with <P'> r <Q'> SIL- and IL-valid, plus the
/// replay tree.
inline std::pair<AssertPtr, TurnUDerivation> run_turnu(const SILDerivPtr& d, const AssertPtr& Pp,
                                                       const Universe& u) {
  StateSet source = extension(Pp, u);
  if (source.empty()) throw PreconditionError("TurnU requires a nonempty source pre (false != P')");
  if (!source.subset_of(extension(d->triple.pre, u)))
    throw PreconditionError("TurnU requires P' => P (source must refine the derived pre)");
  detail::TurnURunner runner(u);
  std::vector<int> path;
  auto [Qp, root] = runner.go(*d, source, path);
  TNodePtr pretty = t_node(root->rule, root->sil_path, Pp, root->il_post, root->children);
  return {canonical(Qp, u), TurnUDerivation{d, pretty}};
}

}  // namespace uturn

#endif
