#ifndef UTURN_AXIOMS_HPP
#define UTURN_AXIOMS_HPP

// The combined forward/backward axiom schema: for any atomic command c and
// ok-tagged P, Q, the triple
//   <P and wp(c, Q)>  c  <Q and sp(c, P)>
// is valid in both IL and SIL; and conversely every both-valid atomic triple
// already satisfies the schema's two absorption equations.

#include <functional>

#include "uturn/assertions.hpp"
#include "uturn/errors.hpp"
#include "uturn/il.hpp"
#include "uturn/lang.hpp"
#include "uturn/semantics.hpp"
#include "uturn/sil.hpp"

namespace uturn {

/// <P and wp(c,Q)> c <Q and sp(c,P)> with the closed forms substituted.
/// P and Q must be ok-tagged.
inline ILTriple combined_axiom(const ACmd& c, const AssertPtr& P, const AssertPtr& Q) {
  return ILTriple{aand(P, wp_atom(c, Q)), atom(c), aand(Q, sp_atom(c, P))};
}

/// Schema instantiated with caller-supplied symbolic transformers for a new
/// atom whose semantics is given by cmd (e.g. the optional-increment command
/// desugared as skip [+] x := x + 1).
inline ILTriple combined_axiom_custom(const RCmdPtr& cmd,
                                      const std::function<AssertPtr(const AssertPtr&)>& fw,
                                      const std::function<AssertPtr(const AssertPtr&)>& bw,
                                      const AssertPtr& P, const AssertPtr& Q) {
  return ILTriple{aand(P, bw(Q)), cmd, aand(Q, fw(P))};
}

/// true iff the combined axiom for (c, P, Q) is both IL- and SIL-valid.
inline bool verify_schema_validity(const ACmd& c, const AssertPtr& P, const AssertPtr& Q,
                                   const Universe& u) {
  ILTriple t = combined_axiom(c, P, Q);
  return il_valid(t, u) && sil_valid(SILTriple{t.pre, t.cmd, t.post}, u);
}

/// Completeness direction: a both-valid atomic triple satisfies
/// ext(pre and bw(post)) = ext(pre) and ext(post and fw(pre)) = ext(post).
/// Throws if the triple is not atomic or not both-valid.
inline bool verify_schema_completeness(const ILTriple& t, const Universe& u) {
  const auto* a = std::get_if<Atom>(&t.cmd->node);
  if (!a) throw PreconditionError("completeness check requires an atomic command");
  if (!il_valid(t, u) || !sil_valid(SILTriple{t.pre, t.cmd, t.post}, u))
    throw PreconditionError("completeness check requires a triple valid in both logics");
  AssertPtr pre2 = aand(t.pre, bwatom(a->cmd, t.post));
  AssertPtr post2 = aand(t.post, fwatom(a->cmd, t.pre));
  return extension(pre2, u) == extension(t.pre, u) && extension(post2, u) == extension(t.post, u);
}

// ---------------------------------------------------------------------------
// The optional-increment atom x++?: nondeterministically may increment x.
// Desugars to skip [+] x := x + 1; its closed forms are
//   fw(P) = P or P[x-1/x]      bw(Q) = Q or Q[x+1/x]

inline RCmdPtr incr_opt_cmd(const VarName& x) {
  return choice(skip(), assign(x, binop(AOp::Add, var(x), lit(1))));
}

inline AssertPtr incr_opt_fw(const AssertPtr& P, const VarName& x) {
  return aor(P, substitute(P, binop(AOp::Sub, var(x), lit(1)), x));
}

inline AssertPtr incr_opt_bw(const AssertPtr& Q, const VarName& x) {
  return aor(Q, substitute(Q, binop(AOp::Add, var(x), lit(1)), x));
}

/// The combined axiom for x++?:
///   <P and (Q or Q[x+1/x])>  x++?  <Q and (P or P[x-1/x])>
inline ILTriple incr_opt_axiom(const VarName& x, const AssertPtr& P, const AssertPtr& Q) {
  return combined_axiom_custom(
      incr_opt_cmd(x), [&x](const AssertPtr& p) { return incr_opt_fw(p, x); },
      [&x](const AssertPtr& q) { return incr_opt_bw(q, x); }, P, Q);
}

}  // namespace uturn

#endif
