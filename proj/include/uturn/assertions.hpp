#ifndef UTURN_ASSERTIONS_HPP
#define UTURN_ASSERTIONS_HPP

// Symbolic assertion calculus: formula AST, capture-avoiding substitution,
// extensional meaning over a Universe, implication checking, and the
// closed-form atomic transformers (Floyd's sp, Hoare's backward wp).
//
// Assertions denote sets of flagged states. An untagged boolean formula is
// flag-agnostic (holds at both flags); Tagged filters by flag. The States
// node names an arbitrary finite state set explicitly, so engine results can
// always be expressed exactly without formula blowup.

#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "uturn/errors.hpp"
#include "uturn/lang.hpp"
#include "uturn/semantics.hpp"
#include "uturn/state.hpp"

namespace uturn {

struct Assertion;
using AssertPtr = std::shared_ptr<const Assertion>;

struct ABool {
  BExpPtr expr;
};
struct ANot {
  AssertPtr arg;
};
struct AAnd {
  AssertPtr lhs;
  AssertPtr rhs;
};
struct AOr {
  AssertPtr lhs;
  AssertPtr rhs;
};
struct AImplies {
  AssertPtr lhs;
  AssertPtr rhs;
};
struct AExists {
  VarName var;
  AssertPtr body;
};
struct ATagged {
  Flag flag;
  AssertPtr body;
};
/// Forward image of an assertion under one atomic command (semantic node).
struct AFwAtom {
  ACmd cmd;
  AssertPtr arg;
};
/// Backward (preimage) of an assertion under one atomic command.
struct ABwAtom {
  ACmd cmd;
  AssertPtr arg;
};
/// Explicit finite state set, the canonical internal form for engine results.
struct AStates {
  StateSet set;
  std::shared_ptr<const Universe> universe;
};

struct Assertion {
  std::variant<ABool, ANot, AAnd, AOr, AImplies, AExists, ATagged, AFwAtom, ABwAtom, AStates> node;
};

inline AssertPtr abool(BExpPtr b) { return std::make_shared<Assertion>(Assertion{ABool{std::move(b)}}); }
inline AssertPtr atrue() { return abool(btrue()); }
inline AssertPtr afalse() { return abool(bfalse()); }
inline AssertPtr anot(AssertPtr p) { return std::make_shared<Assertion>(Assertion{ANot{std::move(p)}}); }
inline AssertPtr aand(AssertPtr l, AssertPtr r) {
  return std::make_shared<Assertion>(Assertion{AAnd{std::move(l), std::move(r)}});
}
inline AssertPtr aor(AssertPtr l, AssertPtr r) {
  return std::make_shared<Assertion>(Assertion{AOr{std::move(l), std::move(r)}});
}
inline AssertPtr aimplies(AssertPtr l, AssertPtr r) {
  return std::make_shared<Assertion>(Assertion{AImplies{std::move(l), std::move(r)}});
}
inline AssertPtr aexists(VarName x, AssertPtr body) {
  return std::make_shared<Assertion>(Assertion{AExists{std::move(x), std::move(body)}});
}
inline AssertPtr tagged(Flag f, AssertPtr body) {
  return std::make_shared<Assertion>(Assertion{ATagged{f, std::move(body)}});
}
inline AssertPtr ok_tag(AssertPtr body) { return tagged(Flag::Ok, std::move(body)); }
inline AssertPtr er_tag(AssertPtr body) { return tagged(Flag::Er, std::move(body)); }
inline AssertPtr fwatom(ACmd c, AssertPtr arg) {
  return std::make_shared<Assertion>(Assertion{AFwAtom{std::move(c), std::move(arg)}});
}
inline AssertPtr bwatom(ACmd c, AssertPtr arg) {
  return std::make_shared<Assertion>(Assertion{ABwAtom{std::move(c), std::move(arg)}});
}
inline AssertPtr astates(StateSet set, const Universe& u) {
  return std::make_shared<Assertion>(Assertion{AStates{std::move(set), std::make_shared<Universe>(u)}});
}
/// Names a state set exactly; the canonical engine-internal assertion form.
inline AssertPtr canonical(const StateSet& set, const Universe& u) { return astates(set, u); }

// ---------------------------------------------------------------------------
// Free variables and fresh names

inline void collect_vars(const Assertion& p, std::set<VarName>& out) {
  if (const auto* b = std::get_if<ABool>(&p.node)) {
    collect_vars(*b->expr, out);
  } else if (const auto* n = std::get_if<ANot>(&p.node)) {
    collect_vars(*n->arg, out);
  } else if (const auto* a = std::get_if<AAnd>(&p.node)) {
    collect_vars(*a->lhs, out);
    collect_vars(*a->rhs, out);
  } else if (const auto* o = std::get_if<AOr>(&p.node)) {
    collect_vars(*o->lhs, out);
    collect_vars(*o->rhs, out);
  } else if (const auto* i = std::get_if<AImplies>(&p.node)) {
    collect_vars(*i->lhs, out);
    collect_vars(*i->rhs, out);
  } else if (const auto* e = std::get_if<AExists>(&p.node)) {
    std::set<VarName> inner;
    collect_vars(*e->body, inner);
    inner.erase(e->var);
    out.insert(inner.begin(), inner.end());
  } else if (const auto* t = std::get_if<ATagged>(&p.node)) {
    collect_vars(*t->body, out);
  } else if (const auto* f = std::get_if<AFwAtom>(&p.node)) {
    collect_vars(f->cmd, out);
    collect_vars(*f->arg, out);
  } else if (const auto* w = std::get_if<ABwAtom>(&p.node)) {
    collect_vars(w->cmd, out);
    collect_vars(*w->arg, out);
  } else {
    const auto& s = std::get<AStates>(p.node);
    for (const auto& v : s.universe->vars()) out.insert(v);
  }
}

inline std::set<VarName> free_vars(const Assertion& p) {
  std::set<VarName> out;
  collect_vars(p, out);
  return out;
}

/// First primed variant of base absent from avoid (x -> x' -> x'' -> ...);
/// deterministic so derivations serialize stably.
inline VarName fresh_name(const VarName& base, const std::set<VarName>& avoid) {
  VarName candidate = base + "'";
  while (avoid.count(candidate)) candidate += "'";
  return candidate;
}

// ---------------------------------------------------------------------------
// Syntactic substitution on expressions

inline AExpPtr subst_aexp(const AExpPtr& e, const AExpPtr& a, const VarName& x) {
  if (const auto* v = std::get_if<VarRef>(&e->node)) return v->name == x ? a : e;
  if (const auto* b = std::get_if<BinOp>(&e->node))
    return binop(b->op, subst_aexp(b->lhs, a, x), subst_aexp(b->rhs, a, x));
  return e;
}

inline BExpPtr subst_bexp(const BExpPtr& b, const AExpPtr& a, const VarName& x) {
  if (std::holds_alternative<BFalse>(b->node)) return b;
  if (const auto* n = std::get_if<BNot>(&b->node)) return bnot(subst_bexp(n->arg, a, x));
  if (const auto* c = std::get_if<BAnd>(&b->node))
    return band(subst_bexp(c->lhs, a, x), subst_bexp(c->rhs, a, x));
  const auto& cmp = std::get<BCmp>(b->node);
  return bcmp(cmp.op, subst_aexp(cmp.lhs, a, x), subst_aexp(cmp.rhs, a, x));
}

// ---------------------------------------------------------------------------
// Capture-avoiding substitution P[a/x]

inline AssertPtr substitute(const AssertPtr& p, const AExpPtr& a, const VarName& x) {
  if (const auto* b = std::get_if<ABool>(&p->node)) return abool(subst_bexp(b->expr, a, x));
  if (const auto* n = std::get_if<ANot>(&p->node)) return anot(substitute(n->arg, a, x));
  if (const auto* c = std::get_if<AAnd>(&p->node))
    return aand(substitute(c->lhs, a, x), substitute(c->rhs, a, x));
  if (const auto* o = std::get_if<AOr>(&p->node))
    return aor(substitute(o->lhs, a, x), substitute(o->rhs, a, x));
  if (const auto* i = std::get_if<AImplies>(&p->node))
    return aimplies(substitute(i->lhs, a, x), substitute(i->rhs, a, x));
  if (const auto* t = std::get_if<ATagged>(&p->node)) return tagged(t->flag, substitute(t->body, a, x));
  if (const auto* e = std::get_if<AExists>(&p->node)) {
    if (e->var == x) return p;  // x is shadowed
    std::set<VarName> avars;
    collect_vars(*a, avars);
    if (avars.count(e->var)) {
      // rename the binder to avoid capturing a free variable of a
      std::set<VarName> avoid = avars;
      collect_vars(*e->body, avoid);
      avoid.insert(x);
      VarName y = fresh_name(e->var, avoid);
      AssertPtr renamed = substitute(e->body, var(y), e->var);
      return aexists(y, substitute(renamed, a, x));
    }
    return aexists(e->var, substitute(e->body, a, x));
  }
  if (const auto* s = std::get_if<AStates>(&p->node)) {
    const Universe& u = *s->universe;
    if (!u.has_var(x)) return p;
    // pointwise: s is in the result iff s[x -> [[a]]s] is in the set
    std::size_t xi = u.var_index(x);
    StateSet out(u);
    for (std::uint64_t i = 0; i < u.state_count(); ++i) {
      FlaggedState st = state_at(i, u);
      st.store[xi] = eval_aexp(*a, st.store, u);
      if (s->set.contains(st, u)) out.set(i);
    }
    return astates(std::move(out), u);
  }
  throw PreconditionError("substitution into a semantic atom node is not supported");
}

// ---------------------------------------------------------------------------
// Extensional meaning

namespace detail {

/// Folds bound-variable bindings for universe variables into the store.
inline FlaggedState apply_env(FlaggedState s, const Universe& u, const BoundEnv* env) {
  if (!env) return s;
  for (std::size_t i = 0; i < u.vars().size(); ++i)
    if (const Value* v = env->lookup(u.vars()[i])) s.store[i] = *v;
  return s;
}

inline bool member(const Assertion& p, const FlaggedState& s, const Universe& u, const BoundEnv* env) {
  if (const auto* b = std::get_if<ABool>(&p.node)) return eval_bexp(*b->expr, s.store, u, env);
  if (const auto* n = std::get_if<ANot>(&p.node)) return !member(*n->arg, s, u, env);
  if (const auto* c = std::get_if<AAnd>(&p.node))
    return member(*c->lhs, s, u, env) && member(*c->rhs, s, u, env);
  if (const auto* o = std::get_if<AOr>(&p.node))
    return member(*o->lhs, s, u, env) || member(*o->rhs, s, u, env);
  if (const auto* i = std::get_if<AImplies>(&p.node))
    return !member(*i->lhs, s, u, env) || member(*i->rhs, s, u, env);
  if (const auto* t = std::get_if<ATagged>(&p.node))
    return s.flag == t->flag && member(*t->body, s, u, env);
  if (const auto* e = std::get_if<AExists>(&p.node)) {
    BoundEnv inner{env, &e->var, 0};
    for (Value v = u.lo(); v <= u.hi(); ++v) {
      inner.value = v;
      if (member(*e->body, s, u, &inner)) return true;
    }
    return false;
  }
  if (const auto* f = std::get_if<AFwAtom>(&p.node)) {
    // s is in the forward image iff some preimage state satisfies the argument
    FlaggedState se = apply_env(s, u, env);
    bool found = false;
    atomic_preimage(f->cmd, se, u).for_each([&](std::uint64_t i) {
      if (!found && member(*f->arg, state_at(i, u), u, nullptr)) found = true;
    });
    return found;
  }
  if (const auto* w = std::get_if<ABwAtom>(&p.node)) {
    FlaggedState se = apply_env(s, u, env);
    bool found = false;
    atomic_step(w->cmd, se, u).for_each([&](std::uint64_t i) {
      if (!found && member(*w->arg, state_at(i, u), u, nullptr)) found = true;
    });
    return found;
  }
  const auto& st = std::get<AStates>(p.node);
  return st.set.contains(apply_env(s, u, env), u);
}

}  // namespace detail

/// Does the flagged state satisfy the assertion?
inline bool member(const Assertion& p, const FlaggedState& s, const Universe& u) {
  return detail::member(p, s, u, nullptr);
}

/// The state set denoted by P over the universe.
inline StateSet extension(const Assertion& p, const Universe& u) {
  if (const auto* st = std::get_if<AStates>(&p.node))
    if (st->set.universe_size() == u.state_count()) return st->set;
  StateSet out(u);
  for (std::uint64_t i = 0; i < u.state_count(); ++i)
    if (member(p, state_at(i, u), u)) out.set(i);
  return out;
}
inline StateSet extension(const AssertPtr& p, const Universe& u) { return extension(*p, u); }

/// Semantic implication: extension containment over the universe.
inline bool implies(const AssertPtr& p, const AssertPtr& q, const Universe& u) {
  return extension(p, u).subset_of(extension(q, u));
}

/// Semantic equivalence: extension equality.
inline bool equiv(const AssertPtr& p, const AssertPtr& q, const Universe& u) {
  return extension(p, u) == extension(q, u);
}

inline bool is_empty(const AssertPtr& p, const Universe& u) { return extension(p, u).empty(); }

// ---------------------------------------------------------------------------
// Closed-form atomic transformers

namespace detail {

inline const AssertPtr& ok_body(const AssertPtr& p, const char* who) {
  const auto* t = std::get_if<ATagged>(&p->node);
  if (!t || t->flag != Flag::Ok)
    throw PreconditionError(std::string(who) + " requires an ok-tagged assertion");
  return t->body;
}

}  // namespace detail

/// Floyd's strongest postcondition for an atomic command (P must be ok-tagged):
/// assign: exists v. P[v/x] and x = a[v/x] (v fresh); assume(b): P and b;
/// skip: P; nondet(x): exists x. P; error(): P retagged er.
inline AssertPtr sp_atom(const ACmd& c, const AssertPtr& p) {
  const AssertPtr& body = detail::ok_body(p, "sp_atom");
  if (std::holds_alternative<Skip>(c.node)) return p;
  if (std::holds_alternative<Error>(c.node)) return er_tag(body);
  if (const auto* s = std::get_if<Assume>(&c.node)) return ok_tag(aand(body, abool(s->cond)));
  if (const auto* n = std::get_if<Nondet>(&c.node)) return ok_tag(aexists(n->target, body));
  const auto& a = std::get<Assign>(c.node);
  std::set<VarName> avoid = free_vars(*body);
  collect_vars(*a.expr, avoid);
  avoid.insert(a.target);
  VarName v = fresh_name(a.target, avoid);
  AssertPtr shifted = substitute(body, var(v), a.target);
  BExpPtr link = bcmp(CmpOp::Eq, var(a.target), subst_aexp(a.expr, var(v), a.target));
  return ok_tag(aexists(v, aand(shifted, abool(link))));
}

/// Hoare's backward transformer for an atomic command (Q must be ok-tagged):
/// assign: Q[a/x]; assume(b): Q and b; skip: Q; nondet(x): exists x. Q;
/// error(): false (no ok state steps to an ok post).
inline AssertPtr wp_atom(const ACmd& c, const AssertPtr& q) {
  const AssertPtr& body = detail::ok_body(q, "wp_atom");
  if (std::holds_alternative<Skip>(c.node)) return q;
  if (std::holds_alternative<Error>(c.node)) return ok_tag(afalse());
  if (const auto* s = std::get_if<Assume>(&c.node)) return ok_tag(aand(body, abool(s->cond)));
  if (const auto* n = std::get_if<Nondet>(&c.node)) return ok_tag(aexists(n->target, body));
  const auto& a = std::get<Assign>(c.node);
  return ok_tag(substitute(body, a.expr, a.target));
}

// ---------------------------------------------------------------------------
// Display

inline std::string to_string(const Assertion& p);

namespace detail {

/// Attempts to print a per-flag store set as a conjunction of constraints;
/// works whenever the set is a Cartesian product of per-variable value sets.
inline bool describe_product(const std::vector<StoreVals>& stores, const Universe& u, std::string& out) {
  std::vector<std::set<Value>> proj(u.vars().size());
  for (const auto& s : stores)
    for (std::size_t i = 0; i < s.size(); ++i) proj[i].insert(s[i]);
  std::uint64_t prod = 1;
  for (const auto& vs : proj) prod *= vs.size();
  if (prod != stores.size()) return false;
  std::vector<std::string> parts;
  for (std::size_t i = 0; i < proj.size(); ++i) {
    if (proj[i].size() == static_cast<std::size_t>(u.modulus())) continue;  // unconstrained
    if (proj[i].size() == 1) {
      parts.push_back(u.vars()[i] + " = " + std::to_string(*proj[i].begin()));
    } else {
      std::string d;
      for (Value v : proj[i]) d += (d.empty() ? "" : " or ") + u.vars()[i] + " = " + std::to_string(v);
      parts.push_back("(" + d + ")");
    }
  }
  if (parts.empty()) {
    out = "true";
    return true;
  }
  out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += " and " + parts[i];
  return true;
}

}  // namespace detail

/// Human-readable description of a state set, recovering simple formula
/// shapes ("false", "ok: true", "er: x = 0") where possible.
inline std::string describe(const StateSet& set, const Universe& u) {
  if (set.empty()) return "false";
  std::vector<std::string> parts;
  for (Flag f : {Flag::Ok, Flag::Er}) {
    std::vector<StoreVals> stores;
    set.for_each([&](std::uint64_t i) {
      FlaggedState s = state_at(i, u);
      if (s.flag == f) stores.push_back(s.store);
    });
    if (stores.empty()) continue;
    std::string tag = f == Flag::Ok ? "ok: " : "er: ";
    std::string body;
    if (!detail::describe_product(stores, u, body))
      body = "<" + std::to_string(stores.size()) + " stores>";
    parts.push_back(tag + body);
  }
  std::string out = parts[0];
  for (std::size_t i = 1; i < parts.size(); ++i) out += " or " + parts[i];
  return out;
}

inline std::string to_string(const Assertion& p) {
  if (const auto* b = std::get_if<ABool>(&p.node)) return to_string(*b->expr);
  if (const auto* n = std::get_if<ANot>(&p.node)) return "not (" + to_string(*n->arg) + ")";
  if (const auto* c = std::get_if<AAnd>(&p.node))
    return "(" + to_string(*c->lhs) + " and " + to_string(*c->rhs) + ")";
  if (const auto* o = std::get_if<AOr>(&p.node))
    return "(" + to_string(*o->lhs) + " or " + to_string(*o->rhs) + ")";
  if (const auto* i = std::get_if<AImplies>(&p.node))
    return "(" + to_string(*i->lhs) + " => " + to_string(*i->rhs) + ")";
  if (const auto* e = std::get_if<AExists>(&p.node))
    return "exists " + e->var + ". " + to_string(*e->body);
  if (const auto* t = std::get_if<ATagged>(&p.node))
    return (t->flag == Flag::Ok ? "ok: " : "er: ") + to_string(*t->body);
  if (const auto* f = std::get_if<AFwAtom>(&p.node))
    return "fw[" + to_string(f->cmd) + "](" + to_string(*f->arg) + ")";
  if (const auto* w = std::get_if<ABwAtom>(&p.node))
    return "bw[" + to_string(w->cmd) + "](" + to_string(*w->arg) + ")";
  const auto& s = std::get<AStates>(p.node);
  return describe(s.set, *s.universe);
}

// ---------------------------------------------------------------------------
// Concrete syntax: ("ok:"|"er:")? formula, with tagged disjuncts allowed at
// the top level. An untagged formula denotes its ok-tagged set.

namespace detail {

class AssertionParser {
public:
  AssertionParser(Cursor& cur, std::set<VarName> vars) : cur_(cur), scope_(std::move(vars)) {}

  AssertPtr top() {
    AssertPtr p = tagged_or_formula();
    while (cur_.eat_kw("or")) p = aor(p, tagged_or_formula());
    return p;
  }

private:
  AssertPtr tagged_or_formula() {
    if (cur_.at_kw("ok") || cur_.at_kw("er")) {
      std::size_t m = cur_.mark();
      Flag f = cur_.next().text == "ok" ? Flag::Ok : Flag::Er;
      if (cur_.eat_sym(":")) return tagged(f, formula());
      cur_.reset(m);  // "ok"/"er" used as plain identifiers? not declared -> error below
    }
    return ok_tag(formula());
  }

  AssertPtr formula() {  // implication, right-associative, lowest precedence
    AssertPtr l = or_part();
    if (cur_.eat_sym("=>")) return aimplies(l, formula());
    return l;
  }

  AssertPtr or_part() {
    AssertPtr l = and_part();
    // stop at a top-level tagged disjunct boundary ("or ok:" / "or er:")
    while (cur_.at_kw("or") || cur_.at_sym("||")) {
      std::size_t m = cur_.mark();
      cur_.next();
      if ((cur_.at_kw("ok") || cur_.at_kw("er"))) {
        std::size_t m2 = cur_.mark();
        cur_.next();
        bool is_tag = cur_.at_sym(":");
        cur_.reset(m2);
        if (is_tag) {
          cur_.reset(m);
          return l;
        }
      }
      l = aor(l, and_part());
    }
    return l;
  }

  AssertPtr and_part() {
    AssertPtr l = unary();
    while (cur_.eat_kw("and") || cur_.eat_sym("&&")) l = aand(l, unary());
    return l;
  }

  AssertPtr unary() {
    if (cur_.eat_kw("not") || cur_.eat_sym("!")) return anot(unary());
    if (cur_.eat_kw("exists")) {
      if (cur_.peek().kind != Token::Ident || keywords().count(cur_.peek().text))
        cur_.fail("expected bound variable name");
      VarName x = cur_.next().text;
      cur_.expect_sym(".");
      scope_.insert(x);
      AssertPtr body = formula();
      // note: shadowing an outer binder of the same name is accepted
      return aexists(x, body);
    }
    if (cur_.at_sym("(")) {
      std::size_t m = cur_.mark();
      cur_.next();
      try {
        AssertPtr p = formula();
        cur_.expect_sym(")");
        return p;
      } catch (const ParseError&) {
        cur_.reset(m);  // retry as an arithmetic lhs of a comparison
      }
    }
    if (cur_.eat_kw("true")) return atrue();
    if (cur_.eat_kw("false")) return afalse();
    // bare comparison; and/or/not belong to this level, not the BExp level
    ExprParser ep(cur_, &scope_);
    return abool(ep.comparison());
  }

  Cursor& cur_;
  std::set<VarName> scope_;
};

}  // namespace detail

/// Parses an assertion against a declared variable set. Untagged formulas are
/// ok-tagged; a disjunction with an er part needs tags on both disjuncts.
inline AssertPtr parse_assertion(const std::string& text, const std::set<VarName>& vars) {
  detail::Cursor cur(detail::lex(text));
  detail::AssertionParser ap(cur, vars);
  AssertPtr p = ap.top();
  if (cur.peek().kind != detail::Token::End) cur.fail("trailing input after assertion");
  return p;
}

}  // namespace uturn

#endif
