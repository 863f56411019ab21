#ifndef UTURN_JSON_IO_HPP
#define UTURN_JSON_IO_HPP

// JSON persistence for assertions, derivations, and replay trees.
// Assertions serialize as tagged AST nodes; commands serialize as
// round-trippable source text (unroll premises synthesize commands like
// "iter { ... }; ..." that have no contiguous source span).

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "uturn/assertions.hpp"
#include "uturn/errors.hpp"
#include "uturn/il.hpp"
#include "uturn/lang.hpp"
#include "uturn/sil.hpp"
#include "uturn/state.hpp"
#include "uturn/uturn.hpp"

namespace uturn {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Assertions

inline json to_json(const Assertion& p) {
  if (const auto* b = std::get_if<ABool>(&p.node)) return {{"kind", "bool"}, {"expr", to_string(*b->expr)}};
  if (const auto* n = std::get_if<ANot>(&p.node)) return {{"kind", "not"}, {"arg", to_json(*n->arg)}};
  if (const auto* c = std::get_if<AAnd>(&p.node))
    return {{"kind", "and"}, {"lhs", to_json(*c->lhs)}, {"rhs", to_json(*c->rhs)}};
  if (const auto* o = std::get_if<AOr>(&p.node))
    return {{"kind", "or"}, {"lhs", to_json(*o->lhs)}, {"rhs", to_json(*o->rhs)}};
  if (const auto* i = std::get_if<AImplies>(&p.node))
    return {{"kind", "implies"}, {"lhs", to_json(*i->lhs)}, {"rhs", to_json(*i->rhs)}};
  if (const auto* e = std::get_if<AExists>(&p.node))
    return {{"kind", "exists"}, {"var", e->var}, {"body", to_json(*e->body)}};
  if (const auto* t = std::get_if<ATagged>(&p.node))
    return {{"kind", "tagged"}, {"flag", t->flag == Flag::Ok ? "ok" : "er"}, {"body", to_json(*t->body)}};
  if (const auto* f = std::get_if<AFwAtom>(&p.node))
    return {{"kind", "fwatom"}, {"cmd", to_string(f->cmd)}, {"arg", to_json(*f->arg)}};
  if (const auto* w = std::get_if<ABwAtom>(&p.node))
    return {{"kind", "bwatom"}, {"cmd", to_string(w->cmd)}, {"arg", to_json(*w->arg)}};
  const auto& s = std::get<AStates>(p.node);
  std::vector<std::uint64_t> indices;
  s.set.for_each([&](std::uint64_t i) { indices.push_back(i); });
  return {{"kind", "states"}, {"indices", indices}};
}

namespace detail {

[[noreturn]] inline void json_fail(const std::string& msg) { throw ParseError(msg, 0, 0); }

inline ACmd acmd_from_text(const std::string& text, const std::set<VarName>& vars) {
  RCmdPtr r = parse_rcmd(text, vars);
  const auto* a = std::get_if<Atom>(&r->node);
  if (!a) json_fail("expected an atomic command, got: " + text);
  return a->cmd;
}

inline AssertPtr assertion_from_json(const json& j, const Universe& u, std::set<VarName> scope) {
  if (!j.is_object() || !j.contains("kind")) json_fail("malformed assertion node");
  const std::string kind = j.at("kind");
  if (kind == "bool") return abool(parse_bexp(j.at("expr"), scope));
  if (kind == "not") return anot(assertion_from_json(j.at("arg"), u, scope));
  if (kind == "and")
    return aand(assertion_from_json(j.at("lhs"), u, scope), assertion_from_json(j.at("rhs"), u, scope));
  if (kind == "or")
    return aor(assertion_from_json(j.at("lhs"), u, scope), assertion_from_json(j.at("rhs"), u, scope));
  if (kind == "implies")
    return aimplies(assertion_from_json(j.at("lhs"), u, scope), assertion_from_json(j.at("rhs"), u, scope));
  if (kind == "exists") {
    VarName x = j.at("var");
    scope.insert(x);
    return aexists(x, assertion_from_json(j.at("body"), u, scope));
  }
  if (kind == "tagged") {
    Flag f = j.at("flag") == "ok" ? Flag::Ok : Flag::Er;
    return tagged(f, assertion_from_json(j.at("body"), u, scope));
  }
  if (kind == "fwatom")
    return fwatom(acmd_from_text(j.at("cmd"), scope), assertion_from_json(j.at("arg"), u, scope));
  if (kind == "bwatom")
    return bwatom(acmd_from_text(j.at("cmd"), scope), assertion_from_json(j.at("arg"), u, scope));
  if (kind == "states") {
    StateSet set(u);
    for (std::uint64_t i : j.at("indices")) {
      if (i >= u.state_count()) json_fail("state index out of range for the universe");
      set.set(i);
    }
    return astates(std::move(set), u);
  }
  json_fail("unknown assertion kind: " + kind);
}

}  // namespace detail

inline AssertPtr assertion_from_json(const json& j, const Universe& u) {
  std::set<VarName> scope(u.vars().begin(), u.vars().end());
  return detail::assertion_from_json(j, u, std::move(scope));
}

// ---------------------------------------------------------------------------
// IL / SIL derivations

inline json to_json(const ILDerivation& d) {
  json children = json::array();
  for (const auto& c : d.children) children.push_back(to_json(*c));
  return {{"kind", to_string(d.rule)},
          {"pre", to_json(*d.triple.pre)},
          {"cmd", to_string(*d.triple.cmd)},
          {"post", to_json(*d.triple.post)},
          {"children", children}};
}

inline json to_json(const SILDerivation& d) {
  json children = json::array();
  for (const auto& c : d.children) children.push_back(to_json(*c));
  return {{"kind", to_string(d.rule)},
          {"pre", to_json(*d.triple.pre)},
          {"cmd", to_string(*d.triple.cmd)},
          {"post", to_json(*d.triple.post)},
          {"children", children}};
}

namespace detail {

inline ILRule il_rule_from_name(const std::string& name) {
  for (ILRule r : {ILRule::Assign, ILRule::Assume, ILRule::Nondet, ILRule::Skip, ILRule::Error,
                   ILRule::ErId, ILRule::Disj, ILRule::Cons, ILRule::Seq, ILRule::ChoiceL,
                   ILRule::ChoiceR, ILRule::Iter0, ILRule::Unroll, ILRule::Empty})
    if (name == to_string(r)) return r;
  json_fail("unknown IL rule kind: " + name);
}

inline SILRule sil_rule_from_name(const std::string& name) {
  for (SILRule r : {SILRule::Assign, SILRule::Assume, SILRule::Nondet, SILRule::Skip, SILRule::Error,
                    SILRule::ErId, SILRule::Disj, SILRule::Cons, SILRule::Seq, SILRule::ChoiceL,
                    SILRule::ChoiceR, SILRule::Iter0, SILRule::Unroll, SILRule::Empty})
    if (name == to_string(r)) return r;
  json_fail("unknown SIL rule kind: " + name);
}

inline URule u_rule_from_name(const std::string& name) {
  for (URule r : {URule::Assign, URule::Nondet, URule::Assume, URule::Skip, URule::Error, URule::ErId,
                  URule::Empty, URule::Disj, URule::Seq, URule::ChoiceL, URule::ChoiceR, URule::Iter0,
                  URule::Unroll, URule::ConsIL, URule::ConsSIL})
    if (name == to_string(r)) return r;
  json_fail("unknown replay rule kind: " + name);
}

}  // namespace detail

inline ILDerivPtr il_derivation_from_json(const json& j, const Universe& u) {
  std::set<VarName> vars(u.vars().begin(), u.vars().end());
  ILRule rule = detail::il_rule_from_name(j.at("kind"));
  ILTriple t{assertion_from_json(j.at("pre"), u), parse_rcmd(j.at("cmd"), vars),
             assertion_from_json(j.at("post"), u)};
  std::vector<ILDerivPtr> children;
  for (const json& c : j.at("children")) children.push_back(il_derivation_from_json(c, u));
  return il_node(rule, std::move(t), std::move(children));
}

inline SILDerivPtr sil_derivation_from_json(const json& j, const Universe& u) {
  std::set<VarName> vars(u.vars().begin(), u.vars().end());
  SILRule rule = detail::sil_rule_from_name(j.at("kind"));
  SILTriple t{assertion_from_json(j.at("pre"), u), parse_rcmd(j.at("cmd"), vars),
              assertion_from_json(j.at("post"), u)};
  std::vector<SILDerivPtr> children;
  for (const json& c : j.at("children")) children.push_back(sil_derivation_from_json(c, u));
  return sil_node(rule, std::move(t), std::move(children));
}

// ---------------------------------------------------------------------------
// Replay trees

inline json to_json(const UTurnNode& n) {
  json children = json::array();
  for (const auto& c : n.children) children.push_back(to_json(*c));
  return {{"kind", to_string(n.rule)},
          {"il_ref", n.il_path},
          {"pre", to_json(*n.sil_pre)},
          {"post", to_json(*n.sil_post)},
          {"children", children}};
}

inline json to_json(const UTurnDerivation& ud) {
  return {{"il", to_json(*ud.il)}, {"replay", to_json(*ud.root)}};
}

inline json to_json(const TurnUNode& n) {
  json children = json::array();
  for (const auto& c : n.children) children.push_back(to_json(*c));
  return {{"kind", to_string(n.rule)},
          {"sil_ref", n.sil_path},
          {"pre", to_json(*n.il_pre)},
          {"post", to_json(*n.il_post)},
          {"children", children}};
}

inline json to_json(const TurnUDerivation& td) {
  return {{"sil", to_json(*td.sil)}, {"replay", to_json(*td.root)}};
}

inline UNodePtr u_node_from_json(const json& j, const Universe& u) {
  URule rule = detail::u_rule_from_name(j.at("kind"));
  std::vector<int> path = j.at("il_ref").get<std::vector<int>>();
  std::vector<UNodePtr> children;
  for (const json& c : j.at("children")) children.push_back(u_node_from_json(c, u));
  return u_node(rule, std::move(path), assertion_from_json(j.at("pre"), u),
                assertion_from_json(j.at("post"), u), std::move(children));
}

inline UTurnDerivation uturn_derivation_from_json(const json& j, const Universe& u) {
  return UTurnDerivation{il_derivation_from_json(j.at("il"), u), u_node_from_json(j.at("replay"), u)};
}

}  // namespace uturn

#endif
