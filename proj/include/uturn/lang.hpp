#ifndef UTURN_LANG_HPP
#define UTURN_LANG_HPP

// Abstract syntax, concrete grammar and parser for arithmetic/boolean
// expressions, atomic commands and regular commands. `if` and `while`
// desugar into choice/iteration at parse time; derived boolean forms
// (true, or, =>) normalize into the core constructors {false, not, and, cmp}.

#include <cctype>
#include <memory>
#include <set>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "uturn/errors.hpp"

namespace uturn {

using VarName = std::string;

// ---------------------------------------------------------------------------
// Arithmetic expressions

struct AExp;
using AExpPtr = std::shared_ptr<const AExp>;

enum class AOp { Add, Sub, Mul };

struct IntLit {
  long long value;
};
struct VarRef {
  VarName name;
};
struct BinOp {
  AOp op;
  AExpPtr lhs;
  AExpPtr rhs;
};

struct AExp {
  std::variant<IntLit, VarRef, BinOp> node;
};

inline AExpPtr lit(long long n) { return std::make_shared<AExp>(AExp{IntLit{n}}); }
inline AExpPtr var(VarName x) { return std::make_shared<AExp>(AExp{VarRef{std::move(x)}}); }
inline AExpPtr binop(AOp op, AExpPtr l, AExpPtr r) {
  return std::make_shared<AExp>(AExp{BinOp{op, std::move(l), std::move(r)}});
}

// ---------------------------------------------------------------------------
// Boolean expressions (core: false, not, and, comparison)

struct BExp;
using BExpPtr = std::shared_ptr<const BExp>;

enum class CmpOp { Eq, Ne, Le, Lt };

struct BFalse {};
struct BNot {
  BExpPtr arg;
};
struct BAnd {
  BExpPtr lhs;
  BExpPtr rhs;
};
struct BCmp {
  CmpOp op;
  AExpPtr lhs;
  AExpPtr rhs;
};

struct BExp {
  std::variant<BFalse, BNot, BAnd, BCmp> node;
};

inline BExpPtr bfalse() { return std::make_shared<BExp>(BExp{BFalse{}}); }
inline BExpPtr bnot(BExpPtr b) { return std::make_shared<BExp>(BExp{BNot{std::move(b)}}); }
inline BExpPtr band(BExpPtr l, BExpPtr r) {
  return std::make_shared<BExp>(BExp{BAnd{std::move(l), std::move(r)}});
}
inline BExpPtr bcmp(CmpOp op, AExpPtr l, AExpPtr r) {
  return std::make_shared<BExp>(BExp{BCmp{op, std::move(l), std::move(r)}});
}
// Derived forms, normalized into the core grammar.
inline BExpPtr btrue() { return bnot(bfalse()); }
inline BExpPtr bor(BExpPtr l, BExpPtr r) { return bnot(band(bnot(std::move(l)), bnot(std::move(r)))); }
inline BExpPtr bimplies(BExpPtr l, BExpPtr r) { return bnot(band(std::move(l), bnot(std::move(r)))); }

// ---------------------------------------------------------------------------
// Commands

struct Skip {};
struct Assign {
  VarName target;
  AExpPtr expr;
};
struct Assume {
  BExpPtr cond;
};
struct Nondet {
  VarName target;
};
struct Error {};

struct ACmd {
  std::variant<Skip, Assign, Assume, Nondet, Error> node;
};

struct RCmd;
using RCmdPtr = std::shared_ptr<const RCmd>;

struct Atom {
  ACmd cmd;
};
struct Seq {
  RCmdPtr first;
  RCmdPtr second;
};
struct Choice {
  RCmdPtr left;
  RCmdPtr right;
};
struct Star {
  RCmdPtr body;
};

struct RCmd {
  std::variant<Atom, Seq, Choice, Star> node;
};

inline RCmdPtr atom(ACmd c) { return std::make_shared<RCmd>(RCmd{Atom{std::move(c)}}); }
inline RCmdPtr skip() { return atom(ACmd{Skip{}}); }
inline RCmdPtr assign(VarName x, AExpPtr a) { return atom(ACmd{Assign{std::move(x), std::move(a)}}); }
inline RCmdPtr assume(BExpPtr b) { return atom(ACmd{Assume{std::move(b)}}); }
inline RCmdPtr nondet(VarName x) { return atom(ACmd{Nondet{std::move(x)}}); }
inline RCmdPtr error_cmd() { return atom(ACmd{Error{}}); }
inline RCmdPtr seq(RCmdPtr a, RCmdPtr b) { return std::make_shared<RCmd>(RCmd{Seq{std::move(a), std::move(b)}}); }
inline RCmdPtr choice(RCmdPtr a, RCmdPtr b) { return std::make_shared<RCmd>(RCmd{Choice{std::move(a), std::move(b)}}); }
inline RCmdPtr star(RCmdPtr a) { return std::make_shared<RCmd>(RCmd{Star{std::move(a)}}); }

/// if (b) {r1} else {r2}  ==  (b?; r1) [+] (!b?; r2)
inline RCmdPtr if_then_else(BExpPtr b, RCmdPtr r1, RCmdPtr r2) {
  return choice(seq(assume(b), std::move(r1)), seq(assume(bnot(b)), std::move(r2)));
}
/// while (b) {r}  ==  (b?; r)*; !b?
inline RCmdPtr while_loop(BExpPtr b, RCmdPtr r) {
  return seq(star(seq(assume(b), std::move(r))), assume(bnot(b)));
}

/// A parsed source file: the declared variable set plus the body command.
struct Program {
  std::vector<VarName> vars;
  RCmdPtr body;
};

// ---------------------------------------------------------------------------
// Structural equality

inline bool equal(const AExp& a, const AExp& b);
inline bool equal(const AExpPtr& a, const AExpPtr& b) { return equal(*a, *b); }

inline bool equal(const AExp& a, const AExp& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* l = std::get_if<IntLit>(&a.node)) return l->value == std::get<IntLit>(b.node).value;
  if (const auto* v = std::get_if<VarRef>(&a.node)) return v->name == std::get<VarRef>(b.node).name;
  const auto& x = std::get<BinOp>(a.node);
  const auto& y = std::get<BinOp>(b.node);
  return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
}

inline bool equal(const BExp& a, const BExp& b);
inline bool equal(const BExpPtr& a, const BExpPtr& b) { return equal(*a, *b); }

inline bool equal(const BExp& a, const BExp& b) {
  if (a.node.index() != b.node.index()) return false;
  if (std::holds_alternative<BFalse>(a.node)) return true;
  if (const auto* n = std::get_if<BNot>(&a.node)) return equal(n->arg, std::get<BNot>(b.node).arg);
  if (const auto* c = std::get_if<BAnd>(&a.node)) {
    const auto& d = std::get<BAnd>(b.node);
    return equal(c->lhs, d.lhs) && equal(c->rhs, d.rhs);
  }
  const auto& x = std::get<BCmp>(a.node);
  const auto& y = std::get<BCmp>(b.node);
  return x.op == y.op && equal(x.lhs, y.lhs) && equal(x.rhs, y.rhs);
}

inline bool equal(const ACmd& a, const ACmd& b) {
  if (a.node.index() != b.node.index()) return false;
  if (std::holds_alternative<Skip>(a.node) || std::holds_alternative<Error>(a.node)) return true;
  if (const auto* x = std::get_if<Assign>(&a.node)) {
    const auto& y = std::get<Assign>(b.node);
    return x->target == y.target && equal(x->expr, y.expr);
  }
  if (const auto* x = std::get_if<Assume>(&a.node)) return equal(x->cond, std::get<Assume>(b.node).cond);
  return std::get<Nondet>(a.node).target == std::get<Nondet>(b.node).target;
}

inline bool equal(const RCmd& a, const RCmd& b);
inline bool equal(const RCmdPtr& a, const RCmdPtr& b) { return equal(*a, *b); }

inline bool equal(const RCmd& a, const RCmd& b) {
  if (a.node.index() != b.node.index()) return false;
  if (const auto* x = std::get_if<Atom>(&a.node)) return equal(x->cmd, std::get<Atom>(b.node).cmd);
  if (const auto* x = std::get_if<Seq>(&a.node)) {
    const auto& y = std::get<Seq>(b.node);
    return equal(x->first, y.first) && equal(x->second, y.second);
  }
  if (const auto* x = std::get_if<Choice>(&a.node)) {
    const auto& y = std::get<Choice>(b.node);
    return equal(x->left, y.left) && equal(x->right, y.right);
  }
  return equal(std::get<Star>(a.node).body, std::get<Star>(b.node).body);
}

// ---------------------------------------------------------------------------
// Free variables

inline void collect_vars(const AExp& a, std::set<VarName>& out) {
  if (const auto* v = std::get_if<VarRef>(&a.node)) {
    out.insert(v->name);
  } else if (const auto* b = std::get_if<BinOp>(&a.node)) {
    collect_vars(*b->lhs, out);
    collect_vars(*b->rhs, out);
  }
}

inline void collect_vars(const BExp& b, std::set<VarName>& out) {
  if (const auto* n = std::get_if<BNot>(&b.node)) {
    collect_vars(*n->arg, out);
  } else if (const auto* a = std::get_if<BAnd>(&b.node)) {
    collect_vars(*a->lhs, out);
    collect_vars(*a->rhs, out);
  } else if (const auto* c = std::get_if<BCmp>(&b.node)) {
    collect_vars(*c->lhs, out);
    collect_vars(*c->rhs, out);
  }
}

inline void collect_vars(const ACmd& c, std::set<VarName>& out) {
  if (const auto* a = std::get_if<Assign>(&c.node)) {
    out.insert(a->target);
    collect_vars(*a->expr, out);
  } else if (const auto* s = std::get_if<Assume>(&c.node)) {
    collect_vars(*s->cond, out);
  } else if (const auto* n = std::get_if<Nondet>(&c.node)) {
    out.insert(n->target);
  }
}

inline void collect_vars(const RCmd& r, std::set<VarName>& out) {
  if (const auto* a = std::get_if<Atom>(&r.node)) {
    collect_vars(a->cmd, out);
  } else if (const auto* s = std::get_if<Seq>(&r.node)) {
    collect_vars(*s->first, out);
    collect_vars(*s->second, out);
  } else if (const auto* c = std::get_if<Choice>(&r.node)) {
    collect_vars(*c->left, out);
    collect_vars(*c->right, out);
  } else {
    collect_vars(*std::get<Star>(r.node).body, out);
  }
}

/// Every variable read or written anywhere in r.
inline std::set<VarName> free_vars(const RCmd& r) {
  std::set<VarName> out;
  collect_vars(r, out);
  return out;
}

// ---------------------------------------------------------------------------
// Pretty printing (core surface syntax; parses back to the same tree)

inline std::string to_string(const AExp& a) {
  if (const auto* l = std::get_if<IntLit>(&a.node)) return std::to_string(l->value);
  if (const auto* v = std::get_if<VarRef>(&a.node)) return v->name;
  const auto& b = std::get<BinOp>(a.node);
  const char* op = b.op == AOp::Add ? " + " : b.op == AOp::Sub ? " - " : " * ";
  return "(" + to_string(*b.lhs) + op + to_string(*b.rhs) + ")";
}

inline std::string to_string(const BExp& b) {
  if (std::holds_alternative<BFalse>(b.node)) return "false";
  if (const auto* n = std::get_if<BNot>(&b.node)) {
    if (std::holds_alternative<BFalse>(n->arg->node)) return "true";
    return "not " + to_string(*n->arg);
  }
  if (const auto* a = std::get_if<BAnd>(&b.node))
    return "(" + to_string(*a->lhs) + " and " + to_string(*a->rhs) + ")";
  const auto& c = std::get<BCmp>(b.node);
  const char* op = c.op == CmpOp::Eq ? " = " : c.op == CmpOp::Ne ? " != " : c.op == CmpOp::Le ? " <= " : " < ";
  return to_string(*c.lhs) + op + to_string(*c.rhs);
}

inline std::string to_string(const ACmd& c) {
  if (std::holds_alternative<Skip>(c.node)) return "skip";
  if (std::holds_alternative<Error>(c.node)) return "error()";
  if (const auto* a = std::get_if<Assign>(&c.node)) return a->target + " := " + to_string(*a->expr);
  if (const auto* s = std::get_if<Assume>(&c.node)) return "assume(" + to_string(*s->cond) + ")";
  return std::get<Nondet>(c.node).target + " := nondet()";
}

inline std::string to_string(const RCmd& r) {
  if (const auto* a = std::get_if<Atom>(&r.node)) return to_string(a->cmd);
  if (const auto* s = std::get_if<Seq>(&r.node)) {
    // brace a nested sequence on the left so the parser's right-fold
    // reproduces the exact tree
    std::string first = std::holds_alternative<Seq>(s->first->node)
                            ? "{ " + to_string(*s->first) + " }"
                            : to_string(*s->first);
    return first + "; " + to_string(*s->second);
  }
  if (const auto* c = std::get_if<Choice>(&r.node))
    return "choice { " + to_string(*c->left) + " } or { " + to_string(*c->right) + " }";
  return "iter { " + to_string(*std::get<Star>(r.node).body) + " }";
}

inline std::string to_string(const Program& p) {
  std::string s = "vars";
  for (const auto& v : p.vars) s += " " + v;
  s += "; ";
  s += to_string(*p.body);
  return s;
}

// ---------------------------------------------------------------------------
// Lexer

namespace detail {

struct Token {
  enum Kind { Ident, Int, Sym, End } kind;
  std::string text;
  long long value = 0;
  int line = 1;
  int col = 1;
};

inline std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto bump = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i + k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    i += n;
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      bump(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') bump(1);
      continue;
    }
    int tl = line, tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      out.push_back({Token::Ident, src.substr(i, j - i), 0, tl, tc});
      bump(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      Token t{Token::Int, src.substr(i, j - i), 0, tl, tc};
      t.value = std::stoll(t.text);
      out.push_back(t);
      bump(j - i);
      continue;
    }
    static const char* two[] = {":=", "!=", "<=", ">=", "=>", "&&", "||"};
    bool matched = false;
    for (const char* s : two) {
      if (src.compare(i, 2, s) == 0) {
        out.push_back({Token::Sym, s, 0, tl, tc});
        bump(2);
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::string one = ";(){}+-*=<>.:!,";
    if (one.find(c) != std::string::npos) {
      out.push_back({Token::Sym, std::string(1, c), 0, tl, tc});
      bump(1);
      continue;
    }
    throw ParseError(std::string("unexpected character '") + c + "'", tl, tc);
  }
  out.push_back({Token::End, "", 0, line, col});
  return out;
}

// Token cursor with backtracking support.
class Cursor {
public:
  explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

  const Token& peek() const { return toks_[pos_]; }
  const Token& next() { return toks_[pos_++]; }
  std::size_t mark() const { return pos_; }
  void reset(std::size_t m) { pos_ = m; }

  bool at_sym(const std::string& s) const { return peek().kind == Token::Sym && peek().text == s; }
  bool at_kw(const std::string& s) const { return peek().kind == Token::Ident && peek().text == s; }

  bool eat_sym(const std::string& s) {
    if (!at_sym(s)) return false;
    ++pos_;
    return true;
  }
  bool eat_kw(const std::string& s) {
    if (!at_kw(s)) return false;
    ++pos_;
    return true;
  }
  void expect_sym(const std::string& s) {
    if (!eat_sym(s)) fail("expected '" + s + "'");
  }
  void expect_kw(const std::string& s) {
    if (!eat_kw(s)) fail("expected '" + s + "'");
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const Token& t = peek();
    std::string got = t.kind == Token::End ? "end of input" : "'" + t.text + "'";
    throw ParseError(msg + ", got " + got, t.line, t.col);
  }

private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
};

inline const std::set<std::string>& keywords() {
  static const std::set<std::string> kw = {"vars",  "skip", "assume", "error",  "if",  "else", "while",
                                           "choice", "or",   "iter",   "nondet", "and", "not",  "true",
                                           "false", "exists", "ok",    "er"};
  return kw;
}

class ExprParser {
public:
  ExprParser(Cursor& cur, const std::set<VarName>* declared) : cur_(cur), declared_(declared) {}

  AExpPtr aexp() {
    AExpPtr l = term();
    while (cur_.at_sym("+") || cur_.at_sym("-")) {
      AOp op = cur_.next().text == "+" ? AOp::Add : AOp::Sub;
      l = binop(op, l, term());
    }
    return l;
  }

  BExpPtr bexp() { return or_expr(); }

  BExpPtr comparison() {
    AExpPtr l = aexp();
    // >, >= normalize to the core ops by swapping operands
    if (cur_.eat_sym("=")) return bcmp(CmpOp::Eq, l, aexp());
    if (cur_.eat_sym("!=")) return bcmp(CmpOp::Ne, l, aexp());
    if (cur_.eat_sym("<=")) return bcmp(CmpOp::Le, l, aexp());
    if (cur_.eat_sym("<")) return bcmp(CmpOp::Lt, l, aexp());
    if (cur_.eat_sym(">=")) return bcmp(CmpOp::Le, aexp(), l);
    if (cur_.eat_sym(">")) return bcmp(CmpOp::Lt, aexp(), l);
    cur_.fail("expected comparison operator");
  }

private:
  AExpPtr term() {
    AExpPtr l = factor();
    while (cur_.at_sym("*")) {
      cur_.next();
      l = binop(AOp::Mul, l, factor());
    }
    return l;
  }

  AExpPtr factor() {
    if (cur_.eat_sym("-")) {
      // fold negated literals, otherwise 0 - e
      AExpPtr f = factor();
      if (const auto* i = std::get_if<IntLit>(&f->node)) return lit(-i->value);
      return binop(AOp::Sub, lit(0), f);
    }
    if (cur_.peek().kind == Token::Int) return lit(cur_.next().value);
    if (cur_.eat_sym("(")) {
      AExpPtr e = aexp();
      cur_.expect_sym(")");
      return e;
    }
    if (cur_.peek().kind == Token::Ident && !keywords().count(cur_.peek().text)) {
      const Token& t = cur_.next();
      check_var(t);
      return var(t.text);
    }
    cur_.fail("expected arithmetic expression");
  }

  BExpPtr or_expr() {
    BExpPtr l = and_expr();
    while (cur_.at_kw("or") || cur_.at_sym("||")) {
      cur_.next();
      l = bor(l, and_expr());
    }
    return l;
  }

  BExpPtr and_expr() {
    BExpPtr l = not_expr();
    while (cur_.at_kw("and") || cur_.at_sym("&&")) {
      cur_.next();
      l = band(l, not_expr());
    }
    return l;
  }

  BExpPtr not_expr() {
    if (cur_.eat_kw("not") || cur_.eat_sym("!")) return bnot(not_expr());
    return batom();
  }

  BExpPtr batom() {
    if (cur_.eat_kw("true")) return btrue();
    if (cur_.eat_kw("false")) return bfalse();
    if (cur_.at_sym("(")) {
      // either a parenthesized boolean or the lhs of a comparison
      std::size_t m = cur_.mark();
      cur_.next();
      try {
        BExpPtr b = or_expr();
        cur_.expect_sym(")");
        return b;
      } catch (const ParseError&) {
        cur_.reset(m);
      }
      return comparison();
    }
    return comparison();
  }

  void check_var(const Token& t) const {
    if (declared_ && !declared_->count(t.text))
      throw ParseError("use of undeclared variable '" + t.text + "'", t.line, t.col);
  }

  Cursor& cur_;
  const std::set<VarName>* declared_;
};

class ProgramParser {
public:
  ProgramParser(Cursor& cur, const std::set<VarName>& declared) : cur_(cur), declared_(declared), ep_(cur, &declared_) {}

  RCmdPtr stmt() {
    RCmdPtr r = basic();
    std::vector<RCmdPtr> parts{r};
    while (cur_.eat_sym(";")) {
      if (cur_.at_sym("}") || cur_.peek().kind == Token::End) break;  // tolerate trailing ;
      parts.push_back(basic());
    }
    // right-fold: a; b; c  ==  Seq(a, Seq(b, c))
    RCmdPtr out = parts.back();
    for (std::size_t i = parts.size() - 1; i-- > 0;) out = seq(parts[i], out);
    return out;
  }

private:
  RCmdPtr basic() {
    if (cur_.eat_kw("skip")) return skip();
    if (cur_.eat_kw("error")) {
      cur_.expect_sym("(");
      cur_.expect_sym(")");
      return error_cmd();
    }
    if (cur_.eat_kw("assume")) {
      cur_.expect_sym("(");
      BExpPtr b = ep_.bexp();
      cur_.expect_sym(")");
      return assume(b);
    }
    if (cur_.eat_kw("if")) {
      cur_.expect_sym("(");
      BExpPtr b = ep_.bexp();
      cur_.expect_sym(")");
      RCmdPtr r1 = block();
      RCmdPtr r2 = cur_.eat_kw("else") ? block() : skip();
      return if_then_else(b, r1, r2);
    }
    if (cur_.eat_kw("while")) {
      cur_.expect_sym("(");
      BExpPtr b = ep_.bexp();
      cur_.expect_sym(")");
      return while_loop(b, block());
    }
    if (cur_.eat_kw("choice")) {
      RCmdPtr l = block();
      cur_.expect_kw("or");
      return choice(l, block());
    }
    if (cur_.eat_kw("iter")) return star(block());
    if (cur_.at_sym("{")) return block();
    if (cur_.peek().kind == Token::Ident && !keywords().count(cur_.peek().text)) {
      const Token& t = cur_.next();
      if (!declared_.count(t.text))
        throw ParseError("use of undeclared variable '" + t.text + "'", t.line, t.col);
      cur_.expect_sym(":=");
      if (cur_.eat_kw("nondet")) {
        cur_.expect_sym("(");
        cur_.expect_sym(")");
        return nondet(t.text);
      }
      return assign(t.text, ep_.aexp());
    }
    cur_.fail("expected statement");
  }

  RCmdPtr block() {
    cur_.expect_sym("{");
    RCmdPtr r = stmt();
    cur_.expect_sym("}");
    return r;
  }

  Cursor& cur_;
  std::set<VarName> declared_;
  ExprParser ep_;
};

}  // namespace detail

/// Parses a full program: `vars x y; <stmt>`. Throws ParseError with source
/// position on malformed input or use of an undeclared variable.
inline Program parse_program(const std::string& text) {
  detail::Cursor cur(detail::lex(text));
  cur.expect_kw("vars");
  std::vector<VarName> vars;
  std::set<VarName> seen;
  while (cur.peek().kind == detail::Token::Ident && !detail::keywords().count(cur.peek().text)) {
    const detail::Token& t = cur.next();
    if (!seen.insert(t.text).second)
      throw ParseError("duplicate variable '" + t.text + "'", t.line, t.col);
    vars.push_back(t.text);
  }
  if (vars.empty()) cur.fail("expected at least one variable name");
  cur.expect_sym(";");
  detail::ProgramParser pp(cur, seen);
  RCmdPtr body = pp.stmt();
  if (cur.peek().kind != detail::Token::End) cur.fail("trailing input after program");
  return Program{std::move(vars), std::move(body)};
}

/// Parses a statement in isolation against a known variable set (used when
/// reloading serialized derivations).
inline RCmdPtr parse_rcmd(const std::string& text, const std::set<VarName>& vars) {
  detail::Cursor cur(detail::lex(text));
  detail::ProgramParser pp(cur, vars);
  RCmdPtr body = pp.stmt();
  if (cur.peek().kind != detail::Token::End) cur.fail("trailing input after command");
  return body;
}

/// Parses a boolean expression in isolation.
inline BExpPtr parse_bexp(const std::string& text, const std::set<VarName>& vars) {
  detail::Cursor cur(detail::lex(text));
  detail::ExprParser ep(cur, &vars);
  BExpPtr b = ep.bexp();
  if (cur.peek().kind != detail::Token::End) cur.fail("trailing input after expression");
  return b;
}

}  // namespace uturn

#endif
