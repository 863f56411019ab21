// Command-line front end: parse -> forward IL -> U-Turn (or SIL -> Turn-U),
// with validity checking, JSON persistence, and a two-column report.
//
// Exit codes: 0 ok, 1 parse error, 2 budget exceeded, 3 algorithm
// precondition violated, 4 proof-check failure.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "uturn/assertions.hpp"
#include "uturn/axioms.hpp"
#include "uturn/errors.hpp"
#include "uturn/il.hpp"
#include "uturn/json_io.hpp"
#include "uturn/lang.hpp"
#include "uturn/render.hpp"
#include "uturn/semantics.hpp"
#include "uturn/sil.hpp"
#include "uturn/state.hpp"
#include "uturn/uturn.hpp"

namespace {

using namespace uturn;

struct CommonOpts {
  long long modulus = 32;
  int unroll = 10;
  std::string branch = "both";
  std::uint64_t seed = 0;
  int max_disjuncts = 64;
  std::string emit;
  std::string format = "text";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--modulus", o.modulus, "value modulus M (values in [-M/2, M/2-1])");
  cmd->add_option("--unroll", o.unroll, "maximum loop unrollings");
  cmd->add_option("--branch-policy", o.branch, "both|left|right|random")
      ->check(CLI::IsMember({"both", "left", "right", "random"}));
  cmd->add_option("--seed", o.seed, "seed for the random branch policy");
  cmd->add_option("--max-disjuncts", o.max_disjuncts, "cap on disjunctive splits");
  cmd->add_option("--emit-derivation", o.emit, "write the proof tree as JSON to this path");
  cmd->add_option("--format", o.format, "text|json")->check(CLI::IsMember({"text", "json"}));
}

Heuristics make_heuristics(const CommonOpts& o) {
  Heuristics h;
  h.max_unroll = o.unroll;
  h.seed = o.seed;
  h.max_disjuncts = o.max_disjuncts;
  h.branch_policy = o.branch == "both"    ? BranchPolicy::Both
                    : o.branch == "left"  ? BranchPolicy::Left
                    : o.branch == "right" ? BranchPolicy::Right
                                          : BranchPolicy::Random;
  return h;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open file: " + path, 0, 0);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write file: " + path, 0, 0);
  out << content;
}

void collect_literals(const AExp& a, std::vector<long long>& out) {
  if (const auto* l = std::get_if<IntLit>(&a.node)) out.push_back(l->value);
  if (const auto* b = std::get_if<BinOp>(&a.node)) {
    collect_literals(*b->lhs, out);
    collect_literals(*b->rhs, out);
  }
}
void collect_literals(const BExp& b, std::vector<long long>& out) {
  if (const auto* n = std::get_if<BNot>(&b.node)) collect_literals(*n->arg, out);
  if (const auto* c = std::get_if<BAnd>(&b.node)) {
    collect_literals(*c->lhs, out);
    collect_literals(*c->rhs, out);
  }
  if (const auto* m = std::get_if<BCmp>(&b.node)) {
    collect_literals(*m->lhs, out);
    collect_literals(*m->rhs, out);
  }
}
void collect_literals(const RCmd& r, std::vector<long long>& out) {
  if (const auto* a = std::get_if<Atom>(&r.node)) {
    if (const auto* as = std::get_if<Assign>(&a->cmd.node)) collect_literals(*as->expr, out);
    if (const auto* s = std::get_if<Assume>(&a->cmd.node)) collect_literals(*s->cond, out);
  } else if (const auto* s = std::get_if<Seq>(&r.node)) {
    collect_literals(*s->first, out);
    collect_literals(*s->second, out);
  } else if (const auto* c = std::get_if<Choice>(&r.node)) {
    collect_literals(*c->left, out);
    collect_literals(*c->right, out);
  } else {
    collect_literals(*std::get<Star>(r.node).body, out);
  }
}

void warn_out_of_range(const Program& prog, const Universe& u) {
  std::vector<long long> lits;
  collect_literals(*prog.body, lits);
  for (long long n : lits)
    if (!u.in_range(n))
      std::cerr << "warning: literal " << n << " is outside the representative range ["
                << u.lo() << ", " << u.hi() << "] and wraps around\n";
}

struct Loaded {
  Program prog;
  Universe universe;
};

Loaded load_program(const std::string& path, const CommonOpts& o) {
  Program prog = parse_program(read_file(path));
  Universe u(o.modulus, prog.vars);
  warn_out_of_range(prog, u);
  return Loaded{std::move(prog), std::move(u)};
}

std::set<VarName> var_set(const Program& p) { return {p.vars.begin(), p.vars.end()}; }

void print_triple(const CommonOpts& o, const AssertPtr& pre, const AssertPtr& post, const Universe& u) {
  if (o.format == "json") {
    json j{{"pre", to_json(*pre)}, {"post", to_json(*post)},
           {"pre_text", describe(extension(pre, u), u)}, {"post_text", describe(extension(post, u), u)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << "pre:  " << describe(extension(pre, u), u) << "\n";
    std::cout << "post: " << describe(extension(post, u), u) << "\n";
  }
}

json wrap_tree(const Universe& u, const char* key, json tree) {
  return {{"vars", u.vars()}, {"modulus", u.modulus()}, {key, std::move(tree)}};
}

int cmd_analyze(const std::string& file, const std::string& pre_text, const CommonOpts& o) {
  Loaded l = load_program(file, o);
  AssertPtr pre = parse_assertion(pre_text, var_set(l.prog));
  ILDerivPtr d = synthesize_forward(pre, l.prog.body, make_heuristics(o), l.universe);
  print_triple(o, d->triple.pre, d->triple.post, l.universe);
  if (!o.emit.empty()) write_file(o.emit, wrap_tree(l.universe, "il", to_json(*d)).dump(2) + "\n");
  return 0;
}

int cmd_sil(const std::string& file, const std::string& post_text, const CommonOpts& o) {
  Loaded l = load_program(file, o);
  AssertPtr post = parse_assertion(post_text, var_set(l.prog));
  SILDerivPtr d = synthesize_backward(l.prog.body, post, make_heuristics(o), l.universe);
  print_triple(o, d->triple.pre, d->triple.post, l.universe);
  if (!o.emit.empty()) write_file(o.emit, wrap_tree(l.universe, "sil", to_json(*d)).dump(2) + "\n");
  return 0;
}

int cmd_uturn(const std::string& file, const std::string& pre_text, const std::string& post_text,
              const std::string& load, const CommonOpts& o) {
  ILDerivPtr d;
  Universe u(2, {"x"});
  std::set<VarName> vars;
  if (!load.empty()) {
    json j = json::parse(read_file(load), nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON in " + load, 0, 0);
    std::vector<VarName> vs = j.at("vars").get<std::vector<VarName>>();
    u = Universe(j.at("modulus").get<long long>(), vs);
    vars = {vs.begin(), vs.end()};
    // accept files written by `analyze` ({.., il}) or `uturn` ({.., uturn: {il, replay}})
    const json& tree = j.contains("il") ? j.at("il") : j.at("uturn").at("il");
    d = il_derivation_from_json(tree, u);
    check_il_derivation(*d, u);  // CheckError -> exit 4
  } else {
    Loaded l = load_program(file, o);
    u = l.universe;
    vars = var_set(l.prog);
    AssertPtr pre = parse_assertion(pre_text, vars);
    d = synthesize_forward(pre, l.prog.body, make_heuristics(o), u);
  }
  AssertPtr target = parse_assertion(post_text, vars);
  auto [pp, ud] = run_uturn(d, target, u);
  check_uturn_derivation(ud, u);
  if (o.format == "json") {
    json j{{"pre", to_json(*pp)}, {"pre_text", describe(extension(pp, u), u)},
           {"post_text", describe(extension(target, u), u)}};
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << render_uturn(ud, u);
    std::cout << "sufficient pre: " << describe(extension(pp, u), u) << "\n";
  }
  if (!o.emit.empty()) write_file(o.emit, wrap_tree(u, "uturn", to_json(ud)).dump(2) + "\n");
  return 0;
}

int cmd_turnu(const std::string& file, const std::string& pre_text, const std::string& post_text,
              const CommonOpts& o) {
  Loaded l = load_program(file, o);
  std::set<VarName> vars = var_set(l.prog);
  AssertPtr post = parse_assertion(post_text, vars);
  SILDerivPtr d = synthesize_backward(l.prog.body, post, make_heuristics(o), l.universe);
  AssertPtr source = parse_assertion(pre_text, vars);
  auto [qp, td] = run_turnu(d, source, l.universe);
  std::cout << "derived post: " << describe(extension(qp, l.universe), l.universe) << "\n";
  if (!o.emit.empty())
    write_file(o.emit, wrap_tree(l.universe, "turnu", to_json(td)).dump(2) + "\n");
  return 0;
}

int cmd_check(const std::string& pre_text, const std::string& file, const std::string& post_text,
              bool sil_mode, const std::string& judgment_file, const CommonOpts& o) {
  if (!judgment_file.empty()) {
    json j = json::parse(read_file(judgment_file), nullptr, false);
    if (j.is_discarded()) throw ParseError("malformed JSON in " + judgment_file, 0, 0);
    std::vector<VarName> vs = j.at("vars").get<std::vector<VarName>>();
    Universe u(j.at("modulus").get<long long>(), vs);
    UTurnDerivation ud = uturn_derivation_from_json(j.at("uturn"), u);
    UTurnJudgment jd = check_uturn_derivation(ud, u);  // CheckError -> exit 4
    int v = judgment_violation(jd, u);
    for (int c = 1; c <= 4; ++c)
      std::cout << "condition " << c << ": " << (v == c ? "violated" : "holds") << "\n";
    if (v != 0) throw CheckError({}, "judgment condition " + std::to_string(v) + " violated");
    std::cout << "judgment valid\n";
    return 0;
  }
  Loaded l = load_program(file, o);
  std::set<VarName> vars = var_set(l.prog);
  AssertPtr pre = parse_assertion(pre_text, vars);
  AssertPtr post = parse_assertion(post_text, vars);
  const Universe& u = l.universe;
  StateSet lhs = sil_mode ? extension(pre, u) : extension(post, u);
  StateSet rhs = sil_mode ? bwsem(*l.prog.body, extension(post, u), u)
                          : fwsem(*l.prog.body, extension(pre, u), u);
  if (lhs.subset_of(rhs)) {
    std::cout << (sil_mode ? "sil: valid\n" : "il: valid\n");
    return 0;
  }
  StateSet witness = set_minus(lhs, rhs);
  std::uint64_t first = 0;
  bool found = false;
  witness.for_each([&](std::uint64_t i) {
    if (!found) {
      first = i;
      found = true;
    }
  });
  std::cout << (sil_mode ? "sil: invalid" : "il: invalid") << ", counterexample "
            << to_string(state_at(first, u), u) << "\n";
  throw CheckError({}, "triple is not valid");
}

int cmd_axiom(const std::string& cmd_text, const std::string& pre_text, const std::string& post_text,
              const std::vector<std::string>& vars, const CommonOpts& o) {
  if (vars.empty()) throw ParseError("--vars requires at least one variable name", 0, 0);
  Universe u(o.modulus, vars);
  std::set<VarName> vs(vars.begin(), vars.end());
  RCmdPtr rc = parse_rcmd(cmd_text, vs);
  const auto* a = std::get_if<Atom>(&rc->node);
  if (!a) throw ParseError("axiom requires an atomic command", 0, 0);
  AssertPtr P = parse_assertion(pre_text, vs);
  AssertPtr Q = parse_assertion(post_text, vs);
  ILTriple t = combined_axiom(a->cmd, P, Q);
  std::cout << "< " << to_string(*t.pre) << " >  " << to_string(*rc) << "  < " << to_string(*t.post)
            << " >\n";
  bool ok = verify_schema_validity(a->cmd, P, Q, u);
  std::cout << "valid in both IL and SIL: " << (ok ? "yes" : "no") << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"two-pass incorrectness analyzer for regular commands"};
  app.require_subcommand(1);

  CommonOpts o;
  std::string file, pre = "ok: true", post = "ok: true", load, judgment;
  bool sil_mode = false, il_mode = false;
  std::vector<std::string> vars;

  CLI::App* analyze = app.add_subcommand("analyze", "forward IL pass");
  analyze->add_option("program", file, "program file")->required();
  analyze->add_option("--pre", pre, "initial assertion");
  add_common(analyze, o);

  CLI::App* sil = app.add_subcommand("sil", "backward SIL pass");
  sil->add_option("program", file, "program file")->required();
  sil->add_option("--post", post, "target assertion");
  add_common(sil, o);

  CLI::App* ut = app.add_subcommand("uturn", "forward pass then backward replay");
  ut->add_option("program", file, "program file");
  ut->add_option("--pre", pre, "initial assertion for the forward pass");
  ut->add_option("--post", post, "target subset of the derived post")->required();
  ut->add_option("--load", load, "load the IL derivation from a JSON file instead");
  add_common(ut, o);

  CLI::App* tu = app.add_subcommand("turnu", "backward pass then forward replay");
  tu->add_option("program", file, "program file")->required();
  tu->add_option("--post", post, "target assertion for the backward pass");
  tu->add_option("--pre", pre, "source subset of the derived pre")->required();
  add_common(tu, o);

  CLI::App* chk = app.add_subcommand("check", "validity checks");
  chk->add_flag("--il", il_mode, "check IL validity (default)");
  chk->add_flag("--sil", sil_mode, "check SIL validity");
  chk->add_option("--judgment", judgment, "check a serialized replay file instead");
  chk->add_option("pre", pre, "precondition");
  chk->add_option("program", file, "program file");
  chk->add_option("post", post, "postcondition");
  add_common(chk, o);

  CLI::App* ax = app.add_subcommand("axiom", "print the combined axiom for an atom");
  ax->add_option("command", file, "atomic command text")->required();
  ax->add_option("--pre", pre, "P");
  ax->add_option("--post", post, "Q");
  ax->add_option("--vars", vars, "universe variables");
  add_common(ax, o);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return cmd_analyze(file, pre, o);
    if (*sil) return cmd_sil(file, post, o);
    if (*ut) return cmd_uturn(file, pre, post, load, o);
    if (*tu) return cmd_turnu(file, pre, post, o);
    if (*chk) {
      if (judgment.empty() && file.empty())
        throw ParseError("check requires a program or a --judgment file", 0, 0);
      (void)il_mode;
      return cmd_check(pre, file, post, sil_mode, judgment, o);
    }
    return cmd_axiom(file, pre, post, vars, o);
  } catch (const uturn::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  } catch (const uturn::BudgetError& e) {
    std::cerr << "budget exceeded: " << e.what() << "\n";
    return 2;
  } catch (const uturn::PreconditionError& e) {
    std::cerr << "precondition violated: " << e.what() << "\n";
    return 3;
  } catch (const uturn::CheckError& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 4;
  } catch (const uturn::json::exception& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 1;
  }
}
