// lgt: run, type-check and verify lambda-GT programs; emit DOT renderings.
//
// Exit codes: 0 success, 1 diagnosed domain error (type error, verification
// failure, runtime error), 2 usage/parse/IO error.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "lgt/dot.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw lgt::LgtError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct LoadedProgram {
  lgt::Program program;
  lgt::Grammar grammar;
};

// Grammar may live in the program file or in a separate --types file; the
// separate file wins on conflict.
LoadedProgram load(const std::string& inputPath, const std::string& typesPath) {
  LoadedProgram out;
  out.program = lgt::parse_program(read_file(inputPath));
  std::vector<lgt::ProductionRule> rules = out.program.typeDefs;
  if (!typesPath.empty()) {
    lgt::Program tp = lgt::parse_program(read_file(typesPath));
    std::set<std::string> heads;
    for (auto& r : tp.typeDefs) heads.insert(r.head);
    std::vector<lgt::ProductionRule> kept;
    for (auto& r : rules) {
      if (heads.count(r.head)) {
        std::cerr << "warning: type " << r.head << " in " << inputPath
                  << " overridden by " << typesPath << "\n";
        continue;
      }
      kept.push_back(r);
    }
    rules = std::move(kept);
    for (auto& r : tp.typeDefs) rules.push_back(r);
  }
  out.grammar = lgt::load_grammar(rules);
  return out;
}

int checked_grammar(const lgt::Grammar& g, lgt::VerifierGrammar& ver) {
  auto v = lgt::validate_grammar(g);
  for (auto& m : v) std::cerr << "error: " << m << "\n";
  if (!v.empty()) return 1;
  auto rc = lgt::check_root_constraints(g);
  for (auto& m : rc) std::cerr << "error: " << m << "\n";
  if (!rc.empty()) return 1;
  std::string err;
  ver = lgt::eliminate_fusions_all(g, &err);
  if (!err.empty()) {
    std::cerr << "error: " << err << "\n";
    return 1;
  }
  return 0;
}

int cmd_run(const std::string& input, const std::string& types, long fuel, bool trace,
            int depth) {
  LoadedProgram lp = load(input, types);
  if (!lp.program.main) throw lgt::LgtError(input + " has no main expression");
  lgt::VerifierGrammar ver;
  if (!lp.grammar.rules.empty()) {
    if (int rc = checked_grammar(lp.grammar, ver)) return rc;
  } else {
    ver = lgt::eliminate_fusions_all(lp.grammar);
  }
  lgt::VerifyConfig cfg;
  cfg.depthLimit = depth;
  lgt::EvalResult r = lgt::eval(lp.program.main, lp.grammar, ver, fuel, trace, cfg);
  if (trace)
    for (auto& [rule, e] : r.trace)
      if (rule != "init") std::cout << rule << " ⊢ " << lgt::pretty(e) << "\n";
  if (r.value) {
    std::cout << lgt::pretty(r.value) << "\n";
    return 0;
  }
  std::cerr << "error: " << r.reason << "\n";
  return 1;
}

int cmd_typecheck(const std::string& input, const std::string& types, int depth) {
  LoadedProgram lp = load(input, types);
  if (!lp.program.main) throw lgt::LgtError(input + " has no main expression");
  lgt::VerifierGrammar ver;
  if (int rc = checked_grammar(lp.grammar, ver)) return rc;
  lgt::VerifyConfig cfg;
  cfg.depthLimit = depth;
  try {
    lgt::TypeAtomPtr ty = lgt::type_of_expr(lgt::TypingContext{}, lp.grammar, ver,
                                            lgt::expand_expr(lp.program.main), cfg);
    std::cout << lgt::pretty(ty) << "\n";
    return 0;
  } catch (lgt::TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_verify(const std::string& input, const std::string& types, const std::string& goalText,
               int depth, bool trace, int oracleDepth) {
  LoadedProgram lp = load(input, types);
  lgt::VerifierGrammar ver;
  if (int rc = checked_grammar(lp.grammar, ver)) return rc;
  auto [tmpl, goal] = lgt::parse_goal(goalText);
  if (goal->is_arrow()) throw lgt::LgtError("verification goal must be a type variable atom");
  if (!lp.grammar.defined(goal->var, static_cast<int>(goal->links.size()))) {
    std::cerr << "error: goal type " << goal->var << "/" << goal->links.size()
              << " is not defined\n";
    return 1;
  }
  lgt::VerifyConfig cfg;
  cfg.depthLimit = depth;
  cfg.trace = trace;
  lgt::CheckGraphResult res;
  bool ok = lgt::check_template(lgt::TypingContext{}, lp.grammar, ver,
                                lgt::expand_term_notation(tmpl), goal, cfg, &res);
  if (trace)
    for (auto& line : res.trace) std::cout << line << "\n";
  std::cout << (ok ? "ACCEPT" : "REJECT") << "\n";
  if (!ok && !res.diag.empty()) std::cerr << res.diag << "\n";

  if (oracleDepth > 0 && !lgt::has_context(tmpl) && !lgt::has_abstraction(tmpl)) {
    auto lang = lgt::generate(lp.grammar, goal, oracleDepth);
    bool member = lgt::generated_member(lang, lgt::flatten(tmpl));
    if (member && !ok) {
      std::cerr << "oracle disagreement: graph is derivable within depth " << oracleDepth
                << " but was rejected\n";
      return 1;
    }
    std::cout << "oracle: " << (member ? "derivable" : "not derivable") << " within depth "
              << oracleDepth << "\n";
  }
  return ok ? 0 : 1;
}

int cmd_dot(const std::string& input, const std::string& types, long fuel, bool trace,
            int depth) {
  LoadedProgram lp = load(input, types);
  if (!lp.program.main) throw lgt::LgtError(input + " has no main expression");
  if (trace) {
    lgt::VerifierGrammar ver = lgt::eliminate_fusions_all(lp.grammar);
    lgt::VerifyConfig cfg;
    cfg.depthLimit = depth;
    lgt::EvalResult r = lgt::eval(lp.program.main, lp.grammar, ver, fuel, true, cfg);
    std::cout << lgt::dot_of_trace(r.trace);
    if (!r.value) {
      std::cerr << "error: " << r.reason << "\n";
      return 1;
    }
    return 0;
  }
  if (lp.program.main->kind != lgt::ExprKind::Graph)
    throw lgt::LgtError("input is not a plain graph; use --trace to render evaluation");
  std::cout << lgt::dot_of_value(lgt::expand_term_deep(lp.program.main->graph));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"lambda-GT interpreter, type checker and verifier"};
  app.require_subcommand(1);

  std::string input, types, goal;
  long fuel = 1000000;
  int depth = 64;
  int oracleDepth = 0;
  bool trace = false;

  auto addCommon = [&](CLI::App* c, bool needsInput = true) {
    if (needsInput) c->add_option("input", input, "input .lgt file")->required();
    c->add_option("--types", types, "separate type-definition file");
    c->add_option("--fuel", fuel, "evaluation step budget")->check(CLI::PositiveNumber);
    c->add_option("--depth", depth, "verifier recursion bound")->check(CLI::PositiveNumber);
    c->add_flag("--trace", trace, "emit a step/proof trace");
  };

  CLI::App* run = app.add_subcommand("run", "evaluate a program and print its value");
  addCommon(run);
  CLI::App* tc = app.add_subcommand("typecheck", "type-check a fully annotated program");
  addCommon(tc);
  CLI::App* ver = app.add_subcommand("verify", "check a verification goal T : tau(X...)");
  addCommon(ver);
  ver->add_option("--goal", goal, "goal \"<template> : <type atom>\"")->required();
  ver->add_option("--with-oracle", oracleDepth, "cross-check against generate up to this depth")
      ->check(CLI::PositiveNumber);
  CLI::App* dot = app.add_subcommand("dot", "emit DOT for a value or a trace");
  addCommon(dot);

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(input, types, fuel, trace, depth);
    if (tc->parsed()) return cmd_typecheck(input, types, depth);
    if (ver->parsed()) return cmd_verify(input, types, goal, depth, trace, oracleDepth);
    if (dot->parsed()) return cmd_dot(input, types, fuel, trace, depth);
  } catch (lgt::ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (lgt::TypeError& e) {
    std::cerr << "type error: " << e.what() << "\n";
    return 1;
  } catch (lgt::LgtError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
