#pragma once

// Call-by-value small-step semantics: Rd-Case1/Rd-Case2/Rd-Beta under the
// leftmost-innermost evaluation contexts, with a fuel bound.

#include "lgt/matcher.hpp"

namespace lgt {

inline bool is_value(const ExprPtr& e) {
  return e->kind == ExprKind::Graph && !has_context(e->graph);
}

enum class StepKind { Stepped, Value, Stuck };

struct StepResult {
  StepKind kind = StepKind::Stuck;
  ExprPtr next;        // Stepped
  TermPtr value;       // Value
  std::string reason;  // Stuck
  std::string rule;    // Rd-Beta / Rd-Case1 / Rd-Case2
};

namespace edetail {

// a value usable as an operator must be a single abstraction atom
inline AbsPtr value_abstraction(const TermPtr& t) {
  FlatGraph f = flatten(t);
  canonicalize(f);
  if (f.items.size() == 1 && f.items[0].is_abs()) return f.items[0].abs;
  return nullptr;
}

inline bool pattern_fully_annotated(const TermPtr& pat) {
  FlatGraph f = flatten(pat);
  for (auto& it : f.items)
    if (it.kind == ItemKind::Ctx && !it.type) return false;
  return true;
}

}  // namespace edetail

inline StepResult step(const ExprPtr& e, const Grammar& orig, const VerifierGrammar& ver,
                       const VerifyConfig& cfg = {}) {
  switch (e->kind) {
    case ExprKind::Graph: {
      if (has_context(e->graph)) {
        StepResult r;
        r.kind = StepKind::Stuck;
        r.reason = "template with unbound graph contexts: " + pretty(e->graph);
        return r;
      }
      StepResult r;
      r.kind = StepKind::Value;
      r.value = e->graph;
      return r;
    }
    case ExprKind::App: {
      if (!is_value(e->fn)) {
        StepResult inner = step(e->fn, orig, ver, cfg);
        if (inner.kind == StepKind::Stepped) inner.next = expr_app(inner.next, e->arg);
        if (inner.kind == StepKind::Value) {
          StepResult r;
          r.kind = StepKind::Stuck;
          r.reason = "operator did not reduce to a value";
          return r;
        }
        return inner;
      }
      if (!is_value(e->arg)) {
        StepResult inner = step(e->arg, orig, ver, cfg);
        if (inner.kind == StepKind::Stepped) inner.next = expr_app(e->fn, inner.next);
        if (inner.kind == StepKind::Value) {
          StepResult r;
          r.kind = StepKind::Stuck;
          r.reason = "operand did not reduce to a value";
          return r;
        }
        return inner;
      }
      AbsPtr abs = edetail::value_abstraction(e->fn->graph);
      if (!abs) {
        StepResult r;
        r.kind = StepKind::Stuck;
        r.reason = "applying a non-abstraction value: " + pretty(e->fn->graph);
        return r;
      }
      std::set<LinkName> argFn = free_names(e->arg->graph);
      std::set<LinkName> param(abs->paramLinks.begin(), abs->paramLinks.end());
      if (argFn != param) {
        StepResult r;
        r.kind = StepKind::Stuck;
        std::ostringstream os;
        os << "free links of the argument do not equal the parameter links of $" << abs->param
           << ": argument " << pretty(e->arg->graph);
        r.reason = os.str();
        return r;
      }
      StepResult r;
      r.kind = StepKind::Stepped;
      r.rule = "Rd-Beta";
      r.next = graph_substitute(abs->body, e->arg->graph,
                                CtxTarget{abs->param, abs->paramLinks});
      return r;
    }
    case ExprKind::Case: {
      if (!is_value(e->scrut)) {
        StepResult inner = step(e->scrut, orig, ver, cfg);
        if (inner.kind == StepKind::Stepped)
          inner.next = expr_case(inner.next, e->pattern, e->thenBranch, e->elseBranch);
        if (inner.kind == StepKind::Value) {
          StepResult r;
          r.kind = StepKind::Stuck;
          r.reason = "scrutinee did not reduce to a value";
          return r;
        }
        return inner;
      }
      std::optional<GroundSubst> th;
      if (edetail::pattern_fully_annotated(e->pattern)) {
        th = match_checked(e->scrut->graph, e->pattern, orig, ver, cfg);
      } else {
        auto all = match_template(e->scrut->graph, e->pattern, 1);
        if (!all.empty()) th = all.front();
      }
      StepResult r;
      r.kind = StepKind::Stepped;
      if (th) {
        r.rule = "Rd-Case1";
        ExprPtr acc = e->thenBranch;
        for (auto& [f, b] : *th)
          acc = graph_substitute(acc, b.graph, CtxTarget{f.name, b.formals});
        r.next = acc;
      } else {
        r.rule = "Rd-Case2";
        r.next = e->elseBranch;
      }
      return r;
    }
  }
  StepResult r;
  r.reason = "unreachable";
  return r;
}

struct EvalResult {
  TermPtr value;
  bool stuck = false;
  bool fuelExhausted = false;
  std::string reason;
  long stepsTaken = 0;
  std::vector<std::pair<std::string, ExprPtr>> trace;  // (rule, result expr)
};

inline EvalResult eval(const ExprPtr& program, const Grammar& orig, const VerifierGrammar& ver,
                       long fuel = 1000000, bool traceOn = false,
                       const VerifyConfig& cfg = {}) {
  EvalResult out;
  ExprPtr e = expand_expr(program);
  { // closedness: ff(e) must be empty
    auto ff = free_functors(e);
    if (!ff.empty()) {
      out.stuck = true;
      out.reason = "program is not closed: free context $" + ff.begin()->name + "/" +
                   std::to_string(ff.begin()->arity);
      return out;
    }
  }
  if (traceOn) out.trace.push_back({"init", e});
  for (long used = 0; used < fuel; used++) {
    StepResult r = step(e, orig, ver, cfg);
    switch (r.kind) {
      case StepKind::Value:
        out.value = r.value;
        out.stepsTaken = used;
        return out;
      case StepKind::Stuck:
        out.stuck = true;
        out.reason = r.reason;
        out.stepsTaken = used;
        return out;
      case StepKind::Stepped:
        e = r.next;
        if (traceOn) out.trace.push_back({r.rule, e});
        break;
    }
  }
  out.fuelExhausted = true;
  out.reason = "fuel exhausted after " + std::to_string(fuel) + " steps";
  return out;
}

}  // namespace lgt
