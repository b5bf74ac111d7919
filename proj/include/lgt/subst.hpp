#pragma once

// Graph substitution e[T / x[X...]]: replaces free occurrences of a graph
// context by a template, renaming links positionally at each occurrence and
// alpha-converting bound context names on clashes.

#include "lgt/core.hpp"

namespace lgt {

struct CtxTarget {
  std::string name;
  std::vector<LinkName> formals;
  int arity() const { return static_cast<int>(formals.size()); }
};

inline ExprPtr graph_substitute(const ExprPtr& e, const TermPtr& T, const CtxTarget& y);

inline TermPtr graph_substitute_term(const TermPtr& t, const TermPtr& T, const CtxTarget& y) {
  switch (t->kind) {
    case TermKind::Null:
      return t;
    case TermKind::Context: {
      if (t->name == y.name && static_cast<int>(t->args.size()) == y.arity()) {
        LinkSubst s;  // simultaneous T<X.../Y...>
        std::vector<Arg> occ = t->args;
        for (int i = 0; i < y.arity(); i++) {
          if (!occ[i].is_link())
            throw LgtError("graph_substitute: occurrence of " + y.name + " not expanded");
          if (y.formals[i] != occ[i].link) s.push_back({y.formals[i], occ[i].link});
        }
        return subst_links(T, s);
      }
      // different functor: occurrence kept (nested args may still contain it)
      if (t->args.empty()) return t;
      auto c = std::make_shared<Template>(*t);
      for (auto& a : c->args)
        if (!a.is_link()) a = arg_nested(graph_substitute_term(a.nested, T, y));
      return c;
    }
    case TermKind::Atom: {
      if (t->atomKind == AtomKind::Abs) {
        const AbsPtr& abs = t->abs;
        Functor bound{abs->param, static_cast<int>(abs->paramLinks.size())};
        Functor target{y.name, y.arity()};
        if (bound == target) return t;  // shadowed
        std::set<Functor> ffT;
        free_functors_term(T, ffT);
        if (!ffT.count(bound)) {
          auto c = std::make_shared<AbsName>(*abs);
          c->body = graph_substitute(abs->body, T, y);
          auto r = std::make_shared<Template>(*t);
          r->abs = c;
          return r;
        }
        // rename the bound context to avoid capturing T's free contexts
        std::string z = fresh_ctx_name();
        std::vector<Arg> zargs;
        for (auto& l : abs->paramLinks) zargs.push_back(arg_link(l));
        TermPtr zctx = term_context(z, zargs);
        ExprPtr body1 = graph_substitute(abs->body, zctx, CtxTarget{abs->param, abs->paramLinks});
        ExprPtr body2 = graph_substitute(body1, T, y);
        auto c = std::make_shared<AbsName>(*abs);
        c->param = z;
        c->body = body2;
        auto r = std::make_shared<Template>(*t);
        r->abs = c;
        return r;
      }
      if (t->args.empty()) return t;
      auto c = std::make_shared<Template>(*t);
      for (auto& a : c->args)
        if (!a.is_link()) a = arg_nested(graph_substitute_term(a.nested, T, y));
      return c;
    }
    case TermKind::Mol:
      return term_mol(graph_substitute_term(t->left, T, y),
                      graph_substitute_term(t->right, T, y));
    case TermKind::Nu:
      return term_nu(t->bound, graph_substitute_term(t->body, T, y));
  }
  return t;
}

inline ExprPtr graph_substitute(const ExprPtr& e, const TermPtr& T, const CtxTarget& y) {
  switch (e->kind) {
    case ExprKind::Graph:
      return expr_graph(graph_substitute_term(e->graph, T, y));
    case ExprKind::Case: {
      // pattern contexts bind in the then-branch
      std::set<Functor> pat;
      free_functors_term(e->pattern, pat);
      bool shadowed = pat.count(Functor{y.name, y.arity()}) > 0;
      return expr_case(graph_substitute(e->scrut, T, y), e->pattern,
                       shadowed ? e->thenBranch : graph_substitute(e->thenBranch, T, y),
                       graph_substitute(e->elseBranch, T, y));
    }
    case ExprKind::App:
      return expr_app(graph_substitute(e->fn, T, y), graph_substitute(e->arg, T, y));
  }
  return e;
}

}  // namespace lgt
