#pragma once

// Pretty-printer. Prints terms as parsed (term-notation sugar preserved),
// so parse(pretty_print(t)) reproduces t structurally.

#include <sstream>

#include "lgt/parser.hpp"

namespace lgt {

inline void print_type(const TypeAtomPtr& t, std::ostringstream& os);
inline void print_term(const TermPtr& t, std::ostringstream& os);
inline void print_expr(const ExprPtr& e, std::ostringstream& os, bool parenApp);

inline void print_type_use(const TypeAtomPtr& t, std::ostringstream& os) {
  if (!t->is_arrow()) {
    os << t->var;
    if (!t->links.empty()) {
      os << "(";
      for (size_t i = 0; i < t->links.size(); i++) os << (i ? ", " : "") << t->links[i];
      os << ")";
    }
    return;
  }
  // arrow spine; re-sugar (a -> b -> c)(Z) when inner links match
  os << "(";
  const TypeAtom* cur = t.get();
  for (;;) {
    print_type_use(cur->dom, os);
    os << " -> ";
    if (cur->cod->is_arrow() && cur->cod->links == t->links) {
      cur = cur->cod.get();
      continue;
    }
    print_type_use(cur->cod, os);
    break;
  }
  os << ")";
  if (!t->links.empty()) {
    os << "(";
    for (size_t i = 0; i < t->links.size(); i++) os << (i ? ", " : "") << t->links[i];
    os << ")";
  }
}

inline void print_type(const TypeAtomPtr& t, std::ostringstream& os) { print_type_use(t, os); }

inline void print_arg(const Arg& a, std::ostringstream& os) {
  if (a.is_link()) {
    os << a.link;
    return;
  }
  const TermPtr& n = a.nested;
  switch (n->kind) {
    case TermKind::Atom:
      if (n->atomKind == AtomKind::ArrowType) {
        TypeAtomPtr shape = type_with_links(n->arrowType, {});
        print_type_use(shape, os);
        if (!n->args.empty()) {
          os << "(";
          for (size_t i = 0; i < n->args.size(); i++) {
            os << (i ? ", " : "");
            print_arg(n->args[i], os);
          }
          os << ")";
        }
        return;
      }
      os << n->name;
      if (!n->args.empty()) {
        os << "(";
        for (size_t i = 0; i < n->args.size(); i++) {
          os << (i ? ", " : "");
          print_arg(n->args[i], os);
        }
        os << ")";
      }
      return;
    case TermKind::Context:
      print_term(n, os);
      return;
    default:
      throw LgtError("print_arg: nested term must be an atom or a context");
  }
}

inline void print_abs(const AbsPtr& abs, const std::vector<Arg>& links, std::ostringstream& os) {
  os << "(\\ $" << abs->param << "[";
  for (size_t i = 0; i < abs->paramLinks.size(); i++)
    os << (i ? ", " : "") << abs->paramLinks[i];
  os << "]";
  if (abs->anno) {
    os << " : ";
    print_type(abs->anno, os);
  }
  os << ". ";
  print_expr(abs->body, os, false);
  os << ")(";
  for (size_t i = 0; i < links.size(); i++) {
    os << (i ? ", " : "");
    print_arg(links[i], os);
  }
  os << ")";
}

inline void print_term(const TermPtr& t, std::ostringstream& os) {
  switch (t->kind) {
    case TermKind::Null:
      os << "()";
      return;
    case TermKind::Atom:
      switch (t->atomKind) {
        case AtomKind::Fusion:
          print_arg(t->args[0], os);
          os << " >< ";
          print_arg(t->args[1], os);
          return;
        case AtomKind::Abs:
          print_abs(t->abs, t->args, os);
          return;
        case AtomKind::ArrowType: {
          TypeAtomPtr shape = type_with_links(t->arrowType, {});
          print_type_use(shape, os);
          os << "(";
          for (size_t i = 0; i < t->args.size(); i++) {
            os << (i ? ", " : "");
            print_arg(t->args[i], os);
          }
          os << ")";
          return;
        }
        case AtomKind::Ctor:
          os << t->name;
          if (!t->args.empty()) {
            os << "(";
            for (size_t i = 0; i < t->args.size(); i++) {
              os << (i ? ", " : "");
              print_arg(t->args[i], os);
            }
            os << ")";
          }
          return;
      }
      return;
    case TermKind::Context:
      os << "$" << t->name;
      os << "[";
      for (size_t i = 0; i < t->args.size(); i++) {
        os << (i ? ", " : "");
        print_arg(t->args[i], os);
      }
      os << "]";
      if (t->anno) {
        os << " : ";
        print_type(t->anno, os);
      }
      return;
    case TermKind::Mol: {
      os << "(";
      print_term(t->left, os);
      os << ", ";
      print_term(t->right, os);
      os << ")";
      return;
    }
    case TermKind::Nu: {
      os << "nu ";
      const Template* cur = t.get();
      os << cur->bound;
      while (cur->body->kind == TermKind::Nu) {
        cur = cur->body.get();
        os << " " << cur->bound;
      }
      os << ". ";
      const TermPtr& body = cur->body;
      bool needParen = body->kind == TermKind::Mol || body->kind == TermKind::Nu;
      // molecules print their own parens
      if (needParen && body->kind == TermKind::Nu) os << "(";
      print_term(body, os);
      if (needParen && body->kind == TermKind::Nu) os << ")";
      return;
    }
  }
}

inline void print_expr(const ExprPtr& e, std::ostringstream& os, bool parenApp) {
  switch (e->kind) {
    case ExprKind::Graph:
      print_term(e->graph, os);
      return;
    case ExprKind::Case:
      os << "case ";
      print_expr(e->scrut, os, false);
      os << " of ";
      print_term(e->pattern, os);
      os << " -> ";
      print_expr(e->thenBranch, os, false);
      os << " | otherwise -> ";
      print_expr(e->elseBranch, os, false);
      return;
    case ExprKind::App: {
      if (parenApp) os << "(";
      bool fnParen = e->fn->kind == ExprKind::Case;
      if (fnParen) os << "(";
      print_expr(e->fn, os, false);
      if (fnParen) os << ")";
      os << " ";
      // right operand of an application must not swallow juxtaposition
      bool argParen = e->arg->kind == ExprKind::App || e->arg->kind == ExprKind::Case;
      if (argParen) os << "(";
      print_expr(e->arg, os, false);
      if (argParen) os << ")";
      if (parenApp) os << ")";
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Generated names ('#'-prefixed links and context names) are not surface
// syntax; printing renames them to unused plain names. Generated names are
// globally unique, so one rename map covers the whole term.

namespace pdetail {

struct Sanitizer {
  std::set<std::string> used;
  std::map<std::string, std::string> links, ctxs;
  int nl = 0, nc = 0;
  bool dirty = false;

  const std::string& link(const LinkName& n) {
    if (n.empty() || n[0] != '#') return n;
    auto [it, fresh] = links.try_emplace(n);
    if (fresh) {
      std::string cand;
      do cand = "L" + std::to_string(++nl);
      while (used.count(cand));
      used.insert(cand);
      it->second = cand;
      dirty = true;
    }
    return it->second;
  }
  const std::string& ctx(const std::string& n) {
    if (n.empty() || n[0] != '#') return n;
    auto [it, fresh] = ctxs.try_emplace(n);
    if (fresh) {
      std::string cand;
      do cand = "c" + std::to_string(++nc);
      while (used.count(cand));
      used.insert(cand);
      it->second = cand;
      dirty = true;
    }
    return it->second;
  }
};

inline void collect_names_expr(const ExprPtr& e, std::set<std::string>& out);

inline void collect_names_type(const TypeAtomPtr& t, std::set<std::string>& out) {
  if (!t) return;
  for (auto& l : t->links) out.insert(l);
  if (t->is_arrow()) {
    collect_names_type(t->dom, out);
    collect_names_type(t->cod, out);
  }
}

inline void collect_names_term(const TermPtr& t, std::set<std::string>& out) {
  switch (t->kind) {
    case TermKind::Null:
      return;
    case TermKind::Atom:
    case TermKind::Context:
      for (auto& a : t->args) {
        if (a.is_link())
          out.insert(a.link);
        else
          collect_names_term(a.nested, out);
      }
      if (t->anno) collect_names_type(t->anno, out);
      if (t->kind == TermKind::Context) out.insert(t->name);
      if (t->abs) {
        out.insert(t->abs->param);
        for (auto& l : t->abs->paramLinks) out.insert(l);
        collect_names_type(t->abs->anno, out);
        collect_names_expr(t->abs->body, out);
      }
      return;
    case TermKind::Mol:
      collect_names_term(t->left, out);
      collect_names_term(t->right, out);
      return;
    case TermKind::Nu:
      out.insert(t->bound);
      collect_names_term(t->body, out);
      return;
  }
}

inline void collect_names_expr(const ExprPtr& e, std::set<std::string>& out) {
  switch (e->kind) {
    case ExprKind::Graph:
      collect_names_term(e->graph, out);
      return;
    case ExprKind::Case:
      collect_names_expr(e->scrut, out);
      collect_names_term(e->pattern, out);
      collect_names_expr(e->thenBranch, out);
      collect_names_expr(e->elseBranch, out);
      return;
    case ExprKind::App:
      collect_names_expr(e->fn, out);
      collect_names_expr(e->arg, out);
      return;
  }
}

inline ExprPtr rename_expr(const ExprPtr& e, Sanitizer& s);

inline TypeAtomPtr rename_type(const TypeAtomPtr& t, Sanitizer& s) {
  if (!t) return t;
  auto c = std::make_shared<TypeAtom>(*t);
  for (auto& l : c->links) l = s.link(l);
  if (t->is_arrow()) {
    c->dom = rename_type(t->dom, s);
    c->cod = rename_type(t->cod, s);
  }
  return c;
}

inline TermPtr rename_term(const TermPtr& t, Sanitizer& s) {
  switch (t->kind) {
    case TermKind::Null:
      return t;
    case TermKind::Atom:
    case TermKind::Context: {
      auto c = std::make_shared<Template>(*t);
      for (auto& a : c->args)
        a = a.is_link() ? arg_link(s.link(a.link)) : arg_nested(rename_term(a.nested, s));
      if (c->anno) c->anno = rename_type(c->anno, s);
      if (c->arrowType) c->arrowType = rename_type(c->arrowType, s);
      if (t->kind == TermKind::Context) c->name = s.ctx(t->name);
      if (c->abs) {
        auto ab = std::make_shared<AbsName>(*c->abs);
        ab->param = s.ctx(ab->param);
        for (auto& l : ab->paramLinks) l = s.link(l);
        ab->anno = rename_type(ab->anno, s);
        ab->body = rename_expr(ab->body, s);
        c->abs = ab;
      }
      return c;
    }
    case TermKind::Mol:
      return term_mol(rename_term(t->left, s), rename_term(t->right, s));
    case TermKind::Nu:
      return term_nu(s.link(t->bound), rename_term(t->body, s));
  }
  return t;
}

inline ExprPtr rename_expr(const ExprPtr& e, Sanitizer& s) {
  switch (e->kind) {
    case ExprKind::Graph:
      return expr_graph(rename_term(e->graph, s));
    case ExprKind::Case:
      return expr_case(rename_expr(e->scrut, s), rename_term(e->pattern, s),
                       rename_expr(e->thenBranch, s), rename_expr(e->elseBranch, s));
    case ExprKind::App:
      return expr_app(rename_expr(e->fn, s), rename_expr(e->arg, s));
  }
  return e;
}

inline bool any_generated(const std::set<std::string>& names) {
  for (auto& n : names)
    if (!n.empty() && n[0] == '#') return true;
  return false;
}

}  // namespace pdetail

inline TermPtr sanitize_names(const TermPtr& t) {
  std::set<std::string> names;
  pdetail::collect_names_term(t, names);
  if (!pdetail::any_generated(names)) return t;
  pdetail::Sanitizer s;
  s.used = std::move(names);
  return pdetail::rename_term(t, s);
}

inline ExprPtr sanitize_names(const ExprPtr& e) {
  std::set<std::string> names;
  pdetail::collect_names_expr(e, names);
  if (!pdetail::any_generated(names)) return e;
  pdetail::Sanitizer s;
  s.used = std::move(names);
  return pdetail::rename_expr(e, s);
}

inline std::string pretty(const TermPtr& t) {
  std::ostringstream os;
  print_term(sanitize_names(t), os);
  return os.str();
}

inline std::string pretty(const ExprPtr& e) {
  std::ostringstream os;
  print_expr(sanitize_names(e), os, false);
  return os.str();
}

inline std::string pretty(const TypeAtomPtr& t) {
  std::ostringstream os;
  print_type(t, os);
  return os.str();
}

inline std::string pretty(const ProductionRule& r) {
  std::ostringstream os;
  os << "type " << r.head << "(";
  for (size_t i = 0; i < r.headLinks.size(); i++) os << (i ? ", " : "") << r.headLinks[i];
  os << ") -> ";
  print_term(r.rhs, os);
  os << ";";
  return os.str();
}

inline std::string pretty_flat(const FlatGraph& g) { return pretty(unflatten(g)); }

inline std::string pretty(const Program& p) {
  std::ostringstream os;
  for (auto& r : p.typeDefs) os << pretty(r) << "\n";
  if (p.main) os << pretty(p.main) << "\n";
  return os.str();
}

}  // namespace lgt
