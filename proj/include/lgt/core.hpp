#pragma once

// Core term algebra: hypergraph templates, expressions, link substitution,
// free names, free functors, term-notation expansion.

#include <atomic>
#include <cassert>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace lgt {

using LinkName = std::string;

struct Functor {
  std::string name;
  int arity = 0;
  bool operator==(const Functor& o) const { return name == o.name && arity == o.arity; }
  bool operator<(const Functor& o) const {
    return name != o.name ? name < o.name : arity < o.arity;
  }
};

struct LgtError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Fresh link/context names use a reserved '#' prefix the lexer never produces.
inline std::string fresh_link() {
  static std::atomic<std::uint64_t> n{0};
  return "#L" + std::to_string(n.fetch_add(1));
}
inline std::string fresh_ctx_name() {
  static std::atomic<std::uint64_t> n{0};
  return "#c" + std::to_string(n.fetch_add(1));
}

// ---------------------------------------------------------------------------
// Types (F_GT type atoms): a type variable or an arrow, used with a link
// vector. For arrows, dom/cod carry their own inner link vectors.

struct TypeAtom;
using TypeAtomPtr = std::shared_ptr<const TypeAtom>;

struct TypeAtom {
  std::string var;              // nonempty for a type variable
  TypeAtomPtr dom, cod;         // set for an arrow
  std::vector<LinkName> links;  // argument links at the use site

  bool is_arrow() const { return dom != nullptr; }
};

inline TypeAtomPtr type_var(std::string name, std::vector<LinkName> links) {
  auto t = std::make_shared<TypeAtom>();
  t->var = std::move(name);
  t->links = std::move(links);
  return t;
}
inline TypeAtomPtr type_arrow(TypeAtomPtr dom, TypeAtomPtr cod, std::vector<LinkName> links) {
  auto t = std::make_shared<TypeAtom>();
  t->dom = std::move(dom);
  t->cod = std::move(cod);
  t->links = std::move(links);
  return t;
}
inline TypeAtomPtr type_with_links(const TypeAtomPtr& t, std::vector<LinkName> links) {
  auto c = std::make_shared<TypeAtom>(*t);
  c->links = std::move(links);
  return c;
}

// ---------------------------------------------------------------------------
// Templates and expressions

struct Template;
using TermPtr = std::shared_ptr<const Template>;
struct Expression;
using ExprPtr = std::shared_ptr<const Expression>;

// Abstraction atom name: \ $x[X...] (: tau(X...))? . e
struct AbsName {
  std::string param;
  std::vector<LinkName> paramLinks;
  TypeAtomPtr anno;  // may be null in untyped programs
  ExprPtr body;
};
using AbsPtr = std::shared_ptr<const AbsName>;

// Atom/context argument: a link, or a nested term (term-notation sugar).
struct Arg {
  LinkName link;
  TermPtr nested;  // when set, `link` is unused
  bool is_link() const { return nested == nullptr; }
};
inline Arg arg_link(LinkName l) { return Arg{std::move(l), nullptr}; }
inline Arg arg_nested(TermPtr t) { return Arg{{}, std::move(t)}; }

enum class TermKind { Null, Atom, Context, Mol, Nu };
enum class AtomKind { Ctor, Fusion, Abs, ArrowType };

struct Template {
  TermKind kind = TermKind::Null;

  // Atom
  AtomKind atomKind = AtomKind::Ctor;
  std::string name;        // Ctor name (lowercase ident or integer literal)
  AbsPtr abs;              // Abs
  TypeAtomPtr arrowType;   // ArrowType (grammar rule RHS only); links live in args
  std::vector<Arg> args;   // Atom and Context

  // Context ($x[...])
  TypeAtomPtr anno;        // optional annotation

  // Mol
  TermPtr left, right;

  // Nu
  LinkName bound;
  TermPtr body;
};

inline TermPtr term_null() {
  static TermPtr t = std::make_shared<Template>();
  return t;
}
inline TermPtr term_atom(std::string name, std::vector<Arg> args) {
  auto t = std::make_shared<Template>();
  t->kind = TermKind::Atom;
  t->atomKind = AtomKind::Ctor;
  t->name = std::move(name);
  t->args = std::move(args);
  return t;
}
inline TermPtr term_atom_links(std::string name, std::vector<LinkName> links) {
  std::vector<Arg> a;
  for (auto& l : links) a.push_back(arg_link(l));
  return term_atom(std::move(name), std::move(a));
}
inline TermPtr term_fusion(LinkName a, LinkName b) {
  auto t = std::make_shared<Template>();
  t->kind = TermKind::Atom;
  t->atomKind = AtomKind::Fusion;
  t->args = {arg_link(std::move(a)), arg_link(std::move(b))};
  return t;
}
inline TermPtr term_abs(AbsPtr abs, std::vector<Arg> args) {
  auto t = std::make_shared<Template>();
  t->kind = TermKind::Atom;
  t->atomKind = AtomKind::Abs;
  t->abs = std::move(abs);
  t->args = std::move(args);
  return t;
}
inline TermPtr term_arrow_atom(TypeAtomPtr arrow, std::vector<Arg> args) {
  auto t = std::make_shared<Template>();
  t->kind = TermKind::Atom;
  t->atomKind = AtomKind::ArrowType;
  t->arrowType = std::move(arrow);
  t->args = std::move(args);
  return t;
}
inline TermPtr term_context(std::string name, std::vector<Arg> args, TypeAtomPtr anno = nullptr) {
  auto t = std::make_shared<Template>();
  t->kind = TermKind::Context;
  t->name = std::move(name);
  t->args = std::move(args);
  t->anno = std::move(anno);
  return t;
}
inline TermPtr term_mol(TermPtr l, TermPtr r) {
  auto t = std::make_shared<Template>();
  t->kind = TermKind::Mol;
  t->left = std::move(l);
  t->right = std::move(r);
  return t;
}
inline TermPtr term_nu(LinkName x, TermPtr body) {
  auto t = std::make_shared<Template>();
  t->kind = TermKind::Nu;
  t->bound = std::move(x);
  t->body = std::move(body);
  return t;
}
inline TermPtr term_mol_all(const std::vector<TermPtr>& parts) {
  if (parts.empty()) return term_null();
  TermPtr acc = parts[0];
  for (size_t i = 1; i < parts.size(); i++) acc = term_mol(acc, parts[i]);
  return acc;
}

enum class ExprKind { Graph, Case, App };

struct Expression {
  ExprKind kind = ExprKind::Graph;
  TermPtr graph;
  ExprPtr scrut;
  TermPtr pattern;
  ExprPtr thenBranch, elseBranch;
  ExprPtr fn, arg;
};

inline ExprPtr expr_graph(TermPtr t) {
  auto e = std::make_shared<Expression>();
  e->kind = ExprKind::Graph;
  e->graph = std::move(t);
  return e;
}
inline ExprPtr expr_case(ExprPtr s, TermPtr pat, ExprPtr th, ExprPtr el) {
  auto e = std::make_shared<Expression>();
  e->kind = ExprKind::Case;
  e->scrut = std::move(s);
  e->pattern = std::move(pat);
  e->thenBranch = std::move(th);
  e->elseBranch = std::move(el);
  return e;
}
inline ExprPtr expr_app(ExprPtr f, ExprPtr a) {
  auto e = std::make_shared<Expression>();
  e->kind = ExprKind::App;
  e->fn = std::move(f);
  e->arg = std::move(a);
  return e;
}

// ---------------------------------------------------------------------------
// Free link names, fn(G)/fn(T). Abstraction atoms contribute only their own
// argument links; body links are not free links of the atom.

inline void collect_arg_links(const Arg& a, std::set<LinkName>& out);

inline void free_names_into(const TermPtr& t, std::set<LinkName>& out) {
  switch (t->kind) {
    case TermKind::Null:
      return;
    case TermKind::Atom:
    case TermKind::Context:
      for (auto& a : t->args) collect_arg_links(a, out);
      return;
    case TermKind::Mol:
      free_names_into(t->left, out);
      free_names_into(t->right, out);
      return;
    case TermKind::Nu: {
      std::set<LinkName> inner;
      free_names_into(t->body, inner);
      inner.erase(t->bound);
      out.insert(inner.begin(), inner.end());
      return;
    }
  }
}

inline void collect_arg_links(const Arg& a, std::set<LinkName>& out) {
  if (a.is_link())
    out.insert(a.link);
  else
    free_names_into(a.nested, out);
}

inline std::set<LinkName> free_names(const TermPtr& t) {
  std::set<LinkName> out;
  free_names_into(t, out);
  return out;
}

// ---------------------------------------------------------------------------
// Hyperlink substitution T<Z.../Y...>, capture avoiding (third nu case).

using LinkSubst = std::vector<std::pair<LinkName, LinkName>>;

inline LinkName subst_link_name(const LinkName& x, const LinkSubst& s) {
  for (auto& [from, to] : s)
    if (x == from) return to;
  return x;
}

inline TermPtr subst_links(const TermPtr& t, const LinkSubst& s);

inline Arg subst_arg(const Arg& a, const LinkSubst& s) {
  if (a.is_link()) return arg_link(subst_link_name(a.link, s));
  return arg_nested(subst_links(a.nested, s));
}

inline TermPtr subst_links(const TermPtr& t, const LinkSubst& s) {
  {  // duplicate sources are a caller error
    std::set<LinkName> seen;
    for (auto& [from, to] : s) {
      if (!seen.insert(from).second) throw LgtError("subst_links: duplicate source link " + from);
      (void)to;
    }
  }
  if (s.empty()) return t;
  switch (t->kind) {
    case TermKind::Null:
      return t;
    case TermKind::Atom:
    case TermKind::Context: {
      auto c = std::make_shared<Template>(*t);
      for (auto& a : c->args) a = subst_arg(a, s);
      return c;
    }
    case TermKind::Mol:
      return term_mol(subst_links(t->left, s), subst_links(t->right, s));
    case TermKind::Nu: {
      const LinkName& x = t->bound;
      LinkSubst rest;
      bool hitSource = false;
      bool hitTarget = false;
      for (auto& [from, to] : s) {
        if (from == x) {
          hitSource = true;
          continue;
        }
        if (to == x) hitTarget = true;
        rest.push_back({from, to});
      }
      if (hitSource) return term_nu(x, rest.empty() ? t->body : subst_links(t->body, rest));
      if (!hitTarget) return term_nu(x, subst_links(t->body, s));
      // x would capture a substituted link: rename the binder first
      LinkName w = fresh_link();
      TermPtr renamed = subst_links(t->body, {{x, w}});
      return term_nu(w, subst_links(renamed, s));
    }
  }
  return t;
}

// ---------------------------------------------------------------------------
// Term-notation expansion: every nested argument becomes a fresh nu-bound
// link appended as the child's last argument.

inline TermPtr expand_term_notation(const TermPtr& t);

inline TypeAtomPtr append_anno_link(const TypeAtomPtr& anno, const LinkName& n) {
  if (!anno) return anno;
  auto c = std::make_shared<TypeAtom>(*anno);
  c->links.push_back(n);
  return c;
}

inline TermPtr expand_atomlike(const TermPtr& t) {
  std::vector<Arg> flat;
  std::vector<std::pair<LinkName, TermPtr>> hoisted;
  for (auto& a : t->args) {
    if (a.is_link()) {
      flat.push_back(a);
      continue;
    }
    LinkName n = fresh_link();
    TermPtr child = a.nested;
    auto c = std::make_shared<Template>(*child);
    c->args.push_back(arg_link(n));
    if (child->kind == TermKind::Context && child->anno)
      c->anno = append_anno_link(child->anno, n);
    hoisted.push_back({n, expand_term_notation(c)});
    flat.push_back(arg_link(n));
  }
  auto self = std::make_shared<Template>(*t);
  self->args = std::move(flat);
  if (self->kind == TermKind::Atom && self->atomKind == AtomKind::Abs) {
    // body is expanded lazily by the evaluator; keep as-is here
  }
  if (hoisted.empty()) return self;
  TermPtr acc = self;
  for (auto& [n, child] : hoisted) acc = term_mol(acc, child);
  for (auto it = hoisted.rbegin(); it != hoisted.rend(); ++it) acc = term_nu(it->first, acc);
  return acc;
}

inline TermPtr expand_term_notation(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Null:
      return t;
    case TermKind::Atom:
    case TermKind::Context:
      return expand_atomlike(t);
    case TermKind::Mol:
      return term_mol(expand_term_notation(t->left), expand_term_notation(t->right));
    case TermKind::Nu:
      return term_nu(t->bound, expand_term_notation(t->body));
  }
  return t;
}

inline ExprPtr expand_expr(const ExprPtr& e);

inline AbsPtr expand_abs(const AbsPtr& a) {
  auto c = std::make_shared<AbsName>(*a);
  c->body = expand_expr(a->body);
  return c;
}

// Expansion over whole expressions (descends into abstraction bodies).
inline TermPtr expand_term_deep(const TermPtr& t) {
  TermPtr x = expand_term_notation(t);
  // rewrite abstraction bodies
  struct R {
    static TermPtr go(const TermPtr& t) {
      switch (t->kind) {
        case TermKind::Null:
          return t;
        case TermKind::Atom:
          if (t->atomKind == AtomKind::Abs) {
            auto c = std::make_shared<Template>(*t);
            c->abs = expand_abs(t->abs);
            return c;
          }
          return t;
        case TermKind::Context:
          return t;
        case TermKind::Mol:
          return term_mol(go(t->left), go(t->right));
        case TermKind::Nu:
          return term_nu(t->bound, go(t->body));
      }
      return t;
    }
  };
  return R::go(x);
}

inline ExprPtr expand_expr(const ExprPtr& e) {
  switch (e->kind) {
    case ExprKind::Graph:
      return expr_graph(expand_term_deep(e->graph));
    case ExprKind::Case:
      return expr_case(expand_expr(e->scrut), expand_term_deep(e->pattern),
                       expand_expr(e->thenBranch), expand_expr(e->elseBranch));
    case ExprKind::App:
      return expr_app(expand_expr(e->fn), expand_expr(e->arg));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Free functors ff(e)

inline int sugar_arity(const TermPtr& t) { return static_cast<int>(t->args.size()); }

inline void free_functors_into(const ExprPtr& e, std::set<Functor>& out);

inline void free_functors_term(const TermPtr& t, std::set<Functor>& out) {
  switch (t->kind) {
    case TermKind::Null:
      return;
    case TermKind::Atom: {
      if (t->atomKind == AtomKind::Abs) {
        std::set<Functor> body;
        free_functors_into(t->abs->body, body);
        body.erase(Functor{t->abs->param, static_cast<int>(t->abs->paramLinks.size())});
        out.insert(body.begin(), body.end());
      }
      for (auto& a : t->args)
        if (!a.is_link()) free_functors_term(a.nested, out);
      return;
    }
    case TermKind::Context: {
      // a nested argument counts as one link after expansion
      out.insert(Functor{t->name, sugar_arity(t)});
      for (auto& a : t->args)
        if (!a.is_link()) free_functors_term(a.nested, out);
      return;
    }
    case TermKind::Mol:
      free_functors_term(t->left, out);
      free_functors_term(t->right, out);
      return;
    case TermKind::Nu:
      free_functors_term(t->body, out);
      return;
  }
}

inline void free_functors_into(const ExprPtr& e, std::set<Functor>& out) {
  switch (e->kind) {
    case ExprKind::Graph:
      free_functors_term(e->graph, out);
      return;
    case ExprKind::Case: {
      free_functors_into(e->scrut, out);
      std::set<Functor> pat, then;
      free_functors_term(e->pattern, pat);
      free_functors_into(e->thenBranch, then);
      for (auto& f : pat) then.erase(f);
      out.insert(then.begin(), then.end());
      free_functors_into(e->elseBranch, out);
      return;
    }
    case ExprKind::App:
      free_functors_into(e->fn, out);
      free_functors_into(e->arg, out);
      return;
  }
}

inline std::set<Functor> free_functors(const ExprPtr& e) {
  std::set<Functor> out;
  free_functors_into(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Structural equality of expressions modulo consistent renaming of bound
// links (nu binders, lambda parameter links) and bound context names.
// Free links and free context names must match exactly. This is the
// abstraction-name equality policy used by congruence.

struct AlphaEnv {
  std::map<LinkName, LinkName> l2r, r2l;          // bound link correspondence
  std::map<std::string, std::string> c2r, cr2l;   // bound context-name correspondence

  bool link_eq(const LinkName& a, const LinkName& b) const {
    auto i = l2r.find(a);
    auto j = r2l.find(b);
    if (i != l2r.end() || j != r2l.end())
      return i != l2r.end() && j != r2l.end() && i->second == b && j->second == a;
    return a == b;
  }
  AlphaEnv bind_link(const LinkName& a, const LinkName& b) const {
    AlphaEnv e = *this;
    e.l2r[a] = b;
    e.r2l[b] = a;
    return e;
  }
  bool ctx_eq(const std::string& a, const std::string& b) const {
    auto i = c2r.find(a);
    auto j = cr2l.find(b);
    if (i != c2r.end() || j != cr2l.end())
      return i != c2r.end() && j != cr2l.end() && i->second == b && j->second == a;
    return a == b;
  }
  AlphaEnv bind_ctx(const std::string& a, const std::string& b) const {
    AlphaEnv e = *this;
    e.c2r[a] = b;
    e.cr2l[b] = a;
    return e;
  }
};

inline bool alpha_equal_type(const TypeAtomPtr& a, const TypeAtomPtr& b, const AlphaEnv& env);

inline bool alpha_equal_links(const std::vector<LinkName>& a, const std::vector<LinkName>& b,
                              const AlphaEnv& env) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); i++)
    if (!env.link_eq(a[i], b[i])) return false;
  return true;
}

// Arrow inner links are placeholders: compared by their own correspondence.
inline bool type_shape_equal(const TypeAtomPtr& a, const TypeAtomPtr& b,
                             std::map<LinkName, LinkName>& m, std::map<LinkName, LinkName>& back) {
  if (a->is_arrow() != b->is_arrow()) return false;
  if (!a->is_arrow() && a->var != b->var) return false;
  if (a->links.size() != b->links.size()) return false;
  for (size_t i = 0; i < a->links.size(); i++) {
    auto it = m.find(a->links[i]);
    auto jt = back.find(b->links[i]);
    if (it == m.end() && jt == back.end()) {
      m[a->links[i]] = b->links[i];
      back[b->links[i]] = a->links[i];
    } else if (it == m.end() || jt == back.end() || it->second != b->links[i] ||
               jt->second != a->links[i]) {
      return false;
    }
  }
  if (a->is_arrow())
    return type_shape_equal(a->dom, b->dom, m, back) && type_shape_equal(a->cod, b->cod, m, back);
  return true;
}

// Equality of two type atoms modulo a bijective renaming of all their links.
inline bool type_equal_mod_links(const TypeAtomPtr& a, const TypeAtomPtr& b) {
  if (!a || !b) return a == b;
  std::map<LinkName, LinkName> m, back;
  return type_shape_equal(a, b, m, back);
}

// Exact equality (links literal).
inline bool type_equal_exact(const TypeAtomPtr& a, const TypeAtomPtr& b) {
  if (!a || !b) return a == b;
  if (a->is_arrow() != b->is_arrow()) return false;
  if (a->links != b->links) return false;
  if (a->is_arrow()) return type_equal_exact(a->dom, b->dom) && type_equal_exact(a->cod, b->cod);
  return a->var == b->var;
}

inline bool alpha_equal_type(const TypeAtomPtr& a, const TypeAtomPtr& b, const AlphaEnv& env) {
  if (!a || !b) return a == b;
  if (a->is_arrow() != b->is_arrow()) return false;
  if (a->links.size() != b->links.size()) return false;
  for (size_t i = 0; i < a->links.size(); i++)
    if (!env.link_eq(a->links[i], b->links[i])) return false;
  if (a->is_arrow()) {
    // inner links compared shape-wise (they are scoped to the arrow)
    std::map<LinkName, LinkName> m, back;
    return type_shape_equal(a->dom, b->dom, m, back) && type_shape_equal(a->cod, b->cod, m, back);
  }
  return a->var == b->var;
}

inline bool alpha_equal_expr(const ExprPtr& a, const ExprPtr& b, const AlphaEnv& env);

inline bool alpha_equal_term(const TermPtr& a, const TermPtr& b, const AlphaEnv& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Null:
      return true;
    case TermKind::Atom: {
      if (a->atomKind != b->atomKind) return false;
      if (a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); i++) {
        const Arg& x = a->args[i];
        const Arg& y = b->args[i];
        if (x.is_link() != y.is_link()) return false;
        if (x.is_link()) {
          if (!env.link_eq(x.link, y.link)) return false;
        } else if (!alpha_equal_term(x.nested, y.nested, env)) {
          return false;
        }
      }
      switch (a->atomKind) {
        case AtomKind::Ctor:
          return a->name == b->name;
        case AtomKind::Fusion:
          return true;
        case AtomKind::ArrowType:
          return type_equal_mod_links(a->arrowType, b->arrowType);
        case AtomKind::Abs: {
          const auto& pa = *a->abs;
          const auto& pb = *b->abs;
          if (pa.paramLinks.size() != pb.paramLinks.size()) return false;
          AlphaEnv e = env.bind_ctx(pa.param, pb.param);
          for (size_t i = 0; i < pa.paramLinks.size(); i++)
            e = e.bind_link(pa.paramLinks[i], pb.paramLinks[i]);
          if ((pa.anno == nullptr) != (pb.anno == nullptr)) return false;
          if (pa.anno && !alpha_equal_type(pa.anno, pb.anno, e)) return false;
          return alpha_equal_expr(pa.body, pb.body, e);
        }
      }
      return false;
    }
    case TermKind::Context: {
      if (!env.ctx_eq(a->name, b->name)) return false;
      if (a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); i++) {
        const Arg& x = a->args[i];
        const Arg& y = b->args[i];
        if (x.is_link() != y.is_link()) return false;
        if (x.is_link()) {
          if (!env.link_eq(x.link, y.link)) return false;
        } else if (!alpha_equal_term(x.nested, y.nested, env)) {
          return false;
        }
      }
      if ((a->anno == nullptr) != (b->anno == nullptr)) return false;
      return !a->anno || alpha_equal_type(a->anno, b->anno, env);
    }
    case TermKind::Mol:
      return alpha_equal_term(a->left, b->left, env) && alpha_equal_term(a->right, b->right, env);
    case TermKind::Nu:
      return alpha_equal_term(a->body, b->body, env.bind_link(a->bound, b->bound));
  }
  return false;
}

inline bool alpha_equal_expr(const ExprPtr& a, const ExprPtr& b, const AlphaEnv& env) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Graph:
      return alpha_equal_term(a->graph, b->graph, env);
    case ExprKind::Case:
      return alpha_equal_expr(a->scrut, b->scrut, env) &&
             alpha_equal_term(a->pattern, b->pattern, env) &&
             alpha_equal_expr(a->thenBranch, b->thenBranch, env) &&
             alpha_equal_expr(a->elseBranch, b->elseBranch, env);
    case ExprKind::App:
      return alpha_equal_expr(a->fn, b->fn, env) && alpha_equal_expr(a->arg, b->arg, env);
  }
  return false;
}

inline bool abs_equal(const AbsPtr& a, const AbsPtr& b) {
  if (a == b) return true;
  AlphaEnv env;
  if (a->paramLinks.size() != b->paramLinks.size()) return false;
  AlphaEnv e = env.bind_ctx(a->param, b->param);
  for (size_t i = 0; i < a->paramLinks.size(); i++)
    e = e.bind_link(a->paramLinks[i], b->paramLinks[i]);
  if ((a->anno == nullptr) != (b->anno == nullptr)) return false;
  if (a->anno && !alpha_equal_type(a->anno, b->anno, e)) return false;
  return alpha_equal_expr(a->body, b->body, e);
}

inline bool has_context(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Null:
      return false;
    case TermKind::Context:
      return true;
    case TermKind::Atom:
      for (auto& a : t->args)
        if (!a.is_link() && has_context(a.nested)) return true;
      return false;
    case TermKind::Mol:
      return has_context(t->left) || has_context(t->right);
    case TermKind::Nu:
      return has_context(t->body);
  }
  return false;
}

inline bool has_abstraction(const TermPtr& t) {
  switch (t->kind) {
    case TermKind::Null:
    case TermKind::Context:
      return false;
    case TermKind::Atom:
      if (t->atomKind == AtomKind::Abs) return true;
      for (auto& a : t->args)
        if (!a.is_link() && has_abstraction(a.nested)) return true;
      return false;
    case TermKind::Mol:
      return has_abstraction(t->left) || has_abstraction(t->right);
    case TermKind::Nu:
      return has_abstraction(t->body);
  }
  return false;
}

}  // namespace lgt
