#pragma once

// Shared test utilities: exact structural equality, random term generators,
// single-step E-rule application for congruence properties.

#include <fstream>
#include <random>
#include <sstream>

#include "lgt/dot.hpp"

namespace lgt::testing {

inline std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LgtError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string programs_dir() {
#ifdef LGT_PROGRAMS_DIR
  return LGT_PROGRAMS_DIR;
#else
  return "programs";
#endif
}

inline Program load_program(const std::string& name) {
  return parse_program(slurp(programs_dir() + "/" + name));
}

// ---------------------------------------------------------------------------
// Exact structural equality (no alpha-conversion allowed anywhere).

inline bool exact_equal_type(const TypeAtomPtr& a, const TypeAtomPtr& b) {
  if (!a || !b) return a == b;
  if (a->is_arrow() != b->is_arrow()) return false;
  if (a->links != b->links) return false;
  if (a->is_arrow())
    return exact_equal_type(a->dom, b->dom) && exact_equal_type(a->cod, b->cod);
  return a->var == b->var;
}

inline bool exact_equal_expr(const ExprPtr& a, const ExprPtr& b);

inline bool exact_equal_term(const TermPtr& a, const TermPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case TermKind::Null:
      return true;
    case TermKind::Atom:
    case TermKind::Context: {
      if (a->kind == TermKind::Atom) {
        if (a->atomKind != b->atomKind) return false;
        if (a->atomKind == AtomKind::Ctor && a->name != b->name) return false;
        if (a->atomKind == AtomKind::ArrowType && !exact_equal_type(a->arrowType, b->arrowType))
          return false;
        if (a->atomKind == AtomKind::Abs) {
          if (a->abs->param != b->abs->param || a->abs->paramLinks != b->abs->paramLinks)
            return false;
          if (!exact_equal_type(a->abs->anno, b->abs->anno)) return false;
          if (!exact_equal_expr(a->abs->body, b->abs->body)) return false;
        }
      } else {
        if (a->name != b->name) return false;
        if ((a->anno == nullptr) != (b->anno == nullptr)) return false;
        if (a->anno && !exact_equal_type(a->anno, b->anno)) return false;
      }
      if (a->args.size() != b->args.size()) return false;
      for (size_t i = 0; i < a->args.size(); i++) {
        if (a->args[i].is_link() != b->args[i].is_link()) return false;
        if (a->args[i].is_link()) {
          if (a->args[i].link != b->args[i].link) return false;
        } else if (!exact_equal_term(a->args[i].nested, b->args[i].nested)) {
          return false;
        }
      }
      return true;
    }
    case TermKind::Mol:
      return exact_equal_term(a->left, b->left) && exact_equal_term(a->right, b->right);
    case TermKind::Nu:
      return a->bound == b->bound && exact_equal_term(a->body, b->body);
  }
  return false;
}

inline bool exact_equal_expr(const ExprPtr& a, const ExprPtr& b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case ExprKind::Graph:
      return exact_equal_term(a->graph, b->graph);
    case ExprKind::Case:
      return exact_equal_expr(a->scrut, b->scrut) && exact_equal_term(a->pattern, b->pattern) &&
             exact_equal_expr(a->thenBranch, b->thenBranch) &&
             exact_equal_expr(a->elseBranch, b->elseBranch);
    case ExprKind::App:
      return exact_equal_expr(a->fn, b->fn) && exact_equal_expr(a->arg, b->arg);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Random graph terms (values: no contexts). Small link and name pools keep
// fusions and shared links frequent.

struct Rng {
  std::mt19937 eng;
  explicit Rng(unsigned seed) : eng(seed) {}
  int upto(int n) { return std::uniform_int_distribution<int>(0, n - 1)(eng); }
  bool chance(double p) { return std::uniform_real_distribution<>(0, 1)(eng) < p; }
};

inline LinkName rnd_link(Rng& r, int pool = 6) {
  static const char* names[] = {"A", "B", "C", "D", "E", "F", "G", "H"};
  return names[r.upto(pool)];
}

inline TermPtr rnd_atom(Rng& r, int pool) {
  static const char* names[] = {"p", "q", "r", "s"};
  if (r.chance(0.15)) return term_fusion(rnd_link(r, pool), rnd_link(r, pool));
  int arity = r.upto(4);
  std::vector<Arg> args;
  for (int i = 0; i < arity; i++) args.push_back(arg_link(rnd_link(r, pool)));
  return term_atom(names[r.upto(4)], std::move(args));
}

inline TermPtr rnd_graph(Rng& r, int atoms, int pool = 6) {
  std::vector<TermPtr> parts;
  if (atoms == 0 || r.chance(0.05)) parts.push_back(term_null());
  for (int i = 0; i < atoms; i++) parts.push_back(rnd_atom(r, pool));
  // random molecule tree
  while (parts.size() > 1) {
    int i = r.upto(static_cast<int>(parts.size()) - 1);
    TermPtr m = term_mol(parts[i], parts[i + 1]);
    parts.erase(parts.begin() + i, parts.begin() + i + 2);
    parts.insert(parts.begin() + i, m);
  }
  TermPtr g = parts.empty() ? term_null() : parts[0];
  int nus = r.upto(4);
  for (int i = 0; i < nus; i++) g = term_nu(rnd_link(r, pool), g);
  return g;
}

// ---------------------------------------------------------------------------
// Single applications of the structural congruence axioms at arbitrary
// positions. apply_erules returns all one-step results.

inline void collect_contexts(const TermPtr& t,
                             std::vector<std::pair<TermPtr, std::function<TermPtr(TermPtr)>>>& out,
                             const std::function<TermPtr(TermPtr)>& rebuild) {
  out.push_back({t, rebuild});
  switch (t->kind) {
    case TermKind::Mol:
      collect_contexts(t->left, out, [t, rebuild](TermPtr x) {
        return rebuild(term_mol(x, t->right));
      });
      collect_contexts(t->right, out, [t, rebuild](TermPtr x) {
        return rebuild(term_mol(t->left, x));
      });
      break;
    case TermKind::Nu:
      collect_contexts(t->body, out, [t, rebuild](TermPtr x) {
        return rebuild(term_nu(t->bound, x));
      });
      break;
    default:
      break;
  }
}

inline bool is_fusion_of(const TermPtr& t, const LinkName& a, const LinkName& b) {
  return t->kind == TermKind::Atom && t->atomKind == AtomKind::Fusion &&
         t->args[0].is_link() && t->args[1].is_link() &&
         ((t->args[0].link == a && t->args[1].link == b) ||
          (t->args[0].link == b && t->args[1].link == a));
}

// one-step rewrites of a subterm (forward direction of each axiom)
inline std::vector<TermPtr> erule_steps_at(const TermPtr& t) {
  std::vector<TermPtr> out;
  // E1: (0, G) -> G and (G, 0) -> G via E2
  if (t->kind == TermKind::Mol) {
    if (t->left->kind == TermKind::Null) out.push_back(t->right);
    if (t->right->kind == TermKind::Null) out.push_back(t->left);
    // E2
    out.push_back(term_mol(t->right, t->left));
    // E3 both directions
    if (t->right->kind == TermKind::Mol)
      out.push_back(term_mol(term_mol(t->left, t->right->left), t->right->right));
    if (t->left->kind == TermKind::Mol)
      out.push_back(term_mol(t->left->left, term_mol(t->left->right, t->right)));
    // E1 reverse: G -> (0, G)
    out.push_back(term_mol(term_null(), t));
  } else {
    out.push_back(term_mol(term_null(), t));  // E1 reverse on non-molecules
  }
  if (t->kind == TermKind::Nu) {
    const LinkName& x = t->bound;
    // E8
    if (t->body->kind == TermKind::Null) out.push_back(term_null());
    // E9
    if (t->body->kind == TermKind::Nu)
      out.push_back(term_nu(t->body->bound, term_nu(x, t->body->body)));
    // E7: nu X. nu Y. X >< Y -> 0
    if (t->body->kind == TermKind::Nu && is_fusion_of(t->body->body, x, t->body->bound))
      out.push_back(term_null());
    // E10: nu X.(G1, G2) -> (nu X.G1, G2) when X not free in G2
    if (t->body->kind == TermKind::Mol) {
      if (!free_names(t->body->right).count(x))
        out.push_back(term_mol(term_nu(x, t->body->left), t->body->right));
      if (!free_names(t->body->left).count(x))
        out.push_back(term_mol(t->body->left, term_nu(x, t->body->right)));
    }
    // E6: nu X.(X >< Y, G) -> nu X.(G<Y/X>) with the occurrence side condition
    if (t->body->kind == TermKind::Mol) {
      auto tryE6 = [&](const TermPtr& fus, const TermPtr& rest) {
        if (fus->kind != TermKind::Atom || fus->atomKind != AtomKind::Fusion) return;
        if (!fus->args[0].is_link() || !fus->args[1].is_link()) return;
        for (int o = 0; o < 2; o++) {
          LinkName a = fus->args[o].link, b = fus->args[1 - o].link;
          if (a != x) continue;
          auto fnRest = free_names(rest);
          if (!fnRest.count(a) && !fnRest.count(b)) continue;
          out.push_back(term_nu(x, subst_links(rest, {{x, b}})));
        }
      };
      tryE6(t->body->left, t->body->right);
      tryE6(t->body->right, t->body->left);
    }
  }
  return out;
}

inline std::vector<TermPtr> erule_one_step(const TermPtr& g) {
  std::vector<std::pair<TermPtr, std::function<TermPtr(TermPtr)>>> ctxs;
  collect_contexts(g, ctxs, [](TermPtr x) { return x; });
  std::vector<TermPtr> out;
  for (auto& [sub, rebuild] : ctxs)
    for (auto& stepped : erule_steps_at(sub)) out.push_back(rebuild(stepped));
  return out;
}

}  // namespace lgt::testing
