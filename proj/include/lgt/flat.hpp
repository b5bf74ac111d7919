#pragma once

// Flat multiset form of graphs and the structural-congruence decision
// procedure: flattening, fusion absorption (E6/E7 and the no-op binder
// eliminations), canonical ordering, and backtracking bijection search.

#include <algorithm>
#include <functional>
#include <map>
#include <sstream>

#include "lgt/core.hpp"

namespace lgt {

// Link in a flat graph: >= 0 is a local id, < 0 encodes free index ~v.
using FLink = int;
inline bool flink_local(FLink v) { return v >= 0; }
inline int flink_free_index(FLink v) { return -v - 1; }
inline FLink flink_free(int idx) { return -idx - 1; }

enum class ItemKind { Atom, Fusion, Ctx, Hole, TypeVar };

struct FlatItem {
  ItemKind kind = ItemKind::Atom;
  std::string name;   // Atom ctor name / Ctx name
  AbsPtr abs;         // Atom: abstraction name (ctor name empty then)
  TypeAtomPtr type;   // Hole/TypeVar shape; Ctx annotation; Atom arrow-type
  int holeId = -1;
  std::vector<FLink> args;
  std::vector<LinkName> ctxArgNames;  // Ctx only: surface names of the args

  bool is_ctor() const { return kind == ItemKind::Atom && !abs && !type; }
  bool is_abs() const { return kind == ItemKind::Atom && abs != nullptr; }
  bool is_arrow_atom() const { return kind == ItemKind::Atom && type != nullptr; }
  // root link: last argument (fusions are symmetric and handled separately)
  FLink root() const { return args.empty() ? 0 : args.back(); }
};

struct FlatGraph {
  std::vector<FlatItem> items;
  std::vector<std::string> frees;  // free index -> name
  int nlocals = 0;

  int intern_free(const std::string& name) {
    for (size_t i = 0; i < frees.size(); i++)
      if (frees[i] == name) return static_cast<int>(i);
    frees.push_back(name);
    return static_cast<int>(frees.size()) - 1;
  }
  FLink fresh_local() { return nlocals++; }
  std::string link_name(FLink v) const {
    if (flink_local(v)) return "@" + std::to_string(v);
    return frees[flink_free_index(v)];
  }
  std::set<std::string> free_set() const {
    std::set<std::string> s;
    for (auto& i : items)
      for (auto a : i.args)
        if (!flink_local(a)) s.insert(frees[flink_free_index(a)]);
    return s;
  }
};

// ---------------------------------------------------------------------------
// Fingerprints (grouping keys; true equality decided by comparators)

inline void type_fingerprint_into(const TypeAtomPtr& t, std::ostringstream& os,
                                  std::map<LinkName, int>& dbr) {
  if (!t) {
    os << "-";
    return;
  }
  if (!t->is_arrow()) {
    os << "v:" << t->var;
  } else {
    os << "(";
    type_fingerprint_into(t->dom, os, dbr);
    os << "[";
    for (auto& l : t->dom->links) {
      auto [it, fresh] = dbr.try_emplace(l, static_cast<int>(dbr.size()));
      os << it->second << ",";
    }
    os << "]->";
    type_fingerprint_into(t->cod, os, dbr);
    os << "[";
    for (auto& l : t->cod->links) {
      auto [it, fresh] = dbr.try_emplace(l, static_cast<int>(dbr.size()));
      os << it->second << ",";
    }
    os << "])";
  }
}

// Shape fingerprint: outer links excluded, arrow inner links de-bruijn'd.
inline std::string type_fingerprint(const TypeAtomPtr& t) {
  std::ostringstream os;
  std::map<LinkName, int> dbr;
  type_fingerprint_into(t, os, dbr);
  return os.str();
}

struct FpEnv {
  std::map<LinkName, std::string> links;
  std::map<std::string, std::string> ctxs;
  int nl = 0, nc = 0;
  std::string link(const LinkName& l) const {
    auto it = links.find(l);
    return it != links.end() ? it->second : "'" + l;
  }
  std::string ctx(const std::string& c) const {
    auto it = ctxs.find(c);
    return it != ctxs.end() ? it->second : "'" + c;
  }
  FpEnv bind_link(const LinkName& l) const {
    FpEnv e = *this;
    e.links[l] = "b" + std::to_string(e.nl++);
    return e;
  }
  FpEnv bind_ctx(const std::string& c) const {
    FpEnv e = *this;
    e.ctxs[c] = "k" + std::to_string(e.nc++);
    return e;
  }
};

inline void fp_expr(const ExprPtr& e, const FpEnv& env, std::ostringstream& os);

inline void fp_type(const TypeAtomPtr& t, const FpEnv& env, std::ostringstream& os) {
  if (!t) {
    os << "-";
    return;
  }
  std::ostringstream shape;
  std::map<LinkName, int> dbr;
  type_fingerprint_into(t, shape, dbr);
  os << shape.str() << "(";
  for (auto& l : t->links) os << env.link(l) << ",";
  os << ")";
}

inline void fp_term(const TermPtr& t, const FpEnv& env, std::ostringstream& os) {
  switch (t->kind) {
    case TermKind::Null:
      os << "0";
      return;
    case TermKind::Atom:
      switch (t->atomKind) {
        case AtomKind::Ctor:
          os << t->name;
          break;
        case AtomKind::Fusion:
          os << "><";
          break;
        case AtomKind::ArrowType:
          os << "W" << type_fingerprint(t->arrowType);
          break;
        case AtomKind::Abs: {
          FpEnv e = env.bind_ctx(t->abs->param);
          for (auto& l : t->abs->paramLinks) e = e.bind_link(l);
          os << "\\" << e.ctx(t->abs->param) << "[";
          for (auto& l : t->abs->paramLinks) os << e.link(l) << ",";
          os << "]:";
          fp_type(t->abs->anno, e, os);
          os << ".";
          fp_expr(t->abs->body, e, os);
          break;
        }
      }
      os << "(";
      for (auto& a : t->args) {
        if (a.is_link())
          os << env.link(a.link);
        else
          fp_term(a.nested, env, os);
        os << ",";
      }
      os << ")";
      return;
    case TermKind::Context:
      os << "$" << env.ctx(t->name) << "(";
      for (auto& a : t->args) {
        if (a.is_link())
          os << env.link(a.link);
        else
          fp_term(a.nested, env, os);
        os << ",";
      }
      os << "):";
      fp_type(t->anno, env, os);
      return;
    case TermKind::Mol:
      os << "(";
      fp_term(t->left, env, os);
      os << ",";
      fp_term(t->right, env, os);
      os << ")";
      return;
    case TermKind::Nu: {
      FpEnv e = env.bind_link(t->bound);
      os << "nu " << e.link(t->bound) << ".";
      fp_term(t->body, e, os);
      return;
    }
  }
}

inline void fp_expr(const ExprPtr& e, const FpEnv& env, std::ostringstream& os) {
  switch (e->kind) {
    case ExprKind::Graph:
      fp_term(e->graph, env, os);
      return;
    case ExprKind::Case:
      os << "case ";
      fp_expr(e->scrut, env, os);
      os << " of ";
      fp_term(e->pattern, env, os);
      os << "->";
      fp_expr(e->thenBranch, env, os);
      os << "|";
      fp_expr(e->elseBranch, env, os);
      return;
    case ExprKind::App:
      os << "(";
      fp_expr(e->fn, env, os);
      os << " ";
      fp_expr(e->arg, env, os);
      os << ")";
      return;
  }
}

inline std::string abs_fingerprint(const AbsPtr& abs) {
  std::ostringstream os;
  FpEnv env = FpEnv{}.bind_ctx(abs->param);
  for (auto& l : abs->paramLinks) env = env.bind_link(l);
  os << abs->paramLinks.size() << ":";
  fp_type(abs->anno, env, os);
  os << ".";
  fp_expr(abs->body, env, os);
  return os.str();
}

inline std::string item_group_key(const FlatItem& it) {
  std::ostringstream os;
  switch (it.kind) {
    case ItemKind::Atom:
      if (it.is_abs())
        os << "A:" << abs_fingerprint(it.abs);
      else if (it.is_arrow_atom())
        os << "W:" << type_fingerprint(it.type);
      else
        os << "C:" << it.name;
      break;
    case ItemKind::Fusion:
      os << "F";
      break;
    case ItemKind::Ctx:
      os << "X:" << it.name << ":" << type_fingerprint(it.type);
      break;
    case ItemKind::Hole:
      os << "H:" << type_fingerprint(it.type);
      break;
    case ItemKind::TypeVar:
      os << "T:" << type_fingerprint(it.type);
      break;
  }
  os << "/" << it.args.size();
  return os.str();
}

// Equality of the non-link part of two items (same group key semantics).
inline bool item_label_equal(const FlatItem& a, const FlatItem& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case ItemKind::Atom:
      if (a.is_abs() != b.is_abs() || a.is_arrow_atom() != b.is_arrow_atom()) return false;
      if (a.is_abs()) return abs_equal(a.abs, b.abs);
      if (a.is_arrow_atom()) return type_equal_mod_links(a.type, b.type);
      return a.name == b.name;
    case ItemKind::Fusion:
      return true;
    case ItemKind::Ctx:
      if (a.name != b.name) return false;
      if ((a.type == nullptr) != (b.type == nullptr)) return false;
      return !a.type || type_equal_mod_links(a.type, b.type);
    case ItemKind::Hole:
    case ItemKind::TypeVar:
      return type_equal_mod_links(a.type, b.type);
  }
  return false;
}

// ---------------------------------------------------------------------------
// Flattening. `typeNames` (optional) classifies atoms as grammar type atoms
// (used when flattening production-rule RHSs).

struct FlattenScope {
  std::vector<std::pair<LinkName, FLink>> binders;
  FLink lookup(const LinkName& n, FlatGraph& g) const {
    for (auto it = binders.rbegin(); it != binders.rend(); ++it)
      if (it->first == n) return it->second;
    return flink_free(g.intern_free(n));
  }
};

inline void flatten_into(const TermPtr& t0, FlatGraph& g, FlattenScope& sc,
                         const std::set<std::string>* typeNames) {
  TermPtr t = t0;
  switch (t->kind) {
    case TermKind::Null:
      return;
    case TermKind::Atom:
    case TermKind::Context: {
      FlatItem it;
      std::vector<FLink> args;
      for (auto& a : t->args) {
        if (!a.is_link()) throw LgtError("flatten: term notation not expanded");
        args.push_back(sc.lookup(a.link, g));
      }
      it.args = std::move(args);
      if (t->kind == TermKind::Context) {
        it.kind = ItemKind::Ctx;
        it.name = t->name;
        it.type = t->anno;
        for (auto& a : t->args) it.ctxArgNames.push_back(a.link);
      } else {
        switch (t->atomKind) {
          case AtomKind::Fusion:
            it.kind = ItemKind::Fusion;
            break;
          case AtomKind::Abs:
            it.kind = ItemKind::Atom;
            it.abs = t->abs;
            break;
          case AtomKind::ArrowType:
            it.kind = ItemKind::TypeVar;
            it.type = t->arrowType;
            break;
          case AtomKind::Ctor:
            if (typeNames && typeNames->count(t->name)) {
              it.kind = ItemKind::TypeVar;
              it.type = type_var(t->name, {});
            } else {
              it.kind = ItemKind::Atom;
              it.name = t->name;
            }
            break;
        }
      }
      g.items.push_back(std::move(it));
      return;
    }
    case TermKind::Mol:
      flatten_into(t->left, g, sc, typeNames);
      flatten_into(t->right, g, sc, typeNames);
      return;
    case TermKind::Nu: {
      sc.binders.push_back({t->bound, g.fresh_local()});
      flatten_into(t->body, g, sc, typeNames);
      sc.binders.pop_back();
      return;
    }
  }
}

inline FlatGraph flatten(const TermPtr& t, const std::set<std::string>* typeNames = nullptr) {
  FlatGraph g;
  FlattenScope sc;
  flatten_into(expand_term_notation(t), g, sc, typeNames);
  return g;
}

// ---------------------------------------------------------------------------
// Fusion absorption. Applies E6/E7 (plus the closed/self cases) until no
// fusion with an absorbable endpoint remains. Returns the accumulated link
// substitution so callers can remap external references (verifier roots).

inline int count_link_uses(const std::vector<FlatItem>& items, FLink l, int skipIdx) {
  int n = 0;
  for (size_t i = 0; i < items.size(); i++) {
    if (static_cast<int>(i) == skipIdx) continue;
    for (auto a : items[i].args)
      if (a == l) n++;
  }
  return n;
}

inline void apply_link_subst_items(std::vector<FlatItem>& items, FLink from, FLink to) {
  for (auto& it : items)
    for (auto& a : it.args)
      if (a == from) a = to;
}

inline std::map<FLink, FLink> absorb_fusions(std::vector<FlatItem>& items) {
  std::map<FLink, FLink> subst;
  auto record = [&](FLink from, FLink to) {
    for (auto& [k, v] : subst)
      if (v == from) v = to;
    subst[from] = to;
  };
  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = 0; i < items.size(); i++) {
      if (items[i].kind != ItemKind::Fusion) continue;
      FLink a = items[i].args[0], b = items[i].args[1];
      int idx = static_cast<int>(i);
      if (a == b) {
        if (flink_local(a)) {  // nu X.(X><X, G) == nu X.G; closed case drops too
          items.erase(items.begin() + i);
          changed = true;
          break;
        }
        continue;  // free self-fusion: not derivably removable
      }
      bool la = flink_local(a), lb = flink_local(b);
      if (la && lb) {
        FLink keep = std::min(a, b), drop = std::max(a, b);
        items.erase(items.begin() + i);
        apply_link_subst_items(items, drop, keep);
        record(drop, keep);
        changed = true;
        break;
      }
      if (la || lb) {
        FLink loc = la ? a : b, fre = la ? b : a;
        // E6 side condition: one endpoint must occur in the rest
        if (count_link_uses(items, loc, idx) > 0 || count_link_uses(items, fre, idx) > 0) {
          items.erase(items.begin() + i);
          apply_link_subst_items(items, loc, fre);
          record(loc, fre);
          changed = true;
          break;
        }
        // dangling nu X.(X >< Y): congruent to the self fusion Y >< Y
        items[i].args = {fre, fre};
        record(loc, fre);
        changed = true;
        break;
      }
      // free-free: kept
    }
  }
  return subst;
}

// ---------------------------------------------------------------------------
// Canonical form: absorb fusions, drop unused binders, renumber locals in a
// deterministic order, sort items.

inline std::string item_sort_pattern(const FlatItem& it, const FlatGraph& g,
                                     bool concreteLocals) {
  std::ostringstream os;
  os << item_group_key(it) << "|";
  for (auto a : it.args) {
    if (flink_local(a))
      os << (concreteLocals ? "@" + std::to_string(a) : "@") << ".";
    else
      os << g.frees[flink_free_index(a)] << ".";
  }
  return os.str();
}

// Free links joined by surviving fusions form interchangeable classes
// (via E6 applied under a re-introduced binder): rewrite every occurrence
// onto the class representative (smallest name) and keep a canonical star
// of fusions. Returns the member -> representative substitution.
inline std::map<FLink, FLink> collapse_fusion_classes(std::vector<FlatItem>& items,
                                                      const std::vector<std::string>& frees) {
  std::map<FLink, FLink> subst;
  std::map<int, int> parent;  // free index -> free index
  std::function<int(int)> find = [&](int x) {
    auto it = parent.find(x);
    if (it == parent.end() || it->second == x) return x;
    int r = find(it->second);
    parent[x] = r;
    return r;
  };
  auto unite = [&](int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (frees[static_cast<size_t>(b)] < frees[static_cast<size_t>(a)]) std::swap(a, b);
    parent[b] = a;
  };
  std::set<int> fusionRoots;
  bool any = false;
  for (auto& it : items) {
    if (it.kind != ItemKind::Fusion) continue;
    if (flink_local(it.args[0]) || flink_local(it.args[1])) continue;
    unite(flink_free_index(it.args[0]), flink_free_index(it.args[1]));
    any = true;
  }
  if (!any) return subst;
  for (auto it = items.begin(); it != items.end();) {
    if (it->kind == ItemKind::Fusion && !flink_local(it->args[0]) &&
        !flink_local(it->args[1])) {
      fusionRoots.insert(find(flink_free_index(it->args[0])));
      it = items.erase(it);
    } else {
      ++it;
    }
  }
  for (auto& it : items)
    for (auto& a : it.args)
      if (!flink_local(a)) a = flink_free(find(flink_free_index(a)));
  for (int root : fusionRoots) {
    std::vector<std::pair<std::string, int>> members;
    for (size_t i = 0; i < frees.size(); i++)
      if (find(static_cast<int>(i)) == root && static_cast<int>(i) != root) {
        members.push_back({frees[i], static_cast<int>(i)});
        subst[flink_free(static_cast<int>(i))] = flink_free(root);
      }
    std::sort(members.begin(), members.end());
    // spanning star; duplicates and self fusions collapse (E6 under a
    // re-introduced binder), except a lone self on an otherwise unused
    // link, which must stay to preserve the free-link set
    for (auto& [name, idx] : members) {
      FlatItem fu;
      fu.kind = ItemKind::Fusion;
      fu.args = {flink_free(root), flink_free(idx)};
      items.push_back(std::move(fu));
    }
    if (members.empty() && count_link_uses(items, flink_free(root), -1) == 0) {
      FlatItem fu;
      fu.kind = ItemKind::Fusion;
      fu.args = {flink_free(root), flink_free(root)};
      items.push_back(std::move(fu));
    }
  }
  return subst;
}

inline void canonicalize(FlatGraph& g) {
  absorb_fusions(g.items);
  collapse_fusion_classes(g.items, g.frees);
  // normalize fusion arg order for display stability
  for (auto& it : g.items)
    if (it.kind == ItemKind::Fusion && it.args[1] < it.args[0]) std::swap(it.args[0], it.args[1]);
  // first pass: sort with locals abstracted
  std::stable_sort(g.items.begin(), g.items.end(), [&](const FlatItem& x, const FlatItem& y) {
    return item_sort_pattern(x, g, false) < item_sort_pattern(y, g, false);
  });
  // renumber locals by first occurrence
  std::map<FLink, FLink> renum;
  int next = 0;
  for (auto& it : g.items)
    for (auto& a : it.args)
      if (flink_local(a)) {
        auto [p, fresh] = renum.try_emplace(a, next);
        if (fresh) next++;
        a = p->second;
      }
  g.nlocals = next;
  // final deterministic order
  std::stable_sort(g.items.begin(), g.items.end(), [&](const FlatItem& x, const FlatItem& y) {
    return item_sort_pattern(x, g, true) < item_sort_pattern(y, g, true);
  });
}

inline FlatGraph normalize(const TermPtr& t, const std::set<std::string>* typeNames = nullptr) {
  FlatGraph g = flatten(t, typeNames);
  canonicalize(g);
  return g;
}

// ---------------------------------------------------------------------------
// Congruence: bijection search over canonical forms. With renameFrees the
// free links are also matched bijectively (used for hypothesis lookup
// modulo Ty-Alpha); otherwise free links must agree by name.

namespace detail {

struct CongSearch {
  const FlatGraph& A;
  const FlatGraph& B;
  bool renameFrees;
  std::map<FLink, FLink> fwd, bwd;
  std::vector<char> used;

  bool unify(FLink x, FLink y, std::vector<std::pair<FLink, FLink>>& journal) {
    if (flink_local(x) != flink_local(y)) return false;
    if (!flink_local(x) && !renameFrees) {
      return A.frees[flink_free_index(x)] == B.frees[flink_free_index(y)];
    }
    auto i = fwd.find(x);
    auto j = bwd.find(y);
    if (i != fwd.end() || j != bwd.end())
      return i != fwd.end() && j != bwd.end() && i->second == y && j->second == x;
    fwd[x] = y;
    bwd[y] = x;
    journal.push_back({x, y});
    return true;
  }
  void undo(std::vector<std::pair<FLink, FLink>>& journal, size_t mark) {
    while (journal.size() > mark) {
      auto [x, y] = journal.back();
      journal.pop_back();
      fwd.erase(x);
      bwd.erase(y);
    }
  }

  bool match_args(const FlatItem& a, const FlatItem& b,
                  std::vector<std::pair<FLink, FLink>>& journal) {
    if (a.args.size() != b.args.size()) return false;
    size_t mark = journal.size();
    bool ok = true;
    for (size_t k = 0; k < a.args.size(); k++)
      if (!unify(a.args[k], b.args[k], journal)) {
        ok = false;
        break;
      }
    if (!ok) undo(journal, mark);
    return ok;
  }

  bool go(size_t i, std::vector<std::pair<FLink, FLink>>& journal) {
    if (i == A.items.size()) return true;
    const FlatItem& a = A.items[i];
    for (size_t j = 0; j < B.items.size(); j++) {
      if (used[j]) continue;
      const FlatItem& b = B.items[j];
      if (!item_label_equal(a, b)) continue;
      size_t mark = journal.size();
      bool argsOk;
      if (a.kind == ItemKind::Fusion) {
        argsOk = match_args(a, b, journal);
        if (!argsOk) {
          FlatItem r = b;
          std::swap(r.args[0], r.args[1]);
          argsOk = match_args(a, r, journal);
        }
      } else {
        argsOk = match_args(a, b, journal);
      }
      if (argsOk) {
        used[j] = 1;
        if (go(i + 1, journal)) return true;
        used[j] = 0;
        undo(journal, mark);
      }
    }
    return false;
  }
};

}  // namespace detail

// Precondition: both graphs already canonicalized.
inline bool congruent_canon(const FlatGraph& a, const FlatGraph& b, bool renameFrees = false) {
  if (a.items.size() != b.items.size()) return false;
  if (a.nlocals != b.nlocals) return false;
  if (!renameFrees && a.free_set() != b.free_set()) return false;
  if (renameFrees && a.free_set().size() != b.free_set().size()) return false;
  // group-key multisets must agree
  std::vector<std::string> ka, kb;
  for (auto& it : a.items) ka.push_back(item_group_key(it));
  for (auto& it : b.items) kb.push_back(item_group_key(it));
  std::sort(ka.begin(), ka.end());
  std::sort(kb.begin(), kb.end());
  if (ka != kb) return false;
  detail::CongSearch s{a, b, renameFrees, {}, {}, std::vector<char>(b.items.size(), 0)};
  std::vector<std::pair<FLink, FLink>> journal;
  return s.go(0, journal);
}

inline bool congruent_flat(const FlatGraph& a0, const FlatGraph& b0, bool renameFrees = false) {
  FlatGraph a = a0, b = b0;
  canonicalize(a);
  canonicalize(b);
  return congruent_canon(a, b, renameFrees);
}

// Congruence-invariant bucket key for deduplication sets (canonical input).
inline std::string congruence_bucket_key(const FlatGraph& g) {
  std::vector<std::string> ks;
  for (auto& it : g.items) ks.push_back(item_group_key(it));
  std::sort(ks.begin(), ks.end());
  std::ostringstream os;
  os << g.nlocals << "|";
  for (auto& n : g.free_set()) os << n << ",";
  os << "|";
  for (auto& k : ks) os << k << ";";
  return os.str();
}

inline bool congruent(const TermPtr& a, const TermPtr& b) {
  return congruent_flat(flatten(a), flatten(b));
}

// ---------------------------------------------------------------------------
// Rebuild a template from a flat graph (locals become fresh nu binders).

inline TermPtr unflatten(const FlatGraph& g) {
  std::map<FLink, LinkName> names;
  for (int i = 0; i < g.nlocals; i++) names[i] = fresh_link();
  auto lname = [&](FLink v) -> LinkName {
    if (flink_local(v)) return names.at(v);
    return g.frees[flink_free_index(v)];
  };
  std::vector<TermPtr> parts;
  std::set<FLink> usedLocals;
  for (auto& it : g.items) {
    std::vector<Arg> args;
    for (auto a : it.args) {
      args.push_back(arg_link(lname(a)));
      if (flink_local(a)) usedLocals.insert(a);
    }
    switch (it.kind) {
      case ItemKind::Fusion:
        parts.push_back(term_fusion(args[0].link, args[1].link));
        break;
      case ItemKind::Atom:
        if (it.is_abs())
          parts.push_back(term_abs(it.abs, std::move(args)));
        else if (it.is_arrow_atom())
          parts.push_back(term_arrow_atom(it.type, std::move(args)));
        else
          parts.push_back(term_atom(it.name, std::move(args)));
        break;
      case ItemKind::Ctx:
        parts.push_back(term_context(it.name, std::move(args), it.type));
        break;
      case ItemKind::Hole: {
        // holes re-materialize as annotated contexts (diagnostics only)
        TypeAtomPtr tn;
        if (it.type) {
          std::vector<LinkName> ls;
          for (auto& a2 : args) ls.push_back(a2.link);
          tn = type_with_links(it.type, ls);
        }
        parts.push_back(term_context("hole" + std::to_string(it.holeId), std::move(args), tn));
        break;
      }
      case ItemKind::TypeVar: {
        if (it.type && it.type->is_arrow()) {
          parts.push_back(term_arrow_atom(it.type, std::move(args)));
        } else {
          parts.push_back(term_atom(it.type->var, std::move(args)));
        }
        break;
      }
    }
  }
  TermPtr body = term_mol_all(parts);
  for (auto it = usedLocals.rbegin(); it != usedLocals.rend(); ++it)
    body = term_nu(names.at(*it), body);
  return body;
}

}  // namespace lgt
