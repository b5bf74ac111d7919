#pragma once

// The automatic graph type checker: structural-induction proof search with
// induction hypotheses, forward production application on the annotation,
// universal decomposition of annotated holes, and link-correspondence
// tracking. Also expression-level typing (Ty-App/Arrow/Var/Case) and the
// template check that discharges substitution obligations at rank zero.

#include <atomic>

#include "lgt/grammar.hpp"
#include "lgt/printer.hpp"

namespace lgt {

struct VerifyStats {
  std::atomic<long> descentViolations{0};
  std::atomic<long> depthExceededCount{0};
  std::atomic<long> hypothesisHits{0};
  static VerifyStats& instance() {
    static VerifyStats s;
    return s;
  }
};

struct VerifyConfig {
  int depthLimit = 64;
  bool trace = false;
};

struct VerifyOutcome {
  bool accepted = false;
  bool depthExceeded = false;
  std::string diag;  // deepest failing obligation
  std::vector<std::string> trace;
};

struct TypeError : LgtError {
  using LgtError::LgtError;
};

// Typing context Gamma: context functor -> (formal links, type).
struct TypingContext {
  struct Entry {
    std::vector<LinkName> formals;
    TypeAtomPtr type;
  };
  std::map<Functor, Entry> bindings;

  const Entry* lookup(const Functor& f) const {
    auto it = bindings.find(f);
    return it != bindings.end() ? &it->second : nullptr;
  }
  TypingContext with(const Functor& f, Entry e) const {
    TypingContext c = *this;
    c.bindings[f] = std::move(e);
    return c;
  }
};

// ---------------------------------------------------------------------------
// Link correspondence (annotation link -> target link), injective on
// assigned target locals; free target links must match by name (shared
// free-index space makes that an index comparison).

struct LinkCorrespondence {
  std::map<FLink, FLink> map;  // annotation -> target
  std::set<FLink> assigned;    // target links already taken
};

inline std::optional<LinkCorrespondence> check_link_name(const LinkCorrespondence& f, FLink x,
                                                         FLink y) {
  if (!flink_local(x)) {
    // target link is free: annotation link must be the same free link and
    // must not already be mapped elsewhere
    if (y == x && !f.map.count(y)) return f;
    auto it = f.map.find(y);
    if (it != f.map.end() && it->second == x) return f;  // re-encounter
    return std::nullopt;
  }
  auto it = f.map.find(y);
  if (it == f.map.end()) {
    if (f.assigned.count(x)) return std::nullopt;  // injectivity
    LinkCorrespondence g = f;
    g.map[y] = x;
    g.assigned.insert(x);
    return g;
  }
  if (it->second == x) return f;
  return std::nullopt;
}

// ---------------------------------------------------------------------------

namespace vdetail {

inline std::string unalias(const std::string& n) {
  const std::string suf = "#b";
  if (n.size() > suf.size() && n.compare(n.size() - suf.size(), suf.size(), suf) == 0)
    return n.substr(0, n.size() - suf.size());
  return n;
}

struct VCtx {
  const Grammar& orig;
  const VerifierGrammar& ver;
  VerifyConfig cfg;
  std::vector<std::string> frees;  // shared free table (append only)
  int tLocals = 0;
  int aLocals = 0;
  int nextHole = 0;
  VerifyOutcome* out = nullptr;
  long ruleApplications = 0;

  int intern_free(const std::string& n) {
    for (size_t i = 0; i < frees.size(); i++)
      if (frees[i] == n) return static_cast<int>(i);
    frees.push_back(n);
    return static_cast<int>(frees.size()) - 1;
  }
  std::string link_str(FLink v, bool target) const {
    if (flink_local(v)) return (target ? "@t" : "@a") + std::to_string(v);
    return frees[flink_free_index(v)];
  }
};

struct DepthExceededError {};

using Items = std::vector<FlatItem>;

inline std::string items_str(const VCtx& c, const Items& v, bool target) {
  std::ostringstream os;
  os << "{";
  for (size_t i = 0; i < v.size(); i++) {
    if (i) os << ", ";
    const FlatItem& it = v[i];
    switch (it.kind) {
      case ItemKind::Fusion:
        os << c.link_str(it.args[0], target) << "><" << c.link_str(it.args[1], target);
        continue;
      case ItemKind::Hole:
        os << "<" << (it.type && !it.type->is_arrow() ? it.type->var : "->") << ">";
        break;
      case ItemKind::TypeVar:
        os << (it.type && !it.type->is_arrow() ? it.type->var : std::string("(->)"));
        break;
      case ItemKind::Ctx:
        os << "$" << it.name;
        break;
      case ItemKind::Atom:
        os << (it.is_abs() ? std::string("\\") : it.is_arrow_atom() ? "(->)" : it.name);
        break;
    }
    os << "(";
    for (size_t k = 0; k < it.args.size(); k++)
      os << (k ? "," : "") << c.link_str(it.args[k], target);
    os << ")";
  }
  os << "}";
  return os.str();
}

// Hypotheses: the pair (target subgraph, goal atom) in a link-renamable
// canonical form. A hypothesis may only be applied after at least one
// constructor pair has been removed since it was added (infinite descent).
struct Hyp {
  FlatGraph pair;
  long removalsAtAdd;
};

inline std::optional<FlatGraph> hyp_pair(const VCtx&, const Items& target,
                                         const std::string& goalName,
                                         const std::vector<FLink>& goalArgsTarget) {
  FlatGraph g;
  std::map<FLink, FLink> remap;  // target link -> pair link
  int nextLocal = 0;
  std::set<FLink> interface(goalArgsTarget.begin(), goalArgsTarget.end());
  auto conv = [&](FLink v) -> FLink {
    auto it = remap.find(v);
    if (it != remap.end()) return it->second;
    FLink r;
    if (interface.count(v))
      r = flink_free(g.intern_free("i" + std::to_string(g.frees.size())));
    else
      r = nextLocal++;
    remap[v] = r;
    return r;
  };
  for (auto a : goalArgsTarget) conv(a);
  FlatItem goal;
  goal.kind = ItemKind::TypeVar;
  goal.type = type_var("#goal:" + goalName, {});
  for (auto a : goalArgsTarget) goal.args.push_back(remap.at(a));
  g.items.push_back(goal);
  for (auto& it : target) {
    FlatItem x = it;
    for (auto& a : x.args) a = conv(a);
    g.items.push_back(std::move(x));
  }
  g.nlocals = nextLocal;
  return g;
}

// Resolve annotation-side links of a goal atom to target links via f.
inline std::optional<std::vector<FLink>> anno_args_to_target(const LinkCorrespondence& f,
                                                             const std::vector<FLink>& args) {
  std::vector<FLink> out;
  for (auto a : args) {
    if (!flink_local(a)) {
      out.push_back(a);
      continue;
    }
    auto it = f.map.find(a);
    if (it == f.map.end()) return std::nullopt;
    out.push_back(it->second);
  }
  return out;
}

struct Checker {
  VCtx& c;

  const std::vector<ProductionRule>& rules_for_anno(const std::string& name) const {
    std::string base = unalias(name);
    if (base != name) return c.ver.start_rules(base);
    return c.ver.inner_rules(name);
  }

  void fail(int depth, const std::string& msg, const Items& t, const Items& a) const {
    if (!c.out) return;
    if (depth >= 0 && (c.out->diag.empty() || depth > failDepth)) {
      failDepth = depth;
      c.out->diag = msg + "\n  target:     " + items_str(c, t, true) +
                    "\n  annotation: " + items_str(c, a, false);
    }
  }
  mutable int failDepth = -1;

  void trace(int depth, const std::string& msg) const {
    if (c.cfg.trace && c.out)
      c.out->trace.push_back(std::string(static_cast<size_t>(depth) * 2, ' ') + msg);
  }

  // Items whose root is l; fusions count at either endpoint.
  static std::vector<int> items_at(const Items& v, FLink l) {
    std::vector<int> out;
    for (size_t i = 0; i < v.size(); i++) {
      if (v[i].kind == ItemKind::Fusion) {
        if (v[i].args[0] == l || v[i].args[1] == l) out.push_back(static_cast<int>(i));
      } else if (!v[i].args.empty() && v[i].root() == l) {
        out.push_back(static_cast<int>(i));
      }
    }
    return out;
  }

  // Split unconsumed items into per-argument regions by simultaneous
  // breadth-first ownership from the argument links. Fused roots make links
  // shared across subtrees, so sequential closure would over-grab.
  static std::vector<std::vector<int>> split_regions(const Items& v,
                                                     const std::vector<char>& consumed,
                                                     const std::vector<FLink>& sources) {
    size_t m = sources.size();
    std::vector<std::vector<int>> regions(m);
    std::vector<std::set<FLink>> frontier(m);
    for (size_t j = 0; j < m; j++) frontier[j].insert(sources[j]);
    std::vector<char> taken(v.size(), 0);
    bool grew = true;
    while (grew) {
      grew = false;
      std::vector<std::vector<int>> newly(m);
      for (size_t j = 0; j < m; j++) {
        for (size_t i = 0; i < v.size(); i++) {
          if (consumed[i] || taken[i]) continue;
          bool hit = false;
          if (v[i].kind == ItemKind::Fusion)
            hit = frontier[j].count(v[i].args[0]) || frontier[j].count(v[i].args[1]);
          else if (!v[i].args.empty())
            hit = frontier[j].count(v[i].root()) > 0;
          if (hit) {
            taken[i] = 1;
            newly[j].push_back(static_cast<int>(i));
            regions[j].push_back(static_cast<int>(i));
            grew = true;
          }
        }
      }
      for (size_t j = 0; j < m; j++)
        for (int i : newly[j])
          for (auto a : v[static_cast<size_t>(i)].args) frontier[j].insert(a);
    }
    return regions;
  }

  // Fusion absorption plus class collapse over target items mid-proof;
  // remaps the correspondence (range), the assigned set and the roots.
  void absorb_target(Items& items, LinkCorrespondence& f, std::vector<FLink*> roots) const {
    auto subst = absorb_fusions(items);
    for (auto& [k, v] : collapse_fusion_classes(items, c.frees)) {
      for (auto& [sk, sv] : subst)
        if (sv == k) sv = v;
      subst[k] = v;
    }
    if (subst.empty()) return;
    auto remap = [&](FLink v) {
      auto it = subst.find(v);
      return it != subst.end() ? it->second : v;
    };
    for (auto& [k, v] : f.map) v = remap(v);
    std::set<FLink> as;
    for (auto v : f.assigned) as.insert(remap(v));
    f.assigned = std::move(as);
    for (auto* r : roots) *r = remap(*r);
  }

  // Fusion absorption plus class collapse over annotation items; remaps f's
  // keys and the roots.
  void absorb_anno(Items& items, LinkCorrespondence& f, std::vector<FLink*> roots) const {
    auto subst = absorb_fusions(items);
    for (auto& [k, v] : collapse_fusion_classes(items, c.frees)) {
      for (auto& [sk, sv] : subst)
        if (sv == k) sv = v;
      subst[k] = v;
    }
    if (subst.empty()) return;
    auto remap = [&](FLink v) {
      auto it = subst.find(v);
      return it != subst.end() ? it->second : v;
    };
    std::map<FLink, FLink> m;
    for (auto& [k, v] : f.map) {
      FLink nk = remap(k);
      auto ex = m.find(nk);
      if (ex != m.end() && ex->second != v) {
        // two fused annotation links were bound to different targets;
        // leave one binding, the mismatch will surface at link checks
      }
      m[nk] = v;
    }
    f.map = std::move(m);
    for (auto* r : roots) *r = remap(*r);
  }

  std::vector<FlatItem> instantiate(const ProductionRule& r, const std::vector<FLink>& args,
                                    bool targetSide) {
    FlatGraph host;
    host.frees = c.frees;
    host.nlocals = targetSide ? c.tLocals : c.aLocals;
    auto items = instantiate_rhs(c.orig, r, args, host);
    c.frees = host.frees;
    (targetSide ? c.tLocals : c.aLocals) = host.nlocals;
    if (targetSide) {
      for (auto& it : items) {
        if (it.kind == ItemKind::TypeVar) {
          it.kind = ItemKind::Hole;
          it.holeId = c.nextHole++;
        }
      }
    }
    return items;
  }

  // -------------------------------------------------------------------
  // helper(R, G, Tau, H): returns the extended correspondence on success.

  std::optional<LinkCorrespondence> helper(Items target, Items anno, FLink rootT, FLink rootA,
                                           LinkCorrespondence f, const std::vector<Hyp>& H,
                                           long removals, int depth) {
    if (depth > c.cfg.depthLimit) {
      VerifyStats::instance().depthExceededCount++;
      throw DepthExceededError{};
    }

    // trivial acceptance: single hole vs single type atom
    if (target.size() == 1 && anno.size() == 1 && target[0].kind == ItemKind::Hole &&
        anno[0].kind == ItemKind::TypeVar) {
      const FlatItem& h = target[0];
      const FlatItem& a = anno[0];
      bool namesOk;
      if (h.type->is_arrow() || a.type->is_arrow())
        namesOk = h.type->is_arrow() && a.type->is_arrow() &&
                  type_equal_mod_links(h.type, a.type);
      else
        namesOk = h.type->var == unalias(a.type->var);
      if (namesOk && h.args.size() == a.args.size()) {
        LinkCorrespondence g = f;
        bool ok = true;
        for (size_t i = 0; i < h.args.size() && ok; i++) {
          auto r = check_link_name(g, h.args[i], a.args[i]);
          if (!r)
            ok = false;
          else
            g = *r;
        }
        if (ok) {
          trace(depth, "trivial: hole matches goal");
          return g;
        }
      }
      // fall through: decomposition may still succeed
    }

    // candidate root items; fused roots can put several atoms on one link,
    // so the pairing backtracks
    std::vector<int> tCand, aCand;
    for (int i : items_at(target, rootT))
      if (target[static_cast<size_t>(i)].kind != ItemKind::Fusion) tCand.push_back(i);
    for (int i : items_at(anno, rootA))
      if (anno[static_cast<size_t>(i)].kind != ItemKind::Fusion) aCand.push_back(i);
    // fall back to fusions at the root when a side has no atom there
    if (tCand.empty())
      for (int i : items_at(target, rootT)) tCand.push_back(i);
    if (aCand.empty())
      for (int i : items_at(anno, rootA)) aCand.push_back(i);
    if (tCand.empty() && aCand.empty()) {
      // nothing at this root on either side: leftover must be fusions that
      // pair up among themselves
      return residue(std::move(target), std::move(anno), f, depth);
    }
    if (tCand.empty() || aCand.empty()) {
      fail(depth, std::string("subgraph present on ") + (tCand.empty() ? "annotation" : "target") +
                      " side only at a shared argument position",
           target, anno);
      return std::nullopt;
    }

    for (int ti : tCand) {
      for (int ai : aCand) {
        const FlatItem& tIt = target[static_cast<size_t>(ti)];
        const FlatItem& aIt = anno[static_cast<size_t>(ai)];
        std::optional<LinkCorrespondence> r;
        if (tIt.kind == ItemKind::Hole && !tIt.type->is_arrow()) {
          // annotated hole at the target root: universal decomposition
          r = hole_case(target, anno, ti, ai, rootT, rootA, f, H, removals, depth);
        } else if (aIt.kind == ItemKind::TypeVar && !aIt.type->is_arrow()) {
          // type atom at the annotation root: hypotheses, then Ty-Prod
          r = prod_case(target, anno, ai, rootT, rootA, f, H, removals, depth);
        } else {
          r = structural_case(target, anno, ti, ai, rootT, rootA, f, H, removals, depth);
        }
        if (r) return r;
      }
    }
    return std::nullopt;
  }

  std::optional<LinkCorrespondence> residue(Items target, Items anno, LinkCorrespondence f,
                                            int depth) {
    // all remaining items must be fusions, paired bijectively
    for (auto& it : target)
      if (it.kind != ItemKind::Fusion) {
        fail(depth, "unmatched target items remain", target, anno);
        return std::nullopt;
      }
    for (auto& it : anno)
      if (it.kind != ItemKind::Fusion) {
        fail(depth, "unmatched annotation items remain", target, anno);
        return std::nullopt;
      }
    if (target.size() != anno.size()) {
      fail(depth, "fusion counts differ", target, anno);
      return std::nullopt;
    }
    return pair_fusions(target, anno, 0, std::vector<char>(target.size(), 0), f, depth);
  }

  std::optional<LinkCorrespondence> pair_fusions(const Items& target, const Items& anno,
                                                 size_t ai, std::vector<char> used,
                                                 LinkCorrespondence f, int depth) {
    if (ai == anno.size()) return f;
    for (size_t t = 0; t < target.size(); t++) {
      if (used[t]) continue;
      for (int orient = 0; orient < 2; orient++) {
        FLink x0 = target[t].args[orient], x1 = target[t].args[1 - orient];
        auto f1 = check_link_name(f, x0, anno[ai].args[0]);
        if (!f1) continue;
        auto f2 = check_link_name(*f1, x1, anno[ai].args[1]);
        if (!f2) continue;
        auto u2 = used;
        u2[t] = 1;
        auto r = pair_fusions(target, anno, ai + 1, std::move(u2), *f2, depth);
        if (r) return r;
      }
    }
    fail(depth, "leftover fusions do not correspond", target, anno);
    return std::nullopt;
  }

  // (annotated hole, anything): universal decomposition over the hole
  // type's original productions. Hypotheses are consulted first.
  std::optional<LinkCorrespondence> hole_case(Items target, Items anno, int ti, int ai,
                                              FLink rootT, FLink rootA, LinkCorrespondence f,
                                              const std::vector<Hyp>& H, long removals,
                                              int depth) {
    const FlatItem hole = target[ti];
    const FlatItem aIt0 = anno[ai];

    // hypothesis lookup (modulo congruence and free-link renaming)
    if (aIt0.kind == ItemKind::TypeVar && !aIt0.type->is_arrow() && anno.size() == 1) {
      if (use_hypothesis(target, aIt0, f, H, removals, depth)) return f;
    }

    auto rules = c.orig.rules_of(hole.type->var);
    std::vector<const ProductionRule*> applicable;
    for (auto* r : rules)
      if (r->headLinks.size() == hole.args.size()) applicable.push_back(r);
    if (applicable.empty()) {
      fail(depth, "no productions for hole type " + hole.type->var + "/" +
                      std::to_string(hole.args.size()),
           target, anno);
      return std::nullopt;
    }
    trace(depth, "decompose hole " + hole.type->var + " (" +
                     std::to_string(applicable.size()) + " productions, all must hold)");
    for (auto* r : applicable) {
      Items t2 = target;
      t2.erase(t2.begin() + ti);
      auto inst = instantiate(*r, hole.args, /*targetSide=*/true);
      for (auto& it : inst) t2.push_back(it);
      LinkCorrespondence f2 = f;
      FLink rt2 = rootT, ra2 = rootA;
      absorb_target(t2, f2, {&rt2});
      auto res = helper(std::move(t2), anno, rt2, ra2, f2, H, removals, depth + 1);
      if (!res) {
        fail(depth, "decomposition branch failed (production at line " +
                        std::to_string(r->line) + " of " + hole.type->var + ")",
             target, anno);
        return std::nullopt;
      }
    }
    return f;
  }

  // (constructor/fusion at target root, type atom at annotation root):
  // hypotheses, then exists-choice of a production applied forward.
  std::optional<LinkCorrespondence> prod_case(Items target, Items anno, int ai, FLink rootT,
                                              FLink rootA, LinkCorrespondence f,
                                              const std::vector<Hyp>& H, long removals,
                                              int depth) {
    const FlatItem aIt = anno[ai];
    if (anno.size() == 1) {
      if (use_hypothesis(target, aIt, f, H, removals, depth)) return f;
    }

    const auto& rules = rules_for_anno(aIt.type->var);
    std::vector<const ProductionRule*> applicable;
    for (auto& r : rules)
      if (r.headLinks.size() == aIt.args.size()) applicable.push_back(&r);
    if (applicable.empty()) {
      fail(depth, "no productions for goal type " + unalias(aIt.type->var) + "/" +
                      std::to_string(aIt.args.size()),
           target, anno);
      return std::nullopt;
    }

    // the new induction hypothesis (added when a production is applied)
    std::vector<Hyp> H2 = H;
    if (anno.size() == 1) {
      auto goalArgs = anno_args_to_target(f, aIt.args);
      if (goalArgs) {
        auto pair = hyp_pair(c, target, unalias(aIt.type->var), *goalArgs);
        if (pair) H2.push_back(Hyp{*pair, removals});
      }
    }

    trace(depth, "apply a production of " + unalias(aIt.type->var) + " (" +
                     std::to_string(applicable.size()) + " candidates, one must hold)");
    for (auto* r : applicable) {
      Items a2 = anno;
      a2.erase(a2.begin() + ai);
      auto inst = instantiate(*r, aIt.args, /*targetSide=*/false);
      for (auto& it : inst) a2.push_back(it);
      LinkCorrespondence f2 = f;
      FLink rt2 = rootT, ra2 = rootA;
      absorb_anno(a2, f2, {&ra2});
      c.ruleApplications++;
      try {
        auto res = helper(target, std::move(a2), rt2, ra2, f2, H2, removals, depth + 1);
        if (res) return f;  // branch-internal bindings stay branch-local
      } catch (DepthExceededError&) {
        throw;
      }
    }
    fail(depth, "no production of " + unalias(aIt.type->var) + " matches", target, anno);
    return std::nullopt;
  }

  bool use_hypothesis(const Items& target, const FlatItem& goalAtom,
                      const LinkCorrespondence& f, const std::vector<Hyp>& H, long removals,
                      int depth) {
    if (H.empty()) return false;
    auto goalArgs = anno_args_to_target(f, goalAtom.args);
    if (!goalArgs) return false;
    auto pair = hyp_pair(c, target, unalias(goalAtom.type->var), *goalArgs);
    if (!pair) return false;
    for (auto& h : H) {
      if (congruent_flat(h.pair, *pair, /*renameFrees=*/true)) {
        if (removals <= h.removalsAtAdd) {
          // the infinite-descent guard: no constructor was removed since
          // this hypothesis was added, so applying it would be unsound
          VerifyStats::instance().descentViolations++;
          continue;
        }
        VerifyStats::instance().hypothesisHits++;
        trace(depth, "induction hypothesis applies");
        return true;
      }
    }
    return false;
  }

  // structural: constructor/constructor, fusion/fusion, abstraction or
  // arrow-hole against arrow atom
  std::optional<LinkCorrespondence> structural_case(Items target, Items anno, int ti, int ai,
                                                    FLink rootT, FLink /*rootA*/,
                                                    LinkCorrespondence f,
                                                    const std::vector<Hyp>& H, long removals,
                                                    int depth) {
    const FlatItem tIt = target[ti];
    const FlatItem aIt = anno[ai];

    bool labelOk = false;
    if (tIt.kind == ItemKind::Fusion && aIt.kind == ItemKind::Fusion) {
      // handled below with orientation backtracking
      labelOk = true;
    } else if (tIt.is_ctor() && aIt.is_ctor()) {
      labelOk = tIt.name == aIt.name && tIt.args.size() == aIt.args.size();
    } else if (tIt.kind == ItemKind::Hole && tIt.type->is_arrow() &&
               aIt.kind == ItemKind::TypeVar && aIt.type->is_arrow()) {
      labelOk = type_equal_mod_links(tIt.type, aIt.type) && tIt.args.size() == aIt.args.size();
    } else if (tIt.is_abs() && aIt.kind == ItemKind::TypeVar && aIt.type->is_arrow()) {
      labelOk = abs_matches_arrow(tIt, aIt) && tIt.args.size() == aIt.args.size();
    }
    if (!labelOk) {
      fail(depth, "root atoms do not match", target, anno);
      return std::nullopt;
    }

    if (tIt.kind == ItemKind::Fusion) {
      // unify with orientation choice, then continue the traversal through
      // the other endpoint of the fusion
      Items t2 = target, a2 = anno;
      t2.erase(t2.begin() + ti);
      a2.erase(a2.begin() + ai);
      for (int orient = 0; orient < 2; orient++) {
        FLink x0 = tIt.args[orient], x1 = tIt.args[1 - orient];
        auto f1 = check_link_name(f, x0, aIt.args[0]);
        if (!f1) continue;
        auto f2 = check_link_name(*f1, x1, aIt.args[1]);
        if (!f2) continue;
        FLink otherT = x0 == rootT ? x1 : x0;
        FLink otherA = x0 == rootT ? aIt.args[1] : aIt.args[0];
        if (otherT == rootT) {  // self fusion: nothing to traverse
          auto r = residue(t2, a2, *f2, depth);
          if (r) return r;
          continue;
        }
        std::vector<char> consT(t2.size(), 0), consA(a2.size(), 0);
        auto regT = split_regions(t2, consT, {otherT});
        auto regA = split_regions(a2, consA, {otherA});
        Items ts, as, restT, restA;
        for (size_t k = 0; k < t2.size(); k++)
          (std::find(regT[0].begin(), regT[0].end(), static_cast<int>(k)) != regT[0].end()
               ? ts
               : restT)
              .push_back(t2[k]);
        for (size_t k = 0; k < a2.size(); k++)
          (std::find(regA[0].begin(), regA[0].end(), static_cast<int>(k)) != regA[0].end()
               ? as
               : restA)
              .push_back(a2[k]);
        std::optional<LinkCorrespondence> r = *f2;
        if (!ts.empty() || !as.empty())
          r = helper(std::move(ts), std::move(as), otherT, otherA, *f2, H, removals, depth + 1);
        if (r) r = residue(std::move(restT), std::move(restA), *r, depth);
        if (r) return r;
      }
      fail(depth, "fusion endpoints do not correspond", target, anno);
      return std::nullopt;
    }

    // unify all argument links first
    LinkCorrespondence g = f;
    for (size_t i = 0; i < tIt.args.size(); i++) {
      auto r = check_link_name(g, tIt.args[i], aIt.args[i]);
      if (!r) {
        fail(depth, "argument links do not correspond at position " + std::to_string(i + 1) +
                        " of " + (tIt.is_ctor() ? tIt.name : "the root atom"),
             target, anno);
        return std::nullopt;
      }
      g = *r;
    }
    trace(depth, "match " + (tIt.is_ctor() ? tIt.name : std::string("atom")) + "/" +
                     std::to_string(tIt.args.size()) + " and recurse on arguments");

    // remove the pair, split the rest by argument subgraphs (the last
    // argument is the root and has been traversed already)
    std::vector<char> consT(target.size(), 0), consA(anno.size(), 0);
    consT[static_cast<size_t>(ti)] = 1;
    consA[static_cast<size_t>(ai)] = 1;
    long removals2 = removals + 1;
    size_t nsub = tIt.args.empty() ? 0 : tIt.args.size() - 1;
    std::vector<FLink> srcT(tIt.args.begin(), tIt.args.begin() + nsub);
    std::vector<FLink> srcA(aIt.args.begin(), aIt.args.begin() + nsub);
    auto regT = split_regions(target, consT, srcT);
    auto regA = split_regions(anno, consA, srcA);
    for (size_t i = 0; i < nsub; i++) {
      if (regT[i].empty() && regA[i].empty()) continue;
      if (regT[i].empty() || regA[i].empty()) {
        Items ts, as;
        for (int k : regT[i]) ts.push_back(target[static_cast<size_t>(k)]);
        for (int k : regA[i]) as.push_back(anno[static_cast<size_t>(k)]);
        fail(depth, "argument subgraphs disagree at position " + std::to_string(i + 1), ts, as);
        return std::nullopt;
      }
      Items ts, as;
      for (int k : regT[i]) {
        ts.push_back(target[static_cast<size_t>(k)]);
        consT[static_cast<size_t>(k)] = 1;
      }
      for (int k : regA[i]) {
        as.push_back(anno[static_cast<size_t>(k)]);
        consA[static_cast<size_t>(k)] = 1;
      }
      auto r = helper(std::move(ts), std::move(as), tIt.args[i], aIt.args[i], g, H, removals2,
                      depth + 1);
      if (!r) return std::nullopt;
      g = *r;
    }
    // whatever was not reached from the arguments must be residue fusions
    Items restT, restA;
    for (size_t k = 0; k < target.size(); k++)
      if (!consT[k]) restT.push_back(target[k]);
    for (size_t k = 0; k < anno.size(); k++)
      if (!consA[k]) restA.push_back(anno[k]);
    if (restT.empty() && restA.empty()) return g;
    return residue(std::move(restT), std::move(restA), g, depth);
  }

  bool abs_matches_arrow(const FlatItem& absItem, const FlatItem& arrowAtom);
};

}  // namespace vdetail

// ---------------------------------------------------------------------------
// Public entry points

struct CheckGraphResult {
  bool accepted = false;
  bool depthExceeded = false;
  std::string diag;
  std::vector<std::string> trace;
};

// Declared below (mutually recursive with the typing functions).
inline CheckGraphResult check_graph_flat(FlatGraph target, const TypeAtomPtr& goal,
                                         const Grammar& orig, const VerifierGrammar& ver,
                                         const VerifyConfig& cfg = {});

inline bool check_graph(const TermPtr& g, const TypeAtomPtr& goal, const Grammar& orig,
                        const VerifierGrammar& ver, const VerifyConfig& cfg = {},
                        CheckGraphResult* outcome = nullptr) {
  FlatGraph f = flatten(g);
  auto r = check_graph_flat(std::move(f), goal, orig, ver, cfg);
  if (outcome) *outcome = r;
  return r.accepted;
}

inline TypeAtomPtr type_of_expr(const TypingContext& ctx, const Grammar& orig,
                                const VerifierGrammar& ver, const ExprPtr& e,
                                const VerifyConfig& cfg = {});

inline bool check_template(const TypingContext& ctx, const Grammar& orig,
                           const VerifierGrammar& ver, const TermPtr& t,
                           const TypeAtomPtr& goal, const VerifyConfig& cfg = {},
                           CheckGraphResult* outcome = nullptr);

// decompose (spec operation): replace a hole with a production's RHS, head
// links renamed to the hole's links, RHS type atoms re-introduced as fresh
// holes; the result is congruence-normalized.
inline FlatGraph decompose(const FlatGraph& g, int holeId, const ProductionRule& rule,
                           const Grammar& orig) {
  int pos = -1;
  for (size_t i = 0; i < g.items.size(); i++)
    if (g.items[i].kind == ItemKind::Hole && g.items[i].holeId == holeId)
      pos = static_cast<int>(i);
  if (pos < 0) throw LgtError("decompose: no such hole");
  const FlatItem& hole = g.items[pos];
  if (hole.type->is_arrow() || hole.type->var != rule.head ||
      hole.args.size() != rule.headLinks.size())
    throw LgtError("decompose: hole type does not match the production head");
  FlatGraph out = g;
  out.items.erase(out.items.begin() + pos);
  auto inst = instantiate_rhs(orig, rule, hole.args, out);
  int nh = 0;
  for (auto& it : out.items)
    if (it.kind == ItemKind::Hole) nh = std::max(nh, it.holeId + 1);
  for (auto& it : inst) {
    if (it.kind == ItemKind::TypeVar) {
      it.kind = ItemKind::Hole;
      it.holeId = nh++;
    }
    out.items.push_back(it);
  }
  canonicalize(out);
  return out;
}

// ---------------------------------------------------------------------------
// Implementation of the mutually recursive pieces

namespace vdetail {

inline TypeAtomPtr rename_type_links(const TypeAtomPtr& t, const LinkSubst& s) {
  auto c = std::make_shared<TypeAtom>(*t);
  for (auto& l : c->links) l = subst_link_name(l, s);
  return c;
}

inline bool structurally_closed(const ExprPtr& e) { return free_functors(e).empty(); }

}  // namespace vdetail

inline CheckGraphResult check_graph_flat(FlatGraph target, const TypeAtomPtr& goal,
                                         const Grammar& orig, const VerifierGrammar& ver,
                                         const VerifyConfig& cfg) {
  CheckGraphResult out;
  if (goal->is_arrow()) {
    out.diag = "goal must be a type variable atom";
    return out;
  }
  if (!orig.defined(goal->var, static_cast<int>(goal->links.size()))) {
    out.diag = "goal type " + goal->var + "/" + std::to_string(goal->links.size()) +
               " is not defined by the grammar";
    return out;
  }
  canonicalize(target);
  // free-link exactness
  std::set<std::string> goalLinks(goal->links.begin(), goal->links.end());
  if (target.free_set() != goalLinks) {
    out.diag = "free links of the graph do not match the goal's links";
    return out;
  }
  for (auto& it : target.items) {
    if (it.kind == ItemKind::Ctx) {
      out.diag = "graph contains a context; use check_template";
      return out;
    }
    if (it.kind == ItemKind::TypeVar) {
      if (it.type && it.type->is_arrow()) {
        it.kind = ItemKind::Hole;  // generated arrow placeholder
      } else {
        out.diag = "graph contains a type atom";
        return out;
      }
    }
  }
  vdetail::VCtx c{orig, ver, cfg, target.frees, target.nlocals, 0, 0, nullptr, 0};
  // hole ids unique
  for (auto& it : target.items)
    if (it.kind == ItemKind::Hole) it.holeId = c.nextHole++;

  VerifyOutcome vout;
  c.out = &vout;
  // the annotated start symbol routes through the start rule set (keeps the
  // direct fusion productions); inner occurrences use the transformed set
  std::string goalName = ver.start.count(goal->var) ? VerifierGrammar::alias_name(goal->var)
                                                    : goal->var;

  // degenerate nullary goal
  if (goal->links.empty()) {
    bool empty = target.items.empty();
    bool derivable = false;
    for (auto* r : orig.rules_of(goal->var)) {
      FlatGraph f = flatten_rhs(orig, *r);
      canonicalize(f);
      if (f.items.empty()) derivable = true;
    }
    out.accepted = empty && derivable;
    return out;
  }

  FlatItem goalAtom;
  goalAtom.kind = ItemKind::TypeVar;
  goalAtom.type = type_var(goalName, {});
  for (auto& l : goal->links) goalAtom.args.push_back(flink_free(c.intern_free(l)));
  FLink rootA = goalAtom.args.back();
  // the traversal enters the target at the representative of the goal's
  // root link (free links fused in the target collapse onto one rep)
  FLink rootT = rootA;
  {
    std::vector<FlatItem> probe = target.items;
    auto subst = collapse_fusion_classes(probe, c.frees);
    auto it = subst.find(rootT);
    if (it != subst.end()) rootT = it->second;
  }

  vdetail::Checker chk{c};
  try {
    auto r = chk.helper(target.items, {goalAtom}, rootT, rootA, LinkCorrespondence{}, {}, 0, 0);
    out.accepted = r.has_value();
  } catch (vdetail::DepthExceededError&) {
    out.depthExceeded = true;
    out.diag = "proof search exceeded the depth limit (" + std::to_string(cfg.depthLimit) + ")";
  }
  if (!out.accepted && out.diag.empty()) out.diag = vout.diag;
  out.trace = std::move(vout.trace);
  return out;
}

namespace vdetail {

inline bool Checker::abs_matches_arrow(const FlatItem& absItem, const FlatItem& arrowAtom) {
  // type the abstraction and compare arrow shapes modulo link renaming
  try {
    TypeAtomPtr ty = type_of_expr(TypingContext{}, c.orig, c.ver,
                                  expr_graph(term_abs(absItem.abs, {})), c.cfg);
    return type_equal_mod_links(type_with_links(ty, {}),
                                type_with_links(arrowAtom.type, {}));
  } catch (TypeError&) {
    return false;
  }
}

}  // namespace vdetail

// ---------------------------------------------------------------------------
// check_template: contexts become annotated holes, abstraction atoms become
// arrow-typed placeholders, then check_graph runs.

inline bool check_template(const TypingContext& ctx, const Grammar& orig,
                           const VerifierGrammar& ver, const TermPtr& t,
                           const TypeAtomPtr& goal, const VerifyConfig& cfg,
                           CheckGraphResult* outcome) {
  FlatGraph f = flatten(t);
  for (auto& it : f.items) {
    if (it.kind == ItemKind::Ctx) {
      TypeAtomPtr ty = it.type;
      std::vector<FLink> args = it.args;
      if (!ty) {
        const auto* entry = ctx.lookup(Functor{it.name, static_cast<int>(it.args.size())});
        if (!entry)
          throw TypeError("context $" + it.name + "/" + std::to_string(it.args.size()) +
                          " has no annotation and is not bound in the typing context");
        // positional transfer of the declared type's links to the use site
        std::map<LinkName, FLink> formalTo;
        for (size_t i = 0; i < entry->formals.size(); i++)
          formalTo[entry->formals[i]] = it.args[i];
        args.clear();
        for (auto& l : entry->type->links) {
          auto p = formalTo.find(l);
          if (p == formalTo.end())
            throw TypeError("declared type of $" + it.name + " uses link " + l +
                            " outside its formal links");
          args.push_back(p->second);
        }
        ty = entry->type;
      } else {
        // inline annotation: resolve its links against the context's own
        // link names (the annotation may permute them)
        std::map<LinkName, FLink> byName;
        for (size_t i = 0; i < it.ctxArgNames.size(); i++)
          byName[it.ctxArgNames[i]] = it.args[i];
        args.clear();
        for (auto& l : ty->links) {
          auto p = byName.find(l);
          if (p == byName.end())
            throw TypeError("annotation of $" + it.name + " uses link " + l +
                            " that is not a link of the context");
          args.push_back(p->second);
        }
        if (args.size() != it.args.size())
          throw TypeError("annotation arity of $" + it.name +
                          " differs from the context's links");
      }
      it.kind = ItemKind::Hole;
      it.name.clear();
      it.type = type_with_links(ty, {});  // outer links live in the args
      it.args = std::move(args);
    } else if (it.is_abs()) {
      TypeAtomPtr ty = type_of_expr(ctx, orig, ver, expr_graph(term_abs(it.abs, {})), cfg);
      it.kind = ItemKind::Hole;
      it.abs = nullptr;
      it.type = type_with_links(ty, {});
    }
  }
  auto r = check_graph_flat(std::move(f), goal, orig, ver, cfg);
  if (outcome) *outcome = r;
  return r.accepted;
}

// ---------------------------------------------------------------------------
// type_of_expr: syntax-directed; general templates are inferred by bounded
// enumeration over defined type names and permutations of the free links.

namespace vdetail {

inline void validate_anno(const Grammar& g, const TypeAtomPtr& t) {
  if (!t) return;
  if (t->is_arrow()) {
    validate_anno(g, t->dom);
    validate_anno(g, t->cod);
    return;
  }
  if (!g.defined(t->var, static_cast<int>(t->links.size())))
    throw TypeError("type " + t->var + "/" + std::to_string(t->links.size()) +
                    " is not defined by the production rules");
}

inline const Template* single_unit(const TermPtr& t) {
  // after expansion a template is a tree of Mol/Nu over units
  if (t->kind == TermKind::Atom || t->kind == TermKind::Context) return t.get();
  return nullptr;
}

inline std::vector<std::string> declared_type_names(const Grammar& g) {
  std::vector<std::string> names;
  for (auto& r : g.rules)
    if (std::find(names.begin(), names.end(), r.head) == names.end()) names.push_back(r.head);
  return names;
}

}  // namespace vdetail

inline TypeAtomPtr type_of_expr(const TypingContext& ctx, const Grammar& orig,
                                const VerifierGrammar& ver, const ExprPtr& e,
                                const VerifyConfig& cfg) {
  switch (e->kind) {
    case ExprKind::Graph: {
      TermPtr t = expand_term_notation(e->graph);
      const Template* u = vdetail::single_unit(t);
      if (u && u->kind == TermKind::Context) {
        const auto* entry = ctx.lookup(Functor{u->name, static_cast<int>(u->args.size())});
        if (!entry) throw TypeError("unbound context $" + u->name);
        LinkSubst s;
        for (size_t i = 0; i < entry->formals.size(); i++) {
          if (!u->args[i].is_link()) throw TypeError("context argument not expanded");
          if (entry->formals[i] != u->args[i].link)
            s.push_back({entry->formals[i], u->args[i].link});
        }
        return vdetail::rename_type_links(entry->type, s);  // Ty-Var + Ty-Alpha
      }
      if (u && u->kind == TermKind::Atom && u->atomKind == AtomKind::Abs) {
        const AbsPtr& abs = u->abs;
        if (!abs->anno)
          throw TypeError("abstraction parameter $" + abs->param + " lacks a type annotation");
        vdetail::validate_anno(orig, abs->anno);
        TypingContext ctx2 = ctx.with(
            Functor{abs->param, static_cast<int>(abs->paramLinks.size())},
            TypingContext::Entry{abs->paramLinks, abs->anno});
        TypeAtomPtr bodyTy = type_of_expr(ctx2, orig, ver, abs->body, cfg);
        std::vector<LinkName> links;
        for (auto& a : u->args) {
          if (!a.is_link()) throw TypeError("abstraction atom argument not expanded");
          links.push_back(a.link);
        }
        return type_arrow(abs->anno, bodyTy, links);  // Ty-Arrow
      }
      // general template: enumerate candidate goals and check
      std::set<LinkName> fnset = free_names(t);
      std::vector<LinkName> links(fnset.begin(), fnset.end());
      std::sort(links.begin(), links.end());
      for (auto& name : vdetail::declared_type_names(orig)) {
        if (orig.arity.at(name) != static_cast<int>(links.size())) continue;
        std::vector<LinkName> perm = links;
        do {
          TypeAtomPtr goal = type_var(name, perm);
          if (check_template(ctx, orig, ver, t, goal, cfg)) return goal;
        } while (std::next_permutation(perm.begin(), perm.end()));
      }
      throw TypeError("no defined type fits this template: " + pretty(e->graph));
    }
    case ExprKind::App: {
      TypeAtomPtr fty = type_of_expr(ctx, orig, ver, e->fn, cfg);
      if (!fty->is_arrow()) throw TypeError("applying a non-function of type " + pretty(fty));
      TypeAtomPtr aty = type_of_expr(ctx, orig, ver, e->arg, cfg);
      if (!type_equal_mod_links(aty, fty->dom))
        throw TypeError("argument type " + pretty(aty) + " does not match the arrow domain " +
                        pretty(fty->dom));
      return fty->cod;
    }
    case ExprKind::Case: {
      (void)type_of_expr(ctx, orig, ver, e->scrut, cfg);  // scrutinee must type
      // pattern annotations extend Gamma for the then-branch (Ty-Case)
      TypingContext ctx2 = ctx;
      TermPtr expanded = expand_term_notation(e->pattern);
      std::function<void(const TermPtr&)> collect = [&](const TermPtr& t) {
        switch (t->kind) {
          case TermKind::Context: {
            if (!t->anno)
              throw TypeError("pattern context $" + t->name + " lacks a type annotation");
            vdetail::validate_anno(orig, t->anno);
            std::vector<LinkName> formals;
            for (auto& a : t->args) formals.push_back(a.link);
            ctx2 = ctx2.with(Functor{t->name, static_cast<int>(t->args.size())},
                             TypingContext::Entry{formals, t->anno});
            return;
          }
          case TermKind::Mol:
            collect(t->left);
            collect(t->right);
            return;
          case TermKind::Nu:
            collect(t->body);
            return;
          default:
            return;
        }
      };
      collect(expanded);
      TypeAtomPtr thenTy = type_of_expr(ctx2, orig, ver, e->thenBranch, cfg);
      TypeAtomPtr elseTy = type_of_expr(ctx, orig, ver, e->elseBranch, cfg);
      if (!type_equal_mod_links(thenTy, elseTy))
        throw TypeError("case branches have different types: " + pretty(thenTy) + " vs " +
                        pretty(elseTy));
      return thenTy;
    }
  }
  throw TypeError("unreachable expression kind");
}

}  // namespace lgt
