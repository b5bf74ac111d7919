#pragma once

// Production rules: well-formedness, the Def-6.2 root-link constraints,
// fusion elimination, and the bounded derivation oracle used as the
// reference semantics of graph types.

#include <deque>

#include "lgt/flat.hpp"

namespace lgt {

struct ProductionRule {
  std::string head;
  std::vector<LinkName> headLinks;
  TermPtr rhs;  // constructor atoms, type atoms, arrows, fusions, nu
  int line = 0, col = 0;
};

struct Grammar {
  std::vector<ProductionRule> rules;
  std::set<std::string> typeNames;
  std::map<std::string, int> arity;
  std::map<std::string, std::vector<int>> byHead;

  bool defined(const std::string& name, int n) const {
    auto it = arity.find(name);
    return it != arity.end() && it->second == n;
  }
  std::vector<const ProductionRule*> rules_of(const std::string& name) const {
    std::vector<const ProductionRule*> out;
    auto it = byHead.find(name);
    if (it != byHead.end())
      for (int i : it->second) out.push_back(&rules[i]);
    return out;
  }
};

inline Grammar load_grammar(std::vector<ProductionRule> rules) {
  Grammar g;
  g.rules = std::move(rules);
  for (size_t i = 0; i < g.rules.size(); i++) {
    auto& r = g.rules[i];
    auto [it, fresh] = g.arity.try_emplace(r.head, static_cast<int>(r.headLinks.size()));
    if (!fresh && it->second != static_cast<int>(r.headLinks.size()))
      throw LgtError("type " + r.head + " redefined with different arity");
    g.typeNames.insert(r.head);
    g.byHead[r.head].push_back(static_cast<int>(i));
  }
  return g;
}

// A rule RHS in flat form, type atoms classified against a grammar.
inline FlatGraph flatten_rhs(const Grammar& g, const ProductionRule& r) {
  return flatten(r.rhs, &g.typeNames);
}

// ---------------------------------------------------------------------------
// validate_rule: fn(RHS) = {head links}, head links mutually distinct,
// type-atom arities consistent.

inline std::vector<std::string> validate_rule(const Grammar& g, const ProductionRule& r) {
  std::vector<std::string> out;
  std::set<LinkName> heads(r.headLinks.begin(), r.headLinks.end());
  if (heads.size() != r.headLinks.size())
    out.push_back("rule " + r.head + ": head links not mutually distinct");
  std::set<LinkName> fn = free_names(r.rhs);
  for (auto& l : fn)
    if (!heads.count(l)) out.push_back("rule " + r.head + ": free link " + l + " not in head");
  for (auto& l : heads)
    if (!fn.count(l)) out.push_back("rule " + r.head + ": head link " + l + " unused in RHS");
  FlatGraph f = flatten_rhs(g, r);
  for (auto& it : f.items) {
    if (it.kind == ItemKind::TypeVar && it.type && !it.type->is_arrow()) {
      auto a = g.arity.find(it.type->var);
      if (a != g.arity.end() && a->second != static_cast<int>(it.args.size()))
        out.push_back("rule " + r.head + ": type atom " + it.type->var + " used at arity " +
                      std::to_string(it.args.size()) + ", defined at " + std::to_string(a->second));
    }
    if (it.kind == ItemKind::Ctx) out.push_back("rule " + r.head + ": graph context in RHS");
    if (it.is_abs()) out.push_back("rule " + r.head + ": abstraction atom in RHS");
  }
  return out;
}

inline std::vector<std::string> validate_grammar(const Grammar& g) {
  std::vector<std::string> out;
  for (auto& r : g.rules) {
    auto v = validate_rule(g, r);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Root-link constraints (Def. 6.2). RHS is either fusions only, or exactly
// one constructor atom whose root link occurs free, plus type atoms whose
// root links are distinct arguments of that constructor, plus fusions and
// arrow atoms.

inline std::vector<std::string> check_root_constraints_rule(const Grammar& g,
                                                            const ProductionRule& r) {
  std::vector<std::string> out;
  FlatGraph f = flatten_rhs(g, r);
  std::vector<const FlatItem*> ctors, typeVars, arrows;
  int fusions = 0;
  for (auto& it : f.items) {
    if (it.kind == ItemKind::Fusion)
      fusions++;
    else if (it.kind == ItemKind::TypeVar && it.type && it.type->is_arrow())
      arrows.push_back(&it);
    else if (it.kind == ItemKind::TypeVar)
      typeVars.push_back(&it);
    else if (it.is_ctor() || it.is_arrow_atom())
      ctors.push_back(&it);
    else
      out.push_back("rule " + r.head + ": unexpected item in RHS");
  }
  if (ctors.empty() && typeVars.empty() && arrows.empty()) {
    if (fusions == 0) out.push_back("rule " + r.head + ": empty RHS");
    return out;  // fusions only
  }
  if (ctors.size() != 1) {
    out.push_back("rule " + r.head + ": expected exactly one constructor atom, found " +
                  std::to_string(ctors.size()));
    return out;
  }
  const FlatItem& c = *ctors[0];
  if (c.args.empty() || flink_local(c.root())) {
    out.push_back("rule " + r.head + ": constructor root link must occur free in the RHS");
  }
  std::set<FLink> cargs(c.args.begin(), c.args.end() - (c.args.empty() ? 0 : 1));
  std::set<FLink> seenRoots;
  for (auto* tv : typeVars) {
    if (tv->args.empty()) {
      out.push_back("rule " + r.head + ": nullary type atom in constrained RHS");
      continue;
    }
    FLink root = tv->root();
    if (!cargs.count(root))
      out.push_back("rule " + r.head + ": type atom " + tv->type->var +
                    " root link is not an argument of the constructor");
    if (!seenRoots.insert(root).second)
      out.push_back("rule " + r.head + ": two type atoms share a root link");
  }
  return out;
}

inline std::vector<std::string> check_root_constraints(const Grammar& g) {
  std::vector<std::string> out;
  for (auto& r : g.rules) {
    auto v = check_root_constraints_rule(g, r);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// ---------------------------------------------------------------------------
// Instantiation of a rule RHS at a given argument vector: head links are
// renamed positionally, rule-local links become fresh locals of `into`.

struct InstItem {
  FlatItem item;  // links remapped into the host graph
};

inline std::vector<FlatItem> instantiate_rhs(const Grammar& g, const ProductionRule& r,
                                             const std::vector<FLink>& args, FlatGraph& host) {
  if (args.size() != r.headLinks.size())
    throw LgtError("instantiate: arity mismatch for " + r.head);
  FlatGraph f = flatten_rhs(g, r);
  std::map<FLink, FLink> remap;
  for (size_t i = 0; i < r.headLinks.size(); i++) {
    // head links appear as frees of the flat RHS
    int idx = -1;
    for (size_t k = 0; k < f.frees.size(); k++)
      if (f.frees[k] == r.headLinks[i]) idx = static_cast<int>(k);
    if (idx >= 0) remap[flink_free(idx)] = args[i];
  }
  std::map<FLink, FLink> localMap;
  std::vector<FlatItem> out;
  for (auto& it : f.items) {
    FlatItem c = it;
    for (auto& a : c.args) {
      if (flink_local(a)) {
        auto [p, fresh] = localMap.try_emplace(a, 0);
        if (fresh) p->second = host.fresh_local();
        a = p->second;
      } else {
        auto m = remap.find(a);
        if (m != remap.end())
          a = m->second;
        else
          a = flink_free(host.intern_free(f.frees[flink_free_index(a)]));
      }
    }
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Fusion elimination.

struct FusionElimError {
  std::string message;
};

// Transformed rule sets: inner occurrences of a type use `inner`; an
// annotated goal type uses `start` (the alias set keeps the direct fusion
// productions). alias(name) reports whether a distinct start alias exists.
struct VerifierGrammar {
  const Grammar* orig = nullptr;
  std::map<std::string, std::vector<ProductionRule>> inner;
  std::set<std::string> aliased;
  std::map<std::string, std::vector<ProductionRule>> start;

  static std::string alias_name(const std::string& n) { return n + "#b"; }

  const std::vector<ProductionRule>& inner_rules(const std::string& n) const {
    static const std::vector<ProductionRule> none;
    auto it = inner.find(n);
    return it != inner.end() ? it->second : none;
  }
  const std::vector<ProductionRule>& start_rules(const std::string& n) const {
    auto it = start.find(n);
    if (it != start.end()) return it->second;
    return inner_rules(n);
  }
};

inline bool rhs_has_fusion(const Grammar& g, const ProductionRule& r) {
  FlatGraph f = flatten_rhs(g, r);
  canonicalize(f);
  for (auto& it : f.items)
    if (it.kind == ItemKind::Fusion) return true;
  return false;
}

inline bool rhs_fusions_only(const Grammar& g, const ProductionRule& r) {
  FlatGraph f = flatten_rhs(g, r);
  canonicalize(f);
  for (auto& it : f.items)
    if (it.kind != ItemKind::Fusion) return false;
  return true;
}

inline ProductionRule rule_from_flat(const std::string& head,
                                     const std::vector<LinkName>& headLinks, FlatGraph f) {
  canonicalize(f);
  return ProductionRule{head, headLinks, unflatten(f), 0, 0};
}

inline bool rules_congruent(const Grammar& g, const ProductionRule& a, const ProductionRule& b) {
  if (a.head != b.head || a.headLinks.size() != b.headLinks.size()) return false;
  // compare RHSs with head links renamed to a common vector
  LinkSubst sa, sb;
  for (size_t i = 0; i < a.headLinks.size(); i++) {
    std::string h = "#H" + std::to_string(i);
    sa.push_back({a.headLinks[i], h});
    sb.push_back({b.headLinks[i], h});
  }
  return congruent_flat(flatten(subst_links(a.rhs, sa), &g.typeNames),
                        flatten(subst_links(b.rhs, sb), &g.typeNames));
}

// Substitute one fusion-rule body for the type atom at `pos` in flat RHS.
inline FlatGraph substitute_fusion_rule(const Grammar& g, const FlatGraph& rhs, size_t pos,
                                        const ProductionRule& fusionRule) {
  FlatGraph out = rhs;
  const FlatItem target = out.items[pos];
  out.items.erase(out.items.begin() + pos);
  auto inst = instantiate_rhs(g, fusionRule, target.args, out);
  for (auto& it : inst) out.items.push_back(it);
  return out;
}

// Returns the transformed grammar, or an error when some fusion produced by
// the substitution closure cannot be absorbed.
inline VerifierGrammar eliminate_fusions_all(const Grammar& g, std::string* errorOut = nullptr) {
  VerifierGrammar vg;
  vg.orig = &g;
  std::map<std::string, std::vector<ProductionRule>> fusionRules, plainRules;
  for (auto& r : g.rules)
    (rhs_has_fusion(g, r) ? fusionRules[r.head] : plainRules[r.head]).push_back(r);

  // closure: substituting fusion rules into plain rules may surface new
  // fusion-only rules (start-style), which feed back into the substitution
  for (int round = 0; round < 8; round++) {
    bool grew = false;
    std::map<std::string, std::vector<ProductionRule>> result;
    for (auto& [head, rules] : plainRules) {
      for (auto& r : rules) {
        FlatGraph rhs = flatten_rhs(g, r);
        canonicalize(rhs);
        // positions of substitutable type atoms
        std::vector<size_t> subst;
        for (size_t i = 0; i < rhs.items.size(); i++) {
          auto& it = rhs.items[i];
          if (it.kind == ItemKind::TypeVar && it.type && !it.type->is_arrow() &&
              fusionRules.count(it.type->var))
            subst.push_back(i);
        }
        // all subsets x all fusion-rule choices
        size_t n = subst.size();
        for (size_t mask = 0; mask < (size_t{1} << n); mask++) {
          std::vector<size_t> chosen;
          for (size_t b = 0; b < n; b++)
            if (mask & (size_t{1} << b)) chosen.push_back(subst[b]);
          std::vector<size_t> choiceIdx(chosen.size(), 0);
          auto emit = [&](const std::vector<size_t>& choices) {
            FlatGraph cur = rhs;
            // substitute from the highest position down so indices stay valid
            std::vector<std::pair<size_t, size_t>> order;
            for (size_t k = 0; k < chosen.size(); k++) order.push_back({chosen[k], choices[k]});
            std::sort(order.rbegin(), order.rend());
            for (auto& [pos, ci] : order) {
              const auto& fr = fusionRules.at(rhs.items[pos].type->var)[ci];
              cur = substitute_fusion_rule(g, cur, pos, fr);
            }
            canonicalize(cur);
            bool fusion = false, nonFusion = false;
            for (auto& it : cur.items)
              (it.kind == ItemKind::Fusion ? fusion : nonFusion) = true;
            ProductionRule nr = rule_from_flat(r.head, r.headLinks, cur);
            if (fusion && nonFusion && !order.empty()) {
              if (errorOut && errorOut->empty())
                *errorOut = "fusion elimination incomplete for rule of " + r.head +
                            ": a substituted fusion cannot be absorbed";
              return;  // unabsorbable mixed variant: reported, not added
            }
            if (fusion && !nonFusion && !order.empty()) {
              // variant collapsed to fusions only: a new fusion rule
              auto& fs = fusionRules[r.head];
              for (auto& ex : fs)
                if (rules_congruent(g, ex, nr)) return;
              fs.push_back(nr);
              grew = true;
              return;
            }
            auto& rs = result[r.head];
            for (auto& ex : rs)
              if (rules_congruent(g, ex, nr)) return;
            rs.push_back(nr);
          };
          // iterate the cartesian product of rule choices
          if (chosen.empty()) {
            emit({});
            continue;
          }
          while (true) {
            emit(choiceIdx);
            size_t k = 0;
            while (k < chosen.size()) {
              choiceIdx[k]++;
              if (choiceIdx[k] < fusionRules.at(rhs.items[chosen[k]].type->var).size()) break;
              choiceIdx[k] = 0;
              k++;
            }
            if (k == chosen.size()) break;
          }
        }
      }
    }
    vg.inner = std::move(result);
    if (!grew) break;
  }

  for (auto& [head, frs] : fusionRules) {
    bool hasPlain = vg.inner.count(head) && !vg.inner[head].empty();
    std::vector<ProductionRule> startSet = frs;
    if (hasPlain) {
      for (auto& r : vg.inner[head]) startSet.push_back(r);
      vg.aliased.insert(head);
    }
    vg.start[head] = std::move(startSet);
  }
  return vg;
}

// Spec-level entry point: rewrites the whole grammar and renames the start
// atom when the alias was introduced.
inline std::pair<Grammar, TypeAtomPtr> eliminate_fusions(const Grammar& g,
                                                         const TypeAtomPtr& start) {
  std::string err;
  VerifierGrammar vg = eliminate_fusions_all(g, &err);
  if (!err.empty()) throw LgtError(err);
  std::vector<ProductionRule> rules;
  for (auto& [head, rs] : vg.inner)
    for (auto& r : rs) rules.push_back(r);
  for (auto& [head, rs] : vg.start) {
    std::string an = vg.aliased.count(head) ? VerifierGrammar::alias_name(head) : head;
    for (auto& r : rs) {
      ProductionRule c = r;
      c.head = an;
      rules.push_back(c);
    }
  }
  TypeAtomPtr newStart = start;
  if (!start->is_arrow() && vg.aliased.count(start->var))
    newStart = type_var(VerifierGrammar::alias_name(start->var), start->links);
  return {load_grammar(std::move(rules)), newStart};
}

// ---------------------------------------------------------------------------
// generate: all terminal graphs derivable from the start atom in at most
// `depth` rule applications, deduplicated modulo congruence. Arrow atoms
// remain as opaque placeholders.

inline bool flat_is_terminal(const FlatGraph& f) {
  for (auto& it : f.items)
    if (it.kind == ItemKind::TypeVar && it.type && !it.type->is_arrow()) return false;
  return true;
}

// Deduplication set bucketed by a congruence-invariant key.
struct FlatSet {
  std::map<std::string, std::vector<FlatGraph>> buckets;
  size_t count = 0;
  bool insert(const FlatGraph& f) {  // f must be canonical
    auto& b = buckets[congruence_bucket_key(f)];
    for (auto& x : b)
      if (congruent_canon(x, f)) return false;
    b.push_back(f);
    count++;
    return true;
  }
  bool contains(const FlatGraph& f) const {
    auto it = buckets.find(congruence_bucket_key(f));
    if (it == buckets.end()) return false;
    for (auto& x : it->second)
      if (congruent_canon(x, f)) return true;
    return false;
  }
  std::vector<FlatGraph> to_vector() const {
    std::vector<FlatGraph> out;
    for (auto& [k, b] : buckets)
      for (auto& x : b) out.push_back(x);
    return out;
  }
};

inline std::vector<FlatGraph> generate(const Grammar& g, const TypeAtomPtr& start, int depth) {
  if (!start->is_arrow() && !g.typeNames.count(start->var))
    throw LgtError("generate: undefined type " + start->var);
  FlatGraph init;
  {
    FlatItem it;
    it.kind = ItemKind::TypeVar;
    it.type = type_var(start->var, {});
    for (auto& l : start->links) it.args.push_back(flink_free(init.intern_free(l)));
    init.items.push_back(it);
  }
  std::vector<FlatGraph> frontier{init};
  FlatSet terminals, nextSet;
  for (int d = 0; d < depth; d++) {
    nextSet = FlatSet{};
    for (auto& sf : frontier) {
      for (size_t i = 0; i < sf.items.size(); i++) {
        auto& it = sf.items[i];
        if (it.kind != ItemKind::TypeVar || !it.type || it.type->is_arrow()) continue;
        for (auto* r : g.rules_of(it.type->var)) {
          if (r->headLinks.size() != it.args.size()) continue;
          FlatGraph out = sf;
          FlatItem target = out.items[i];
          out.items.erase(out.items.begin() + i);
          auto inst = instantiate_rhs(g, *r, target.args, out);
          for (auto& x : inst) out.items.push_back(x);
          canonicalize(out);
          if (flat_is_terminal(out))
            terminals.insert(out);
          else if (d + 1 < depth)
            nextSet.insert(out);
        }
      }
    }
    frontier = nextSet.to_vector();
    if (frontier.empty()) break;
  }
  return terminals.to_vector();
}

inline bool generated_member(const std::vector<FlatGraph>& set, const FlatGraph& f) {
  for (auto& x : set)
    if (congruent_flat(x, f)) return true;
  return false;
}

// Exact membership in the language of `start`: breadth-first derivation
// search pruned by constructor count (rule applications never remove
// constructor atoms, so sentential forms larger than the target are dead).
inline bool derivable(const Grammar& g, const TypeAtomPtr& start, const FlatGraph& target0) {
  FlatGraph target = target0;
  canonicalize(target);
  size_t targetCtors = 0;
  for (auto& it : target.items)
    if (it.kind != ItemKind::Fusion) targetCtors++;
  FlatGraph init;
  {
    FlatItem it;
    it.kind = ItemKind::TypeVar;
    it.type = type_var(start->var, {});
    for (auto& l : start->links) it.args.push_back(flink_free(init.intern_free(l)));
    init.items.push_back(it);
  }
  std::vector<FlatGraph> frontier{init};
  FlatSet seen;
  {
    FlatGraph c = init;
    canonicalize(c);
    seen.insert(c);
  }
  while (!frontier.empty()) {
    std::vector<FlatGraph> next;
    for (auto& sf : frontier) {
      for (size_t i = 0; i < sf.items.size(); i++) {
        auto& it = sf.items[i];
        if (it.kind != ItemKind::TypeVar || !it.type || it.type->is_arrow()) continue;
        for (auto* r : g.rules_of(it.type->var)) {
          if (r->headLinks.size() != it.args.size()) continue;
          FlatGraph out = sf;
          FlatItem tv = out.items[i];
          out.items.erase(out.items.begin() + i);
          auto inst = instantiate_rhs(g, *r, tv.args, out);
          for (auto& x : inst) out.items.push_back(x);
          canonicalize(out);
          size_t ctors = 0;
          for (auto& x : out.items)
            if (x.kind != ItemKind::Fusion && x.kind != ItemKind::TypeVar) ctors++;
          if (ctors > targetCtors) continue;
          if (flat_is_terminal(out)) {
            if (congruent_canon(out, target)) return true;
            continue;
          }
          if (seen.insert(out)) next.push_back(out);
        }
      }
    }
    frontier = std::move(next);
  }
  return false;
}

}  // namespace lgt
