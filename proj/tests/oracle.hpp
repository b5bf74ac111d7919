#pragma once

// Brute-force matching oracle: enumerates all assignments of the graph's
// canonical atoms to template atoms and contexts, all link images, and all
// anchor choices for fused formals, keeping the substitutions theta with
// g == t theta. Written independently of the matcher's enumeration.

#include "helpers.hpp"
#include "lgt/matcher.hpp"

namespace lgt::testing {

namespace odetail {

struct OracleState {
  const FlatGraph& gf;
  const FlatGraph& tf;
  std::vector<int> tAtoms, tCtxs;
  const TermPtr& gx;
  const TermPtr& tx;
  std::vector<GroundSubst> results;
};

inline void oracle_emit(OracleState& st, const std::map<FLink, FLink>& lambda,
                        const std::vector<int>& role) {
  // anchor choices per context/shared-group
  size_t m = st.tCtxs.size();
  struct CtxInfo {
    const FlatItem* ctx;
    std::vector<int> atoms;
    std::vector<FLink> formalG;
    std::map<FLink, std::vector<size_t>> groups;
    std::vector<std::pair<FLink, std::vector<size_t>>> sharedTouched;
  };
  std::vector<CtxInfo> infos(m);
  for (size_t j = 0; j < m; j++) {
    infos[j].ctx = &st.tf.items[static_cast<size_t>(st.tCtxs[j])];
    for (auto a : infos[j].ctx->args) {
      auto it = lambda.find(a);
      if (it == lambda.end()) return;
      infos[j].formalG.push_back(it->second);
    }
    for (size_t i = 0; i < infos[j].formalG.size(); i++)
      infos[j].groups[infos[j].formalG[i]].push_back(i);
  }
  for (size_t gi = 0; gi < st.gf.items.size(); gi++)
    if (role[gi] >= static_cast<int>(st.tAtoms.size()))
      infos[static_cast<size_t>(role[gi]) - st.tAtoms.size()].atoms.push_back(
          static_cast<int>(gi));
  for (size_t j = 0; j < m; j++) {
    std::set<FLink> touched;
    for (int gi : infos[j].atoms)
      for (auto a : st.gf.items[static_cast<size_t>(gi)].args) touched.insert(a);
    for (auto& [gl, pos] : infos[j].groups)
      if (pos.size() >= 2 && touched.count(gl)) infos[j].sharedTouched.push_back({gl, pos});
  }
  // iterate the product of anchor choices over all contexts
  std::vector<std::vector<size_t>> choice(m);
  for (size_t j = 0; j < m; j++) choice[j].assign(infos[j].sharedTouched.size(), 0);
  for (;;) {
    GroundSubst th;
    bool valid = true;
    for (size_t j = 0; j < m && valid; j++) {
      auto& inf = infos[j];
      std::map<FLink, size_t> anchor;
      for (auto& [gl, pos] : inf.groups) anchor[gl] = pos[0];
      for (size_t s = 0; s < inf.sharedTouched.size(); s++)
        anchor[inf.sharedTouched[s].first] = inf.sharedTouched[s].second[choice[j][s]];
      // rename block atoms into a term over the formal names
      std::vector<LinkName> formals = inf.ctx->ctxArgNames;
      std::map<FLink, LinkName> names;
      std::set<FLink> touched;
      for (int gi : inf.atoms)
        for (auto a : st.gf.items[static_cast<size_t>(gi)].args) touched.insert(a);
      for (auto& [gl, pos] : anchor) names[gl] = formals[pos];
      std::vector<TermPtr> parts;
      std::set<LinkName> internal;
      int fresh = 0;
      for (int gi : inf.atoms) {
        const FlatItem& it = st.gf.items[static_cast<size_t>(gi)];
        std::vector<Arg> args;
        for (auto a : it.args) {
          auto nm = names.find(a);
          if (nm == names.end()) {
            if (!flink_local(a)) {
              valid = false;
              break;
            }
            bool outside = false;
            for (size_t oth = 0; oth < st.gf.items.size(); oth++) {
              if (role[oth] == static_cast<int>(st.tAtoms.size() + j)) continue;
              for (auto b : st.gf.items[oth].args)
                if (b == a) outside = true;
            }
            if (outside) {
              valid = false;
              break;
            }
            std::string n = "OrI" + std::to_string(fresh++);
            names[a] = n;
            internal.insert(n);
            nm = names.find(a);
          }
          args.push_back(arg_link(nm->second));
        }
        if (!valid) break;
        FlatItem copy = it;
        if (copy.kind == ItemKind::Fusion)
          parts.push_back(term_fusion(args[0].link, args[1].link));
        else if (copy.is_abs())
          parts.push_back(term_abs(copy.abs, args));
        else
          parts.push_back(term_atom(copy.name, args));
      }
      if (!valid) break;
      for (auto& [gl, pos] : inf.groups) {
        size_t a0 = anchor.at(gl);
        if (pos.size() == 1 && !touched.count(gl)) {
          valid = false;  // dangling formal
          break;
        }
        for (size_t p : pos)
          if (p != a0) parts.push_back(term_fusion(formals[a0], formals[p]));
      }
      if (!valid) break;
      TermPtr b = term_mol_all(parts);
      for (auto& n : internal) b = term_nu(n, b);
      std::set<LinkName> want(formals.begin(), formals.end());
      if (free_names(b) != want) {
        valid = false;
        break;
      }
      Functor f{inf.ctx->name, static_cast<int>(inf.ctx->args.size())};
      if (th.count(f)) {
        valid = false;
        break;
      }
      th[f] = Binding{b, formals};
    }
    if (valid && congruent(st.gx, apply_subst(st.tx, th))) {
      bool dup = false;
      for (auto& ex : st.results)
        if (mdetail::subst_equal(ex, th)) dup = true;
      if (!dup) st.results.push_back(th);
    }
    // advance choices
    size_t j = 0;
    while (j < m) {
      size_t s = 0;
      while (s < choice[j].size()) {
        choice[j][s]++;
        if (choice[j][s] < infos[j].sharedTouched[s].second.size()) break;
        choice[j][s] = 0;
        s++;
      }
      if (s < choice[j].size()) break;
      j++;
    }
    if (j >= m) break;
  }
}

inline void oracle_lambda(OracleState& st, std::map<FLink, FLink>& lambda,
                          std::vector<FLink>& unset, size_t k, const std::vector<int>& role) {
  if (k == unset.size()) {
    oracle_emit(st, lambda, role);
    return;
  }
  for (int l = 0; l < st.gf.nlocals; l++) {
    lambda[unset[k]] = l;
    oracle_lambda(st, lambda, unset, k + 1, role);
  }
  for (size_t i = 0; i < st.gf.frees.size(); i++) {
    lambda[unset[k]] = flink_free(static_cast<int>(i));
    oracle_lambda(st, lambda, unset, k + 1, role);
  }
  lambda.erase(unset[k]);
}

inline void oracle_roles(OracleState& st, std::vector<int>& role, size_t gi) {
  size_t slots = st.tAtoms.size() + st.tCtxs.size();
  if (gi == st.gf.items.size()) {
    // every template atom slot must be used exactly once
    std::vector<int> used(st.tAtoms.size(), 0);
    for (size_t i = 0; i < role.size(); i++)
      if (role[i] < static_cast<int>(st.tAtoms.size())) used[static_cast<size_t>(role[i])]++;
    for (int u : used)
      if (u != 1) return;
    // derive lambda from atom-slot pairs; fusions try both orientations
    std::vector<int> fusionSlots;
    for (size_t s = 0; s < st.tAtoms.size(); s++)
      if (st.tf.items[static_cast<size_t>(st.tAtoms[s])].kind == ItemKind::Fusion)
        fusionSlots.push_back(static_cast<int>(s));
    size_t orientations = size_t{1} << fusionSlots.size();
    for (size_t mask = 0; mask < orientations; mask++) {
      std::map<FLink, FLink> lambda;
      for (size_t i = 0; i < st.tf.frees.size(); i++) {
        int idx = -1;
        for (size_t kk = 0; kk < st.gf.frees.size(); kk++)
          if (st.gf.frees[kk] == st.tf.frees[i]) idx = static_cast<int>(kk);
        if (idx < 0) return;
        lambda[flink_free(static_cast<int>(i))] = flink_free(idx);
      }
      bool ok = true;
      for (size_t s = 0; s < st.tAtoms.size() && ok; s++) {
        const FlatItem& ta = st.tf.items[static_cast<size_t>(st.tAtoms[s])];
        int g = -1;
        for (size_t i = 0; i < role.size(); i++)
          if (role[i] == static_cast<int>(s)) g = static_cast<int>(i);
        const FlatItem& ga = st.gf.items[static_cast<size_t>(g)];
        if (!item_label_equal(ta, ga)) {
          ok = false;
          break;
        }
        std::vector<FLink> gargs = ga.args;
        bool flip = false;
        for (size_t fi = 0; fi < fusionSlots.size(); fi++)
          if (fusionSlots[fi] == static_cast<int>(s) && (mask & (size_t{1} << fi))) flip = true;
        if (flip) std::swap(gargs[0], gargs[1]);
        for (size_t a = 0; a < ta.args.size(); a++) {
          auto it = lambda.find(ta.args[a]);
          if (it == lambda.end())
            lambda[ta.args[a]] = gargs[a];
          else if (it->second != gargs[a]) {
            ok = false;
            break;
          }
        }
      }
      if (!ok) continue;
      std::vector<FLink> unset;
      for (int ci : st.tCtxs)
        for (auto a : st.tf.items[static_cast<size_t>(ci)].args)
          if (!lambda.count(a) && std::find(unset.begin(), unset.end(), a) == unset.end())
            unset.push_back(a);
      oracle_lambda(st, lambda, unset, 0, role);
    }
    return;
  }
  for (size_t s = 0; s < slots; s++) {
    role[gi] = static_cast<int>(s);
    oracle_roles(st, role, gi + 1);
  }
  role[gi] = -1;
}

}  // namespace odetail

inline std::vector<GroundSubst> oracle_match(const TermPtr& g, const TermPtr& t) {
  TermPtr gx = expand_term_deep(g);
  TermPtr tx = expand_term_deep(t);
  if (free_names(gx) != free_names(tx)) return {};
  FlatGraph gf = flatten(gx);
  canonicalize(gf);
  FlatGraph tf = flatten(tx);
  canonicalize(tf);
  odetail::OracleState st{gf, tf, {}, {}, gx, tx, {}};
  for (size_t i = 0; i < tf.items.size(); i++) {
    if (tf.items[i].kind == ItemKind::Ctx)
      st.tCtxs.push_back(static_cast<int>(i));
    else
      st.tAtoms.push_back(static_cast<int>(i));
  }
  if (gf.items.size() < st.tAtoms.size()) return {};
  std::vector<int> role(gf.items.size(), -1);
  odetail::oracle_roles(st, role, 0);
  return st.results;
}

inline bool same_subst_sets(const std::vector<GroundSubst>& a,
                            const std::vector<GroundSubst>& b) {
  if (a.size() != b.size()) return false;
  for (auto& x : a) {
    bool found = false;
    for (auto& y : b)
      if (mdetail::subst_equal(x, y)) found = true;
    if (!found) return false;
  }
  return true;
}

// random template derived from a graph: carve a connected-ish subset of the
// canonical atoms into a context
inline TermPtr rnd_template_from(Rng& rng, const TermPtr& g) {
  FlatGraph f = normalize(g);
  if (f.items.empty()) return g;
  int nCtx = 1 + rng.upto(2);
  std::vector<int> owner(f.items.size(), -1);  // -1 keep as atom, else ctx id
  for (size_t i = 0; i < f.items.size(); i++)
    if (rng.chance(0.5)) owner[i] = rng.upto(nCtx);
  // boundary links of each carved block become the context's formals
  std::vector<TermPtr> parts;
  std::set<FLink> keptLinks;
  for (size_t i = 0; i < f.items.size(); i++)
    if (owner[i] < 0)
      for (auto a : f.items[i].args) keptLinks.insert(a);
  std::map<FLink, LinkName> names;
  auto linkName = [&](FLink v) {
    auto it = names.find(v);
    if (it != names.end()) return it->second;
    std::string n = flink_local(v) ? "L" + std::to_string(v) + "l"
                                   : f.frees[flink_free_index(v)];
    names[v] = n;
    return n;
  };
  for (int c = 0; c < nCtx; c++) {
    std::set<FLink> blockLinks, boundary;
    bool used = false;
    for (size_t i = 0; i < f.items.size(); i++)
      if (owner[i] == c) {
        used = true;
        for (auto a : f.items[i].args) blockLinks.insert(a);
      }
    if (!used) continue;
    for (auto l : blockLinks) {
      bool outside = keptLinks.count(l) || !flink_local(l);
      if (!outside)
        for (size_t i = 0; i < f.items.size(); i++)
          if (owner[i] >= 0 && owner[i] != c)
            for (auto a : f.items[i].args)
              if (a == l) outside = true;
      if (outside) boundary.insert(l);
    }
    std::vector<Arg> args;
    for (auto l : boundary) args.push_back(arg_link(linkName(l)));
    parts.push_back(term_context("c" + std::to_string(c), args));
  }
  for (size_t i = 0; i < f.items.size(); i++) {
    if (owner[i] >= 0) continue;
    const FlatItem& it = f.items[i];
    std::vector<Arg> args;
    for (auto a : it.args) args.push_back(arg_link(linkName(a)));
    if (it.kind == ItemKind::Fusion)
      parts.push_back(term_fusion(args[0].link, args[1].link));
    else if (it.is_abs())
      parts.push_back(term_abs(it.abs, args));
    else
      parts.push_back(term_atom(it.name, args));
  }
  TermPtr t = term_mol_all(parts);
  // bind the graph's former locals that remained visible
  for (auto& [v, n] : names)
    if (flink_local(v)) t = term_nu(n, t);
  return t;
}

}  // namespace lgt::testing
