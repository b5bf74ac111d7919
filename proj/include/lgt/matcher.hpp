#pragma once

// Matching G == T theta: deterministic enumeration of ground substitutions.
// Template atoms are assigned to graph atoms injectively; the remaining
// atoms are distributed over the graph contexts; link assignments close the
// candidate. Every yielded substitution satisfies congruent(g, apply(t, theta)).

#include "lgt/subst.hpp"
#include "lgt/verify.hpp"

namespace lgt {

struct Binding {
  TermPtr graph;
  std::vector<LinkName> formals;
};

using GroundSubst = std::map<Functor, Binding>;

inline TermPtr apply_subst(const TermPtr& t, const GroundSubst& th) {
  TermPtr acc = t;
  for (auto& [f, b] : th)
    acc = graph_substitute_term(acc, b.graph, CtxTarget{f.name, b.formals});
  return acc;
}

namespace mdetail {

struct MatchState {
  const FlatGraph& gf;
  const FlatGraph& tf;
  std::vector<int> tAtoms, tCtxs;          // indices into tf.items
  std::map<FLink, FLink> lambda;           // tf link -> gf link
  std::vector<char> gUsed;
  std::vector<GroundSubst> results;
  const TermPtr* gOrig = nullptr;
  const TermPtr* tOrig = nullptr;
  size_t limit = SIZE_MAX;
};

inline bool unify(MatchState& st, FLink tl, FLink gl,
                  std::vector<FLink>& journal) {
  auto it = st.lambda.find(tl);
  if (it != st.lambda.end()) return it->second == gl;  // frees are pre-pinned
  if (!flink_local(tl)) return false;
  st.lambda[tl] = gl;
  journal.push_back(tl);
  return true;
}

inline void undo(MatchState& st, std::vector<FLink>& journal, size_t mark) {
  while (journal.size() > mark) {
    st.lambda.erase(journal.back());
    journal.pop_back();
  }
}

inline bool try_atom(MatchState& st, const FlatItem& ta, const FlatItem& ga,
                     std::vector<FLink>& journal) {
  if (!item_label_equal(ta, ga)) return false;
  size_t mark = journal.size();
  auto attempt = [&](const std::vector<FLink>& gargs) {
    for (size_t i = 0; i < ta.args.size(); i++)
      if (!unify(st, ta.args[i], gargs[i], journal)) {
        undo(st, journal, mark);
        return false;
      }
    return true;
  };
  if (attempt(ga.args)) return true;
  if (ta.kind == ItemKind::Fusion) {
    std::vector<FLink> rev{ga.args[1], ga.args[0]};
    if (attempt(rev)) return true;
  }
  return false;
}

// Build the graphs bindable to one context from its assigned atoms. When
// several formal links land on the same graph link and atoms touch it, each
// formal may serve as the one the atoms connect to (the others fuse to it);
// the choices yield congruence-distinct bindings, so all are produced.
inline std::vector<Binding> build_bindings(const MatchState& st, const FlatItem& ctx,
                                           const std::vector<int>& assignedAtoms,
                                           const std::vector<char>& outsideUse) {
  std::vector<Binding> none;
  std::vector<FLink> formalG;  // lambda images, positional
  for (auto a : ctx.args) {
    auto it = st.lambda.find(a);
    if (it == st.lambda.end()) return none;  // unset link
    formalG.push_back(it->second);
  }
  std::vector<LinkName> formalNames = ctx.ctxArgNames;

  std::map<FLink, std::vector<size_t>> formalsByG;
  for (size_t i = 0; i < formalG.size(); i++) formalsByG[formalG[i]].push_back(i);

  std::set<FLink> touched;
  for (int gi : assignedAtoms)
    for (auto a : st.gf.items[gi].args) touched.insert(a);

  // anchor choices: per shared-and-touched group, which formal the atoms use
  std::vector<std::pair<FLink, std::vector<size_t>>> shared;
  for (auto& [gl, positions] : formalsByG) {
    if (positions.size() == 1 && !touched.count(gl)) return none;  // dangling formal
    if (positions.size() >= 2 && touched.count(gl)) shared.push_back({gl, positions});
  }

  std::vector<size_t> choice(shared.size(), 0);
  std::vector<Binding> out;
  for (;;) {
    std::map<FLink, size_t> anchor;  // gf link -> formal position atoms use
    for (auto& [gl, positions] : formalsByG) anchor[gl] = positions[0];
    for (size_t s = 0; s < shared.size(); s++) anchor[shared[s].first] = shared[s].second[choice[s]];

    FlatGraph bg;
    for (auto& n : formalNames) bg.intern_free(n);
    std::map<FLink, FLink> toB;
    bool ok = true;
    auto blink = [&](FLink gl) -> std::optional<FLink> {
      auto it = toB.find(gl);
      if (it != toB.end()) return it->second;
      FLink r;
      auto fb = anchor.find(gl);
      if (fb != anchor.end()) {
        r = flink_free(static_cast<int>(fb->second));  // formal position == free index
      } else if (!flink_local(gl)) {
        return std::nullopt;  // graph free link absorbed into a binding
      } else if (outsideUse[static_cast<size_t>(gl)]) {
        return std::nullopt;  // shared with atoms outside this binding
      } else {
        r = bg.fresh_local();
      }
      toB[gl] = r;
      return r;
    };
    for (int gi : assignedAtoms) {
      FlatItem it = st.gf.items[gi];
      for (auto& a : it.args) {
        auto r = blink(a);
        if (!r) {
          ok = false;
          break;
        }
        a = *r;
      }
      if (!ok) break;
      it.ctxArgNames.clear();
      bg.items.push_back(std::move(it));
    }
    if (ok) {
      // fusions between formals sharing a graph link
      for (auto& [gl, positions] : formalsByG) {
        if (positions.size() < 2) continue;
        size_t a0 = anchor.at(gl);
        for (size_t p : positions) {
          if (p == a0) continue;
          FlatItem fu;
          fu.kind = ItemKind::Fusion;
          fu.args = {flink_free(static_cast<int>(a0)), flink_free(static_cast<int>(p))};
          bg.items.push_back(std::move(fu));
        }
      }
      // the binding must be ground with exactly the formal links free
      FlatGraph check = bg;
      canonicalize(check);
      std::set<std::string> want(formalNames.begin(), formalNames.end());
      if (check.free_set() == want) out.push_back(Binding{unflatten(bg), formalNames});
    }
    // next anchor combination
    size_t k = 0;
    while (k < shared.size()) {
      choice[k]++;
      if (choice[k] < shared[k].second.size()) break;
      choice[k] = 0;
      k++;
    }
    if (k >= shared.size()) break;
  }
  return out;
}

inline bool subst_equal(const GroundSubst& a, const GroundSubst& b) {
  if (a.size() != b.size()) return false;
  for (auto& [f, ba] : a) {
    auto it = b.find(f);
    if (it == b.end()) return false;
    const Binding& bb = it->second;
    if (ba.formals.size() != bb.formals.size()) return false;
    LinkSubst sa, sb;
    for (size_t i = 0; i < ba.formals.size(); i++) {
      std::string c = "#Q" + std::to_string(i);
      sa.push_back({ba.formals[i], c});
      sb.push_back({bb.formals[i], c});
    }
    if (!congruent(subst_links(ba.graph, sa), subst_links(bb.graph, sb))) return false;
  }
  return true;
}

inline void emit_with(MatchState& st, const GroundSubst& th) {
  // soundness gate: congruent(g, t theta)
  TermPtr applied = apply_subst(*st.tOrig, th);
  if (!congruent(*st.gOrig, applied)) return;
  for (auto& ex : st.results)
    if (subst_equal(ex, th)) return;
  st.results.push_back(th);
}

inline void emit_candidate(MatchState& st, const std::vector<int>& ctxAssign,
                           const std::vector<int>& remaining) {
  size_t m = st.tCtxs.size();
  std::vector<std::vector<int>> blocks(m);
  for (size_t r = 0; r < remaining.size(); r++)
    blocks[static_cast<size_t>(ctxAssign[r])].push_back(remaining[r]);

  std::vector<std::vector<Binding>> options(m);
  std::vector<Functor> functors(m);
  for (size_t j = 0; j < m; j++) {
    const FlatItem& ctx = st.tf.items[static_cast<size_t>(st.tCtxs[j])];
    // links used by atoms outside this block cannot be internalized
    std::vector<char> outside(static_cast<size_t>(st.gf.nlocals), 0);
    std::vector<char> inBlock(st.gf.items.size(), 0);
    for (int gi : blocks[j]) inBlock[static_cast<size_t>(gi)] = 1;
    for (size_t gi = 0; gi < st.gf.items.size(); gi++) {
      if (inBlock[gi]) continue;
      for (auto a : st.gf.items[gi].args)
        if (flink_local(a)) outside[static_cast<size_t>(a)] = 1;
    }
    options[j] = build_bindings(st, ctx, blocks[j], outside);
    if (options[j].empty()) return;
    functors[j] = Functor{ctx.name, static_cast<int>(ctx.args.size())};
    for (size_t k = 0; k < j; k++)
      if (functors[k] == functors[j]) return;  // disjoint domains (Mt-Mol)
  }
  std::vector<size_t> pick(m, 0);
  for (;;) {
    GroundSubst th;
    for (size_t j = 0; j < m; j++) th[functors[j]] = options[j][pick[j]];
    emit_with(st, th);
    if (st.results.size() >= st.limit) return;
    size_t k = 0;
    while (k < m) {
      pick[k]++;
      if (pick[k] < options[k].size()) break;
      pick[k] = 0;
      k++;
    }
    if (k >= m) break;
  }
}

inline void enumerate_unset(MatchState& st, const std::vector<int>& ctxAssign,
                            const std::vector<int>& remaining,
                            std::vector<FLink>& unset, size_t k) {
  if (st.results.size() >= st.limit) return;
  if (k == unset.size()) {
    emit_candidate(st, ctxAssign, remaining);
    return;
  }
  std::vector<FLink> values;
  for (int l = 0; l < st.gf.nlocals; l++) values.push_back(l);
  for (size_t i = 0; i < st.gf.frees.size(); i++) values.push_back(flink_free(static_cast<int>(i)));
  for (auto v : values) {
    st.lambda[unset[k]] = v;
    enumerate_unset(st, ctxAssign, remaining, unset, k + 1);
    st.lambda.erase(unset[k]);
    if (st.results.size() >= st.limit) return;
  }
}

inline void assign_contexts(MatchState& st, const std::vector<int>& remaining) {
  size_t m = st.tCtxs.size();
  if (!remaining.empty() && m == 0) return;
  std::vector<int> assign(remaining.size(), 0);
  auto run = [&]() {
    // link images for template locals that appear only in context formals
    std::vector<FLink> unset;
    for (int ci : st.tCtxs)
      for (auto a : st.tf.items[static_cast<size_t>(ci)].args)
        if (flink_local(a) && !st.lambda.count(a) &&
            std::find(unset.begin(), unset.end(), a) == unset.end())
          unset.push_back(a);
    enumerate_unset(st, assign, remaining, unset, 0);
  };
  if (remaining.empty() && m == 0) {
    run();
    return;
  }
  for (;;) {
    run();
    if (st.results.size() >= st.limit) return;
    // next assignment (lexicographic, base m)
    size_t k = 0;
    while (k < assign.size()) {
      assign[k]++;
      if (assign[k] < static_cast<int>(m)) break;
      assign[k] = 0;
      k++;
    }
    if (k >= assign.size()) break;
  }
}

inline void match_atoms(MatchState& st, size_t k, std::vector<FLink>& journal) {
  if (st.results.size() >= st.limit) return;
  if (k == st.tAtoms.size()) {
    std::vector<int> remaining;
    for (size_t gi = 0; gi < st.gf.items.size(); gi++)
      if (!st.gUsed[gi]) remaining.push_back(static_cast<int>(gi));
    assign_contexts(st, remaining);
    return;
  }
  const FlatItem& ta = st.tf.items[static_cast<size_t>(st.tAtoms[k])];
  for (size_t gi = 0; gi < st.gf.items.size(); gi++) {
    if (st.gUsed[gi]) continue;
    size_t mark = journal.size();
    if (try_atom(st, ta, st.gf.items[gi], journal)) {
      st.gUsed[gi] = 1;
      match_atoms(st, k + 1, journal);
      st.gUsed[gi] = 0;
      undo(st, journal, mark);
      if (st.results.size() >= st.limit) return;
    }
  }
}

}  // namespace mdetail

// Enumerates all matches in a deterministic order (limit caps the search).
inline std::vector<GroundSubst> match_template(const TermPtr& g, const TermPtr& t,
                                               size_t limit = SIZE_MAX) {
  TermPtr gx = expand_term_deep(g);
  TermPtr tx = expand_term_deep(t);
  if (has_context(gx)) throw LgtError("match_template: graph side contains a context");
  if (free_names(gx) != free_names(tx)) return {};
  FlatGraph gf = flatten(gx);
  canonicalize(gf);
  FlatGraph tf = flatten(tx);
  canonicalize(tf);

  mdetail::MatchState st{gf, tf, {}, {}, {}, {}, {}, &gx, &tx, limit};
  for (size_t i = 0; i < tf.items.size(); i++) {
    if (tf.items[i].kind == ItemKind::Ctx)
      st.tCtxs.push_back(static_cast<int>(i));
    else
      st.tAtoms.push_back(static_cast<int>(i));
  }
  st.gUsed.assign(gf.items.size(), 0);
  // pin template frees to same-named graph frees
  for (size_t i = 0; i < tf.frees.size(); i++) {
    int idx = -1;
    for (size_t k = 0; k < gf.frees.size(); k++)
      if (gf.frees[k] == tf.frees[i]) idx = static_cast<int>(k);
    if (idx < 0) return {};
    st.lambda[flink_free(static_cast<int>(i))] = flink_free(idx);
  }
  std::vector<FLink> journal;
  mdetail::match_atoms(st, 0, journal);
  return st.results;
}

// Mt-Ty: the first structurally matching substitution whose bound graphs
// pass check_graph against their annotations.
inline std::optional<GroundSubst> match_checked(const TermPtr& g, const TermPtr& t,
                                                const Grammar& orig, const VerifierGrammar& ver,
                                                const VerifyConfig& cfg = {}) {
  TermPtr tx = expand_term_deep(t);
  FlatGraph tf = flatten(tx);
  struct Anno {
    Functor f;
    TypeAtomPtr type;
    std::vector<LinkName> argNames;
  };
  std::vector<Anno> annos;
  for (auto& it : tf.items)
    if (it.kind == ItemKind::Ctx && it.type)
      annos.push_back(Anno{Functor{it.name, static_cast<int>(it.args.size())}, it.type,
                           it.ctxArgNames});
  auto all = match_template(g, t);
  for (auto& th : all) {
    bool ok = true;
    for (auto& an : annos) {
      auto bit = th.find(an.f);
      if (bit == th.end()) {
        ok = false;
        break;
      }
      const Binding& b = bit->second;
      // goal type links: annotation links resolved through the context's
      // own argument names onto the binding's formals
      std::vector<LinkName> goalLinks;
      bool resolved = true;
      for (auto& l : an.type->links) {
        int pos = -1;
        for (size_t i = 0; i < an.argNames.size(); i++)
          if (an.argNames[i] == l) pos = static_cast<int>(i);
        if (pos < 0) {
          resolved = false;
          break;
        }
        goalLinks.push_back(b.formals[static_cast<size_t>(pos)]);
      }
      if (!resolved) {
        ok = false;
        break;
      }
      TypeAtomPtr goal = type_with_links(an.type, goalLinks);
      bool pass;
      if (goal->is_arrow()) {
        // arrow annotation: the bound graph must be one abstraction atom of
        // a matching arrow type
        FlatGraph bf = flatten(b.graph);
        canonicalize(bf);
        pass = false;
        if (bf.items.size() == 1 && bf.items[0].is_abs()) {
          try {
            TypeAtomPtr ty = type_of_expr(TypingContext{}, orig, ver,
                                          expr_graph(term_abs(bf.items[0].abs, {})), cfg);
            pass = type_equal_mod_links(type_with_links(ty, {}), type_with_links(goal, {}));
          } catch (TypeError&) {
            pass = false;
          }
        }
      } else {
        pass = check_graph(b.graph, goal, orig, ver, cfg);
      }
      if (!pass) {
        ok = false;
        break;
      }
    }
    if (ok) return th;
  }
  return std::nullopt;
}

}  // namespace lgt
