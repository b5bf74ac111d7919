#include <catch2/catch_amalgamated.hpp>

#include "oracle.hpp"

using namespace lgt;
using namespace lgt::testing;

static Grammar nodes_grammar() {
  return load_grammar(parse_type_defs(slurp(programs_dir() + "/nodes.lgt")));
}

TEST_CASE("a single context matches the whole graph") {
  auto ms = match_template(parse_template("cons(1, Y, X)"), parse_template("$x[Y, X]"));
  REQUIRE(ms.size() == 1);
  const Binding& b = ms[0].at(Functor{"x", 2});
  CHECK(b.formals == std::vector<LinkName>{"Y", "X"});
  CHECK(congruent(b.graph, parse_template("cons(1, Y, X)")));
}

TEST_CASE("matching a value against itself yields the empty substitution") {
  TermPtr v = parse_template("nu N. (cons(N, Y, X), zero(N))");
  auto ms = match_template(v, v);
  REQUIRE(ms.size() == 1);
  CHECK(ms[0].empty());
}

TEST_CASE("the pop pattern splits payload and prefix") {
  TermPtr g = parse_template("cons(1, cons(2, Y), X)");
  TermPtr t = parse_template("$y[cons($z, Y), X]");
  auto ms = match_template(g, t);
  REQUIRE(ms.size() == 1);
  const Binding& by = ms[0].at(Functor{"y", 2});
  const Binding& bz = ms[0].at(Functor{"z", 1});
  CHECK(by.formals[1] == "X");
  CHECK(congruent(subst_links(by.graph, {{by.formals[0], "Q"}}),
                  parse_template("cons(1, Q, X)")));
  CHECK(congruent(subst_links(bz.graph, {{bz.formals[0], "Q"}}), parse_template("2(Q)")));
}

TEST_CASE("free-link mismatch yields no matches") {
  CHECK(match_template(parse_template("p(X)"), parse_template("$x[Y]")).empty());
  CHECK(match_template(parse_template("p(X)"), parse_template("$x[X, Y]")).empty());
}

TEST_CASE("the concatenation pattern finds the empty splits too") {
  TermPtr g = parse_template("cons(1, Y, X)");
  TermPtr t = parse_template("nu Z. ($x[Z, X], $y[Y, Z])");
  auto ms = match_template(g, t);
  // cut before or after the single element
  CHECK(ms.size() == 2);
  for (auto& th : ms) {
    CHECK(congruent(apply_subst(t, th), g));
    for (auto& [f, b] : th) {
      CHECK_FALSE(has_context(b.graph));
      std::set<LinkName> want(b.formals.begin(), b.formals.end());
      CHECK(free_names(b.graph) == want);
    }
  }
}

TEST_CASE("match_checked accepts the typed pop binding") {
  Grammar g = nodes_grammar();
  VerifierGrammar ver = eliminate_fusions_all(g);
  TermPtr scrut = parse_template("cons(zero, cons(succ(zero), Y), X)");
  TermPtr pat = parse_template(
      "nu Z1 Z2. ($y[Z1, X] : nodes(Z1, X), cons(Z2, Y, Z1), $z[Z2] : nat(Z2))");
  auto th = match_checked(scrut, pat, g, ver);
  REQUIRE(th.has_value());
  const Binding& by = th->at(Functor{"y", 2});
  CHECK(congruent(subst_links(by.graph, {{by.formals[0], "Q"}}),
                  parse_template("cons(zero, Q, X)")));
}

TEST_CASE("match_checked fails structurally on the empty list") {
  Grammar g = nodes_grammar();
  VerifierGrammar ver = eliminate_fusions_all(g);
  TermPtr pat = parse_template(
      "nu Z1 Z2. ($y[Z1, X] : nodes(Z1, X), cons(Z2, Y, Z1), $z[Z2] : nat(Z2))");
  CHECK_FALSE(match_checked(parse_template("X >< Y"), pat, g, ver).has_value());
}

TEST_CASE("match_checked rejects an annotation at an undefined arity") {
  Grammar g = nodes_grammar();
  VerifierGrammar ver = eliminate_fusions_all(g);
  TermPtr scrut = parse_template("cons(zero, cons(succ(zero), Y), X)");
  // nodes/1 is not a defined type, so the dynamic check can never pass
  TermPtr pat = parse_template(
      "nu Z1 Z2. ($y[Z1, X] : nodes(Z1, X), cons(Z2, Y, Z1), $z[Z2] : nodes(Z2))");
  CHECK_FALSE(match_checked(scrut, pat, g, ver).has_value());
}

TEST_CASE("match_checked rejects ill-typed payloads") {
  Grammar g = nodes_grammar();
  VerifierGrammar ver = eliminate_fusions_all(g);
  TermPtr scrut = parse_template("cons(1, cons(2, Y), X)");  // 1, 2 are not nats
  TermPtr pat = parse_template(
      "nu Z1 Z2. ($y[Z1, X] : nodes(Z1, X), cons(Z2, Y, Z1), $z[Z2] : nat(Z2))");
  CHECK_FALSE(match_checked(scrut, pat, g, ver).has_value());
}

TEST_CASE("matcher agrees with the brute-force oracle on random pairs") {
  Rng rng(41);
  int done = 0;
  for (int i = 0; done < 120 && i < 500; i++) {
    TermPtr g = rnd_graph(rng, 1 + rng.upto(4), 4);
    if (has_context(g)) continue;
    TermPtr t = rng.chance(0.6) ? rnd_template_from(rng, g) : rnd_graph(rng, 1 + rng.upto(3), 4);
    FlatGraph tf = flatten(expand_term_deep(t));
    int ctxs = 0;
    for (auto& it : tf.items)
      if (it.kind == ItemKind::Ctx) ctxs++;
    if (ctxs > 2) continue;
    done++;
    auto mine = match_template(g, t);
    auto theirs = oracle_match(g, t);
    INFO("g = " << pretty(g) << "\n t = " << pretty(t) << "\n mine=" << mine.size()
                << " oracle=" << theirs.size());
    CHECK(same_subst_sets(mine, theirs));
  }
  CHECK(done >= 120);
}
