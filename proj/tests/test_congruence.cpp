#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace lgt;
using namespace lgt::testing;

TEST_CASE("normalize drops the null unit") {  // E1
  FlatGraph f = normalize(term_mol(term_null(), term_atom_links("p", {"X"})));
  REQUIRE(f.items.size() == 1);
  CHECK(f.items[0].name == "p");
}

TEST_CASE("normalize absorbs a closed fusion") {  // E7
  FlatGraph f = normalize(term_nu("X", term_nu("Y", term_fusion("X", "Y"))));
  CHECK(f.items.empty());
}

TEST_CASE("normalize drops binders that bind nothing") {  // Lemma A.1
  FlatGraph f = normalize(term_nu("X", term_atom_links("p", {"Y"})));
  REQUIRE(f.items.size() == 1);
  CHECK(f.nlocals == 0);
  CHECK(f.free_set() == std::set<std::string>{"Y"});
}

TEST_CASE("free-free fusions survive normalization") {
  FlatGraph f = normalize(term_fusion("X", "Y"));
  REQUIRE(f.items.size() == 1);
  CHECK(f.items[0].kind == ItemKind::Fusion);
}

TEST_CASE("fusion is symmetric") {  // Theorem 2.1
  CHECK(congruent(term_fusion("X", "Y"), term_fusion("Y", "X")));
}

TEST_CASE("molecules commute") {  // E2
  TermPtr a = term_mol(term_atom_links("p", {"X"}), term_atom_links("q", {"Y"}));
  TermPtr b = term_mol(term_atom_links("q", {"Y"}), term_atom_links("p", {"X"}));
  CHECK(congruent(a, b));
}

TEST_CASE("different free links are not congruent") {
  CHECK_FALSE(congruent(term_atom_links("p", {"X"}), term_atom_links("p", {"Y"})));
}

TEST_CASE("abstraction atom names compare modulo bound renaming") {
  TermPtr a = parse_template("(\\ $x[X, Y]. $x[X, Y])(Z)");
  TermPtr b = parse_template("(\\ $w[U, V]. $w[U, V])(Z)");
  TermPtr c = parse_template("(\\ $w[U, V]. $w[V, U])(Z)");
  CHECK(congruent(a, b));
  CHECK_FALSE(congruent(a, c));
}

TEST_CASE("congruence is an equivalence relation on random graphs") {
  Rng rng(11);
  for (int i = 0; i < 300; i++) {
    TermPtr g = rnd_graph(rng, 1 + rng.upto(7));
    CHECK(congruent(g, g));
    auto steps = erule_one_step(g);
    if (steps.empty()) continue;
    TermPtr h = steps[rng.upto(static_cast<int>(steps.size()))];
    CHECK(congruent(g, h));
    CHECK(congruent(h, g));
    auto steps2 = erule_one_step(h);
    if (!steps2.empty()) {
      TermPtr k = steps2[rng.upto(static_cast<int>(steps2.size()))];
      CHECK(congruent(h, k));
      CHECK(congruent(g, k));  // transitivity along a rewrite chain
    }
  }
}

TEST_CASE("every single E-rule application preserves congruence") {
  Rng rng(13);
  for (int i = 0; i < 250; i++) {
    TermPtr g = rnd_graph(rng, 1 + rng.upto(7));
    for (auto& h : erule_one_step(g)) {
      INFO(pretty(g) << "  ->  " << pretty(h));
      CHECK(congruent(g, h));
    }
  }
}

TEST_CASE("congruent graphs have equal free links") {
  Rng rng(17);
  for (int i = 0; i < 300; i++) {
    TermPtr g = rnd_graph(rng, 1 + rng.upto(7));
    for (auto& h : erule_one_step(g)) CHECK(free_names(g) == free_names(h));
  }
}

TEST_CASE("bound links are alpha-convertible") {  // Theorem 2.2
  Rng rng(19);
  for (int i = 0; i < 300; i++) {
    TermPtr g = rnd_graph(rng, 1 + rng.upto(6));
    LinkName x = rnd_link(rng);
    LinkName y = "Fresh" + std::to_string(i);
    REQUIRE_FALSE(free_names(g).count(y));
    CHECK(congruent(term_nu(x, g), term_nu(y, subst_links(g, {{x, y}}))));
  }
}

TEST_CASE("binders of absent links are droppable") {  // Lemma A.1, random
  Rng rng(23);
  for (int i = 0; i < 300; i++) {
    TermPtr g = rnd_graph(rng, rng.upto(6));
    LinkName x = "Absent";
    REQUIRE_FALSE(free_names(g).count(x));
    CHECK(congruent(term_nu(x, g), g));
  }
}

TEST_CASE("normalize round-trips through unflatten") {
  Rng rng(29);
  for (int i = 0; i < 300; i++) {
    TermPtr g = rnd_graph(rng, rng.upto(7));
    FlatGraph f = normalize(g);
    CHECK(congruent(unflatten(f), g));
    // idempotence up to local-id bijection
    CHECK(congruent_flat(normalize(unflatten(f)), f));
  }
}

TEST_CASE("hypothesis-style comparison renames free links bijectively") {
  FlatGraph a = normalize(term_atom_links("p", {"X", "Y"}));
  FlatGraph b = normalize(term_atom_links("p", {"U", "V"}));
  CHECK(congruent_flat(a, b, /*renameFrees=*/true));
  CHECK_FALSE(congruent_flat(a, b, /*renameFrees=*/false));
  FlatGraph c = normalize(term_atom_links("p", {"U", "U"}));
  CHECK_FALSE(congruent_flat(a, c, /*renameFrees=*/true));
}
