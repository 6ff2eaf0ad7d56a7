#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "folsynth/semantics.hpp"
#include "support/brute_force.hpp"
#include "support/random_formula.hpp"

using namespace folsynth;

namespace {

World two_world() {
  // n=2, R = {(a0,a1)}, everything else empty.
  World w = World::empty(2);
  w.set_binary('R', 0, 1, true);
  return w;
}

} // namespace

TEST_CASE("existential over a single edge") {
  World w = two_world();
  Formula f = parse("(exists y (R x y))");
  CHECK(evaluate(f, w, 0));
  CHECK_FALSE(evaluate(f, w, 1));
}

TEST_CASE("equality is identity") {
  World w = two_world();
  Formula f = parse("(= x x)");
  for (int a = 0; a < w.n; ++a) {
    CHECK(evaluate(f, w, a));
  }
}

TEST_CASE("guarded universal with a single successor") {
  World w = World::empty(3);
  w.set_binary('R', 0, 1, true);
  w.p[1] = 1;
  Formula f = parse("(forall y (or (not (R x y)) (P y)))");
  CHECK(evaluate(f, w, 0));
  // a2 has no successors: vacuously true.
  CHECK(evaluate(f, w, 2));
  w.set_binary('R', 0, 2, true);
  CHECK_FALSE(evaluate(f, w, 0));
}

TEST_CASE("extension is the pointwise evaluation") {
  World w = World::empty(3);
  w.p = {1, 0, 1};
  Extension ext = extension(parse("(P x)"), w);
  CHECK(extension_elements(ext) == std::vector<int>{0, 2});
  CHECK(extension_elements(extension(parse("(and (P x) (not (P x)))"), w)).empty());
}

TEST_CASE("matches compares against the target") {
  World w = World::empty(3);
  w.p = {1, 0, 1};
  w.target = {1, 0, 1};
  CHECK(matches(parse("(P x)"), w));
  w.target = {1, 0, 0};
  CHECK_FALSE(matches(parse("(P x)"), w));
  w.target = {0, 0, 0};
  CHECK(matches(parse("(and (P x) (not (P x)))"), w));
}

TEST_CASE("solves_fullobs is the conjunction over worlds") {
  Rng rng(11);
  Formula gold = parse("(exists y (R x y))");
  std::vector<World> worlds;
  for (int i = 0; i < 3; ++i) {
    World w = testgen::random_world(rng, 4);
    w.target = extension(gold, w);
    worlds.push_back(w);
  }
  CHECK(solves_fullobs(gold, worlds));
  worlds[1].target[0] ^= 1;
  CHECK_FALSE(solves_fullobs(gold, worlds));
  bool vacuous = false;
  CHECK(solves_fullobs(gold, {}, &vacuous));
  CHECK(vacuous);
}

TEST_CASE("solves_ci needs YES matches and NO mismatches") {
  Rng rng(12);
  Formula gold = parse("(exists y (and (R x y) (P y)))");
  std::vector<World> yes, no;
  for (int i = 0; i < 2; ++i) {
    World w = testgen::random_world(rng, 5);
    w.target = extension(gold, w);
    yes.push_back(w);
  }
  for (int i = 0; i < 2; ++i) {
    World w = testgen::random_world(rng, 5);
    Extension ext = extension(gold, w);
    ext[0] ^= 1; // force a mismatch against the gold
    w.target = ext;
    no.push_back(w);
  }
  CHECK(solves_ci(gold, yes, no));
  // A formula that matches a NO world exactly fails.
  World bad = no[0];
  Formula trap = parse("(exists y (R x y))");
  bad.target = extension(trap, bad);
  std::vector<World> no2 = {bad};
  CHECK_FALSE(solves_ci(trap, yes, no2));
}

TEST_CASE("error profile counts FP and FN") {
  World w = World::empty(4);
  w.p = {1, 1, 0, 0};
  w.target = {1, 0, 1, 0};
  ErrorProfile ep = error_profile(parse("(P x)"), w);
  CHECK(ep.false_positives == 1);
  CHECK(ep.false_negatives == 1);
  CHECK(ep.fp_rate == doctest::Approx(0.25));
  CHECK(ep.fn_rate == doctest::Approx(0.25));

  w.target = {0, 0, 0, 0};
  ErrorProfile full = error_profile(parse("(or (P x) (not (P x)))"), w);
  CHECK(full.false_positives == 4);
  CHECK(full.false_negatives == 0);

  w.target = extension(parse("(P x)"), w);
  ErrorProfile perfect = error_profile(parse("(P x)"), w);
  CHECK(perfect.mismatches() == 0);
}

TEST_CASE("no_margin averages NO-world mismatches and detects NO-fail") {
  Rng rng(13);
  Formula f = parse("(P x)");
  World w1 = testgen::random_world(rng, 4);
  w1.target = extension(f, w1); // exact match: margin 0 = NO-fail
  World w2 = testgen::random_world(rng, 4);
  Extension e2 = extension(f, w2);
  e2[0] ^= 1;
  e2[1] ^= 1;
  w2.target = e2;
  std::vector<World> nos = {w1, w2};
  CHECK(no_margin(f, nos) == doctest::Approx(1.0));
  CHECK(error_profile(f, w1).mismatches() == 0);
  CHECK(matches(f, w1)); // zero margin on w1 is exactly an exact match
}

TEST_CASE("matches iff error profile is clean, on random inputs") {
  Rng rng(14);
  for (int i = 0; i < 500; ++i) {
    Formula f = testgen::random_formula(rng, 2);
    World w = testgen::random_world(rng, 3 + static_cast<int>(rng.below(3)));
    CHECK(matches(f, w) == (error_profile(f, w).mismatches() == 0));
  }
}

TEST_CASE("De Morgan metamorphic property") {
  Rng rng(15);
  for (int i = 0; i < 500; ++i) {
    int n = 2 + static_cast<int>(rng.below(3));
    World w = testgen::random_world(rng, n);
    Formula a = testgen::random_formula(rng, 1);
    Formula b = testgen::random_formula(rng, 1);
    Formula lhs = negation(disjunction({a, b}));
    Formula rhs = conjunction({negation(a), negation(b)});
    for (int e = 0; e < n; ++e) {
      CHECK(evaluate(lhs, w, e) == evaluate(rhs, w, e));
    }
  }
}

TEST_CASE("oracle equivalence: evaluator vs brute force on 1000 random pairs") {
  Rng rng(16);
  for (int i = 0; i < 1000; ++i) {
    Formula f = testgen::random_formula(rng, 2);
    int n = 1 + static_cast<int>(rng.below(4)); // n <= 4
    World w = testgen::random_world(rng, n);
    for (int a = 0; a < n; ++a) {
      REQUIRE(evaluate(f, w, a) == oracle::brute_evaluate(f, w, a));
    }
  }
}
