#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <set>

#include "folsynth/completion.hpp"
#include "folsynth/generate.hpp"
#include "folsynth/semantics.hpp"
#include "support/random_formula.hpp"

using namespace folsynth;

namespace {

World world_with_target_equal_p(Rng& rng, int n) {
  World w = testgen::random_world(rng, n);
  w.target = extension(parse("(P x)"), w);
  return w;
}

// Shared across test cases; pool construction is the expensive part.
const FrozenPool& test_pool() {
  static const FrozenPool pool = [] {
    std::vector<Template> golds;
    for (const Template& t : builtin_templates()) {
      if (t.qd >= 1) golds.push_back(t);
    }
    return build_frozen_pool(golds, 17);
  }();
  return pool;
}

} // namespace

TEST_CASE("filter_atomic rejects targets explained by a literal") {
  Rng rng(41);
  std::vector<World> worlds;
  for (int i = 0; i < 3; ++i) worlds.push_back(world_with_target_equal_p(rng, 5));
  CHECK_FALSE(filter_atomic(worlds));
  // Flip one target bit on one world: (P x) no longer matches everywhere.
  worlds[0].target[0] ^= 1;
  bool p_only = true;
  for (const World& w : worlds) {
    p_only = p_only && matches(parse("(P x)"), w);
  }
  CHECK_FALSE(p_only);
}

TEST_CASE("filter_subformula rejects when a gold part suffices") {
  Rng rng(42);
  Formula gold = parse("(and (P x) (exists y (R x y)))");
  // Regular out-degree makes (exists y (R x y)) constantly true, so targets
  // labeled by the gold coincide with (P x), a proper subformula.
  SamplingParams p;
  std::vector<World> worlds;
  for (int i = 0; i < 3; ++i) worlds.push_back(sample_world(p, gold, rng.next_u64()));
  CHECK_FALSE(filter_subformula(gold, worlds));
}

TEST_CASE("filter_quantifier_free rejects small boolean explanations") {
  Rng rng(43);
  Formula booleanRule = parse("(or (P x) (Q x))");
  std::vector<World> worlds;
  for (int i = 0; i < 3; ++i) {
    World w = testgen::random_world(rng, 5);
    w.target = extension(booleanRule, w);
    worlds.push_back(w);
  }
  CHECK_FALSE(filter_quantifier_free(worlds));
}

TEST_CASE("select_golds respects QD constraints and caps") {
  const BandConfig& simple = find_band(Task::FullObs, "simple");
  std::vector<Template> golds = select_golds(simple, builtin_templates(), 20, 5);
  REQUIRE(golds.size() == 20);
  std::map<std::string, int> per_gold;
  std::map<std::string, int> per_subfamily;
  for (const Template& g : golds) {
    CHECK(g.qd == 1);
    per_gold[g.text]++;
    per_subfamily[g.subfamily]++;
  }
  for (const auto& [text, n] : per_gold) CHECK(n <= simple.per_gold_cap);
  for (const auto& [key, n] : per_subfamily) CHECK(n <= simple.per_subfamily_cap);
}

TEST_CASE("select_golds honors the lift-hard mix") {
  const BandConfig& lift_mix = find_band(Task::CI, "lift_mix");
  std::vector<Template> golds = select_golds(lift_mix, builtin_templates(), 80, 9);
  REQUIRE(golds.size() == 80);
  int lift = 0;
  for (const Template& g : golds) lift += g.lift_hard ? 1 : 0;
  CHECK(lift == 28); // 35% of 80

  const BandConfig& core = find_band(Task::CI, "core");
  for (const Template& g : select_golds(core, builtin_templates(), 20, 9)) {
    CHECK_FALSE(g.lift_hard);
    CHECK(g.qd >= 1);
  }
}

TEST_CASE("generated lift_mix corpora keep the exact lift fraction") {
  const BandConfig& band = find_band(Task::CI, "lift_mix");
  GenerationResult res = generate_corpus(band, 20, 2718);
  REQUIRE(res.instances.size() == 20);
  int lift = 0;
  for (const ProblemInstance& inst : res.instances) lift += inst.gold.lift_hard ? 1 : 0;
  CHECK(lift == 7); // 35% of 20
}

TEST_CASE("select_golds raises InsufficientPool when constraints cannot hold") {
  BandConfig tight = find_band(Task::FullObs, "simple");
  tight.per_gold_cap = 1;
  tight.per_subfamily_cap = 1;
  CHECK_THROWS_AS(select_golds(tight, builtin_templates(), 5000, 3), InsufficientPool);
}

TEST_CASE("fullobs instances satisfy the generator invariants") {
  const BandConfig& band = find_band(Task::FullObs, "simple");
  GenerationResult res = generate_corpus(band, 6, 321);
  REQUIRE(res.instances.size() == 6);
  for (const ProblemInstance& inst : res.instances) {
    std::vector<World> worlds = inst.full_train_worlds();
    CHECK(worlds.size() == 4); // simple band k
    for (const World& w : worlds) {
      CHECK(w.n >= 5);
      CHECK(w.n <= 7);
    }
    CHECK(solves_fullobs(inst.gold.formula, worlds));
    CHECK(filter_atomic(worlds));
    CHECK(filter_subformula(inst.gold.formula, worlds));
    CHECK(filter_quantifier_free(worlds));
    REQUIRE(inst.diagnostics.kill_counts.size() == worlds.size());
    CHECK(inst.diagnostics.kill_counts[0] >= 1);
    // Survivor counts only shrink.
    for (std::size_t i = 1; i < inst.diagnostics.survivor_history.size(); ++i) {
      CHECK(inst.diagnostics.survivor_history[i] <=
            inst.diagnostics.survivor_history[i - 1]);
    }
  }
}

TEST_CASE("ci instances satisfy survivor bounds and NO-world construction") {
  const BandConfig& band = find_band(Task::CI, "core");
  GenerationResult res = generate_corpus(band, 6, 99);
  REQUIRE(res.instances.size() == 6);
  for (const ProblemInstance& inst : res.instances) {
    std::vector<World> yes = inst.full_worlds(WorldRole::Yes);
    std::vector<World> no = inst.full_worlds(WorldRole::No);
    CHECK(yes.size() >= 7);
    CHECK(yes.size() <= 8);
    CHECK(no.size() >= 2);
    CHECK(no.size() <= 3);
    for (const World& w : yes) {
      CHECK(w.n >= 7);
      CHECK(w.n <= 9);
    }
    CHECK(solves_ci(inst.gold.formula, yes, no));

    // Survivor band: recorded survivors match all YES worlds.
    const auto& survivors = inst.diagnostics.survivors_after_yes;
    int total = static_cast<int>(survivors.size());
    CHECK(total >= 2);
    CHECK(total <= 4);
    std::vector<char> survivor_killed(survivors.size(), 0);
    for (const std::string& text : survivors) {
      Formula trap = parse(text);
      for (const World& w : yes) {
        CHECK(matches(trap, w));
      }
    }
    // Every NO world is exactly matched by its recorded trap, which the
    // gold does not match; and collectively every survivor dies.
    REQUIRE(inst.diagnostics.no_world_trap.size() == no.size());
    for (std::size_t i = 0; i < no.size(); ++i) {
      Formula trap = parse(inst.diagnostics.no_world_trap[i]);
      CHECK(matches(trap, no[i]));
      CHECK_FALSE(matches(inst.gold.formula, no[i]));
      for (std::size_t s = 0; s < survivors.size(); ++s) {
        if (matches(parse(survivors[s]), no[i])) survivor_killed[s] = 1;
      }
    }
    for (char k : survivor_killed) CHECK(k == 1);
  }
}

TEST_CASE("ec instances are witness-valid with the relevance mode per world") {
  for (const char* band_name : {"core", "hard"}) {
    const BandConfig& band = find_band(Task::EC, band_name);
    GenerationResult res = generate_corpus(band, 5, 1234);
    REQUIRE(res.instances.size() == 5);
    for (const ProblemInstance& inst : res.instances) {
      REQUIRE(inst.worlds.size() == 3);
      REQUIRE(inst.diagnostics.premask_true.size() == 3);
      CHECK(inst.gold.qd == (band.name == "core" ? 1 : 2));
      CHECK_FALSE(inst.gold.lift_hard);
      for (const InstanceWorld& iw : inst.worlds) {
        CHECK(iw.world.n >= (band.name == "core" ? 6 : 7));
        CHECK(iw.world.n <= (band.name == "core" ? 8 : 9));
      }
      for (std::size_t wi = 0; wi < inst.worlds.size(); ++wi) {
        const PartialWorld& pw = inst.worlds[wi].world;
        std::vector<GroundAtom> unknowns = pw.unknown_atoms();
        // Masked predicates only; core masks R and S, hard masks R only.
        for (const GroundAtom& atom : unknowns) {
          if (band.name == "hard") {
            CHECK(atom.pred == 'R');
          } else {
            CHECK((atom.pred == 'R' || atom.pred == 'S'));
          }
        }
        // The pre-mask world is a witness.
        CompletionWitness witness(unknowns.size(), 0);
        std::set<GroundAtom> true_atoms(inst.diagnostics.premask_true[wi].begin(),
                                        inst.diagnostics.premask_true[wi].end());
        for (std::size_t i = 0; i < unknowns.size(); ++i) {
          witness[i] = true_atoms.count(unknowns[i]) ? 1 : 0;
        }
        CHECK(matches(inst.gold.formula, apply_witness(pw, witness)));
        CHECK(ec_valid_world(inst.gold.formula, pw).valid);
        // Relevance mode.
        bool m0 = matches(inst.gold.formula, pw.complete_all(false));
        bool m1 = matches(inst.gold.formula, pw.complete_all(true));
        if (band.relevance == RelevanceMode::ExtremeOr) {
          CHECK((m0 || m1));
        } else {
          CHECK_FALSE((m0 && m1));
        }
      }
    }
  }
}

TEST_CASE("generation output is a pure function of the seed") {
  const BandConfig& band = find_band(Task::EC, "core");
  GenerationResult a = generate_corpus(band, 4, 777);
  GenerationResult b = generate_corpus(band, 4, 777);
  REQUIRE(a.instances.size() == b.instances.size());
  for (std::size_t i = 0; i < a.instances.size(); ++i) {
    CHECK(serialize_instance(a.instances[i]) == serialize_instance(b.instances[i]));
  }
  GenerationResult c = generate_corpus(band, 4, 778);
  bool all_same = true;
  for (std::size_t i = 0; i < std::min(a.instances.size(), c.instances.size()); ++i) {
    all_same = all_same &&
               serialize_instance(a.instances[i]) == serialize_instance(c.instances[i]);
  }
  CHECK_FALSE(all_same);
}

TEST_CASE("fullobs/ec holdout sets carry 5 gold-labeled worlds") {
  const BandConfig& band = find_band(Task::FullObs, "simple");
  GenerationResult res = generate_corpus(band, 3, 55);
  for (const ProblemInstance& inst : res.instances) {
    HoldoutSet h = gen_holdout(inst, band, 9);
    CHECK(h.instance_id == inst.id);
    REQUIRE(h.worlds.size() == 5);
    for (const InstanceWorld& iw : h.worlds) {
      CHECK(iw.role == WorldRole::Train);
      World w = iw.full();
      CHECK(matches(inst.gold.formula, w)); // labels defined by the gold
    }
  }
}

TEST_CASE("ci holdout is 3 YES + 2 NO against the recorded survivors") {
  const BandConfig& band = find_band(Task::CI, "core");
  GenerationResult res = generate_corpus(band, 3, 56);
  for (const ProblemInstance& inst : res.instances) {
    HoldoutSet h = gen_holdout(inst, band, 10);
    int yes = 0, no = 0;
    for (const InstanceWorld& iw : h.worlds) {
      World w = iw.full();
      if (iw.role == WorldRole::Yes) {
        ++yes;
        CHECK(matches(inst.gold.formula, w));
        for (const std::string& text : inst.diagnostics.survivors_after_yes) {
          CHECK(matches(parse(text), w));
        }
      } else {
        ++no;
        CHECK_FALSE(matches(inst.gold.formula, w));
      }
    }
    CHECK(yes == 3);
    CHECK(no == 2);
  }
}

TEST_CASE("bands file roundtrip") {
  std::string doc = bands_to_json(builtin_bands());
  CHECK(doc.find("\"simple\"") != std::string::npos);
  CHECK(doc.find("extreme_or") != std::string::npos);
  // Sanity: every builtin band can be found by name.
  for (const BandConfig& b : builtin_bands()) {
    CHECK(find_band(b.task, b.name).name == b.name);
  }
  CHECK_THROWS_AS(find_band(Task::FullObs, "nope"), FormatError);
  (void)test_pool();

  // A custom bands file loads back with identical parameters.
  std::string path = "bands_roundtrip.json";
  {
    std::ofstream out(path);
    out << doc;
  }
  std::vector<BandConfig> loaded = load_bands_file(path);
  REQUIRE(loaded.size() == builtin_bands().size());
  for (std::size_t i = 0; i < loaded.size(); ++i) {
    const BandConfig& a = builtin_bands()[i];
    const BandConfig& b = loaded[i];
    CHECK(a.name == b.name);
    CHECK(a.task == b.task);
    CHECK(a.domain_lo == b.domain_lo);
    CHECK(a.domain_hi == b.domain_hi);
    CHECK(a.k == b.k);
    CHECK(a.gold_qd == b.gold_qd);
    CHECK(a.lift_fraction == doctest::Approx(b.lift_fraction));
    CHECK(a.unknown_rate == doctest::Approx(b.unknown_rate));
    CHECK(a.mask_r == b.mask_r);
    CHECK(a.mask_s == b.mask_s);
    CHECK(a.relevance == b.relevance);
  }
  CHECK_THROWS_AS(load_bands_file("does_not_exist.json"), FormatError);
}
