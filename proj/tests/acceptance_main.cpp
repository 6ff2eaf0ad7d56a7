// Acceptance suite: every release-gating property, one PASS/FAIL line each.
// Exit status is nonzero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <set>
#include <vector>

#include "folsynth/completion.hpp"
#include "folsynth/evaluate.hpp"
#include "folsynth/generate.hpp"
#include "folsynth/harness.hpp"
#include "folsynth/semantics.hpp"
#include "support/brute_force.hpp"
#include "support/random_formula.hpp"

using namespace folsynth;

namespace {

int failures = 0;

void report(int criterion, const std::string& name, bool ok, const std::string& detail) {
  std::printf("%s criterion %d: %s%s%s\n", ok ? "PASS" : "FAIL", criterion, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

// 1. ast_size must reproduce the five anchor values exactly.
void criterion_ast_convention() {
  struct Anchor {
    const char* text;
    int expected;
  };
  const Anchor anchors[] = {
      {"(and (and (not (P x)) (not (Q x))) (exists y (and (R x y) (and (P y) (not (Q "
       "y))))))",
       20},
      {"(and (not (or (P x) (Q x))) (exists y (S x y)))", 12},
      {"(and (not (P x)) (exists y (and (R x y) (and (P y) (not (Q y))))))", 16},
      {"(and (not (P x)) (exists y (R x y)))", 9},
      {"(forall y (or (not (S x y)) (exists z (and (R y z) (Q z)))))", 15},
  };
  bool ok = true;
  std::string detail;
  for (const Anchor& a : anchors) {
    int got = ast_size(parse(a.text));
    if (got != a.expected) {
      ok = false;
      detail += std::string(a.text) + " gave " + std::to_string(got) + " expected " +
                std::to_string(a.expected) + "; ";
    }
  }
  report(1, "AST-convention fidelity (20/12/16/9/15)", ok, detail);
}

// 2. Evaluator agrees with the independent brute-force oracle.
void criterion_semantics_oracle() {
  Rng rng(0xace1);
  int agreements = 0, total = 0;
  for (int i = 0; i < 1000; ++i) {
    Formula f = testgen::random_formula(rng, 2);
    int n = 1 + static_cast<int>(rng.below(4));
    World w = testgen::random_world(rng, n);
    bool pair_ok = true;
    for (int a = 0; a < n; ++a) {
      if (evaluate(f, w, a) != oracle::brute_evaluate(f, w, a)) pair_ok = false;
    }
    agreements += pair_ok ? 1 : 0;
    ++total;
  }
  report(2, "semantics oracle equivalence (1000 random pairs)", agreements == total,
         std::to_string(agreements) + "/" + std::to_string(total) + " exact");
}

// 3. SAT-based completion agrees with exhaustive enumeration; witnesses
//    re-verify through the exact model checker.
void criterion_completion_oracle() {
  Rng rng(0xace2);
  int done = 0, exact = 0;
  bool witnesses_ok = true;
  while (done < 200) {
    int n = 2 + static_cast<int>(rng.below(4));
    PartialWorld pw = testgen::random_partial_world(rng, n, 16);
    Formula f = testgen::random_formula(rng, 2);
    EcVerdict verdict = ec_valid_world(f, pw);
    int mm = min_mismatch(f, pw);
    bool pair_ok = verdict.valid == oracle::brute_ec_valid(f, pw) &&
                   mm == oracle::brute_min_mismatch(f, pw) && (mm == 0) == verdict.valid;
    if (verdict.valid) {
      if (!verdict.witness || !matches(f, apply_witness(pw, *verdict.witness))) {
        witnesses_ok = false;
      }
    }
    exact += pair_ok ? 1 : 0;
    ++done;
  }
  report(3, "completion oracle equivalence (200 partial worlds, |unknowns| <= 16)",
         exact == done && witnesses_ok,
         std::to_string(exact) + "/" + std::to_string(done) + " exact, witnesses " +
             (witnesses_ok ? "sound" : "UNSOUND"));
}

// 4. Generator invariants at desk scale: 20 instances per band per task.
void criterion_generator_invariants() {
  bool ok = true;
  std::string detail;
  int produced = 0;
  auto note = [&](const std::string& msg) {
    ok = false;
    if (detail.size() < 300) detail += msg + "; ";
  };
  for (const BandConfig& band : builtin_bands()) {
    GenerationResult res = generate_corpus(band, 20, 0xbead);
    if (static_cast<int>(res.instances.size()) != 20) {
      note(task_name(band.task) + "/" + band.name + " produced " +
           std::to_string(res.instances.size()) + "/20");
    }
    for (const ProblemInstance& inst : res.instances) {
      ++produced;
      switch (inst.task) {
        case Task::FullObs: {
          std::vector<World> worlds = inst.full_train_worlds();
          if (!solves_fullobs(inst.gold.formula, worlds)) note(inst.id + " gold invalid");
          if (!filter_atomic(worlds) || !filter_subformula(inst.gold.formula, worlds) ||
              !filter_quantifier_free(worlds)) {
            note(inst.id + " filters fail");
          }
          break;
        }
        case Task::CI: {
          std::vector<World> yes = inst.full_worlds(WorldRole::Yes);
          std::vector<World> no = inst.full_worlds(WorldRole::No);
          if (!solves_ci(inst.gold.formula, yes, no)) note(inst.id + " gold invalid");
          int total = static_cast<int>(inst.diagnostics.survivors_after_yes.size());
          if (total < 2 || total > 4) note(inst.id + " survivor band violated");
          for (const std::string& text : inst.diagnostics.survivors_after_yes) {
            Formula trap = parse(text);
            for (const World& w : yes) {
              if (!matches(trap, w)) note(inst.id + " survivor dies on a YES world");
            }
          }
          if (inst.diagnostics.no_world_trap.size() != no.size()) {
            note(inst.id + " missing NO-world trap records");
          } else {
            for (std::size_t i = 0; i < no.size(); ++i) {
              if (!matches(parse(inst.diagnostics.no_world_trap[i]), no[i])) {
                note(inst.id + " NO world not matched by its recorded trap");
              }
            }
          }
          break;
        }
        case Task::EC: {
          for (const InstanceWorld& iw : inst.worlds) {
            const PartialWorld& pw = iw.world;
            if (!ec_valid_world(inst.gold.formula, pw).valid) {
              note(inst.id + " gold not EC-valid");
            }
            bool m0 = matches(inst.gold.formula, pw.complete_all(false));
            bool m1 = matches(inst.gold.formula, pw.complete_all(true));
            bool rel = band.relevance == RelevanceMode::MiddleAllowed ? !(m0 && m1)
                                                                      : (m0 || m1);
            if (inst.band == "hard") rel = !(m0 && m1);
            if (inst.band == "core") rel = m0 || m1;
            if (!rel) note(inst.id + " relevance mode violated");
          }
          break;
        }
      }
    }
  }
  report(4, "generator invariants at desk scale (20 per band, all tasks)", ok,
         std::to_string(produced) + " instances checked" +
             (detail.empty() ? "" : "; " + detail));
}

// 5. Byte-identical regeneration for identical flags.
void criterion_determinism() {
  bool ok = true;
  for (const BandConfig& band : builtin_bands()) {
    GenerationResult a = generate_corpus(band, 5, 0x5eed);
    GenerationResult b = generate_corpus(band, 5, 0x5eed);
    if (a.instances.size() != b.instances.size()) {
      ok = false;
      continue;
    }
    for (std::size_t i = 0; i < a.instances.size(); ++i) {
      if (serialize_instance(a.instances[i]) != serialize_instance(b.instances[i])) {
        ok = false;
      }
    }
  }
  report(5, "determinism: identical flags give byte-identical instances", ok, "");
}

// 6. Budget-curve shape properties on randomized record sets.
void criterion_budget_curves() {
  Rng rng(0xace6);
  bool ok = true;
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<EvalRecord> records;
    int n = 1 + static_cast<int>(rng.below(40));
    for (int i = 0; i < n; ++i) {
      EvalRecord r;
      r.instance_id = "i" + std::to_string(i);
      r.model = "m";
      r.task = Task::FullObs;
      r.band = "simple";
      r.family = "oth";
      r.status = rng.bernoulli(0.9) ? PredStatus::Ok : PredStatus::Missing;
      r.ast_gold = 10;
      if (r.status == PredStatus::Ok) {
        r.valid = rng.bernoulli(0.6);
        r.ast_pred = 5 + static_cast<int>(rng.below(150));
        r.delta = r.ast_pred - r.ast_gold;
      }
      records.push_back(r);
    }
    Report rep = aggregate(records);
    const GroupStats& g = rep.overall.at("m");
    for (int d = 1; d <= 100; ++d) {
      if (g.curve.acc_at[d] + 1e-12 < g.curve.acc_at[d - 1]) ok = false;
    }
    if (std::abs(g.bloat_rate + g.curve.acc_at[25] - g.acc_all) > 1e-12) ok = false;
  }
  report(6, "budget curve monotone; bloat + acc@25 == validity", ok, "");
}

// 7. End-to-end baseline run on a 30-instance simple-band corpus.
void criterion_baseline_run() {
  const BandConfig& band = find_band(Task::FullObs, "simple");
  GenerationResult res = generate_corpus(band, 30, 0xace7);
  std::vector<Template> golds;
  std::set<std::string> seen;
  for (const ProblemInstance& inst : res.instances) {
    if (seen.insert(inst.gold.text).second) golds.push_back(inst.gold);
  }
  FrozenPool pool = build_frozen_pool(golds, 0xba5e);
  std::vector<Template> candidates = baseline_candidates(pool);
  int valid = 0, at0 = 0;
  std::vector<EvalRecord> records;
  for (const ProblemInstance& inst : res.instances) {
    Prediction p = baseline_solve(inst, candidates);
    p.model = "baseline";
    EvalRecord rec = evaluate_prediction(inst, p);
    records.push_back(rec);
    if (rec.valid) {
      ++valid;
      if (rec.delta <= 0) ++at0;
    }
  }
  int total = static_cast<int>(res.instances.size());
  double validity = total ? static_cast<double>(valid) / total : 0.0;
  double acc0 = total ? static_cast<double>(at0) / total : 0.0;
  bool ok = total == 30 && validity >= 0.95 && acc0 >= 0.90;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "n=%d validity=%.1f%% acc@0=%.1f%%", total,
                validity * 100, acc0 * 100);
  report(7, "baseline end-to-end (validity >= 95%, acc@0 >= 90%)", ok, buf);
}

// 8. Holdout: gold perfect on FullObs/EC; CI traps separable.
void criterion_holdout() {
  bool gold_perfect = true;
  for (const char* spec : {"fullobs", "ec"}) {
    Task task = task_from_name(spec);
    const BandConfig& band = find_band(task, task == Task::EC ? "core" : "simple");
    GenerationResult res = generate_corpus(band, 10, 0xace8);
    for (const ProblemInstance& inst : res.instances) {
      HoldoutSet h = gen_holdout(inst, band, 0x801d);
      if (h.worlds.size() != 5) gold_perfect = false;
      HoldoutOutcome out = holdout_generalization(inst, inst.gold.formula, h.worlds);
      if (out.rate < 1.0) gold_perfect = false;
    }
  }
  const BandConfig& ci_band = find_band(Task::CI, "core");
  GenerationResult ci = generate_corpus(ci_band, 10, 0xace9);
  int separable = 0;
  for (const ProblemInstance& inst : ci.instances) {
    HoldoutSet h = gen_holdout(inst, ci_band, 0x801e);
    bool some_trap_fails = false;
    for (const std::string& text : inst.diagnostics.survivors_after_yes) {
      HoldoutOutcome out = holdout_generalization(inst, parse(text), h.worlds);
      int sum = 0;
      for (auto v : out.per_world) sum += v;
      if (sum < static_cast<int>(out.per_world.size())) some_trap_fails = true;
    }
    separable += some_trap_fails ? 1 : 0;
  }
  double frac = ci.instances.empty()
                    ? 0.0
                    : static_cast<double>(separable) / ci.instances.size();
  bool ok = gold_perfect && frac >= 0.80;
  char buf[128];
  std::snprintf(buf, sizeof(buf), "gold holdout %s; CI trap separability %.0f%%",
                gold_perfect ? "1.0 everywhere" : "IMPERFECT", frac * 100);
  report(8, "holdout: gold 1.0 on FullObs/EC; CI traps separable >= 80%", ok, buf);
}

// 9. Paper-number reproduction is out of scope; the statistical machinery is
//    validated on constructed fixtures instead (here: the label-shuffled
//    null fixture for the within-problem bootstrap).
void criterion_fixture_machinery() {
  Rng rng(0xacea);
  std::vector<EvalRecord> records;
  for (int i = 0; i < 200; ++i) {
    for (const char* model : {"m1", "m2"}) {
      EvalRecord r;
      r.instance_id = "i" + std::to_string(i);
      r.model = model;
      r.task = Task::FullObs;
      r.band = "simple";
      r.family = "oth";
      r.status = PredStatus::Ok;
      r.valid = true;
      r.ast_gold = 10;
      r.ast_pred = 12 + static_cast<int>(rng.below(20));
      r.delta = r.ast_pred - r.ast_gold;
      HoldoutOutcome h;
      h.rate = rng.unit();
      r.holdout = h;
      records.push_back(r);
    }
  }
  WithinProblemStats stats = within_problem_analysis(records, 0xb00);
  double gap = std::abs(stats.short_vs_long.frac_positive - stats.short_vs_long.frac_negative);
  bool ok = stats.short_vs_long.n == 200 && gap <= 0.10;
  char buf[160];
  std::snprintf(buf, sizeof(buf),
                "null fixture: frac+=%.2f frac-=%.2f (gap %.2f <= 0.10); "
                "bootstrap seed recorded=%llu",
                stats.short_vs_long.frac_positive, stats.short_vs_long.frac_negative, gap,
                static_cast<unsigned long long>(stats.bootstrap_seed));
  report(9, "fixture-validated statistics (paper numbers out of scope)", ok, buf);
}

} // namespace

int main() {
  auto t0 = std::chrono::steady_clock::now();
  criterion_ast_convention();
  criterion_semantics_oracle();
  criterion_completion_oracle();
  criterion_generator_invariants();
  criterion_determinism();
  criterion_budget_curves();
  criterion_baseline_run();
  criterion_holdout();
  criterion_fixture_machinery();
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d/9 criteria passed in %.1fs\n", 9 - failures, secs);
  return failures == 0 ? 0 : 1;
}
