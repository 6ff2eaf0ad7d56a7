#include "folsynth/generate.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "folsynth/completion.hpp"
#include "folsynth/rng.hpp"

namespace folsynth {

using ordered_json = nlohmann::ordered_json;

std::string relevance_name(RelevanceMode m) {
  switch (m) {
    case RelevanceMode::None: return "none";
    case RelevanceMode::ExtremeOr: return "extreme_or";
    case RelevanceMode::MiddleAllowed: return "middle_allowed";
  }
  return "none";
}

RelevanceMode relevance_from_name(std::string_view name) {
  if (name == "none") return RelevanceMode::None;
  if (name == "extreme_or") return RelevanceMode::ExtremeOr;
  if (name == "middle_allowed") return RelevanceMode::MiddleAllowed;
  throw FormatError("unknown relevance mode '" + std::string(name) + "'");
}

SamplingParams BandConfig::sampling() const {
  SamplingParams p;
  p.domain_lo = domain_lo;
  p.domain_hi = domain_hi;
  return p;
}

const std::vector<BandConfig>& builtin_bands() {
  static const std::vector<BandConfig> bands = [] {
    std::vector<BandConfig> out;
    auto fullobs = [](std::string name, int lo, int hi, int k, int qd, double lift) {
      BandConfig b;
      b.task = Task::FullObs;
      b.name = std::move(name);
      b.domain_lo = lo;
      b.domain_hi = hi;
      b.k = k;
      b.gold_qd = qd;
      b.lift_fraction = lift;
      return b;
    };
    out.push_back(fullobs("simple", 5, 7, 4, 1, 0.0));
    out.push_back(fullobs("easy", 5, 7, 6, 2, 0.0));
    out.push_back(fullobs("medium", 7, 10, 8, 2, 0.0));
    out.push_back(fullobs("hard", 8, 12, 10, 2, 0.0));
    out.push_back(fullobs("extreme", 8, 12, 10, 2, 1.0));

    auto ci = [](std::string name, double lift) {
      BandConfig b;
      b.task = Task::CI;
      b.name = std::move(name);
      b.domain_lo = 7;
      b.domain_hi = 9;
      b.gold_qd = -1; // QD 1-2 golds allowed
      b.lift_fraction = lift;
      return b;
    };
    out.push_back(ci("core", 0.0));
    out.push_back(ci("lift_mix", 0.35));

    auto ec = [](std::string name, int lo, int hi, int qd, bool mask_s,
                 RelevanceMode mode) {
      BandConfig b;
      b.task = Task::EC;
      b.name = std::move(name);
      b.domain_lo = lo;
      b.domain_hi = hi;
      b.k = 3;
      b.gold_qd = qd;
      b.unknown_rate = 0.20;
      b.mask_r = true;
      b.mask_s = mask_s;
      b.relevance = mode;
      b.lift_fraction = 0.0;
      return b;
    };
    out.push_back(ec("core", 6, 8, 1, true, RelevanceMode::ExtremeOr));
    out.push_back(ec("hard", 7, 9, 2, false, RelevanceMode::MiddleAllowed));
    return out;
  }();
  return bands;
}

const BandConfig& find_band(Task task, std::string_view name) {
  for (const BandConfig& b : builtin_bands()) {
    if (b.task == task && b.name == name) return b;
  }
  throw FormatError("unknown band '" + std::string(name) + "' for task " + task_name(task));
}

namespace {

ordered_json band_to_json(const BandConfig& b) {
  ordered_json j;
  j["task"] = task_name(b.task);
  j["band"] = b.name;
  j["domain"] = ordered_json::array({b.domain_lo, b.domain_hi});
  if (b.task == Task::CI) {
    j["yes_worlds"] = ordered_json::array({b.yes_lo, b.yes_hi});
    j["no_worlds"] = ordered_json::array({b.no_lo, b.no_hi});
  } else {
    j["k"] = b.k;
  }
  j["gold_qd"] = b.gold_qd;
  j["lift_fraction"] = b.lift_fraction;
  if (b.task == Task::EC) {
    j["unknown_rate"] = b.unknown_rate;
    std::string preds;
    if (b.mask_r) preds += "R";
    if (b.mask_s) preds += "S";
    j["unknown_preds"] = preds;
    j["relevance"] = relevance_name(b.relevance);
  }
  j["per_gold_cap"] = b.per_gold_cap;
  j["per_subfamily_cap"] = b.per_subfamily_cap;
  j["instance_attempts"] = b.instance_attempts;
  j["world_attempts"] = b.world_attempts;
  j["no_world_attempts"] = b.no_world_attempts;
  return j;
}

BandConfig band_from_json(const ordered_json& j) {
  BandConfig b;
  b.task = task_from_name(j.at("task").get<std::string>());
  b.name = j.at("band").get<std::string>();
  b.domain_lo = j.at("domain").at(0).get<int>();
  b.domain_hi = j.at("domain").at(1).get<int>();
  if (b.task == Task::CI) {
    b.yes_lo = j.at("yes_worlds").at(0).get<int>();
    b.yes_hi = j.at("yes_worlds").at(1).get<int>();
    b.no_lo = j.at("no_worlds").at(0).get<int>();
    b.no_hi = j.at("no_worlds").at(1).get<int>();
  } else {
    b.k = j.at("k").get<int>();
  }
  b.gold_qd = j.value("gold_qd", -1);
  b.lift_fraction = j.value("lift_fraction", 0.0);
  if (b.task == Task::EC) {
    b.unknown_rate = j.at("unknown_rate").get<double>();
    std::string preds = j.at("unknown_preds").get<std::string>();
    b.mask_r = preds.find('R') != std::string::npos;
    b.mask_s = preds.find('S') != std::string::npos;
    b.relevance = relevance_from_name(j.at("relevance").get<std::string>());
  }
  b.per_gold_cap = j.value("per_gold_cap", 3);
  b.per_subfamily_cap = j.value("per_subfamily_cap", 8);
  b.instance_attempts = j.value("instance_attempts", 24);
  b.world_attempts = j.value("world_attempts", 4000);
  b.no_world_attempts = j.value("no_world_attempts", 500);
  return b;
}

} // namespace

std::vector<BandConfig> load_bands_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open bands file: " + path);
  std::vector<BandConfig> out;
  try {
    ordered_json doc = ordered_json::parse(in);
    for (const auto& j : doc.at("bands")) out.push_back(band_from_json(j));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed bands file: ") + e.what());
  }
  return out;
}

std::string bands_to_json(const std::vector<BandConfig>& bands) {
  ordered_json doc;
  ordered_json arr = ordered_json::array();
  for (const BandConfig& b : bands) arr.push_back(band_to_json(b));
  doc["bands"] = arr;
  return doc.dump(2);
}

// ---------------------------------------------------------------------------
// Gold selection

namespace {

bool mentions_pred(const Formula& f, char pred) {
  if ((f->kind == FormulaKind::UnaryAtom || f->kind == FormulaKind::BinaryAtom) &&
      f->pred == pred) {
    return true;
  }
  for (const Formula& c : f->children) {
    if (mentions_pred(c, pred)) return true;
  }
  return false;
}

} // namespace

std::vector<Template> select_golds(const BandConfig& band, const std::vector<Template>& pool,
                                   int count, std::uint64_t seed) {
  std::vector<Template> lift, nonlift;
  for (const Template& t : pool) {
    if (uses_equality(t.formula)) continue;
    if (band.gold_qd >= 0 && t.qd != band.gold_qd) continue;
    if (band.task == Task::CI && band.gold_qd < 0 && t.qd == 0) continue;
    if (band.task == Task::EC) {
      // A gold that never mentions a maskable predicate can never pass the
      // relevance filter, so it is ineligible for partial-observation bands.
      bool touches_masked = (band.mask_r && mentions_pred(t.formula, 'R')) ||
                            (band.mask_s && mentions_pred(t.formula, 'S'));
      if (!touches_masked) continue;
    }
    (t.lift_hard ? lift : nonlift).push_back(t);
  }
  int need_lift = static_cast<int>(band.lift_fraction * count + 0.5);
  int need_nonlift = count - need_lift;

  Rng rng(Rng::derive(seed, 0x5e1ec7));
  rng.shuffle(lift);
  rng.shuffle(nonlift);

  std::map<std::string, int> per_gold, per_subfamily;
  auto draw = [&](std::vector<Template>& source, int needed, std::vector<Template>& out) {
    int scan_guard = 0;
    std::size_t cursor = 0;
    while (needed > 0) {
      if (source.empty() || scan_guard > static_cast<int>(source.size())) {
        throw InsufficientPool("template pool cannot satisfy band '" + band.name +
                               "' constraints (caps too tight or pool too small)");
      }
      const Template& t = source[cursor % source.size()];
      cursor++;
      if (per_gold[t.text] >= band.per_gold_cap ||
          per_subfamily[t.subfamily] >= band.per_subfamily_cap) {
        ++scan_guard;
        continue;
      }
      scan_guard = 0;
      per_gold[t.text]++;
      per_subfamily[t.subfamily]++;
      out.push_back(t);
      --needed;
    }
  };

  std::vector<Template> chosen;
  draw(lift, need_lift, chosen);
  draw(nonlift, need_nonlift, chosen);
  rng.shuffle(chosen);
  return chosen;
}

// ---------------------------------------------------------------------------
// FullObs rejection filters

namespace {

std::vector<Formula> atomic_literals() {
  std::vector<Formula> lits;
  for (char u : {'P', 'Q'}) lits.push_back(unary_atom(u, 'x'));
  for (char b : {'R', 'S'}) lits.push_back(binary_atom(b, 'x', 'x'));
  std::vector<Formula> out = lits;
  for (const Formula& l : lits) out.push_back(negation(l));
  return out;
}

bool matches_all(const Formula& f, std::span<const World> worlds) {
  for (const World& w : worlds) {
    if (!matches(f, w)) return false;
  }
  return true;
}

} // namespace

bool filter_atomic(std::span<const World> worlds) {
  for (const Formula& lit : atomic_literals()) {
    if (matches_all(lit, worlds)) return false;
  }
  return true;
}

bool filter_subformula(const Formula& gold, std::span<const World> worlds) {
  for (const Formula& sub : proper_subformulas(gold)) {
    std::set<char> free = free_variables(sub);
    bool only_x = true;
    for (char v : free) {
      if (v != kFreeVar) only_x = false;
    }
    if (!only_x) continue;
    if (matches_all(sub, worlds)) return false;
  }
  return true;
}

bool filter_quantifier_free(std::span<const World> worlds) {
  std::vector<Formula> lits = atomic_literals();
  std::size_t n = lits.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (matches_all(lits[i], worlds)) return false;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (matches_all(conjunction({lits[i], lits[j]}), worlds)) return false;
      if (matches_all(disjunction({lits[i], lits[j]}), worlds)) return false;
      for (std::size_t k = j + 1; k < n; ++k) {
        if (matches_all(conjunction({lits[i], lits[j], lits[k]}), worlds)) return false;
        if (matches_all(disjunction({lits[i], lits[j], lits[k]}), worlds)) return false;
      }
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// FullObs generation

namespace {

// Pool hypotheses tracked during kill accounting, with the instance's gold
// excluded (it can never be killed).
std::vector<const Template*> tracked_hypotheses(const FrozenPool& pool,
                                                const std::string& gold_text) {
  std::vector<const Template*> out;
  for (const Template* t : pool.all()) {
    if (t->text != gold_text) out.push_back(t);
  }
  return out;
}

} // namespace

ProblemInstance gen_fullobs(const Template& gold, const BandConfig& band,
                            const FrozenPool& pool, std::uint64_t seed,
                            const std::string& id) {
  SamplingParams params = band.sampling();
  std::map<std::string, int> failures;
  std::vector<const Template*> hypotheses = tracked_hypotheses(pool, gold.text);

  // Kill-seeking budget per world. Once the survivor set is empty or
  // contains only hypotheses extensionally indistinguishable from the gold,
  // no world can kill anything; after this many fruitless samples the world
  // is accepted with a recorded kill count of zero.
  constexpr int kKillAttempts = 400;

  // A gold whose target is constant on sampled worlds can never pass the
  // atomic filter ((R x x) is constantly false under self-loop-free
  // sampling, so a constant literal always explains a constant target).
  {
    Rng probe_rng(Rng::derive(seed, 0xdeadf));
    bool all_constant = true;
    for (int probe = 0; probe < 3 && all_constant; ++probe) {
      World w = sample_world(params, gold.formula, probe_rng.next_u64());
      bool any_true = false, any_false = false;
      for (int a = 0; a < w.n; ++a) {
        (w.target[a] ? any_true : any_false) = true;
      }
      if (any_true && any_false) all_constant = false;
    }
    if (all_constant) {
      throw GenerationExhausted("gold '" + gold.text + "' has a constant target",
                                {{"degenerate_gold", 1}});
    }
  }

  for (int attempt = 0; attempt < band.instance_attempts; ++attempt) {
    Rng rng(Rng::derive(seed, attempt));
    std::vector<World> worlds;
    std::vector<int> kill_counts;
    std::vector<int> survivor_history;
    std::vector<char> alive(hypotheses.size(), 1);

    for (int wi = 0; wi < band.k; ++wi) {
      World accepted_world;
      int accepted_kills = -1;
      for (int t = 0; t < kKillAttempts; ++t) {
        World w = sample_world(params, gold.formula, rng.next_u64());
        int kills = 0;
        for (std::size_t h = 0; h < hypotheses.size(); ++h) {
          if (alive[h] && !matches(hypotheses[h]->formula, w)) ++kills;
        }
        if (kills >= 1) {
          accepted_world = std::move(w);
          accepted_kills = kills;
          break;
        }
        if (t + 1 == kKillAttempts) {
          accepted_world = std::move(w);
          accepted_kills = 0;
        }
      }
      for (std::size_t h = 0; h < hypotheses.size(); ++h) {
        if (alive[h] && !matches(hypotheses[h]->formula, accepted_world)) alive[h] = 0;
      }
      worlds.push_back(std::move(accepted_world));
      kill_counts.push_back(accepted_kills);
      int survivors = 0;
      for (char a : alive) survivors += a;
      survivor_history.push_back(survivors);
    }

    if (!filter_atomic(worlds)) {
      failures["atomic"]++;
      continue;
    }
    if (!filter_subformula(gold.formula, worlds)) {
      failures["subformula"]++;
      continue;
    }
    if (!filter_quantifier_free(worlds)) {
      failures["quantifier_free"]++;
      continue;
    }

    ProblemInstance inst;
    inst.task = Task::FullObs;
    inst.band = band.name;
    inst.id = id;
    inst.seed = seed;
    inst.gold = gold;
    for (const World& w : worlds) {
      inst.worlds.push_back(InstanceWorld::from_world(WorldRole::Train, w));
    }
    inst.diagnostics.kill_counts = kill_counts;
    inst.diagnostics.survivor_history = survivor_history;
    inst.diagnostics.attempts = attempt + 1;
    return inst;
  }
  std::ostringstream msg;
  msg << "fullobs generation exhausted for gold " << gold.text << " in band " << band.name;
  throw GenerationExhausted(msg.str(), failures);
}

// ---------------------------------------------------------------------------
// CI generation

namespace {

struct Trap {
  Formula formula;
  std::string text;
  bool near_miss = false; // mutants of the gold, as opposed to tier-1 shortcuts
};

std::vector<Trap> build_trap_pool(const Template& gold, const FrozenPool& pool,
                                  std::uint64_t seed) {
  std::vector<Trap> traps;
  std::set<std::string> seen{gold.text};
  for (const Template& t : pool.tier1) {
    if (t.qd <= 1 && t.ast <= 10 && seen.insert(t.text).second) {
      traps.push_back({t.formula, t.text, false});
    }
  }
  for (const Formula& m : mutate(gold.formula, seed)) {
    std::string text = print(m);
    if (seen.insert(text).second) {
      traps.push_back({m, text, true});
    }
  }
  return traps;
}

} // namespace

ProblemInstance gen_ci(const Template& gold, const BandConfig& band, const FrozenPool& pool,
                       std::uint64_t seed, const std::string& id) {
  SamplingParams params = band.sampling();
  std::map<std::string, int> failures;
  std::vector<Trap> traps = build_trap_pool(gold, pool, Rng::derive(seed, 0x7a9));

  std::vector<std::size_t> near_indices;
  for (std::size_t i = 0; i < traps.size(); ++i) {
    if (traps[i].near_miss) near_indices.push_back(i);
  }
  if (near_indices.empty()) {
    throw GenerationExhausted("gold '" + gold.text + "' admits no near-miss traps",
                              {{"no_near_miss", 1}});
  }

  for (int attempt = 0; attempt < band.instance_attempts; ++attempt) {
    Rng rng(Rng::derive(seed, attempt));
    int n_yes = rng.range(band.yes_lo, band.yes_hi);
    int n_no = rng.range(band.no_lo, band.no_hi);

    // Probe sampling: a shared batch of gold-labeled worlds estimates trap
    // survival; the most survivable near-miss traps get protected during
    // YES construction.
    constexpr int kProbes = 48;
    std::vector<World> probe_worlds;
    probe_worlds.reserve(kProbes);
    for (int probe = 0; probe < kProbes; ++probe) {
      probe_worlds.push_back(sample_world(params, gold.formula, rng.next_u64()));
    }
    std::vector<std::uint64_t> near_mask(near_indices.size(), 0);
    for (int p = 0; p < kProbes; ++p) {
      for (std::size_t ni = 0; ni < near_indices.size(); ++ni) {
        if (matches(traps[near_indices[ni]].formula, probe_worlds[p])) {
          near_mask[ni] |= 1ULL << p;
        }
      }
    }
    auto count = [](std::uint64_t m) { return __builtin_popcountll(m); };
    std::size_t best_single = near_indices.size();
    for (std::size_t ni = 0; ni < near_indices.size(); ++ni) {
      if (best_single == near_indices.size() ||
          count(near_mask[ni]) > count(near_mask[best_single])) {
        best_single = ni;
      }
    }
    if (count(near_mask[best_single]) == 0) {
      failures["no_survivable_near_miss"]++;
      continue;
    }
    // Protect the near-miss pair with the best JOINT survival over the
    // probes (YES-world resampling cost is 1/p of the joint rate); the band
    // needs 1-2 near-miss and >= 2 total survivors. When no pair ever
    // co-survives, protect the best single near-miss and co-protect the
    // most survivable shortcut so the total bound stays reachable.
    // Shortcuts matching every probe are suspected extensionally equal to
    // the gold (a NO world could never be built for them) and are skipped.
    std::vector<std::size_t> protected_traps; // indices into traps
    {
      std::size_t pair_a = near_indices.size(), pair_b = near_indices.size();
      int best_joint = 0;
      for (std::size_t a = 0; a < near_indices.size(); ++a) {
        for (std::size_t b = a + 1; b < near_indices.size(); ++b) {
          int joint = count(near_mask[a] & near_mask[b]);
          if (joint > best_joint) {
            best_joint = joint;
            pair_a = a;
            pair_b = b;
          }
        }
      }
      if (best_joint > 0) {
        protected_traps.push_back(near_indices[pair_a]);
        protected_traps.push_back(near_indices[pair_b]);
      } else {
        protected_traps.push_back(near_indices[best_single]);
        constexpr int kShortcutProbes = 16;
        std::size_t best_shortcut = traps.size();
        int best_count = 0;
        for (std::size_t h = 0; h < traps.size(); ++h) {
          if (traps[h].near_miss) continue;
          int c = 0;
          for (int p = 0; p < kShortcutProbes; ++p) {
            if (matches(traps[h].formula, probe_worlds[p])) ++c;
          }
          if (c > best_count && c < kShortcutProbes) {
            best_count = c;
            best_shortcut = h;
          }
        }
        if (best_shortcut < traps.size()) protected_traps.push_back(best_shortcut);
      }
    }

    // YES phase: accept a world only if every protected trap still matches
    // it; the final world additionally has to land the survivor band. The
    // whole trap pool is tracked for diagnostics and the band check.
    std::vector<World> yes_worlds;
    std::vector<char> alive(traps.size(), 1);
    std::vector<int> survivor_history;
    std::string phase_failure;
    auto band_counts = [&](const std::vector<char>& state) {
      int near = 0, total = 0;
      for (std::size_t h = 0; h < state.size(); ++h) {
        if (state[h]) {
          ++total;
          if (traps[h].near_miss) ++near;
        }
      }
      return std::pair<int, int>(near, total);
    };
    for (int wi = 0; wi < n_yes && phase_failure.empty(); ++wi) {
      bool is_last = wi + 1 == n_yes;
      // Landing the band on the final world is best retried from a fresh
      // attempt when it does not happen quickly.
      int budget = is_last ? std::min(band.world_attempts, 800) : band.world_attempts;
      bool accepted = false;
      for (int t = 0; t < budget; ++t) {
        World w = sample_world(params, gold.formula, rng.next_u64());
        bool keeps_protected = true;
        for (std::size_t pi : protected_traps) {
          if (!matches(traps[pi].formula, w)) {
            keeps_protected = false;
            break;
          }
        }
        if (!keeps_protected) continue;
        std::vector<char> next_alive = alive;
        for (std::size_t h = 0; h < traps.size(); ++h) {
          if (next_alive[h] && !matches(traps[h].formula, w)) next_alive[h] = 0;
        }
        auto [near, total] = band_counts(next_alive);
        // Once the survivor count dips below the band it can never recover.
        if (near < 1 || total < 2) continue;
        if (is_last && (near > 2 || total > 4)) continue;
        alive = std::move(next_alive);
        yes_worlds.push_back(std::move(w));
        accepted = true;
        break;
      }
      if (!accepted) {
        phase_failure = is_last ? "survivor_band" : "yes_world";
      } else {
        auto [near, total] = band_counts(alive);
        (void)near;
        survivor_history.push_back(total);
      }
    }
    if (!phase_failure.empty()) {
      failures[phase_failure]++;
      continue;
    }

    std::vector<std::size_t> survivors;
    int near_survivors = 0;
    for (std::size_t h = 0; h < traps.size(); ++h) {
      if (alive[h]) {
        survivors.push_back(h);
        if (traps[h].near_miss) ++near_survivors;
      }
    }
    int total = static_cast<int>(survivors.size());
    if (near_survivors < 1 || near_survivors > 2 || total < 2 || total > 4) {
      failures["survivor_band"]++;
      continue;
    }

    // NO phase: each NO world is labeled by a surviving trap's extension and
    // must mismatch the gold; collectively the NO worlds must kill every
    // survivor.
    std::vector<World> no_worlds;
    std::vector<std::string> no_trap_texts;
    std::vector<char> killed(survivors.size(), 0);
    bool no_failed = false;
    for (int wi = 0; wi < n_no && !no_failed; ++wi) {
      std::size_t target_slot = wi % survivors.size();
      // Prefer a not-yet-killed survivor when one remains.
      for (std::size_t off = 0; off < survivors.size(); ++off) {
        std::size_t cand = (wi + off) % survivors.size();
        if (!killed[cand]) {
          target_slot = cand;
          break;
        }
      }
      const Trap& trap = traps[survivors[target_slot]];
      bool built = false;
      for (int t = 0; t < band.no_world_attempts; ++t) {
        World w = sample_world_structure(params, rng.next_u64());
        Extension trap_ext = extension(trap.formula, w);
        Extension gold_ext = extension(gold.formula, w);
        if (trap_ext == gold_ext) continue; // gold must fail to match
        w.target = trap_ext;
        for (std::size_t si = 0; si < survivors.size(); ++si) {
          if (matches(traps[survivors[si]].formula, w)) killed[si] = 1;
        }
        no_worlds.push_back(std::move(w));
        no_trap_texts.push_back(trap.text);
        built = true;
        break;
      }
      if (!built) no_failed = true;
    }
    if (no_failed) {
      failures["no_world"]++;
      continue;
    }
    if (std::find(killed.begin(), killed.end(), 0) != killed.end()) {
      failures["survivor_not_killed"]++;
      continue;
    }

    ProblemInstance inst;
    inst.task = Task::CI;
    inst.band = band.name;
    inst.id = id;
    inst.seed = seed;
    inst.gold = gold;
    for (const World& w : yes_worlds) {
      inst.worlds.push_back(InstanceWorld::from_world(WorldRole::Yes, w));
    }
    for (const World& w : no_worlds) {
      inst.worlds.push_back(InstanceWorld::from_world(WorldRole::No, w));
    }
    inst.diagnostics.survivor_history = survivor_history;
    for (std::size_t h : survivors) {
      inst.diagnostics.survivors_after_yes.push_back(traps[h].text);
    }
    inst.diagnostics.no_world_trap = no_trap_texts;
    inst.diagnostics.attempts = attempt + 1;
    return inst;
  }
  std::ostringstream msg;
  msg << "ci generation exhausted for gold " << gold.text << " in band " << band.name;
  throw GenerationExhausted(msg.str(), failures);
}

// ---------------------------------------------------------------------------
// EC generation

namespace {

bool relevance_check(const Formula& gold, const PartialWorld& pw, RelevanceMode mode) {
  bool m0 = matches(gold, pw.complete_all(false));
  bool m1 = matches(gold, pw.complete_all(true));
  switch (mode) {
    case RelevanceMode::ExtremeOr: return m0 || m1;
    case RelevanceMode::MiddleAllowed: return !(m0 && m1);
    case RelevanceMode::None: return true;
  }
  return true;
}

} // namespace

ProblemInstance gen_ec(const Template& gold, const BandConfig& band, std::uint64_t seed,
                       const std::string& id) {
  SamplingParams params = band.sampling();
  std::map<std::string, int> failures;

  for (int attempt = 0; attempt < band.instance_attempts; ++attempt) {
    Rng rng(Rng::derive(seed, attempt));
    std::vector<PartialWorld> worlds;
    std::vector<std::vector<GroundAtom>> premask;
    bool failed = false;

    for (int wi = 0; wi < band.k; ++wi) {
      bool accepted = false;
      for (int t = 0; t < band.world_attempts; ++t) {
        World w = sample_world(params, gold.formula, rng.next_u64());
        PartialWorld pw =
            mask_unknowns(w, band.unknown_rate, band.mask_r, band.mask_s, rng.next_u64());
        if (!relevance_check(gold.formula, pw, band.relevance)) continue;
        std::vector<GroundAtom> true_unknowns;
        for (const GroundAtom& atom : pw.unknown_atoms()) {
          bool truth = atom.b < 0 ? w.unary(atom.pred, atom.a)
                                  : w.binary(atom.pred, atom.a, atom.b);
          if (truth) true_unknowns.push_back(atom);
        }
        worlds.push_back(std::move(pw));
        premask.push_back(std::move(true_unknowns));
        accepted = true;
        break;
      }
      if (!accepted) {
        failed = true;
        break;
      }
    }
    if (failed) {
      failures["relevance"]++;
      continue;
    }

    ProblemInstance inst;
    inst.task = Task::EC;
    inst.band = band.name;
    inst.id = id;
    inst.seed = seed;
    inst.gold = gold;
    for (PartialWorld& pw : worlds) {
      inst.worlds.push_back({WorldRole::Train, std::move(pw)});
    }
    inst.diagnostics.premask_true = premask;
    inst.diagnostics.attempts = attempt + 1;
    return inst;
  }
  std::ostringstream msg;
  msg << "ec generation exhausted for gold " << gold.text << " in band " << band.name;
  throw GenerationExhausted(msg.str(), failures);
}

// ---------------------------------------------------------------------------
// Holdout generation

HoldoutSet gen_holdout(const ProblemInstance& instance, std::uint64_t seed) {
  return gen_holdout(instance, find_band(instance.task, instance.band), seed);
}

HoldoutSet gen_holdout(const ProblemInstance& instance, const BandConfig& band,
                       std::uint64_t seed) {
  SamplingParams params = band.sampling();
  HoldoutSet h;
  h.instance_id = instance.id;
  Rng rng(Rng::derive(seed, stable_hash(instance.id)));

  if (instance.task == Task::FullObs || instance.task == Task::EC) {
    constexpr int kHoldoutWorlds = 5;
    for (int i = 0; i < kHoldoutWorlds; ++i) {
      World w = sample_world(params, instance.gold.formula, rng.next_u64());
      h.worlds.push_back(InstanceWorld::from_world(WorldRole::Train, w));
    }
    return h;
  }

  // CI: 3 YES + 2 NO against the recorded trap survivors.
  std::vector<Formula> survivors;
  for (const std::string& text : instance.diagnostics.survivors_after_yes) {
    survivors.push_back(parse(text));
  }
  constexpr int kYes = 3, kNo = 2;
  std::map<std::string, int> failures;
  for (int i = 0; i < kYes; ++i) {
    bool accepted = false;
    for (int t = 0; t < band.world_attempts; ++t) {
      World w = sample_world(params, instance.gold.formula, rng.next_u64());
      bool all_match = true;
      for (const Formula& trap : survivors) {
        if (!matches(trap, w)) {
          all_match = false;
          break;
        }
      }
      if (!all_match) continue;
      h.worlds.push_back(InstanceWorld::from_world(WorldRole::Yes, w));
      accepted = true;
      break;
    }
    if (!accepted) {
      failures["holdout_yes"]++;
      throw GenerationExhausted("ci holdout YES world exhausted for " + instance.id,
                                failures);
    }
  }
  for (int i = 0; i < kNo; ++i) {
    const Formula& trap = survivors[i % survivors.size()];
    bool accepted = false;
    for (int t = 0; t < band.no_world_attempts; ++t) {
      World w = sample_world_structure(params, rng.next_u64());
      Extension trap_ext = extension(trap, w);
      if (trap_ext == extension(instance.gold.formula, w)) continue;
      w.target = trap_ext;
      h.worlds.push_back(InstanceWorld::from_world(WorldRole::No, w));
      accepted = true;
      break;
    }
    if (!accepted) {
      failures["holdout_no"]++;
      throw GenerationExhausted("ci holdout NO world exhausted for " + instance.id,
                                failures);
    }
  }
  return h;
}

// ---------------------------------------------------------------------------
// Corpus driver

namespace {

std::string instance_id_for(Task task, const std::string& band, int index) {
  char buf[32];
  switch (task) {
    case Task::FullObs:
      std::snprintf(buf, sizeof(buf), "%s_%03d", band.c_str(), index);
      return buf;
    case Task::CI:
      std::snprintf(buf, sizeof(buf), "C_%s_%03d", band.c_str(), index);
      return buf;
    case Task::EC:
      std::snprintf(buf, sizeof(buf), "E_%s_%04d", band.c_str(), index);
      return buf;
  }
  return band + "_" + std::to_string(index);
}

} // namespace

GenerationResult generate_corpus(const BandConfig& band, int count, std::uint64_t seed) {
  GenerationResult result;
  std::vector<Template> golds = select_golds(band, builtin_templates(), count, seed);
  std::vector<Template> distinct;
  {
    std::set<std::string> seen;
    for (const Template& g : golds) {
      if (seen.insert(g.text).second) distinct.push_back(g);
    }
  }
  FrozenPool pool = build_frozen_pool(distinct, Rng::derive(seed, 0xf00d));

  // Replacement golds for draws that exhaust their retry budget (some golds
  // cannot instantiate at all, e.g. concepts that are constant under the
  // band's sampler; the failure histogram keeps that visible). Replacements
  // preserve the failed draw's lift class so the band's mix stays exact.
  BandConfig reserve_band = band;
  reserve_band.per_gold_cap = 1;
  std::vector<Template> lift_reserve, nonlift_reserve;
  {
    BandConfig lifted = reserve_band;
    lifted.lift_fraction = 1.0;
    BandConfig unlifted = reserve_band;
    unlifted.lift_fraction = 0.0;
    auto fill = [&](BandConfig cfg, std::vector<Template>& out) {
      for (int want = 16; want >= 1 && out.empty(); want /= 2) {
        try {
          out = select_golds(cfg, builtin_templates(), want, Rng::derive(seed, 0xa1f));
        } catch (const InsufficientPool&) {
        }
      }
    };
    if (band.lift_fraction > 0.0) fill(lifted, lift_reserve);
    if (band.lift_fraction < 1.0) fill(unlifted, nonlift_reserve);
  }
  std::size_t lift_cursor = 0, nonlift_cursor = 0;

  for (int i = 0; i < count; ++i) {
    std::uint64_t inst_seed = Rng::derive(seed, static_cast<std::uint64_t>(i) + 1);
    std::string id = instance_id_for(band.task, band.name, i);
    const Template* gold = &golds[i];
    bool produced = false;
    for (int redraw = 0; redraw < 18 && !produced; ++redraw) {
      try {
        switch (band.task) {
          case Task::FullObs:
            result.instances.push_back(gen_fullobs(*gold, band, pool, inst_seed, id));
            break;
          case Task::CI:
            result.instances.push_back(gen_ci(*gold, band, pool, inst_seed, id));
            break;
          case Task::EC:
            result.instances.push_back(gen_ec(*gold, band, inst_seed, id));
            break;
        }
        produced = true;
      } catch (const GenerationExhausted& e) {
        for (const auto& [key, n] : e.failure_counts) {
          result.failure_counts[key] += n;
        }
        result.failure_counts["gold_redraws"]++;
        std::vector<Template>& reserve =
            gold->lift_hard && !lift_reserve.empty() ? lift_reserve : nonlift_reserve;
        std::size_t& cursor =
            gold->lift_hard && !lift_reserve.empty() ? lift_cursor : nonlift_cursor;
        if (reserve.empty()) break;
        gold = &reserve[cursor % reserve.size()];
        ++cursor;
        inst_seed = Rng::derive(inst_seed, 0xdead);
      }
    }
    if (!produced) result.failure_counts["instances_abandoned"]++;
  }
  return result;
}

} // namespace folsynth
