#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "folsynth/instance.hpp"
#include "folsynth/pool.hpp"
#include "folsynth/semantics.hpp"

namespace folsynth {

enum class RelevanceMode { None, ExtremeOr, MiddleAllowed };
std::string relevance_name(RelevanceMode m);
RelevanceMode relevance_from_name(std::string_view name);

// Difficulty-band parameters. Defaults mirror the v1 bands; a bands file can
// override them (see band_from_json).
struct BandConfig {
  Task task = Task::FullObs;
  std::string name;
  int domain_lo = 5;
  int domain_hi = 7;
  int k = 4;              // worlds per instance (fullobs / ec)
  int yes_lo = 7, yes_hi = 8;
  int no_lo = 2, no_hi = 3;
  int gold_qd = 1;        // required gold quantifier depth; -1 = any
  double lift_fraction = 0.0;
  double unknown_rate = 0.0;
  bool mask_r = false, mask_s = false;
  RelevanceMode relevance = RelevanceMode::None;
  int per_gold_cap = 3;
  int per_subfamily_cap = 8;
  int instance_attempts = 24;
  int world_attempts = 4000;
  int no_world_attempts = 500;

  SamplingParams sampling() const;
};

const std::vector<BandConfig>& builtin_bands();
const BandConfig& find_band(Task task, std::string_view name);
std::vector<BandConfig> load_bands_file(const std::string& path);
std::string bands_to_json(const std::vector<BandConfig>& bands);

/// Gold sampling under the band's QD constraint, lift-hard mix, and per-gold
/// / per-subfamily caps. Returns one gold per instance slot. Throws
/// InsufficientPool when the constraints cannot be met.
std::vector<Template> select_golds(const BandConfig& band, const std::vector<Template>& pool,
                                   int count, std::uint64_t seed);

// Rejection filters shared by FullObs generation and its re-verification.
// Each returns true when the instance PASSES (no trivial hypothesis matches
// every world).
bool filter_atomic(std::span<const World> worlds);
bool filter_subformula(const Formula& gold, std::span<const World> worlds);
bool filter_quantifier_free(std::span<const World> worlds);

/// Sequential world construction with kill tracking against the frozen pool:
/// every accepted world eliminates at least one hypothesis that matched all
/// previous worlds, and the finished instance must pass all three rejection
/// filters. Throws GenerationExhausted (with the per-filter failure
/// histogram) when the retry budget runs out.
ProblemInstance gen_fullobs(const Template& gold, const BandConfig& band,
                            const FrozenPool& pool, std::uint64_t seed,
                            const std::string& id);

/// Trap-based contrastive construction: YES worlds keep 1-2 near-miss traps
/// (2-4 total survivors) alive, then each NO world is built to be exactly
/// matched by a surviving trap while the gold mismatches; every survivor is
/// killed by at least one NO world.
ProblemInstance gen_ci(const Template& gold, const BandConfig& band, const FrozenPool& pool,
                       std::uint64_t seed, const std::string& id);

/// Partially observed worlds: sample, label by gold, mask unknowns, then
/// apply the band's relevance filter (extreme_or accepts when either uniform
/// completion matches; middle_allowed rejects when both do).
ProblemInstance gen_ec(const Template& gold, const BandConfig& band, std::uint64_t seed,
                       const std::string& id);

/// Held-out worlds: 5 fresh band-sampled worlds labeled by gold for
/// FullObs/EC; 3 YES + 2 NO built by the CI mechanism against the instance's
/// recorded trap survivors for CI. The band-less overload looks the band up
/// in the builtin registry.
HoldoutSet gen_holdout(const ProblemInstance& instance, const BandConfig& band,
                       std::uint64_t seed);
HoldoutSet gen_holdout(const ProblemInstance& instance, std::uint64_t seed);

struct GenerationResult {
  std::vector<ProblemInstance> instances;
  std::map<std::string, int> failure_counts; // aggregated across instances
};

/// Full corpus construction for one band: template selection, frozen pool,
/// and per-instance generation with derived seeds.
GenerationResult generate_corpus(const BandConfig& band, int count, std::uint64_t seed);

} // namespace folsynth
