#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "folsynth/formula.hpp"

namespace folsynth {

// A candidate concept with its structural tags. The subfamily key is
// (family, sorted unary guards with polarity, sorted binary symbols,
// argument-orientation fingerprint), joined with '|'.
struct Template {
  Formula formula;
  std::string text; // canonical rendering, used as identity everywhere
  int qd = 0;
  int ast = 0;
  Family family = Family::Oth;
  bool lift_hard = false;
  std::string subfamily;
};

Template make_template(const Formula& f);
std::string subfamily_key(const Formula& f);

/// The gold template pool: the curated QD 0/1/2 lists plus their systematic
/// expansion (swapping P with Q and R with S, plus binary-atom argument
/// reorderings), deduplicated. Stable across runs; roughly 200 distinct
/// formulas. Gold templates never use equality.
const std::vector<Template>& builtin_templates();

/// Systematic shortcut enumeration (atomic literals, small boolean
/// combinations, single-quantifier patterns; QD <= 1 and AST <= 10). Source
/// for tier 1 of the frozen pool and for CI trap pools.
const std::vector<Template>& shortcut_templates();

/// Near-miss mutants: one predicate swap (P<->Q or R<->S at a single atom),
/// one guard drop (delete one conjunct directly inside a quantifier), or one
/// argument permutation (swap the arguments of a single binary atom).
/// Deduplicated, well-formed with free variable x, never equal to the input.
/// The seed is only used to subsample when more than `cap` mutants exist.
std::vector<Formula> mutate(const Formula& gold, std::uint64_t seed, int cap = 128);

struct FrozenPoolConfig {
  int tier1_target = 300;
  int tier2_target = 700;
  int tier3_target = 500;
  int mutation_rounds = 3; // closure depth used to top up tier 2
};

// Frozen distractor pool shared by kill tracking across an entire run.
// Tier 1: shortcuts (QD <= 1, AST <= 10). Tier 2: near-miss mutants of the
// gold formulas. Tier 3: structurally complex QD=2 distractors. Tiers are
// disjoint and exclude the gold formulas themselves.
struct FrozenPool {
  std::vector<Template> tier1, tier2, tier3;
  std::uint64_t seed = 0;

  std::size_t size() const { return tier1.size() + tier2.size() + tier3.size(); }
  std::vector<const Template*> all() const;
};

FrozenPool build_frozen_pool(const std::vector<Template>& golds, std::uint64_t seed,
                             const FrozenPoolConfig& config = {});

/// One line per member: tier, family, qd, ast, lift flag, formula text.
void write_pool_manifest(std::ostream& os, const FrozenPool& pool);

} // namespace folsynth
