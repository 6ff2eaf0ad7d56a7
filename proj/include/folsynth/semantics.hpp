#pragma once

#include <span>
#include <vector>

#include "folsynth/formula.hpp"
#include "folsynth/world.hpp"

namespace folsynth {

// Membership mask over the world's domain (index = element).
using Extension = std::vector<std::uint8_t>;

std::vector<int> extension_elements(const Extension& ext); // sorted indices

struct ErrorProfile {
  int false_positives = 0; // elements in the extension but not the target
  int false_negatives = 0; // target elements missing from the extension
  double fp_rate = 0.0;    // fraction of domain size
  double fn_rate = 0.0;
  int mismatches() const { return false_positives + false_negatives; }
};

/// Tarskian truth of f at element a: quantifiers range over the full finite
/// domain, equality is identity of elements.
bool evaluate(const Formula& f, const World& w, int a);

/// Pointwise evaluate over the domain.
Extension extension(const Formula& f, const World& w);

/// extension(f, w) == target(w), elementwise.
bool matches(const Formula& f, const World& w);

/// Exact match in every world. An empty world list is vacuously solved;
/// vacuous_warning (when non-null) is set so callers can log it.
bool solves_fullobs(const Formula& f, std::span<const World> worlds,
                    bool* vacuous_warning = nullptr);

/// Matches every YES world and fails to match every NO world.
bool solves_ci(const Formula& f, std::span<const World> yes_worlds,
               std::span<const World> no_worlds);

ErrorProfile error_profile(const Formula& f, const World& w);

/// Mean over NO worlds of the mismatch count |extension delta target|.
/// Zero on some NO world is exactly a NO-fail.
double no_margin(const Formula& f, std::span<const World> no_worlds);

} // namespace folsynth
