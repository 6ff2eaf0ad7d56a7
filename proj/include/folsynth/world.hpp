#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "folsynth/errors.hpp"
#include "folsynth/formula.hpp"
#include "folsynth/rng.hpp"

namespace folsynth {

// One ground atom of the signature: b < 0 for unary predicates.
struct GroundAtom {
  char pred = 0;
  int a = 0;
  int b = -1;

  bool operator==(const GroundAtom& o) const {
    return pred == o.pred && a == o.a && b == o.b;
  }
  bool operator<(const GroundAtom& o) const {
    if (pred != o.pred) return pred < o.pred;
    if (a != o.a) return a < o.a;
    return b < o.b;
  }
};

// Finite relational structure over domain {0..n-1} (elements named a0..a(n-1)
// in prompts). Closed-world: any atom not set is false. Immutable by
// convention once built.
struct World {
  int n = 0;
  std::vector<std::uint8_t> p, q;    // size n
  std::vector<std::uint8_t> r, s;    // size n*n, row-major (i,j)
  std::vector<std::uint8_t> target;  // size n

  static World empty(int n);
  bool unary(char pred, int i) const { return (pred == 'P' ? p : q)[i] != 0; }
  bool binary(char pred, int i, int j) const {
    return (pred == 'R' ? r : s)[static_cast<std::size_t>(i) * n + j] != 0;
  }
  void set_unary(char pred, int i, bool v) { (pred == 'P' ? p : q)[i] = v ? 1 : 0; }
  void set_binary(char pred, int i, int j, bool v) {
    (pred == 'R' ? r : s)[static_cast<std::size_t>(i) * n + j] = v ? 1 : 0;
  }
};

enum class Truth : std::uint8_t { False = 0, True = 1, Unknown = 2 };

// World whose ground atoms are partitioned into known-true / known-false /
// unknown. The target labeling is always fully known.
struct PartialWorld {
  int n = 0;
  std::vector<Truth> p, q;           // size n
  std::vector<Truth> r, s;           // size n*n
  std::vector<std::uint8_t> target;  // size n

  static PartialWorld from_world(const World& w);

  Truth unary(char pred, int i) const { return (pred == 'P' ? p : q)[i]; }
  Truth binary(char pred, int i, int j) const {
    return (pred == 'R' ? r : s)[static_cast<std::size_t>(i) * n + j];
  }

  std::vector<GroundAtom> unknown_atoms() const; // sorted
  bool fully_known() const;
  // Requires fully_known().
  World to_world() const;
  // Unknown atoms uniformly set to `value` (the extreme completions).
  World complete_all(bool value) const;
};

struct SamplingParams {
  double p_unary = 0.4;
  double balance_lo = 0.15;
  double balance_hi = 0.85;
  int out_degree = 2;
  int domain_lo = 5;
  int domain_hi = 7;
  int balance_retries = 100;
};

/// Random world for a planted gold concept: domain size uniform in the band
/// range, unary predicates Bernoulli(p_unary) resampled until the true
/// fraction falls in the balance window, binary relations with exactly
/// out_degree distinct out-edges per element drawn from D \ {a} (no
/// self-loops), target = extension of gold. Pure function of
/// (params, gold, seed). Throws SamplingExhausted when a balance window
/// stays unreachable for balance_retries resamples.
World sample_world(const SamplingParams& params, const Formula& gold, std::uint64_t seed);

/// World sampled as above but labeled by an explicit target mask instead of
/// a formula (used for trap-labeled negative worlds).
World sample_world_structure(const SamplingParams& params, std::uint64_t seed);

/// Collects the full ground-atom grid of the eligible predicates, shuffles
/// deterministically, and marks the floor(rate * total) prefix unknown;
/// everything else keeps its truth from w. Non-eligible predicates stay
/// fully known; the target is copied.
PartialWorld mask_unknowns(const World& w, double rate, bool eligible_r, bool eligible_s,
                           std::uint64_t seed);

} // namespace folsynth
