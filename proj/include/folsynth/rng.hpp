#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace folsynth {

// Deterministic, splittable random stream.
//
// State evolution is SplitMix64 (Steele, Lea & Flood 2014): a 64-bit counter
// advanced by the golden-ratio increment, with the output finalizer
// xor-shift-multiply mix. It is seedable, platform-independent, and cheap to
// fork: derived streams are seeded from mix(parent_seed, label), so every
// instance / world / phase gets an independent stream from (seed, id) alone.
//
// std::uniform_int_distribution and friends are deliberately avoided: their
// output is unspecified across standard library implementations, and
// generation output must be byte-stable.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, n) by rejection, bias-free for any n >= 1.
  std::uint64_t below(std::uint64_t n) {
    if (n <= 1) return 0;
    std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n + 1) % n;
    std::uint64_t v = next_u64();
    while (v > limit) v = next_u64();
    return v % n;
  }

  // Uniform integer in [lo, hi], inclusive.
  int range(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  // Uniform double in [0, 1) with 53 bits of entropy.
  double unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return unit() < p; }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  // Seed for a labeled child stream, e.g. derive(corpus_seed, instance_index).
  static std::uint64_t derive(std::uint64_t seed, std::uint64_t label) {
    Rng mixer(seed ^ (0xd1342543de82ef95ULL * (label + 1)));
    return mixer.next_u64();
  }

private:
  std::uint64_t state_;
};

// FNV-1a, for deriving stream labels from string ids (std::hash is not
// stable across standard libraries).
inline std::uint64_t stable_hash(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

} // namespace folsynth
