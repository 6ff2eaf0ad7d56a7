#include "folsynth/world.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "folsynth/semantics.hpp"

namespace folsynth {

World World::empty(int n) {
  World w;
  w.n = n;
  w.p.assign(n, 0);
  w.q.assign(n, 0);
  w.r.assign(static_cast<std::size_t>(n) * n, 0);
  w.s.assign(static_cast<std::size_t>(n) * n, 0);
  w.target.assign(n, 0);
  return w;
}

PartialWorld PartialWorld::from_world(const World& w) {
  PartialWorld pw;
  pw.n = w.n;
  auto lift = [](const std::vector<std::uint8_t>& v) {
    std::vector<Truth> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = v[i] ? Truth::True : Truth::False;
    return out;
  };
  pw.p = lift(w.p);
  pw.q = lift(w.q);
  pw.r = lift(w.r);
  pw.s = lift(w.s);
  pw.target = w.target;
  return pw;
}

std::vector<GroundAtom> PartialWorld::unknown_atoms() const {
  std::vector<GroundAtom> out;
  for (int i = 0; i < n; ++i) {
    if (p[i] == Truth::Unknown) out.push_back({'P', i, -1});
    if (q[i] == Truth::Unknown) out.push_back({'Q', i, -1});
  }
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (binary('R', i, j) == Truth::Unknown) out.push_back({'R', i, j});
      if (binary('S', i, j) == Truth::Unknown) out.push_back({'S', i, j});
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

bool PartialWorld::fully_known() const {
  auto known = [](const std::vector<Truth>& v) {
    return std::none_of(v.begin(), v.end(), [](Truth t) { return t == Truth::Unknown; });
  };
  return known(p) && known(q) && known(r) && known(s);
}

World PartialWorld::to_world() const { return complete_all(false); }

World PartialWorld::complete_all(bool value) const {
  World w = World::empty(n);
  auto drop = [value](const std::vector<Truth>& src, std::vector<std::uint8_t>& dst) {
    for (std::size_t i = 0; i < src.size(); ++i) {
      dst[i] = src[i] == Truth::True || (src[i] == Truth::Unknown && value) ? 1 : 0;
    }
  };
  drop(p, w.p);
  drop(q, w.q);
  drop(r, w.r);
  drop(s, w.s);
  w.target = target;
  return w;
}

namespace {

void sample_unary(std::vector<std::uint8_t>& out, const SamplingParams& params, Rng& rng,
                  const char* name) {
  int n = static_cast<int>(out.size());
  for (int attempt = 0; attempt < params.balance_retries; ++attempt) {
    int trues = 0;
    for (int i = 0; i < n; ++i) {
      out[i] = rng.bernoulli(params.p_unary) ? 1 : 0;
      trues += out[i];
    }
    double frac = static_cast<double>(trues) / n;
    if (frac >= params.balance_lo && frac <= params.balance_hi) return;
  }
  throw SamplingExhausted(std::string("unary balance window unreachable for ") + name);
}

void sample_regular_outdegree(World& w, char pred, const SamplingParams& params, Rng& rng) {
  // Exactly out_degree distinct out-edges per element, chosen uniformly from
  // the other elements (partial Fisher-Yates over the candidate list).
  std::vector<int> candidates(w.n - 1);
  for (int a = 0; a < w.n; ++a) {
    int idx = 0;
    for (int b = 0; b < w.n; ++b) {
      if (b != a) candidates[idx++] = b;
    }
    for (int k = 0; k < params.out_degree; ++k) {
      int pick = k + static_cast<int>(rng.below(candidates.size() - k));
      std::swap(candidates[k], candidates[pick]);
      w.set_binary(pred, a, candidates[k], true);
    }
  }
}

} // namespace

World sample_world_structure(const SamplingParams& params, std::uint64_t seed) {
  if (params.out_degree >= params.domain_lo) {
    throw SamplingExhausted("out_degree must be smaller than the domain size");
  }
  if (params.p_unary <= 0.0 || params.p_unary >= 1.0) {
    throw SamplingExhausted("p_unary must lie strictly between 0 and 1");
  }
  Rng rng(seed);
  int n = rng.range(params.domain_lo, params.domain_hi);
  World w = World::empty(n);
  sample_unary(w.p, params, rng, "P");
  sample_unary(w.q, params, rng, "Q");
  sample_regular_outdegree(w, 'R', params, rng);
  sample_regular_outdegree(w, 'S', params, rng);
  return w;
}

World sample_world(const SamplingParams& params, const Formula& gold, std::uint64_t seed) {
  World w = sample_world_structure(params, seed);
  w.target = extension(gold, w);
  return w;
}

PartialWorld mask_unknowns(const World& w, double rate, bool eligible_r, bool eligible_s,
                           std::uint64_t seed) {
  PartialWorld pw = PartialWorld::from_world(w);
  std::vector<GroundAtom> grid;
  for (char pred : {'R', 'S'}) {
    if ((pred == 'R' && !eligible_r) || (pred == 'S' && !eligible_s)) continue;
    for (int i = 0; i < w.n; ++i) {
      for (int j = 0; j < w.n; ++j) {
        grid.push_back({pred, i, j});
      }
    }
  }
  Rng rng(seed);
  rng.shuffle(grid);
  std::size_t unknown_count =
      static_cast<std::size_t>(std::floor(rate * static_cast<double>(grid.size())));
  for (std::size_t k = 0; k < unknown_count; ++k) {
    const GroundAtom& atom = grid[k];
    auto& layer = atom.pred == 'R' ? pw.r : pw.s;
    layer[static_cast<std::size_t>(atom.a) * w.n + atom.b] = Truth::Unknown;
  }
  return pw;
}

} // namespace folsynth
