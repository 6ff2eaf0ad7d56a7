#include "support/random_formula.hpp"

#include <algorithm>
#include <vector>

namespace folsynth::testgen {

namespace {

char pick_var(Rng& rng, const std::vector<char>& scope) {
  return scope[rng.below(scope.size())];
}

Formula gen(Rng& rng, std::vector<char>& scope, int qd_budget, int depth,
            bool allow_equality) {
  // Weight atoms heavier as depth grows so trees stay small.
  int atom_weight = 2 + depth * 3;
  int choices = atom_weight + 3 + (qd_budget > 0 ? 2 : 0);
  int roll = static_cast<int>(rng.below(choices));
  if (roll < atom_weight || depth >= 5) {
    int kind = static_cast<int>(rng.below(allow_equality ? 6u : 5u));
    switch (kind) {
      case 0: return unary_atom('P', pick_var(rng, scope));
      case 1: return unary_atom('Q', pick_var(rng, scope));
      case 2: return binary_atom('R', pick_var(rng, scope), pick_var(rng, scope));
      case 3: return binary_atom('S', pick_var(rng, scope), pick_var(rng, scope));
      case 4: return binary_atom(rng.bernoulli(0.5) ? 'R' : 'S', pick_var(rng, scope),
                                 pick_var(rng, scope));
      default: return equality(pick_var(rng, scope), pick_var(rng, scope));
    }
  }
  roll -= atom_weight;
  if (roll == 0) {
    return negation(gen(rng, scope, qd_budget, depth + 1, allow_equality));
  }
  if (roll == 1 || roll == 2) {
    int n = 2 + static_cast<int>(rng.below(2));
    std::vector<Formula> kids;
    for (int i = 0; i < n; ++i) {
      kids.push_back(gen(rng, scope, qd_budget, depth + 1, allow_equality));
    }
    return roll == 1 ? conjunction(std::move(kids)) : disjunction(std::move(kids));
  }
  // Quantifier: bind the next unused variable from y,z,w.
  std::vector<char> unused;
  for (char v : {'y', 'z', 'w'}) {
    if (std::find(scope.begin(), scope.end(), v) == scope.end()) unused.push_back(v);
  }
  if (unused.empty()) {
    return unary_atom('P', pick_var(rng, scope));
  }
  char bound = unused[rng.below(unused.size())];
  scope.push_back(bound);
  Formula body = gen(rng, scope, qd_budget - 1, depth + 1, allow_equality);
  scope.pop_back();
  return quantifier(rng.bernoulli(0.5) ? FormulaKind::Forall : FormulaKind::Exists, bound,
                    body);
}

} // namespace

Formula random_formula(Rng& rng, int max_qd, bool allow_equality) {
  while (true) {
    std::vector<char> scope = {'x'};
    Formula f = gen(rng, scope, max_qd, 0, allow_equality);
    if (free_variables(f) == std::set<char>{'x'} && quantifier_depth(f) <= max_qd) {
      return f;
    }
  }
}

World random_world(Rng& rng, int n) {
  World w = World::empty(n);
  for (int i = 0; i < n; ++i) {
    w.p[i] = rng.bernoulli(0.5);
    w.q[i] = rng.bernoulli(0.5);
    w.target[i] = rng.bernoulli(0.5);
    for (int j = 0; j < n; ++j) {
      w.set_binary('R', i, j, rng.bernoulli(0.3));
      w.set_binary('S', i, j, rng.bernoulli(0.3));
    }
  }
  return w;
}

PartialWorld random_partial_world(Rng& rng, int n, int max_unknowns) {
  World w = random_world(rng, n);
  PartialWorld pw = PartialWorld::from_world(w);
  std::vector<std::pair<char, std::pair<int, int>>> atoms;
  for (int i = 0; i < n; ++i) {
    atoms.push_back({'P', {i, -1}});
    atoms.push_back({'Q', {i, -1}});
    for (int j = 0; j < n; ++j) {
      atoms.push_back({'R', {i, j}});
      atoms.push_back({'S', {i, j}});
    }
  }
  rng.shuffle(atoms);
  int unknowns = static_cast<int>(rng.below(max_unknowns + 1));
  for (int k = 0; k < unknowns && k < static_cast<int>(atoms.size()); ++k) {
    auto [pred, idx] = atoms[k];
    auto [i, j] = idx;
    if (pred == 'P') pw.p[i] = Truth::Unknown;
    if (pred == 'Q') pw.q[i] = Truth::Unknown;
    if (pred == 'R') pw.r[static_cast<std::size_t>(i) * n + j] = Truth::Unknown;
    if (pred == 'S') pw.s[static_cast<std::size_t>(i) * n + j] = Truth::Unknown;
  }
  return pw;
}

} // namespace folsynth::testgen
