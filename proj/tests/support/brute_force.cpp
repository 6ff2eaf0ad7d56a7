#include "support/brute_force.hpp"

#include <algorithm>

namespace folsynth::oracle {

namespace {

bool eval_rec(const Formula& f, const World& w, std::map<char, int>& env) {
  switch (f->kind) {
    case FormulaKind::UnaryAtom: {
      int a = env.at(f->var1);
      return f->pred == 'P' ? w.p[a] != 0 : w.q[a] != 0;
    }
    case FormulaKind::BinaryAtom: {
      int a = env.at(f->var1);
      int b = env.at(f->var2);
      const auto& grid = f->pred == 'R' ? w.r : w.s;
      return grid[static_cast<std::size_t>(a) * w.n + b] != 0;
    }
    case FormulaKind::Equality:
      return env.at(f->var1) == env.at(f->var2);
    case FormulaKind::Not:
      return !eval_rec(f->children[0], w, env);
    case FormulaKind::And: {
      std::vector<bool> vals;
      for (const Formula& c : f->children) vals.push_back(eval_rec(c, w, env));
      return std::all_of(vals.begin(), vals.end(), [](bool v) { return v; });
    }
    case FormulaKind::Or: {
      std::vector<bool> vals;
      for (const Formula& c : f->children) vals.push_back(eval_rec(c, w, env));
      return std::any_of(vals.begin(), vals.end(), [](bool v) { return v; });
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists: {
      std::vector<bool> vals;
      auto previous = env.find(f->var1);
      int saved = previous != env.end() ? previous->second : -1;
      bool had = previous != env.end();
      for (int e = 0; e < w.n; ++e) {
        env[f->var1] = e;
        vals.push_back(eval_rec(f->children[0], w, env));
      }
      if (had) {
        env[f->var1] = saved;
      } else {
        env.erase(f->var1);
      }
      if (f->kind == FormulaKind::Forall) {
        return std::all_of(vals.begin(), vals.end(), [](bool v) { return v; });
      }
      return std::any_of(vals.begin(), vals.end(), [](bool v) { return v; });
    }
  }
  return false;
}

World completed(const PartialWorld& pw, unsigned long long bits,
                const std::vector<GroundAtom>& unknowns) {
  World w = World::empty(pw.n);
  auto copy_known = [](const std::vector<Truth>& src, std::vector<std::uint8_t>& dst) {
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] == Truth::True ? 1 : 0;
  };
  copy_known(pw.p, w.p);
  copy_known(pw.q, w.q);
  copy_known(pw.r, w.r);
  copy_known(pw.s, w.s);
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    bool v = (bits >> i) & 1ULL;
    const GroundAtom& atom = unknowns[i];
    if (atom.b < 0) {
      w.set_unary(atom.pred, atom.a, v);
    } else {
      w.set_binary(atom.pred, atom.a, atom.b, v);
    }
  }
  w.target = pw.target;
  return w;
}

int mismatch_count(const Formula& f, const World& w) {
  int mism = 0;
  for (int a = 0; a < w.n; ++a) {
    std::map<char, int> env{{'x', a}};
    bool holds = eval_rec(f, w, env);
    if (holds != (w.target[a] != 0)) ++mism;
  }
  return mism;
}

} // namespace

bool brute_evaluate(const Formula& f, const World& w, int element) {
  std::map<char, int> env{{'x', element}};
  return eval_rec(f, w, env);
}

std::vector<int> brute_extension(const Formula& f, const World& w) {
  std::vector<int> out;
  for (int a = 0; a < w.n; ++a) {
    if (brute_evaluate(f, w, a)) out.push_back(a);
  }
  return out;
}

bool brute_matches(const Formula& f, const World& w) {
  return mismatch_count(f, w) == 0;
}

bool brute_ec_valid(const Formula& f, const PartialWorld& pw) {
  std::vector<GroundAtom> unknowns = pw.unknown_atoms();
  unsigned long long total = 1ULL << unknowns.size();
  for (unsigned long long bits = 0; bits < total; ++bits) {
    if (mismatch_count(f, completed(pw, bits, unknowns)) == 0) return true;
  }
  return false;
}

int brute_min_mismatch(const Formula& f, const PartialWorld& pw) {
  std::vector<GroundAtom> unknowns = pw.unknown_atoms();
  unsigned long long total = 1ULL << unknowns.size();
  int best = pw.n + 1;
  for (unsigned long long bits = 0; bits < total; ++bits) {
    best = std::min(best, mismatch_count(f, completed(pw, bits, unknowns)));
    if (best == 0) return 0;
  }
  return best;
}

} // namespace folsynth::oracle
