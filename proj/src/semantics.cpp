#include "folsynth/semantics.hpp"

namespace folsynth {

namespace {

// env[var_index(v)] = bound element, or -1.
bool eval_env(const FormulaNode* f, const World& w, int env[4]) {
  switch (f->kind) {
    case FormulaKind::UnaryAtom:
      return w.unary(f->pred, env[var_index(f->var1)]);
    case FormulaKind::BinaryAtom:
      return w.binary(f->pred, env[var_index(f->var1)], env[var_index(f->var2)]);
    case FormulaKind::Equality:
      return env[var_index(f->var1)] == env[var_index(f->var2)];
    case FormulaKind::Not:
      return !eval_env(f->children[0].get(), w, env);
    case FormulaKind::And:
      for (const Formula& c : f->children) {
        if (!eval_env(c.get(), w, env)) return false;
      }
      return true;
    case FormulaKind::Or:
      for (const Formula& c : f->children) {
        if (eval_env(c.get(), w, env)) return true;
      }
      return false;
    case FormulaKind::Forall: {
      int slot = var_index(f->var1);
      int saved = env[slot];
      for (int e = 0; e < w.n; ++e) {
        env[slot] = e;
        if (!eval_env(f->children[0].get(), w, env)) {
          env[slot] = saved;
          return false;
        }
      }
      env[slot] = saved;
      return true;
    }
    case FormulaKind::Exists: {
      int slot = var_index(f->var1);
      int saved = env[slot];
      for (int e = 0; e < w.n; ++e) {
        env[slot] = e;
        if (eval_env(f->children[0].get(), w, env)) {
          env[slot] = saved;
          return true;
        }
      }
      env[slot] = saved;
      return false;
    }
  }
  return false;
}

} // namespace

bool evaluate(const Formula& f, const World& w, int a) {
  int env[4] = {a, -1, -1, -1};
  return eval_env(f.get(), w, env);
}

Extension extension(const Formula& f, const World& w) {
  Extension ext(w.n, 0);
  for (int a = 0; a < w.n; ++a) {
    ext[a] = evaluate(f, w, a) ? 1 : 0;
  }
  return ext;
}

std::vector<int> extension_elements(const Extension& ext) {
  std::vector<int> out;
  for (std::size_t i = 0; i < ext.size(); ++i) {
    if (ext[i]) out.push_back(static_cast<int>(i));
  }
  return out;
}

bool matches(const Formula& f, const World& w) {
  for (int a = 0; a < w.n; ++a) {
    if ((evaluate(f, w, a) ? 1 : 0) != w.target[a]) return false;
  }
  return true;
}

bool solves_fullobs(const Formula& f, std::span<const World> worlds, bool* vacuous_warning) {
  if (vacuous_warning) *vacuous_warning = worlds.empty();
  for (const World& w : worlds) {
    if (!matches(f, w)) return false;
  }
  return true;
}

bool solves_ci(const Formula& f, std::span<const World> yes_worlds,
               std::span<const World> no_worlds) {
  for (const World& w : yes_worlds) {
    if (!matches(f, w)) return false;
  }
  for (const World& w : no_worlds) {
    if (matches(f, w)) return false;
  }
  return true;
}

ErrorProfile error_profile(const Formula& f, const World& w) {
  ErrorProfile ep;
  for (int a = 0; a < w.n; ++a) {
    bool pred = evaluate(f, w, a);
    bool truth = w.target[a] != 0;
    if (pred && !truth) ++ep.false_positives;
    if (!pred && truth) ++ep.false_negatives;
  }
  if (w.n > 0) {
    ep.fp_rate = static_cast<double>(ep.false_positives) / w.n;
    ep.fn_rate = static_cast<double>(ep.false_negatives) / w.n;
  }
  return ep;
}

double no_margin(const Formula& f, std::span<const World> no_worlds) {
  if (no_worlds.empty()) return 0.0;
  double total = 0.0;
  for (const World& w : no_worlds) {
    total += error_profile(f, w).mismatches();
  }
  return total / static_cast<double>(no_worlds.size());
}

} // namespace folsynth
