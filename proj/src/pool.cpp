#include "folsynth/pool.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <set>

#include "folsynth/rng.hpp"

namespace folsynth {

namespace {

// Curated base templates, by quantifier depth.
const char* const kTemplatesQd0[] = {
    "(P x)",
    "(Q x)",
    "(not (P x))",
    "(not (Q x))",
    "(R x x)",
    "(S x x)",
    "(not (R x x))",
    "(not (S x x))",
    "(and (P x) (Q x))",
    "(or (P x) (Q x))",
    "(and (P x) (not (Q x)))",
    "(or (not (P x)) (Q x))",
    "(and (not (P x)) (not (Q x)))",
    "(or (not (P x)) (not (Q x)))",
};

const char* const kTemplatesQd1[] = {
    "(exists y (R x y))",
    "(exists y (S x y))",
    "(exists y (R y x))",
    "(exists y (S y x))",
    "(exists y (and (R x y) (P y)))",
    "(exists y (and (R x y) (Q y)))",
    "(exists y (and (S x y) (P y)))",
    "(exists y (and (R x y) (not (P y))))",
    "(exists y (and (S x y) (not (Q y))))",
    "(forall y (or (not (R x y)) (P y)))",
    "(forall y (or (not (R y x)) (P y)))",
    "(forall y (or (not (S x y)) (Q y)))",
    "(forall y (or (not (R x y)) (Q y)))",
    "(forall y (or (not (S y x)) (P y)))",
    "(and (P x) (exists y (R x y)))",
    "(and (not (P x)) (exists y (and (R x y) (Q y))))",
    "(or (P x) (forall y (or (not (R x y)) (Q y))))",
    "(and (Q x) (exists y (S x y)))",
};

const char* const kTemplatesQd2[] = {
    "(exists y (forall z (or (not (R y z)) (S x z))))",
    "(exists y (forall z (or (not (S y z)) (R x z))))",
    "(exists y (and (P y) (forall z (or (not (R y z)) (S x z)))))",
    "(exists y (and (Q y) (forall z (or (not (S y z)) (R x z)))))",
    "(exists y (and (not (P y)) (forall z (or (not (R y z)) (S x z)))))",
    "(forall y (or (not (R x y)) (exists z (S y z))))",
    "(forall y (or (not (S x y)) (exists z (R y z))))",
    "(forall y (or (not (R x y)) (exists z (and (S y z) (P z)))))",
    "(forall y (or (not (R x y)) (exists z (and (S y z) (Q z)))))",
    "(forall y (or (not (R x y)) (exists z (and (S y z) (not (P z))))))",
    "(forall y (or (not (S x y)) (exists z (and (R y z) (not (Q z))))))",
    "(forall y (exists z (and (R x y) (S y z))))",
    "(and (P x) (exists y (forall z (or (not (R y z)) (S x z)))))",
    "(and (not (Q x)) (forall y (or (not (R x y)) (exists z (S y z)))))",
    "(or (P x) (exists y (forall z (or (not (R y z)) (S x z)))))",
    "(or (not (P x)) (forall y (or (not (R x y)) (exists z (S y z)))))",
    "(and (Q x) (forall y (or (not (S x y)) (exists z (R y z)))))",
    "(exists y (forall z (or (not (R z y)) (S z x))))",
    "(forall y (or (not (R y x)) (exists z (S z y))))",
    // Path/composition, mixed-witness and z-filter shapes used by the
    // fine-grained family taxonomy.
    "(exists y (exists z (and (and (R x y) (S y z)) (P z))))",
    "(exists y (exists z (and (and (R x y) (S y z)) (not (P z)))))",
    "(exists y (exists z (and (and (R x y) (R y z)) (Q z))))",
    "(forall y (or (not (R x y)) (exists z (and (S y z) (S x z)))))",
    "(forall y (or (not (R x y)) (exists z (and (R y z) (R x z)))))",
    "(exists y (and (P y) (forall z (or (not (R y z)) (and (S x z) (Q z))))))",
    "(exists y (and (Q y) (forall z (or (not (S y z)) (and (R x z) (P z))))))",
};

char swap_unary(char c) { return c == 'P' ? 'Q' : c == 'Q' ? 'P' : c; }
char swap_binary(char c) { return c == 'R' ? 'S' : c == 'S' ? 'R' : c; }

Formula rename_preds(const Formula& f, bool flip_unary, bool flip_binary) {
  switch (f->kind) {
    case FormulaKind::UnaryAtom:
      return unary_atom(flip_unary ? swap_unary(f->pred) : f->pred, f->var1);
    case FormulaKind::BinaryAtom:
      return binary_atom(flip_binary ? swap_binary(f->pred) : f->pred, f->var1, f->var2);
    case FormulaKind::Equality:
      return f;
    case FormulaKind::Not:
      return negation(rename_preds(f->children[0], flip_unary, flip_binary));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      for (const Formula& c : f->children) {
        kids.push_back(rename_preds(c, flip_unary, flip_binary));
      }
      return f->kind == FormulaKind::And ? conjunction(std::move(kids))
                                         : disjunction(std::move(kids));
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return quantifier(f->kind, f->var1,
                        rename_preds(f->children[0], flip_unary, flip_binary));
  }
  return f;
}

Formula flip_all_binary_args(const Formula& f) {
  switch (f->kind) {
    case FormulaKind::UnaryAtom:
    case FormulaKind::Equality:
      return f;
    case FormulaKind::BinaryAtom:
      return binary_atom(f->pred, f->var2, f->var1);
    case FormulaKind::Not:
      return negation(flip_all_binary_args(f->children[0]));
    case FormulaKind::And:
    case FormulaKind::Or: {
      std::vector<Formula> kids;
      for (const Formula& c : f->children) kids.push_back(flip_all_binary_args(c));
      return f->kind == FormulaKind::And ? conjunction(std::move(kids))
                                         : disjunction(std::move(kids));
    }
    case FormulaKind::Forall:
    case FormulaKind::Exists:
      return quantifier(f->kind, f->var1, flip_all_binary_args(f->children[0]));
  }
  return f;
}

// Deduplicating accumulator keyed on canonical text, preserving insertion
// order so the pool is stable across runs.
class UniqueList {
public:
  bool add(const Formula& f) {
    std::string text = print(f);
    if (!seen_.insert(text).second) return false;
    items_.push_back(f);
    return true;
  }
  bool contains(const std::string& text) const { return seen_.count(text) > 0; }
  const std::vector<Formula>& items() const { return items_; }

private:
  std::set<std::string> seen_;
  std::vector<Formula> items_;
};

std::vector<Template> expand_and_tag(const std::vector<const char*>& bases) {
  UniqueList acc;
  for (const char* text : bases) {
    Formula base = parse(text);
    for (int mask = 0; mask < 8; ++mask) {
      Formula variant = rename_preds(base, mask & 1, mask & 2);
      if (mask & 4) variant = flip_all_binary_args(variant);
      acc.add(variant);
    }
  }
  std::vector<Template> out;
  out.reserve(acc.items().size());
  for (const Formula& f : acc.items()) out.push_back(make_template(f));
  return out;
}

} // namespace

std::string subfamily_key(const Formula& f) {
  std::vector<std::string> unary_guards;
  std::set<char> binaries;
  std::string orientation;
  struct Walk {
    static void run(const Formula& g, std::vector<std::string>& guards,
                    std::set<char>& bins, std::string& orient, bool negated) {
      switch (g->kind) {
        case FormulaKind::UnaryAtom:
          guards.push_back(std::string(1, g->pred) + (negated ? "-" : "+"));
          break;
        case FormulaKind::BinaryAtom:
          bins.insert(g->pred);
          if (!orient.empty()) orient.push_back('.');
          orient.push_back(g->pred);
          orient.push_back(g->var1);
          orient.push_back(g->var2);
          break;
        case FormulaKind::Equality:
          break;
        case FormulaKind::Not:
          run(g->children[0], guards, bins, orient, !negated);
          break;
        default:
          for (const Formula& c : g->children) run(c, guards, bins, orient, negated);
      }
    }
  };
  Walk::run(f, unary_guards, binaries, orientation, false);
  std::sort(unary_guards.begin(), unary_guards.end());
  std::string key = family_name(classify_family(f));
  key.push_back('|');
  for (const std::string& g : unary_guards) key += g;
  key.push_back('|');
  for (char b : binaries) key.push_back(b);
  key.push_back('|');
  key += orientation;
  return key;
}

Template make_template(const Formula& f) {
  Template t;
  t.formula = f;
  t.text = print(f);
  t.qd = quantifier_depth(f);
  t.ast = ast_size(f);
  t.family = classify_family(f);
  t.lift_hard = is_lift_hard(f);
  t.subfamily = subfamily_key(f);
  return t;
}

const std::vector<Template>& builtin_templates() {
  static const std::vector<Template> pool = [] {
    std::vector<const char*> bases;
    for (const char* t : kTemplatesQd0) bases.push_back(t);
    for (const char* t : kTemplatesQd1) bases.push_back(t);
    for (const char* t : kTemplatesQd2) bases.push_back(t);
    return expand_and_tag(bases);
  }();
  return pool;
}

const std::vector<Template>& shortcut_templates() {
  static const std::vector<Template> pool = [] {
    UniqueList acc;
    std::vector<Formula> literals;
    for (char u : {'P', 'Q'}) literals.push_back(unary_atom(u, 'x'));
    for (char b : {'R', 'S'}) literals.push_back(binary_atom(b, 'x', 'x'));
    {
      std::vector<Formula> negs;
      for (const Formula& l : literals) negs.push_back(negation(l));
      literals.insert(literals.end(), negs.begin(), negs.end());
    }
    for (const Formula& l : literals) acc.add(l);
    // Small boolean combinations of literals.
    for (std::size_t i = 0; i < literals.size(); ++i) {
      for (std::size_t j = i + 1; j < literals.size(); ++j) {
        acc.add(conjunction({literals[i], literals[j]}));
        acc.add(disjunction({literals[i], literals[j]}));
        for (std::size_t k = j + 1; k < literals.size(); ++k) {
          acc.add(conjunction({literals[i], literals[j], literals[k]}));
          acc.add(disjunction({literals[i], literals[j], literals[k]}));
        }
      }
    }
    // Single-quantifier patterns over one binary atom.
    std::vector<Formula> quantified;
    for (char b : {'R', 'S'}) {
      for (bool flip : {false, true}) {
        Formula atom = flip ? binary_atom(b, 'y', 'x') : binary_atom(b, 'x', 'y');
        quantified.push_back(quantifier(FormulaKind::Exists, 'y', atom));
        quantified.push_back(quantifier(FormulaKind::Forall, 'y', atom));
        for (char u : {'P', 'Q'}) {
          for (bool neg : {false, true}) {
            Formula guard = neg ? negation(unary_atom(u, 'y')) : unary_atom(u, 'y');
            quantified.push_back(
                quantifier(FormulaKind::Exists, 'y', conjunction({atom, guard})));
            quantified.push_back(quantifier(FormulaKind::Forall, 'y',
                                            disjunction({negation(atom), guard})));
          }
        }
      }
    }
    std::vector<Formula> x_literals;
    for (char u : {'P', 'Q'}) {
      x_literals.push_back(unary_atom(u, 'x'));
      x_literals.push_back(negation(unary_atom(u, 'x')));
    }
    for (char b : {'R', 'S'}) x_literals.push_back(binary_atom(b, 'x', 'x'));
    for (const Formula& qf : quantified) {
      acc.add(qf);
      acc.add(negation(qf));
      for (const Formula& lit : x_literals) {
        acc.add(conjunction({lit, qf}));
        acc.add(disjunction({lit, qf}));
        acc.add(conjunction({lit, negation(qf)}));
        acc.add(disjunction({lit, negation(qf)}));
      }
    }
    // Two unary literals guarding a bare quantified atom.
    for (const Formula& qf : quantified) {
      if (ast_size(qf) > 5) continue;
      for (char u : {'P', 'Q'}) {
        char v = u == 'P' ? 'Q' : 'P';
        acc.add(conjunction({unary_atom(u, 'x'), unary_atom(v, 'x'), qf}));
        acc.add(disjunction({unary_atom(u, 'x'), unary_atom(v, 'x'), qf}));
      }
    }
    std::vector<Template> out;
    for (const Formula& f : acc.items()) {
      Template t = make_template(f);
      if (t.qd <= 1 && t.ast <= 10) out.push_back(std::move(t));
    }
    return out;
  }();
  return pool;
}

// ---------------------------------------------------------------------------
// Near-miss mutation

namespace {

// Applies a local edit rule to one node position at a time, yielding one
// whole-formula variant per applicable position.
template <typename Fn>
std::vector<Formula> rebuild_each(const Formula& f, Fn&& local) {
  std::vector<Formula> results;
  // Local edits of this node.
  for (Formula& v : local(f)) results.push_back(std::move(v));
  // Edits inside one child, other children untouched.
  for (std::size_t i = 0; i < f->children.size(); ++i) {
    for (const Formula& edited : rebuild_each(f->children[i], local)) {
      std::vector<Formula> kids = f->children;
      kids[i] = edited;
      switch (f->kind) {
        case FormulaKind::Not:
          results.push_back(negation(kids[0]));
          break;
        case FormulaKind::And:
          results.push_back(conjunction(std::move(kids)));
          break;
        case FormulaKind::Or:
          results.push_back(disjunction(std::move(kids)));
          break;
        case FormulaKind::Forall:
        case FormulaKind::Exists:
          results.push_back(quantifier(f->kind, f->var1, kids[0]));
          break;
        default:
          break;
      }
    }
  }
  return results;
}

std::vector<Formula> predicate_swaps(const Formula& f) {
  if (f->kind == FormulaKind::UnaryAtom) return {unary_atom(swap_unary(f->pred), f->var1)};
  if (f->kind == FormulaKind::BinaryAtom) {
    return {binary_atom(swap_binary(f->pred), f->var1, f->var2)};
  }
  return {};
}

std::vector<Formula> argument_permutations(const Formula& f) {
  if (f->kind == FormulaKind::BinaryAtom && f->var1 != f->var2) {
    return {binary_atom(f->pred, f->var2, f->var1)};
  }
  return {};
}

// Conjunct deletion directly inside a quantifier body.
std::vector<Formula> guard_drops(const Formula& f) {
  if (f->kind != FormulaKind::Forall && f->kind != FormulaKind::Exists) return {};
  const Formula& body = f->body();
  if (body->kind != FormulaKind::And) return {};
  std::vector<Formula> out;
  for (std::size_t i = 0; i < body->children.size(); ++i) {
    std::vector<Formula> rest;
    for (std::size_t j = 0; j < body->children.size(); ++j) {
      if (j != i) rest.push_back(body->children[j]);
    }
    Formula new_body = rest.size() == 1 ? rest[0] : conjunction(std::move(rest));
    out.push_back(quantifier(f->kind, f->var1, new_body));
  }
  return out;
}

} // namespace

std::vector<Formula> mutate(const Formula& gold, std::uint64_t seed, int cap) {
  std::string gold_text = print(gold);
  UniqueList acc;
  auto consider = [&](const Formula& m) {
    if (print(m) == gold_text) return;
    if (free_variables(m) != std::set<char>{kFreeVar}) return;
    acc.add(m);
  };
  for (const Formula& m : rebuild_each(gold, predicate_swaps)) consider(m);
  for (const Formula& m : rebuild_each(gold, guard_drops)) consider(m);
  for (const Formula& m : rebuild_each(gold, argument_permutations)) consider(m);

  std::vector<Formula> out = acc.items();
  std::sort(out.begin(), out.end(), [](const Formula& a, const Formula& b) {
    int sa = ast_size(a), sb = ast_size(b);
    if (sa != sb) return sa < sb;
    return print(a) < print(b);
  });
  if (static_cast<int>(out.size()) > cap) {
    Rng rng(seed);
    rng.shuffle(out);
    out.resize(cap);
    std::sort(out.begin(), out.end(), [](const Formula& a, const Formula& b) {
      int sa = ast_size(a), sb = ast_size(b);
      if (sa != sb) return sa < sb;
      return print(a) < print(b);
    });
  }
  return out;
}

// ---------------------------------------------------------------------------
// Frozen pool

namespace {

std::vector<Template> subsample(std::vector<Template> items, int target, Rng& rng) {
  if (static_cast<int>(items.size()) <= target) return items;
  rng.shuffle(items);
  items.resize(target);
  std::sort(items.begin(), items.end(),
            [](const Template& a, const Template& b) { return a.text < b.text; });
  return items;
}

} // namespace

FrozenPool build_frozen_pool(const std::vector<Template>& golds, std::uint64_t seed,
                             const FrozenPoolConfig& config) {
  FrozenPool pool;
  pool.seed = seed;
  std::set<std::string> gold_texts;
  for (const Template& g : golds) gold_texts.insert(g.text);
  std::set<std::string> taken = gold_texts;

  Rng rng(seed);

  // Tier 1: shortcuts.
  std::vector<Template> tier1;
  for (const Template& t : shortcut_templates()) {
    if (!taken.count(t.text)) tier1.push_back(t);
  }
  pool.tier1 = subsample(std::move(tier1), config.tier1_target, rng);
  for (const Template& t : pool.tier1) taken.insert(t.text);

  // Tier 3 base: QD=2 distractors from the template expansion not planted
  // as golds. Claimed before tier 2 so template-shaped mutants stay here.
  std::vector<Template> tier3;
  std::set<std::string> tier3_base;
  for (const Template& t : builtin_templates()) {
    if (t.qd == 2 && !taken.count(t.text) && tier3_base.insert(t.text).second) {
      tier3.push_back(t);
    }
  }

  // Tier 2: near-miss mutants of the golds, topped up with a bounded
  // mutation closure when one round does not reach the target.
  std::vector<Template> tier2;
  std::set<std::string> mutant_seen;
  std::vector<Formula> surplus_qd2; // closure members reserved for tier 3 top-up
  std::vector<Formula> frontier;
  for (const Template& g : golds) frontier.push_back(g.formula);
  for (int round = 0; round < config.mutation_rounds; ++round) {
    std::vector<Formula> next;
    for (const Formula& f : frontier) {
      for (const Formula& m : mutate(f, Rng::derive(seed, round))) {
        std::string text = print(m);
        if (!mutant_seen.insert(text).second) continue;
        next.push_back(m); // explore further even when excluded from the tier
        if (taken.count(text)) continue;
        if (tier3_base.count(text)) continue;
        if (static_cast<int>(tier2.size()) < 4 * config.tier2_target) {
          tier2.push_back(make_template(m));
        }
      }
    }
    if (static_cast<int>(tier2.size()) >= config.tier2_target &&
        round + 1 >= config.mutation_rounds) {
      break;
    }
    frontier = std::move(next);
    if (frontier.empty()) break;
  }
  pool.tier2 = subsample(std::move(tier2), config.tier2_target, rng);
  for (const Template& t : pool.tier2) taken.insert(t.text);

  // Tier 3 top-ups, in order: QD=2 mutants of the expansion templates, then
  // literal/template boolean compositions (still QD=2, larger AST). When the
  // mutation orbit leaves tier 2 short, tier 3 absorbs the deficit so the
  // whole pool lands at the configured total.
  int tier3_goal = std::max(config.tier3_target,
                            config.tier1_target + config.tier2_target +
                                config.tier3_target -
                                static_cast<int>(pool.tier1.size() + pool.tier2.size()));
  if (static_cast<int>(tier3.size()) < tier3_goal) {
    for (const Template& t : builtin_templates()) {
      if (t.qd != 2) continue;
      for (const Formula& m : mutate(t.formula, Rng::derive(seed, 0x7e3))) {
        if (quantifier_depth(m) != 2) continue;
        std::string text = print(m);
        if (taken.count(text) || !tier3_base.insert(text).second) continue;
        tier3.push_back(make_template(m));
      }
      if (static_cast<int>(tier3.size()) >= tier3_goal) break;
    }
  }
  if (static_cast<int>(tier3.size()) < tier3_goal) {
    std::vector<Formula> lits;
    for (char u : {'P', 'Q'}) {
      lits.push_back(unary_atom(u, 'x'));
      lits.push_back(negation(unary_atom(u, 'x')));
      for (char b : {'R', 'S'}) lits.push_back(binary_atom(b, 'x', 'x'));
    }
    for (const Formula& lit : lits) {
      for (const Template& t : builtin_templates()) {
        if (t.qd != 2) continue;
        for (bool conj : {true, false}) {
          Formula combo = conj ? conjunction({lit, t.formula})
                               : disjunction({lit, t.formula});
          std::string text = print(combo);
          if (taken.count(text) || !tier3_base.insert(text).second) continue;
          tier3.push_back(make_template(combo));
        }
        if (static_cast<int>(tier3.size()) >= tier3_goal) break;
      }
      if (static_cast<int>(tier3.size()) >= tier3_goal) break;
    }
  }
  pool.tier3 = subsample(std::move(tier3), tier3_goal, rng);
  return pool;
}

std::vector<const Template*> FrozenPool::all() const {
  std::vector<const Template*> out;
  out.reserve(size());
  for (const Template& t : tier1) out.push_back(&t);
  for (const Template& t : tier2) out.push_back(&t);
  for (const Template& t : tier3) out.push_back(&t);
  return out;
}

void write_pool_manifest(std::ostream& os, const FrozenPool& pool) {
  auto dump = [&os](const std::vector<Template>& tier, int index) {
    for (const Template& t : tier) {
      os << "tier" << index << "\t" << family_name(t.family) << "\tqd=" << t.qd
         << "\tast=" << t.ast << "\tlift=" << (t.lift_hard ? 1 : 0) << "\t" << t.text
         << "\n";
    }
  };
  dump(pool.tier1, 1);
  dump(pool.tier2, 2);
  dump(pool.tier3, 3);
}

} // namespace folsynth
