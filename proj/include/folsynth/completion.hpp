#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "folsynth/formula.hpp"
#include "folsynth/sat.hpp"
#include "folsynth/world.hpp"

namespace folsynth {

// Boolean circuit over the unknown atoms of one partially observed world.
// Known atoms are folded to constants during construction, so a circuit with
// no live inputs collapses to a constant equal to the fully-known verdict.
struct BoolCircuit {
  enum class Gate : std::uint8_t { ConstFalse, ConstTrue, Input, Not, And, Or };
  struct Node {
    Gate gate;
    int input = -1;         // unknown-atom index for Gate::Input
    std::vector<int> kids;  // operand node ids
  };
  std::vector<Node> nodes;
  int root = -1;

  bool is_constant() const {
    return nodes[root].gate == Gate::ConstFalse || nodes[root].gate == Gate::ConstTrue;
  }
  bool constant_value() const { return nodes[root].gate == Gate::ConstTrue; }
};

// Constraint asserting, for every domain element, formula truth iff target
// membership, with one Boolean variable per unknown ground atom.
struct GroundedConstraint {
  std::vector<GroundAtom> unknown_atoms; // variable i <-> unknown_atoms[i]
  BoolCircuit circuit;
  int variable_count() const { return static_cast<int>(unknown_atoms.size()); }
};

// Total truth assignment over one world's unknown atoms, aligned with
// GroundedConstraint::unknown_atoms / PartialWorld::unknown_atoms().
using CompletionWitness = std::vector<std::uint8_t>;

struct SolveBudget {
  long long conflict_limit = 10'000'000;
  double time_limit_s = 30.0;
};

/// Quantifiers expanded over the finite domain; the circuit is exactly
/// "and over elements a of (eval(f, a) iff a in target)".
GroundedConstraint ground(const Formula& f, const PartialWorld& pw);

struct EcVerdict {
  bool valid = false;
  std::optional<CompletionWitness> witness;
};

/// Existential-completion validity of f on one world: satisfiability of the
/// grounded constraint, decided by clause-form translation plus systematic
/// search. Returns a witness completion when valid.
EcVerdict ec_valid_world(const Formula& f, const PartialWorld& pw, SolveBudget budget = {});

/// Completions are world-local: validity is the conjunction of
/// ec_valid_world over all worlds, each with its own unknowns.
bool ec_valid_instance(const Formula& f, std::span<const PartialWorld> worlds,
                       SolveBudget budget = {});

/// Minimum over all completions of |extension delta target|, found by
/// iterating k = 0,1,2,... with per-element relaxation variables under a
/// sequential-counter at-most-k bound. Zero iff ec_valid_world.
int min_mismatch(const Formula& f, const PartialWorld& pw, SolveBudget budget = {});

/// Unknown atoms replaced by the witness values; everything else kept.
World apply_witness(const PartialWorld& pw, const CompletionWitness& witness);

/// Clause-form dump of the grounded constraint in DIMACS format, with the
/// input-variable/atom mapping in the comment header.
void write_dimacs(std::ostream& os, const Formula& f, const PartialWorld& pw);

} // namespace folsynth
