#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "folsynth/errors.hpp"

namespace folsynth {

// Fixed relational signature for the whole engine: unary P, Q; binary R, S;
// variables x (free), y, z, w (bound); equality between variables. No
// constants or function symbols exist.
inline constexpr char kUnaryPreds[] = {'P', 'Q'};
inline constexpr char kBinaryPreds[] = {'R', 'S'};
inline constexpr char kVariables[] = {'x', 'y', 'z', 'w'};
inline constexpr char kFreeVar = 'x';

inline bool is_unary_pred(char c) { return c == 'P' || c == 'Q'; }
inline bool is_binary_pred(char c) { return c == 'R' || c == 'S'; }
inline bool is_variable(char c) { return c == 'x' || c == 'y' || c == 'z' || c == 'w'; }
inline int var_index(char v) { return v == 'x' ? 0 : v == 'y' ? 1 : v == 'z' ? 2 : 3; }

enum class FormulaKind {
  UnaryAtom,  // (P x)
  BinaryAtom, // (R x y)
  Equality,   // (= x y)
  Not,
  And, // n-ary, 2+ children, stored as written
  Or,  // n-ary, 2+ children, stored as written
  Forall,
  Exists,
};

class FormulaNode;
// Formulas are immutable shared trees; cheap to copy and safe to share
// across threads.
using Formula = std::shared_ptr<const FormulaNode>;

class FormulaNode {
public:
  FormulaKind kind;
  char pred = 0; // P/Q/R/S for atoms
  char var1 = 0; // atom argument 1, or the quantifier's bound variable
  char var2 = 0; // atom argument 2 (binary / equality)
  std::vector<Formula> children; // not: 1; and/or: 2+; quantifier: body only

  const Formula& body() const { return children.front(); }
};

Formula unary_atom(char pred, char var);
Formula binary_atom(char pred, char a, char b);
Formula equality(char a, char b);
Formula negation(Formula f);
Formula conjunction(std::vector<Formula> children);
Formula disjunction(std::vector<Formula> children);
Formula quantifier(FormulaKind kind, char bound, Formula body);

/// Parses a single S-expression formula. The whole text must be one
/// well-formed expression whose free variable set is exactly {x}; bound
/// variables come from {y,z,w} and may not rebind a name already in scope
/// (x counts as always in scope). Throws ParseError with the failing kind.
Formula parse(std::string_view text);

/// Canonical single-line rendering: lowercase heads, single spaces,
/// n-ary and/or in one list. parse(print(f)) == f structurally.
std::string print(const Formula& f);

/// Symbol count of the canonical rendering: every connective head,
/// quantifier head, predicate, binder variable and variable occurrence
/// counts 1. (P x) = 2, (R x y) = 3, (exists y (R x y)) = 5.
int ast_size(const Formula& f);

/// Maximum nesting depth of forall/exists; 0 when quantifier-free.
int quantifier_depth(const Formula& f);

enum class Family { A, B, C, D, F, G, H, M, Z, Oth };
std::string family_name(Family f);
Family family_from_name(std::string_view name);

/// First matching structural pattern in the fixed order
/// A,B,C,D,F,G,H,M,Z, else Oth. Matching is on the formula as written
/// (no predicate-renaming normalization). The B/C shapes exclude the
/// Z-filter consequent so Z stays reachable under this order.
Family classify_family(const Formula& f);

/// True iff a binary atom whose arguments include the free variable x
/// occurs within the scope of at least one universal quantifier.
bool is_lift_hard(const Formula& f);

/// All strict subtrees in preorder (duplicates preserved).
std::vector<Formula> proper_subformulas(const Formula& f);

std::set<char> free_variables(const Formula& f);
bool uses_equality(const Formula& f);
bool structurally_equal(const Formula& a, const Formula& b);

} // namespace folsynth
