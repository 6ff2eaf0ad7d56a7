#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "folsynth/errors.hpp"

namespace folsynth {

// Minimal complete Boolean satisfiability procedure: clause-form input,
// systematic search with two-watched-literal unit propagation and
// chronological backtracking. Built for the grounded-completion constraints
// of this engine (tens of decision inputs, a few thousand auxiliary gate
// variables), where clause learning buys nothing measurable.
//
// Decision order: variables registered via mark_decision first, in
// registration order, then everything else. Grounding marks the unknown-atom
// inputs, so once those are assigned the Tseitin gate variables follow by
// propagation alone.
class SatSolver {
public:
  // Variables are 1-based; literals are +v / -v.
  int add_var();
  int num_vars() const { return static_cast<int>(assign_.size()); }
  std::size_t num_clauses() const { return clauses_.size(); }

  // Empty clause makes the instance trivially unsatisfiable.
  void add_clause(std::vector<int> lits);
  void mark_decision(int var);

  void set_conflict_limit(long long limit) { conflict_limit_ = limit; }
  void set_time_limit(double seconds) { time_limit_s_ = seconds; }

  enum class Result { Sat, Unsat };
  // Throws ResourceLimitError when a budget is exceeded.
  Result solve();

  // Model access after Sat. Unconstrained variables read false.
  bool value(int var) const;

  long long conflicts() const { return conflicts_; }

  void write_dimacs(std::ostream& os, const std::vector<std::string>& comments) const;

private:
  struct Clause {
    std::vector<int> lits;
  };

  int lit_index(int lit) const { return 2 * (std::abs(lit) - 1) + (lit < 0 ? 1 : 0); }
  bool lit_true(int lit) const;
  bool lit_false(int lit) const;
  void enqueue(int lit, bool is_decision);
  bool propagate();
  void undo_to(std::size_t trail_size);

  std::vector<std::int8_t> assign_;           // -1 unset / 0 false / 1 true
  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;     // literal index -> clause ids
  std::vector<int> trail_;                    // assigned literals in order
  std::vector<std::size_t> decision_trail_pos_;
  std::vector<std::uint8_t> decision_flipped_;
  std::vector<int> decision_order_;
  std::vector<std::uint8_t> is_preferred_;
  std::size_t prop_head_ = 0;
  bool contradiction_ = false;

  long long conflicts_ = 0;
  long long conflict_limit_ = 10'000'000;
  double time_limit_s_ = 30.0;
};

// Sequential-counter at-most-k over the given literals.
void add_at_most_k(SatSolver& solver, const std::vector<int>& lits, int k);

} // namespace folsynth
