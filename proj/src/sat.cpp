#include "folsynth/sat.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

namespace folsynth {

int SatSolver::add_var() {
  assign_.push_back(-1);
  watches_.push_back({});
  watches_.push_back({});
  return static_cast<int>(assign_.size());
}

bool SatSolver::lit_true(int lit) const {
  std::int8_t v = assign_[std::abs(lit) - 1];
  return v >= 0 && (v == 1) == (lit > 0);
}

bool SatSolver::lit_false(int lit) const {
  std::int8_t v = assign_[std::abs(lit) - 1];
  return v >= 0 && (v == 1) != (lit > 0);
}

void SatSolver::add_clause(std::vector<int> lits) {
  std::sort(lits.begin(), lits.end());
  lits.erase(std::unique(lits.begin(), lits.end()), lits.end());
  for (std::size_t i = 0; i + 1 < lits.size(); ++i) {
    if (lits[i] == -lits[i + 1]) return; // tautology
  }
  if (lits.empty()) {
    contradiction_ = true;
    return;
  }
  int id = static_cast<int>(clauses_.size());
  clauses_.push_back({std::move(lits)});
  const Clause& c = clauses_.back();
  watches_[lit_index(c.lits[0])].push_back(id);
  if (c.lits.size() > 1) {
    watches_[lit_index(c.lits[1])].push_back(id);
  }
}

void SatSolver::mark_decision(int var) {
  if (is_preferred_.size() < assign_.size()) is_preferred_.resize(assign_.size(), 0);
  if (!is_preferred_[var - 1]) {
    is_preferred_[var - 1] = 1;
    decision_order_.push_back(var);
  }
}

void SatSolver::enqueue(int lit, bool is_decision) {
  if (is_decision) {
    decision_trail_pos_.push_back(trail_.size());
    decision_flipped_.push_back(0);
  }
  assign_[std::abs(lit) - 1] = lit > 0 ? 1 : 0;
  trail_.push_back(lit);
}

bool SatSolver::propagate() {
  while (prop_head_ < trail_.size()) {
    int lit = trail_[prop_head_++];
    int falsified = -lit;
    std::vector<int>& wl = watches_[lit_index(falsified)];
    std::size_t keep = 0;
    for (std::size_t wi = 0; wi < wl.size(); ++wi) {
      int cid = wl[wi];
      Clause& c = clauses_[cid];
      if (c.lits.size() == 1) {
        // A watched unit clause whose literal just became false.
        for (; wi < wl.size(); ++wi) wl[keep++] = wl[wi];
        wl.resize(keep);
        return false;
      }
      // Make sure the falsified literal sits in slot 1.
      if (c.lits[0] == falsified) std::swap(c.lits[0], c.lits[1]);
      if (lit_true(c.lits[0])) {
        wl[keep++] = cid;
        continue;
      }
      bool moved = false;
      for (std::size_t k = 2; k < c.lits.size(); ++k) {
        if (!lit_false(c.lits[k])) {
          std::swap(c.lits[1], c.lits[k]);
          watches_[lit_index(c.lits[1])].push_back(cid);
          moved = true;
          break;
        }
      }
      if (moved) continue;
      // Unit or conflicting.
      wl[keep++] = cid;
      if (lit_false(c.lits[0])) {
        for (++wi; wi < wl.size(); ++wi) wl[keep++] = wl[wi];
        wl.resize(keep);
        return false;
      }
      enqueue(c.lits[0], false);
    }
    wl.resize(keep);
  }
  return true;
}

void SatSolver::undo_to(std::size_t trail_size) {
  while (trail_.size() > trail_size) {
    int lit = trail_.back();
    trail_.pop_back();
    assign_[std::abs(lit) - 1] = -1;
  }
  prop_head_ = trail_.size();
}

SatSolver::Result SatSolver::solve() {
  if (contradiction_) return Result::Unsat;
  auto started = std::chrono::steady_clock::now();

  // Seed propagation with unit clauses.
  for (const Clause& c : clauses_) {
    if (c.lits.size() == 1) {
      if (lit_false(c.lits[0])) return Result::Unsat;
      if (!lit_true(c.lits[0])) enqueue(c.lits[0], false);
    }
  }

  auto pick_unassigned = [&]() -> int {
    for (int v : decision_order_) {
      if (assign_[v - 1] < 0) return v;
    }
    for (std::size_t i = 0; i < assign_.size(); ++i) {
      if (assign_[i] < 0) return static_cast<int>(i) + 1;
    }
    return 0;
  };

  while (true) {
    if (!propagate()) {
      ++conflicts_;
      if (conflicts_ > conflict_limit_) {
        throw ResourceLimitError("conflict budget exceeded");
      }
      if ((conflicts_ & 0x3ff) == 0) {
        double elapsed = std::chrono::duration<double>(
                             std::chrono::steady_clock::now() - started)
                             .count();
        if (elapsed > time_limit_s_) {
          throw ResourceLimitError("time budget exceeded");
        }
      }
      // Backtrack to the deepest unflipped decision and flip it.
      while (true) {
        if (decision_trail_pos_.empty()) return Result::Unsat;
        std::size_t pos = decision_trail_pos_.back();
        int decided = trail_[pos];
        bool flipped = decision_flipped_.back() != 0;
        undo_to(pos);
        decision_trail_pos_.pop_back();
        decision_flipped_.pop_back();
        if (!flipped) {
          decision_trail_pos_.push_back(trail_.size());
          decision_flipped_.push_back(1);
          assign_[std::abs(decided) - 1] = decided > 0 ? 0 : 1;
          trail_.push_back(-decided);
          break;
        }
      }
      continue;
    }
    int v = pick_unassigned();
    if (v == 0) return Result::Sat;
    enqueue(-v, true); // try false first; inputs default to false
  }
}

bool SatSolver::value(int var) const {
  return assign_[var - 1] == 1;
}

void SatSolver::write_dimacs(std::ostream& os, const std::vector<std::string>& comments) const {
  for (const std::string& c : comments) {
    os << "c " << c << "\n";
  }
  os << "p cnf " << num_vars() << " " << (clauses_.size() + (contradiction_ ? 1 : 0))
     << "\n";
  if (contradiction_) os << "0\n";
  for (const Clause& c : clauses_) {
    for (int lit : c.lits) os << lit << " ";
    os << "0\n";
  }
}

void add_at_most_k(SatSolver& solver, const std::vector<int>& lits, int k) {
  int n = static_cast<int>(lits.size());
  if (k >= n) return;
  if (k <= 0) {
    for (int lit : lits) solver.add_clause({-lit});
    return;
  }
  // Sequential counter: s[i][j] <=> at least j of lits[0..i] are true.
  std::vector<std::vector<int>> s(n, std::vector<int>(k + 1, 0));
  for (int i = 0; i + 1 < n; ++i) {
    for (int j = 1; j <= k; ++j) s[i][j] = solver.add_var();
  }
  solver.add_clause({-lits[0], s[0][1]});
  for (int j = 2; j <= k; ++j) solver.add_clause({-s[0][j]});
  for (int i = 1; i + 1 < n; ++i) {
    solver.add_clause({-lits[i], s[i][1]});
    solver.add_clause({-s[i - 1][1], s[i][1]});
    for (int j = 2; j <= k; ++j) {
      solver.add_clause({-lits[i], -s[i - 1][j - 1], s[i][j]});
      solver.add_clause({-s[i - 1][j], s[i][j]});
    }
    solver.add_clause({-lits[i], -s[i - 1][k]});
  }
  solver.add_clause({-lits[n - 1], -s[n - 2][k]});
}

} // namespace folsynth
