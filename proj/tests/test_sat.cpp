#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "folsynth/rng.hpp"
#include "folsynth/sat.hpp"

using namespace folsynth;

TEST_CASE("trivial sat and unsat") {
  {
    SatSolver s;
    int a = s.add_var();
    s.add_clause({a});
    CHECK(s.solve() == SatSolver::Result::Sat);
    CHECK(s.value(a));
  }
  {
    SatSolver s;
    int a = s.add_var();
    s.add_clause({a});
    s.add_clause({-a});
    CHECK(s.solve() == SatSolver::Result::Unsat);
  }
  {
    SatSolver s;
    s.add_clause({});
    CHECK(s.solve() == SatSolver::Result::Unsat);
  }
}

TEST_CASE("propagation chains") {
  SatSolver s;
  int a = s.add_var(), b = s.add_var(), c = s.add_var(), d = s.add_var();
  s.add_clause({a});
  s.add_clause({-a, b});
  s.add_clause({-b, c});
  s.add_clause({-c, d});
  CHECK(s.solve() == SatSolver::Result::Sat);
  CHECK(s.value(a));
  CHECK(s.value(b));
  CHECK(s.value(c));
  CHECK(s.value(d));
}

TEST_CASE("pigeonhole 3 into 2 is unsat") {
  SatSolver s;
  // p[i][j]: pigeon i in hole j.
  int p[3][2];
  for (auto& row : p) {
    for (int& v : row) v = s.add_var();
  }
  for (auto& row : p) s.add_clause({row[0], row[1]});
  for (int j = 0; j < 2; ++j) {
    for (int i = 0; i < 3; ++i) {
      for (int k = i + 1; k < 3; ++k) {
        s.add_clause({-p[i][j], -p[k][j]});
      }
    }
  }
  CHECK(s.solve() == SatSolver::Result::Unsat);
}

TEST_CASE("random 3-sat instances agree with brute force") {
  Rng rng(77);
  for (int trial = 0; trial < 300; ++trial) {
    int nv = 3 + static_cast<int>(rng.below(8));
    int nc = 2 + static_cast<int>(rng.below(30));
    std::vector<std::vector<int>> clauses;
    SatSolver s;
    for (int v = 0; v < nv; ++v) s.add_var();
    for (int c = 0; c < nc; ++c) {
      std::vector<int> cl;
      int len = 1 + static_cast<int>(rng.below(3));
      for (int l = 0; l < len; ++l) {
        int var = 1 + static_cast<int>(rng.below(nv));
        cl.push_back(rng.bernoulli(0.5) ? var : -var);
      }
      clauses.push_back(cl);
      s.add_clause(cl);
    }
    bool brute_sat = false;
    for (int bits = 0; bits < (1 << nv) && !brute_sat; ++bits) {
      bool ok = true;
      for (const auto& cl : clauses) {
        bool any = false;
        for (int lit : cl) {
          bool val = (bits >> (std::abs(lit) - 1)) & 1;
          if ((lit > 0) == val) {
            any = true;
            break;
          }
        }
        if (!any) {
          ok = false;
          break;
        }
      }
      brute_sat = ok;
    }
    bool solver_sat = s.solve() == SatSolver::Result::Sat;
    REQUIRE(solver_sat == brute_sat);
    if (solver_sat) {
      for (const auto& cl : clauses) {
        bool any = false;
        for (int lit : cl) {
          if (s.value(std::abs(lit)) == (lit > 0)) any = true;
        }
        REQUIRE(any); // model actually satisfies every clause
      }
    }
  }
}

TEST_CASE("at-most-k sequential counter") {
  Rng rng(78);
  for (int trial = 0; trial < 200; ++trial) {
    int n = 2 + static_cast<int>(rng.below(6));
    int k = static_cast<int>(rng.below(n + 1));
    int forced = static_cast<int>(rng.below(n + 1));
    SatSolver s;
    std::vector<int> lits;
    for (int i = 0; i < n; ++i) lits.push_back(s.add_var());
    add_at_most_k(s, lits, k);
    for (int i = 0; i < forced; ++i) s.add_clause({lits[i]});
    bool expect = forced <= k;
    CHECK((s.solve() == SatSolver::Result::Sat) == expect);
    if (expect) {
      int trues = 0;
      for (int v : lits) trues += s.value(v) ? 1 : 0;
      CHECK(trues <= k);
    }
  }
}

TEST_CASE("conflict budget raises ResourceLimitError") {
  SatSolver s;
  // Hard pigeonhole: 6 pigeons, 5 holes, with a conflict budget of 1.
  std::vector<std::vector<int>> p(6, std::vector<int>(5));
  for (auto& row : p) {
    for (int& v : row) v = s.add_var();
  }
  for (auto& row : p) {
    std::vector<int> cl(row.begin(), row.end());
    s.add_clause(cl);
  }
  for (int j = 0; j < 5; ++j) {
    for (int i = 0; i < 6; ++i) {
      for (int k = i + 1; k < 6; ++k) {
        s.add_clause({-p[i][j], -p[k][j]});
      }
    }
  }
  s.set_conflict_limit(1);
  CHECK_THROWS_AS(s.solve(), ResourceLimitError);
}

TEST_CASE("dimacs output shape") {
  SatSolver s;
  int a = s.add_var(), b = s.add_var();
  s.add_clause({a, -b});
  std::ostringstream os;
  s.write_dimacs(os, {"hello"});
  CHECK(os.str() == "c hello\np cnf 2 1\n-2 1 0\n"); // clauses store sorted literals
}
