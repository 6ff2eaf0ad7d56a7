#include "folsynth/completion.hpp"

#include <algorithm>
#include <map>
#include <ostream>
#include <sstream>

namespace folsynth {

namespace {

// Circuit builder with constant folding. Nodes 0/1 are the constants.
class CircuitBuilder {
public:
  CircuitBuilder() {
    circuit_.nodes.push_back({BoolCircuit::Gate::ConstFalse, -1, {}});
    circuit_.nodes.push_back({BoolCircuit::Gate::ConstTrue, -1, {}});
  }

  int const_node(bool v) { return v ? 1 : 0; }

  int input(int index) {
    auto [it, inserted] = input_nodes_.try_emplace(index, -1);
    if (inserted || it->second < 0) {
      circuit_.nodes.push_back({BoolCircuit::Gate::Input, index, {}});
      it->second = static_cast<int>(circuit_.nodes.size()) - 1;
    }
    return it->second;
  }

  int mk_not(int a) {
    if (a == 0) return 1;
    if (a == 1) return 0;
    if (circuit_.nodes[a].gate == BoolCircuit::Gate::Not) return circuit_.nodes[a].kids[0];
    circuit_.nodes.push_back({BoolCircuit::Gate::Not, -1, {a}});
    return static_cast<int>(circuit_.nodes.size()) - 1;
  }

  int mk_and(std::vector<int> kids) { return mk_nary(BoolCircuit::Gate::And, std::move(kids)); }
  int mk_or(std::vector<int> kids) { return mk_nary(BoolCircuit::Gate::Or, std::move(kids)); }

  int mk_iff(int a, int b) {
    // (a and b) or (!a and !b)
    return mk_or({mk_and({a, b}), mk_and({mk_not(a), mk_not(b)})});
  }

  BoolCircuit finish(int root) {
    circuit_.root = root;
    return std::move(circuit_);
  }

private:
  int mk_nary(BoolCircuit::Gate gate, std::vector<int> kids) {
    bool is_and = gate == BoolCircuit::Gate::And;
    int absorbing = is_and ? 0 : 1;
    int neutral = is_and ? 1 : 0;
    std::vector<int> live;
    for (int k : kids) {
      if (k == absorbing) return absorbing;
      if (k == neutral) continue;
      live.push_back(k);
    }
    if (live.empty()) return neutral;
    if (live.size() == 1) return live[0];
    circuit_.nodes.push_back({gate, -1, std::move(live)});
    return static_cast<int>(circuit_.nodes.size()) - 1;
  }

  BoolCircuit circuit_;
  std::map<int, int> input_nodes_;
};

struct Grounder {
  const PartialWorld& pw;
  CircuitBuilder& builder;
  std::map<GroundAtom, int> atom_index;

  int atom_node(const GroundAtom& atom, Truth truth) {
    if (truth != Truth::Unknown) return builder.const_node(truth == Truth::True);
    return builder.input(atom_index.at(atom));
  }

  int eval(const FormulaNode* f, int env[4]) {
    switch (f->kind) {
      case FormulaKind::UnaryAtom: {
        int a = env[var_index(f->var1)];
        return atom_node({f->pred, a, -1}, pw.unary(f->pred, a));
      }
      case FormulaKind::BinaryAtom: {
        int a = env[var_index(f->var1)];
        int b = env[var_index(f->var2)];
        return atom_node({f->pred, a, b}, pw.binary(f->pred, a, b));
      }
      case FormulaKind::Equality:
        return builder.const_node(env[var_index(f->var1)] == env[var_index(f->var2)]);
      case FormulaKind::Not:
        return builder.mk_not(eval(f->children[0].get(), env));
      case FormulaKind::And:
      case FormulaKind::Or: {
        std::vector<int> kids;
        kids.reserve(f->children.size());
        for (const Formula& c : f->children) kids.push_back(eval(c.get(), env));
        return f->kind == FormulaKind::And ? builder.mk_and(std::move(kids))
                                           : builder.mk_or(std::move(kids));
      }
      case FormulaKind::Forall:
      case FormulaKind::Exists: {
        int slot = var_index(f->var1);
        int saved = env[slot];
        std::vector<int> kids;
        kids.reserve(pw.n);
        for (int e = 0; e < pw.n; ++e) {
          env[slot] = e;
          kids.push_back(eval(f->children[0].get(), env));
        }
        env[slot] = saved;
        return f->kind == FormulaKind::Forall ? builder.mk_and(std::move(kids))
                                              : builder.mk_or(std::move(kids));
      }
    }
    return 0;
  }
};

// Node id of "formula holds at a iff a in target" for every element.
std::vector<int> element_match_nodes(const Formula& f, const PartialWorld& pw,
                                     CircuitBuilder& builder,
                                     const std::vector<GroundAtom>& unknowns) {
  Grounder grounder{pw, builder, {}};
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    grounder.atom_index[unknowns[i]] = static_cast<int>(i);
  }
  std::vector<int> out;
  out.reserve(pw.n);
  for (int a = 0; a < pw.n; ++a) {
    int env[4] = {a, -1, -1, -1};
    int holds = grounder.eval(f.get(), env);
    out.push_back(builder.mk_iff(holds, builder.const_node(pw.target[a] != 0)));
  }
  return out;
}

// Tseitin translation. Returns the literal equivalent to a circuit node;
// every input gets its solver variable up front (registered as decisions) so
// witnesses stay total even over inputs the circuit folded away.
class Tseitin {
public:
  Tseitin(SatSolver& solver, const BoolCircuit& circuit, int num_inputs)
      : solver_(solver), circuit_(circuit), node_lit_(circuit.nodes.size(), 0) {
    input_var_.resize(num_inputs);
    for (int i = 0; i < num_inputs; ++i) {
      input_var_[i] = solver_.add_var();
      solver_.mark_decision(input_var_[i]);
    }
    true_var_ = solver_.add_var();
    solver_.add_clause({true_var_});
  }

  int input_var(int i) const { return input_var_[i]; }

  int lit_of(int node) {
    if (node_lit_[node] != 0) return node_lit_[node];
    const BoolCircuit::Node& n = circuit_.nodes[node];
    int lit = 0;
    switch (n.gate) {
      case BoolCircuit::Gate::ConstFalse:
        lit = -true_var_;
        break;
      case BoolCircuit::Gate::ConstTrue:
        lit = true_var_;
        break;
      case BoolCircuit::Gate::Input:
        lit = input_var_[n.input];
        break;
      case BoolCircuit::Gate::Not:
        lit = -lit_of(n.kids[0]);
        break;
      case BoolCircuit::Gate::And:
      case BoolCircuit::Gate::Or: {
        std::vector<int> kids;
        kids.reserve(n.kids.size());
        for (int k : n.kids) kids.push_back(lit_of(k));
        int g = solver_.add_var();
        bool is_and = n.gate == BoolCircuit::Gate::And;
        std::vector<int> big;
        big.reserve(kids.size() + 1);
        big.push_back(is_and ? g : -g);
        for (int k : kids) {
          if (is_and) {
            solver_.add_clause({-g, k});
            big.push_back(-k);
          } else {
            solver_.add_clause({g, -k});
            big.push_back(k);
          }
        }
        solver_.add_clause(std::move(big));
        lit = g;
        break;
      }
    }
    node_lit_[node] = lit;
    return lit;
  }

private:
  SatSolver& solver_;
  const BoolCircuit& circuit_;
  std::vector<int> node_lit_;
  std::vector<int> input_var_;
  int true_var_ = 0;
};

void apply_budget(SatSolver& solver, const SolveBudget& budget) {
  solver.set_conflict_limit(budget.conflict_limit);
  solver.set_time_limit(budget.time_limit_s);
}

} // namespace

GroundedConstraint ground(const Formula& f, const PartialWorld& pw) {
  GroundedConstraint gc;
  gc.unknown_atoms = pw.unknown_atoms();
  CircuitBuilder builder;
  std::vector<int> match = element_match_nodes(f, pw, builder, gc.unknown_atoms);
  gc.circuit = builder.finish(builder.mk_and(std::move(match)));
  return gc;
}

EcVerdict ec_valid_world(const Formula& f, const PartialWorld& pw, SolveBudget budget) {
  GroundedConstraint gc = ground(f, pw);
  if (gc.circuit.is_constant()) {
    if (!gc.circuit.constant_value()) return {false, std::nullopt};
    // Any completion works; report the all-false one.
    return {true, CompletionWitness(gc.unknown_atoms.size(), 0)};
  }
  SatSolver solver;
  apply_budget(solver, budget);
  Tseitin tseitin(solver, gc.circuit, gc.variable_count());
  solver.add_clause({tseitin.lit_of(gc.circuit.root)});
  if (solver.solve() == SatSolver::Result::Unsat) return {false, std::nullopt};
  CompletionWitness witness(gc.unknown_atoms.size(), 0);
  for (int i = 0; i < gc.variable_count(); ++i) {
    witness[i] = solver.value(tseitin.input_var(i)) ? 1 : 0;
  }
  return {true, std::move(witness)};
}

bool ec_valid_instance(const Formula& f, std::span<const PartialWorld> worlds,
                       SolveBudget budget) {
  for (const PartialWorld& pw : worlds) {
    if (!ec_valid_world(f, pw, budget).valid) return false;
  }
  return true;
}

int min_mismatch(const Formula& f, const PartialWorld& pw, SolveBudget budget) {
  std::vector<GroundAtom> unknowns = pw.unknown_atoms();
  CircuitBuilder builder;
  std::vector<int> match = element_match_nodes(f, pw, builder, unknowns);
  BoolCircuit circuit = builder.finish(builder.const_node(true));

  for (int k = 0; k <= pw.n; ++k) {
    SatSolver solver;
    apply_budget(solver, budget);
    Tseitin tseitin(solver, circuit, static_cast<int>(unknowns.size()));
    std::vector<int> relax;
    relax.reserve(match.size());
    for (int node : match) {
      int r = solver.add_var();
      relax.push_back(r);
      solver.add_clause({tseitin.lit_of(node), r});
    }
    add_at_most_k(solver, relax, k);
    if (solver.solve() == SatSolver::Result::Sat) return k;
  }
  return pw.n; // unreachable: k = n relaxes every element
}

World apply_witness(const PartialWorld& pw, const CompletionWitness& witness) {
  std::vector<GroundAtom> unknowns = pw.unknown_atoms();
  World w = pw.complete_all(false);
  for (std::size_t i = 0; i < unknowns.size(); ++i) {
    const GroundAtom& atom = unknowns[i];
    bool v = witness[i] != 0;
    if (atom.b < 0) {
      w.set_unary(atom.pred, atom.a, v);
    } else {
      w.set_binary(atom.pred, atom.a, atom.b, v);
    }
  }
  w.target = pw.target;
  return w;
}

void write_dimacs(std::ostream& os, const Formula& f, const PartialWorld& pw) {
  GroundedConstraint gc = ground(f, pw);
  SatSolver solver;
  Tseitin tseitin(solver, gc.circuit, gc.variable_count());
  solver.add_clause({tseitin.lit_of(gc.circuit.root)});
  std::vector<std::string> comments;
  comments.push_back("grounded completion constraint for: " + print(f));
  for (int i = 0; i < gc.variable_count(); ++i) {
    const GroundAtom& atom = gc.unknown_atoms[i];
    std::ostringstream line;
    line << "var " << tseitin.input_var(i) << " = " << atom.pred << "(a" << atom.a;
    if (atom.b >= 0) line << ",a" << atom.b;
    line << ")";
    comments.push_back(line.str());
  }
  solver.write_dimacs(os, comments);
}

} // namespace folsynth
