#include "folsynth/instance.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

namespace folsynth {

using ordered_json = nlohmann::ordered_json;

std::string task_name(Task t) {
  switch (t) {
    case Task::FullObs: return "fullobs";
    case Task::CI: return "ci";
    case Task::EC: return "ec";
  }
  return "fullobs";
}

Task task_from_name(std::string_view name) {
  if (name == "fullobs") return Task::FullObs;
  if (name == "ci") return Task::CI;
  if (name == "ec") return Task::EC;
  throw FormatError("unknown task '" + std::string(name) + "'");
}

std::string role_name(WorldRole r) {
  switch (r) {
    case WorldRole::Train: return "train";
    case WorldRole::Yes: return "yes";
    case WorldRole::No: return "no";
  }
  return "train";
}

WorldRole role_from_name(std::string_view name) {
  if (name == "train") return WorldRole::Train;
  if (name == "yes") return WorldRole::Yes;
  if (name == "no") return WorldRole::No;
  throw FormatError("unknown world role '" + std::string(name) + "'");
}

std::vector<World> ProblemInstance::full_worlds(WorldRole role) const {
  std::vector<World> out;
  for (const InstanceWorld& iw : worlds) {
    if (iw.role == role) out.push_back(iw.full());
  }
  return out;
}

std::vector<World> ProblemInstance::full_train_worlds() const {
  return full_worlds(WorldRole::Train);
}

std::vector<PartialWorld> ProblemInstance::partial_worlds() const {
  std::vector<PartialWorld> out;
  for (const InstanceWorld& iw : worlds) out.push_back(iw.world);
  return out;
}

namespace {

ordered_json atoms_unary(const std::vector<Truth>& layer) {
  ordered_json arr = ordered_json::array();
  for (std::size_t i = 0; i < layer.size(); ++i) {
    if (layer[i] == Truth::True) arr.push_back(i);
  }
  return arr;
}

ordered_json atoms_binary(const std::vector<Truth>& layer, int n) {
  ordered_json arr = ordered_json::array();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (layer[static_cast<std::size_t>(i) * n + j] == Truth::True) {
        arr.push_back(ordered_json::array({i, j}));
      }
    }
  }
  return arr;
}

ordered_json atom_to_json(const GroundAtom& atom) {
  ordered_json a = ordered_json::array();
  a.push_back(std::string(1, atom.pred));
  a.push_back(atom.a);
  if (atom.b >= 0) a.push_back(atom.b);
  return a;
}

GroundAtom atom_from_json(const ordered_json& j) {
  GroundAtom atom;
  std::string pred = j.at(0).get<std::string>();
  if (pred.size() != 1) throw FormatError("bad atom predicate");
  atom.pred = pred[0];
  atom.a = j.at(1).get<int>();
  atom.b = j.size() > 2 ? j.at(2).get<int>() : -1;
  bool unary = is_unary_pred(atom.pred);
  if ((unary && atom.b >= 0) || (!unary && atom.b < 0)) {
    throw FormatError("atom arity does not match predicate");
  }
  return atom;
}

ordered_json world_to_json(const InstanceWorld& iw) {
  const PartialWorld& pw = iw.world;
  ordered_json w;
  w["role"] = role_name(iw.role);
  w["domain_size"] = pw.n;
  w["P"] = atoms_unary(pw.p);
  w["Q"] = atoms_unary(pw.q);
  w["R"] = atoms_binary(pw.r, pw.n);
  w["S"] = atoms_binary(pw.s, pw.n);
  ordered_json unknown = ordered_json::array();
  for (const GroundAtom& atom : pw.unknown_atoms()) unknown.push_back(atom_to_json(atom));
  w["unknown"] = unknown;
  ordered_json target = ordered_json::array();
  for (int i = 0; i < pw.n; ++i) {
    if (pw.target[i]) target.push_back(i);
  }
  w["target_true"] = target;
  return w;
}

InstanceWorld world_from_json(const ordered_json& j) {
  InstanceWorld iw;
  iw.role = role_from_name(j.at("role").get<std::string>());
  int n = j.at("domain_size").get<int>();
  if (n <= 0 || n > 64) throw FormatError("domain_size out of range");
  PartialWorld pw;
  pw.n = n;
  pw.p.assign(n, Truth::False);
  pw.q.assign(n, Truth::False);
  pw.r.assign(static_cast<std::size_t>(n) * n, Truth::False);
  pw.s.assign(static_cast<std::size_t>(n) * n, Truth::False);
  pw.target.assign(n, 0);
  auto check = [n](int v) {
    if (v < 0 || v >= n) throw FormatError("element index out of range");
    return v;
  };
  for (const auto& e : j.at("P")) pw.p[check(e.get<int>())] = Truth::True;
  for (const auto& e : j.at("Q")) pw.q[check(e.get<int>())] = Truth::True;
  for (const auto& e : j.at("R")) {
    pw.r[static_cast<std::size_t>(check(e.at(0).get<int>())) * n +
         check(e.at(1).get<int>())] = Truth::True;
  }
  for (const auto& e : j.at("S")) {
    pw.s[static_cast<std::size_t>(check(e.at(0).get<int>())) * n +
         check(e.at(1).get<int>())] = Truth::True;
  }
  for (const auto& e : j.at("unknown")) {
    GroundAtom atom = atom_from_json(e);
    check(atom.a);
    if (atom.b >= 0) check(atom.b);
    if (atom.pred == 'P') pw.p[atom.a] = Truth::Unknown;
    else if (atom.pred == 'Q') pw.q[atom.a] = Truth::Unknown;
    else if (atom.pred == 'R') pw.r[static_cast<std::size_t>(atom.a) * n + atom.b] = Truth::Unknown;
    else if (atom.pred == 'S') pw.s[static_cast<std::size_t>(atom.a) * n + atom.b] = Truth::Unknown;
    else throw FormatError("unknown predicate in unknown-atom list");
  }
  for (const auto& e : j.at("target_true")) pw.target[check(e.get<int>())] = 1;
  iw.world = std::move(pw);
  return iw;
}

ordered_json diagnostics_to_json(const InstanceDiagnostics& d) {
  ordered_json j;
  j["kill_counts"] = d.kill_counts;
  j["survivor_history"] = d.survivor_history;
  j["survivors_after_yes"] = d.survivors_after_yes;
  j["no_world_trap"] = d.no_world_trap;
  ordered_json premask = ordered_json::array();
  for (const auto& world_atoms : d.premask_true) {
    ordered_json arr = ordered_json::array();
    for (const GroundAtom& atom : world_atoms) arr.push_back(atom_to_json(atom));
    premask.push_back(arr);
  }
  j["premask_true"] = premask;
  j["attempts"] = d.attempts;
  return j;
}

InstanceDiagnostics diagnostics_from_json(const ordered_json& j) {
  InstanceDiagnostics d;
  d.kill_counts = j.at("kill_counts").get<std::vector<int>>();
  d.survivor_history = j.at("survivor_history").get<std::vector<int>>();
  d.survivors_after_yes = j.at("survivors_after_yes").get<std::vector<std::string>>();
  d.no_world_trap = j.at("no_world_trap").get<std::vector<std::string>>();
  for (const auto& world_atoms : j.at("premask_true")) {
    std::vector<GroundAtom> atoms;
    for (const auto& e : world_atoms) atoms.push_back(atom_from_json(e));
    d.premask_true.push_back(std::move(atoms));
  }
  d.attempts = j.at("attempts").get<int>();
  return d;
}

} // namespace

std::string serialize_instance(const ProblemInstance& instance) {
  ordered_json j;
  j["task"] = task_name(instance.task);
  j["band"] = instance.band;
  j["instance_id"] = instance.id;
  j["seed"] = instance.seed;
  j["gold_formula"] = instance.gold.text;
  j["gold_ast"] = instance.gold.ast;
  j["gold_qd"] = instance.gold.qd;
  j["family"] = family_name(instance.gold.family);
  j["lift_hard"] = instance.gold.lift_hard;
  ordered_json worlds = ordered_json::array();
  for (const InstanceWorld& iw : instance.worlds) worlds.push_back(world_to_json(iw));
  j["worlds"] = worlds;
  j["diagnostics"] = diagnostics_to_json(instance.diagnostics);
  return j.dump();
}

ProblemInstance deserialize_instance(std::string_view bytes) {
  ordered_json j;
  try {
    j = ordered_json::parse(bytes);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed instance document: ") + e.what());
  }
  try {
    ProblemInstance inst;
    inst.task = task_from_name(j.at("task").get<std::string>());
    inst.band = j.at("band").get<std::string>();
    inst.id = j.at("instance_id").get<std::string>();
    inst.seed = j.at("seed").get<std::uint64_t>();
    inst.gold = make_template(parse(j.at("gold_formula").get<std::string>()));
    if (inst.gold.ast != j.at("gold_ast").get<int>() ||
        inst.gold.qd != j.at("gold_qd").get<int>()) {
      throw FormatError("gold measurements disagree with the stored formula");
    }
    for (const auto& w : j.at("worlds")) inst.worlds.push_back(world_from_json(w));
    inst.diagnostics = diagnostics_from_json(j.at("diagnostics"));
    return inst;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed instance document: ") + e.what());
  } catch (const ParseError& e) {
    throw FormatError(std::string("bad gold formula: ") + e.what());
  }
}

void write_instances(std::ostream& os, const std::vector<ProblemInstance>& instances) {
  for (const ProblemInstance& inst : instances) {
    os << serialize_instance(inst) << "\n";
  }
}

std::vector<ProblemInstance> read_instances(std::istream& is) {
  std::vector<ProblemInstance> out;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    out.push_back(deserialize_instance(line));
  }
  return out;
}

std::vector<ProblemInstance> load_instances(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open instances file: " + path);
  return read_instances(in);
}

std::string serialize_holdout(const HoldoutSet& h) {
  ordered_json j;
  j["instance_id"] = h.instance_id;
  ordered_json worlds = ordered_json::array();
  for (const InstanceWorld& iw : h.worlds) worlds.push_back(world_to_json(iw));
  j["worlds"] = worlds;
  return j.dump();
}

HoldoutSet deserialize_holdout(std::string_view bytes) {
  try {
    ordered_json j = ordered_json::parse(bytes);
    HoldoutSet h;
    h.instance_id = j.at("instance_id").get<std::string>();
    for (const auto& w : j.at("worlds")) h.worlds.push_back(world_from_json(w));
    return h;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed holdout document: ") + e.what());
  }
}

std::vector<HoldoutSet> load_holdouts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open holdout file: " + path);
  std::vector<HoldoutSet> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(deserialize_holdout(line));
  }
  return out;
}

} // namespace folsynth
