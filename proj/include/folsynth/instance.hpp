#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "folsynth/pool.hpp"
#include "folsynth/world.hpp"

namespace folsynth {

enum class Task { FullObs, CI, EC };
std::string task_name(Task t);
Task task_from_name(std::string_view name);

enum class WorldRole { Train, Yes, No };
std::string role_name(WorldRole r);
WorldRole role_from_name(std::string_view name);

// One world of an instance. FullObs and CI worlds carry no unknown atoms;
// EC worlds are genuinely partial.
struct InstanceWorld {
  WorldRole role = WorldRole::Train;
  PartialWorld world;

  static InstanceWorld from_world(WorldRole role, const World& w) {
    return {role, PartialWorld::from_world(w)};
  }
  World full() const { return world.to_world(); } // requires no unknowns
};

// Generation-time evidence kept with the instance for audit, invariant
// re-checks and CI holdout construction.
struct InstanceDiagnostics {
  std::vector<int> kill_counts;                  // per accepted world
  std::vector<int> survivor_history;             // survivors after each YES world
  std::vector<std::string> survivors_after_yes;  // trap texts still alive
  std::vector<std::string> no_world_trap;        // designated trap per NO world
  std::vector<std::vector<GroundAtom>> premask_true; // per world: unknowns true pre-mask
  int attempts = 0;
};

struct ProblemInstance {
  Task task = Task::FullObs;
  std::string band;
  std::string id;
  std::uint64_t seed = 0;
  Template gold;
  std::vector<InstanceWorld> worlds;
  InstanceDiagnostics diagnostics;

  std::vector<World> full_worlds(WorldRole role) const;
  std::vector<World> full_train_worlds() const; // role train, fully known
  std::vector<PartialWorld> partial_worlds() const;
};

/// Canonical one-line JSON document: stable field order, sorted atom lists,
/// byte-identical across runs for the same content.
std::string serialize_instance(const ProblemInstance& instance);

/// Throws FormatError on malformed or truncated input.
ProblemInstance deserialize_instance(std::string_view bytes);

void write_instances(std::ostream& os, const std::vector<ProblemInstance>& instances);
std::vector<ProblemInstance> read_instances(std::istream& is);
std::vector<ProblemInstance> load_instances(const std::string& path);

// Holdout sets travel in a separate file keyed by instance id.
struct HoldoutSet {
  std::string instance_id;
  std::vector<InstanceWorld> worlds;
};

std::string serialize_holdout(const HoldoutSet& h);
HoldoutSet deserialize_holdout(std::string_view bytes);
std::vector<HoldoutSet> load_holdouts(const std::string& path);

} // namespace folsynth
