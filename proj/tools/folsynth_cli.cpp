// Command-line front end for the concept-synthesis benchmark engine:
// generate -> holdout -> render -> solve -> evaluate -> report.

#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "folsynth/completion.hpp"
#include "folsynth/evaluate.hpp"
#include "folsynth/generate.hpp"
#include "folsynth/harness.hpp"
#include "folsynth/pool.hpp"

using namespace folsynth;
using ordered_json = nlohmann::ordered_json;

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open output file: " + path);
  return out;
}

BandConfig resolve_band(const std::string& task, const std::string& band,
                        const std::string& bands_path) {
  Task t = task_from_name(task);
  if (!bands_path.empty()) {
    for (const BandConfig& b : load_bands_file(bands_path)) {
      if (b.task == t && b.name == band) return b;
    }
    throw FormatError("band '" + band + "' not present in " + bands_path);
  }
  return find_band(t, band);
}

int cmd_generate(const std::string& task, const std::string& band, int count,
                 std::uint64_t seed, const std::string& out_path,
                 const std::string& bands_path, const std::string& manifest_path,
                 const std::string& pool_manifest_path) {
  BandConfig config = resolve_band(task, band, bands_path);
  GenerationResult result = generate_corpus(config, count, seed);
  {
    std::ofstream out = open_out(out_path);
    write_instances(out, result.instances);
  }
  if (!manifest_path.empty()) {
    ordered_json m;
    m["task"] = task;
    m["band"] = band;
    m["count_requested"] = count;
    m["count_generated"] = result.instances.size();
    m["seed"] = seed;
    ordered_json ids = ordered_json::array();
    for (const ProblemInstance& inst : result.instances) {
      ordered_json e;
      e["instance_id"] = inst.id;
      e["seed"] = inst.seed;
      e["gold_formula"] = inst.gold.text;
      e["attempts"] = inst.diagnostics.attempts;
      ids.push_back(e);
    }
    m["instances"] = ids;
    ordered_json fails = ordered_json::object();
    for (const auto& [key, n] : result.failure_counts) fails[key] = n;
    m["failure_counts"] = fails;
    std::ofstream mout = open_out(manifest_path);
    mout << m.dump(2) << "\n";
  }
  if (!pool_manifest_path.empty()) {
    std::vector<Template> golds;
    std::set<std::string> seen;
    for (const ProblemInstance& inst : result.instances) {
      if (seen.insert(inst.gold.text).second) golds.push_back(inst.gold);
    }
    FrozenPool pool = build_frozen_pool(golds, Rng::derive(seed, 0xf00d));
    std::ofstream pout = open_out(pool_manifest_path);
    write_pool_manifest(pout, pool);
  }
  int missing = count - static_cast<int>(result.instances.size());
  if (missing > 0) {
    std::ostringstream fails;
    for (const auto& [key, n] : result.failure_counts) fails << " " << key << "=" << n;
    std::cerr << "warning: " << missing << "/" << count
              << " instances abandoned; failure histogram:" << fails.str() << "\n";
  }
  std::cerr << "generated " << result.instances.size() << " instances -> " << out_path
            << "\n";
  return 0;
}

int cmd_holdout(const std::string& in_path, const std::string& out_path, std::uint64_t seed,
                const std::string& bands_path) {
  std::vector<ProblemInstance> instances = load_instances(in_path);
  std::ofstream out = open_out(out_path);
  for (const ProblemInstance& inst : instances) {
    BandConfig band = resolve_band(task_name(inst.task), inst.band, bands_path);
    HoldoutSet h = gen_holdout(inst, band, seed);
    out << serialize_holdout(h) << "\n";
  }
  std::cerr << "holdout sets for " << instances.size() << " instances -> " << out_path
            << "\n";
  return 0;
}

int cmd_render(const std::string& in_path, const std::string& out_path) {
  std::vector<ProblemInstance> instances = load_instances(in_path);
  std::ofstream out = open_out(out_path);
  for (const ProblemInstance& inst : instances) {
    ordered_json j;
    j["instance_id"] = inst.id;
    j["task"] = task_name(inst.task);
    j["prompt"] = render_prompt(inst);
    out << j.dump() << "\n";
  }
  std::cerr << "rendered " << instances.size() << " prompts -> " << out_path << "\n";
  return 0;
}

int cmd_solve(const std::string& in_path, const std::string& out_path, bool baseline,
              const std::string& adapter, const std::string& model_name, int max_attempts,
              double backoff) {
  std::vector<ProblemInstance> instances = load_instances(in_path);
  std::ofstream out = open_out(out_path);
  if (baseline) {
    std::vector<Template> golds;
    std::set<std::string> seen;
    for (const ProblemInstance& inst : instances) {
      if (seen.insert(inst.gold.text).second) golds.push_back(inst.gold);
    }
    // The baseline enumerates the same frozen pool the generator tracked,
    // plus the template pool; it never peeks at the instance's gold.
    FrozenPool pool = build_frozen_pool(golds, 0xba5e);
    std::vector<Template> candidates = baseline_candidates(pool);
    for (const ProblemInstance& inst : instances) {
      Prediction p = baseline_solve(inst, candidates);
      p.model = model_name.empty() ? "baseline" : model_name;
      out << serialize_prediction(p) << "\n";
    }
    std::cerr << "baseline-solved " << instances.size() << " instances -> " << out_path
              << "\n";
    return 0;
  }
  std::vector<SolverRequest> requests;
  for (const ProblemInstance& inst : instances) {
    requests.push_back({inst.id, inst.task, render_prompt(inst)});
  }
  RetryPolicy policy;
  policy.max_attempts = max_attempts;
  policy.initial_backoff_s = backoff;
  std::vector<SolverResponse> responses = run_external_solver(requests, adapter, policy);
  for (const SolverResponse& resp : responses) {
    Prediction p = resp.missing ? Prediction{} : extract_formula(resp.raw_text);
    p.instance_id = resp.instance_id;
    p.model = model_name.empty() ? "adapter" : model_name;
    p.latency_ms = resp.latency_ms;
    p.attempts = resp.attempts;
    if (resp.missing) {
      p.status = PredStatus::Missing;
      p.raw_text = "";
    }
    out << serialize_prediction(p) << "\n";
  }
  std::cerr << "adapter-solved " << responses.size() << " instances -> " << out_path
            << "\n";
  return 0;
}

int cmd_evaluate(const std::string& instances_path, const std::string& predictions_path,
                 const std::string& holdout_path, const std::string& out_path) {
  std::vector<ProblemInstance> instances = load_instances(instances_path);
  std::vector<Prediction> predictions = load_predictions(predictions_path);
  std::map<std::string, const ProblemInstance*> by_id;
  for (const ProblemInstance& inst : instances) by_id[inst.id] = &inst;
  std::map<std::string, const HoldoutSet*> holdout_by_id;
  std::vector<HoldoutSet> holdouts;
  if (!holdout_path.empty()) {
    holdouts = load_holdouts(holdout_path);
    for (const HoldoutSet& h : holdouts) holdout_by_id[h.instance_id] = &h;
  }
  std::ofstream out = open_out(out_path);
  int evaluated = 0;
  for (const Prediction& stored : predictions) {
    auto it = by_id.find(stored.instance_id);
    if (it == by_id.end()) {
      throw FormatError("prediction references unknown instance id: " + stored.instance_id);
    }
    // Re-extract from the raw response so raw_text stays the single source
    // of truth; a stored missing status wins (no response artifact exists).
    Prediction p = stored.status == PredStatus::Missing ? stored
                                                        : extract_formula(stored.raw_text);
    p.instance_id = stored.instance_id;
    p.model = stored.model;
    EvalRecord rec = evaluate_prediction(*it->second, p);
    if (p.status == PredStatus::Ok) {
      auto hit = holdout_by_id.find(stored.instance_id);
      if (hit != holdout_by_id.end()) {
        rec.holdout = holdout_generalization(*it->second, p.formula, hit->second->worlds);
      }
    }
    out << serialize_record(rec) << "\n";
    ++evaluated;
  }
  std::cerr << "evaluated " << evaluated << " predictions -> " << out_path << "\n";
  return 0;
}

int cmd_report(const std::string& eval_path, const std::string& instances_path,
               const std::string& format, const std::string& out_path,
               std::uint64_t bootstrap_seed) {
  std::vector<EvalRecord> records = load_records(eval_path);
  std::vector<ProblemInstance> instances;
  if (!instances_path.empty()) instances = load_instances(instances_path);
  std::string text = format == "table"
                         ? report_to_table(records, instances, bootstrap_seed)
                         : report_to_json(records, instances, bootstrap_seed);
  if (out_path.empty()) {
    std::cout << text << "\n";
  } else {
    std::ofstream out = open_out(out_path);
    out << text << "\n";
  }
  return 0;
}

int cmd_dimacs(const std::string& instances_path, const std::string& id, int world_index,
               const std::string& formula_text, const std::string& out_path) {
  std::vector<ProblemInstance> instances = load_instances(instances_path);
  for (const ProblemInstance& inst : instances) {
    if (inst.id != id) continue;
    if (world_index < 0 || world_index >= static_cast<int>(inst.worlds.size())) {
      throw FormatError("world index out of range");
    }
    Formula f = formula_text.empty() ? inst.gold.formula : parse(formula_text);
    if (out_path.empty()) {
      write_dimacs(std::cout, f, inst.worlds[world_index].world);
    } else {
      std::ofstream out = open_out(out_path);
      write_dimacs(out, f, inst.worlds[world_index].world);
    }
    return 0;
  }
  throw FormatError("instance id not found: " + id);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"finite-structure first-order concept-synthesis benchmark engine"};
  app.require_subcommand(1);

  std::string task = "fullobs", band = "simple", bands_path, out_path, in_path;
  std::string manifest_path, pool_manifest_path;
  int count = 20;
  std::uint64_t seed = 0;

  auto* generate = app.add_subcommand("generate", "generate a benchmark corpus");
  generate->add_option("--task", task, "fullobs|ci|ec")->required();
  generate->add_option("--band", band, "band name (e.g. simple, core, hard)")->required();
  generate->add_option("--count", count, "instances to generate")->required();
  generate->add_option("--seed", seed, "corpus seed")->required();
  generate->add_option("--out", out_path, "output instances JSONL")->required();
  generate->add_option("--bands", bands_path, "bands configuration file (JSON)");
  generate->add_option("--manifest", manifest_path, "generation manifest output");
  generate->add_option("--pool-manifest", pool_manifest_path, "frozen pool manifest output");

  std::string holdout_in, holdout_out;
  std::uint64_t holdout_seed = 0;
  std::string holdout_bands;
  auto* holdout = app.add_subcommand("holdout", "generate held-out worlds per instance");
  holdout->add_option("--in", holdout_in, "instances JSONL")->required();
  holdout->add_option("--out", holdout_out, "output holdout JSONL")->required();
  holdout->add_option("--seed", holdout_seed, "holdout seed")->required();
  holdout->add_option("--bands", holdout_bands, "bands configuration file (JSON)");

  std::string render_in, render_out;
  auto* render = app.add_subcommand("render", "render prompts for instances");
  render->add_option("--in", render_in, "instances JSONL")->required();
  render->add_option("--out", render_out, "output prompts JSONL")->required();

  std::string solve_in, solve_out, adapter, model_name;
  bool baseline = false;
  int max_attempts = 5;
  double backoff = 0.5;
  auto* solve = app.add_subcommand("solve", "solve instances via baseline or adapter");
  solve->add_option("--in", solve_in, "instances JSONL")->required();
  solve->add_option("--out", solve_out, "output predictions JSONL")->required();
  solve->add_flag("--baseline", baseline, "use the built-in enumeration baseline");
  solve->add_option("--adapter", adapter, "adapter command (reads request JSON on stdin)");
  solve->add_option("--model", model_name, "model name recorded in predictions");
  solve->add_option("--max-attempts", max_attempts, "adapter retry attempts");
  solve->add_option("--backoff", backoff, "initial adapter backoff seconds");

  std::string eval_instances, eval_predictions, eval_holdout, eval_out;
  auto* evaluate = app.add_subcommand("evaluate", "score predictions against instances");
  evaluate->add_option("--instances", eval_instances, "instances JSONL")->required();
  evaluate->add_option("--predictions", eval_predictions, "predictions JSONL")->required();
  evaluate->add_option("--holdout", eval_holdout, "holdout JSONL (optional)");
  evaluate->add_option("--out", eval_out, "output eval records JSONL")->required();

  std::string report_eval, report_instances, report_format = "table", report_out;
  std::uint64_t report_seed = 0;
  auto* report = app.add_subcommand("report", "aggregate eval records");
  report->add_option("--eval", report_eval, "eval records JSONL")->required();
  report->add_option("--instances", report_instances, "instances JSONL (for CI breakdown)");
  report->add_option("--format", report_format, "table|data")
      ->check(CLI::IsMember({"table", "data"}));
  report->add_option("--out", report_out, "output file (stdout when omitted)");
  report->add_option("--bootstrap-seed", report_seed, "bootstrap seed for within-problem CIs");

  std::string bands_out;
  auto* bands_cmd = app.add_subcommand("bands", "print the builtin band configuration");
  bands_cmd->add_option("--out", bands_out, "output file (stdout when omitted)");

  std::string dimacs_instances, dimacs_id, dimacs_formula, dimacs_out;
  int dimacs_world = 0;
  auto* dimacs = app.add_subcommand("dimacs", "dump a grounded constraint in DIMACS form");
  dimacs->add_option("--instances", dimacs_instances, "instances JSONL")->required();
  dimacs->add_option("--id", dimacs_id, "instance id")->required();
  dimacs->add_option("--world-index", dimacs_world, "world index within the instance");
  dimacs->add_option("--formula", dimacs_formula, "formula text (defaults to the gold)");
  dimacs->add_option("--out", dimacs_out, "output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
    if (generate->parsed()) {
      return cmd_generate(task, band, count, seed, out_path, bands_path, manifest_path,
                          pool_manifest_path);
    }
    if (holdout->parsed()) {
      return cmd_holdout(holdout_in, holdout_out, holdout_seed, holdout_bands);
    }
    if (render->parsed()) return cmd_render(render_in, render_out);
    if (solve->parsed()) {
      if (baseline == !adapter.empty()) {
        std::cerr << "error: exactly one of --baseline / --adapter is required\n";
        return 2;
      }
      return cmd_solve(solve_in, solve_out, baseline, adapter, model_name, max_attempts,
                       backoff);
    }
    if (evaluate->parsed()) {
      return cmd_evaluate(eval_instances, eval_predictions, eval_holdout, eval_out);
    }
    if (report->parsed()) {
      return cmd_report(report_eval, report_instances, report_format, report_out,
                        report_seed);
    }
    if (bands_cmd->parsed()) {
      std::string doc = bands_to_json(builtin_bands());
      if (bands_out.empty()) {
        std::cout << doc << "\n";
      } else {
        std::ofstream out = open_out(bands_out);
        out << doc << "\n";
      }
      return 0;
    }
    if (dimacs->parsed()) {
      return cmd_dimacs(dimacs_instances, dimacs_id, dimacs_world, dimacs_formula,
                        dimacs_out);
    }
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
