#pragma once

#include <string>
#include <vector>

#include "folsynth/evaluate.hpp"
#include "folsynth/generate.hpp"
#include "folsynth/instance.hpp"

namespace folsynth {

/// Task-specific prompt: task description, the instance's worlds in the
/// Domain / Predicates / Target layout (plus Unknown Atoms sections for
/// partially observed worlds), and the one-line JSON output contract.
/// Byte-stable for a given instance.
std::string render_prompt(const ProblemInstance& instance);

/// Scans the response for the last line that is a complete JSON object with
/// a "formula" field, then parses the formula. Tolerant of surrounding
/// prose. Empty input -> missing; no extractable formula -> parse_error.
Prediction extract_formula(std::string_view raw);

struct RetryPolicy {
  int max_attempts = 5;
  double initial_backoff_s = 0.5;
  double backoff_multiplier = 2.0;
};

struct SolverRequest {
  std::string instance_id;
  Task task = Task::FullObs;
  std::string prompt;
};

struct SolverResponse {
  std::string instance_id;
  std::string raw_text;
  double latency_ms = 0.0;
  int attempts = 1;
  bool missing = false;
};

/// Spawns the adapter command once per request, writes one request document
/// ({"instance_id","task","prompt"}) to its stdin and reads one response
/// document ({"instance_id","text"}) from its stdout. Failures retry with
/// exponential backoff; exhaustion yields a missing response rather than an
/// exception, so every request resolves to exactly one terminal response.
std::vector<SolverResponse> run_external_solver(const std::vector<SolverRequest>& requests,
                                                const std::string& adapter_cmd,
                                                const RetryPolicy& policy = {});

/// Enumeration baseline: candidates in ascending (ast_size, canonical text)
/// order, first one satisfying the instance's task criterion wins; none ->
/// missing. Deterministic for a fixed candidate list.
Prediction baseline_solve(const ProblemInstance& instance,
                          const std::vector<Template>& candidates, SolveBudget budget = {});

/// Default baseline candidate list: gold templates plus the frozen pool.
std::vector<Template> baseline_candidates(const FrozenPool& pool);

} // namespace folsynth
