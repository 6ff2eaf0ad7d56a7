#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "folsynth/completion.hpp"
#include "folsynth/instance.hpp"

namespace folsynth {

enum class PredStatus { Ok, ParseError, Missing };
std::string pred_status_name(PredStatus s);
PredStatus pred_status_from_name(std::string_view name);

// One solver answer for one instance; `formula` is present iff status Ok.
struct Prediction {
  std::string instance_id;
  std::string model = "unknown";
  std::string raw_text;
  PredStatus status = PredStatus::Missing;
  Formula formula;
  std::string description;
  double latency_ms = 0.0;
  int attempts = 1;
};

enum class CiFailure { None, YesFail, NoFail };

struct HoldoutOutcome {
  std::vector<std::uint8_t> per_world; // world-wise success flags
  double rate = 0.0;                   // headline rate (YES-only for CI)
  double yes_rate = 0.0, no_rate = 0.0;
};

struct EvalRecord {
  std::string instance_id;
  std::string model;
  Task task = Task::FullObs;
  std::string band;
  std::string family;
  bool lift_hard = false;
  PredStatus status = PredStatus::Missing;
  bool valid = false;
  int ast_gold = 0;
  int ast_pred = -1;                    // -1 when no formula
  int delta = 0;                        // ast_pred - ast_gold, meaningful iff ast_pred >= 0
  bool exact_gold = false;              // structurally equal to the gold
  bool uses_eq = false;
  int fullobs_failed_world = -1;        // first mismatched train world
  CiFailure ci_failure = CiFailure::None;
  std::vector<int> ec_world_mismatch;   // per-world min-mismatch, invalid EC only
  double fp_rate = 0.0, fn_rate = 0.0;  // mean over train/YES worlds
  double no_margin_value = 0.0;         // CI only
  std::optional<HoldoutOutcome> holdout;
};

/// Task-dispatching verdict: FullObs / CI exact matching, EC
/// existential-completion validity. Missing and unparseable predictions are
/// invalid; every failure path is recorded as data.
EvalRecord evaluate_prediction(const ProblemInstance& instance, const Prediction& p,
                               SolveBudget budget = {});

/// Holdout exact-match flags per world. For CI the headline rate is
/// YES-holdout exact-match; the NO side (world-wise: not exactly matched) is
/// reported separately.
HoldoutOutcome holdout_generalization(const ProblemInstance& instance, const Formula& f,
                                      const std::vector<InstanceWorld>& holdout_worlds);

// ---------------------------------------------------------------------------
// Aggregation

struct BudgetCurve {
  std::vector<double> acc_at; // index = delta in [0, 100]
};

struct GroupStats {
  int total = 0;
  int parseable = 0;
  int valid = 0;
  int bloat = 0; // valid with delta > 25
  double coverage = 0.0;
  double acc_all = 0.0;
  double bloat_rate = 0.0;
  BudgetCurve curve;
};

struct Report {
  // keyed by model, then "overall" / band / family group names
  std::map<std::string, GroupStats> overall;
  std::map<std::string, std::map<std::string, GroupStats>> by_band;
  std::map<std::string, std::map<std::string, GroupStats>> by_family;
};

Report aggregate(const std::vector<EvalRecord>& records);

struct CiDecomposition {
  int total = 0;
  double correct = 0, yes_fail = 0, no_fail = 0, parse = 0, missing = 0;
  // Raw counts plus the per-world-count normalization documented in the
  // report header: normalized_ratio =
  //   (yes_fail / mean_yes_worlds) / (no_fail / mean_no_worlds).
  double mean_yes_worlds = 0, mean_no_worlds = 0;
  double normalized_ratio = 0;
};

CiDecomposition ci_failure_decomposition(const std::vector<EvalRecord>& records,
                                         const std::vector<ProblemInstance>& instances);

struct GeneralizationSplit {
  int near_count = 0, above_count = 0;
  double near_rate = 0.0, above_rate = 0.0; // mean holdout rate per side
  // delta-binned rates over train-correct predictions
  std::vector<std::pair<std::string, double>> bins;
  std::vector<std::pair<std::string, int>> bin_counts;
};

/// Near-gold (delta <= 1) vs above-gold generalization over train-correct
/// records with holdout data, plus delta-binned rates.
GeneralizationSplit bin_by_delta(const std::vector<EvalRecord>& records);

struct WithinProblemComparison {
  int n = 0;                 // qualifying instances
  double short_rate = 0.0;   // mean holdout rate of the shorter side
  double long_rate = 0.0;
  double mean_delta = 0.0;   // short - long
  double ci_lo = 0.0, ci_hi = 0.0; // percentile bootstrap, 2000 resamples
  double frac_positive = 0.0;
  double frac_negative = 0.0;
  double p_value = 1.0;      // one-sided sign/binomial test
};

struct WithinProblemStats {
  WithinProblemComparison short_vs_long;
  WithinProblemComparison near_vs_above;
  std::uint64_t bootstrap_seed = 0;
  int bootstrap_resamples = 2000;
};

/// Within-problem bloat control over instances with >= 2 train-correct
/// non-gold predictions (exact gold matches are excluded before comparison).
/// Throws InsufficientData when fewer than 2 instances qualify.
WithinProblemStats within_problem_analysis(const std::vector<EvalRecord>& records,
                                           std::uint64_t bootstrap_seed);

struct EcBestCompletionReport {
  int invalid_considered = 0;
  double mean_min_mismatch = 0.0;
  double frac_1_2 = 0.0;
  double frac_3_plus = 0.0;
};

/// Distance-to-feasibility of invalid EC predictions: per prediction the sum
/// of per-world minimum mismatches, bucketed into {1-2, >=3}.
EcBestCompletionReport ec_best_completion_report(const std::vector<EvalRecord>& records);

struct EqualityUsage {
  int total = 0;
  int using_eq = 0;
  double frac_using = 0.0;
  double mean_ast_eq = 0.0;
  double valid_rate_eq = 0.0;
};

std::map<std::string, EqualityUsage> equality_usage(const std::vector<EvalRecord>& records);

struct ErrorProfileReport {
  double fullobs_fp = 0.0, fullobs_fn = 0.0;
  double ci_yes_fp = 0.0, ci_yes_fn = 0.0;
  double ci_no_margin = 0.0;
};

ErrorProfileReport error_profile_report(const std::vector<EvalRecord>& records);

// Serialization of predictions and eval records (JSONL).
std::string serialize_prediction(const Prediction& p);
Prediction deserialize_prediction(std::string_view bytes);
std::vector<Prediction> load_predictions(const std::string& path);
std::string serialize_record(const EvalRecord& r);
EvalRecord deserialize_record(std::string_view bytes);
std::vector<EvalRecord> load_records(const std::string& path);

/// Machine-readable report document; `table` renders the human layout.
std::string report_to_json(const std::vector<EvalRecord>& records,
                           const std::vector<ProblemInstance>& instances,
                           std::uint64_t bootstrap_seed);
std::string report_to_table(const std::vector<EvalRecord>& records,
                            const std::vector<ProblemInstance>& instances,
                            std::uint64_t bootstrap_seed);

} // namespace folsynth
