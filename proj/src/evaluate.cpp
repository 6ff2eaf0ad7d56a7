#include "folsynth/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "folsynth/rng.hpp"
#include "folsynth/semantics.hpp"

namespace folsynth {

using ordered_json = nlohmann::ordered_json;

std::string pred_status_name(PredStatus s) {
  switch (s) {
    case PredStatus::Ok: return "ok";
    case PredStatus::ParseError: return "parse_error";
    case PredStatus::Missing: return "missing";
  }
  return "missing";
}

PredStatus pred_status_from_name(std::string_view name) {
  if (name == "ok") return PredStatus::Ok;
  if (name == "parse_error") return PredStatus::ParseError;
  if (name == "missing") return PredStatus::Missing;
  throw FormatError("unknown prediction status '" + std::string(name) + "'");
}

EvalRecord evaluate_prediction(const ProblemInstance& instance, const Prediction& p,
                               SolveBudget budget) {
  EvalRecord rec;
  rec.instance_id = instance.id;
  rec.model = p.model;
  rec.task = instance.task;
  rec.band = instance.band;
  rec.family = family_name(instance.gold.family);
  rec.lift_hard = instance.gold.lift_hard;
  rec.status = p.status;
  rec.ast_gold = instance.gold.ast;
  if (p.status != PredStatus::Ok) return rec;

  rec.ast_pred = ast_size(p.formula);
  rec.delta = rec.ast_pred - rec.ast_gold;
  rec.exact_gold = structurally_equal(p.formula, instance.gold.formula);
  rec.uses_eq = uses_equality(p.formula);

  switch (instance.task) {
    case Task::FullObs: {
      std::vector<World> worlds = instance.full_train_worlds();
      rec.valid = true;
      double fp = 0, fn = 0;
      for (std::size_t i = 0; i < worlds.size(); ++i) {
        ErrorProfile ep = error_profile(p.formula, worlds[i]);
        fp += ep.fp_rate;
        fn += ep.fn_rate;
        if (ep.mismatches() != 0 && rec.fullobs_failed_world < 0) {
          rec.fullobs_failed_world = static_cast<int>(i);
          rec.valid = false;
        }
      }
      if (!worlds.empty()) {
        rec.fp_rate = fp / worlds.size();
        rec.fn_rate = fn / worlds.size();
      }
      break;
    }
    case Task::CI: {
      std::vector<World> yes = instance.full_worlds(WorldRole::Yes);
      std::vector<World> no = instance.full_worlds(WorldRole::No);
      bool yes_ok = true;
      double fp = 0, fn = 0;
      for (const World& w : yes) {
        ErrorProfile ep = error_profile(p.formula, w);
        fp += ep.fp_rate;
        fn += ep.fn_rate;
        if (ep.mismatches() != 0) yes_ok = false;
      }
      if (!yes.empty()) {
        rec.fp_rate = fp / yes.size();
        rec.fn_rate = fn / yes.size();
      }
      rec.no_margin_value = no_margin(p.formula, no);
      bool no_ok = true;
      for (const World& w : no) {
        if (matches(p.formula, w)) no_ok = false;
      }
      rec.valid = yes_ok && no_ok;
      if (!yes_ok) {
        rec.ci_failure = CiFailure::YesFail;
      } else if (!no_ok) {
        rec.ci_failure = CiFailure::NoFail;
      }
      break;
    }
    case Task::EC: {
      std::vector<PartialWorld> worlds = instance.partial_worlds();
      rec.valid = true;
      for (const PartialWorld& pw : worlds) {
        if (!ec_valid_world(p.formula, pw, budget).valid) {
          rec.valid = false;
          break;
        }
      }
      if (!rec.valid) {
        for (const PartialWorld& pw : worlds) {
          rec.ec_world_mismatch.push_back(min_mismatch(p.formula, pw, budget));
        }
      }
      break;
    }
  }
  return rec;
}

HoldoutOutcome holdout_generalization(const ProblemInstance& instance, const Formula& f,
                                      const std::vector<InstanceWorld>& holdout_worlds) {
  HoldoutOutcome out;
  int yes_total = 0, yes_ok = 0, no_total = 0, no_ok = 0;
  for (const InstanceWorld& iw : holdout_worlds) {
    World w = iw.full();
    bool exact = matches(f, w);
    bool success = iw.role == WorldRole::No ? !exact : exact;
    out.per_world.push_back(success ? 1 : 0);
    if (iw.role == WorldRole::No) {
      ++no_total;
      no_ok += success ? 1 : 0;
    } else {
      ++yes_total;
      yes_ok += success ? 1 : 0;
    }
  }
  out.yes_rate = yes_total ? static_cast<double>(yes_ok) / yes_total : 0.0;
  out.no_rate = no_total ? static_cast<double>(no_ok) / no_total : 0.0;
  // Headline rate: plain exact-match rate for FullObs/EC; YES-only for CI.
  out.rate = instance.task == Task::CI
                 ? out.yes_rate
                 : (out.per_world.empty()
                        ? 0.0
                        : static_cast<double>(std::accumulate(out.per_world.begin(),
                                                              out.per_world.end(), 0)) /
                              out.per_world.size());
  return out;
}

// ---------------------------------------------------------------------------
// Aggregation

namespace {

GroupStats compute_group(const std::vector<const EvalRecord*>& records) {
  GroupStats g;
  g.total = static_cast<int>(records.size());
  g.curve.acc_at.assign(101, 0.0);
  if (g.total == 0) return g;
  for (const EvalRecord* r : records) {
    if (r->status == PredStatus::Ok) ++g.parseable;
    if (r->valid) {
      ++g.valid;
      if (r->delta > 25) ++g.bloat;
      for (int d = std::max(0, r->delta); d <= 100; ++d) {
        g.curve.acc_at[d] += 1.0;
      }
    }
  }
  for (double& v : g.curve.acc_at) v /= g.total;
  g.coverage = static_cast<double>(g.parseable) / g.total;
  g.acc_all = static_cast<double>(g.valid) / g.total;
  g.bloat_rate = static_cast<double>(g.bloat) / g.total;
  return g;
}

} // namespace

Report aggregate(const std::vector<EvalRecord>& records) {
  Report report;
  std::map<std::string, std::vector<const EvalRecord*>> by_model;
  for (const EvalRecord& r : records) by_model[r.model].push_back(&r);
  for (const auto& [model, recs] : by_model) {
    report.overall[model] = compute_group(recs);
    std::map<std::string, std::vector<const EvalRecord*>> bands, families;
    for (const EvalRecord* r : recs) {
      // Band and family names repeat across tasks (ci/core vs ec/core), so
      // group keys carry the task.
      bands[task_name(r->task) + "/" + r->band].push_back(r);
      families[task_name(r->task) + "/" + r->family].push_back(r);
    }
    for (const auto& [band, group] : bands) {
      report.by_band[model][band] = compute_group(group);
    }
    for (const auto& [family, group] : families) {
      report.by_family[model][family] = compute_group(group);
    }
  }
  return report;
}

CiDecomposition ci_failure_decomposition(const std::vector<EvalRecord>& records,
                                         const std::vector<ProblemInstance>& instances) {
  CiDecomposition d;
  std::map<std::string, std::pair<int, int>> world_counts;
  double yes_sum = 0, no_sum = 0;
  int n_inst = 0;
  for (const ProblemInstance& inst : instances) {
    if (inst.task != Task::CI) continue;
    int y = 0, n = 0;
    for (const InstanceWorld& iw : inst.worlds) {
      if (iw.role == WorldRole::Yes) ++y;
      if (iw.role == WorldRole::No) ++n;
    }
    world_counts[inst.id] = {y, n};
    yes_sum += y;
    no_sum += n;
    ++n_inst;
  }
  if (n_inst > 0) {
    d.mean_yes_worlds = yes_sum / n_inst;
    d.mean_no_worlds = no_sum / n_inst;
  }
  int correct = 0, yes_fail = 0, no_fail = 0, parse = 0, missing = 0;
  for (const EvalRecord& r : records) {
    if (r.task != Task::CI) continue;
    ++d.total;
    if (r.status == PredStatus::Missing) {
      ++missing;
    } else if (r.status == PredStatus::ParseError) {
      ++parse;
    } else if (r.valid) {
      ++correct;
    } else if (r.ci_failure == CiFailure::YesFail) {
      ++yes_fail;
    } else {
      ++no_fail;
    }
  }
  if (d.total > 0) {
    d.correct = static_cast<double>(correct) / d.total;
    d.yes_fail = static_cast<double>(yes_fail) / d.total;
    d.no_fail = static_cast<double>(no_fail) / d.total;
    d.parse = static_cast<double>(parse) / d.total;
    d.missing = static_cast<double>(missing) / d.total;
  }
  if (no_fail > 0 && d.mean_yes_worlds > 0 && d.mean_no_worlds > 0) {
    d.normalized_ratio = (d.yes_fail / d.mean_yes_worlds) / (d.no_fail / d.mean_no_worlds);
  }
  return d;
}

GeneralizationSplit bin_by_delta(const std::vector<EvalRecord>& records) {
  GeneralizationSplit out;
  struct Bin {
    const char* label;
    int lo, hi; // inclusive, delta range
    double sum = 0;
    int count = 0;
  };
  std::vector<Bin> bins = {
      {"<=0", std::numeric_limits<int>::min(), 0},
      {"1", 1, 1},
      {"2-5", 2, 5},
      {"6-25", 6, 25},
      {">25", 26, std::numeric_limits<int>::max()},
  };
  double near_sum = 0, above_sum = 0;
  for (const EvalRecord& r : records) {
    if (!r.valid || !r.holdout) continue;
    double rate = r.holdout->rate;
    if (r.delta <= 1) {
      ++out.near_count;
      near_sum += rate;
    } else {
      ++out.above_count;
      above_sum += rate;
    }
    for (Bin& b : bins) {
      if (r.delta >= b.lo && r.delta <= b.hi) {
        b.sum += rate;
        ++b.count;
      }
    }
  }
  if (out.near_count) out.near_rate = near_sum / out.near_count;
  if (out.above_count) out.above_rate = above_sum / out.above_count;
  for (const Bin& b : bins) {
    out.bins.emplace_back(b.label, b.count ? b.sum / b.count : 0.0);
    out.bin_counts.emplace_back(b.label, b.count);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Within-problem bloat control

namespace {

double binomial_one_sided_p(int positives, int nonzero) {
  // P[Bin(nonzero, 1/2) >= positives]
  if (nonzero == 0) return 1.0;
  long double total = 0.0L;
  long double coeff = 1.0L; // C(n, 0)
  std::vector<long double> coeffs(nonzero + 1);
  for (int i = 0; i <= nonzero; ++i) {
    coeffs[i] = coeff;
    coeff = coeff * (nonzero - i) / (i + 1);
  }
  for (int i = positives; i <= nonzero; ++i) total += coeffs[i];
  return static_cast<double>(total * std::pow(0.5L, nonzero));
}

WithinProblemComparison compare_pairs(const std::vector<std::pair<double, double>>& pairs,
                                      std::uint64_t seed, int resamples) {
  WithinProblemComparison cmp;
  cmp.n = static_cast<int>(pairs.size());
  if (cmp.n == 0) return cmp;
  std::vector<double> deltas;
  double short_sum = 0, long_sum = 0;
  int pos = 0, neg = 0;
  for (const auto& [short_rate, long_rate] : pairs) {
    short_sum += short_rate;
    long_sum += long_rate;
    double d = short_rate - long_rate;
    deltas.push_back(d);
    if (d > 0) ++pos;
    if (d < 0) ++neg;
  }
  cmp.short_rate = short_sum / cmp.n;
  cmp.long_rate = long_sum / cmp.n;
  cmp.mean_delta = std::accumulate(deltas.begin(), deltas.end(), 0.0) / cmp.n;
  cmp.frac_positive = static_cast<double>(pos) / cmp.n;
  cmp.frac_negative = static_cast<double>(neg) / cmp.n;
  cmp.p_value = binomial_one_sided_p(pos, pos + neg);

  // Percentile bootstrap over instance-level deltas.
  Rng rng(seed);
  std::vector<double> means(resamples);
  for (int b = 0; b < resamples; ++b) {
    double sum = 0;
    for (int i = 0; i < cmp.n; ++i) {
      sum += deltas[rng.below(deltas.size())];
    }
    means[b] = sum / cmp.n;
  }
  std::sort(means.begin(), means.end());
  auto pct = [&](double q) {
    double idx = q * (resamples - 1);
    int lo = static_cast<int>(idx);
    int hi = std::min(lo + 1, resamples - 1);
    double w = idx - lo;
    return means[lo] * (1 - w) + means[hi] * w;
  };
  cmp.ci_lo = pct(0.025);
  cmp.ci_hi = pct(0.975);
  return cmp;
}

} // namespace

WithinProblemStats within_problem_analysis(const std::vector<EvalRecord>& records,
                                           std::uint64_t bootstrap_seed) {
  // Train-correct, non-gold predictions with holdout data, grouped by instance.
  std::map<std::string, std::vector<const EvalRecord*>> groups;
  for (const EvalRecord& r : records) {
    if (!r.valid || r.exact_gold || !r.holdout) continue;
    groups[r.instance_id].push_back(&r);
  }
  std::vector<std::pair<double, double>> short_long, near_above;
  for (const auto& [id, recs] : groups) {
    if (recs.size() < 2) continue;
    const EvalRecord* shortest = recs[0];
    const EvalRecord* longest = recs[0];
    for (const EvalRecord* r : recs) {
      if (r->ast_pred < shortest->ast_pred) shortest = r;
      if (r->ast_pred > longest->ast_pred) longest = r;
    }
    short_long.emplace_back(shortest->holdout->rate, longest->holdout->rate);
    double near_sum = 0, above_sum = 0;
    int near_n = 0, above_n = 0;
    for (const EvalRecord* r : recs) {
      if (r->delta <= 1) {
        near_sum += r->holdout->rate;
        ++near_n;
      } else {
        above_sum += r->holdout->rate;
        ++above_n;
      }
    }
    if (near_n > 0 && above_n > 0) {
      near_above.emplace_back(near_sum / near_n, above_sum / above_n);
    }
  }
  if (short_long.size() < 2) {
    throw InsufficientData("fewer than 2 instances with >= 2 qualifying predictions");
  }
  WithinProblemStats stats;
  stats.bootstrap_seed = bootstrap_seed;
  stats.short_vs_long =
      compare_pairs(short_long, Rng::derive(bootstrap_seed, 1), stats.bootstrap_resamples);
  stats.near_vs_above =
      compare_pairs(near_above, Rng::derive(bootstrap_seed, 2), stats.bootstrap_resamples);
  return stats;
}

EcBestCompletionReport ec_best_completion_report(const std::vector<EvalRecord>& records) {
  EcBestCompletionReport rep;
  double sum = 0;
  int b12 = 0, b3 = 0;
  for (const EvalRecord& r : records) {
    if (r.task != Task::EC || r.status != PredStatus::Ok || r.valid) continue;
    int total = std::accumulate(r.ec_world_mismatch.begin(), r.ec_world_mismatch.end(), 0);
    ++rep.invalid_considered;
    sum += total;
    if (total >= 3) {
      ++b3;
    } else if (total >= 1) {
      ++b12;
    }
  }
  if (rep.invalid_considered > 0) {
    rep.mean_min_mismatch = sum / rep.invalid_considered;
    rep.frac_1_2 = static_cast<double>(b12) / rep.invalid_considered;
    rep.frac_3_plus = static_cast<double>(b3) / rep.invalid_considered;
  }
  return rep;
}

std::map<std::string, EqualityUsage> equality_usage(const std::vector<EvalRecord>& records) {
  std::map<std::string, EqualityUsage> out;
  for (const EvalRecord& r : records) {
    if (r.status == PredStatus::Missing) continue;
    EqualityUsage& u = out[r.model];
    ++u.total;
    if (r.status == PredStatus::Ok && r.uses_eq) {
      ++u.using_eq;
      u.mean_ast_eq += r.ast_pred;
      u.valid_rate_eq += r.valid ? 1.0 : 0.0;
    }
  }
  for (auto& [model, u] : out) {
    if (u.total > 0) u.frac_using = static_cast<double>(u.using_eq) / u.total;
    if (u.using_eq > 0) {
      u.mean_ast_eq /= u.using_eq;
      u.valid_rate_eq /= u.using_eq;
    }
  }
  return out;
}

ErrorProfileReport error_profile_report(const std::vector<EvalRecord>& records) {
  ErrorProfileReport rep;
  int fo = 0, ci = 0;
  for (const EvalRecord& r : records) {
    if (r.status != PredStatus::Ok) continue;
    if (r.task == Task::FullObs) {
      rep.fullobs_fp += r.fp_rate;
      rep.fullobs_fn += r.fn_rate;
      ++fo;
    } else if (r.task == Task::CI) {
      rep.ci_yes_fp += r.fp_rate;
      rep.ci_yes_fn += r.fn_rate;
      rep.ci_no_margin += r.no_margin_value;
      ++ci;
    }
  }
  if (fo > 0) {
    rep.fullobs_fp /= fo;
    rep.fullobs_fn /= fo;
  }
  if (ci > 0) {
    rep.ci_yes_fp /= ci;
    rep.ci_yes_fn /= ci;
    rep.ci_no_margin /= ci;
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Serialization

std::string serialize_prediction(const Prediction& p) {
  ordered_json j;
  j["instance_id"] = p.instance_id;
  j["model"] = p.model;
  j["raw_text"] = p.raw_text;
  j["status"] = pred_status_name(p.status);
  j["latency_ms"] = p.latency_ms;
  j["attempts"] = p.attempts;
  return j.dump();
}

Prediction deserialize_prediction(std::string_view bytes) {
  try {
    ordered_json j = ordered_json::parse(bytes);
    Prediction p;
    p.instance_id = j.at("instance_id").get<std::string>();
    p.model = j.value("model", "unknown");
    p.raw_text = j.at("raw_text").get<std::string>();
    p.status = pred_status_from_name(j.at("status").get<std::string>());
    p.latency_ms = j.value("latency_ms", 0.0);
    p.attempts = j.value("attempts", 1);
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed prediction document: ") + e.what());
  }
}

std::vector<Prediction> load_predictions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open predictions file: " + path);
  std::vector<Prediction> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(deserialize_prediction(line));
  }
  return out;
}

std::string serialize_record(const EvalRecord& r) {
  ordered_json j;
  j["instance_id"] = r.instance_id;
  j["model"] = r.model;
  j["task"] = task_name(r.task);
  j["band"] = r.band;
  j["family"] = r.family;
  j["lift_hard"] = r.lift_hard;
  j["status"] = pred_status_name(r.status);
  j["valid"] = r.valid;
  j["ast_gold"] = r.ast_gold;
  j["ast_pred"] = r.ast_pred;
  j["delta"] = r.delta;
  j["exact_gold"] = r.exact_gold;
  j["uses_equality"] = r.uses_eq;
  j["fullobs_failed_world"] = r.fullobs_failed_world;
  j["ci_failure"] = r.ci_failure == CiFailure::YesFail  ? "yes_fail"
                    : r.ci_failure == CiFailure::NoFail ? "no_fail"
                                                        : "none";
  j["ec_world_mismatch"] = r.ec_world_mismatch;
  j["fp_rate"] = r.fp_rate;
  j["fn_rate"] = r.fn_rate;
  j["no_margin"] = r.no_margin_value;
  if (r.holdout) {
    ordered_json h;
    h["per_world"] = r.holdout->per_world;
    h["rate"] = r.holdout->rate;
    h["yes_rate"] = r.holdout->yes_rate;
    h["no_rate"] = r.holdout->no_rate;
    j["holdout"] = h;
  } else {
    j["holdout"] = nullptr;
  }
  return j.dump();
}

EvalRecord deserialize_record(std::string_view bytes) {
  try {
    ordered_json j = ordered_json::parse(bytes);
    EvalRecord r;
    r.instance_id = j.at("instance_id").get<std::string>();
    r.model = j.at("model").get<std::string>();
    r.task = task_from_name(j.at("task").get<std::string>());
    r.band = j.at("band").get<std::string>();
    r.family = j.at("family").get<std::string>();
    r.lift_hard = j.at("lift_hard").get<bool>();
    r.status = pred_status_from_name(j.at("status").get<std::string>());
    r.valid = j.at("valid").get<bool>();
    r.ast_gold = j.at("ast_gold").get<int>();
    r.ast_pred = j.at("ast_pred").get<int>();
    r.delta = j.at("delta").get<int>();
    r.exact_gold = j.at("exact_gold").get<bool>();
    r.uses_eq = j.at("uses_equality").get<bool>();
    r.fullobs_failed_world = j.at("fullobs_failed_world").get<int>();
    std::string cif = j.at("ci_failure").get<std::string>();
    r.ci_failure = cif == "yes_fail"  ? CiFailure::YesFail
                   : cif == "no_fail" ? CiFailure::NoFail
                                      : CiFailure::None;
    r.ec_world_mismatch = j.at("ec_world_mismatch").get<std::vector<int>>();
    r.fp_rate = j.at("fp_rate").get<double>();
    r.fn_rate = j.at("fn_rate").get<double>();
    r.no_margin_value = j.at("no_margin").get<double>();
    if (!j.at("holdout").is_null()) {
      HoldoutOutcome h;
      h.per_world = j.at("holdout").at("per_world").get<std::vector<std::uint8_t>>();
      h.rate = j.at("holdout").at("rate").get<double>();
      h.yes_rate = j.at("holdout").at("yes_rate").get<double>();
      h.no_rate = j.at("holdout").at("no_rate").get<double>();
      r.holdout = h;
    }
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed eval record: ") + e.what());
  }
}

std::vector<EvalRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open eval records file: " + path);
  std::vector<EvalRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(deserialize_record(line));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Reports

namespace {

ordered_json group_to_json(const GroupStats& g, bool include_curve) {
  ordered_json j;
  j["total"] = g.total;
  j["coverage"] = g.coverage;
  j["acc_all"] = g.acc_all;
  j["acc_at_0"] = g.curve.acc_at.empty() ? 0.0 : g.curve.acc_at[0];
  j["acc_at_25"] = g.curve.acc_at.empty() ? 0.0 : g.curve.acc_at[25];
  j["bloat_rate"] = g.bloat_rate;
  if (include_curve) {
    ordered_json curve = ordered_json::array();
    for (int d = 0; d <= 100; ++d) {
      curve.push_back(ordered_json::array({d, g.curve.acc_at[d]}));
    }
    j["budget_curve"] = curve;
  }
  return j;
}

ordered_json build_report_json(const std::vector<EvalRecord>& records,
                               const std::vector<ProblemInstance>& instances,
                               std::uint64_t bootstrap_seed) {
  Report rep = aggregate(records);
  ordered_json j;
  j["note_no_margin_normalization"] =
      "normalized_ratio = (yes_fail / mean_yes_worlds) / (no_fail / mean_no_worlds)";
  ordered_json models = ordered_json::object();
  for (const auto& [model, stats] : rep.overall) {
    ordered_json m;
    m["overall"] = group_to_json(stats, true);
    ordered_json bands = ordered_json::object();
    for (const auto& [band, g] : rep.by_band[model]) bands[band] = group_to_json(g, false);
    m["by_band"] = bands;
    ordered_json fams = ordered_json::object();
    for (const auto& [family, g] : rep.by_family[model]) {
      fams[family] = group_to_json(g, false);
    }
    m["by_family"] = fams;
    models[model] = m;
  }
  j["models"] = models;

  bool any_ci = std::any_of(records.begin(), records.end(),
                            [](const EvalRecord& r) { return r.task == Task::CI; });
  if (any_ci) {
    CiDecomposition d = ci_failure_decomposition(records, instances);
    ordered_json ci;
    ci["total"] = d.total;
    ci["correct"] = d.correct;
    ci["yes_fail"] = d.yes_fail;
    ci["no_fail"] = d.no_fail;
    ci["parse"] = d.parse;
    ci["missing"] = d.missing;
    ci["mean_yes_worlds"] = d.mean_yes_worlds;
    ci["mean_no_worlds"] = d.mean_no_worlds;
    ci["normalized_ratio"] = d.normalized_ratio;
    j["ci_failure_decomposition"] = ci;
  }

  bool any_holdout = std::any_of(records.begin(), records.end(),
                                 [](const EvalRecord& r) { return r.holdout.has_value(); });
  if (any_holdout) {
    GeneralizationSplit split = bin_by_delta(records);
    ordered_json g;
    g["near_count"] = split.near_count;
    g["near_rate"] = split.near_rate;
    g["above_count"] = split.above_count;
    g["above_rate"] = split.above_rate;
    ordered_json bins = ordered_json::object();
    for (std::size_t i = 0; i < split.bins.size(); ++i) {
      bins[split.bins[i].first] = ordered_json::array(
          {split.bin_counts[i].second, split.bins[i].second});
    }
    g["delta_bins"] = bins;
    j["holdout_generalization"] = g;
    try {
      WithinProblemStats wp = within_problem_analysis(records, bootstrap_seed);
      auto cmp_json = [](const WithinProblemComparison& c) {
        ordered_json o;
        o["n"] = c.n;
        o["short_rate"] = c.short_rate;
        o["long_rate"] = c.long_rate;
        o["mean_delta"] = c.mean_delta;
        o["ci95"] = ordered_json::array({c.ci_lo, c.ci_hi});
        o["frac_delta_positive"] = c.frac_positive;
        o["frac_delta_negative"] = c.frac_negative;
        o["p_one_sided"] = c.p_value;
        return o;
      };
      ordered_json wpj;
      wpj["bootstrap_seed"] = wp.bootstrap_seed;
      wpj["bootstrap_resamples"] = wp.bootstrap_resamples;
      wpj["short_vs_long"] = cmp_json(wp.short_vs_long);
      wpj["near_vs_above"] = cmp_json(wp.near_vs_above);
      j["within_problem"] = wpj;
    } catch (const InsufficientData&) {
      j["within_problem"] = nullptr;
    }
  }

  bool any_ec = std::any_of(records.begin(), records.end(),
                            [](const EvalRecord& r) { return r.task == Task::EC; });
  if (any_ec) {
    EcBestCompletionReport bc = ec_best_completion_report(records);
    ordered_json e;
    e["invalid_considered"] = bc.invalid_considered;
    e["mean_min_mismatch"] = bc.mean_min_mismatch;
    e["frac_1_2"] = bc.frac_1_2;
    e["frac_3_plus"] = bc.frac_3_plus;
    j["ec_best_completion"] = e;
  }

  ordered_json eq = ordered_json::object();
  for (const auto& [model, u] : equality_usage(records)) {
    ordered_json m;
    m["total"] = u.total;
    m["frac_using"] = u.frac_using;
    m["mean_ast_eq"] = u.mean_ast_eq;
    m["valid_rate_eq"] = u.valid_rate_eq;
    eq[model] = m;
  }
  j["equality_usage"] = eq;

  ErrorProfileReport ep = error_profile_report(records);
  ordered_json epj;
  epj["fullobs_fp"] = ep.fullobs_fp;
  epj["fullobs_fn"] = ep.fullobs_fn;
  epj["ci_yes_fp"] = ep.ci_yes_fp;
  epj["ci_yes_fn"] = ep.ci_yes_fn;
  epj["ci_no_margin"] = ep.ci_no_margin;
  j["error_profiles"] = epj;
  return j;
}

} // namespace

std::string report_to_json(const std::vector<EvalRecord>& records,
                           const std::vector<ProblemInstance>& instances,
                           std::uint64_t bootstrap_seed) {
  return build_report_json(records, instances, bootstrap_seed).dump(2);
}

std::string report_to_table(const std::vector<EvalRecord>& records,
                            const std::vector<ProblemInstance>& instances,
                            std::uint64_t bootstrap_seed) {
  Report rep = aggregate(records);
  std::ostringstream os;
  auto pct = [](double v) {
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(1);
    s << v * 100.0 << "%";
    return s.str();
  };
  os << "model            total   cov     acc_all  acc@0    acc@25   bloat\n";
  for (const auto& [model, g] : rep.overall) {
    os << model;
    for (std::size_t i = model.size(); i < 17; ++i) os << ' ';
    os << g.total << "\t" << pct(g.coverage) << "\t" << pct(g.acc_all) << "\t"
       << pct(g.curve.acc_at[0]) << "\t" << pct(g.curve.acc_at[25]) << "\t"
       << pct(g.bloat_rate) << "\n";
  }
  for (const auto& [model, bands] : rep.by_band) {
    os << "\nbands (" << model << "):\n";
    for (const auto& [band, g] : bands) {
      os << "  " << band;
      for (std::size_t i = band.size(); i < 12; ++i) os << ' ';
      os << "n=" << g.total << "  acc_all=" << pct(g.acc_all)
         << "  acc@25=" << pct(g.curve.acc_at[25]) << "  bloat=" << pct(g.bloat_rate)
         << "\n";
    }
    os << "families (" << model << "):\n";
    for (const auto& [family, g] : rep.by_family.at(model)) {
      os << "  " << family;
      for (std::size_t i = family.size(); i < 12; ++i) os << ' ';
      os << "n=" << g.total << "  acc@25=" << pct(g.curve.acc_at[25]) << "\n";
    }
  }
  ordered_json extra = build_report_json(records, instances, bootstrap_seed);
  for (const char* key : {"ci_failure_decomposition", "holdout_generalization",
                          "within_problem", "ec_best_completion", "error_profiles"}) {
    if (extra.contains(key) && !extra[key].is_null()) {
      os << "\n" << key << ": " << extra[key].dump() << "\n";
    }
  }
  return os.str();
}

} // namespace folsynth
