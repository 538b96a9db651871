#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "nslp/bsf.hpp"
#include "nslp/cost_model.hpp"
#include "nslp/drift.hpp"
#include "nslp/model_n.hpp"
#include "nslp/oracle.hpp"
#include "nslp/quest.hpp"
#include "nslp/tracking.hpp"

namespace nslp {

/// One measured-vs-predicted experiment over a list of worker counts.
struct ExperimentConfig {
  std::size_t n = 400;
  int k = 8;
  double spacing = 1.0;
  DeltaMode delta_mode = DeltaMode::one_row;
  double custom_delta = 0.0;
  DriftKind drift = DriftKind::random_sparse;
  double drift_magnitude = 0.01;
  std::vector<std::size_t> workers{1, 2, 3, 4, 5, 6, 7, 8};
  std::uint64_t iterations = 100;
  std::uint64_t seed = 1;
  FejerConfig quest;
  std::size_t stall_limit = 10;
  bsf::Backend backend = bsf::Backend::worker_pool;
  std::size_t thread_cap = 0;
  double sim_latency_ns = 1e4;
  std::optional<std::string> problem_file;
  std::optional<std::chrono::milliseconds> time_budget;

  double delta_value() const { return delta_fraction(delta_mode, static_cast<double>(n), custom_delta); }

  void validate() const {
    if (n < 2) throw std::invalid_argument("config: n must be >= 2");
    if (k < 2 || k % 2 != 0) throw std::invalid_argument("config: K must be even and >= 2");
    if (!(spacing > 0.0)) throw std::invalid_argument("config: spacing must be positive");
    if (iterations < 1) throw std::invalid_argument("config: iterations must be >= 1");
    if (workers.empty()) throw std::invalid_argument("config: empty worker list");
    for (std::size_t p : workers) {
      if (p < 1 || p > n) throw std::invalid_argument("config: worker counts must lie in [1, n]");
    }
    if (delta_mode == DeltaMode::custom && !(custom_delta >= 0.0 && custom_delta <= 1.0)) {
      throw std::invalid_argument("config: delta must be in [0,1]");
    }
    if (!(drift_magnitude >= 0.0)) throw std::invalid_argument("config: drift magnitude must be >= 0");
    quest.validate();
  }
};

inline NonStationaryLP build_problem(const ExperimentConfig& cfg) {
  DenseLP base = cfg.problem_file ? load_problem(*cfg.problem_file) : model_n(cfg.n, cfg.seed);
  DriftSpec drift;
  drift.kind = cfg.drift;
  drift.seed = cfg.seed;
  if (cfg.drift == DriftKind::translate) {
    // Diagonal shift of length drift_magnitude; nonnegative, so the region never leaves x >= 0.
    drift.translate_vector.assign(base.n(), cfg.drift_magnitude / std::sqrt(static_cast<double>(base.n())));
  } else if (cfg.drift == DriftKind::random_sparse) {
    drift.delta = cfg.delta_value();
    drift.magnitude = cfg.drift_magnitude;
  }
  return NonStationaryLP(std::move(base), std::move(drift));
}

/// Optimal objective per snapshot when it can be had cheaply: closed form for generated
/// instances (stationary or translated), the simplex oracle for small problems, else nothing.
inline std::function<std::optional<double>(const DenseLP&, std::uint64_t)> reference_optimum(
    const ExperimentConfig& cfg, const NonStationaryLP& problem) {
  if (!cfg.problem_file && (problem.stationary() || cfg.drift == DriftKind::translate)) {
    const KnownOptimum opt = model_n_optimum(cfg.n, cfg.seed);
    double per_step = 0.0;
    if (cfg.drift == DriftKind::translate) per_step = dot(problem.base().c(), problem.drift().translate_vector);
    return [value = opt.value, per_step](const DenseLP&, std::uint64_t clock) -> std::optional<double> {
      return value + per_step * static_cast<double>(clock);
    };
  }
  if (problem.n() <= 60 && problem.m() <= 60) {
    return [](const DenseLP& lp, std::uint64_t) -> std::optional<double> {
      const auto r = oracle::solve_simplex(lp);
      if (r.status != oracle::SimplexStatus::optimal) return std::nullopt;
      return r.value;
    };
  }
  return {};
}

inline TargetingConfig targeting_config(const ExperimentConfig& cfg, const NonStationaryLP& problem,
                                        std::uint64_t start_clock) {
  TargetingConfig t;
  t.points_per_cohort = cfg.k;
  t.spacing = cfg.spacing;
  t.stall_limit = cfg.stall_limit;
  t.start_clock = start_clock;
  t.quest = cfg.quest;
  t.reference_optimum = reference_optimum(cfg, problem);
  t.time_budget = cfg.time_budget;
  return t;
}

inline bsf::Options executor_options(const ExperimentConfig& cfg, std::size_t workers) {
  bsf::Options o;
  o.workers = workers;
  o.backend = cfg.backend;
  o.thread_cap = cfg.thread_cap;
  o.sim_latency_ns = cfg.sim_latency_ns;
  return o;
}

struct ResultRow {
  std::size_t workers = 1;
  double time_ns = 0.0;
  double speedup_meas = 0.0;
  double eff_meas = 0.0;
  double speedup_pred = 0.0;
  double eff_pred = 0.0;
  double bound = 0.0;
};

struct ExperimentResult {
  QuestResult quest;
  std::vector<ResultRow> rows;
  std::vector<bsf::RunMetrics> metrics;  ///< one per entry of the worker list
  bsf::RunMetrics baseline;              ///< the single-worker run used to normalize speedup
  ScenarioModel model;                   ///< calibrated from all runs of this experiment
  TrackingTrace trace;                   ///< trace of the first run (identical for all runs)
};

/// Quest from the origin, then one Targeting run per worker count. Measured speedup is
/// time(P = 1) / time(P); predictions come from the scenario model calibrated on these runs.
inline ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const NonStationaryLP problem = build_problem(cfg);
  ExperimentResult result;
  result.quest = pseudo_project(problem, Vector(problem.n(), 0.0), cfg.quest, 0);
  const TargetingConfig tcfg = targeting_config(cfg, problem, result.quest.clock);

  std::optional<bsf::RunMetrics> baseline;
  std::vector<CalibrationSample> samples;
  for (std::size_t p : cfg.workers) {
    TrackingRun run = run_targeting(problem, result.quest.z, tcfg, cfg.iterations, executor_options(cfg, p));
    if (result.metrics.empty()) result.trace = std::move(run.trace);
    if (p == 1 && !baseline) baseline = run.metrics;
    result.metrics.push_back(run.metrics);
    samples.push_back({static_cast<double>(problem.n()), cfg.delta_value(), run.metrics});
  }
  if (!baseline) {
    baseline = run_targeting(problem, result.quest.z, tcfg, cfg.iterations, executor_options(cfg, 1)).metrics;
  }
  result.baseline = *baseline;

  ScenarioModel shape;
  shape.n = static_cast<double>(problem.n());
  shape.delta = DeltaMode::custom;
  shape.custom_delta = cfg.delta_value();
  result.model = calibrate(samples, shape);

  const auto predicted = predict_curves(result.model, cfg.workers);
  for (std::size_t i = 0; i < cfg.workers.size(); ++i) {
    ResultRow row;
    row.workers = cfg.workers[i];
    row.time_ns = result.metrics[i].iteration_ns;
    row.speedup_meas = result.baseline.iteration_ns / row.time_ns;
    row.eff_meas = row.speedup_meas / static_cast<double>(row.workers);
    row.speedup_pred = predicted[i].speedup;
    row.eff_pred = predicted[i].efficiency;
    row.bound = predicted[i].bound;
    result.rows.push_back(row);
  }
  return result;
}

/// CSV: P,time_ns,speedup_meas,eff_meas,speedup_pred,eff_pred,bound
inline void write_results_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  const auto old_precision = os.precision(10);
  os << "P,time_ns,speedup_meas,eff_meas,speedup_pred,eff_pred,bound\n";
  for (const auto& r : rows) {
    os << r.workers << ',' << r.time_ns << ',' << r.speedup_meas << ',' << r.eff_meas << ',' << r.speedup_pred << ','
       << r.eff_pred << ',' << r.bound << '\n';
  }
  os.precision(old_precision);
}

struct TrackingSummary {
  QuestResult quest;
  TrackingTrace trace;
  bsf::RunMetrics metrics;
  std::optional<double> final_gap;
  double moved_rate = 0.0;
};

/// Single tracking session on the first worker count of the config.
inline TrackingSummary run_tracking(const ExperimentConfig& cfg) {
  cfg.validate();
  const NonStationaryLP problem = build_problem(cfg);
  TrackingSummary out;
  out.quest = pseudo_project(problem, Vector(problem.n(), 0.0), cfg.quest, 0);
  TrackingRun run = run_targeting(problem, out.quest.z, targeting_config(cfg, problem, out.quest.clock),
                                  cfg.iterations, executor_options(cfg, cfg.workers.front()));
  out.trace = std::move(run.trace);
  out.metrics = run.metrics;
  if (!out.trace.rows.empty()) out.final_gap = out.trace.rows.back().oracle_gap;
  std::size_t moved = 0;
  for (const auto& r : out.trace.rows) moved += r.moved ? 1 : 0;
  out.moved_rate = out.trace.rows.empty() ? 0.0 : static_cast<double>(moved) / static_cast<double>(out.trace.rows.size());
  return out;
}

}  // namespace nslp
