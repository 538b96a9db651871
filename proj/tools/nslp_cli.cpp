// nslp: batch driver for Quest + Targeting experiments and cost-model predictions.

#include <CLI11.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "nslp/nslp.hpp"

namespace fs = std::filesystem;

namespace {

struct Flags {
  std::size_t n = 400;
  int k = 8;
  double spacing = 1.0;
  std::string delta = "one-row";
  std::string drift = "random";
  double drift_magnitude = 0.01;
  std::vector<std::size_t> workers{1, 2, 3, 4, 5, 6, 7, 8};
  std::uint64_t iterations = 100;
  std::uint64_t seed = 1;
  double quest_tolerance = 1e-9;
  std::uint64_t quest_max_iter = 1000000;
  double quest_lambda = 1.0;
  std::string out = "nslp_out";
  std::string backend = "pool";
  std::string problem_file;
  std::size_t stall_limit = 10;
  std::int64_t time_budget_ms = 0;

  // predict only
  std::vector<double> dims{400, 800, 1080};
  std::size_t p_max = 64;
  std::optional<double> c_s, c_w, c_r, c_p;
  double latency_ns = 1e4;
  std::string metrics_file;
};

void add_common(CLI::App& cmd, Flags& f) {
  cmd.add_option("--n", f.n, "problem dimension (variables)")->capture_default_str()->check(CLI::Range(2, 100000));
  cmd.add_option("--k", f.k, "points per cohort, even")->capture_default_str();
  cmd.add_option("--spacing", f.spacing, "cross spacing s (problem units)")->capture_default_str();
  cmd.add_option("--delta", f.delta, "changed-data fraction per time unit: full | one-row | <float in [0,1]>")
      ->capture_default_str();
  cmd.add_option("--drift", f.drift, "drift kind: none | translate | random")
      ->capture_default_str()
      ->check(CLI::IsMember({"none", "translate", "random"}));
  cmd.add_option("--drift-magnitude", f.drift_magnitude,
                 "translate: shift length per time unit; random: max absolute change per entry (problem units)")
      ->capture_default_str();
  cmd.add_option("--workers", f.workers, "comma-separated worker counts")->delimiter(',')->capture_default_str();
  cmd.add_option("--iters", f.iterations, "Targeting iterations per run (count)")->capture_default_str();
  cmd.add_option("--seed", f.seed, "generator and drift seed")->capture_default_str();
  cmd.add_option("--quest-tolerance", f.quest_tolerance, "Quest stop threshold on max violation (problem units)")
      ->capture_default_str();
  cmd.add_option("--quest-max-iter", f.quest_max_iter, "Quest iteration cap (count)")->capture_default_str();
  cmd.add_option("--quest-lambda", f.quest_lambda, "Quest relaxation coefficient in (0,2)")->capture_default_str();
  cmd.add_option("--out", f.out, "output directory")->capture_default_str();
  cmd.add_option("--backend", f.backend, "executor: sim (sequential, modeled time) | pool (threads, wall time)")
      ->capture_default_str()
      ->check(CLI::IsMember({"sim", "pool"}));
  cmd.add_option("--problem-file", f.problem_file, "read the base LP from a text file instead of generating it");
  cmd.add_option("--stall-limit", f.stall_limit, "empty iterations before Quest re-acquires feasibility (count)")
      ->capture_default_str();
  cmd.add_option("--time-budget-ms", f.time_budget_ms, "wall-clock budget per run, 0 = none (ms)")
      ->capture_default_str();
}

nslp::DeltaMode parse_delta(const std::string& text, double& custom) {
  if (text == "full") return nslp::DeltaMode::full;
  if (text == "one-row") return nslp::DeltaMode::one_row;
  std::size_t used = 0;
  try {
    custom = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != text.size() || !(custom >= 0.0 && custom <= 1.0)) {
    throw CLI::ValidationError("--delta", "expected full, one-row or a number in [0,1], got '" + text + "'");
  }
  return nslp::DeltaMode::custom;
}

nslp::ExperimentConfig to_config(const Flags& f) {
  if (f.iterations == 0) throw CLI::ValidationError("--iters", "must be at least 1");
  nslp::ExperimentConfig cfg;
  cfg.n = f.n;
  cfg.k = f.k;
  cfg.spacing = f.spacing;
  cfg.delta_mode = parse_delta(f.delta, cfg.custom_delta);
  cfg.drift = f.drift == "none"        ? nslp::DriftKind::none
              : f.drift == "translate" ? nslp::DriftKind::translate
                                       : nslp::DriftKind::random_sparse;
  cfg.drift_magnitude = f.drift_magnitude;
  cfg.workers = f.workers;
  cfg.iterations = f.iterations;
  cfg.seed = f.seed;
  cfg.quest.tolerance = f.quest_tolerance;
  cfg.quest.max_iterations = f.quest_max_iter;
  cfg.quest.relaxation = f.quest_lambda;
  cfg.stall_limit = f.stall_limit;
  cfg.backend = f.backend == "sim" ? nslp::bsf::Backend::sequential_sim : nslp::bsf::Backend::worker_pool;
  if (const char* env = std::getenv("NSLP_THREADS")) cfg.thread_cap = std::strtoull(env, nullptr, 10);
  if (!f.problem_file.empty()) {
    cfg.problem_file = f.problem_file;
    cfg.n = nslp::load_problem(f.problem_file).n();
  }
  if (f.time_budget_ms > 0) cfg.time_budget = std::chrono::milliseconds(f.time_budget_ms);
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw CLI::ValidationError(e.what());
  }
  return cfg;
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path.string());
  return os;
}

void write_chart(const fs::path& path, const std::string& title, const std::string& y_label,
                 const std::vector<nslp::ResultRow>& rows, bool efficiency_chart) {
  nslp::svg::Series meas{"measured", {}, {}, "#1f77b4", false};
  nslp::svg::Series pred{"predicted", {}, {}, "#d62728", true};
  for (const auto& r : rows) {
    const double p = static_cast<double>(r.workers);
    meas.x.push_back(p);
    pred.x.push_back(p);
    meas.y.push_back(efficiency_chart ? r.eff_meas : r.speedup_meas);
    pred.y.push_back(efficiency_chart ? r.eff_pred : r.speedup_pred);
  }
  auto os = open_output(path);
  nslp::svg::write_line_chart(os, {title, "workers P", y_label, {meas, pred}});
}

int cmd_run(const Flags& f) {
  const nslp::ExperimentConfig cfg = to_config(f);
  const fs::path out(f.out);
  fs::create_directories(out);
  const nslp::ExperimentResult result = nslp::run_experiment(cfg);

  auto results = open_output(out / "results.csv");
  nslp::write_results_csv(results, result.rows);
  auto trace = open_output(out / "trace.csv");
  nslp::write_trace_csv(trace, result.trace);
  auto metrics = open_output(out / "metrics.csv");
  nslp::write_metrics_csv(metrics, result.metrics);
  const std::string suffix = " (n = " + std::to_string(cfg.n) + ")";
  write_chart(out / "speedup.svg", "Speedup" + suffix, "speedup", result.rows, false);
  write_chart(out / "efficiency.svg", "Parallel efficiency" + suffix, "efficiency", result.rows, true);

  std::cout << "quest: " << result.quest.iterations << " iterations, residual " << result.quest.residual
            << (result.quest.converged ? "" : " (not converged)") << '\n';
  nslp::write_results_csv(std::cout, result.rows);
  std::cout << "wrote " << out.string() << "/{results,trace,metrics}.csv, speedup.svg, efficiency.svg\n";
  return 0;
}

int cmd_track(const Flags& f) {
  nslp::ExperimentConfig cfg = to_config(f);
  const fs::path out(f.out);
  fs::create_directories(out);
  const nslp::TrackingSummary summary = nslp::run_tracking(cfg);

  auto trace = open_output(out / "trace.csv");
  nslp::write_trace_csv(trace, summary.trace);
  auto os = open_output(out / "summary.txt");
  for (std::ostream* s : {static_cast<std::ostream*>(&os), static_cast<std::ostream*>(&std::cout)}) {
    *s << "iterations " << summary.trace.rows.size() << '\n';
    *s << "final_objective " << (summary.trace.rows.empty() ? 0.0 : summary.trace.rows.back().objective) << '\n';
    *s << "final_gap ";
    if (summary.final_gap) {
      *s << *summary.final_gap << '\n';
    } else {
      *s << "unknown\n";
    }
    *s << "moved_rate " << summary.moved_rate << '\n';
    *s << "stalls " << summary.trace.stalls << '\n';
    *s << "reacquisitions " << summary.trace.reacquisitions << '\n';
  }
  return 0;
}

int cmd_predict(const Flags& f) {
  double custom = 0.0;
  const nslp::DeltaMode mode = parse_delta(f.delta, custom);
  nslp::ScenarioModel model;
  model.delta = mode;
  model.custom_delta = custom;
  model.latency = f.latency_ns;

  if (!f.metrics_file.empty()) {
    std::ifstream is(f.metrics_file);
    if (!is) throw std::runtime_error("cannot read " + f.metrics_file);
    std::vector<nslp::CalibrationSample> samples;
    const double delta = nslp::delta_fraction(mode, static_cast<double>(f.n), custom);
    for (const auto& m : nslp::read_metrics_csv(is)) samples.push_back({static_cast<double>(f.n), delta, m});
    model = nslp::calibrate(samples, model);
  } else if (f.c_s || f.c_w || f.c_r || f.c_p) {
    model.c_s = f.c_s.value_or(1.0);
    model.c_w = f.c_w.value_or(1.0);
    model.c_r = f.c_r.value_or(1.0);
    model.c_p = f.c_p.value_or(1.0);
  } else {
    throw CLI::ValidationError("predict", "missing calibration inputs: give --metrics FILE or --cs/--cw/--cr/--cp");
  }
  if (f.p_max < 1) throw CLI::ValidationError("--p-max", "must be at least 1");

  const fs::path out(f.out);
  fs::create_directories(out);
  const auto workers = nslp::worker_range(f.p_max);
  for (double n : f.dims) {
    model.n = n;
    auto os = open_output(out / ("curves_n" + std::to_string(static_cast<long long>(n)) + ".csv"));
    nslp::write_curves_csv(os, nslp::predict_curves(model, workers));
  }
  const auto bounds = nslp::bound_by_dimension(model, f.dims);
  auto os = open_output(out / "bounds.csv");
  os.precision(10);
  os << "n,bound\n";
  for (std::size_t i = 0; i < f.dims.size(); ++i) os << f.dims[i] << ',' << bounds[i] << '\n';
  std::cout.precision(6);
  std::cout << "c_s " << model.c_s << " c_w " << model.c_w << " c_r " << model.c_r << " c_p " << model.c_p
            << " L_ns " << model.latency << '\n';
  for (std::size_t i = 0; i < f.dims.size(); ++i) std::cout << "n " << f.dims[i] << " bound " << bounds[i] << '\n';
  if (f.dims.size() >= 2) std::cout << "log-log bound slope " << std::fixed << std::setprecision(3) << nslp::loglog_slope(f.dims, bounds) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quest + Targeting experiments on non-stationary LPs and BSF cost-model predictions.\n"
               "Times are in nanoseconds unless a flag says otherwise. NSLP_THREADS caps the pool thread count."};
  app.require_subcommand(1);
  Flags f;

  auto* run = app.add_subcommand("run", "measure speedup/efficiency across worker counts and compare with the model");
  add_common(*run, f);
  auto* track = app.add_subcommand("track", "run one tracking session and write its trace and summary");
  add_common(*track, f);
  auto* predict = app.add_subcommand("predict", "emit predicted curves and scalability bounds only (no solver run)");
  predict->add_option("--n", f.n, "dimension the --metrics file was measured at")->capture_default_str();
  predict->add_option("--delta", f.delta, "changed-data fraction: full | one-row | <float in [0,1]>")
      ->capture_default_str();
  predict->add_option("--dims", f.dims, "comma-separated dimensions to predict for")
      ->delimiter(',')
      ->capture_default_str();
  predict->add_option("--p-max", f.p_max, "largest worker count in the curves")->capture_default_str();
  predict->add_option("--cs", f.c_s, "send constant (ns per unit of t_s work)");
  predict->add_option("--cw", f.c_w, "worker constant (ns per unit of t_w work)");
  predict->add_option("--cr", f.c_r, "receive constant (ns per unit of t_r work)");
  predict->add_option("--cp", f.c_p, "evaluate constant (ns per unit of t_p work)");
  predict->add_option("--latency-ns", f.latency_ns, "message latency L (ns)")->capture_default_str();
  predict->add_option("--metrics", f.metrics_file, "calibrate the constants from a metrics.csv written by 'run'");
  predict->add_option("--out", f.out, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
    if (*run) return cmd_run(f);
    if (*track) return cmd_track(f);
    return cmd_predict(f);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "nslp: " << e.what() << '\n';
    return 1;
  }
}
