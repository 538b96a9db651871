#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <unistd.h>

#include "nslp/experiment.hpp"

using namespace nslp;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.n = 16;
  cfg.iterations = 8;
  cfg.workers = {1, 2, 3, 4, 5, 6, 7, 8};
  cfg.backend = bsf::Backend::sequential_sim;
  return cfg;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

struct Cli {
  int status;
  std::string output;
};

Cli cli(const std::string& args) {
  const fs::path log = fs::temp_directory_path() / ("nslp_cli_" + std::to_string(::getpid()) + "_" + std::to_string(std::rand()) + ".log");
  const std::string cmd = std::string(NSLP_CLI) + " " + args + " > " + log.string() + " 2>&1";
  const int raw = std::system(cmd.c_str());
  Cli out{WIFEXITED(raw) ? WEXITSTATUS(raw) : -1, slurp(log)};
  fs::remove(log);
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("nslp_test_" + name);
  fs::remove_all(dir);
  return dir;
}

std::size_t line_count(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(Experiment, ResultsTableShape) {
  const ExperimentConfig cfg = small_config();
  const ExperimentResult r = run_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 8u);
  EXPECT_EQ(r.rows[0].workers, 1u);
  EXPECT_EQ(r.rows[0].speedup_meas, 1.0);
  EXPECT_EQ(r.rows[0].eff_meas, 1.0);
  const auto pred = predict_curves(r.model, cfg.workers);
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    EXPECT_EQ(r.rows[i].speedup_pred, pred[i].speedup);
    EXPECT_EQ(r.rows[i].eff_pred, pred[i].efficiency);
    EXPECT_EQ(r.rows[i].bound, pred[i].bound);
    EXPECT_DOUBLE_EQ(r.rows[i].eff_meas * static_cast<double>(r.rows[i].workers), r.rows[i].speedup_meas);
  }
  std::ostringstream os;
  write_results_csv(os, r.rows);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')), "P,time_ns,speedup_meas,eff_meas,speedup_pred,eff_pred,bound");
  EXPECT_EQ(line_count(os.str()), 9u);
}

TEST(Experiment, BaselineAddedWhenMissing) {
  ExperimentConfig cfg = small_config();
  cfg.workers = {2, 4};
  const ExperimentResult r = run_experiment(cfg);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.baseline.workers, 1u);
  EXPECT_GT(r.rows[0].speedup_meas, 0.0);
}

TEST(Experiment, ConfigValidation) {
  ExperimentConfig cfg = small_config();
  cfg.workers = {0};
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  cfg.workers = {17};
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.iterations = 0;
  EXPECT_THROW(run_experiment(cfg), std::invalid_argument);
  cfg = small_config();
  cfg.k = 5;
  EXPECT_THROW(run_tracking(cfg), std::invalid_argument);
}

TEST(Experiment, TranslateReferenceOptimumMovesWithTheRegion) {
  ExperimentConfig cfg = small_config();
  cfg.n = 6;
  cfg.drift = DriftKind::translate;
  cfg.drift_magnitude = 0.5;
  const NonStationaryLP p = build_problem(cfg);
  const auto ref = reference_optimum(cfg, p);
  ASSERT_TRUE(ref);
  for (std::uint64_t k : {0u, 3u, 10u}) {
    const DenseLP lp = snapshot(p, k);
    const auto simplex = oracle::solve_simplex(lp);
    ASSERT_EQ(simplex.status, oracle::SimplexStatus::optimal);
    EXPECT_NEAR(*ref(lp, k), *simplex.value, 1e-7);
  }
}

TEST(Experiment, TrackingSummary) {
  ExperimentConfig cfg = small_config();
  cfg.n = 6;
  cfg.drift = DriftKind::none;
  cfg.iterations = 50;
  cfg.workers = {2};
  const TrackingSummary s = run_tracking(cfg);
  EXPECT_EQ(s.trace.rows.size(), 50u);
  ASSERT_TRUE(s.final_gap);
  EXPECT_GE(*s.final_gap, -1e-9);
  EXPECT_GE(s.moved_rate, 0.0);
  EXPECT_LE(s.moved_rate, 1.0);
}

TEST(Cli, HelpListsFlagsWithUnits) {
  const Cli run = cli("run --help");
  EXPECT_EQ(run.status, 0);
  for (const char* flag : {"--n", "--k", "--spacing", "--delta", "--drift", "--drift-magnitude", "--workers", "--iters",
                           "--seed", "--quest-tolerance", "--quest-max-iter", "--quest-lambda", "--out", "--backend",
                           "--problem-file", "--stall-limit", "--time-budget-ms"}) {
    EXPECT_NE(run.output.find(flag), std::string::npos) << flag;
  }
  EXPECT_NE(run.output.find("(ms)"), std::string::npos);
  EXPECT_NE(run.output.find("(count)"), std::string::npos);
  const Cli top = cli("--help");
  EXPECT_NE(top.output.find("nanoseconds"), std::string::npos);
  EXPECT_NE(top.output.find("NSLP_THREADS"), std::string::npos);
}

TEST(Cli, UsageErrors) {
  const Cli zero = cli("track --iters 0");
  EXPECT_NE(zero.status, 0);
  EXPECT_NE(zero.output.find("--iters"), std::string::npos);
  EXPECT_NE(cli("run --delta sideways").status, 0);
  EXPECT_NE(cli("run --backend mpi").status, 0);
  EXPECT_NE(cli("track --n 4 --workers 5").status, 0);
  EXPECT_NE(cli("").status, 0);
  const Cli predict = cli("predict --out " + scratch("predict_missing").string());
  EXPECT_NE(predict.status, 0);
  EXPECT_NE(predict.output.find("calibration"), std::string::npos);
}

TEST(Cli, RunWritesAllOutputs) {
  const fs::path out = scratch("run");
  const Cli r = cli("run --n 16 --iters 5 --backend sim --workers 1,2,3,4,5,6,7,8 --out " + out.string());
  ASSERT_EQ(r.status, 0) << r.output;
  for (const char* f : {"results.csv", "trace.csv", "metrics.csv", "speedup.svg", "efficiency.svg"}) {
    EXPECT_TRUE(fs::exists(out / f)) << f;
  }
  const std::string results = slurp(out / "results.csv");
  EXPECT_EQ(line_count(results), 9u);
  EXPECT_EQ(results.substr(0, results.find('\n')), "P,time_ns,speedup_meas,eff_meas,speedup_pred,eff_pred,bound");
  EXPECT_EQ(results.substr(results.find('\n') + 1, 2), "1,");
  EXPECT_NE(slurp(out / "speedup.svg").find("<svg"), std::string::npos);
}

TEST(Cli, TrackTraceIsByteIdenticalAcrossRuns) {
  const fs::path a = scratch("track_a"), b = scratch("track_b"), c = scratch("track_c");
  const std::string args = "track --n 8 --iters 60 --drift random --delta 0.05 --drift-magnitude 0.5 --seed 4 --out ";
  ASSERT_EQ(cli(args + a.string() + " --backend sim").status, 0);
  ASSERT_EQ(cli(args + b.string() + " --backend sim").status, 0);
  ASSERT_EQ(cli(args + c.string() + " --backend pool --workers 4").status, 0);
  const std::string ta = slurp(a / "trace.csv");
  EXPECT_FALSE(ta.empty());
  EXPECT_EQ(ta, slurp(b / "trace.csv"));
  EXPECT_EQ(ta, slurp(c / "trace.csv"));
  EXPECT_EQ(slurp(a / "summary.txt"), slurp(b / "summary.txt"));
}

TEST(Cli, ProblemFileInput) {
  const fs::path dir = scratch("problem_file");
  fs::create_directories(dir);
  {
    std::ofstream os(dir / "square.txt");
    os << "2 2\n1 0\n0 1\n1 1\n1 1\n";
  }
  const Cli r = cli("track --problem-file " + (dir / "square.txt").string() +
                    " --drift none --spacing 0.25 --k 4 --iters 20 --workers 1 --out " + dir.string());
  ASSERT_EQ(r.status, 0) << r.output;
  // From the origin the cross settles next to the vertex (1, 1), within one spacing per coordinate.
  const auto at = r.output.find("final_gap ");
  ASSERT_NE(at, std::string::npos) << r.output;
  const double gap = std::stod(r.output.substr(at + 10));
  EXPECT_GE(gap, 0.0);
  EXPECT_LE(gap, 0.5);
}

TEST(Cli, PredictIsDeterministicAndFollowsScalingLaws) {
  const fs::path a = scratch("pred_a"), b = scratch("pred_b");
  const std::string args = "predict --delta full --dims 1000,10000,100000,1000000 --latency-ns 0 --cs 1 --cw 1 --cr 1 --cp 1 --p-max 16 --out ";
  const Cli ra = cli(args + a.string());
  ASSERT_EQ(ra.status, 0) << ra.output;
  ASSERT_EQ(cli(args + b.string()).status, 0);
  EXPECT_EQ(slurp(a / "bounds.csv"), slurp(b / "bounds.csv"));
  EXPECT_EQ(slurp(a / "curves_n1000.csv"), slurp(b / "curves_n1000.csv"));
  EXPECT_EQ(line_count(slurp(a / "curves_n1000000.csv")), 17u);
  EXPECT_NE(ra.output.find("slope 0.50"), std::string::npos) << ra.output;
  const Cli row = cli("predict --delta one-row --dims 1000,10000,100000,1000000 --latency-ns 0 --cs 1 --out " +
                      scratch("pred_c").string());
  EXPECT_NE(row.output.find("slope 1.00"), std::string::npos) << row.output;
}

TEST(Cli, PredictFromMetricsFile) {
  const fs::path run = scratch("pred_metrics_run"), pred = scratch("pred_metrics");
  ASSERT_EQ(cli("run --n 16 --iters 3 --backend sim --workers 1,2 --out " + run.string()).status, 0);
  const Cli r = cli("predict --n 16 --metrics " + (run / "metrics.csv").string() + " --dims 16,32 --out " + pred.string());
  ASSERT_EQ(r.status, 0) << r.output;
  EXPECT_TRUE(fs::exists(pred / "curves_n32.csv"));
}
