#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nslp/bsf.hpp"
#include "nslp/drift.hpp"
#include "nslp/order.hpp"
#include "nslp/quest.hpp"
#include "nslp/targeting.hpp"

namespace nslp {

struct TargetingConfig {
  int points_per_cohort = 8;  ///< K
  double spacing = 1.0;       ///< s
  std::size_t stall_limit = 10;
  std::uint64_t start_clock = 0;
  FejerConfig quest;  ///< used to re-acquire feasibility after stall_limit empty iterations
  /// Optimal objective of the snapshot at a given clock, when known; fills the oracle_gap column.
  std::function<std::optional<double>(const DenseLP&, std::uint64_t)> reference_optimum;
  /// Wall-clock budget on top of the iteration budget; makes the trace length timing dependent.
  std::optional<std::chrono::milliseconds> time_budget;
};

/// The Targeting loop as a BSF workload. Workers own a cohort block and a private copy of
/// the problem that orders keep current; the master owns the drifting problem and the cross.
class TargetingWorkload {
 public:
  struct WorkerState {
    std::uint32_t id = 0;
    std::vector<int> cohorts;
    DenseLP lp;
    int points_per_cohort = 2;
    double spacing = 1.0;
  };
  using Order = nslp::Order;
  using Result = WorkerResult;
  using Merged = std::vector<CohortBest>;

  TargetingWorkload(const NonStationaryLP& problem, Vector start, TargetingConfig cfg, std::uint64_t iterations)
      : problem_(&problem),
        cfg_(std::move(cfg)),
        iterations_(iterations),
        cursor_(problem, cfg_.start_clock),
        sent_(cursor_.current()),
        state_{Cross(std::move(start), cfg_.spacing, cfg_.points_per_cohort), cfg_.start_clock, 0, false, 0} {
    require_length(state_.cross.center(), problem.n(), "run_targeting: start point");
    if (iterations_ < 1) throw std::invalid_argument("run_targeting: need at least one iteration");
  }

  std::size_t item_count() const { return problem_->n(); }

  WorkerState init_worker(std::size_t id, bsf::Range range) const {
    WorkerState s{static_cast<std::uint32_t>(id), {}, sent_, cfg_.points_per_cohort, cfg_.spacing};
    for (std::size_t chi = range.begin; chi < range.end; ++chi) s.cohorts.push_back(static_cast<int>(chi));
    return s;
  }

  Order make_order() {
    if (!started_) {
      started_ = true;
      started_at_ = std::chrono::steady_clock::now();
    }
    Order order{state_.cross.center(), delta_between(sent_, cursor_.current()), state_.clock};
    apply_delta_in_place(sent_, order.delta);
    return order;
  }

  static Bytes encode_order(const Order& o) { return nslp::encode_order(o); }
  static Order decode_order(std::span<const std::uint8_t> b) { return nslp::decode_order(b); }
  static Bytes encode_result(const Result& r) { return nslp::encode_result(r); }
  static Result decode_result(std::span<const std::uint8_t> b) { return nslp::decode_result(b); }

  static Result process_order(WorkerState& s, const Order& order) {
    apply_delta_in_place(s.lp, order.delta);
    const Cross cross(order.theta, s.spacing, s.points_per_cohort);
    return {s.id, process_cohorts(s.lp, cross, s.cohorts)};
  }

  Merged merge_results(std::vector<Result> results) const {
    Merged merged;
    merged.reserve(problem_->n());
    for (auto& r : results) {
      for (auto& b : r.bests) merged.push_back(std::move(b));
    }
    return merged;
  }

  void evaluate(Merged bests) {
    const DenseLP& lp = cursor_.current();
    TargetingState next = nslp::evaluate(lp, state_, bests);
    if (next.last_q_size == 0) ++trace_.stalls;
    if (next.stall_count >= cfg_.stall_limit) {
      const QuestResult q = pseudo_project(*problem_, next.cross.center(), cfg_.quest, next.clock);
      next.cross = recenter(next.cross, q.z);
      next.clock = std::max(next.clock, q.clock);
      next.stall_count = 0;
      ++trace_.reacquisitions;
    }

    TraceRow row;
    row.iter = iteration_;
    row.clock = state_.clock;
    row.center = next.cross.center();
    row.objective = dot(lp.c(), row.center);
    row.residual = max_violation(lp, row.center);
    row.moved = next.moved;
    if (cfg_.reference_optimum) {
      if (auto opt = cfg_.reference_optimum(lp, state_.clock)) row.oracle_gap = *opt - row.objective;
    }
    trace_.rows.push_back(std::move(row));

    state_ = std::move(next);
    cursor_.advance_to(state_.clock);
    ++iteration_;
  }

  bool exit_check() const {
    if (iteration_ >= iterations_) return true;
    return started_ && cfg_.time_budget && std::chrono::steady_clock::now() - started_at_ >= *cfg_.time_budget;
  }

  void finalize() {}

  const TrackingTrace& trace() const noexcept { return trace_; }
  TrackingTrace take_trace() && { return std::move(trace_); }
  const TargetingState& state() const noexcept { return state_; }

 private:
  const NonStationaryLP* problem_;
  TargetingConfig cfg_;
  std::uint64_t iterations_;
  std::uint64_t iteration_ = 0;
  DriftCursor cursor_;
  DenseLP sent_;  ///< problem state the workers hold
  TargetingState state_;
  TrackingTrace trace_;
  bool started_ = false;
  std::chrono::steady_clock::time_point started_at_;
};

static_assert(bsf::Workload<TargetingWorkload>);

struct TrackingRun {
  TrackingTrace trace;
  bsf::RunMetrics metrics;
};

/// Runs `iterations` Targeting iterations from `start` (normally the Quest output) over the
/// drifting problem. The trace does not depend on the worker count or backend.
inline TrackingRun run_targeting(const NonStationaryLP& problem, Vector start, const TargetingConfig& cfg,
                                 std::uint64_t iterations, const bsf::Options& executor) {
  TargetingWorkload workload(problem, std::move(start), cfg, iterations);
  bsf::RunMetrics metrics = bsf::run_bsf(workload, executor);
  return {std::move(workload).take_trace(), metrics};
}

}  // namespace nslp
