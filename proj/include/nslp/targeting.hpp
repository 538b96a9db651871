#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "nslp/cross.hpp"
#include "nslp/lp.hpp"

namespace nslp {

/// Argmax of the objective over the feasible points of one cohort; empty when none is feasible.
struct CohortBest {
  int cohort = 0;
  std::optional<Vector> point;
  std::optional<double> value;

  bool present() const noexcept { return point.has_value(); }
  friend bool operator==(const CohortBest&, const CohortBest&) = default;
};

struct TargetingState {
  Cross cross;
  std::uint64_t clock = 0;
  std::size_t last_q_size = 0;
  bool moved = false;
  std::size_t stall_count = 0;  ///< consecutive iterations with an empty candidate set
};

/// Offsets in evaluation order: |eta| ascending, negative first. Only a strictly better
/// value replaces the incumbent, so this order is the tie-break.
inline std::vector<int> tie_break_offsets(int half_width) {
  std::vector<int> out;
  out.reserve(static_cast<std::size_t>(2 * half_width));
  for (int a = 1; a <= half_width; ++a) {
    out.push_back(-a);
    out.push_back(a);
  }
  return out;
}

/// Best feasible point of each requested cohort.
inline std::vector<CohortBest> process_cohorts(const DenseLP& lp, const Cross& cross, std::span<const int> cohorts) {
  if (static_cast<std::size_t>(cross.dimension()) != lp.n()) {
    throw std::invalid_argument("process_cohorts: cross dimension does not match the problem");
  }
  const auto offsets = tie_break_offsets(cross.half_width());
  std::vector<CohortBest> out;
  out.reserve(cohorts.size());
  for (int chi : cohorts) {
    if (chi < 0 || chi >= cross.dimension()) throw std::out_of_range("process_cohorts: cohort index out of range");
    CohortBest best{chi, std::nullopt, std::nullopt};
    for (int eta : offsets) {
      const Vector x = point_of(cross, {chi, eta});
      if (!is_member(lp, x)) continue;
      const double v = dot(lp.c(), x);
      if (!best.value || v > *best.value) {
        best.point = x;
        best.value = v;
      }
    }
    out.push_back(std::move(best));
  }
  return out;
}

inline std::vector<CohortBest> process_cohorts(const DenseLP& lp, const Cross& cross, std::initializer_list<int> cohorts) {
  return process_cohorts(lp, cross, std::span<const int>(cohorts.begin(), cohorts.size()));
}

/// Master side of one iteration: hold the center when it is feasible and at least as good as
/// every cohort best, otherwise move it to the centroid of the bests. The clock always advances.
inline TargetingState evaluate(const DenseLP& lp, const TargetingState& state, const std::vector<CohortBest>& bests) {
  const auto n = static_cast<std::size_t>(state.cross.dimension());
  if (bests.size() != n) throw std::invalid_argument("evaluate: expected one result per cohort");
  std::vector<const CohortBest*> by_cohort(n, nullptr);
  for (const auto& b : bests) {
    if (b.cohort < 0 || static_cast<std::size_t>(b.cohort) >= n) throw std::invalid_argument("evaluate: cohort out of range");
    if (by_cohort[static_cast<std::size_t>(b.cohort)]) throw std::invalid_argument("evaluate: duplicate cohort result");
    if (b.point.has_value() != b.value.has_value()) throw std::invalid_argument("evaluate: malformed cohort result");
    by_cohort[static_cast<std::size_t>(b.cohort)] = &b;
  }

  TargetingState next = state;
  next.clock = state.clock + 1;
  next.moved = false;

  Vector sum(n, 0.0);
  std::size_t q_size = 0;
  std::optional<double> best_value;
  for (const CohortBest* b : by_cohort) {
    if (!b->present()) continue;
    ++q_size;
    for (std::size_t j = 0; j < n; ++j) sum[j] += (*b->point)[j];
    best_value = best_value ? std::max(*best_value, *b->value) : *b->value;
  }
  next.last_q_size = q_size;

  if (q_size == 0) {
    ++next.stall_count;
    return next;
  }
  next.stall_count = 0;

  const auto& g0 = state.cross.center();
  if (is_member(lp, g0) && dot(lp.c(), g0) >= *best_value) return next;

  for (double& v : sum) v /= static_cast<double>(q_size);
  next.cross = recenter(state.cross, std::move(sum));
  next.moved = true;
  return next;
}

struct TraceRow {
  std::uint64_t iter = 0;
  std::uint64_t clock = 0;
  Vector center;
  double objective = 0.0;
  double residual = 0.0;
  bool moved = false;
  std::optional<double> oracle_gap;
  friend bool operator==(const TraceRow&, const TraceRow&) = default;
};

struct TrackingTrace {
  std::vector<TraceRow> rows;
  std::size_t stalls = 0;          ///< iterations with an empty candidate set
  std::size_t reacquisitions = 0;  ///< Quest re-runs triggered by the stall limit
  friend bool operator==(const TrackingTrace&, const TrackingTrace&) = default;
};

/// CSV: iter,clock,x0..x{n-1},objective,residual,moved,oracle_gap (gap left empty when unknown).
inline void write_trace_csv(std::ostream& os, const TrackingTrace& trace) {
  const auto old_precision = os.precision(17);
  const std::size_t n = trace.rows.empty() ? 0 : trace.rows.front().center.size();
  os << "iter,clock";
  for (std::size_t j = 0; j < n; ++j) os << ",x" << j;
  os << ",objective,residual,moved,oracle_gap\n";
  for (const auto& r : trace.rows) {
    os << r.iter << ',' << r.clock;
    for (double v : r.center) os << ',' << v;
    os << ',' << r.objective << ',' << r.residual << ',' << (r.moved ? 1 : 0) << ',';
    if (r.oracle_gap) os << *r.oracle_gap;
    os << '\n';
  }
  os.precision(old_precision);
}

}  // namespace nslp
