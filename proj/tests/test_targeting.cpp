#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "fixtures.hpp"
#include "nslp/model_n.hpp"
#include "nslp/targeting.hpp"
#include "nslp/tracking.hpp"

using namespace nslp;

namespace {

std::vector<int> all_cohorts(std::size_t n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

TargetingState start_state(Vector center, double s, int k) { return {Cross(std::move(center), s, k), 0, 0, false, 0}; }

bsf::Options sim(std::size_t workers) {
  bsf::Options o;
  o.workers = workers;
  o.backend = bsf::Backend::sequential_sim;
  return o;
}

}  // namespace

TEST(ProcessCohorts, UnitSquareHandExample) {
  const DenseLP sq = fixtures::unit_square();
  const Cross cross({0.5, 0.5}, 0.25, 4);
  const auto bests = process_cohorts(sq, cross, {0, 1});
  ASSERT_EQ(bests.size(), 2u);
  EXPECT_EQ(bests[0].cohort, 0);
  EXPECT_EQ(*bests[0].point, (Vector{1.0, 0.5}));
  EXPECT_EQ(*bests[0].value, 1.5);
  EXPECT_EQ(*bests[1].point, (Vector{0.5, 1.0}));
  EXPECT_EQ(*bests[1].value, 1.5);
}

TEST(ProcessCohorts, EmptyAndSingletonCohorts) {
  const DenseLP sq = fixtures::unit_square();
  // Center far right: cohort 0 runs along x1 in [4, 6], entirely outside.
  const auto outside = process_cohorts(sq, Cross({5.0, 0.5}, 0.5, 4), {0});
  EXPECT_FALSE(outside[0].present());
  EXPECT_FALSE(outside[0].value);
  // Cohort 0 of center (1.5, 0.5) with s = 0.5, K = 2 has points x1 = 1 and x1 = 2; only the first is feasible.
  // Use a decreasing objective to show the singleton wins regardless of value.
  const DenseLP decreasing = fixtures::from_rows({{1, 0}, {0, 1}}, {1, 1}, {-1, 0});
  const auto single = process_cohorts(decreasing, Cross({1.5, 0.5}, 0.5, 2), {0});
  ASSERT_TRUE(single[0].present());
  EXPECT_EQ(*single[0].point, (Vector{1.0, 0.5}));
}

TEST(ProcessCohorts, TieBreakPrefersSmallestOffsetThenNegative) {
  // Objective ignores x1, so every feasible point of cohort 0 ties.
  const DenseLP flat = fixtures::from_rows({{1, 0}, {0, 1}}, {10, 10}, {0, 1});
  const auto b = process_cohorts(flat, Cross({5.0, 5.0}, 1.0, 6), {0});
  EXPECT_EQ(*b[0].point, (Vector{4.0, 5.0}));
  EXPECT_EQ(tie_break_offsets(3), (std::vector<int>{-1, 1, -2, 2, -3, 3}));
}

TEST(ProcessCohorts, Errors) {
  const DenseLP sq = fixtures::unit_square();
  EXPECT_THROW(process_cohorts(sq, Cross({0.5, 0.5, 0.5}, 0.25, 4), {0}), std::invalid_argument);
  EXPECT_THROW(process_cohorts(sq, Cross({0.5, 0.5}, 0.25, 4), {2}), std::out_of_range);
}

TEST(ProcessCohorts, PartitionCompleteness) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const DenseLP lp = fixtures::random_bounded(7, 3, seed);
    const Cross cross(Vector(7, 0.8), 0.3, 6);
    const auto whole = process_cohorts(lp, cross, all_cohorts(7));
    for (std::size_t parts = 1; parts <= 7; ++parts) {
      std::vector<CohortBest> joined;
      for (std::size_t p = 0; p < parts; ++p) {
        const bsf::Range r = bsf::block_partition(7, parts, p);
        std::vector<int> chunk;
        for (std::size_t chi = r.begin; chi < r.end; ++chi) chunk.push_back(static_cast<int>(chi));
        for (auto& b : process_cohorts(lp, cross, chunk)) joined.push_back(std::move(b));
      }
      EXPECT_EQ(joined, whole);
    }
  }
}

TEST(Evaluate, UnitSquareMovesToCentroid) {
  const DenseLP sq = fixtures::unit_square();
  const TargetingState s = start_state({0.5, 0.5}, 0.25, 4);
  const TargetingState next = evaluate(sq, s, process_cohorts(sq, s.cross, {0, 1}));
  EXPECT_EQ(next.cross.center(), (Vector{0.75, 0.75}));
  EXPECT_TRUE(next.moved);
  EXPECT_EQ(next.clock, 1u);
  EXPECT_EQ(next.last_q_size, 2u);
}

TEST(Evaluate, HoldsAtOptimalVertex) {
  const DenseLP sq = fixtures::unit_square();
  const TargetingState s = start_state({1.0, 1.0}, 0.25, 4);
  const auto bests = process_cohorts(sq, s.cross, {0, 1});
  const TargetingState next = evaluate(sq, s, bests);
  EXPECT_EQ(next.cross, s.cross);
  EXPECT_FALSE(next.moved);
  EXPECT_EQ(next.clock, 1u);
  // Holding is idempotent on stationary input.
  const TargetingState again = evaluate(sq, next, bests);
  EXPECT_EQ(again.cross, s.cross);
  EXPECT_FALSE(again.moved);
  EXPECT_EQ(again.clock, 2u);
}

TEST(Evaluate, HoldsOnEqualValue) {
  // c = (1, 0): at (1, 0.5) the best of cohort 1 ties the center, so the center stays.
  const DenseLP lp = fixtures::from_rows({{1, 0}, {0, 1}}, {1, 1}, {1, 0});
  const TargetingState s = start_state({1.0, 0.5}, 0.25, 2);
  const TargetingState next = evaluate(lp, s, process_cohorts(lp, s.cross, {0, 1}));
  EXPECT_FALSE(next.moved);
}

TEST(Evaluate, InfeasibleCenterMovesEvenIfBetter) {
  const DenseLP sq = fixtures::unit_square();
  const TargetingState s = start_state({1.25, 0.5}, 0.25, 4);
  const TargetingState next = evaluate(sq, s, process_cohorts(sq, s.cross, {0, 1}));
  EXPECT_TRUE(next.moved);
}

TEST(Evaluate, EmptyCandidateSetHoldsAndCountsStalls) {
  const DenseLP sq = fixtures::unit_square();
  TargetingState s = start_state({9.0, 9.0}, 0.25, 4);
  for (std::size_t k = 1; k <= 3; ++k) {
    s = evaluate(sq, s, process_cohorts(sq, s.cross, {0, 1}));
    EXPECT_EQ(s.cross.center(), (Vector{9.0, 9.0}));
    EXPECT_FALSE(s.moved);
    EXPECT_EQ(s.stall_count, k);
    EXPECT_EQ(s.last_q_size, 0u);
  }
}

TEST(Evaluate, RejectsMalformedBests) {
  const DenseLP sq = fixtures::unit_square();
  const TargetingState s = start_state({0.5, 0.5}, 0.25, 4);
  auto bests = process_cohorts(sq, s.cross, {0, 1});
  EXPECT_THROW(evaluate(sq, s, {bests[0]}), std::invalid_argument);
  EXPECT_THROW(evaluate(sq, s, {bests[0], bests[0]}), std::invalid_argument);
  auto broken = bests;
  broken[1].value.reset();
  EXPECT_THROW(evaluate(sq, s, broken), std::invalid_argument);
  broken = bests;
  broken[1].cohort = 5;
  EXPECT_THROW(evaluate(sq, s, broken), std::invalid_argument);
}

TEST(Evaluate, CentroidStaysFeasible) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const DenseLP lp = fixtures::random_bounded(5, 4, 40 + seed);
    TargetingState s = start_state(Vector(5, 0.4), 0.2, 8);
    for (int it = 0; it < 30; ++it) {
      const auto bests = process_cohorts(lp, s.cross, all_cohorts(5));
      s = evaluate(lp, s, bests);
      if (s.last_q_size > 0) {
        EXPECT_EQ(max_violation(lp, s.cross.center()), 0.0);
      }
    }
  }
}

TEST(Evaluate, ObjectiveNonDecreasingOnUnitSquareFamily) {
  // Squares [0, a] x [0, a] with symmetric objectives, started from feasible dyadic centers.
  // Near the vertex the centroid alternates between equal-valued points, so only closeness is asserted.
  for (double a : {1.0, 2.0, 4.0}) {
    for (double s : {0.125, 0.25}) {
      const DenseLP sq = fixtures::from_rows({{1, 0}, {0, 1}}, {a, a}, {1, 1});
      TargetingState st = start_state({a / 8, a / 4}, s, 4);
      double prev = dot(sq.c(), st.cross.center());
      for (int it = 0; it < 100; ++it) {
        st = evaluate(sq, st, process_cohorts(sq, st.cross, {0, 1}));
        const double now = dot(sq.c(), st.cross.center());
        EXPECT_GE(now, prev) << "a=" << a << " s=" << s << " it=" << it;
        prev = now;
      }
      EXPECT_EQ(max_violation(sq, st.cross.center()), 0.0);
      EXPECT_LE(2 * a - dot(sq.c(), st.cross.center()), 2 * s);
    }
  }
}

TEST(RunTargeting, OneIterationReproducesHandStep) {
  const NonStationaryLP p(fixtures::unit_square());
  TargetingConfig cfg;
  cfg.spacing = 0.25;
  cfg.points_per_cohort = 4;
  const TrackingRun run = run_targeting(p, {0.5, 0.5}, cfg, 1, sim(1));
  ASSERT_EQ(run.trace.rows.size(), 1u);
  EXPECT_EQ(run.trace.rows[0].center, (Vector{0.75, 0.75}));
  EXPECT_EQ(run.trace.rows[0].objective, 1.5);
  EXPECT_TRUE(run.trace.rows[0].moved);
}

TEST(RunTargeting, Errors) {
  const NonStationaryLP p(fixtures::unit_square());
  EXPECT_THROW(run_targeting(p, {0.5}, TargetingConfig{}, 5, sim(1)), std::invalid_argument);
  EXPECT_THROW(run_targeting(p, {0.5, 0.5}, TargetingConfig{}, 0, sim(1)), std::invalid_argument);
  EXPECT_THROW(run_targeting(p, {0.5, 0.5}, TargetingConfig{}, 5, sim(3)), std::invalid_argument);
}

TEST(RunTargeting, ClockAdvancesOncePerIteration) {
  const NonStationaryLP p(model_n(6));
  TargetingConfig cfg;
  cfg.start_clock = 7;
  const TrackingRun run = run_targeting(p, Vector(6, 1.0), cfg, 20, sim(2));
  for (std::size_t i = 0; i < run.trace.rows.size(); ++i) {
    EXPECT_EQ(run.trace.rows[i].iter, i);
    EXPECT_EQ(run.trace.rows[i].clock, 7 + i);
  }
}

TEST(RunTargeting, StallLimitTriggersReacquisition) {
  const NonStationaryLP p(fixtures::unit_square());
  TargetingConfig cfg;
  cfg.spacing = 0.25;
  cfg.points_per_cohort = 4;
  cfg.stall_limit = 3;
  // Quest lands on the edge x1 = 1 only up to its tolerance; cohort 0 still has interior points from there.
  const TrackingRun run = run_targeting(p, {9.0, 0.5}, cfg, 6, sim(1));
  EXPECT_EQ(run.trace.stalls, 3u);
  EXPECT_EQ(run.trace.reacquisitions, 1u);
  EXPECT_LE(max_violation(p.base(), run.trace.rows[2].center), 1e-9);
  EXPECT_LE(max_violation(p.base(), run.trace.rows.back().center), 1e-9);
}

TEST(RunTargeting, TranslateDriftStaysClose) {
  // |v| = s/2 along the diagonal; the optimum vertex moves from (1, 1) by k v.
  const double s = 0.1;
  const double step = s / 2 / std::sqrt(2.0);
  const NonStationaryLP p(fixtures::unit_square(), DriftSpec{DriftKind::translate, {step, step}, 0.0, 0.0, 0});
  TargetingConfig cfg;
  cfg.spacing = s;
  const TrackingRun run = run_targeting(p, {0.5, 0.5}, cfg, 250, sim(2));
  double worst = 0.0;
  for (std::size_t i = 50; i < run.trace.rows.size(); ++i) {
    const auto& r = run.trace.rows[i];
    const double k = static_cast<double>(r.clock);
    worst = std::max(worst, distance(r.center, Vector{1.0 + k * step, 1.0 + k * step}));
  }
  EXPECT_LE(worst, 4 * s);
}

TEST(TraceCsv, HeaderAndRows) {
  TrackingTrace t;
  t.rows.push_back({0, 3, {0.5, 0.25}, 0.75, 0.0, true, 1.25});
  t.rows.push_back({1, 4, {0.5, 0.25}, 0.75, 0.0, false, std::nullopt});
  std::ostringstream os;
  write_trace_csv(os, t);
  EXPECT_EQ(os.str(),
            "iter,clock,x0,x1,objective,residual,moved,oracle_gap\n"
            "0,3,0.5,0.25,0.75,0,1,1.25\n"
            "1,4,0.5,0.25,0.75,0,0,\n");
}
