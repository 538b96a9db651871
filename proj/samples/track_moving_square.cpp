// Follows the optimum of max x + y over a unit square that slides along the diagonal.

#include <cmath>
#include <iostream>

#include "nslp/nslp.hpp"

int main() {
  nslp::Matrix a(2, 2);
  a(0, 0) = 1.0;
  a(1, 1) = 1.0;
  nslp::DenseLP square(a, {1.0, 1.0}, {1.0, 1.0});

  const double s = 0.1;
  nslp::DriftSpec drift;
  drift.kind = nslp::DriftKind::translate;
  drift.translate_vector = {s / 4.0 / std::sqrt(2.0), s / 4.0 / std::sqrt(2.0)};
  const nslp::NonStationaryLP problem(square, drift);

  nslp::TargetingConfig cfg;
  cfg.spacing = s;
  cfg.points_per_cohort = 8;
  const auto quest = nslp::pseudo_project(problem, nslp::Vector{0.0, 0.0}, cfg.quest, 0);
  cfg.start_clock = quest.clock;

  nslp::bsf::Options exec;
  exec.workers = 2;
  exec.backend = nslp::bsf::Backend::sequential_sim;
  const auto run = nslp::run_targeting(problem, quest.z, cfg, 100, exec);

  for (const auto& row : run.trace.rows) {
    if (row.iter % 10 != 0) continue;
    const auto b = problem.translated_b(row.clock);
    std::cout << "iter " << row.iter << "  center (" << row.center[0] << ", " << row.center[1] << ")  optimum ("
              << b[0] << ", " << b[1] << ")  distance "
              << nslp::distance(row.center, nslp::Vector{b[0], b[1]}) << '\n';
  }
}
