#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

#include "nslp/drift.hpp"
#include "nslp/lp.hpp"

namespace nslp {

/// A constraint row with zero norm that can never be satisfied (0 <= b_i with b_i < 0).
class MalformedProblem : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct FejerConfig {
  double relaxation = 1.0;  ///< lambda, in (0, 2)
  double tolerance = 1e-9;  ///< accept once max_violation <= tolerance
  std::uint64_t max_iterations = 1'000'000;
  std::uint64_t refresh_every = 1000;  ///< inner iterations per time unit of drift

  void validate() const {
    if (!(relaxation > 0.0 && relaxation < 2.0)) throw std::invalid_argument("FejerConfig: relaxation must be in (0,2)");
    if (!(tolerance >= 0.0)) throw std::invalid_argument("FejerConfig: tolerance must be >= 0");
    if (max_iterations < 1) throw std::invalid_argument("FejerConfig: max_iterations must be >= 1");
    if (refresh_every < 1) throw std::invalid_argument("FejerConfig: refresh_every must be >= 1");
  }
};

/// One application of the simultaneous Fejer map
///
///   x <- x + lambda * mean_{i violated} ((b_i - <A_i, x>) / |A_i|^2) A_i
///
/// where the n bounds -x_j <= 0 count as extra half-spaces. Feasible points are fixed points.
inline Vector fejer_step(const DenseLP& lp, std::span<const double> x, double relaxation) {
  require_length(x, lp.n(), "fejer_step: x");
  if (!(relaxation > 0.0 && relaxation < 2.0)) throw std::invalid_argument("fejer_step: relaxation must be in (0,2)");

  const std::size_t n = lp.n();
  Vector shift(n, 0.0);
  std::size_t violated = 0;
  for (std::size_t i = 0; i < lp.m(); ++i) {
    const auto row = lp.a().row(i);
    const double excess = dot(row, x) - lp.b()[i];
    if (excess <= 0.0) continue;
    const double norm2 = squared_norm(row);
    if (norm2 == 0.0) throw MalformedProblem("constraint row " + std::to_string(i) + " has zero norm and negative bound");
    const double scale = -excess / norm2;
    for (std::size_t j = 0; j < n; ++j) shift[j] += scale * row[j];
    ++violated;
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (x[j] < 0.0) {
      shift[j] -= x[j];
      ++violated;
    }
  }

  Vector out(x.begin(), x.end());
  if (violated == 0) return out;
  const double weight = relaxation / static_cast<double>(violated);
  bool moved = false;
  for (std::size_t j = 0; j < n; ++j) {
    const double before = out[j];
    out[j] += weight * shift[j];
    moved = moved || out[j] != before;
  }
  // A sub-ulp correction would make an infeasible point a fixed point; take one ulp instead.
  if (!moved) {
    for (std::size_t j = 0; j < n; ++j) {
      if (shift[j] != 0.0) out[j] = std::nextafter(out[j], shift[j] > 0.0 ? HUGE_VAL : -HUGE_VAL);
    }
  }
  return out;
}

struct QuestResult {
  Vector z;
  std::uint64_t iterations = 0;
  double residual = 0.0;
  std::uint64_t clock = 0;  ///< time unit of the snapshot the residual refers to
  bool converged = false;
};

/// Pseudo-projection of `start` onto the drifting feasible set. Every `refresh_every`
/// iterations one time unit passes and the snapshot is re-read. On budget exhaustion the
/// last iterate is returned with converged = false.
inline QuestResult pseudo_project(const NonStationaryLP& problem, std::span<const double> start, const FejerConfig& cfg,
                                  std::uint64_t clock) {
  cfg.validate();
  require_length(start, problem.n(), "pseudo_project: start");

  DriftCursor cursor(problem, clock);
  QuestResult result;
  result.z.assign(start.begin(), start.end());
  result.residual = max_violation(cursor.current(), result.z);

  while (result.residual > cfg.tolerance && result.iterations < cfg.max_iterations) {
    result.z = fejer_step(cursor.current(), result.z, cfg.relaxation);
    ++result.iterations;
    if (result.iterations % cfg.refresh_every == 0) cursor.advance();
    result.residual = max_violation(cursor.current(), result.z);
  }
  result.clock = cursor.clock();
  result.converged = result.residual <= cfg.tolerance;
  return result;
}

}  // namespace nslp
