#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nslp/lp.hpp"

namespace nslp {

enum class DriftKind { none, translate, random_sparse };

struct DriftSpec {
  DriftKind kind = DriftKind::none;
  Vector translate_vector;  ///< per-time-unit shift of the feasible region (translate)
  double delta = 0.0;       ///< fraction of A, b, c entries changed per time unit (random_sparse)
  double magnitude = 0.0;   ///< half-width of the uniform perturbation (random_sparse)
  std::uint64_t seed = 0;
};

/// Number of entries out of `count` touched by a change fraction `delta`, i.e. ceil(delta * count).
/// Products within 1e-9 (relative) of an integer are snapped first, so that
/// delta = 1/(2(n+1)) over 2(n+1) rows yields exactly one entry despite rounding in delta.
inline std::size_t changed_entries(double delta, std::size_t count) {
  const double x = delta * static_cast<double>(count);
  const double r = std::round(x);
  const double k = std::abs(x - r) <= 1e-9 * std::max(1.0, x) ? r : std::ceil(x);
  return std::min(count, static_cast<std::size_t>(std::max(0.0, k)));
}

/// An LP whose data evolves in discrete time units. The state at clock 0 is `base`.
class NonStationaryLP {
 public:
  NonStationaryLP(DenseLP base, DriftSpec drift) : base_(std::move(base)), drift_(std::move(drift)) {
    if (!(drift_.delta >= 0.0 && drift_.delta <= 1.0)) throw std::invalid_argument("DriftSpec: delta must be in [0,1]");
    if (!(drift_.magnitude >= 0.0)) throw std::invalid_argument("DriftSpec: magnitude must be >= 0");
    if (drift_.kind == DriftKind::translate) {
      require_length(drift_.translate_vector, base_.n(), "DriftSpec: translate_vector");
      shift_.assign(base_.m(), 0.0);
      for (std::size_t i = 0; i < base_.m(); ++i) shift_[i] = dot(base_.a().row(i), drift_.translate_vector);
    }
  }

  explicit NonStationaryLP(DenseLP base) : NonStationaryLP(std::move(base), DriftSpec{}) {}

  const DenseLP& base() const noexcept { return base_; }
  const DriftSpec& drift() const noexcept { return drift_; }
  std::size_t n() const noexcept { return base_.n(); }
  std::size_t m() const noexcept { return base_.m(); }
  bool stationary() const noexcept {
    return drift_.kind == DriftKind::none || (drift_.kind == DriftKind::random_sparse && drift_.delta == 0.0);
  }

  /// b_k = b + k * A v, so the explicit constraints describe M_0 + k v.
  Vector translated_b(std::uint64_t k) const {
    Vector b = base_.b();
    const double kd = static_cast<double>(k);
    for (std::size_t i = 0; i < b.size(); ++i) b[i] += kd * shift_[i];
    return b;
  }

  /// Random change applied on the transition from clock `step` to `step + 1`, relative to `current`.
  /// The positions are drawn without replacement, the values are old + U[-magnitude, magnitude].
  SparseDelta random_step(const DenseLP& current, std::uint64_t step) const {
    SparseDelta d;
    if (drift_.kind != DriftKind::random_sparse || drift_.delta == 0.0) return d;
    std::mt19937_64 rng(step_seed(step));
    std::uniform_real_distribution<double> noise(-drift_.magnitude, drift_.magnitude);
    auto perturb = [&](double old) {
      if (drift_.magnitude == 0.0) return old;
      double v = old;
      while (v == old) v = old + noise(rng);
      return v;
    };
    const std::size_t n = current.n();
    for (std::size_t k : sample_positions(rng, current.m() * n, changed_entries(drift_.delta, current.m() * n))) {
      d.a_changes.push_back({k / n, k % n, perturb(current.a().flat()[k])});
    }
    for (std::size_t i : sample_positions(rng, current.m(), changed_entries(drift_.delta, current.m()))) {
      d.b_changes.push_back({i, perturb(current.b()[i])});
    }
    for (std::size_t j : sample_positions(rng, n, changed_entries(drift_.delta, n))) {
      d.c_changes.push_back({j, perturb(current.c()[j])});
    }
    return d;
  }

 private:
  std::uint64_t step_seed(std::uint64_t step) const {
    // splitmix64 finalizer over (seed, step)
    std::uint64_t z = drift_.seed + 0x9E3779B97F4A7C15ull * (step + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
  }

  // Floyd's sampling of `k` distinct positions out of [0, count), returned sorted.
  static std::vector<std::size_t> sample_positions(std::mt19937_64& rng, std::size_t count, std::size_t k) {
    std::vector<std::size_t> out;
    if (k == 0) return out;
    if (k == count) {
      out.resize(count);
      for (std::size_t i = 0; i < count; ++i) out[i] = i;
      return out;
    }
    std::vector<bool> taken(count, false);
    out.reserve(k);
    for (std::size_t j = count - k; j < count; ++j) {
      const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
      const std::size_t pick = taken[t] ? j : t;
      taken[pick] = true;
      out.push_back(pick);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  DenseLP base_;
  DriftSpec drift_;
  Vector shift_;
};

/// Walks a NonStationaryLP forward one time unit at a time without replaying from clock 0.
class DriftCursor {
 public:
  explicit DriftCursor(const NonStationaryLP& problem) : problem_(&problem), current_(problem.base()) {}

  DriftCursor(const NonStationaryLP& problem, std::uint64_t clock) : DriftCursor(problem) { advance_to(clock); }

  std::uint64_t clock() const noexcept { return clock_; }
  const DenseLP& current() const noexcept { return current_; }

  void advance() {
    switch (problem_->drift().kind) {
      case DriftKind::none:
        break;
      case DriftKind::translate:
        current_.mutable_b() = problem_->translated_b(clock_ + 1);
        break;
      case DriftKind::random_sparse:
        apply_delta_in_place(current_, problem_->random_step(current_, clock_));
        break;
    }
    ++clock_;
  }

  void advance_to(std::uint64_t clock) {
    if (clock < clock_) throw std::invalid_argument("DriftCursor: cannot move backwards in time");
    if (problem_->drift().kind == DriftKind::translate) {
      current_.mutable_b() = problem_->translated_b(clock);
      clock_ = clock;
      return;
    }
    if (problem_->stationary()) {
      clock_ = clock;
      return;
    }
    while (clock_ < clock) advance();
  }

 private:
  const NonStationaryLP* problem_;
  DenseLP current_;
  std::uint64_t clock_ = 0;
};

/// State of the problem at time unit k. Pure: equal arguments give bit-identical results.
inline DenseLP snapshot(const NonStationaryLP& problem, std::uint64_t k) {
  return DriftCursor(problem, k).current();
}

}  // namespace nslp
