#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nslp/lp.hpp"

namespace nslp {

/// Closed-form optimum of a generated instance.
struct KnownOptimum {
  Vector x;
  double value = 0.0;
};

/// Scalable synthetic LP family with n variables and 2(n+1) constraints:
///
///   x_i <= theta,  -x_i <= 0           (i = 0..n-1)
///   sum x_i <= theta (n+1) / 2,  -sum x_i <= 0
///
/// The objective weights are a permutation of (n, n-1, ..., 1). Seed 0 keeps them in
/// descending order; any other seed shuffles them. Weights are distinct, so the greedy fill
/// of the coupling budget is the unique optimum.
class ModelN {
 public:
  explicit ModelN(double theta = 200.0) : theta_(theta) {
    if (!(theta > 0.0)) throw std::invalid_argument("ModelN: theta must be positive");
  }

  double theta() const noexcept { return theta_; }

  DenseLP generate(std::size_t n, std::uint64_t seed = 0) const {
    check(n);
    const std::size_t m = 2 * (n + 1);
    Matrix a(m, n);
    Vector b(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      a(i, i) = 1.0;
      b[i] = theta_;
      a(n + i, i) = -1.0;
    }
    for (std::size_t j = 0; j < n; ++j) {
      a(2 * n, j) = 1.0;
      a(2 * n + 1, j) = -1.0;
    }
    b[2 * n] = coupling_budget(n);
    return DenseLP(std::move(a), std::move(b), weights(n, seed));
  }

  KnownOptimum optimum(std::size_t n, std::uint64_t seed = 0) const {
    check(n);
    const Vector c = weights(n, seed);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&c](std::size_t l, std::size_t r) { return c[l] > c[r]; });

    KnownOptimum opt{Vector(n, 0.0), 0.0};
    double budget = coupling_budget(n);
    for (std::size_t j : order) {
      const double take = std::min(theta_, budget);
      opt.x[j] = take;
      budget -= take;
      if (budget <= 0.0) break;
    }
    for (std::size_t j = 0; j < n; ++j) opt.value += c[j] * opt.x[j];
    return opt;
  }

 private:
  static void check(std::size_t n) {
    if (n < 2) throw std::invalid_argument("Model-n: dimension must be >= 2");
  }

  double coupling_budget(std::size_t n) const { return theta_ * static_cast<double>(n + 1) / 2.0; }

  static Vector weights(std::size_t n, std::uint64_t seed) {
    Vector c(n);
    for (std::size_t j = 0; j < n; ++j) c[j] = static_cast<double>(n - j);
    if (seed != 0) {
      std::mt19937_64 rng(seed);
      std::shuffle(c.begin(), c.end(), rng);
    }
    return c;
  }

  double theta_;
};

inline DenseLP model_n(std::size_t n, std::uint64_t seed = 0) { return ModelN{}.generate(n, seed); }

inline KnownOptimum model_n_optimum(std::size_t n, std::uint64_t seed = 0) { return ModelN{}.optimum(n, seed); }

}  // namespace nslp
