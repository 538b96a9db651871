#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "nslp/lp.hpp"

namespace fixtures {

inline nslp::DenseLP from_rows(const std::vector<nslp::Vector>& rows, nslp::Vector b, nslp::Vector c) {
  nslp::Matrix a(rows.size(), c.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < c.size(); ++j) a(i, j) = rows[i][j];
  }
  return nslp::DenseLP(std::move(a), std::move(b), std::move(c));
}

/// max x1 + x2 s.t. x1 <= 1, x2 <= 1 (x >= 0 implicit).
inline nslp::DenseLP unit_square() { return from_rows({{1, 0}, {0, 1}}, {1, 1}, {1, 1}); }

/// 1-D style instance: x1 <= 1 with a free second variable bounded by 10.
inline nslp::DenseLP half_line() { return from_rows({{1, 0}, {0, 1}}, {1, 10}, {1, 0}); }

/// Random bounded LP: box rows x_j <= u_j plus `extra` random rows with positive right-hand sides,
/// so the origin is feasible and the region is bounded.
inline nslp::DenseLP random_bounded(std::size_t n, std::size_t extra, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coef(-1.0, 1.0), upper(1.0, 5.0), rhs(1.0, 4.0), obj(0.1, 2.0);
  std::vector<nslp::Vector> rows;
  nslp::Vector b;
  for (std::size_t j = 0; j < n; ++j) {
    nslp::Vector r(n, 0.0);
    r[j] = 1.0;
    rows.push_back(r);
    b.push_back(upper(rng));
  }
  for (std::size_t i = 0; i < extra; ++i) {
    nslp::Vector r(n);
    for (auto& v : r) v = coef(rng);
    rows.push_back(r);
    b.push_back(rhs(rng));
  }
  nslp::Vector c(n);
  for (auto& v : c) v = obj(rng);
  return from_rows(rows, b, c);
}

}  // namespace fixtures
