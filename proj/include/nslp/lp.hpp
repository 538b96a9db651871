#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "nslp/linalg.hpp"

namespace nslp {

/// max <c, x> subject to A x <= b, x >= 0. The bound x >= 0 is implicit and never stored.
class DenseLP {
 public:
  DenseLP(Matrix a, Vector b, Vector c) : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    if (a_.cols() < 2) throw std::invalid_argument("DenseLP: need n >= 2 variables");
    if (a_.rows() < 1) throw std::invalid_argument("DenseLP: need m >= 1 constraints");
    require_length(b_, a_.rows(), "DenseLP: b");
    require_length(c_, a_.cols(), "DenseLP: c");
    auto finite = [](double v) { return std::isfinite(v); };
    if (!std::all_of(a_.flat().begin(), a_.flat().end(), finite) ||
        !std::all_of(b_.begin(), b_.end(), finite) || !std::all_of(c_.begin(), c_.end(), finite)) {
      throw std::invalid_argument("DenseLP: non-finite coefficient");
    }
  }

  std::size_t n() const noexcept { return a_.cols(); }
  std::size_t m() const noexcept { return a_.rows(); }

  const Matrix& a() const noexcept { return a_; }
  const Vector& b() const noexcept { return b_; }
  const Vector& c() const noexcept { return c_; }

  // Mutable access for incremental updates; callers keep entries finite.
  Matrix& mutable_a() noexcept { return a_; }
  Vector& mutable_b() noexcept { return b_; }
  Vector& mutable_c() noexcept { return c_; }

  friend bool operator==(const DenseLP&, const DenseLP&) = default;

 private:
  Matrix a_;
  Vector b_;
  Vector c_;
};

struct MatrixEntry {
  std::size_t row;
  std::size_t col;
  double value;
  friend bool operator==(const MatrixEntry&, const MatrixEntry&) = default;
};

struct VectorEntry {
  std::size_t index;
  double value;
  friend bool operator==(const VectorEntry&, const VectorEntry&) = default;
};

/// New values for a subset of A, b and c entries.
struct SparseDelta {
  std::vector<MatrixEntry> a_changes;
  std::vector<VectorEntry> b_changes;
  std::vector<VectorEntry> c_changes;

  bool empty() const noexcept { return a_changes.empty() && b_changes.empty() && c_changes.empty(); }
  std::size_t size() const noexcept { return a_changes.size() + b_changes.size() + c_changes.size(); }
  friend bool operator==(const SparseDelta&, const SparseDelta&) = default;
};

inline double objective_value(const DenseLP& lp, std::span<const double> x) {
  require_length(x, lp.n(), "objective_value: x");
  return dot(lp.c(), x);
}

/// max(0, max_i(<A_i,x> - b_i), max_j(-x_j)). Zero exactly when x is in the feasible set.
inline double max_violation(const DenseLP& lp, std::span<const double> x) {
  require_length(x, lp.n(), "max_violation: x");
  double worst = 0.0;
  for (double xj : x) worst = std::max(worst, -xj);
  for (std::size_t i = 0; i < lp.m(); ++i) worst = std::max(worst, dot(lp.a().row(i), x) - lp.b()[i]);
  return worst;
}

/// Same predicate as max_violation(lp, x) == 0, stopping at the first violated constraint.
inline bool is_member(const DenseLP& lp, std::span<const double> x) {
  require_length(x, lp.n(), "is_member: x");
  for (double xj : x) {
    if (xj < 0.0) return false;
  }
  for (std::size_t i = 0; i < lp.m(); ++i) {
    if (dot(lp.a().row(i), x) > lp.b()[i]) return false;
  }
  return true;
}

namespace detail {

inline void check_delta_indices(const DenseLP& lp, const SparseDelta& d) {
  for (const auto& e : d.a_changes) {
    if (e.row >= lp.m() || e.col >= lp.n()) throw std::out_of_range("SparseDelta: A index out of range");
  }
  for (const auto& e : d.b_changes) {
    if (e.index >= lp.m()) throw std::out_of_range("SparseDelta: b index out of range");
  }
  for (const auto& e : d.c_changes) {
    if (e.index >= lp.n()) throw std::out_of_range("SparseDelta: c index out of range");
  }
}

}  // namespace detail

/// In-place variant of apply_delta; indices are validated before any entry is written.
inline void apply_delta_in_place(DenseLP& lp, const SparseDelta& d) {
  detail::check_delta_indices(lp, d);
  for (const auto& e : d.a_changes) lp.mutable_a()(e.row, e.col) = e.value;
  for (const auto& e : d.b_changes) lp.mutable_b()[e.index] = e.value;
  for (const auto& e : d.c_changes) lp.mutable_c()[e.index] = e.value;
}

inline DenseLP apply_delta(const DenseLP& lp, const SparseDelta& d) {
  DenseLP out = lp;
  apply_delta_in_place(out, d);
  return out;
}

/// Minimal delta turning `prev` into `next`. Entries are compared bitwise-equal as doubles,
/// so -0.0 vs 0.0 counts as unchanged.
inline SparseDelta delta_between(const DenseLP& prev, const DenseLP& next) {
  if (prev.m() != next.m() || prev.n() != next.n()) throw std::invalid_argument("delta_between: shape mismatch");
  SparseDelta d;
  const auto pa = prev.a().flat();
  const auto na = next.a().flat();
  const std::size_t n = prev.n();
  for (std::size_t k = 0; k < pa.size(); ++k) {
    if (pa[k] != na[k]) d.a_changes.push_back({k / n, k % n, na[k]});
  }
  for (std::size_t i = 0; i < prev.m(); ++i) {
    if (prev.b()[i] != next.b()[i]) d.b_changes.push_back({i, next.b()[i]});
  }
  for (std::size_t j = 0; j < n; ++j) {
    if (prev.c()[j] != next.c()[j]) d.c_changes.push_back({j, next.c()[j]});
  }
  return d;
}

// Plain-text problem format: "n m", then m rows of n coefficients, then b (m values), then c (n values).

inline void write_problem(std::ostream& os, const DenseLP& lp) {
  const auto old_precision = os.precision(std::numeric_limits<double>::max_digits10);
  os << lp.n() << ' ' << lp.m() << '\n';
  for (std::size_t i = 0; i < lp.m(); ++i) {
    const auto row = lp.a().row(i);
    for (std::size_t j = 0; j < lp.n(); ++j) os << (j ? " " : "") << row[j];
    os << '\n';
  }
  for (std::size_t i = 0; i < lp.m(); ++i) os << (i ? " " : "") << lp.b()[i];
  os << '\n';
  for (std::size_t j = 0; j < lp.n(); ++j) os << (j ? " " : "") << lp.c()[j];
  os << '\n';
  os.precision(old_precision);
}

inline DenseLP read_problem(std::istream& is) {
  long long n = 0, m = 0;
  if (!(is >> n >> m) || n < 2 || m < 1) throw std::runtime_error("read_problem: bad header, expected 'n m'");
  auto read_value = [&is](const char* section) {
    double v;
    if (!(is >> v)) throw std::runtime_error(std::string("read_problem: truncated ") + section);
    return v;
  };
  Matrix a(static_cast<std::size_t>(m), static_cast<std::size_t>(n));
  for (double& v : a.flat()) v = read_value("matrix");
  Vector b(static_cast<std::size_t>(m));
  for (double& v : b) v = read_value("b");
  Vector c(static_cast<std::size_t>(n));
  for (double& v : c) v = read_value("c");
  return DenseLP(std::move(a), std::move(b), std::move(c));
}

inline DenseLP load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open problem file: " + path);
  return read_problem(in);
}

}  // namespace nslp
