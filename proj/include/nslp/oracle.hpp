#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <stdexcept>
#include <vector>

#include "nslp/lp.hpp"

namespace nslp::oracle {

enum class SimplexStatus { optimal, unbounded, infeasible };

struct SimplexResult {
  SimplexStatus status = SimplexStatus::infeasible;
  std::optional<Vector> x_opt;
  std::optional<double> value;
  std::size_t iterations = 0;
  /// Final basis over the columns [A | I] (structural 0..n-1, slack n..n+m-1), one per row.
  std::vector<std::size_t> basis;
};

namespace detail {

constexpr double kPivotTol = 1e-9;

/// Dense tableau with Bland's rule. Columns: n structural, m slack, then artificials.
class Tableau {
 public:
  Tableau(const DenseLP& lp) : m_(lp.m()), n_(lp.n()) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (lp.b()[i] < 0.0) artificial_rows_.push_back(i);
    }
    cols_ = n_ + m_ + artificial_rows_.size();
    t_.assign((m_ + 1) * (cols_ + 1), 0.0);
    basis_.assign(m_, 0);
    std::size_t next_art = n_ + m_;
    for (std::size_t i = 0; i < m_; ++i) {
      const double sign = lp.b()[i] < 0.0 ? -1.0 : 1.0;
      for (std::size_t j = 0; j < n_; ++j) at(i, j) = sign * lp.a()(i, j);
      at(i, n_ + i) = sign;
      rhs(i) = sign * lp.b()[i];
      if (sign < 0.0) {
        at(i, next_art) = 1.0;
        basis_[i] = next_art++;
      } else {
        basis_[i] = n_ + i;
      }
    }
  }

  bool needs_phase_one() const { return !artificial_rows_.empty(); }
  bool is_artificial(std::size_t col) const { return col >= n_ + m_; }

  /// Loads the objective row for maximizing <cost, columns>: row[j] = c_B B^-1 A_j - cost_j.
  void set_objective(const std::vector<double>& cost) {
    for (std::size_t j = 0; j <= cols_; ++j) {
      double v = j < cols_ ? -cost[j] : 0.0;
      for (std::size_t i = 0; i < m_; ++i) v += cost[basis_[i]] * at(i, j);
      obj(j) = v;
    }
  }

  /// Runs Bland pivots; returns false on an unbounded ray.
  bool optimize(bool allow_artificial, std::size_t& iterations) {
    for (;;) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (!allow_artificial && is_artificial(j)) continue;
        if (obj(j) < -kPivotTol) {
          enter = j;
          break;
        }
      }
      if (!enter) return true;
      std::optional<std::size_t> leave;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < m_; ++i) {
        const double a = at(i, *enter);
        if (a <= kPivotTol) continue;
        const double ratio = rhs(i) / a;
        if (ratio < best_ratio - kPivotTol || (std::abs(ratio - best_ratio) <= kPivotTol && basis_[i] < basis_[*leave])) {
          best_ratio = ratio;
          leave = i;
        }
      }
      if (!leave) return false;
      pivot(*leave, *enter);
      ++iterations;
    }
  }

  /// Pivots basic artificials (all at zero level after a successful phase one) out of the basis.
  void drive_out_artificials(std::size_t& iterations) {
    for (std::size_t i = 0; i < m_; ++i) {
      if (!is_artificial(basis_[i])) continue;
      std::size_t best = cols_;
      for (std::size_t j = 0; j < n_ + m_; ++j) {
        if (std::abs(at(i, j)) > kPivotTol && (best == cols_ || std::abs(at(i, j)) > std::abs(at(i, best)))) best = j;
      }
      if (best == cols_) throw std::logic_error("simplex: [A | I] lost full row rank");
      pivot(i, best);
      ++iterations;
    }
  }

  double objective_value() const { return obj(cols_); }
  std::size_t cols() const { return cols_; }
  const std::vector<std::size_t>& basis() const { return basis_; }

  Vector structural_solution() const {
    Vector x(n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
      if (basis_[i] < n_) x[basis_[i]] = rhs(i);
    }
    return x;
  }

 private:
  double& at(std::size_t i, std::size_t j) { return t_[i * (cols_ + 1) + j]; }
  double at(std::size_t i, std::size_t j) const { return t_[i * (cols_ + 1) + j]; }
  double& rhs(std::size_t i) { return at(i, cols_); }
  double rhs(std::size_t i) const { return at(i, cols_); }
  double& obj(std::size_t j) { return at(m_, j); }
  double obj(std::size_t j) const { return at(m_, j); }

  void pivot(std::size_t r, std::size_t c) {
    const double p = at(r, c);
    for (std::size_t j = 0; j <= cols_; ++j) at(r, j) /= p;
    for (std::size_t i = 0; i <= m_; ++i) {
      if (i == r) continue;
      const double f = at(i, c);
      if (f == 0.0) continue;
      for (std::size_t j = 0; j <= cols_; ++j) at(i, j) -= f * at(r, j);
    }
    basis_[r] = c;
  }

  std::size_t m_, n_, cols_ = 0;
  std::vector<std::size_t> artificial_rows_;
  std::vector<double> t_;
  std::vector<std::size_t> basis_;
};

/// Gaussian elimination with partial pivoting; nullopt when the system is singular.
inline std::optional<Vector> solve_dense(std::vector<Vector> a, Vector b) {
  const std::size_t n = b.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    }
    if (std::abs(a[piv][col]) < 1e-12) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = col + 1; r < n; ++r) {
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t k = col; k < n; ++k) a[r][k] -= f * a[col][k];
      b[r] -= f * b[col];
    }
  }
  Vector x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t k = i + 1; k < n; ++k) s -= a[i][k] * x[k];
    x[i] = s / a[i][i];
  }
  return x;
}

}  // namespace detail

/// Two-phase dense tableau simplex with Bland's rule, for desk-scale verification only.
inline SimplexResult solve_simplex(const DenseLP& lp) {
  if (lp.m() > 500 || lp.n() > 500) throw std::invalid_argument("solve_simplex: instance exceeds the 500 x 500 guard");
  detail::Tableau tab(lp);
  SimplexResult result;

  if (tab.needs_phase_one()) {
    std::vector<double> phase_one(tab.cols(), 0.0);
    for (std::size_t j = lp.n() + lp.m(); j < tab.cols(); ++j) phase_one[j] = -1.0;
    tab.set_objective(phase_one);
    tab.optimize(true, result.iterations);
    if (tab.objective_value() < -1e-7) {
      result.status = SimplexStatus::infeasible;
      return result;
    }
    tab.drive_out_artificials(result.iterations);
  }

  std::vector<double> cost(tab.cols(), 0.0);
  std::copy(lp.c().begin(), lp.c().end(), cost.begin());
  tab.set_objective(cost);
  if (!tab.optimize(false, result.iterations)) {
    result.status = SimplexStatus::unbounded;
    return result;
  }
  result.status = SimplexStatus::optimal;
  result.x_opt = tab.structural_solution();
  result.value = dot(lp.c(), *result.x_opt);
  result.basis = tab.basis();
  return result;
}

/// Post-hoc optimality certificate computed from the basis alone: solves B^T y = c_B and checks
/// that no nonbasic column of [A | I] has a positive reduced cost (no improving edge).
inline bool verify_optimality(const DenseLP& lp, const SimplexResult& result, double tol = 1e-7) {
  if (result.status != SimplexStatus::optimal || result.basis.size() != lp.m()) return false;
  const std::size_t m = lp.m(), n = lp.n();
  auto column = [&](std::size_t j, std::size_t i) { return j < n ? lp.a()(i, j) : (j - n == i ? 1.0 : 0.0); };
  std::vector<Vector> bt(m, Vector(m));
  Vector cb(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t j = result.basis[k];
    if (j >= n + m) return false;
    for (std::size_t i = 0; i < m; ++i) bt[k][i] = column(j, i);
    cb[k] = j < n ? lp.c()[j] : 0.0;
  }
  const auto y = detail::solve_dense(std::move(bt), std::move(cb));
  if (!y) return false;
  for (std::size_t j = 0; j < n + m; ++j) {
    if (std::find(result.basis.begin(), result.basis.end(), j) != result.basis.end()) continue;
    double yaj = 0.0;
    for (std::size_t i = 0; i < m; ++i) yaj += (*y)[i] * column(j, i);
    const double cj = j < n ? lp.c()[j] : 0.0;
    if (cj - yaj > tol) return false;
  }
  return max_violation(lp, *result.x_opt) <= 1e-9;
}

/// Euclidean projection onto {A x <= b, x >= 0} by enumerating candidate active sets: every
/// linearly independent set of at most n constraints gives the projection onto its affine
/// hull; the closest feasible candidate is the projection. Ties go to the lexicographically
/// smaller point.
inline Vector project_bruteforce(const DenseLP& lp, std::span<const double> x) {
  require_length(x, lp.n(), "project_bruteforce: x");
  if (lp.n() > 10 || lp.m() > 50) throw std::invalid_argument("project_bruteforce: instance exceeds the size guard");
  const std::size_t n = lp.n();

  std::vector<Vector> rows;
  Vector rhs;
  for (std::size_t i = 0; i < lp.m(); ++i) {
    rows.emplace_back(lp.a().row(i).begin(), lp.a().row(i).end());
    rhs.push_back(lp.b()[i]);
  }
  for (std::size_t j = 0; j < n; ++j) {
    Vector r(n, 0.0);
    r[j] = -1.0;
    rows.push_back(std::move(r));
    rhs.push_back(0.0);
  }

  std::optional<Vector> best;
  double best_dist = std::numeric_limits<double>::infinity();
  auto consider = [&](const Vector& p) {
    if (max_violation(lp, p) > 1e-9) return;
    const double d = distance(p, x);
    if (d < best_dist - 1e-12 || (std::abs(d - best_dist) <= 1e-12 && best && p < *best)) {
      best_dist = std::min(d, best_dist);
      best = p;
    }
  };

  std::vector<std::size_t> active;
  auto project_onto = [&]() -> std::optional<Vector> {
    const std::size_t k = active.size();
    Vector p(x.begin(), x.end());
    if (k == 0) return p;
    std::vector<Vector> gram(k, Vector(k));
    Vector resid(k);
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = 0; b < k; ++b) gram[a][b] = dot(rows[active[a]], rows[active[b]]);
      resid[a] = dot(rows[active[a]], x) - rhs[active[a]];
    }
    const auto lambda = detail::solve_dense(std::move(gram), std::move(resid));
    if (!lambda) return std::nullopt;
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t j = 0; j < n; ++j) p[j] -= (*lambda)[a] * rows[active[a]][j];
    }
    return p;
  };

  auto enumerate = [&](auto&& self, std::size_t from) -> void {
    if (auto p = project_onto()) consider(*p);
    if (active.size() == n) return;
    for (std::size_t i = from; i < rows.size(); ++i) {
      active.push_back(i);
      self(self, i + 1);
      active.pop_back();
    }
  };
  enumerate(enumerate, 0);

  if (!best) throw std::runtime_error("project_bruteforce: feasible set is empty");
  return *best;
}

}  // namespace nslp::oracle
