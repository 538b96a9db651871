#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "nslp/linalg.hpp"

namespace nslp {

/// Identifies a cross point: cohort (axis) index and signed step count from the center.
/// The center itself has no marker.
struct Marker {
  int cohort = 0;
  int offset = 1;
  friend bool operator==(const Marker&, const Marker&) = default;
};

/// The n-dimensional axisymmetric cross: a center plus n cohorts of K equally spaced points,
/// cohort chi lying on the line through the center parallel to axis chi.
class Cross {
 public:
  Cross(Vector center, double spacing, int points_per_cohort)
      : center_(std::move(center)), spacing_(spacing), k_(points_per_cohort) {
    if (center_.size() < 2) throw std::invalid_argument("Cross: dimension must be >= 2");
    if (!(spacing_ > 0.0) || !std::isfinite(spacing_)) throw std::invalid_argument("Cross: spacing must be positive");
    if (k_ < 2 || k_ % 2 != 0) throw std::invalid_argument("Cross: points per cohort must be even and >= 2");
  }

  int dimension() const noexcept { return static_cast<int>(center_.size()); }
  const Vector& center() const noexcept { return center_; }
  double spacing() const noexcept { return spacing_; }
  int points_per_cohort() const noexcept { return k_; }
  int half_width() const noexcept { return k_ / 2; }

  /// nK, the number of points excluding the center.
  std::size_t marker_count() const noexcept { return center_.size() * static_cast<std::size_t>(k_); }
  std::size_t point_count() const noexcept { return marker_count() + 1; }

  bool valid(const Marker& m) const noexcept {
    return m.cohort >= 0 && m.cohort < dimension() && m.offset != 0 && std::abs(m.offset) <= half_width();
  }

  friend bool operator==(const Cross&, const Cross&) = default;

 private:
  Vector center_;
  double spacing_;
  int k_;
};

/// center + offset * spacing * e_cohort
inline Vector point_of(const Cross& cross, const Marker& m) {
  if (!cross.valid(m)) throw std::out_of_range("point_of: marker out of range for this cross");
  Vector x = cross.center();
  x[static_cast<std::size_t>(m.cohort)] += m.offset * cross.spacing();
  return x;
}

/// K markers of cohort chi, offsets ascending (-K/2..-1, 1..K/2).
inline std::vector<Marker> cohort_markers(const Cross& cross, int chi) {
  if (chi < 0 || chi >= cross.dimension()) throw std::out_of_range("cohort_markers: cohort index out of range");
  std::vector<Marker> out;
  out.reserve(static_cast<std::size_t>(cross.points_per_cohort()));
  for (int eta = -cross.half_width(); eta <= cross.half_width(); ++eta) {
    if (eta != 0) out.push_back({chi, eta});
  }
  return out;
}

/// All nK markers, cohort-major.
inline std::vector<Marker> markers(const Cross& cross) {
  std::vector<Marker> out;
  out.reserve(cross.marker_count());
  for (int chi = 0; chi < cross.dimension(); ++chi) {
    for (const Marker& m : cohort_markers(cross, chi)) out.push_back(m);
  }
  return out;
}

inline Cross recenter(const Cross& cross, Vector new_center) {
  require_length(new_center, cross.center().size(), "recenter: new_center");
  return Cross(std::move(new_center), cross.spacing(), cross.points_per_cohort());
}

/// Inverse of point_of. Returns nullopt for the center and for points not on the cross.
inline std::optional<Marker> locate(const Cross& cross, std::span<const double> x) {
  require_length(x, cross.center().size(), "locate: x");
  const auto& g = cross.center();
  std::optional<int> axis;
  for (std::size_t j = 0; j < g.size(); ++j) {
    if (x[j] == g[j]) continue;
    if (axis) return std::nullopt;
    axis = static_cast<int>(j);
  }
  if (!axis) return std::nullopt;
  const auto j = static_cast<std::size_t>(*axis);
  const Marker m{*axis, static_cast<int>(std::lround((x[j] - g[j]) / cross.spacing()))};
  if (!cross.valid(m) || point_of(cross, m)[j] != x[j]) return std::nullopt;
  return m;
}

}  // namespace nslp
