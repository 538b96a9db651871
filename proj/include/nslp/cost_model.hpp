#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <stdexcept>
#include <vector>

#include "nslp/bsf.hpp"

namespace nslp {

/// BSF model inputs, in nanoseconds.
struct CostParams {
  double workers = 1.0;  ///< P
  double latency = 0.0;  ///< L
  double t_s = 0.0;
  double t_r = 0.0;
  double t_p = 0.0;
  double t_w = 0.0;

  static CostParams from_metrics(const bsf::RunMetrics& m) {
    return {static_cast<double>(m.workers), m.latency_ns, m.t_s_ns, m.t_r_ns, m.t_p_ns, m.t_w_ns};
  }

  CostParams with_workers(double p) const {
    CostParams out = *this;
    out.workers = p;
    return out;
  }
};

/// Largest useful worker count, sqrt(t_w / (2L + t_s)). Not floored.
inline double scalability_bound(const CostParams& p) {
  const double denom = 2.0 * p.latency + p.t_s;
  if (!(denom > 0.0)) throw std::domain_error("scalability_bound: 2L + t_s must be positive");
  return std::sqrt(p.t_w / denom);
}

/// P (2L + t_s + t_r + t_p + t_w) / (P^2 (2L + t_s) + P (t_r + t_p) + t_w)
inline double speedup(const CostParams& p) {
  const double send = 2.0 * p.latency + p.t_s;
  const double master = p.t_r + p.t_p;
  const double denom = p.workers * p.workers * send + p.workers * master + p.t_w;
  if (!(denom > 0.0)) throw std::domain_error("speedup: zero denominator");
  return p.workers * (send + master + p.t_w) / denom;
}

/// 1 / (1 + (P^2 (2L + t_s) + P (t_r + t_p)) / t_w), the approximate parallel efficiency.
inline double efficiency(const CostParams& p) {
  if (!(p.t_w > 0.0)) throw std::domain_error("efficiency: t_w must be positive");
  const double overhead = p.workers * p.workers * (2.0 * p.latency + p.t_s) + p.workers * (p.t_r + p.t_p);
  return 1.0 / (1.0 + overhead / p.t_w);
}

enum class DeltaMode { full, one_row, custom };

/// Change fraction per time unit: 1, 1/(2(n+1)), or a fixed custom value.
inline double delta_fraction(DeltaMode mode, double n, double custom = 0.0) {
  switch (mode) {
    case DeltaMode::full:
      return 1.0;
    case DeltaMode::one_row:
      return 1.0 / (2.0 * (n + 1.0));
    case DeltaMode::custom:
      return custom;
  }
  return custom;
}

/// Asymptotic NSLP cost forms with calibration constants (ns per unit of work):
///   t_s = c_s (delta (n+1)^2 + (n+1)),  t_w = c_w (n^3 + n^2 + n),  t_r = c_r n,  t_p = c_p n^2.
struct ScenarioModel {
  double n = 400.0;
  DeltaMode delta = DeltaMode::one_row;
  double custom_delta = 0.0;
  double c_s = 1.0;
  double c_w = 1.0;
  double c_r = 1.0;
  double c_p = 1.0;
  double latency = 1e4;  ///< L

  double delta_value() const { return delta_fraction(delta, n, custom_delta); }
};

namespace scenario_forms {
inline double send(double n, double delta) { return delta * (n + 1.0) * (n + 1.0) + (n + 1.0); }
inline double work(double n) { return n * n * n + n * n + n; }
inline double receive(double n) { return n; }
inline double evaluate(double n) { return n * n; }
}  // namespace scenario_forms

inline CostParams scenario_params(const ScenarioModel& model, double workers) {
  if (model.n < 2.0) throw std::invalid_argument("scenario_params: n must be >= 2");
  if (!(model.c_s > 0.0 && model.c_w > 0.0 && model.c_r > 0.0 && model.c_p > 0.0)) {
    throw std::invalid_argument("scenario_params: calibration constants must be positive");
  }
  CostParams p;
  p.workers = workers;
  p.latency = model.latency;
  p.t_s = model.c_s * scenario_forms::send(model.n, model.delta_value());
  p.t_w = model.c_w * scenario_forms::work(model.n);
  p.t_r = model.c_r * scenario_forms::receive(model.n);
  p.t_p = model.c_p * scenario_forms::evaluate(model.n);
  return p;
}

struct CalibrationSample {
  double n = 0.0;
  double delta = 0.0;
  bsf::RunMetrics metrics;
};

/// Least-squares fit (through the origin) of c_s, c_w, c_r, c_p to measured metrics; L is the
/// mean measured latency. The returned model keeps `shape`'s n and delta settings.
inline ScenarioModel calibrate(const std::vector<CalibrationSample>& samples, ScenarioModel shape) {
  if (samples.empty()) throw std::invalid_argument("calibrate: no samples");
  double ss_num = 0, ss_den = 0, sw_num = 0, sw_den = 0, sr_num = 0, sr_den = 0, sp_num = 0, sp_den = 0, lat = 0;
  for (const auto& s : samples) {
    const double fs = scenario_forms::send(s.n, s.delta);
    const double fw = scenario_forms::work(s.n);
    const double fr = scenario_forms::receive(s.n);
    const double fp = scenario_forms::evaluate(s.n);
    ss_num += fs * s.metrics.t_s_ns;
    ss_den += fs * fs;
    sw_num += fw * s.metrics.t_w_ns;
    sw_den += fw * fw;
    sr_num += fr * s.metrics.t_r_ns;
    sr_den += fr * fr;
    sp_num += fp * s.metrics.t_p_ns;
    sp_den += fp * fp;
    lat += s.metrics.latency_ns;
  }
  // Measured components can be zero at clock resolution; keep constants strictly positive.
  constexpr double floor = 1e-12;
  shape.c_s = std::max(floor, ss_num / ss_den);
  shape.c_w = std::max(floor, sw_num / sw_den);
  shape.c_r = std::max(floor, sr_num / sr_den);
  shape.c_p = std::max(floor, sp_num / sp_den);
  shape.latency = lat / static_cast<double>(samples.size());
  return shape;
}

struct CurveRow {
  std::size_t workers = 1;
  double speedup = 0.0;
  double efficiency = 0.0;
  double bound = 0.0;
};

inline std::vector<CurveRow> predict_curves(const CostParams& params, const std::vector<std::size_t>& workers) {
  if (workers.empty()) throw std::invalid_argument("predict_curves: empty worker range");
  std::vector<CurveRow> rows;
  rows.reserve(workers.size());
  for (std::size_t p : workers) {
    const CostParams at = params.with_workers(static_cast<double>(p));
    rows.push_back({p, speedup(at), efficiency(at), scalability_bound(at)});
  }
  return rows;
}

inline std::vector<CurveRow> predict_curves(const ScenarioModel& model, const std::vector<std::size_t>& workers) {
  return predict_curves(scenario_params(model, 1.0), workers);
}

/// Workers 1..max.
inline std::vector<std::size_t> worker_range(std::size_t max) {
  std::vector<std::size_t> out;
  for (std::size_t p = 1; p <= max; ++p) out.push_back(p);
  return out;
}

/// Least-squares slope of log(y) against log(x).
inline double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw std::invalid_argument("loglog_slope: need >= 2 paired points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += std::log(xs[i]);
    my += std::log(ys[i]);
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxy += dx * (std::log(ys[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

/// Scalability bound of the scenario at each dimension in `dims`.
inline std::vector<double> bound_by_dimension(ScenarioModel model, const std::vector<double>& dims) {
  std::vector<double> out;
  out.reserve(dims.size());
  for (double n : dims) {
    model.n = n;
    out.push_back(scalability_bound(scenario_params(model, 1.0)));
  }
  return out;
}

/// CSV: P,speedup_pred,efficiency_pred,bound
inline void write_curves_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
  const auto old_precision = os.precision(10);
  os << "P,speedup_pred,efficiency_pred,bound\n";
  for (const auto& r : rows) os << r.workers << ',' << r.speedup << ',' << r.efficiency << ',' << r.bound << '\n';
  os.precision(old_precision);
}

/// CSV: P,L_ns,ts_ns,tv_ns,tr_ns,tp_ns,tw_ns
inline void write_metrics_csv(std::ostream& os, const std::vector<bsf::RunMetrics>& runs) {
  const auto old_precision = os.precision(10);
  os << "P,L_ns,ts_ns,tv_ns,tr_ns,tp_ns,tw_ns\n";
  for (const auto& m : runs) {
    os << m.workers << ',' << m.latency_ns << ',' << m.t_s_ns << ',' << m.t_v_ns << ',' << m.t_r_ns << ','
       << m.t_p_ns << ',' << m.t_w_ns << '\n';
  }
  os.precision(old_precision);
}

/// Reads the CSV written by write_metrics_csv.
inline std::vector<bsf::RunMetrics> read_metrics_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("P,L_ns", 0) != 0) throw std::runtime_error("metrics CSV: bad header");
  std::vector<bsf::RunMetrics> out;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream row(line);
    bsf::RunMetrics m;
    char sep = 0;
    if (!(row >> m.workers >> sep >> m.latency_ns >> sep >> m.t_s_ns >> sep >> m.t_v_ns >> sep >> m.t_r_ns >> sep >>
          m.t_p_ns >> sep >> m.t_w_ns)) {
      throw std::runtime_error("metrics CSV: malformed row '" + line + "'");
    }
    out.push_back(m);
  }
  return out;
}

}  // namespace nslp
