#pragma once

// Experiment runners: eps-sweeps of F_eps toward F on a fixed set, and the
// graph lower-bound study with perturbed sets E_h and eps_h -> 0.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "../density.hpp"
#include "../nonlocal.hpp"
#include "../shapes.hpp"
#include "config.hpp"

namespace nlperim::lab {

/// Raised when a scheduled eps cannot be resolved; names the offending eps.
class ScheduleError : public std::runtime_error {
 public:
  ScheduleError(const std::string& what, double epsilon, int required_resolution)
      : std::runtime_error(what), epsilon_(epsilon), required_resolution_(required_resolution) {}
  double epsilon() const { return epsilon_; }
  int required_resolution() const { return required_resolution_; }

 private:
  double epsilon_;
  int required_resolution_;
};

struct ConvergenceRow {
  double epsilon = 0.0;
  int resolution = 0;
  double value = 0.0;
  double abs_error = 0.0;
  double rel_error = 0.0;
  double seconds = 0.0;
};

struct ConvergenceReport {
  std::vector<ConvergenceRow> rows;  // decreasing eps
  double reference = 0.0;
  std::vector<std::string> reference_flags;
  std::optional<double> rate;  // least squares on the last 4 rows
  std::string rate_note;
  std::optional<double> extrapolated;
  double extrapolated_rel_error = 0.0;
  double final_rel_error = 0.0;
  bool monotone = false;
  double tolerance = 0.0;
  bool pass = false;
};

struct LowerBoundRow {
  int h = 0;
  double epsilon = 0.0;
  double amplitude = 0.0;
  int resolution = 0;
  double value = 0.0;      // F_eps_h(E_h)
  double deficit = 0.0;    // F(E) - F_eps_h(E_h)
  double rel_deficit = 0.0;
  double delta = 0.0;      // sup over k >= h of max(0, rel_deficit_k)
  double seconds = 0.0;
};

struct LowerBoundReport {
  std::vector<LowerBoundRow> rows;  // increasing h
  double reference = 0.0;
  std::vector<std::string> reference_flags;
  /// Relative deficit extrapolated to h -> infinity from the last two rows,
  /// model d + C / h^2.
  std::optional<double> deficit_trend;
  bool no_limit_schedule = false;
  std::optional<bool> pass;  // absent when the schedule has no limit
  double tolerance = 0.0;
  std::string note;
};

namespace experiments_detail {

inline double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Slope of log|err| against log eps by least squares.
inline double fit_rate(const std::vector<double>& eps, const std::vector<double>& err) {
  const std::size_t n = eps.size();
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(eps[i]);
    my += std::log(err[i]);
  }
  mx /= n;
  my /= n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(eps[i]) - mx;
    sxy += dx * (std::log(err[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

inline double evaluate(const Shape& shape, double epsilon, const Profile& f, const Kernel& kernel, const Domain& dom,
                       const FepsOptions& opts) {
  try {
    return eval_F_eps(shape, epsilon, f, kernel, dom, opts);
  } catch (const ResolutionError& e) {
    throw ScheduleError("eps = " + std::to_string(epsilon) + ": " + e.what(), epsilon, e.required_resolution());
  } catch (const std::invalid_argument& e) {
    throw ScheduleError("eps = " + std::to_string(epsilon) + ": " + e.what(), epsilon, dom.resolution);
  }
}

}  // namespace experiments_detail

/// F(E) for the configured kernel, profile and shape.
inline LimitValue reference_value(const ExperimentConfig& cfg, const Shape& shape) {
  const DensityContext ctx(build_kernel(cfg.kernel), build_profile(cfg.profile), cfg.schedule.quadrature);
  return limit_functional(ctx, shape, build_domain(cfg.domain), cfg.schedule.boundary_order);
}

/// eps_k = eps0 * ratio^k, k = 0 .. count-1.
inline std::vector<double> eps_schedule(const ScheduleSettings& sc) {
  std::vector<double> out;
  double e = sc.eps0;
  for (int k = 0; k < sc.count; ++k) {
    out.push_back(e);
    e *= sc.ratio;
  }
  return out;
}

inline ConvergenceReport run_convergence(const ExperimentConfig& cfg) {
  const Kernel kernel = build_kernel(cfg.kernel);
  const Profile f = build_profile(cfg.profile);
  const Shape shape = build_shape(cfg.shape, cfg.kernel.dim);
  const FepsOptions opts = build_feps_options(cfg.schedule);

  ConvergenceReport rep;
  rep.tolerance = cfg.schedule.tolerance;
  const LimitValue ref = reference_value(cfg, shape);
  rep.reference = ref.value;
  rep.reference_flags = ref.flags;
  const double scale = std::abs(rep.reference) > 0.0 ? std::abs(rep.reference) : 1.0;

  for (double eps : eps_schedule(cfg.schedule)) {
    const Domain dom = domain_for(cfg, eps);
    const auto t0 = std::chrono::steady_clock::now();
    ConvergenceRow row;
    row.epsilon = eps;
    row.resolution = dom.resolution;
    row.value = experiments_detail::evaluate(shape, eps, f, kernel, dom, opts);
    row.seconds = experiments_detail::seconds_since(t0);
    row.abs_error = std::abs(row.value - rep.reference);
    row.rel_error = row.abs_error / scale;
    rep.rows.push_back(row);
  }

  const std::size_t n = rep.rows.size();
  rep.final_rel_error = rep.rows.back().rel_error;
  rep.monotone = true;
  for (std::size_t i = 1; i < n; ++i)
    if (!(rep.rows[i].abs_error < rep.rows[i - 1].abs_error)) rep.monotone = false;

  if (n >= 4) {
    std::vector<double> eps;
    std::vector<double> err;
    for (std::size_t i = n - 4; i < n; ++i) {
      eps.push_back(rep.rows[i].epsilon);
      err.push_back(rep.rows[i].abs_error);
    }
    if (std::all_of(err.begin(), err.end(), [](double e) { return e > 0.0; })) {
      rep.rate = experiments_detail::fit_rate(eps, err);
      rep.rate_note = "least squares on the last 4 rows";
    } else {
      rep.rate_note = "zero error in fit window";
    }
  } else {
    rep.rate_note = "insufficient data";
  }

  if (n >= 2) {
    // Richardson with F_eps = F + C eps^p.
    const double e1 = rep.rows[n - 2].epsilon;
    const double e2 = rep.rows[n - 1].epsilon;
    const double r = std::pow(e2 / e1, cfg.schedule.richardson_order);
    rep.extrapolated = (rep.rows[n - 1].value - r * rep.rows[n - 2].value) / (1.0 - r);
    rep.extrapolated_rel_error = std::abs(*rep.extrapolated - rep.reference) / scale;
  } else {
    rep.extrapolated_rel_error = rep.final_rel_error;
  }
  rep.pass = rep.final_rel_error <= rep.tolerance && rep.extrapolated_rel_error <= rep.tolerance;
  return rep;
}

/// Graph sets E_h = {0 <= y <= u + a_h phi} with a_h = amplitude_scale / h and
/// eps_h = eps_scale / h (or eps0 for eps_law = fixed), compared with F(E).
inline LowerBoundReport run_lower_bound(const ExperimentConfig& cfg) {
  if (cfg.shape.type != "graph") throw ConfigError("lowerbound: [shape] type must be 'graph'");
  const ScheduleSettings& sc = cfg.schedule;
  const Kernel kernel = build_kernel(cfg.kernel);
  const Profile f = build_profile(cfg.profile);
  const FepsOptions opts = build_feps_options(sc);
  const TrigSeries u = build_height(cfg.shape);
  TrigSeries phi;
  phi.terms = parse_trig_terms(sc.perturbation, cfg.kernel.dim - 1, "perturbation");

  LowerBoundReport rep;
  rep.tolerance = sc.deficit_tolerance;
  const Shape base = make_graph(cfg.shape.base_lower, cfg.shape.base_upper, u, cfg.shape.include_floor_and_sides);
  const LimitValue ref = reference_value(cfg, base);
  rep.reference = ref.value;
  rep.reference_flags = ref.flags;
  const double scale = std::abs(rep.reference) > 0.0 ? std::abs(rep.reference) : 1.0;
  rep.no_limit_schedule = sc.eps_law == "fixed";

  for (int h : sc.h_values) {
    LowerBoundRow row;
    row.h = h;
    row.epsilon = rep.no_limit_schedule ? sc.eps0 : sc.eps_scale / h;
    row.amplitude = sc.amplitude_scale / h;
    const TrigSeries uh = u.plus(phi, row.amplitude);
    const Shape eh = make_graph(cfg.shape.base_lower, cfg.shape.base_upper, uh, cfg.shape.include_floor_and_sides);
    const Domain dom = domain_for(cfg, row.epsilon);
    row.resolution = dom.resolution;
    const auto t0 = std::chrono::steady_clock::now();
    row.value = experiments_detail::evaluate(eh, row.epsilon, f, kernel, dom, opts);
    row.seconds = experiments_detail::seconds_since(t0);
    row.deficit = rep.reference - row.value;
    row.rel_deficit = row.deficit / scale;
    rep.rows.push_back(row);
  }
  double tail = 0.0;
  for (std::size_t i = rep.rows.size(); i-- > 0;) {
    tail = std::max(tail, std::max(0.0, rep.rows[i].rel_deficit));
    rep.rows[i].delta = tail;
  }
  const std::size_t n = rep.rows.size();
  if (n >= 2 && !rep.no_limit_schedule) {
    const double x1 = 1.0 / (static_cast<double>(rep.rows[n - 2].h) * rep.rows[n - 2].h);
    const double x2 = 1.0 / (static_cast<double>(rep.rows[n - 1].h) * rep.rows[n - 1].h);
    const double y1 = rep.rows[n - 2].rel_deficit;
    const double y2 = rep.rows[n - 1].rel_deficit;
    rep.deficit_trend = y2 - x2 * (y2 - y1) / (x2 - x1);
  }
  if (rep.no_limit_schedule) {
    rep.note = "no-limit schedule: eps is not refined, pass criteria not applicable";
  } else if (n == 0) {
    rep.note = "no rows";
  } else {
    rep.pass = rep.rows.back().delta <= rep.tolerance;
    rep.note = "one-sided check: F_eps_h(E_h) >= F(E) - delta_h; no upper bound is asserted";
  }
  return rep;
}

}  // namespace nlperim::lab
