#pragma once

// Interaction profiles f: [0,1] -> R with f(0) = 0, nondecreasing.
// The convolution G_eps * chi_E always lies in [0,1], so f is never evaluated outside.

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nlperim {

struct Profile {
  std::string name;
  std::function<double(double)> eval;
  bool convex_flag = false;  // claimed, checked by sampling only
  bool smooth_flag = false;  // claimed C^1 on [0,1]

  double operator()(double t) const { return eval(t); }

  /// Central difference (one-sided at the ends of [0,1]).
  double derivative(double t, double step = 1e-6) const {
    const double lo = std::max(0.0, t - step);
    const double hi = std::min(1.0, t + step);
    return (eval(hi) - eval(lo)) / (hi - lo);
  }
};

/// Builtins: identity, power (parameter p >= 1), expm1, saturating, zero.
inline Profile builtin_profile(const std::string& name, std::optional<double> parameter = std::nullopt) {
  if (name == "identity") return {"identity", [](double t) { return t; }, true, true};
  if (name == "power") {
    if (!parameter) throw std::invalid_argument("profile 'power' requires a parameter p >= 1");
    const double p = *parameter;
    if (!(p >= 1.0)) throw std::invalid_argument("profile 'power': p must be >= 1, got " + std::to_string(p));
    return {"power", [p](double t) { return std::pow(t, p); }, true, true};
  }
  if (name == "expm1") {
    return {"expm1", [](double t) { return std::expm1(t) / (std::numbers::e - 1.0); }, true, true};
  }
  if (name == "saturating") return {"saturating", [](double t) { return 2.0 * t / (1.0 + t); }, false, true};
  if (name == "zero") return {"zero", [](double) { return 0.0; }, true, true};
  throw std::invalid_argument("unknown profile '" + name + "'");
}

struct ProfileViolation {
  enum class Kind { origin, monotonicity, convexity };
  Kind kind;
  double a = 0.0;
  double b = 0.0;
  std::string message;
};

inline const char* to_string(ProfileViolation::Kind k) {
  switch (k) {
    case ProfileViolation::Kind::origin: return "origin";
    case ProfileViolation::Kind::monotonicity: return "monotonicity";
    case ProfileViolation::Kind::convexity: return "convexity";
  }
  return "?";
}

/// Checks f(0) = 0 exactly, monotonicity on a uniform grid of `samples` points
/// and, when claimed, midpoint convexity on all grid pairs.
inline std::vector<ProfileViolation> check_profile(const Profile& f, int samples) {
  if (samples < 2) throw std::invalid_argument("check_profile: samples must be >= 2");
  std::vector<ProfileViolation> out;
  if (f(0.0) != 0.0) out.push_back({ProfileViolation::Kind::origin, 0.0, 0.0, "f(0) = " + std::to_string(f(0.0))});

  std::vector<double> grid(samples);
  std::vector<double> values(samples);
  for (int i = 0; i < samples; ++i) {
    grid[i] = static_cast<double>(i) / (samples - 1);
    values[i] = f(grid[i]);
  }
  for (int i = 1; i < samples; ++i) {
    if (values[i] < values[i - 1]) {
      out.push_back({ProfileViolation::Kind::monotonicity, grid[i - 1], grid[i], "f decreases"});
    }
  }
  if (f.convex_flag) {
    for (int i = 0; i < samples; ++i) {
      for (int j = i + 1; j < samples; ++j) {
        const double mid = f(0.5 * (grid[i] + grid[j]));
        if (mid > 0.5 * (values[i] + values[j]) + 1e-12)
          out.push_back({ProfileViolation::Kind::convexity, grid[i], grid[j], "midpoint convexity fails"});
      }
    }
  }
  return out;
}

}  // namespace nlperim
