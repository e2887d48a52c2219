#pragma once

// Gauss-Legendre rules and the quadrature order record shared by the library.

#include <cmath>
#include <cstddef>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace nlperim {

/// Quadrature orders used across the library. One record, passed by value.
struct QuadratureConfig {
  int inner_order = 32;   // slice (hyperplane) integrals
  int outer_order = 64;   // 1D integrals along the normal direction
  int tensor_order = 64;  // per-axis order for tensor rules over [-1,1]^N
  int t_order = 32;       // t-integral inside theta
};

struct Rule1D {
  std::vector<double> nodes;
  std::vector<double> weights;

  std::size_t size() const { return nodes.size(); }
};

namespace detail {

inline Rule1D compute_gauss_legendre(int n) {
  Rule1D rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (n == 1) {
      x = 0.0;
      dp = 1.0;
    }
    const double w = n == 1 ? 2.0 : 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

}  // namespace detail

/// Gauss-Legendre rule on [-1, 1]. Rules are computed once and shared.
inline const Rule1D& gauss_legendre(int n) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
  static std::mutex mutex;
  static std::map<int, Rule1D> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, detail::compute_gauss_legendre(n)).first;
  return it->second;
}

/// Gauss-Legendre rule mapped to [a, b].
inline Rule1D gauss_legendre(int n, double a, double b) {
  const Rule1D& ref = gauss_legendre(n);
  Rule1D out;
  out.nodes.resize(ref.size());
  out.weights.resize(ref.size());
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < ref.size(); ++i) {
    out.nodes[i] = mid + half * ref.nodes[i];
    out.weights[i] = half * ref.weights[i];
  }
  return out;
}

/// Integrate a scalar function over [a, b] with an n-point rule.
template <class F>
double integrate(F&& fn, double a, double b, int n) {
  const Rule1D& ref = gauss_legendre(n);
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double sum = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) sum += ref.weights[i] * fn(mid + half * ref.nodes[i]);
  return half * sum;
}

/// Composite Gauss-Legendre: `panels` equal panels of `n` points each.
template <class F>
double integrate_composite(F&& fn, double a, double b, int panels, int n) {
  const double width = (b - a) / panels;
  double sum = 0.0;
  for (int p = 0; p < panels; ++p) sum += integrate(fn, a + p * width, a + (p + 1) * width, n);
  return sum;
}

/// Lebesgue measure of the unit ball in R^k (k >= 0).
inline double unit_ball_volume(int k) {
  return std::pow(std::numbers::pi, 0.5 * k) / std::tgamma(0.5 * k + 1.0);
}

/// Surface measure of the unit sphere S^{n-1} in R^n.
inline double unit_sphere_area(int n) {
  return 2.0 * std::pow(std::numbers::pi, 0.5 * n) / std::tgamma(0.5 * n);
}

}  // namespace nlperim
