#pragma once

// Fixed-seed Monte Carlo estimates of kernel integrals, used to produce and
// check golden values for the quadrature routines.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "../density.hpp"
#include "../geometry.hpp"
#include "../kernels.hpp"
#include "../quadrature.hpp"
#include "../random.hpp"

namespace nlperim::lab {

struct Estimate {
  double value = 0.0;
  double standard_error = 0.0;
};

namespace oracle_detail {

/// splitmix64 step, used to derive independent sub-seeds.
inline std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline void require_samples(long long n, const char* where) {
  if (n < 10000) throw std::invalid_argument(std::string(where) + ": needs n >= 10^4 samples");
}

/// scale * mean(g(z)) over n uniform points z in the unit ball.
template <class G>
Estimate ball_average(int dim, long long n, std::uint64_t seed, G&& g) {
  Rng rng(seed);
  Vec z(dim);
  double mean = 0.0;
  double m2 = 0.0;
  for (long long i = 0; i < n; ++i) {
    rng.in_ball(z);
    const double x = g(std::span<const double>(z));
    const double delta = x - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (x - mean);
  }
  const double vol = unit_ball_volume(dim);
  const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return {vol * mean, vol * std::sqrt(var / static_cast<double>(n))};
}

}  // namespace oracle_detail

/// Mass of G in {z . nu >= t} from n uniform samples of the unit ball.
inline Estimate mc_halfspace_oracle(const Kernel& kernel, std::span<const double> nu, double t, long long n,
                                    std::uint64_t seed) {
  oracle_detail::require_samples(n, "mc_halfspace_oracle");
  require_unit(nu, kernel.dim(), "mc_halfspace_oracle");
  if (t >= 1.0) return {0.0, 0.0};
  return oracle_detail::ball_average(kernel.dim(), n, seed, [&](std::span<const double> z) {
    return dot(z, nu) >= t ? kernel.eval(z) : 0.0;
  });
}

/// Total mass of G.
inline Estimate mc_mass_oracle(const Kernel& kernel, long long n, std::uint64_t seed) {
  oracle_detail::require_samples(n, "mc_mass_oracle");
  return oracle_detail::ball_average(kernel.dim(), n, seed, [&](std::span<const double> z) { return kernel.eval(z); });
}

/// Integral of G(z) |z . nu|.
inline Estimate mc_absolute_moment_oracle(const Kernel& kernel, std::span<const double> nu, long long n,
                                          std::uint64_t seed) {
  oracle_detail::require_samples(n, "mc_absolute_moment_oracle");
  require_unit(nu, kernel.dim(), "mc_absolute_moment_oracle");
  return oracle_detail::ball_average(kernel.dim(), n, seed,
                                     [&](std::span<const double> z) { return kernel.eval(z) * std::abs(dot(z, nu)); });
}

/// Slab mass / thickness, with the slab {|z . nu - s| <= delta/2} sampled
/// directly: z = s nu + (u - 1/2) delta nu + sum_k w_k b_k with w uniform in
/// [-1,1]^{N-1} and b_k an orthonormal complement of nu built by Gram-Schmidt.
inline Estimate mc_slab_average(const Kernel& kernel, std::span<const double> nu, double s, double delta, long long n,
                                std::uint64_t seed) {
  const int dim = kernel.dim();
  std::vector<Vec> basis;
  for (int axis = 0; axis < dim && static_cast<int>(basis.size()) < dim - 1; ++axis) {
    Vec b = unit_axis(dim, axis);
    const double p = dot(b, nu);
    for (int k = 0; k < dim; ++k) b[k] -= p * nu[k];
    for (const Vec& q : basis) {
      const double c = dot(b, q);
      for (int k = 0; k < dim; ++k) b[k] -= c * q[k];
    }
    const double len = norm(b);
    if (len < 1e-6) continue;
    for (double& x : b) x /= len;
    basis.push_back(std::move(b));
  }
  Rng rng(seed);
  Vec z(dim);
  double mean = 0.0;
  double m2 = 0.0;
  for (long long i = 0; i < n; ++i) {
    const double along = s + (rng.uniform() - 0.5) * delta;
    for (int k = 0; k < dim; ++k) z[k] = along * nu[k];
    for (const Vec& b : basis) {
      const double w = rng.uniform(-1.0, 1.0);
      for (int k = 0; k < dim; ++k) z[k] += w * b[k];
    }
    const double x = kernel.eval(z);
    const double d = x - mean;
    mean += d / static_cast<double>(i + 1);
    m2 += d * (x - mean);
  }
  const double box = std::pow(2.0, dim - 1);
  const double var = n > 1 ? m2 / static_cast<double>(n - 1) : 0.0;
  return {box * mean, box * std::sqrt(var / static_cast<double>(n))};
}

struct SliceEstimate {
  std::vector<double> thickness;
  std::vector<Estimate> raw;
  Estimate extrapolated;
};

/// Slice integral of G over {z . nu = s}: slab averages at thickness 1e-2,
/// 5e-3, 2.5e-3, then (4 A(d/2) - A(d)) / 3 on the two thinnest.
inline SliceEstimate mc_slice_oracle(const Kernel& kernel, std::span<const double> nu, double s, long long n,
                                     std::uint64_t seed) {
  oracle_detail::require_samples(n, "mc_slice_oracle");
  require_unit(nu, kernel.dim(), "mc_slice_oracle");
  SliceEstimate out;
  out.thickness = {1e-2, 5e-3, 2.5e-3};
  for (std::size_t i = 0; i < out.thickness.size(); ++i)
    out.raw.push_back(mc_slab_average(kernel, nu, s, out.thickness[i], n, oracle_detail::mix(seed + i)));
  const Estimate& coarse = out.raw[1];
  const Estimate& fine = out.raw[2];
  out.extrapolated.value = (4.0 * fine.value - coarse.value) / 3.0;
  out.extrapolated.standard_error =
      std::hypot(4.0 / 3.0 * fine.standard_error, 1.0 / 3.0 * coarse.standard_error);
  return out;
}

/// theta(nu) by stratified sampling of t: the half-space oracle at each stratum
/// midpoint, f applied per stratum. The error bar uses the steepest secant of f
/// over +-1 standard error around each stratum estimate.
inline Estimate mc_theta_oracle(const DensityContext& ctx, std::span<const double> nu, long long n, std::uint64_t seed,
                                int strata = 200) {
  if (strata < 1) throw std::invalid_argument("mc_theta_oracle: strata must be >= 1");
  const long long per = n / strata;
  oracle_detail::require_samples(per, "mc_theta_oracle (per stratum)");
  const Profile& f = ctx.profile();
  double sum = 0.0;
  double var = 0.0;
  for (int j = 0; j < strata; ++j) {
    const double t = (j + 0.5) / strata;
    const Estimate m = mc_halfspace_oracle(ctx.kernel(), nu, t, per, oracle_detail::mix(seed * 1000003ULL + j));
    const double fm = f(std::clamp(m.value, 0.0, 1.0));
    double slope = 0.0;
    if (m.standard_error > 0.0) {
      const double lo = std::clamp(m.value - m.standard_error, 0.0, 1.0);
      const double hi = std::clamp(m.value + m.standard_error, 0.0, 1.0);
      const double mid = std::clamp(m.value, 0.0, 1.0);
      if (mid > lo) slope = std::max(slope, (fm - f(lo)) / (mid - lo));
      if (hi > mid) slope = std::max(slope, (f(hi) - fm) / (hi - mid));
    }
    sum += fm;
    var += slope * slope * m.standard_error * m.standard_error;
  }
  return {sum / strata, std::sqrt(var) / strata};
}

/// 2 pi int_0^1 g(r) r^2 dr for a radial 2D kernel (composite Gauss-Legendre).
inline double radial_first_moment_1d(const Kernel& kernel, int panels = 64, int order = 64) {
  if (!kernel.is_radial() || kernel.dim() != 2)
    throw std::invalid_argument("radial_first_moment_1d: needs a radial 2D kernel");
  return 2.0 * std::numbers::pi *
         integrate_composite([&](double r) { return kernel.radial_profile(r) * r * r; }, 0.0, 1.0, panels, order);
}

}  // namespace nlperim::lab
