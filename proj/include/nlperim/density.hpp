#pragma once

// Limit surface density
//   theta(nu) = int_0^1 f( mass of G in {z . nu >= t} ) dt,
// its positively one-homogeneous extension, the limit functional
//   F(E) = int over the boundary of E in Omega of theta(nu_E) dH^{N-1},
// the closed forms for radial kernels and identity profiles, and a sampled
// convexity probe for the extension.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "kernels.hpp"
#include "profiles.hpp"
#include "quadrature.hpp"
#include "random.hpp"
#include "shapes.hpp"

namespace nlperim {

namespace density_detail {

/// Half-space masses at the t-nodes of theta, keyed by nu quantized to 1e-12.
/// Profile independent, so contexts that differ only in f share one table.
class MassTable {
 public:
  using Key = std::vector<std::int64_t>;

  static Key key_of(std::span<const double> nu) {
    Key k(nu.size());
    for (std::size_t i = 0; i < nu.size(); ++i) k[i] = static_cast<std::int64_t>(std::llround(nu[i] * 1e12));
    return k;
  }

  template <class Compute>
  std::vector<double> get(std::span<const double> nu, Compute&& compute) {
    const Key key = key_of(nu);
    {
      std::lock_guard lock(mutex_);
      auto it = table_.find(key);
      if (it != table_.end()) return it->second;
    }
    std::vector<double> masses = compute();
    std::lock_guard lock(mutex_);
    return table_.emplace(key, std::move(masses)).first->second;
  }

  std::size_t size() const {
    std::lock_guard lock(mutex_);
    return table_.size();
  }

 private:
  mutable std::mutex mutex_;
  std::map<Key, std::vector<double>> table_;
};

}  // namespace density_detail

class DensityContext {
 public:
  DensityContext(Kernel kernel, Profile profile, QuadratureConfig quad = {})
      : kernel_(std::move(kernel)),
        profile_(std::move(profile)),
        quad_(quad),
        masses_(std::make_shared<density_detail::MassTable>()) {
    if (quad_.t_order < 8 || quad_.inner_order < 8 || quad_.outer_order < 8)
      throw std::invalid_argument("DensityContext: quadrature orders must be >= 8");
  }

  /// Same kernel and orders with another profile; shares the mass cache.
  DensityContext with_profile(Profile profile) const {
    DensityContext ctx = *this;
    ctx.profile_ = std::move(profile);
    return ctx;
  }

  const Kernel& kernel() const { return kernel_; }
  const Profile& profile() const { return profile_; }
  const QuadratureConfig& quadrature() const { return quad_; }
  std::size_t cached_directions() const { return masses_->size(); }

  /// Gauss-Legendre t-rule on [0, min(1, support extent along nu)].
  Rule1D t_rule(std::span<const double> nu) const {
    return gauss_legendre(quad_.t_order, 0.0, std::min(1.0, kernel_.support_extent(nu)));
  }

  /// Half-space masses at the nodes of t_rule(nu).
  std::vector<double> masses_at_t_nodes(std::span<const double> nu) const {
    return masses_->get(nu, [&] {
      return halfspace_masses(kernel_, nu, t_rule(nu).nodes, quad_);
    });
  }

 private:
  Kernel kernel_;
  Profile profile_;
  QuadratureConfig quad_;
  std::shared_ptr<density_detail::MassTable> masses_;
};

inline double theta(const DensityContext& ctx, std::span<const double> nu) {
  require_unit(nu, ctx.kernel().dim(), "theta");
  const Rule1D rule = ctx.t_rule(nu);
  const std::vector<double> masses = ctx.masses_at_t_nodes(nu);
  const double reach = std::min(1.0, ctx.kernel().support_extent(nu));
  double sum = (1.0 - reach) * ctx.profile()(0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) sum += rule.weights[i] * ctx.profile()(masses[i]);
  return sum;
}

/// |v| theta(v / |v|), and 0 at v = 0.
inline double theta_tilde(const DensityContext& ctx, std::span<const double> v) {
  const double len = norm(v);
  if (len == 0.0) return 0.0;
  return len * theta(ctx, normalized(v));
}

/// The extension evaluated as int_0^{|v|} f(mass of G in {z . v >= s}) ds,
/// without the change of variables. Used to cross-check theta_tilde.
inline double theta_tilde_direct(const DensityContext& ctx, std::span<const double> v) {
  const double len = norm(v);
  if (len == 0.0) return 0.0;
  const Vec dir = normalized(v);
  const double reach = std::min(1.0, ctx.kernel().support_extent(dir)) * len;
  return (len - reach) * ctx.profile()(0.0) + integrate(
      [&](double s) {
        const double t = std::min(1.0, s / len);
        return ctx.profile()(halfspace_mass(ctx.kernel(), dir, t, ctx.quadrature()));
      },
      0.0, reach, ctx.quadrature().t_order);
}

/// theta(e_N) for a radial kernel, valid for every direction.
inline double radial_constant(const DensityContext& ctx) {
  if (!ctx.kernel().is_radial()) throw std::invalid_argument("radial_constant: kernel is not radial");
  return theta(ctx, unit_axis(ctx.kernel().dim(), ctx.kernel().dim() - 1));
}

/// |B_1^{N-1}| / H^{N-1}(S^{N-1}) times int G(z)|z| dz.
inline double closed_form_prefactor(int dim) { return unit_ball_volume(dim - 1) / unit_sphere_area(dim); }

inline double closed_form_c_NG(const Kernel& kernel, const QuadratureConfig& quad = {}) {
  if (!kernel.is_radial()) throw std::invalid_argument("closed_form_c_NG: kernel is not radial");
  return closed_form_prefactor(kernel.dim()) * first_radial_moment(kernel, quad);
}

struct LimitValue {
  double value = 0.0;
  double boundary_measure = 0.0;
  std::vector<std::string> flags;
};

/// F(E): boundary quadrature weighted by theta of the node normals. Radial
/// kernels use the single radial constant; otherwise theta is cached per normal.
inline LimitValue limit_functional(const DensityContext& ctx, const Shape& shape, const Domain& dom, int order) {
  const BoundaryQuadrature quad = boundary_quadrature(shape, dom, order);
  LimitValue out;
  out.flags = quad.flags;
  out.boundary_measure = quad.total_weight();
  if (ctx.kernel().is_radial()) {
    out.value = radial_constant(ctx) * out.boundary_measure;
    return out;
  }
  for (std::size_t i = 0; i < quad.size(); ++i) out.value += theta(ctx, quad.normals[i]) * quad.weights[i];
  return out;
}

struct ConvexityViolation {
  Vec v;
  Vec w;
  double midpoint_value = 0.0;
  double chord_value = 0.0;
};

/// Samples (v, w) uniformly in the ball of radius 2 and records pairs with
/// theta~((v+w)/2) > (theta~(v) + theta~(w))/2 + 1e-9.
inline std::vector<ConvexityViolation> convexity_probe(const DensityContext& ctx, int trials, std::uint64_t seed,
                                                       double tolerance = 1e-9) {
  if (trials < 1) throw std::invalid_argument("convexity_probe: trials must be >= 1");
  const int dim = ctx.kernel().dim();
  Rng rng(seed);
  std::vector<ConvexityViolation> out;
  Vec v(dim);
  Vec w(dim);
  Vec mid(dim);
  for (int trial = 0; trial < trials; ++trial) {
    rng.in_ball(v, 2.0);
    rng.in_ball(w, 2.0);
    for (int k = 0; k < dim; ++k) mid[k] = 0.5 * (v[k] + w[k]);
    const double lhs = theta_tilde(ctx, mid);
    const double rhs = 0.5 * (theta_tilde(ctx, v) + theta_tilde(ctx, w));
    if (lhs > rhs + tolerance) out.push_back({v, w, lhs, rhs});
  }
  return out;
}

}  // namespace nlperim
