#pragma once

// Admissible interaction kernels G: even, nonnegative, unit mass, supported in
// the closed unit ball. Kernels have the form z -> c * phi(|A z|^2), where phi
// vanishes for arguments >= 1 and A is SPD with smallest singular value >= 1.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "geometry.hpp"
#include "quadrature.hpp"

namespace nlperim {

/// Profile of a kernel as a function of q = |A z|^2, together with dphi/dq.
struct KernelShape {
  std::string name;
  double (*value)(double q) = nullptr;
  double (*derivative)(double q) = nullptr;
};

namespace bump_detail {

inline double bump_value(double q) { return q < 1.0 ? std::exp(-1.0 / (1.0 - q)) : 0.0; }

inline double bump_derivative(double q) {
  if (!(q < 1.0)) return 0.0;
  const double d = 1.0 - q;
  return -std::exp(-1.0 / d) / (d * d);
}

}  // namespace bump_detail

inline KernelShape bump_shape() {
  return {"bump", &bump_detail::bump_value, &bump_detail::bump_derivative};
}

class Kernel {
 public:
  Kernel(int dim, KernelShape shape, double multiplier, std::optional<std::vector<double>> anisotropy)
      : dim_(dim), shape_(std::move(shape)), multiplier_(multiplier), anisotropy_(std::move(anisotropy)) {
    metric_ = Eigen::MatrixXd::Identity(dim_, dim_);
    if (anisotropy_) {
      Eigen::MatrixXd a(dim_, dim_);
      for (int i = 0; i < dim_; ++i)
        for (int j = 0; j < dim_; ++j) a(i, j) = (*anisotropy_)[i * dim_ + j];
      metric_ = a.transpose() * a;
    }
    metric_inverse_ = metric_.inverse();
  }

  int dim() const { return dim_; }
  double support_radius() const { return 1.0; }
  double normalization() const { return multiplier_; }
  const KernelShape& shape() const { return shape_; }
  bool is_radial() const { return !anisotropy_.has_value(); }

  /// Row-major N x N anisotropy matrix, empty for radial kernels.
  const std::optional<std::vector<double>>& anisotropy() const { return anisotropy_; }

  /// A^T A, so that q = z^T M z.
  const Eigen::MatrixXd& metric_matrix() const { return metric_; }
  const Eigen::MatrixXd& metric_inverse() const { return metric_inverse_; }

  /// max of z . dir over the support, |dir| = 1.
  double support_extent(std::span<const double> dir) const {
    Eigen::Map<const Eigen::VectorXd> d(dir.data(), dim_);
    return std::sqrt(d.dot(metric_inverse_ * d));
  }

  /// q = |A z|^2.
  double metric(std::span<const double> z) const {
    if (!anisotropy_) return dot(z, z);
    const std::vector<double>& a = *anisotropy_;
    double q = 0.0;
    for (int i = 0; i < dim_; ++i) {
      double row = 0.0;
      for (int j = 0; j < dim_; ++j) row += a[i * dim_ + j] * z[j];
      q += row * row;
    }
    return q;
  }

  double operator()(std::span<const double> z) const { return eval(z); }

  double eval(std::span<const double> z) const { return multiplier_ * shape_.value(metric(z)); }

  /// grad G(z) = c phi'(q) * 2 A^T A z.
  void gradient(std::span<const double> z, std::span<double> out) const {
    const double dphi = multiplier_ * shape_.derivative(metric(z));
    if (!anisotropy_) {
      for (int i = 0; i < dim_; ++i) out[i] = 2.0 * dphi * z[i];
      return;
    }
    const std::vector<double>& a = *anisotropy_;
    std::array<double, kMaxDim> az{};
    for (int i = 0; i < dim_; ++i) {
      double row = 0.0;
      for (int j = 0; j < dim_; ++j) row += a[i * dim_ + j] * z[j];
      az[i] = row;
    }
    for (int j = 0; j < dim_; ++j) {
      double s = 0.0;
      for (int i = 0; i < dim_; ++i) s += a[i * dim_ + j] * az[i];
      out[j] = 2.0 * dphi * s;
    }
  }

  /// g(r) with G(z) = g(|z|); only for radial kernels.
  double radial_profile(double r) const {
    if (!is_radial()) throw std::logic_error("radial_profile: kernel is anisotropic");
    return multiplier_ * shape_.value(r * r);
  }

  /// Same kernel multiplied by `factor` (no longer unit mass unless factor == 1).
  Kernel scaled(double factor) const {
    Kernel k = *this;
    k.multiplier_ *= factor;
    return k;
  }

  /// Same kernel with multiplier 1 (raw shape mass).
  Kernel unnormalized() const {
    Kernel k = *this;
    k.multiplier_ = 1.0;
    return k;
  }

 private:
  int dim_;
  KernelShape shape_;
  double multiplier_;
  std::optional<std::vector<double>> anisotropy_;
  Eigen::MatrixXd metric_;
  Eigen::MatrixXd metric_inverse_;
};

namespace kernels_detail {

/// Raw mass of phi(|z|^2) over R^N, via the radial integral.
inline double radial_shape_mass(const KernelShape& shape, int dim) {
  auto integrand = [&](double r) { return shape.value(r * r) * std::pow(r, dim - 1); };
  return unit_sphere_area(dim) * integrate_composite(integrand, 0.0, 1.0, 8, 64);
}

inline std::vector<double> validate_anisotropy(const Eigen::MatrixXd& a, int dim) {
  if (a.rows() != dim || a.cols() != dim)
    throw std::invalid_argument("anisotropy: matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw std::invalid_argument("anisotropy: matrix is not symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const double smallest = eig.eigenvalues().minCoeff();
  if (!(smallest > 0.0)) throw std::invalid_argument("anisotropy: matrix is not positive definite");
  if (smallest < 1.0 - 1e-12)
    throw std::invalid_argument("anisotropy: smallest singular value " + std::to_string(smallest) +
                                " < 1, support would leave the unit ball");
  std::vector<double> out(dim * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) out[i * dim + j] = 0.5 * (a(i, j) + a(j, i));
  return out;
}

inline double determinant(const std::vector<double>& a, int dim) {
  Eigen::MatrixXd m(dim, dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) m(i, j) = a[i * dim + j];
  return m.determinant();
}

}  // namespace kernels_detail

/// Kernel c * shape(|A z|^2) normalized to unit mass. A = identity when absent.
inline Kernel make_kernel(int dim, KernelShape shape, const std::optional<Eigen::MatrixXd>& anisotropy = std::nullopt) {
  if (dim < 2 || dim > kMaxDim)
    throw std::invalid_argument("make_kernel: dimension must be in [2, " + std::to_string(kMaxDim) + "]");
  std::optional<std::vector<double>> a;
  double det = 1.0;
  if (anisotropy) {
    a = kernels_detail::validate_anisotropy(*anisotropy, dim);
    det = kernels_detail::determinant(*a, dim);
  }
  // Change of variables w = A z: the raw mass is det(A)^{-1} times the radial mass.
  const double raw = kernels_detail::radial_shape_mass(shape, dim) / det;
  return Kernel(dim, std::move(shape), 1.0 / raw, std::move(a));
}

/// The C-infinity bump c * exp(-1 / (1 - |A z|^2)).
inline Kernel make_bump_kernel(int dim, const std::optional<Eigen::MatrixXd>& anisotropy = std::nullopt) {
  return make_kernel(dim, bump_shape(), anisotropy);
}

namespace kernels_detail {

/// Sum of fn over the tensor product of per-axis rules, in a fixed (odometer) order.
template <class F>
double tensor_sum(int dim, std::span<const Rule1D* const> rules, F&& fn) {
  std::array<std::size_t, kMaxDim> idx{};
  std::array<double, kMaxDim> point{};
  double sum = 0.0;
  while (true) {
    double w = 1.0;
    for (int k = 0; k < dim; ++k) {
      point[k] = rules[k]->nodes[idx[k]];
      w *= rules[k]->weights[idx[k]];
    }
    sum += w * fn(std::span<const double>(point.data(), dim));
    int k = dim - 1;
    while (k >= 0) {
      if (++idx[k] < rules[k]->size()) break;
      idx[k] = 0;
      --k;
    }
    if (k < 0) break;
  }
  return sum;
}

}  // namespace kernels_detail

/// Tensor-product Gauss-Legendre integral of G over the bounding box of its
/// support (a subset of [-1,1]^N).
inline double kernel_total_mass(const Kernel& kernel, int quad_order) {
  if (quad_order < 2) throw std::invalid_argument("kernel_total_mass: quad_order must be >= 2");
  const int dim = kernel.dim();
  std::vector<Rule1D> axes;
  for (int k = 0; k < dim; ++k) {
    const double e = std::sqrt(kernel.metric_inverse()(k, k));
    axes.push_back(gauss_legendre(quad_order, -e, e));
  }
  std::array<const Rule1D*, kMaxDim> rules{};
  for (int k = 0; k < dim; ++k) rules[k] = &axes[k];
  return kernels_detail::tensor_sum(dim, std::span<const Rule1D* const>(rules.data(), dim),
                                    [&](std::span<const double> z) { return kernel.eval(z); });
}

namespace kernels_detail {

/// Support of G restricted to the hyperplanes {z . nu = s}, in coordinates w
/// with z = Q w and w_N = s. The metric in w is P = Q^T M Q; on a slice
/// q(w') = (w' - c)^T B (w' - c) + q_min with c = -s B^{-1} b.
class SliceGeometry {
 public:
  SliceGeometry(const Kernel& kernel, std::span<const double> nu) : frame_(nu), dim_(kernel.dim()) {
    const int n = dim_;
    Eigen::MatrixXd q(n, n);
    Vec e(n, 0.0);
    Vec col(n);
    for (int k = 0; k < n; ++k) {
      std::fill(e.begin(), e.end(), 0.0);
      e[k] = 1.0;
      frame_.apply(e, col);
      for (int i = 0; i < n; ++i) q(i, k) = col[i];
    }
    const Eigen::MatrixXd p = q.transpose() * kernel.metric_matrix() * q;
    b_ = p.topLeftCorner(n - 1, n - 1);
    b_inverse_ = b_.inverse();
    shift_ = -(b_inverse_ * p.col(n - 1).head(n - 1));
    const double pnn = p(n - 1, n - 1);
    reduced_ = pnn + p.col(n - 1).head(n - 1).dot(shift_);
    extent_ = 1.0 / std::sqrt(reduced_);
  }

  const FrameToNormal& frame() const { return frame_; }
  /// Largest |s| with a nonempty slice.
  double extent() const { return extent_; }
  /// Slice center c(s) in w'.
  double center(int k, double s) const { return s * shift_(k); }
  /// 1 - q_min(s), the squared "radius" of the slice ellipsoid in the B metric.
  double room(double s) const { return 1.0 - s * s * reduced_; }
  /// Distance from the center to the slice boundary along the unit vector dir.
  double reach(std::span<const double> dir, double s) const {
    Eigen::Map<const Eigen::VectorXd> d(dir.data(), dim_ - 1);
    return std::sqrt(std::max(room(s), 0.0) / d.dot(b_ * d));
  }
  /// Half width of the slice's bounding box along axis k.
  double half_width(int k, double s) const { return std::sqrt(std::max(room(s), 0.0) * b_inverse_(k, k)); }

 private:
  FrameToNormal frame_;
  int dim_;
  Eigen::MatrixXd b_;
  Eigen::MatrixXd b_inverse_;
  Eigen::VectorXd shift_;
  double reduced_ = 1.0;
  double extent_ = 1.0;
};

inline double slice_on(const Kernel& kernel, const SliceGeometry& geo, double s, const QuadratureConfig& cfg) {
  const int dim = kernel.dim();
  if (std::abs(s) >= geo.extent()) return 0.0;
  std::array<double, kMaxDim> w{};
  std::array<double, kMaxDim> z{};
  const std::span<double> ws(w.data(), dim);
  const std::span<double> zs(z.data(), dim);
  w[dim - 1] = s;
  auto at = [&]() {
    geo.frame().apply(ws, zs);
    return kernel.eval(zs);
  };

  if (dim == 2) {
    const double one = 1.0;
    const double half = geo.reach(std::span<const double>(&one, 1), s);
    const double c = geo.center(0, s);
    const Rule1D& rule = gauss_legendre(cfg.inner_order);
    double sum = 0.0;
    for (std::size_t i = 0; i < rule.size(); ++i) {
      w[0] = c + half * rule.nodes[i];
      sum += rule.weights[i] * at();
    }
    return half * sum;
  }
  if (dim == 3) {
    // Polar coordinates about the slice center: Gauss-Legendre in r up to the
    // support boundary, periodic trapezoid in angle.
    const Rule1D& radial = gauss_legendre(cfg.inner_order, 0.0, 1.0);
    const int angles = 2 * cfg.inner_order;
    const double dphi = 2.0 * std::numbers::pi / angles;
    const double c0 = geo.center(0, s);
    const double c1 = geo.center(1, s);
    double sum = 0.0;
    for (int j = 0; j < angles; ++j) {
      const std::array<double, 2> dir{std::cos(j * dphi), std::sin(j * dphi)};
      const double rmax = geo.reach(dir, s);
      double ray = 0.0;
      for (std::size_t i = 0; i < radial.size(); ++i) {
        const double r = rmax * radial.nodes[i];
        w[0] = c0 + r * dir[0];
        w[1] = c1 + r * dir[1];
        ray += radial.weights[i] * r * at();
      }
      sum += rmax * ray;
    }
    return sum * dphi;
  }
  // dim >= 4: tensor rule over the bounding box of the slice.
  std::vector<Rule1D> axes;
  for (int k = 0; k < dim - 1; ++k) {
    const double c = geo.center(k, s);
    const double hw = geo.half_width(k, s);
    axes.push_back(gauss_legendre(cfg.inner_order, c - hw, c + hw));
  }
  std::array<const Rule1D*, kMaxDim> rules{};
  for (int k = 0; k < dim - 1; ++k) rules[k] = &axes[k];
  return kernels_detail::tensor_sum(dim - 1, std::span<const Rule1D* const>(rules.data(), dim - 1),
                                    [&](std::span<const double> p) {
                                      for (int k = 0; k < dim - 1; ++k) w[k] = p[k];
                                      return at();
                                    });
}

}  // namespace kernels_detail

/// Integral of G over the hyperplane {z . nu = s}.
inline double slice_integral(const Kernel& kernel, std::span<const double> nu, double s,
                             const QuadratureConfig& cfg = {}) {
  require_unit(nu, kernel.dim(), "slice_integral");
  if (std::abs(s) >= 1.0) return 0.0;
  const kernels_detail::SliceGeometry geo(kernel, nu);
  return kernels_detail::slice_on(kernel, geo, s, cfg);
}

/// Mass of G in the half-space {z . nu >= t}, t in [0, 1], via slices.
inline double halfspace_mass(const Kernel& kernel, std::span<const double> nu, double t,
                             const QuadratureConfig& cfg = {}) {
  require_unit(nu, kernel.dim(), "halfspace_mass");
  if (!(t >= 0.0 && t <= 1.0)) throw std::domain_error("halfspace_mass: offset must lie in [0, 1]");
  const kernels_detail::SliceGeometry geo(kernel, nu);
  const double top = std::min(1.0, geo.extent());
  if (t >= top) return 0.0;
  return integrate([&](double s) { return kernels_detail::slice_on(kernel, geo, s, cfg); }, t, top, cfg.outer_order);
}

/// halfspace_mass at every offset in `ts` from one pass over the slices:
/// pieces between consecutive offsets, each with max(8, outer_order / 4) nodes,
/// summed from the top of the support down.
inline std::vector<double> halfspace_masses(const Kernel& kernel, std::span<const double> nu,
                                            std::span<const double> ts, const QuadratureConfig& cfg = {}) {
  require_unit(nu, kernel.dim(), "halfspace_masses");
  std::vector<std::size_t> order(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (!(ts[i] >= 0.0 && ts[i] <= 1.0)) throw std::domain_error("halfspace_masses: offsets must lie in [0, 1]");
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ts[a] < ts[b]; });
  const kernels_detail::SliceGeometry geo(kernel, nu);
  const double top = std::min(1.0, geo.extent());
  const int piece_order = std::max(8, cfg.outer_order / 4);
  auto slice = [&](double s) { return kernels_detail::slice_on(kernel, geo, s, cfg); };
  std::vector<double> out(ts.size(), 0.0);
  double acc = 0.0;
  double upper = top;
  for (std::size_t k = ts.size(); k-- > 0;) {
    const double t = ts[order[k]];
    if (t < upper) {
      acc += integrate(slice, t, upper, piece_order);
      upper = t;
    }
    out[order[k]] = t >= top ? 0.0 : acc;
  }
  return out;
}

/// Integral of G(z) |z . nu| over R^N. Tensor Gauss-Legendre in a frame whose
/// last axis is nu, over the bounding box of the support, split at z . nu = 0.
inline double absolute_moment_along(const Kernel& kernel, std::span<const double> nu, const QuadratureConfig& cfg = {}) {
  const int dim = kernel.dim();
  require_unit(nu, dim, "absolute_moment_along");
  const kernels_detail::SliceGeometry geo(kernel, nu);
  const FrameToNormal& frame = geo.frame();
  // Bounding box of the support in w: half widths sqrt((P^{-1})_kk).
  Eigen::MatrixXd q(dim, dim);
  {
    Vec e(dim, 0.0);
    Vec col(dim);
    for (int k = 0; k < dim; ++k) {
      std::fill(e.begin(), e.end(), 0.0);
      e[k] = 1.0;
      frame.apply(e, col);
      for (int i = 0; i < dim; ++i) q(i, k) = col[i];
    }
  }
  const Eigen::MatrixXd p_inv = q.transpose() * kernel.metric_inverse() * q;
  std::vector<Rule1D> axes;
  for (int k = 0; k < dim - 1; ++k) {
    const double e = std::sqrt(p_inv(k, k));
    axes.push_back(gauss_legendre(cfg.tensor_order, -e, e));
  }
  const double top = std::sqrt(p_inv(dim - 1, dim - 1));
  const Rule1D lower = gauss_legendre(cfg.tensor_order, -top, 0.0);
  const Rule1D upper = gauss_legendre(cfg.tensor_order, 0.0, top);
  std::array<double, kMaxDim> z{};
  auto integrand = [&](std::span<const double> w) {
    frame.apply(w, std::span<double>(z.data(), dim));
    return kernel.eval(std::span<const double>(z.data(), dim)) * std::abs(w[dim - 1]);
  };
  double sum = 0.0;
  for (const Rule1D* half : {&lower, &upper}) {
    std::array<const Rule1D*, kMaxDim> rules{};
    for (int k = 0; k < dim - 1; ++k) rules[k] = &axes[k];
    rules[dim - 1] = half;
    sum += kernels_detail::tensor_sum(dim, std::span<const Rule1D* const>(rules.data(), dim), integrand);
  }
  return sum;
}

/// Integral of G(z) |z| over R^N, by a tensor rule in spherical coordinates
/// (N = 2, 3) or an orthant-split Cartesian tensor rule (N >= 4). Rays stop at
/// the support boundary.
inline double first_radial_moment(const Kernel& kernel, const QuadratureConfig& cfg = {}) {
  const int dim = kernel.dim();
  const Rule1D& radial = gauss_legendre(cfg.tensor_order, 0.0, 1.0);
  const Eigen::MatrixXd& m = kernel.metric_matrix();
  std::array<double, kMaxDim> z{};
  const std::span<const double> zs(z.data(), dim);
  // int_0^{rmax} G(r xi) r^N dr for a unit direction xi.
  auto ray = [&](std::span<const double> xi) {
    Eigen::Map<const Eigen::VectorXd> d(xi.data(), dim);
    const double rmax = 1.0 / std::sqrt(d.dot(m * d));
    double acc = 0.0;
    for (std::size_t i = 0; i < radial.size(); ++i) {
      const double r = rmax * radial.nodes[i];
      for (int k = 0; k < dim; ++k) z[k] = r * xi[k];
      acc += radial.weights[i] * std::pow(r, dim) * kernel.eval(zs);
    }
    return rmax * acc;
  };
  if (dim == 2) {
    const int angles = 2 * cfg.tensor_order;
    const double dphi = 2.0 * std::numbers::pi / angles;
    double sum = 0.0;
    for (int j = 0; j < angles; ++j) {
      const std::array<double, 2> xi{std::cos(j * dphi), std::sin(j * dphi)};
      sum += ray(xi);
    }
    return sum * dphi;
  }
  if (dim == 3) {
    const Rule1D& polar = gauss_legendre(cfg.tensor_order);  // in cos(theta)
    const int angles = 2 * cfg.tensor_order;
    const double dphi = 2.0 * std::numbers::pi / angles;
    double sum = 0.0;
    for (std::size_t k = 0; k < polar.size(); ++k) {
      const double ct = polar.nodes[k];
      const double st = std::sqrt(1.0 - ct * ct);
      double ring = 0.0;
      for (int j = 0; j < angles; ++j) {
        const std::array<double, 3> xi{st * std::cos(j * dphi), st * std::sin(j * dphi), ct};
        ring += ray(xi);
      }
      sum += polar.weights[k] * ring;
    }
    return sum * dphi;
  }
  std::vector<Rule1D> lower;
  std::vector<Rule1D> upper;
  for (int k = 0; k < dim; ++k) {
    const double e = std::sqrt(kernel.metric_inverse()(k, k));
    lower.push_back(gauss_legendre(cfg.tensor_order, -e, 0.0));
    upper.push_back(gauss_legendre(cfg.tensor_order, 0.0, e));
  }
  double sum = 0.0;
  for (int orthant = 0; orthant < (1 << dim); ++orthant) {
    std::array<const Rule1D*, kMaxDim> rules{};
    for (int k = 0; k < dim; ++k) rules[k] = (orthant >> k) & 1 ? &upper[k] : &lower[k];
    sum += kernels_detail::tensor_sum(dim, std::span<const Rule1D* const>(rules.data(), dim),
                                      [&](std::span<const double> p) { return kernel.eval(p) * norm(p); });
  }
  return sum;
}

}  // namespace nlperim
