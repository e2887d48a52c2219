#pragma once

// The rescaled convolution functional
//   F_eps(E) = (1/eps) * integral over E^c cap Omega of f(G_eps * chi_{E cap Omega})
// evaluated on rasterized sets with a discrete eps-stencil. The convolution
// sees zero outside Omega. Two convolution paths: direct stencil sums
// (reference) and zero-padded FFT (fast).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "fft_convolution.hpp"
#include "geometry.hpp"
#include "kernels.hpp"
#include "profiles.hpp"
#include "shapes.hpp"

namespace nlperim {

/// Raised when eps is too small for the voxel spacing.
class ResolutionError : public std::invalid_argument {
 public:
  ResolutionError(const std::string& what, int required_resolution)
      : std::invalid_argument(what), required_resolution_(required_resolution) {}
  int required_resolution() const { return required_resolution_; }

 private:
  int required_resolution_;
};

/// Minimum ratio eps / h accepted by build_stencil.
inline constexpr double kMinVoxelsPerEpsilon = 4.0;

/// Discrete G_eps sampled at integer offsets times h, rescaled to unit sum.
/// `gradients` samples grad G_eps with the same rescale (dim entries per offset).
struct Stencil {
  int dim = 2;
  double epsilon = 0.0;
  double spacing = 0.0;
  int radius = 0;
  std::vector<int> offsets;  // dim entries per stencil point
  std::vector<double> weights;
  std::vector<double> gradients;
  double raw_mass = 0.0;  // sum of h^N G_eps(o h) before the rescale

  std::size_t size() const { return weights.size(); }
  std::span<const int> offset(std::size_t e) const { return {offsets.data() + e * dim, static_cast<std::size_t>(dim)}; }

  /// Gradient component `axis` as a contiguous array aligned with `weights`.
  std::vector<double> gradient_component(int axis) const {
    std::vector<double> out(size());
    for (std::size_t e = 0; e < size(); ++e) out[e] = gradients[e * dim + axis];
    return out;
  }
};

inline Stencil build_stencil(const Kernel& kernel, double epsilon, const Domain& dom) {
  dom.validate();
  if (kernel.dim() != dom.dim()) throw std::invalid_argument("build_stencil: kernel and domain dimensions differ");
  if (!(epsilon > 0.0)) throw std::invalid_argument("build_stencil: epsilon must be positive");
  const double h = dom.spacing();
  if (epsilon < kMinVoxelsPerEpsilon * h * (1.0 - 1e-12)) {
    const double extent = dom.upper[0] - dom.lower[0];
    const int required = static_cast<int>(std::ceil(kMinVoxelsPerEpsilon * extent / epsilon - 1e-9));
    throw ResolutionError("epsilon = " + std::to_string(epsilon) + " needs eps >= 4h: resolution >= " +
                              std::to_string(required) + " voxels along axis 0 (have " +
                              std::to_string(dom.resolution) + ")",
                          required);
  }
  const int dim = dom.dim();
  Stencil st;
  st.dim = dim;
  st.epsilon = epsilon;
  st.spacing = h;
  st.radius = static_cast<int>(std::ceil(epsilon / h - 1e-12));
  const double cell = std::pow(h / epsilon, dim);  // h^N / eps^N
  std::array<int, kMaxDim> o{};
  for (int k = 0; k < dim; ++k) o[k] = -st.radius;
  std::array<double, kMaxDim> z{};
  std::array<double, kMaxDim> grad{};
  const std::span<const double> zs(z.data(), dim);
  while (true) {
    for (int k = 0; k < dim; ++k) z[k] = (o[k] * h) / epsilon;
    const double g = kernel.eval(zs);
    if (g > 0.0) {
      kernel.gradient(zs, std::span<double>(grad.data(), dim));
      st.offsets.insert(st.offsets.end(), o.begin(), o.begin() + dim);
      st.weights.push_back(g * cell);
      for (int k = 0; k < dim; ++k) st.gradients.push_back(grad[k] * cell / epsilon);
    }
    int k = dim - 1;
    while (k >= 0) {
      if (++o[k] <= st.radius) break;
      o[k] = -st.radius;
      --k;
    }
    if (k < 0) break;
  }
  double mass = 0.0;
  for (double w : st.weights) mass += w;
  st.raw_mass = mass;
  const double rescale = 1.0 / mass;
  for (double& w : st.weights) w *= rescale;
  for (double& g : st.gradients) g *= rescale;
  return st;
}

namespace nonlocal_detail {

inline void require_fits(const std::vector<std::size_t>& counts, int radius) {
  for (std::size_t n : counts)
    if (static_cast<std::size_t>(2 * radius) > n)
      throw std::invalid_argument("convolution: stencil radius exceeds half the grid resolution");
}

/// out[v] = sum_o values[o] * in[v - o], zero outside the grid. The per-voxel
/// summation order is the stencil order, so results are run-to-run identical.
inline std::vector<double> correlate_direct(std::span<const double> in, const std::vector<std::size_t>& counts,
                                            std::span<const int> offsets, std::span<const double> values) {
  const int dim = static_cast<int>(counts.size());
  const std::size_t row = counts.back();
  const std::size_t rows = in.size() / row;
  std::vector<double> out(in.size(), 0.0);
  std::vector<std::size_t> stride(dim, 1);
  for (int k = dim - 2; k >= 0; --k) stride[k] = stride[k + 1] * counts[k + 1];
  std::vector<long> idx(dim, 0);
  for (std::size_t e = 0; e < values.size(); ++e) {
    const double w = values[e];
    const int* o = offsets.data() + e * dim;
    const long last = o[dim - 1];
    const long lo = std::max(0L, last);
    const long hi = std::min(static_cast<long>(row), static_cast<long>(row) + last);
    if (lo >= hi) continue;
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t rem = r;
      long src_row = 0;
      bool valid = true;
      for (int k = dim - 2; k >= 0; --k) {
        const long i = static_cast<long>(rem % counts[k]);
        rem /= counts[k];
        const long j = i - o[k];
        if (j < 0 || j >= static_cast<long>(counts[k])) {
          valid = false;
          break;
        }
        src_row += j * static_cast<long>(stride[k]);
      }
      if (!valid) continue;
      double* dst = out.data() + r * row;
      const double* src = in.data() + src_row;
      for (long i = lo; i < hi; ++i) dst[i] += w * src[i - last];
    }
  }
  return out;
}

inline void clamp_unit(std::vector<double>& v) {
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
}

}  // namespace nonlocal_detail

/// G_eps * field by direct stencil sums, clamped to [0, 1].
inline std::vector<double> convolve_direct(const IndicatorField& field, const Stencil& st) {
  nonlocal_detail::require_fits(field.counts, st.radius);
  std::vector<double> out = nonlocal_detail::correlate_direct(field.values, field.counts, st.offsets, st.weights);
  nonlocal_detail::clamp_unit(out);
  return out;
}

/// Same contract as convolve_direct through a zero-padded FFT.
inline std::vector<double> convolve_fft(const IndicatorField& field, const Stencil& st) {
  nonlocal_detail::require_fits(field.counts, st.radius);
  FftConvolver fft(field.counts, st.radius);
  const Spectrum a = fft.transform_field(field.values);
  Spectrum product = fft.transform_stencil(st.offsets, st.weights);
  for (std::size_t i = 0; i < product.size(); ++i) product[i] *= a[i];
  std::vector<double> out = fft.inverse(product);
  nonlocal_detail::clamp_unit(out);
  return out;
}

enum class ConvolutionPath { automatic, direct, fft };

/// How E^c is discretized on the voxel grid.
enum class ComplementRule {
  /// Complement weight 1 - value plus a first-moment correction from the
  /// sub-voxel position of the interface (second order in h / eps).
  moment_corrected,
  /// Voxels with value <= 1/2 count fully as complement; plain convolution.
  threshold,
};

struct FepsOptions {
  int supersample = 4;
  ComplementRule rule = ComplementRule::moment_corrected;
  ConvolutionPath path = ConvolutionPath::automatic;
};

namespace nonlocal_detail {

inline bool use_fft(ConvolutionPath path, std::size_t voxels, std::size_t stencil_size) {
  if (path == ConvolutionPath::direct) return false;
  if (path == ConvolutionPath::fft) return true;
  return voxels * stencil_size > (std::size_t{1} << 24);
}

}  // namespace nonlocal_detail

/// F_eps on an already rasterized field.
inline double functional_on_field(const IndicatorField& field, const Stencil& st, const Profile& f,
                                  const FepsOptions& opts = {}) {
  nonlocal_detail::require_fits(field.counts, st.radius);
  const std::size_t total = field.size();
  const int dim = st.dim;
  const double cell = std::pow(st.spacing, dim);
  const bool fft = nonlocal_detail::use_fft(opts.path, total, st.size());

  if (opts.rule == ComplementRule::threshold) {
    const std::vector<double> conv = fft ? convolve_fft(field, st) : convolve_direct(field, st);
    double sum = 0.0;
    for (std::size_t v = 0; v < total; ++v)
      if (field.values[v] <= 0.5) sum += f(conv[v]);
    return sum * cell / st.epsilon;
  }

  // conv = W * a - sum_k G_k * d_k ;  corr = sum_k (G_k * a) d_k
  std::vector<double> conv;
  std::vector<double> corr(total, 0.0);
  if (fft) {
    FftConvolver conv_fft(field.counts, st.radius);
    const Spectrum a = conv_fft.transform_field(field.values);
    Spectrum acc = conv_fft.transform_stencil(st.offsets, st.weights);
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] *= a[i];
    for (int k = 0; k < dim; ++k) {
      const Spectrum g = conv_fft.transform_stencil(st.offsets, st.gradient_component(k));
      {
        const Spectrum d = conv_fft.transform_field(field.moments[k]);
        for (std::size_t i = 0; i < acc.size(); ++i) acc[i] -= g[i] * d[i];
      }
      Spectrum ga(g.size());
      for (std::size_t i = 0; i < ga.size(); ++i) ga[i] = g[i] * a[i];
      const std::vector<double> grad = conv_fft.inverse(ga);
      for (std::size_t v = 0; v < total; ++v) corr[v] += grad[v] * field.moments[k][v];
    }
    conv = conv_fft.inverse(acc);
  } else {
    conv = nonlocal_detail::correlate_direct(field.values, field.counts, st.offsets, st.weights);
    for (int k = 0; k < dim; ++k) {
      const std::vector<double> gk = st.gradient_component(k);
      const std::vector<double> shift = nonlocal_detail::correlate_direct(field.moments[k], field.counts, st.offsets, gk);
      for (std::size_t v = 0; v < total; ++v) conv[v] -= shift[v];
      const std::vector<double> grad = nonlocal_detail::correlate_direct(field.values, field.counts, st.offsets, gk);
      for (std::size_t v = 0; v < total; ++v) corr[v] += grad[v] * field.moments[k][v];
    }
  }
  nonlocal_detail::clamp_unit(conv);
  double sum = 0.0;
  for (std::size_t v = 0; v < total; ++v) {
    const double a = field.values[v];
    if (a >= 1.0) continue;  // full voxel: no complement and zero moment
    sum += (1.0 - a) * f(conv[v]);
    if (corr[v] != 0.0) sum -= f.derivative(conv[v]) * corr[v];
  }
  return std::max(sum, 0.0) * cell / st.epsilon;
}

/// F_eps(E) for an analytic shape rasterized on `dom`.
inline double eval_F_eps(const Shape& shape, double epsilon, const Profile& f, const Kernel& kernel, const Domain& dom,
                         const FepsOptions& opts = {}) {
  const Stencil st = build_stencil(kernel, epsilon, dom);
  const IndicatorField field = rasterize(shape, dom, opts.supersample);
  return functional_on_field(field, st, f, opts);
}

}  // namespace nlperim
