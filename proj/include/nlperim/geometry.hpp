#pragma once

// Small dense-vector helpers shared by kernels, shapes and density.

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace nlperim {

using Vec = std::vector<double>;

/// Upper bound on the ambient dimension; lets hot loops use stack buffers.
inline constexpr int kMaxDim = 6;

inline double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }

inline Vec normalized(std::span<const double> a) {
  const double n = norm(a);
  if (!(n > 0.0)) throw std::invalid_argument("normalized: zero vector");
  Vec out(a.begin(), a.end());
  for (double& x : out) x /= n;
  return out;
}

inline Vec unit_axis(int dim, int axis) {
  Vec e(dim, 0.0);
  e[axis] = 1.0;
  return e;
}

/// Throws unless `nu` has unit length within 1e-12.
inline void require_unit(std::span<const double> nu, int dim, const char* where) {
  if (static_cast<int>(nu.size()) != dim)
    throw std::invalid_argument(std::string(where) + ": direction has wrong dimension");
  if (std::abs(norm(nu) - 1.0) > 1e-12)
    throw std::invalid_argument(std::string(where) + ": direction is not a unit vector");
}

/// Orthogonal map Q with Q e_N = nu, built from one Householder reflection.
/// Reflection vector nu + sign(nu_N) e_N; the sign is undone by the leading factor.
class FrameToNormal {
 public:
  explicit FrameToNormal(std::span<const double> nu) : dim_(static_cast<int>(nu.size())), u_(nu.begin(), nu.end()) {
    sign_ = nu[dim_ - 1] >= 0.0 ? 1.0 : -1.0;
    u_[dim_ - 1] += sign_;
    uu_ = dot(u_, u_);
  }

  /// out = Q w.
  void apply(std::span<const double> w, std::span<double> out) const {
    const double c = 2.0 * dot(u_, w) / uu_;
    for (int i = 0; i < dim_; ++i) out[i] = -sign_ * (w[i] - c * u_[i]);
  }

  int dim() const { return dim_; }

 private:
  int dim_;
  Vec u_;
  double sign_ = 1.0;
  double uu_ = 1.0;
};

}  // namespace nlperim
