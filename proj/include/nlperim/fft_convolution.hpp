#pragma once

// Zero-padded FFT convolution on voxel grids (FFTW r2c / c2r).

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <cstring>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>
#include <vector>

namespace nlperim {

namespace fft_detail {

inline std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

/// Smallest n' >= n with no prime factors above 7.
inline std::size_t smooth_size(std::size_t n) {
  for (std::size_t m = n;; ++m) {
    std::size_t r = m;
    for (std::size_t p : {2u, 3u, 5u, 7u})
      while (r % p == 0) r /= p;
    if (r == 1) return m;
  }
}

struct FftwFree {
  void operator()(void* p) const { fftw_free(p); }
};

}  // namespace fft_detail

using Spectrum = std::vector<std::complex<double>>;

/// Linear (non-periodic) convolution of grid fields with compactly supported
/// stencils of radius <= `radius`. Each axis is padded to at least n + radius.
class FftConvolver {
 public:
  FftConvolver(std::vector<std::size_t> counts, int radius) : counts_(std::move(counts)) {
    if (counts_.empty()) throw std::invalid_argument("FftConvolver: empty grid");
    padded_.resize(counts_.size());
    real_size_ = 1;
    for (std::size_t k = 0; k < counts_.size(); ++k) {
      padded_[k] = fft_detail::smooth_size(counts_[k] + static_cast<std::size_t>(radius));
      real_size_ *= padded_[k];
    }
    complex_size_ = real_size_ / padded_.back() * (padded_.back() / 2 + 1);
    real_.reset(static_cast<double*>(fftw_malloc(sizeof(double) * real_size_)));
    spec_.reset(static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * complex_size_)));
    if (!real_ || !spec_) throw std::bad_alloc();
    std::vector<int> dims(padded_.begin(), padded_.end());
    std::lock_guard lock(fft_detail::planner_mutex());
    forward_ = fftw_plan_dft_r2c(static_cast<int>(dims.size()), dims.data(), real_.get(), spec_.get(), FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r(static_cast<int>(dims.size()), dims.data(), spec_.get(), real_.get(), FFTW_ESTIMATE);
    if (!forward_ || !backward_) throw std::runtime_error("FftConvolver: FFTW planning failed");
  }

  FftConvolver(const FftConvolver&) = delete;
  FftConvolver& operator=(const FftConvolver&) = delete;

  ~FftConvolver() {
    std::lock_guard lock(fft_detail::planner_mutex());
    if (forward_) fftw_destroy_plan(forward_);
    if (backward_) fftw_destroy_plan(backward_);
  }

  const std::vector<std::size_t>& padded() const { return padded_; }

  /// Spectrum of a field given on the unpadded grid.
  Spectrum transform_field(std::span<const double> field) {
    std::memset(real_.get(), 0, sizeof(double) * real_size_);
    const std::size_t dim = counts_.size();
    const std::size_t row = counts_.back();
    const std::size_t rows = field.size() / row;
    std::vector<std::size_t> idx(dim, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t rem = r;
      std::size_t offset = 0;
      std::size_t stride = padded_.back();
      for (std::size_t k = dim - 1; k-- > 0;) {
        idx[k] = rem % counts_[k];
        rem /= counts_[k];
        offset += idx[k] * stride;
        stride *= padded_[k];
      }
      std::memcpy(real_.get() + offset, field.data() + r * row, sizeof(double) * row);
    }
    return execute_forward();
  }

  /// Spectrum of a stencil given as integer offsets (dim per entry) and values.
  Spectrum transform_stencil(std::span<const int> offsets, std::span<const double> values) {
    std::memset(real_.get(), 0, sizeof(double) * real_size_);
    const std::size_t dim = counts_.size();
    for (std::size_t e = 0; e < values.size(); ++e) {
      std::size_t offset = 0;
      for (std::size_t k = 0; k < dim; ++k) {
        const long p = static_cast<long>(padded_[k]);
        const long wrapped = ((offsets[e * dim + k] % p) + p) % p;
        offset = offset * padded_[k] + static_cast<std::size_t>(wrapped);
      }
      real_.get()[offset] += values[e];
    }
    return execute_forward();
  }

  /// Inverse transform, cropped to the unpadded grid and scaled.
  std::vector<double> inverse(const Spectrum& spectrum) {
    std::memcpy(spec_.get(), spectrum.data(), sizeof(fftw_complex) * complex_size_);
    fftw_execute(backward_);
    const double scale = 1.0 / static_cast<double>(real_size_);
    const std::size_t dim = counts_.size();
    const std::size_t row = counts_.back();
    std::size_t total = 1;
    for (std::size_t n : counts_) total *= n;
    std::vector<double> out(total);
    const std::size_t rows = total / row;
    std::vector<std::size_t> idx(dim, 0);
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t rem = r;
      std::size_t offset = 0;
      std::size_t stride = padded_.back();
      for (std::size_t k = dim - 1; k-- > 0;) {
        idx[k] = rem % counts_[k];
        rem /= counts_[k];
        offset += idx[k] * stride;
        stride *= padded_[k];
      }
      for (std::size_t i = 0; i < row; ++i) out[r * row + i] = real_.get()[offset + i] * scale;
    }
    return out;
  }

 private:
  Spectrum execute_forward() {
    fftw_execute(forward_);
    Spectrum out(complex_size_);
    std::memcpy(static_cast<void*>(out.data()), spec_.get(), sizeof(fftw_complex) * complex_size_);
    return out;
  }

  std::vector<std::size_t> counts_;
  std::vector<std::size_t> padded_;
  std::size_t real_size_ = 0;
  std::size_t complex_size_ = 0;
  std::unique_ptr<double, fft_detail::FftwFree> real_;
  std::unique_ptr<fftw_complex, fft_detail::FftwFree> spec_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace nlperim
