#pragma once

// RAII wrapper over FFTW complex transforms in one or two dimensions.
// Planning is serialized by a process-wide mutex (FFTW's planner is not
// re-entrant); executing an existing plan is thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <mutex>
#include <span>
#include <vector>

#include "symspace/error.hpp"

namespace symspace {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class FftPlan {
 public:
  /// Row-major transform of shape dims (rank 1 or 2), unnormalized both ways.
  explicit FftPlan(std::vector<int> dims) : dims_(std::move(dims)) {
    if (dims_.empty() || dims_.size() > 3) throw DomainError("FftPlan: rank must be 1..3");
    size_ = 1;
    for (int n : dims_) {
      if (n <= 0) throw DomainError("FftPlan: extents must be positive");
      size_ *= static_cast<std::size_t>(n);
    }
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    buffer_ = fftw_alloc_complex(size_);
    if (buffer_ == nullptr) throw ResourceError("FftPlan: allocation failed");
    const int rank = static_cast<int>(dims_.size());
    forward_ = fftw_plan_dft(rank, dims_.data(), buffer_, buffer_, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft(rank, dims_.data(), buffer_, buffer_, FFTW_BACKWARD, FFTW_ESTIMATE);
    if (forward_ == nullptr || backward_ == nullptr) {
      release();
      throw ResourceError("FftPlan: planning failed");
    }
  }

  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;

  ~FftPlan() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    release();
  }

  std::size_t size() const noexcept { return size_; }
  const std::vector<int>& dims() const noexcept { return dims_; }

  std::span<std::complex<double>> data() noexcept {
    return {reinterpret_cast<std::complex<double>*>(buffer_), size_};
  }

  void forward() { fftw_execute(forward_); }
  void backward() { fftw_execute(backward_); }

 private:
  void release() {
    if (forward_ != nullptr) fftw_destroy_plan(forward_);
    if (backward_ != nullptr) fftw_destroy_plan(backward_);
    if (buffer_ != nullptr) fftw_free(buffer_);
    forward_ = backward_ = nullptr;
    buffer_ = nullptr;
  }

  std::vector<int> dims_;
  std::size_t size_ = 0;
  fftw_complex* buffer_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Signed integer frequency of DFT index j on an n-point axis (Nyquist maps to -n/2).
inline int fft_frequency(int j, int n) { return j < (n + 1) / 2 ? j : j - n; }

/// Applies a Fourier multiplier m(k_1, ..., k_d) (integer frequencies) to complex data in place.
template <class Multiplier>
void apply_multiplier(FftPlan& plan, Multiplier&& m) {
  plan.forward();
  auto buf = plan.data();
  const auto& dims = plan.dims();
  const double scale = 1.0 / static_cast<double>(plan.size());
  if (dims.size() == 1) {
    const int n = dims[0];
    for (int j = 0; j < n; ++j) buf[static_cast<std::size_t>(j)] *= scale * m(fft_frequency(j, n), 0);
  } else {
    const int n0 = dims[0];
    const int n1 = dims[1];
    for (int a = 0; a < n0; ++a) {
      const int ka = fft_frequency(a, n0);
      for (int b = 0; b < n1; ++b) {
        buf[static_cast<std::size_t>(a) * n1 + b] *= scale * m(ka, fft_frequency(b, n1));
      }
    }
  }
  plan.backward();
}

}  // namespace symspace
