#pragma once

// Thin FFTW wrapper. Plans are created once per size under a mutex and then
// executed through the new-array interface, which FFTW documents as
// thread-safe.

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

#include "gkdv/errors.hpp"

namespace gkdv::detail {

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    std::vector<double> real(n);
    std::vector<std::complex<double>> half(n / 2 + 1);
    const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    auto* c = reinterpret_cast<fftw_complex*>(half.data());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n), real.data(), c, flags);
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n), c, real.data(), flags);
    if (forward_ == nullptr || backward_ == nullptr) {
      throw StructuralError("FFTW could not create a plan for n = " + std::to_string(n));
    }
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  ~RealFft() {
    fftw_destroy_plan(forward_);
    fftw_destroy_plan(backward_);
  }

  std::size_t size() const { return n_; }

  /// Unnormalized r2c transform; `out` holds n/2 + 1 coefficients.
  void forward(std::span<const double> in, std::span<std::complex<double>> out) const {
    thread_local std::vector<double> scratch;
    scratch.assign(in.begin(), in.end());
    fftw_execute_dft_r2c(forward_, scratch.data(), reinterpret_cast<fftw_complex*>(out.data()));
  }

  /// Unnormalized c2r transform from n/2 + 1 coefficients.
  void backward(std::span<const std::complex<double>> in, std::span<double> out) const {
    thread_local std::vector<std::complex<double>> scratch;
    scratch.assign(in.begin(), in.end());
    fftw_execute_dft_c2r(backward_, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
  }

  static const RealFft& get(std::size_t n) {
    static std::mutex mutex;
    static std::map<std::size_t, std::unique_ptr<RealFft>> cache;
    std::lock_guard lock(mutex);
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<RealFft>(n);
    return *slot;
  }

 private:
  std::size_t n_;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

}  // namespace gkdv::detail
