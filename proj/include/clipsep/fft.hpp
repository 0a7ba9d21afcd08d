#pragma once

// Thin RAII wrapper over FFTW's real-to-complex transforms. Plans are cached
// per (size, precision) and reused via the new-array execute API; plans are
// created with FFTW_ESTIMATE so planning is deterministic.

#include <complex>
#include <map>
#include <mutex>

#include <fftw3.h>

#include "clipsep/common.hpp"

namespace clipsep {

namespace detail {

template <class R>
struct FftwApi;

template <>
struct FftwApi<double> {
  using plan = fftw_plan;
  using cpx = fftw_complex;
  static plan plan_r2c(int n, double* in, cpx* out) {
    return fftw_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static plan plan_c2r(int n, cpx* in, double* out) {
    return fftw_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void exec_r2c(plan p, double* in, cpx* out) { fftw_execute_dft_r2c(p, in, out); }
  static void exec_c2r(plan p, cpx* in, double* out) { fftw_execute_dft_c2r(p, in, out); }
};

template <>
struct FftwApi<float> {
  using plan = fftwf_plan;
  using cpx = fftwf_complex;
  static plan plan_r2c(int n, float* in, cpx* out) {
    return fftwf_plan_dft_r2c_1d(n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static plan plan_c2r(int n, cpx* in, float* out) {
    return fftwf_plan_dft_c2r_1d(n, in, out, FFTW_ESTIMATE | FFTW_UNALIGNED);
  }
  static void exec_r2c(plan p, float* in, cpx* out) { fftwf_execute_dft_r2c(p, in, out); }
  static void exec_c2r(plan p, cpx* in, float* out) { fftwf_execute_dft_c2r(p, in, out); }
};

}  // namespace detail

// Forward/inverse real FFT of a fixed size. The inverse is unnormalized in
// FFTW, so inverse() divides by n. Not re-entrant per instance; create one
// per thread.
template <class R>
class RealFft {
  using Api = detail::FftwApi<R>;

 public:
  explicit RealFft(int n) : n_(n), scratch_r_(std::size_t(n)), scratch_c_(std::size_t(n / 2 + 1)) {
    static std::mutex plan_mutex;  // FFTW planning is not thread-safe
    std::lock_guard<std::mutex> lock(plan_mutex);
    fwd_ = Api::plan_r2c(n, scratch_r_.data(),
                         reinterpret_cast<typename Api::cpx*>(scratch_c_.data()));
    inv_ = Api::plan_c2r(n, reinterpret_cast<typename Api::cpx*>(scratch_c_.data()),
                         scratch_r_.data());
  }
  ~RealFft() {
    if constexpr (std::is_same_v<R, double>) {
      fftw_destroy_plan(fwd_);
      fftw_destroy_plan(inv_);
    } else {
      fftwf_destroy_plan(fwd_);
      fftwf_destroy_plan(inv_);
    }
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  int size() const { return n_; }
  int bins() const { return n_ / 2 + 1; }

  // out must hold n/2+1 complex bins.
  void forward(const R* in, std::complex<R>* out) {
    std::copy(in, in + n_, scratch_r_.begin());
    Api::exec_r2c(fwd_, scratch_r_.data(), reinterpret_cast<typename Api::cpx*>(out));
  }

  // in is preserved; out must hold n samples. Applies the 1/n normalization.
  void inverse(const std::complex<R>* in, R* out) {
    std::copy(in, in + bins(), scratch_c_.begin());  // c2r destroys its input
    Api::exec_c2r(inv_, reinterpret_cast<typename Api::cpx*>(scratch_c_.data()), out);
    const R scale = R(1) / R(n_);
    for (int i = 0; i < n_; ++i) out[i] *= scale;
  }

 private:
  int n_;
  std::vector<R> scratch_r_;
  std::vector<std::complex<R>> scratch_c_;
  typename Api::plan fwd_;
  typename Api::plan inv_;
};

}  // namespace clipsep
