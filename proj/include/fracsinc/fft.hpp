#ifndef FRACSINC_FFT_HPP
#define FRACSINC_FFT_HPP

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <vector>

#include "fracsinc/error.hpp"

namespace fracsinc {

namespace detail {

// FFTW planning is not thread-safe; execution with the new-array interface is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwFree {
  void operator()(void* p) const noexcept { fftw_free(p); }
};

}  // namespace detail

template <class T>
using FftwBuffer = std::unique_ptr<T[], detail::FftwFree>;

template <class T>
FftwBuffer<T> fftw_buffer(std::size_t n) {
  auto* p = static_cast<T*>(fftw_malloc(sizeof(T) * (n ? n : 1)));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<T>(p);
}

/// Real-to-complex / complex-to-real transform pair on an n^d grid.
/// Immutable after construction; forward/backward may be called concurrently
/// with distinct buffers obtained from real_buffer()/complex_buffer().
class RealFft {
 public:
  RealFft(int d, int n) : d_(d), n_(n) {
    real_size_ = 1;
    for (int i = 0; i < d; ++i) real_size_ *= static_cast<std::size_t>(n);
    complex_size_ = real_size_ / static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
    std::vector<int> dims(d, n);
    auto in = real_buffer();
    auto out = complex_buffer();
    std::lock_guard lock(detail::fftw_planner_mutex());
    fwd_ = fftw_plan_dft_r2c(d, dims.data(), in.get(), out.get(), FFTW_ESTIMATE);
    bwd_ = fftw_plan_dft_c2r(d, dims.data(), out.get(), in.get(), FFTW_ESTIMATE);
    if (!fwd_ || !bwd_) throw Error(Errc::invalid_argument, "FFTW planning failed");
  }

  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  ~RealFft() {
    std::lock_guard lock(detail::fftw_planner_mutex());
    if (fwd_) fftw_destroy_plan(fwd_);
    if (bwd_) fftw_destroy_plan(bwd_);
  }

  int dim() const noexcept { return d_; }
  int n() const noexcept { return n_; }
  std::size_t real_size() const noexcept { return real_size_; }
  /// Half-spectrum length: n^{d-1} * (n/2 + 1).
  std::size_t complex_size() const noexcept { return complex_size_; }

  FftwBuffer<double> real_buffer() const { return fftw_buffer<double>(real_size_); }
  FftwBuffer<fftw_complex> complex_buffer() const { return fftw_buffer<fftw_complex>(complex_size_); }

  void forward(double* in, fftw_complex* out) const { fftw_execute_dft_r2c(fwd_, in, out); }
  /// Unnormalized inverse; clobbers its input.
  void backward(fftw_complex* in, double* out) const { fftw_execute_dft_c2r(bwd_, in, out); }

 private:
  int d_;
  int n_;
  std::size_t real_size_ = 0;
  std::size_t complex_size_ = 0;
  fftw_plan fwd_ = nullptr;
  fftw_plan bwd_ = nullptr;
};

}  // namespace fracsinc

#endif  // FRACSINC_FFT_HPP
