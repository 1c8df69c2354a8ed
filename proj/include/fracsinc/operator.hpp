#ifndef FRACSINC_OPERATOR_HPP
#define FRACSINC_OPERATOR_HPP

#include <cmath>
#include <cstddef>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <sstream>
#include <vector>

#include "fracsinc/domain.hpp"
#include "fracsinc/error.hpp"
#include "fracsinc/fft.hpp"
#include "fracsinc/kernel.hpp"
#include "fracsinc/lattice.hpp"

namespace fracsinc {

/// Coefficients v_k of a sinc function v_h = sum_k v_k phi^N_k on the lattice.
class CoefficientField {
 public:
  explicit CoefficientField(const Lattice& lattice) : lattice_(lattice), data_(lattice.size(), 0.0) {}
  CoefficientField(const Lattice& lattice, std::vector<double> data) : lattice_(lattice), data_(std::move(data)) {
    if (data_.size() != lattice_.size()) throw Error(Errc::invalid_argument, "field length does not match lattice");
  }

  const Lattice& lattice() const noexcept { return lattice_; }
  std::size_t size() const noexcept { return data_.size(); }
  double& operator[](std::size_t k) noexcept { return data_[k]; }
  double operator[](std::size_t k) const noexcept { return data_[k]; }
  double& at(const Index& k) noexcept { return data_[lattice_.flatten(k)]; }
  double at(const Index& k) const noexcept { return data_[lattice_.flatten(k)]; }
  std::span<double> values() noexcept { return data_; }
  std::span<const double> values() const noexcept { return data_; }
  const std::vector<double>& data() const noexcept { return data_; }

 private:
  Lattice lattice_;
  std::vector<double> data_;
};

inline double dot(const CoefficientField& a, const CoefficientField& b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

inline double max_abs(const CoefficientField& a) {
  double m = 0.0;
  for (double v : a.values()) m = std::max(m, std::abs(v));
  return m;
}

inline void zero_exterior(const DomainMask& mask, CoefficientField& v) {
  for (std::size_t k = 0; k < v.size(); ++k)
    if (!mask.inside(k)) v[k] = 0.0;
}

namespace detail {

inline void require_compatible(const Lattice& a, const Lattice& b) {
  if (!(a == b)) throw Error(Errc::invalid_argument, "shape mismatch between kernel/mask and field");
}

}  // namespace detail

/// w_j = N^{2s} sum_k v_k Phi(j - k) as a linear convolution, evaluated by
/// zero padding to (2N)^d and multiplying with the cached kernel spectrum.
inline CoefficientField apply_full(const SpectralKernel& kernel, const CoefficientField& v) {
  detail::require_compatible(kernel.lattice(), v.lattice());
  const RealFft& fft = kernel.padded_fft();
  const Lattice& lat = kernel.lattice();
  const int d = lat.dim(), n = lat.n();
  const std::size_t m2 = static_cast<std::size_t>(2 * n);

  auto buf = fft.real_buffer();
  auto spec = fft.complex_buffer();
  std::fill(buf.get(), buf.get() + fft.real_size(), 0.0);
  // copy rows of length n into the padded grid
  const std::size_t rows = lat.size() / static_cast<std::size_t>(n);
  auto padded_row_offset = [&](std::size_t row) {
    std::size_t off = 0, r = row;
    std::size_t stride = m2;
    for (int i = d - 2; i >= 0; --i) {
      off += (r % static_cast<std::size_t>(n)) * stride;
      r /= static_cast<std::size_t>(n);
      stride *= m2;
    }
    return off;
  };
  for (std::size_t row = 0; row < rows; ++row) {
    const std::size_t src = row * static_cast<std::size_t>(n);
    std::copy(v.data().begin() + static_cast<std::ptrdiff_t>(src),
              v.data().begin() + static_cast<std::ptrdiff_t>(src + n), buf.get() + padded_row_offset(row));
  }

  fft.forward(buf.get(), spec.get());
  const auto& ks = kernel.padded_spectrum();
  for (std::size_t j = 0; j < ks.size(); ++j) {
    spec[j][0] *= ks[j];
    spec[j][1] *= ks[j];
  }
  fft.backward(spec.get(), buf.get());

  const double factor = kernel.scale() / static_cast<double>(fft.real_size());
  CoefficientField w(lat);
  for (std::size_t row = 0; row < rows; ++row) {
    const double* src = buf.get() + padded_row_offset(row);
    for (int i = 0; i < n; ++i) {
      const double value = factor * src[i];
      if (!std::isfinite(value)) throw Error(Errc::convolution_integrity, "convolution integrity: non-finite output");
      w[row * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] = value;
    }
  }
  return w;
}

/// S_Omega Phi^N S_Omega^T restricted to a lattice mask.
class MaskedOperator {
 public:
  MaskedOperator(std::shared_ptr<const SpectralKernel> kernel, DomainMask mask)
      : kernel_(std::move(kernel)), mask_(std::move(mask)) {
    if (!kernel_) throw Error(Errc::invalid_argument, "masked operator needs a kernel");
    detail::require_compatible(kernel_->lattice(), mask_.lattice());
  }

  const SpectralKernel& kernel() const noexcept { return *kernel_; }
  std::shared_ptr<const SpectralKernel> kernel_ptr() const noexcept { return kernel_; }
  const DomainMask& mask() const noexcept { return mask_; }
  const Lattice& lattice() const noexcept { return mask_.lattice(); }

 private:
  std::shared_ptr<const SpectralKernel> kernel_;
  DomainMask mask_;
};

/// Exterior entries of the input are ignored; exterior entries of the result are exactly 0.
inline CoefficientField apply_masked(const MaskedOperator& op, const CoefficientField& v) {
  detail::require_compatible(op.lattice(), v.lattice());
  CoefficientField in = v;
  zero_exterior(op.mask(), in);
  CoefficientField w = apply_full(op.kernel(), in);
  zero_exterior(op.mask(), w);
  return w;
}

inline constexpr std::size_t dense_oracle_limit = 4096;

/// Direct O(N^{2d}) summation of the same sums; ground truth for small lattices.
inline CoefficientField apply_dense_oracle(const SpectralKernel& kernel, const DomainMask* mask,
                                           const CoefficientField& v) {
  const Lattice& lat = kernel.lattice();
  detail::require_compatible(lat, v.lattice());
  if (lat.size() > dense_oracle_limit) throw Error(Errc::size_guard, "dense oracle limited to N^d <= 4096");
  if (mask) detail::require_compatible(lat, mask->lattice());
  const int d = lat.dim();
  CoefficientField w(lat);
  for (std::size_t j = 0; j < lat.size(); ++j) {
    if (mask && !mask->inside(j)) continue;
    const Index jj = lat.unflatten(j);
    double sum = 0.0;
    for (std::size_t k = 0; k < lat.size(); ++k) {
      if (mask && !mask->inside(k)) continue;
      const Index kk = lat.unflatten(k);
      Index m{0, 0, 0};
      for (int i = 0; i < d; ++i) m[i] = jj[i] - kk[i];
      sum += v[k] * kernel.base(m);
    }
    w[j] = kernel.scale() * sum;
  }
  return w;
}

/// Periodic fractional Laplacian on the unit torus at resolution N: diagonal
/// in the N^d DFT basis with eigenvalues |2 pi kappa|^{2s}. The zero mode uses
/// the smallest nonzero eigenvalue (2 pi)^{2s} so the operator is invertible.
class PeriodicPreconditioner {
 public:
  PeriodicPreconditioner(const Lattice& lattice, FracOrder order)
      : lattice_(lattice), fft_(std::make_shared<RealFft>(lattice.dim(), lattice.n())) {
    const int d = lattice.dim(), n = lattice.n();
    const int last = n / 2 + 1;
    const double two_pi = 2.0 * std::numbers::pi;
    lambda_min_ = std::pow(two_pi, 2 * order.value());
    eigen_.resize(fft_->complex_size());
    for (std::size_t j = 0; j < eigen_.size(); ++j) {
      std::size_t r = j;
      double k2 = 0.0;
      for (int i = d - 1; i >= 0; --i) {
        const int extent = (i == d - 1) ? last : n;
        const int idx = static_cast<int>(r % static_cast<std::size_t>(extent));
        r /= static_cast<std::size_t>(extent);
        const int kappa = (2 * idx < n) ? idx : idx - n;
        k2 += static_cast<double>(kappa) * kappa;
      }
      eigen_[j] = k2 == 0.0 ? lambda_min_ : std::pow(two_pi * two_pi * k2, order.value());
    }
  }

  const Lattice& lattice() const noexcept { return lattice_; }
  double lambda_min() const noexcept { return lambda_min_; }
  /// Eigenvalues in FFTW half-spectrum order.
  const std::vector<double>& eigenvalues() const noexcept { return eigen_; }

  CoefficientField apply_inverse(const CoefficientField& r) const { return diagonal(r, true); }
  CoefficientField apply(const CoefficientField& r) const { return diagonal(r, false); }

 private:
  CoefficientField diagonal(const CoefficientField& r, bool invert) const {
    detail::require_compatible(lattice_, r.lattice());
    auto buf = fft_->real_buffer();
    auto spec = fft_->complex_buffer();
    std::copy(r.data().begin(), r.data().end(), buf.get());
    fft_->forward(buf.get(), spec.get());
    for (std::size_t j = 0; j < eigen_.size(); ++j) {
      const double f = invert ? 1.0 / eigen_[j] : eigen_[j];
      spec[j][0] *= f;
      spec[j][1] *= f;
    }
    fft_->backward(spec.get(), buf.get());
    const double norm = 1.0 / static_cast<double>(fft_->real_size());
    CoefficientField z(lattice_);
    for (std::size_t k = 0; k < z.size(); ++k) z[k] = norm * buf[k];
    return z;
  }

  Lattice lattice_;
  std::shared_ptr<const RealFft> fft_;
  std::vector<double> eigen_;
  double lambda_min_ = 1.0;
};

inline CoefficientField precond_apply(const Lattice& lattice, FracOrder order, const CoefficientField& r) {
  return PeriodicPreconditioner(lattice, order).apply_inverse(r);
}

}  // namespace fracsinc

#endif  // FRACSINC_OPERATOR_HPP
