#ifndef FRACSINC_LATTICE_HPP
#define FRACSINC_LATTICE_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fracsinc/error.hpp"

namespace fracsinc {

inline constexpr int max_dim = 3;

using Point = std::array<double, max_dim>;
using Index = std::array<int, max_dim>;

/// Uniform lattice x_k = k/N, k in {0,...,N-1}^d, over the unit box.
/// Flat storage is row-major: the last axis varies fastest.
class Lattice {
 public:
  Lattice(int d, int n) : d_(d), n_(n) {
    if (d < 1 || d > max_dim)
      throw Error(Errc::invalid_argument, "lattice dimension must be 1, 2 or 3");
    if (n < 4) throw Error(Errc::invalid_argument, "lattice needs N >= 4");
    size_ = 1;
    for (int i = 0; i < d; ++i) size_ *= static_cast<std::size_t>(n);
  }

  int dim() const noexcept { return d_; }
  int n() const noexcept { return n_; }
  double h() const noexcept { return 1.0 / n_; }
  std::size_t size() const noexcept { return size_; }

  Index unflatten(std::size_t flat) const noexcept {
    Index k{0, 0, 0};
    for (int i = d_ - 1; i >= 0; --i) {
      k[i] = static_cast<int>(flat % static_cast<std::size_t>(n_));
      flat /= static_cast<std::size_t>(n_);
    }
    return k;
  }

  std::size_t flatten(const Index& k) const noexcept {
    std::size_t flat = 0;
    for (int i = 0; i < d_; ++i) flat = flat * static_cast<std::size_t>(n_) + static_cast<std::size_t>(k[i]);
    return flat;
  }

  Point point(const Index& k) const noexcept {
    Point x{0.0, 0.0, 0.0};
    for (int i = 0; i < d_; ++i) x[i] = static_cast<double>(k[i]) / n_;
    return x;
  }

  Point point(std::size_t flat) const noexcept { return point(unflatten(flat)); }

  friend bool operator==(const Lattice& a, const Lattice& b) noexcept {
    return a.d_ == b.d_ && a.n_ == b.n_;
  }

 private:
  int d_;
  int n_;
  std::size_t size_;
};

inline double norm(const Point& x, int d) noexcept {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += x[i] * x[i];
  return std::sqrt(s);
}

inline std::string format_index(const Index& k, int d) {
  std::string s = "(";
  for (int i = 0; i < d; ++i) {
    if (i) s += ",";
    s += std::to_string(k[i]);
  }
  return s + ")";
}

}  // namespace fracsinc

#endif  // FRACSINC_LATTICE_HPP
