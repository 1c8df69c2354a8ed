#ifndef FRACSINC_RHS_HPP
#define FRACSINC_RHS_HPP

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>
#include <sstream>
#include <vector>

#include "fracsinc/domain.hpp"
#include "fracsinc/error.hpp"
#include "fracsinc/operator.hpp"

namespace fracsinc {

using ScalarFunction = std::function<double(const Point&)>;

/// sin(pi x), exact at integers and half-integers.
inline double sin_pi(double x) {
  double r = std::remainder(x, 2.0);  // [-1, 1]
  if (r == 0.0 || r == 1.0 || r == -1.0) return 0.0;
  if (r == 0.5) return 1.0;
  if (r == -0.5) return -1.0;
  if (r > 0.5) r = 1.0 - r;
  if (r < -0.5) r = -1.0 - r;
  return std::sin(std::numbers::pi * r);
}

inline double sinc(double x) { return x == 0.0 ? 1.0 : sin_pi(x) / (std::numbers::pi * x); }

/// f_k = f(x_k) on the mask, 0 elsewhere.
inline CoefficientField sample_direct(const ScalarFunction& f, const DomainMask& mask) {
  const Lattice& lat = mask.lattice();
  CoefficientField out(lat);
  for (std::size_t k : mask.indices()) {
    const double v = f(lat.point(k));
    if (!std::isfinite(v))
      throw Error(Errc::non_finite, "right-hand side is not finite at index " + format_index(lat.unflatten(k), lat.dim()));
    out[k] = v;
  }
  return out;
}

struct MollifierSpec {
  double epsilon = 0.0;
  /// Nodes per epsilon along each axis; even so that the cube edges align with the grid.
  int q = 8;
};

/// eta_eps(x) = eps^{-d} eta(x / eps) with eta = c * (psi * chi_{(-1/2,1/2)^d}),
/// psi the standard bump of radius sqrt(d)/4. The convolution is evaluated by
/// the midpoint rule on the tabulation grid itself, so the discrete spectrum
/// carries the cube factor prod_i sin(w_i/2) exactly. Tabulated at
/// x_j = eps (j + 1/2)/q and normalized so that sum_j eta_eps(x_j) (eps/q)^d = 1.
class Mollifier {
 public:
  Mollifier(int d, MollifierSpec spec) : d_(d), spec_(spec) {
    if (d < 1 || d > max_dim) throw Error(Errc::invalid_argument, "mollifier dimension must be 1, 2 or 3");
    if (!(spec.epsilon > 0.0 && spec.epsilon <= 0.25))
      throw Error(Errc::invalid_argument, "mollifier epsilon must be in (0, 0.25]");
    if (spec.q < 4 || spec.q % 2 != 0) throw Error(Errc::invalid_argument, "mollifier refinement q must be even and >= 4");
    bump_radius_ = std::sqrt(static_cast<double>(d)) / 4.0;
    const int q = spec.q;
    half_ = static_cast<int>(std::ceil((0.5 + bump_radius_) * q));
    const int width = 2 * half_;
    const Lattice grid(d, std::max(width, 4));
    nodes_per_axis_ = width;

    // psi on integer offsets t * delta, |t| <= tmax
    const int tmax = static_cast<int>(std::ceil(bump_radius_ * q));
    const int tw = 2 * tmax + 1;
    std::vector<double> psi_table(static_cast<std::size_t>(std::pow(tw, d)), 0.0);
    for (std::size_t j = 0; j < psi_table.size(); ++j) {
      Point z{};
      std::size_t r = j;
      for (int i = d - 1; i >= 0; --i) {
        z[i] = (static_cast<int>(r % tw) - tmax) / static_cast<double>(q);
        r /= tw;
      }
      psi_table[j] = bump(z);
    }
    auto psi_at = [&](const Index& t) {
      std::size_t flat = 0;
      for (int i = 0; i < d; ++i) {
        if (std::abs(t[i]) > tmax) return 0.0;
        flat = flat * tw + static_cast<std::size_t>(t[i] + tmax);
      }
      return psi_table[flat];
    };

    std::size_t total = 1, cube = 1;
    for (int i = 0; i < d; ++i) {
      total *= static_cast<std::size_t>(width);
      cube *= static_cast<std::size_t>(q);
    }
    raw_.assign(total, 0.0);
    const double cell = std::pow(1.0 / q, d);
    for (std::size_t j = 0; j < total; ++j) {
      const Index jj = node_index(j);
      double sum = 0.0;
      for (std::size_t c = 0; c < cube; ++c) {
        Index t{0, 0, 0};
        std::size_t r = c;
        for (int i = d - 1; i >= 0; --i) {
          const int ci = static_cast<int>(r % static_cast<std::size_t>(q));
          r /= static_cast<std::size_t>(q);
          // z_j - y_c = (j - half - c + q/2) delta, an exact lattice offset
          t[i] = jj[i] - half_ - ci + q / 2;
        }
        sum += psi_at(t);
      }
      raw_[j] = sum * cell;
    }
    double mass = 0.0;
    for (double v : raw_) mass += v * cell;
    if (mass < 1e-14) throw Error(Errc::invalid_argument, "mollifier normalization integral vanishes");
    normalization_ = 1.0 / mass;
    (void)grid;

    const double eps_d = std::pow(spec.epsilon, d);
    values_.resize(total);
    for (std::size_t j = 0; j < total; ++j) values_[j] = normalization_ * raw_[j] / eps_d;
    for (std::size_t j = 0; j < total; ++j)
      if (values_[j] > 0.0) support_.push_back({offset(j), values_[j] * weight()});
  }

  int dim() const noexcept { return d_; }
  double epsilon() const noexcept { return spec_.epsilon; }
  int refinement() const noexcept { return spec_.q; }
  double spacing() const noexcept { return spec_.epsilon / spec_.q; }
  /// Quadrature weight (eps/q)^d of every tabulation node.
  double weight() const noexcept { return std::pow(spacing(), d_); }
  double support_radius() const noexcept { return std::sqrt(static_cast<double>(d_)) * spec_.epsilon; }
  int nodes_per_axis() const noexcept { return nodes_per_axis_; }
  std::size_t node_count() const noexcept { return values_.size(); }
  double normalization() const noexcept { return normalization_; }

  /// Position of tabulation node j (relative to the mollifier centre).
  Point offset(std::size_t j) const {
    const Index jj = node_index(j);
    Point x{0.0, 0.0, 0.0};
    for (int i = 0; i < d_; ++i) x[i] = spacing() * (jj[i] - half_ + 0.5);
    return x;
  }
  /// Tabulated eta_eps(offset(j)).
  double value(std::size_t j) const { return values_[j]; }
  const std::vector<double>& values() const noexcept { return values_; }

  struct Tap {
    Point offset;
    double weight;  // eta_eps(offset) * (eps/q)^d
  };
  /// Nonzero quadrature taps in tabulation order.
  const std::vector<Tap>& taps() const noexcept { return support_; }

  /// eta_eps at an arbitrary point through the same discrete convolution;
  /// agrees with the table at nodes and vanishes for |x| >= sqrt(d) eps.
  double operator()(const Point& x) const {
    const int q = spec_.q;
    Point z{};
    for (int i = 0; i < d_; ++i) z[i] = x[i] / spec_.epsilon;
    if (norm(z, d_) >= std::sqrt(static_cast<double>(d_))) return 0.0;
    std::size_t cube = 1;
    for (int i = 0; i < d_; ++i) cube *= static_cast<std::size_t>(q);
    double sum = 0.0;
    for (std::size_t c = 0; c < cube; ++c) {
      Point y{};
      std::size_t r = c;
      for (int i = d_ - 1; i >= 0; --i) {
        const int ci = static_cast<int>(r % static_cast<std::size_t>(q));
        r /= static_cast<std::size_t>(q);
        y[i] = z[i] - (-0.5 + (ci + 0.5) / q);
      }
      sum += bump(y);
    }
    return normalization_ * sum * std::pow(1.0 / q, d_) / std::pow(spec_.epsilon, d_);
  }

  /// (2 pi)^{-d} sum_j eta_eps(x_j) e^{-i w.x_j} (eps/q)^d; real since eta is even.
  double spectrum(const Point& w) const {
    double sum = 0.0;
    for (const auto& tap : support_) {
      double phase = 0.0;
      for (int i = 0; i < d_; ++i) phase += w[i] * tap.offset[i];
      sum += tap.weight * std::cos(phase);
    }
    return sum / std::pow(2.0 * std::numbers::pi, d_);
  }

 private:
  Index node_index(std::size_t j) const {
    Index jj{0, 0, 0};
    const auto w = static_cast<std::size_t>(2 * half_);
    for (int i = d_ - 1; i >= 0; --i) {
      jj[i] = static_cast<int>(j % w);
      j /= w;
    }
    return jj;
  }

  double bump(const Point& z) const {
    const double t = norm(z, d_) / bump_radius_;
    if (t >= 1.0) return 0.0;
    return std::exp(-1.0 / (1.0 - t * t));
  }

  int d_;
  MollifierSpec spec_;
  double bump_radius_ = 0.0;
  int half_ = 0;
  int nodes_per_axis_ = 0;
  double normalization_ = 1.0;
  std::vector<double> raw_;
  std::vector<double> values_;
  std::vector<Tap> support_;
};

inline Mollifier build_mollifier(const MollifierSpec& spec, int d) { return Mollifier(d, spec); }

/// Cube factor S(w) = prod_i sinc(w_i / (2 pi)) of the mollifier spectrum.
inline double cube_spectrum(const Point& w, int d) {
  double s = 1.0;
  for (int i = 0; i < d; ++i) s *= sinc(w[i] / (2.0 * std::numbers::pi));
  return s;
}

enum class RhsMode { direct, mollified };

struct RhsSpec {
  RhsMode mode = RhsMode::direct;
  ScalarFunction f;
  /// Extension f_rho on Omega_rho; nearest-point extension f(P_Omega y) when empty.
  ScalarFunction extension;
  std::optional<double> epsilon;  // default h
  std::optional<double> rho;      // default sqrt(d) h
  int q = 8;
};

/// f_k = sum_j eta_eps(x_k - y_j) f_rho(y_j) dy over the tabulated mollifier,
/// evaluated at every masked lattice point.
inline CoefficientField mollify_sample(const RhsSpec& spec, const DomainShape& shape, const DomainMask& mask,
                                       const Mollifier& mollifier) {
  if (spec.mode != RhsMode::mollified) throw Error(Errc::invalid_argument, "mollify_sample requires mollified mode");
  if (!spec.f && !spec.extension) throw Error(Errc::invalid_argument, "mollified sampling needs f or an extension");
  const Lattice& lat = mask.lattice();
  const int d = lat.dim();
  const double rho = spec.rho.value_or(std::sqrt(static_cast<double>(d)) * lat.h());
  if (rho < std::sqrt(static_cast<double>(d)) * lat.h() * (1.0 - 1e-12))
    throw Error(Errc::invalid_argument, "rho must be at least sqrt(d) h");
  const DomainShape enlarged = enlarge_shape(shape, rho);

  auto f_rho = [&](const Point& y) {
    if (!enlarged.contains(y)) throw Error(Errc::extension_insufficient, "extension insufficient; increase rho");
    if (spec.extension) return spec.extension(y);
    return spec.f(shape.project(y));
  };

  CoefficientField out(lat);
  for (std::size_t k : mask.indices()) {
    const Point x = lat.point(k);
    double sum = 0.0;
    for (const auto& tap : mollifier.taps()) {
      Point y = x;
      for (int i = 0; i < d; ++i) y[i] -= tap.offset[i];
      sum += tap.weight * f_rho(y);
    }
    if (!std::isfinite(sum))
      throw Error(Errc::non_finite, "mollified right-hand side is not finite at index " + format_index(lat.unflatten(k), d));
    out[k] = sum;
  }
  return out;
}

/// Identity on coefficients: the samples are the coefficients of Pi_N f.
inline CoefficientField sinc_interpolate(const CoefficientField& samples) { return samples; }

struct PointValue {
  double value = 0.0;
  /// O(1/W) estimate of the window truncation error; 0 when the window covers the lattice.
  double truncation_estimate = 0.0;
};

/// v_h(x) = sum_k v_k prod_i sinc(N x_i - k_i), truncated to |N x_i - k_i| <= window.
inline PointValue point_eval(const CoefficientField& v, const Point& x, int window = 64) {
  const Lattice& lat = v.lattice();
  const int d = lat.dim(), n = lat.n();
  Index lo{0, 0, 0}, hi{0, 0, 0};
  bool covers = true;
  for (int i = 0; i < d; ++i) {
    const double t = n * x[i];
    lo[i] = std::max(0, static_cast<int>(std::ceil(t - window)));
    hi[i] = std::min(n - 1, static_cast<int>(std::floor(t + window)));
    if (lo[i] > 0 || hi[i] < n - 1) covers = false;
  }
  std::vector<std::vector<double>> weights(d);
  for (int i = 0; i < d; ++i)
    for (int k = lo[i]; k <= hi[i]; ++k) weights[i].push_back(sinc(n * x[i] - k));

  double sum = 0.0;
  Index k = lo;
  while (true) {
    double w = 1.0;
    for (int i = 0; i < d; ++i) w *= weights[i][k[i] - lo[i]];
    if (w != 0.0) sum += w * v.at(k);
    int axis = d - 1;
    while (axis >= 0 && ++k[axis] > hi[axis]) {
      k[axis] = lo[axis];
      --axis;
    }
    if (axis < 0) break;
  }
  PointValue out{sum, 0.0};
  if (!covers) out.truncation_estimate = max_abs(v) * d * 2.0 / (std::numbers::pi * window);
  return out;
}

}  // namespace fracsinc

#endif  // FRACSINC_RHS_HPP
