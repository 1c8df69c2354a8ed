#ifndef FRACSINC_NORMS_HPP
#define FRACSINC_NORMS_HPP

#include <array>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <vector>

#include "fracsinc/domain.hpp"
#include "fracsinc/error.hpp"
#include "fracsinc/kernel.hpp"
#include "fracsinc/operator.hpp"

namespace fracsinc {

/// ||v_h||_{L^2(R^d)} = N^{-d/2} |v|, exact by orthogonality of the sinc basis.
inline double discrete_l2(const CoefficientField& v) {
  return std::sqrt(dot(v, v) / static_cast<double>(v.lattice().size()));
}

/// |v_h|_{H^s} = sqrt(N^{-d} v . Phi^N v).
inline double energy_norm(const SpectralKernel& kernel, const CoefficientField& v) {
  const CoefficientField w = apply_full(kernel, v);
  const double a = dot(v, w) / static_cast<double>(v.lattice().size());
  if (a < -1e-12) throw Error(Errc::not_psd, "kernel not PSD");
  return a > 0.0 ? std::sqrt(a) : 0.0;
}

struct ErrorReport {
  int n = 0;
  double h = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
  /// Energy norm of the sinc interpolant of the grid difference; a proxy for the H^s error.
  double energy = 0.0;
  double decay_ratio = 0.0;
};

namespace detail {

/// Masked points with at least one axis neighbour outside the mask.
inline std::vector<std::size_t> strip_adjacent(const DomainMask& mask) {
  const Lattice& lat = mask.lattice();
  std::vector<std::size_t> out;
  for (std::size_t k : mask.indices()) {
    const Index kk = lat.unflatten(k);
    bool edge = false;
    for (int i = 0; i < lat.dim() && !edge; ++i) {
      for (int step : {-1, 1}) {
        Index nb = kk;
        nb[i] += step;
        if (nb[i] < 0 || nb[i] >= lat.n() || !mask.inside(nb)) {
          edge = true;
          break;
        }
      }
    }
    if (edge) out.push_back(k);
  }
  return out;
}

}  // namespace detail

inline ErrorReport error_report(const SpectralKernel& kernel, const CoefficientField& u_h,
                                const std::function<double(const Point&)>& u_exact, const DomainMask& mask) {
  const Lattice& lat = u_h.lattice();
  detail::require_compatible(kernel.lattice(), lat);
  CoefficientField e(lat);
  double linf = 0.0;
  for (std::size_t k = 0; k < lat.size(); ++k) {
    e[k] = u_exact(lat.point(k)) - u_h[k];
    linf = std::max(linf, std::abs(e[k]));
  }
  ErrorReport r;
  r.n = lat.n();
  r.h = lat.h();
  r.l2 = discrete_l2(e);
  r.linf = linf;
  r.energy = energy_norm(kernel, e);
  const double hs = std::pow(lat.h(), kernel.s());
  for (std::size_t k : detail::strip_adjacent(mask)) r.decay_ratio = std::max(r.decay_ratio, std::abs(u_h[k]) / hs);
  return r;
}

inline constexpr const char* error_csv_header = "N,h,l2,linf,energy,decay_ratio";

inline void write_csv_row(std::ostream& os, const ErrorReport& r) {
  std::ostringstream line;
  line << std::setprecision(17) << r.n << ',' << r.h << ',' << r.l2 << ',' << r.linf << ',' << r.energy << ','
       << r.decay_ratio;
  os << line.str() << '\n';
}

struct RatePoint {
  double h;
  double error;
};

struct RateFit {
  double rate = 0.0;
  double constant = 0.0;
  /// RMS residual of the log-log fit.
  double residual = 0.0;
  /// Exponent p of the model C |log h| h^p.
  double log_corrected_rate = 0.0;
};

/// Least squares of log e = log C + rate log h, plus the same fit for e / |log h|.
inline RateFit fit_rate(const std::vector<RatePoint>& points) {
  if (points.size() < 3) throw Error(Errc::invalid_sequence, "invalid error sequence: need at least 3 points");
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!(points[i].error > 0.0) || !std::isfinite(points[i].error))
      throw Error(Errc::invalid_sequence, "invalid error sequence: errors must be positive");
    if (!(points[i].h > 0.0 && points[i].h < 1.0))
      throw Error(Errc::invalid_sequence, "invalid error sequence: h must lie in (0, 1)");
    if (i > 0 && !(points[i].h < points[i - 1].h))
      throw Error(Errc::invalid_sequence, "invalid error sequence: h must be strictly decreasing");
  }
  auto ls = [&](auto transform) {
    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& p : points) {
      const double x = std::log(p.h), y = transform(p);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icpt = (sy - slope * sx) / n;
    double rss = 0.0;
    for (const auto& p : points) {
      const double r = transform(p) - (icpt + slope * std::log(p.h));
      rss += r * r;
    }
    return std::array<double, 3>{slope, icpt, std::sqrt(rss / n)};
  };
  const auto plain = ls([](const RatePoint& p) { return std::log(p.error); });
  const auto corrected = ls([](const RatePoint& p) { return std::log(p.error / std::abs(std::log(p.h))); });
  return {plain[0], std::exp(plain[1]), plain[2], corrected[0]};
}

}  // namespace fracsinc

#endif  // FRACSINC_NORMS_HPP
