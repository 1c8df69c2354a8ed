// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.
// Exit status is nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "fracsinc/fracsinc.hpp"

using namespace fracsinc;

namespace {

constexpr double pi = std::numbers::pi;

// Criterion thresholds.
constexpr double rate1_lo = 0.40, rate1_hi = 0.70, time1_limit = 30.0;
constexpr double rate2_lo = 0.35, rate2_hi = 0.75, time2_limit = 300.0;
constexpr double oracle_rel_tol = 1e-6, closed_form_tol = 1e-8;
constexpr double fft_dense_tol = 1e-10;
constexpr double galerkin_tol = 1e-8;
constexpr double poincare_growth = 2.0;
constexpr double mass_tol = 1e-8, spectrum_tol = 1e-3;
constexpr double dense_solve_tol = 1e-8;
constexpr double constant_rhs_tol = 1e-7, holder_growth = 2.0;

int failures = 0;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void report(int id, bool ok, const std::string& detail) {
  std::cout << (ok ? "PASS" : "FAIL") << " criterion " << id << ": " << detail << std::endl;
  if (!ok) ++failures;
}

void run(int id, const std::function<std::pair<bool, std::string>()>& body) {
  try {
    const auto [ok, detail] = body();
    report(id, ok, detail);
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

CoefficientField random_field(const Lattice& lat, std::mt19937& rng, const DomainMask* mask = nullptr) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  CoefficientField v(lat);
  for (std::size_t k = 0; k < lat.size(); ++k) v[k] = (!mask || mask->inside(k)) ? u(rng) : 0.0;
  return v;
}

ProblemConfig ball_config(int d, double s) {
  ProblemConfig c;
  c.d = d;
  c.s = s;
  c.shape.center = {0.5, 0.5, 0.5};
  c.shape.radius = 0.45;
  return c;
}

double energy_rate(const ConvergenceResult& r, double* log_corrected = nullptr) {
  for (const auto& f : r.fits)
    if (f.column == "energy" && f.fit) {
      if (log_corrected) *log_corrected = f.fit->log_corrected_rate;
      return f.fit->rate;
    }
  throw Error(Errc::invalid_sequence, "no energy fit");
}

// a(phi_k, phi_j) by quadrature of the symbol against the sinc Fourier transforms.
double galerkin_entry(int d, int n, double s, const Index& k, const Index& j) {
  const double lim = n * pi;
  const double diff[2] = {static_cast<double>(k[0] - j[0]) / n, d > 1 ? static_cast<double>(k[1] - j[1]) / n : 0.0};
  auto edges = [&](double freq) {
    const int panels = 2 * std::max(4, static_cast<int>(std::ceil(std::abs(freq) * lim / pi)) * 2);
    std::vector<double> e(panels + 1);
    for (int p = 0; p <= panels; ++p) e[p] = -lim + 2 * lim * p / panels;
    return e;
  };
  double value = 0.0;
  if (d == 1) {
    auto f = [&](double w) { return std::pow(std::abs(w), 2 * s) * std::cos(w * diff[0]); };
    value = quad::adaptive(f, edges(diff[0]), 1e-12 * std::pow(lim, 2 * s + 1), 0.0).value;
  } else {
    const auto inner_edges = edges(diff[1]);
    auto outer = [&](double w0) {
      auto f = [&](double w1) { return std::pow(w0 * w0 + w1 * w1, s) * std::cos(w0 * diff[0] + w1 * diff[1]); };
      return quad::adaptive(f, inner_edges, 1e-13 * std::pow(lim, 2 * s + 1), 0.0).value;
    };
    value = quad::adaptive(outer, edges(diff[0]), 1e-12 * std::pow(lim, 2 * s + 2), 0.0).value;
  }
  return value / (std::pow(2 * pi, d) * std::pow(static_cast<double>(n), 2 * d));
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(4);
  os << x;
  return os.str();
}

}  // namespace

int main() {
  std::cout << "fracsinc acceptance" << std::endl;

  run(1, [] {
    bool ok = true;
    std::string detail;
    for (double s : {0.25, 0.5, 0.75}) {
      auto c = ball_config(1, s);
      c.n_list = {32, 64, 128, 256};
      const auto t0 = std::chrono::steady_clock::now();
      const auto r = run_convergence(c);
      const double t = seconds_since(t0);
      double p = 0.0;
      const double rate = energy_rate(r, &p);
      const bool this_ok = rate >= rate1_lo && rate <= rate1_hi && t < time1_limit;
      ok = ok && this_ok;
      detail += "s=" + fmt(s) + " rate=" + fmt(rate) + " (log-corrected " + fmt(p) + ", " + fmt(t) + "s)" +
                (this_ok ? "" : " out of range") + "; ";
    }
    return std::pair{ok, detail + "want rate in [0.40, 0.70] and < 30 s per s"};
  });

  run(2, [] {
    auto c = ball_config(2, 0.5);
    c.n_list = {32, 64, 128};
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = run_convergence(c);
    const double t = seconds_since(t0);
    const double rate = energy_rate(r);
    const bool ok = rate >= rate2_lo && rate <= rate2_hi && t < time2_limit;
    return std::pair{ok, "rate=" + fmt(rate) + " time=" + fmt(t) + "s; want [0.35, 0.75] and < 300 s"};
  });

  run(3, [] {
    std::mt19937 rng(3);
    double worst = 0.0;
    const int n = 32;
    for (int d : {1, 2})
      for (double s : {0.25, 0.5, 0.75}) {
        const auto k = assemble_kernel(d, n, FracOrder(s));
        const double phi0 = k.base({0, 0, 0});
        std::uniform_int_distribution<int> pick(0, n - 1);
        for (int t = 0; t < 10; ++t) {
          Index m{0, 0, 0};
          for (int i = 0; i < d; ++i) m[i] = pick(rng);
          const double ref = kernel_entry_oracle(d, FracOrder(s), m, 1e-10);
          worst = std::max(worst, std::abs(k.base(m) - ref) / std::max(std::abs(ref), phi0));
        }
      }
    const auto k = assemble_kernel(1, 64, FracOrder(0.5));
    double closed = 0.0;
    for (int m = 0; m < 64; ++m) {
      const double exact = m == 0 ? pi / 2 : (m % 2 ? -2.0 / (pi * m * m) : 0.0);
      closed = std::max(closed, std::abs(k.base({m, 0, 0}) - exact));
    }
    const bool ok = worst <= oracle_rel_tol && closed <= closed_form_tol;
    return std::pair{ok, "oracle max rel err " + fmt(worst) + " (<= 1e-6), closed forms max err " + fmt(closed) +
                             " (<= 1e-8)"};
  });

  run(4, [] {
    std::mt19937 rng(4);
    double worst = 0.0;
    for (int d : {1, 2})
      for (int n : {4, 8, 16})
        for (double s : {0.25, 0.5, 0.75}) {
          const auto k = assemble_kernel(d, n, FracOrder(s));
          for (int t = 0; t < 20; ++t) {
            const auto v = random_field(k.lattice(), rng);
            const auto a = apply_full(k, v);
            const auto b = apply_dense_oracle(k, nullptr, v);
            double dev = 0.0;
            for (std::size_t j = 0; j < v.size(); ++j) dev = std::max(dev, std::abs(a[j] - b[j]));
            worst = std::max(worst, dev / max_abs(v));
          }
        }
    return std::pair{worst <= fft_dense_tol, "max deviation / input scale " + fmt(worst) + " (<= 1e-10)"};
  });

  run(5, [] {
    std::mt19937 rng(5);
    const int n = 8;
    double worst = 0.0;
    for (int d : {1, 2}) {
      const double s = 0.5;
      const auto k = assemble_kernel(d, n, FracOrder(s));
      std::uniform_int_distribution<int> pick(0, n - 1);
      for (int t = 0; t < 10; ++t) {
        Index a{0, 0, 0}, b{0, 0, 0}, m{0, 0, 0};
        for (int i = 0; i < d; ++i) {
          a[i] = pick(rng);
          b[i] = pick(rng);
          m[i] = a[i] - b[i];
        }
        const double matrix = k.scale() * k.base(m) / std::pow(static_cast<double>(n), d);
        worst = std::max(worst, std::abs(galerkin_entry(d, n, s, a, b) - matrix));
      }
    }
    return std::pair{worst <= galerkin_tol, "max |a(phi_k,phi_j) - N^-d N^2s Phi(k-j)| " + fmt(worst) + " (<= 1e-8)"};
  });

  run(6, [] {
    std::mt19937 rng(6);
    int violations = 0, trials = 0;
    for (int d : {1, 2})
      for (int n : {8, 16, 32})
        for (double s : {0.25, 0.5, 0.75}) {
          const auto k = assemble_kernel(d, n, FracOrder(s));
          const double c = std::pow(std::sqrt(static_cast<double>(d)) * n * pi, s);
          for (int t = 0; t < 100; ++t, ++trials) {
            const auto v = random_field(k.lattice(), rng);
            if (energy_norm(k, v) > c * discrete_l2(v)) ++violations;
          }
        }
    return std::pair{violations == 0, std::to_string(violations) + " violations in " + std::to_string(trials) + " fields"};
  });

  run(7, [] {
    std::mt19937 rng(7);
    double at16 = 0.0, worst_growth = 0.0;
    std::string detail;
    for (int n : {16, 32, 64, 128}) {
      const auto k = assemble_kernel(1, n, FracOrder(0.5));
      const auto mask = build_mask(DomainShape::ball(1, {0.5, 0, 0}, 0.45), k.lattice());
      double worst = 0.0;
      for (int t = 0; t < 200; ++t) {
        const auto v = random_field(k.lattice(), rng, &mask);
        worst = std::max(worst, discrete_l2(v) / energy_norm(k, v));
      }
      if (n == 16) at16 = worst;
      worst_growth = std::max(worst_growth, worst / at16);
      detail += "N=" + std::to_string(n) + ":" + fmt(worst) + " ";
    }
    return std::pair{worst_growth <= poincare_growth, detail + "growth " + fmt(worst_growth) + " (<= 2)"};
  });

  run(8, [] {
    bool ok = true;
    double mass_err = 0.0, spec_worst = 0.0, min_value = 0.0, support_excess = 0.0;
    for (int d : {1, 2, 3}) {
      const double eps = d == 3 ? 0.25 : 0.125;
      const Mollifier m(d, {eps, 8});
      double mass = 0.0;
      for (std::size_t j = 0; j < m.node_count(); ++j) {
        const double v = m.value(j);
        mass += v * m.weight();
        min_value = std::min(min_value, v);
        if (v != 0.0) {
          const Point z = m.offset(j);
          const double r = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2]);
          support_excess = std::max(support_excess, r - m.support_radius());
        }
      }
      mass_err = std::max(mass_err, std::abs(mass - 1.0));
      const double zero = m.spectrum({0, 0, 0});
      const int kmax = d == 3 ? 2 : 3;
      Index k{0, 0, 0};
      for (k[0] = -kmax; k[0] <= kmax; ++k[0])
        for (k[1] = d > 1 ? -kmax : 0; k[1] <= (d > 1 ? kmax : 0); ++k[1])
          for (k[2] = d > 2 ? -kmax : 0; k[2] <= (d > 2 ? kmax : 0); ++k[2]) {
            if (k[0] == 0 && k[1] == 0 && k[2] == 0) continue;
            const Point w{2 * pi * k[0] / eps, 2 * pi * k[1] / eps, 2 * pi * k[2] / eps};
            spec_worst = std::max(spec_worst, std::abs(m.spectrum(w)) / zero);
          }
    }
    ok = mass_err <= mass_tol && spec_worst <= spectrum_tol && min_value >= 0.0 && support_excess <= 0.0;
    return std::pair{ok, "mass err " + fmt(mass_err) + ", min value " + fmt(min_value) + ", support excess " +
                             fmt(support_excess) + ", max |spectrum(2 pi k/eps)|/spectrum(0) " + fmt(spec_worst)};
  });

  run(9, [] {
    double dense_worst = 0.0;
    std::mt19937 rng(9);
    for (int d : {1, 2})
      for (double s : {0.25, 0.5, 0.75}) {
        auto k = std::make_shared<const SpectralKernel>(assemble_kernel(d, 16, FracOrder(s)));
        const MaskedOperator op(k, build_mask(DomainShape::ball(d, {0.5, 0.5, 0.5}, 0.45), k->lattice()));
        const auto f = random_field(k->lattice(), rng, &op.mask());
        const auto cg = solve(op, f).first;
        const auto dense = solve_dense_oracle(op, f);
        double num = 0.0, den = 0.0;
        for (std::size_t j : op.mask().indices()) {
          num = std::max(num, std::abs(cg[j] - dense[j]));
          den = std::max(den, std::abs(dense[j]));
        }
        dense_worst = std::max(dense_worst, num / den);
      }

    auto k = std::make_shared<const SpectralKernel>(assemble_kernel(2, 64, FracOrder(0.5)));
    const MaskedOperator op(k, build_mask(DomainShape::ball(2, {0.5, 0.5, 0}, 0.45), k->lattice()));
    CoefficientField f(k->lattice());
    for (std::size_t j : op.mask().indices()) f[j] = 1.0;
    bool exterior_zero = true;
    SolveConfig pre, plain;
    pre.max_iter = plain.max_iter = 5000;
    plain.precondition = false;
    auto watch = [&](int, const CoefficientField& x) {
      for (std::size_t j = 0; j < x.size(); ++j)
        if (!op.mask().inside(j) && x[j] != 0.0) exterior_zero = false;
    };
    pre.observer = plain.observer = watch;
    const int with = solve(op, f, pre).second.iterations;
    const int without = solve(op, f, plain).second.iterations;
    const bool ok = dense_worst <= dense_solve_tol && with <= without && exterior_zero;
    return std::pair{ok, "CG vs dense " + fmt(dense_worst) + " (<= 1e-8), iterations preconditioned " +
                             std::to_string(with) + " vs plain " + std::to_string(without) + ", exterior " +
                             (exterior_zero ? "exactly zero" : "NONZERO")};
  });

  run(10, [] {
    double const_worst = 0.0, cmax = 0.0;
    std::string detail;
    for (int d : {1, 2}) {
      auto direct = ball_config(d, 0.5);
      auto moll = direct;
      moll.rhs_mode = RhsMode::mollified;
      for (int n : {32, 64, 128}) {
        const auto a = solve_problem(direct, n);
        const auto b = solve_problem(moll, n);
        for (std::size_t j : a.mask.indices()) const_worst = std::max(const_worst, std::abs(a.u[j] - b.u[j]));
      }
      direct.rhs_f = moll.rhs_f = "holder-x1";
      double first = 0.0;
      for (int n : {32, 64, 128}) {
        const auto a = solve_problem(direct, n);
        const auto b = solve_problem(moll, n);
        CoefficientField diff(a.mask.lattice());
        for (std::size_t j = 0; j < diff.size(); ++j) diff[j] = a.u[j] - b.u[j];
        const double c = energy_norm(*a.kernel, diff) / std::sqrt(1.0 / n);
        if (n == 32) first = c;
        cmax = std::max(cmax, c / first);
        detail += "d=" + std::to_string(d) + " N=" + std::to_string(n) + " C=" + fmt(c) + " ";
      }
    }
    const bool ok = const_worst <= constant_rhs_tol && cmax <= holder_growth;
    return std::pair{ok, "f=1 max diff " + fmt(const_worst) + " (<= 1e-7); " + detail + "max C/C(32) " + fmt(cmax) +
                             " (<= 2)"};
  });

  std::cout << (failures == 0 ? "ALL PASS" : std::to_string(failures) + " criteria FAILED") << std::endl;
  return failures == 0 ? 0 : 1;
}
