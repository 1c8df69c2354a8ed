#ifndef FRACSINC_QUADRATURE_HPP
#define FRACSINC_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <queue>
#include <sstream>
#include <vector>

#include "fracsinc/error.hpp"

namespace fracsinc::quad {

struct Rule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points on [-1, 1] (Newton on P_n).
inline Rule gauss_legendre(int n) {
  Rule r;
  r.nodes.resize(n);
  r.weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // recompute derivative at the converged node
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.nodes[i] = -x;
    r.nodes[n - 1 - i] = x;
    r.weights[i] = w;
    r.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.nodes[n / 2] = 0.0;
  return r;
}

/// Composite rule over consecutive panels [edges[i], edges[i+1]].
inline Rule composite(const std::vector<double>& edges, const Rule& base) {
  Rule out;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const double a = edges[p], b = edges[p + 1];
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    for (std::size_t i = 0; i < base.nodes.size(); ++i) {
      out.nodes.push_back(mid + half * base.nodes[i]);
      out.weights.push_back(half * base.weights[i]);
    }
  }
  return out;
}

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  double abs_value = 0.0;  // integral of |f|
};

namespace detail {

inline constexpr std::array<double, 8> gk15_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> gk15_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> g7_w = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a, b;
  Estimate est;
  bool operator<(const Panel& o) const { return est.error < o.est.error; }
};

template <class F>
Estimate gk15(F& f, double a, double b) {
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  const double fc = f(mid);
  double kron = fc * gk15_wk[7];
  double gauss = fc * g7_w[3];
  double absk = std::abs(fc) * gk15_wk[7];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * gk15_x[j];
    const double f1 = f(mid - dx), f2 = f(mid + dx);
    kron += gk15_wk[j] * (f1 + f2);
    absk += gk15_wk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += g7_w[j / 2] * (f1 + f2);
  }
  return {kron * half, std::abs((kron - gauss) * half), absk * std::abs(half)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod (7/15) over the given initial panels.
/// Bisects the worst panel until the summed error estimate drops below
/// max(abs_tol, rel_tol * integral of |f|). Throws oracle_failed when the
/// panel budget is exhausted.
template <class F>
Estimate adaptive(F&& f, const std::vector<double>& edges, double abs_tol, double rel_tol,
                  int max_panels = 20000) {
  std::priority_queue<detail::Panel> heap;
  Estimate total;
  for (std::size_t p = 0; p + 1 < edges.size(); ++p) {
    const Estimate e = detail::gk15(f, edges[p], edges[p + 1]);
    total.value += e.value;
    total.error += e.error;
    total.abs_value += e.abs_value;
    heap.push({edges[p], edges[p + 1], e});
  }
  int panels = static_cast<int>(heap.size());
  auto target = [&] { return std::max(abs_tol, rel_tol * total.abs_value); };
  while (total.error > target()) {
    if (panels >= max_panels) {
      std::ostringstream msg;
      msg << "oracle quadrature failed: error estimate " << total.error << " exceeds target " << target();
      throw Error(Errc::oracle_failed, msg.str());
    }
    const detail::Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    const Estimate l = detail::gk15(f, worst.a, mid);
    const Estimate r = detail::gk15(f, mid, worst.b);
    total.value += l.value + r.value - worst.est.value;
    total.error += l.error + r.error - worst.est.error;
    total.abs_value += l.abs_value + r.abs_value - worst.est.abs_value;
    heap.push({worst.a, mid, l});
    heap.push({mid, worst.b, r});
    ++panels;
  }
  // re-sum to shed accumulated cancellation from the running updates
  Estimate exact;
  while (!heap.empty()) {
    exact.value += heap.top().est.value;
    exact.error += heap.top().est.error;
    exact.abs_value += heap.top().est.abs_value;
    heap.pop();
  }
  return exact;
}

}  // namespace fracsinc::quad

#endif  // FRACSINC_QUADRATURE_HPP
