#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "fracsinc/quadrature.hpp"

using namespace fracsinc;

TEST(GaussLegendre, ExactForPolynomials) {
  for (int n : {1, 2, 5, 12, 16}) {
    const auto r = quad::gauss_legendre(n);
    for (int p = 0; p <= 2 * n - 1; ++p) {
      double sum = 0.0;
      for (int i = 0; i < n; ++i) sum += r.weights[i] * std::pow(r.nodes[i], p);
      const double exact = (p % 2 == 0) ? 2.0 / (p + 1) : 0.0;
      EXPECT_NEAR(sum, exact, 1e-14) << "n=" << n << " p=" << p;
    }
  }
}

TEST(GaussLegendre, NodesAscendingAndSymmetric) {
  const auto r = quad::gauss_legendre(9);
  for (int i = 1; i < 9; ++i) EXPECT_LT(r.nodes[i - 1], r.nodes[i]);
  for (int i = 0; i < 9; ++i) {
    EXPECT_NEAR(r.nodes[i], -r.nodes[8 - i], 1e-15);
    EXPECT_NEAR(r.weights[i], r.weights[8 - i], 1e-15);
  }
}

TEST(Composite, OscillatoryIntegrand) {
  std::vector<double> edges;
  for (int p = 0; p <= 10; ++p) edges.push_back(std::numbers::pi * p / 10);
  const auto r = quad::composite(edges, quad::gauss_legendre(16));
  double sum = 0.0;
  for (std::size_t i = 0; i < r.nodes.size(); ++i) sum += r.weights[i] * r.nodes[i] * std::cos(7 * r.nodes[i]);
  EXPECT_NEAR(sum, -2.0 / 49.0, 1e-14);  // ((-1)^7 - 1) / 7^2
}

TEST(Adaptive, EndpointSingularity) {
  const auto e = quad::adaptive([](double x) { return std::sqrt(x); }, {0.0, 1.0}, 1e-13, 0.0);
  EXPECT_NEAR(e.value, 2.0 / 3.0, 1e-12);
  EXPECT_LE(e.error, 1e-13);
}

TEST(Adaptive, KinkAndOscillation) {
  auto f = [](double w) { return std::pow(w, 0.5) * std::cos(9 * w); };
  std::vector<double> edges;
  for (int p = 0; p <= 18; ++p) edges.push_back(std::numbers::pi * p / 18);
  const auto coarse = quad::adaptive(f, edges, 1e-8, 0.0);
  const auto fine = quad::adaptive(f, edges, 1e-13, 0.0);
  EXPECT_NEAR(coarse.value, fine.value, 1e-8);
}

TEST(Adaptive, BudgetExhaustion) {
  auto jump = [](double x) { return x < 1.0 / 3.0 ? 0.0 : 1.0; };
  try {
    quad::adaptive(jump, {0.0, 1.0}, 1e-15, 0.0, 8);
    FAIL() << "expected failure";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), Errc::oracle_failed);
  }
}
