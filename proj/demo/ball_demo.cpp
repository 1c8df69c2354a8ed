// Solve (-Delta)^s u = 1 on a disc and compare with the closed-form solution.
#include <cstdlib>
#include <iostream>

#include "fracsinc/fracsinc.hpp"

int main(int argc, char** argv) {
  using namespace fracsinc;
  const int n = argc > 1 ? std::atoi(argv[1]) : 64;
  const double s = argc > 2 ? std::atof(argv[2]) : 0.5;

  ProblemConfig cfg;
  cfg.d = 2;
  cfg.s = s;
  cfg.n_list = {n};
  cfg.shape.center = {0.5, 0.5, 0.0};
  cfg.shape.radius = 0.45;

  try {
    const ProblemSolution sol = solve_problem(cfg, n);
    const BallExactSolution exact{cfg.shape.center, cfg.shape.radius, 2, s};
    const auto err = error_report(*sol.kernel, sol.u, [&](const Point& x) { return exact_ball(exact, x); }, sol.mask);
    const Index centre{n / 2, n / 2, 0};
    std::cout << "N=" << n << " s=" << s << " interior points=" << sol.mask.count()
              << " CG iterations=" << sol.report.iterations << "\n"
              << "u_h(centre)=" << sol.u[sol.mask.lattice().flatten(centre)] << " exact=" << exact_ball(exact, {0.5, 0.5, 0.0}) << "\n"
              << "l2=" << err.l2 << " linf=" << err.linf << " energy=" << err.energy << "\n";
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
