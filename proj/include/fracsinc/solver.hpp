#ifndef FRACSINC_SOLVER_HPP
#define FRACSINC_SOLVER_HPP

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <functional>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "fracsinc/error.hpp"
#include "fracsinc/operator.hpp"

namespace fracsinc {

struct SolveConfig {
  double tol = 1e-10;
  /// Iteration cap; defaults to 10 N when unset.
  std::optional<int> max_iter;
  bool precondition = true;
  bool record_history = false;
  /// Called with (iteration, iterate) after every update; test hook.
  std::function<void(int, const CoefficientField&)> observer;
};

struct SolveReport {
  int iterations = 0;
  double final_relative_residual = 0.0;
  /// Relative residual ||S(f - Phi u)|| / ||f|| per iteration (index 0 = initial).
  std::vector<double> residual_history;
  /// Energy norm of the error ||u_k - u||_A per iteration, relative to
  /// ||u_0 - u||_A, recovered after convergence from the CG step lengths
  /// (||e_k||_A^2 = sum_{j >= k} alpha_j <r_j, z_j>). Monotone by construction of CG.
  std::vector<double> error_energy_history;
  /// sqrt(<r_k, z_k>) relative to its initial value, z_k the preconditioned residual.
  std::vector<double> preconditioned_residual_history;
  double wall_time = 0.0;
};

class SolveError : public Error {
 public:
  SolveError(const std::string& what, CoefficientField best, SolveReport report)
      : Error(Errc::not_converged, what), best_(std::move(best)), report_(std::move(report)) {}
  const CoefficientField& best_iterate() const noexcept { return best_; }
  const SolveReport& report() const noexcept { return report_; }

 private:
  CoefficientField best_;
  SolveReport report_;
};

/// Projected (preconditioned) conjugate gradients on the masked subspace.
/// Every iterate, residual and search direction has exactly zero exterior
/// entries. Stops on the unpreconditioned relative residual.
inline std::pair<CoefficientField, SolveReport> solve(const MaskedOperator& op, const CoefficientField& rhs,
                                                      const SolveConfig& cfg = {}) {
  if (!(cfg.tol > 0.0 && cfg.tol <= 1e-2)) throw Error(Errc::invalid_argument, "solver tolerance must be in (0, 1e-2]");
  const int max_iter = cfg.max_iter.value_or(10 * op.lattice().n());
  if (max_iter < 1) throw Error(Errc::invalid_argument, "max_iter must be >= 1");
  const auto start = std::chrono::steady_clock::now();
  const Lattice& lat = op.lattice();
  const DomainMask& mask = op.mask();

  std::optional<PeriodicPreconditioner> precond;
  if (cfg.precondition) precond.emplace(lat, FracOrder(op.kernel().s()));
  auto preconditioned = [&](const CoefficientField& r) {
    if (!precond) return r;
    CoefficientField z = precond->apply_inverse(r);
    zero_exterior(mask, z);
    return z;
  };

  SolveReport report;
  CoefficientField x(lat);
  CoefficientField r = rhs;
  zero_exterior(mask, r);
  const double fnorm = std::sqrt(dot(r, r));
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  if (fnorm == 0.0) {
    if (cfg.record_history) report.residual_history.push_back(0.0);
    report.wall_time = elapsed();
    return {x, report};
  }

  CoefficientField z = preconditioned(r);
  CoefficientField p = z;
  double rz = dot(r, z);
  const double rz0 = rz;
  std::vector<double> energy_terms;
  double rel = 1.0;
  if (cfg.record_history) {
    report.residual_history.push_back(rel);
    report.preconditioned_residual_history.push_back(1.0);
  }

  int it = 0;
  while (rel > cfg.tol && it < max_iter) {
    const CoefficientField q = apply_masked(op, p);
    const double pq = dot(p, q);
    if (!(pq > 0.0)) throw Error(Errc::not_spd, "matrix not SPD: nonpositive curvature in CG");
    const double alpha = rz / pq;
    for (std::size_t k : mask.indices()) {
      x[k] += alpha * p[k];
      r[k] -= alpha * q[k];
    }
    ++it;
    if (cfg.observer) cfg.observer(it, x);
    energy_terms.push_back(alpha * rz);
    rel = std::sqrt(dot(r, r)) / fnorm;
    z = preconditioned(r);
    const double rz_next = dot(r, z);
    if (cfg.record_history) {
      report.residual_history.push_back(rel);
      report.preconditioned_residual_history.push_back(std::sqrt(std::max(rz_next, 0.0) / rz0));
    }
    const double beta = rz_next / rz;
    rz = rz_next;
    for (std::size_t k : mask.indices()) p[k] = z[k] + beta * p[k];
  }

  report.iterations = it;
  report.final_relative_residual = rel;
  if (cfg.record_history) {
    // tail sums; the final (unknown) remainder is bounded by the last residual and dropped
    std::vector<double> tail(energy_terms.size() + 1, 0.0);
    for (std::size_t j = energy_terms.size(); j-- > 0;) tail[j] = tail[j + 1] + energy_terms[j];
    for (double t : tail) report.error_energy_history.push_back(tail[0] > 0.0 ? std::sqrt(t / tail[0]) : 0.0);
  }
  report.wall_time = elapsed();
  if (rel > cfg.tol) {
    std::ostringstream msg;
    msg << "solver did not converge in " << max_iter << " iterations (relative residual " << rel << ")";
    throw SolveError(msg.str(), x, report);
  }
  return {x, report};
}

inline constexpr std::size_t dense_solve_limit = 2048;

/// Masked system matrix N^{2s} Phi(k - j) over interior indices.
inline Eigen::MatrixXd assemble_masked_matrix(const MaskedOperator& op) {
  const auto& idx = op.mask().indices();
  if (idx.size() > dense_solve_limit) throw Error(Errc::size_guard, "dense oracle limited to mask.count <= 2048");
  const Lattice& lat = op.lattice();
  const int d = lat.dim();
  const auto n = static_cast<Eigen::Index>(idx.size());
  Eigen::MatrixXd a(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Index ki = lat.unflatten(idx[i]);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Index kj = lat.unflatten(idx[j]);
      Index m{0, 0, 0};
      for (int c = 0; c < d; ++c) m[c] = ki[c] - kj[c];
      a(i, j) = op.kernel().full(m);
    }
  }
  return a;
}

/// Ground truth by explicit assembly and Cholesky factorization.
inline CoefficientField solve_dense_oracle(const MaskedOperator& op, const CoefficientField& rhs) {
  const Eigen::MatrixXd a = assemble_masked_matrix(op);
  const auto& idx = op.mask().indices();
  Eigen::VectorXd b(static_cast<Eigen::Index>(idx.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) b[static_cast<Eigen::Index>(i)] = rhs[idx[i]];
  const Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) throw Error(Errc::not_spd, "matrix not SPD");
  const Eigen::VectorXd u = llt.solve(b);
  CoefficientField out(op.lattice());
  for (std::size_t i = 0; i < idx.size(); ++i) out[idx[i]] = u[static_cast<Eigen::Index>(i)];
  return out;
}

}  // namespace fracsinc

#endif  // FRACSINC_SOLVER_HPP
