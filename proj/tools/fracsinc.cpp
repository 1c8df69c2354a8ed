// fracsinc command-line front end.
//
//   fracsinc solve --config cfg.json --out solution.csv
//   fracsinc kernel --d 1 --n 64 --s 0.5 --out k.fsk
//   fracsinc validate-kernel --file k.fsk --samples 10 --tol 1e-6
//   fracsinc converge --config cfg.json [--out rates.csv]
//   fracsinc mollifier-dump --d 2 --epsilon 0.05 [--q 8] [--out eta.csv]
//
// Exit status: 0 success, 1 usage or configuration error, 2 numerical failure.

#include <CLI11.hpp>

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

#include "fracsinc/fracsinc.hpp"

using namespace fracsinc;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::io, "cannot open output file: " + path);
  out << text;
  if (!out) throw Error(Errc::io, "failed writing output file: " + path);
}

int run_solve(const std::string& config_path, const std::string& out_path) {
  const ProblemConfig cfg = load_config(config_path);
  const int n = cfg.n.value_or(cfg.n_list.back());
  const ProblemSolution sol = solve_problem(cfg, n);
  const int d = cfg.d;

  std::ostringstream csv;
  csv << std::setprecision(17);
  for (int i = 0; i < d; ++i) csv << 'k' << i << ',';
  for (int i = 0; i < d; ++i) csv << 'x' << i << ',';
  csv << "u\n";
  const Lattice& lat = sol.mask.lattice();
  for (std::size_t k : sol.mask.indices()) {
    const Index kk = lat.unflatten(k);
    const Point x = lat.point(kk);
    for (int i = 0; i < d; ++i) csv << kk[i] << ',';
    for (int i = 0; i < d; ++i) csv << x[i] << ',';
    csv << sol.u[k] << '\n';
  }
  write_text(out_path, csv.str());
  std::cout << "solved N=" << n << " points=" << sol.mask.count() << " iterations=" << sol.report.iterations
            << " relative_residual=" << sol.report.final_relative_residual << " time=" << sol.report.wall_time
            << "s\n";
  return 0;
}

int run_kernel(int d, int n, double s, int oversample, const std::string& out_path) {
  AssemblyOptions opt;
  opt.oversample = oversample;
  const SpectralKernel k = assemble_kernel(d, n, FracOrder(s), opt);
  kernel_save(k, out_path);
  std::cout << "wrote " << out_path << " (d=" << d << " N=" << n << " s=" << s << " oversample=" << oversample << ")\n";
  if (!k.metadata().warning.empty()) std::cerr << "warning: " << k.metadata().warning << "\n";
  return 0;
}

int run_validate(const std::string& path, int samples, double tol, unsigned seed) {
  if (samples < 1) throw Error(Errc::invalid_argument, "--samples must be >= 1");
  const SpectralKernel k = kernel_load(path);
  const int d = k.dim(), n = k.n();
  const double phi0 = k.base({0, 0, 0});
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> pick(0, n - 1);
  const double oracle_tol = std::clamp(tol * 1e-2, 1e-12, 1e-4);
  double worst = 0.0;
  for (int t = 0; t < samples; ++t) {
    Index m{0, 0, 0};
    for (int i = 0; i < d; ++i) m[i] = pick(rng);
    const double ref = kernel_entry_oracle(d, FracOrder(k.s()), m, oracle_tol);
    const double err = std::abs(k.base(m) - ref) / std::max(std::abs(ref), phi0);
    worst = std::max(worst, err);
    std::cout << "m=" << format_index(m, d) << " assembled=" << std::setprecision(12) << k.base(m) << " oracle=" << ref
              << " rel_err=" << std::setprecision(3) << err << (err <= tol ? "" : "  FAIL") << "\n";
  }
  const bool ok = worst <= tol;
  std::cout << (ok ? "PASS" : "FAIL") << " max rel_err " << worst << " (tol " << tol << ")\n";
  return ok ? 0 : 2;
}

int run_converge(const std::string& config_path, const std::string& out_path) {
  const ProblemConfig cfg = load_config(config_path);
  const ConvergenceResult r = run_convergence(cfg);
  const std::string csv_path = !out_path.empty() ? out_path : cfg.csv_path;
  if (!csv_path.empty())
    write_text(csv_path, r.csv);
  else
    std::cout << r.csv;
  if (!cfg.summary_path.empty()) write_text(cfg.summary_path, r.summary);
  std::cout << r.summary;
  return 0;
}

int run_mollifier_dump(int d, double epsilon, int q, const std::string& out_path) {
  const Mollifier m(d, {epsilon, q});
  std::ostringstream csv;
  csv << std::setprecision(17);
  for (int i = 0; i < d; ++i) csv << 'z' << i << ',';
  csv << "eta\n";
  for (std::size_t j = 0; j < m.node_count(); ++j) {
    if (m.value(j) == 0.0) continue;
    const Point z = m.offset(j);
    for (int i = 0; i < d; ++i) csv << z[i] << ',';
    csv << m.value(j) << '\n';
  }
  if (out_path.empty())
    std::cout << csv.str();
  else
    write_text(out_path, csv.str());
  std::cerr << "mollifier d=" << d << " epsilon=" << epsilon << " q=" << q << " nonzero nodes=" << m.taps().size()
            << " weight=" << m.weight() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Sinc-collocation solver for the fractional Laplacian on bounded domains"};
  app.require_subcommand(1);

  std::string config, out, file;
  int d = 1, n = 0, oversample = 16, samples = 10, q = 8;
  double s = 0.5, tol = 1e-6, epsilon = 0.0;
  unsigned seed = 1;

  auto* solve_cmd = app.add_subcommand("solve", "solve one problem and write the masked solution as CSV");
  solve_cmd->add_option("--config", config, "JSON problem config")->required();
  solve_cmd->add_option("--out", out, "solution CSV path")->required();

  auto* kernel_cmd = app.add_subcommand("kernel", "assemble a kernel and write it to a cache file");
  kernel_cmd->add_option("--d", d, "dimension")->required()->check(CLI::Range(1, 3));
  kernel_cmd->add_option("--n", n, "points per axis")->required()->check(CLI::Range(4, 1 << 20));
  kernel_cmd->add_option("--s", s, "fractional order in (0,1)")->required();
  kernel_cmd->add_option("--oversample", oversample, "quadrature nodes per period (power of two >= 4)");
  kernel_cmd->add_option("--out", out, "output .fsk path")->required();

  auto* validate_cmd = app.add_subcommand("validate-kernel", "compare cached entries against the quadrature oracle");
  validate_cmd->add_option("--file", file, "kernel file")->required();
  validate_cmd->add_option("--samples", samples, "number of random entries");
  validate_cmd->add_option("--tol", tol, "relative tolerance");
  validate_cmd->add_option("--seed", seed, "sampling seed");

  auto* converge_cmd = app.add_subcommand("converge", "run a convergence study and fit rates");
  converge_cmd->add_option("--config", config, "JSON problem config")->required();
  converge_cmd->add_option("--out", out, "CSV path (overrides output.csv)");

  auto* moll_cmd = app.add_subcommand("mollifier-dump", "tabulate the mollifier");
  moll_cmd->add_option("--d", d, "dimension")->check(CLI::Range(1, 3));
  moll_cmd->add_option("--epsilon", epsilon, "radius")->required();
  moll_cmd->add_option("--q", q, "nodes per epsilon (even, >= 4)");
  moll_cmd->add_option("--out", out, "CSV path (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (*solve_cmd) return run_solve(config, out);
    if (*kernel_cmd) return run_kernel(d, n, s, oversample, out);
    if (*validate_cmd) return run_validate(file, samples, tol, seed);
    if (*converge_cmd) return run_converge(config, out);
    if (*moll_cmd) return run_mollifier_dump(d, epsilon, q, out);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return is_numerical(e.code()) ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}
