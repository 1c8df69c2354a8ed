#ifndef FRACSINC_BENCH_HPP
#define FRACSINC_BENCH_HPP

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "fracsinc/domain.hpp"
#include "fracsinc/error.hpp"
#include "fracsinc/kernel.hpp"
#include "fracsinc/kernel_io.hpp"
#include "fracsinc/norms.hpp"
#include "fracsinc/operator.hpp"
#include "fracsinc/rhs.hpp"
#include "fracsinc/solver.hpp"

namespace fracsinc {

/// Solution of (-Delta)^s u = 1 on a ball, u = 0 outside:
/// u(x) = A (R^2 - |x - c|^2)^s with A = Gamma(d/2) / (2^{2s} Gamma(d/2 + s) Gamma(1 + s)).
struct BallExactSolution {
  Point center{};
  double radius = 0.0;
  int d = 1;
  double s = 0.5;

  double amplitude() const {
    return std::tgamma(d / 2.0) / (std::pow(2.0, 2.0 * s) * std::tgamma(d / 2.0 + s) * std::tgamma(1.0 + s));
  }
};

inline double exact_ball(const BallExactSolution& u, const Point& x) {
  double r2 = 0.0;
  for (int i = 0; i < u.d; ++i) r2 += (x[i] - u.center[i]) * (x[i] - u.center[i]);
  // rounding residue on the sphere itself is not part of the interior
  const double gap = u.radius * u.radius - r2;
  return gap > 1e-14 * u.radius * u.radius ? u.amplitude() * std::pow(gap, u.s) : 0.0;
}

enum class Reference { exact, self };

struct ShapeConfig {
  std::string kind = "ball";
  Point center{0.5, 0.5, 0.5};
  double radius = 0.45;
  Point lo{}, hi{1.0, 1.0, 1.0};
  std::vector<std::array<double, 2>> vertices;
};

struct ProblemConfig {
  int d = 1;
  double s = 0.5;
  std::vector<int> n_list;
  /// Resolution for single solves; the largest N_list entry when unset.
  std::optional<int> n;
  ShapeConfig shape;
  RhsMode rhs_mode = RhsMode::direct;
  std::string rhs_f = "one";
  std::optional<double> epsilon;
  std::optional<double> rho;
  int q = 8;
  double tol = 1e-10;
  std::optional<int> max_iter;
  bool precondition = true;
  std::optional<Reference> reference;
  std::string csv_path;
  std::string summary_path;
  std::string kernel_cache;
  int oversample = 16;
};

/// Built-in right-hand sides: one, linear-x1, holder-x1 = |x_1 - 1/2|^{1/2}.
inline ScalarFunction builtin_function(const std::string& name) {
  if (name == "one") return [](const Point&) { return 1.0; };
  if (name == "linear-x1") return [](const Point& x) { return x[0]; };
  if (name == "holder-x1") return [](const Point& x) { return std::sqrt(std::abs(x[0] - 0.5)); };
  throw Error(Errc::config, "unknown built-in function: " + name);
}

namespace detail {

inline Point read_point(const nlohmann::json& j, int d, const char* what) {
  if (!j.is_array() || static_cast<int>(j.size()) != d)
    throw Error(Errc::config, std::string("config: ") + what + " must be an array of length d");
  Point p{0.0, 0.0, 0.0};
  for (int i = 0; i < d; ++i) p[i] = j[i].get<double>();
  return p;
}

}  // namespace detail

inline ProblemConfig parse_config(const nlohmann::json& j) {
  ProblemConfig c;
  try {
    if (!j.is_object()) throw Error(Errc::config, "config must be a JSON object");
    c.d = j.at("d").get<int>();
    if (c.d < 1 || c.d > max_dim) throw Error(Errc::config, "config: d must be 1, 2 or 3");
    c.s = j.at("s").get<double>();
    FracOrder{c.s};
    c.n_list = j.at("N_list").get<std::vector<int>>();
    if (c.n_list.empty()) throw Error(Errc::config, "config: N_list must not be empty");
    for (std::size_t i = 0; i < c.n_list.size(); ++i) {
      if (c.n_list[i] < 4) throw Error(Errc::config, "config: N_list entries must be >= 4");
      if (i > 0 && c.n_list[i] <= c.n_list[i - 1]) throw Error(Errc::config, "config: N_list must be strictly increasing");
    }
    if (j.contains("N")) c.n = j["N"].get<int>();

    const auto& sh = j.at("shape");
    c.shape.kind = sh.at("kind").get<std::string>();
    if (c.shape.kind == "ball") {
      c.shape.center = detail::read_point(sh.at("center"), c.d, "shape.center");
      c.shape.radius = sh.at("radius").get<double>();
    } else if (c.shape.kind == "box") {
      c.shape.lo = detail::read_point(sh.at("lo"), c.d, "shape.lo");
      c.shape.hi = detail::read_point(sh.at("hi"), c.d, "shape.hi");
    } else if (c.shape.kind == "polygon") {
      if (c.d != 2) throw Error(Errc::config, "config: polygon shapes require d = 2");
      c.shape.vertices = sh.at("vertices").get<std::vector<std::array<double, 2>>>();
    } else {
      throw Error(Errc::config, "config: unknown shape kind " + c.shape.kind);
    }

    if (j.contains("rhs")) {
      const auto& r = j["rhs"];
      const std::string mode = r.value("mode", std::string("direct"));
      if (mode == "direct")
        c.rhs_mode = RhsMode::direct;
      else if (mode == "mollified")
        c.rhs_mode = RhsMode::mollified;
      else
        throw Error(Errc::config, "config: unknown rhs mode " + mode);
      c.rhs_f = r.value("f", std::string("one"));
      builtin_function(c.rhs_f);
      if (r.contains("epsilon")) c.epsilon = r["epsilon"].get<double>();
      if (r.contains("rho")) c.rho = r["rho"].get<double>();
      c.q = r.value("q", 8);
    }
    if (j.contains("solver")) {
      const auto& s = j["solver"];
      c.tol = s.value("tol", 1e-10);
      if (s.contains("max_iter")) c.max_iter = s["max_iter"].get<int>();
      c.precondition = s.value("precondition", true);
    }
    if (j.contains("reference")) {
      const std::string ref = j["reference"].get<std::string>();
      if (ref == "exact")
        c.reference = Reference::exact;
      else if (ref == "self")
        c.reference = Reference::self;
      else
        throw Error(Errc::config, "config: reference must be exact or self");
    }
    if (j.contains("output")) {
      c.csv_path = j["output"].value("csv", std::string());
      c.summary_path = j["output"].value("summary", std::string());
    }
    c.kernel_cache = j.value("kernel_cache", std::string());
    c.oversample = j.value("oversample", 16);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == Errc::config) throw;
    throw Error(Errc::config, std::string("config: ") + e.what());
  }
  return c;
}

inline ProblemConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::io, "cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::config, std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(j);
}

inline DomainShape make_shape(const ProblemConfig& c) {
  if (c.shape.kind == "ball") return DomainShape::ball(c.d, c.shape.center, c.shape.radius);
  if (c.shape.kind == "box") return DomainShape::box(c.d, c.shape.lo, c.shape.hi);
  return DomainShape::polygon(c.shape.vertices);
}

inline Reference effective_reference(const ProblemConfig& c) {
  if (c.reference) return *c.reference;
  return (c.shape.kind == "ball" && c.rhs_f == "one") ? Reference::exact : Reference::self;
}

inline std::string kernel_cache_name(int d, int n, double s, int oversample) {
  std::ostringstream name;
  name << "kernel_d" << d << "_N" << n << "_s" << std::setprecision(17) << s << "_o" << oversample << ".fsk";
  return name.str();
}

/// Loads the kernel from the cache directory when present, otherwise assembles
/// it and (if a directory is configured) stores it.
inline std::shared_ptr<const SpectralKernel> load_or_assemble(int d, int n, double s, int oversample,
                                                              const std::string& cache_dir) {
  if (!cache_dir.empty()) {
    const auto path = std::filesystem::path(cache_dir) / kernel_cache_name(d, n, s, oversample);
    if (std::filesystem::exists(path)) {
      auto k = kernel_load(path.string());
      if (k.dim() != d || k.n() != n || k.s() != s || k.oversample() != oversample)
        throw Error(Errc::bad_header, "cached kernel does not match request: " + path.string());
      return std::make_shared<const SpectralKernel>(std::move(k));
    }
    AssemblyOptions opt;
    opt.oversample = oversample;
    auto k = assemble_kernel(d, n, FracOrder(s), opt);
    std::filesystem::create_directories(cache_dir);
    kernel_save(k, path.string());
    return std::make_shared<const SpectralKernel>(std::move(k));
  }
  AssemblyOptions opt;
  opt.oversample = oversample;
  return std::make_shared<const SpectralKernel>(assemble_kernel(d, n, FracOrder(s), opt));
}

struct ProblemSolution {
  std::shared_ptr<const SpectralKernel> kernel;
  DomainMask mask;
  CoefficientField u;
  SolveReport report;
};

namespace detail {

template <class F>
auto stage(const char* name, int n, F&& f) {
  try {
    return f();
  } catch (const Error& e) {
    std::ostringstream msg;
    msg << "stage " << name << " failed at N=" << n << ": " << e.what();
    throw Error(e.code(), msg.str());
  }
}

}  // namespace detail

inline CoefficientField build_rhs(const ProblemConfig& c, const DomainShape& shape, const DomainMask& mask) {
  RhsSpec spec;
  spec.mode = c.rhs_mode;
  spec.f = builtin_function(c.rhs_f);
  spec.epsilon = c.epsilon;
  spec.rho = c.rho;
  spec.q = c.q;
  if (spec.mode == RhsMode::direct) return sample_direct(spec.f, mask);
  const double eps = spec.epsilon.value_or(mask.lattice().h());
  const Mollifier moll(c.d, {eps, spec.q});
  return mollify_sample(spec, shape, mask, moll);
}

inline ProblemSolution solve_problem(const ProblemConfig& c, int n) {
  const DomainShape shape = make_shape(c);
  auto kernel = detail::stage("kernel", n, [&] { return load_or_assemble(c.d, n, c.s, c.oversample, c.kernel_cache); });
  const Lattice lat(c.d, n);
  DomainMask mask = detail::stage("mask", n, [&] { return build_mask(shape, lat); });
  const CoefficientField f = detail::stage("rhs", n, [&] { return build_rhs(c, shape, mask); });
  MaskedOperator op(kernel, mask);
  SolveConfig sc;
  sc.tol = c.tol;
  sc.max_iter = c.max_iter;
  sc.precondition = c.precondition;
  auto [u, report] = detail::stage("solve", n, [&] { return solve(op, f, sc); });
  return {kernel, std::move(mask), std::move(u), std::move(report)};
}

struct ColumnFit {
  std::string column;
  std::optional<RateFit> fit;
};

struct ConvergenceResult {
  Reference reference = Reference::exact;
  std::vector<ErrorReport> rows;
  std::vector<ColumnFit> fits;
  /// Fewer than 3 rows: rates are not fitted.
  bool insufficient_points = false;
  std::string csv;
  std::string summary;
};

namespace detail {

inline std::string format_summary(const ProblemConfig& c, const ConvergenceResult& r) {
  std::ostringstream os;
  os << "fracsinc convergence study: d=" << c.d << " s=" << c.s << " shape=" << c.shape.kind
     << " rhs=" << (c.rhs_mode == RhsMode::direct ? "direct" : "mollified") << ":" << c.rhs_f
     << " reference=" << (r.reference == Reference::exact ? "exact" : "self") << "\n";
  os << "energy = energy norm of the sinc interpolant of grid differences (H^s error proxy)\n";
  os << std::setprecision(6);
  for (const auto& row : r.rows)
    os << "  N=" << row.n << "  l2=" << row.l2 << "  linf=" << row.linf << "  energy=" << row.energy
       << "  decay_ratio=" << row.decay_ratio << "\n";
  if (r.insufficient_points) {
    os << "rates: insufficient points (need >= 3 rows)\n";
  } else {
    for (const auto& f : r.fits) {
      if (f.fit)
        os << "rate " << f.column << ": " << f.fit->rate << " (|log h| corrected p=" << f.fit->log_corrected_rate
           << ", residual " << f.fit->residual << ")\n";
      else
        os << "rate " << f.column << ": not fitted (zero error)\n";
    }
  }
  return os.str();
}

}  // namespace detail

inline ConvergenceResult run_convergence(const ProblemConfig& c) {
  ConvergenceResult result;
  result.reference = effective_reference(c);
  if (result.reference == Reference::exact) {
    if (c.shape.kind != "ball" || c.rhs_f != "one")
      throw Error(Errc::config, "exact reference requires a ball shape and f = one");
    const BallExactSolution exact{c.shape.center, c.shape.radius, c.d, c.s};
    for (int n : c.n_list) {
      const ProblemSolution sol = solve_problem(c, n);
      result.rows.push_back(detail::stage("error", n, [&] {
        return error_report(*sol.kernel, sol.u, [&](const Point& x) { return exact_ball(exact, x); }, sol.mask);
      }));
    }
  } else {
    const int fine_n = c.n_list.back();
    for (int n : c.n_list)
      if (fine_n % n != 0) throw Error(Errc::config, "self-convergence requires nested N_list (each N divides the finest)");
    const ProblemSolution fine = solve_problem(c, fine_n);
    for (std::size_t i = 0; i + 1 < c.n_list.size(); ++i) {
      const int n = c.n_list[i];
      const int stride = fine_n / n;
      const ProblemSolution sol = solve_problem(c, n);
      auto reference = [&](const Point& x) {
        Index k{0, 0, 0};
        for (int a = 0; a < c.d; ++a) k[a] = static_cast<int>(std::lround(x[a] * n)) * stride;
        return fine.u.at(k);
      };
      result.rows.push_back(detail::stage("error", n, [&] { return error_report(*sol.kernel, sol.u, reference, sol.mask); }));
    }
  }

  result.insufficient_points = result.rows.size() < 3;
  if (!result.insufficient_points) {
    auto column = [&](const char* name, double ErrorReport::*field) {
      std::vector<RatePoint> pts;
      bool positive = true;
      for (const auto& row : result.rows) {
        pts.push_back({row.h, row.*field});
        positive = positive && row.*field > 0.0;
      }
      result.fits.push_back({name, positive ? std::optional<RateFit>(fit_rate(pts)) : std::nullopt});
    };
    column("l2", &ErrorReport::l2);
    column("linf", &ErrorReport::linf);
    column("energy", &ErrorReport::energy);
  }

  std::ostringstream csv;
  csv << error_csv_header << "\n";
  for (const auto& row : result.rows) write_csv_row(csv, row);
  result.csv = csv.str();
  result.summary = detail::format_summary(c, result);
  return result;
}

}  // namespace fracsinc

#endif  // FRACSINC_BENCH_HPP
