#ifndef FRACSINC_DOMAIN_HPP
#define FRACSINC_DOMAIN_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <utility>
#include <variant>
#include <vector>

#include "fracsinc/error.hpp"
#include "fracsinc/lattice.hpp"

namespace fracsinc {

/// Points within this distance of the boundary count as exterior.
inline constexpr double boundary_tol = 1e-12;

struct Ball {
  Point center{0.0, 0.0, 0.0};
  double radius = 0.0;
};

/// Axis-aligned box. Faces lying on the bounding box (lo = 0 or hi = 1) are
/// treated as closed so that box(0, 1) covers the whole lattice.
struct Box {
  Point lo{0.0, 0.0, 0.0};
  Point hi{1.0, 1.0, 1.0};
};

/// Simple polygon in d = 2, vertices in order (either orientation).
struct Polygon {
  std::vector<std::array<double, 2>> vertices;
};

/// Region {x : phi(x) < 0}. The bounding box [lo, hi] must contain the
/// closure and is used for the enlargement containment check.
struct SignedDistance {
  std::function<double(const Point&)> phi;
  Point lo{0.0, 0.0, 0.0};
  Point hi{1.0, 1.0, 1.0};
};

class DomainShape {
 public:
  using Geometry = std::variant<Ball, Box, Polygon, SignedDistance>;

  static DomainShape ball(int d, const Point& center, double radius) {
    if (!(radius > 0.0)) throw Error(Errc::degenerate_shape, "degenerate shape: ball radius must be positive");
    for (int i = 0; i < d; ++i)
      if (center[i] - radius < 0.0 || center[i] + radius > 1.0)
        throw Error(Errc::degenerate_shape, "degenerate shape: ball not contained in the unit box");
    return DomainShape(d, Ball{center, radius});
  }

  static DomainShape box(int d, const Point& lo, const Point& hi) {
    for (int i = 0; i < d; ++i) {
      if (!(lo[i] < hi[i])) throw Error(Errc::degenerate_shape, "degenerate shape: box needs lo < hi");
      if (lo[i] < 0.0 || hi[i] > 1.0)
        throw Error(Errc::degenerate_shape, "degenerate shape: box not contained in the unit box");
    }
    return DomainShape(d, Box{lo, hi});
  }

  static DomainShape polygon(std::vector<std::array<double, 2>> vertices) {
    validate_polygon(vertices);
    return DomainShape(2, Polygon{std::move(vertices)});
  }

  static DomainShape from_signed_distance(int d, std::function<double(const Point&)> phi, const Point& lo,
                                     const Point& hi) {
    if (!phi) throw Error(Errc::degenerate_shape, "degenerate shape: empty signed-distance callback");
    for (int i = 0; i < d; ++i)
      if (!(lo[i] < hi[i]) || lo[i] < 0.0 || hi[i] > 1.0)
        throw Error(Errc::degenerate_shape, "degenerate shape: invalid bounding box");
    return DomainShape(d, SignedDistance{std::move(phi), lo, hi});
  }

  int dim() const noexcept { return d_; }
  const Geometry& geometry() const noexcept { return geometry_; }

  /// Negative inside, positive outside. Exact Euclidean distance outside the
  /// region for balls, boxes and polygons.
  double signed_distance(const Point& x) const {
    return std::visit([&](const auto& g) { return sdf(g, x); }, geometry_);
  }

  bool contains(const Point& x) const { return signed_distance(x) < -boundary_tol; }

  /// Axis-aligned bounds of the closure.
  std::pair<Point, Point> bounds() const {
    return std::visit([&](const auto& g) { return bounds_of(g); }, geometry_);
  }

  /// Nearest point of the closure (identity for interior points).
  Point project(const Point& y) const {
    return std::visit([&](const auto& g) { return project_onto(g, y); }, geometry_);
  }

 private:
  DomainShape(int d, Geometry g) : d_(d), geometry_(std::move(g)) {
    if (d < 1 || d > max_dim) throw Error(Errc::invalid_argument, "shape dimension must be 1, 2 or 3");
  }

  static double cross(const std::array<double, 2>& o, const std::array<double, 2>& a,
                      const std::array<double, 2>& b) {
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
  }

  static bool segments_intersect(const std::array<double, 2>& p1, const std::array<double, 2>& p2,
                                 const std::array<double, 2>& q1, const std::array<double, 2>& q2) {
    const double d1 = cross(q1, q2, p1);
    const double d2 = cross(q1, q2, p2);
    const double d3 = cross(p1, p2, q1);
    const double d4 = cross(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) return true;
    auto on_segment = [](const auto& a, const auto& b, const auto& p) {
      return std::min(a[0], b[0]) <= p[0] && p[0] <= std::max(a[0], b[0]) && std::min(a[1], b[1]) <= p[1] &&
             p[1] <= std::max(a[1], b[1]);
    };
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
  }

  static void validate_polygon(const std::vector<std::array<double, 2>>& v) {
    const std::size_t n = v.size();
    if (n < 3) throw Error(Errc::degenerate_shape, "degenerate shape: polygon needs at least 3 vertices");
    double area = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& a = v[i];
      const auto& b = v[(i + 1) % n];
      if (a[0] < 0.0 || a[0] > 1.0 || a[1] < 0.0 || a[1] > 1.0)
        throw Error(Errc::degenerate_shape, "degenerate shape: polygon vertex outside the unit box");
      area += a[0] * b[1] - a[1] * b[0];
    }
    if (std::abs(area) < 1e-14) throw Error(Errc::degenerate_shape, "degenerate shape: polygon has zero area");
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
        if (adjacent) continue;
        if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]))
          throw Error(Errc::degenerate_shape, "degenerate shape: polygon is self-intersecting");
      }
    }
  }

  double sdf(const Ball& b, const Point& x) const {
    Point r{};
    for (int i = 0; i < d_; ++i) r[i] = x[i] - b.center[i];
    return norm(r, d_) - b.radius;
  }

  double sdf(const Box& b, const Point& x) const {
    double outside = 0.0;
    double inside = -std::numeric_limits<double>::infinity();
    bool any_active = false;
    bool is_outside = false;
    for (int i = 0; i < d_; ++i) {
      const bool lo_active = b.lo[i] > 0.0;
      const bool hi_active = b.hi[i] < 1.0;
      double q = 0.0;
      if (lo_active) {
        any_active = true;
        q = std::max(q, b.lo[i] - x[i]);
        inside = std::max(inside, b.lo[i] - x[i]);
      }
      if (hi_active) {
        any_active = true;
        q = std::max(q, x[i] - b.hi[i]);
        inside = std::max(inside, x[i] - b.hi[i]);
      }
      if (q > 0.0) is_outside = true;
      outside += q * q;
    }
    if (is_outside) return std::sqrt(outside);
    // full unit box: every lattice point is interior
    if (!any_active) return -1.0;
    return inside;
  }

  double sdf(const Polygon& p, const Point& x) const {
    const auto& v = p.vertices;
    const std::size_t n = v.size();
    double dist2 = std::numeric_limits<double>::infinity();
    bool in = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
      const auto& a = v[j];
      const auto& b = v[i];
      if (((b[1] > x[1]) != (a[1] > x[1])) && (x[0] < (a[0] - b[0]) * (x[1] - b[1]) / (a[1] - b[1]) + b[0]))
        in = !in;
      dist2 = std::min(dist2, segment_dist2(a, b, x));
    }
    const double dist = std::sqrt(dist2);
    return in ? -dist : dist;
  }

  double sdf(const SignedDistance& s, const Point& x) const { return s.phi(x); }

  static double segment_dist2(const std::array<double, 2>& a, const std::array<double, 2>& b, const Point& x) {
    const std::array<double, 2> c = closest_on_segment(a, b, x);
    return (x[0] - c[0]) * (x[0] - c[0]) + (x[1] - c[1]) * (x[1] - c[1]);
  }

  static std::array<double, 2> closest_on_segment(const std::array<double, 2>& a, const std::array<double, 2>& b,
                                                  const Point& x) {
    const double ex = b[0] - a[0], ey = b[1] - a[1];
    const double len2 = ex * ex + ey * ey;
    double t = len2 > 0.0 ? ((x[0] - a[0]) * ex + (x[1] - a[1]) * ey) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return {a[0] + t * ex, a[1] + t * ey};
  }

  std::pair<Point, Point> bounds_of(const Ball& b) const {
    Point lo{}, hi{};
    for (int i = 0; i < d_; ++i) {
      lo[i] = b.center[i] - b.radius;
      hi[i] = b.center[i] + b.radius;
    }
    return {lo, hi};
  }
  std::pair<Point, Point> bounds_of(const Box& b) const { return {b.lo, b.hi}; }
  std::pair<Point, Point> bounds_of(const Polygon& p) const {
    Point lo{1.0, 1.0, 0.0}, hi{0.0, 0.0, 0.0};
    for (const auto& v : p.vertices)
      for (int i = 0; i < 2; ++i) {
        lo[i] = std::min(lo[i], v[i]);
        hi[i] = std::max(hi[i], v[i]);
      }
    return {lo, hi};
  }
  std::pair<Point, Point> bounds_of(const SignedDistance& s) const { return {s.lo, s.hi}; }

  Point project_onto(const Ball& b, const Point& y) const {
    Point r{};
    for (int i = 0; i < d_; ++i) r[i] = y[i] - b.center[i];
    const double len = norm(r, d_);
    if (len <= b.radius) return y;
    Point p = y;
    for (int i = 0; i < d_; ++i) p[i] = b.center[i] + b.radius * r[i] / len;
    return p;
  }

  Point project_onto(const Box& b, const Point& y) const {
    Point p = y;
    for (int i = 0; i < d_; ++i) p[i] = std::clamp(y[i], b.lo[i], b.hi[i]);
    return p;
  }

  Point project_onto(const Polygon& p, const Point& y) const {
    if (sdf(p, y) <= 0.0) return y;
    const auto& v = p.vertices;
    double best = std::numeric_limits<double>::infinity();
    Point out = y;
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
      const auto c = closest_on_segment(v[j], v[i], y);
      const double d2 = (y[0] - c[0]) * (y[0] - c[0]) + (y[1] - c[1]) * (y[1] - c[1]);
      if (d2 < best) {
        best = d2;
        out[0] = c[0];
        out[1] = c[1];
      }
    }
    return out;
  }

  // Newton-style projection along the finite-difference gradient.
  Point project_onto(const SignedDistance& s, const Point& y) const {
    Point p = y;
    for (int it = 0; it < 8; ++it) {
      const double phi = s.phi(p);
      if (phi <= 0.0) return p;
      Point g{};
      double gn = 0.0;
      const double step = 1e-7;
      for (int i = 0; i < d_; ++i) {
        Point a = p, b = p;
        a[i] += step;
        b[i] -= step;
        g[i] = (s.phi(a) - s.phi(b)) / (2 * step);
        gn += g[i] * g[i];
      }
      if (gn <= 0.0) return p;
      for (int i = 0; i < d_; ++i) p[i] -= phi * g[i] / gn;
    }
    return p;
  }

  int d_;
  Geometry geometry_;
};

inline bool shape_contains(const DomainShape& shape, const Point& x) { return shape.contains(x); }

/// Lattice index set Omega_h = {k : k/N in Omega}.
class DomainMask {
 public:
  DomainMask(Lattice lattice, std::vector<std::uint8_t> inside) : lattice_(lattice), inside_(std::move(inside)) {
    if (inside_.size() != lattice_.size()) throw Error(Errc::invalid_argument, "mask size does not match lattice");
    for (std::size_t k = 0; k < inside_.size(); ++k)
      if (inside_[k]) indices_.push_back(k);
  }

  static DomainMask full(const Lattice& lattice) {
    return DomainMask(lattice, std::vector<std::uint8_t>(lattice.size(), 1));
  }

  const Lattice& lattice() const noexcept { return lattice_; }
  bool inside(std::size_t flat) const noexcept { return inside_[flat] != 0; }
  bool inside(const Index& k) const noexcept { return inside_[lattice_.flatten(k)] != 0; }
  std::size_t count() const noexcept { return indices_.size(); }
  /// Flat indices of interior points in increasing order.
  const std::vector<std::size_t>& indices() const noexcept { return indices_; }
  const std::vector<std::uint8_t>& data() const noexcept { return inside_; }

  friend bool operator==(const DomainMask& a, const DomainMask& b) {
    return a.lattice_ == b.lattice_ && a.inside_ == b.inside_;
  }

 private:
  Lattice lattice_;
  std::vector<std::uint8_t> inside_;
  std::vector<std::size_t> indices_;
};

inline DomainMask build_mask(const DomainShape& shape, const Lattice& lattice) {
  if (shape.dim() != lattice.dim()) throw Error(Errc::invalid_argument, "shape and lattice dimensions differ");
  std::vector<std::uint8_t> inside(lattice.size(), 0);
  std::size_t count = 0;
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    if (shape.contains(lattice.point(k))) {
      inside[k] = 1;
      ++count;
    }
  }
  if (count == 0) throw Error(Errc::empty_domain, "empty discrete domain");
  return DomainMask(lattice, std::move(inside));
}

namespace detail {

inline DomainShape enlarge_unchecked(const DomainShape& shape, double rho) {
  const int d = shape.dim();
  if (const auto* b = std::get_if<Ball>(&shape.geometry())) {
    const Ball grown{b->center, b->radius + rho};
    return DomainShape::from_signed_distance(
        d,
        [grown, d](const Point& x) {
          Point r{};
          for (int i = 0; i < d; ++i) r[i] = x[i] - grown.center[i];
          return norm(r, d) - grown.radius;
        },
        Point{0, 0, 0}, Point{1, 1, 1});
  }
  // Everything else via distance offset: exact outside for boxes and polygons.
  return DomainShape::from_signed_distance(
      d, [shape, rho](const Point& x) { return shape.signed_distance(x) - rho; }, Point{0, 0, 0}, Point{1, 1, 1});
}

}  // namespace detail

/// Minkowski enlargement Omega + B_rho. Balls stay balls, boxes grow by rho on
/// every face, other shapes become signed-distance offsets.
inline DomainShape enlarge_shape(const DomainShape& shape, double rho) {
  if (!(rho >= 0.0)) throw Error(Errc::invalid_argument, "enlargement radius must be nonnegative");
  const int d = shape.dim();
  auto [lo, hi] = shape.bounds();
  for (int i = 0; i < d; ++i) {
    lo[i] -= rho;
    hi[i] += rho;
    if (lo[i] < 0.0 || hi[i] > 1.0)
      throw Error(Errc::enlarged_out_of_box, "enlarged domain exceeds bounding box");
  }
  if (const auto* b = std::get_if<Ball>(&shape.geometry())) return DomainShape::ball(d, b->center, b->radius + rho);
  if (std::holds_alternative<Box>(shape.geometry())) return DomainShape::box(d, lo, hi);
  return DomainShape::from_signed_distance(
      d, [shape, rho](const Point& x) { return shape.signed_distance(x) - rho; }, lo, hi);
}

/// Number of lattice points in (Omega + B_h) \ Omega.
inline std::size_t strip_point_count(const DomainShape& shape, const Lattice& lattice) {
  const DomainShape grown = detail::enlarge_unchecked(shape, lattice.h());
  std::size_t count = 0;
  for (std::size_t k = 0; k < lattice.size(); ++k) {
    const Point x = lattice.point(k);
    if (grown.contains(x) && !shape.contains(x)) ++count;
  }
  return count;
}

}  // namespace fracsinc

#endif  // FRACSINC_DOMAIN_HPP
