#pragma once

// Computational domains (intervals and axis-aligned rectangles), boundary
// partitions into Dirichlet/Neumann parts, and generation of the two
// staggered point sets used by two-field collocation.

#include "dlm/errors.hpp"

#include <Eigen/Core>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dlm {

template <int Dim>
using Point = Eigen::Matrix<double, Dim, 1>;

enum class DomainKind { Interval, Rectangle };

/// Boundary faces. Intervals use Left/Right only.
enum class Face { Left, Right, Bottom, Top };

inline std::string_view to_string(Face f) {
  switch (f) {
    case Face::Left: return "left";
    case Face::Right: return "right";
    case Face::Bottom: return "bottom";
    case Face::Top: return "top";
  }
  return "?";
}

inline Face face_from_string(std::string_view s) {
  if (s == "left") return Face::Left;
  if (s == "right") return Face::Right;
  if (s == "bottom") return Face::Bottom;
  if (s == "top") return Face::Top;
  throw ValidationError("unknown boundary face '" + std::string(s) + "'");
}

/// Axis normal to a face, and whether the face sits at the upper bound.
inline int face_axis(Face f) { return (f == Face::Left || f == Face::Right) ? 0 : 1; }
inline bool face_is_upper(Face f) { return f == Face::Right || f == Face::Top; }

template <int Dim>
class Domain {
  static_assert(Dim == 1 || Dim == 2, "only 1D intervals and 2D rectangles are supported");

 public:
  Domain(const Point<Dim>& lower, const Point<Dim>& upper) : lower_(lower), upper_(upper) {
    for (int a = 0; a < Dim; ++a) {
      if (!std::isfinite(lower_[a]) || !std::isfinite(upper_[a]) || !(lower_[a] < upper_[a])) {
        throw ValidationError("domain lower bound must be strictly below upper bound in every coordinate");
      }
    }
  }

  static Domain interval(double a, double b)
    requires(Dim == 1)
  {
    return Domain(Point<1>(a), Point<1>(b));
  }

  static Domain rectangle(double x0, double x1, double y0, double y1)
    requires(Dim == 2)
  {
    return Domain(Point<2>(x0, y0), Point<2>(x1, y1));
  }

  static constexpr int dim() { return Dim; }
  static constexpr DomainKind kind() { return Dim == 1 ? DomainKind::Interval : DomainKind::Rectangle; }

  const Point<Dim>& lower() const { return lower_; }
  const Point<Dim>& upper() const { return upper_; }
  double extent(int axis) const { return upper_[axis] - lower_[axis]; }
  double diameter() const { return (upper_ - lower_).norm(); }

  static std::vector<Face> faces() {
    if constexpr (Dim == 1) {
      return {Face::Left, Face::Right};
    } else {
      return {Face::Left, Face::Right, Face::Bottom, Face::Top};
    }
  }

  static bool has_face(Face f) { return Dim == 2 || face_axis(f) == 0; }

  double face_coordinate(Face f) const {
    const int a = face_axis(f);
    return face_is_upper(f) ? upper_[a] : lower_[a];
  }

  /// Absolute tolerance used for on-face / in-domain checks.
  double tolerance() const { return 1e-12 * std::max(1.0, diameter()); }

  bool contains(const Point<Dim>& x) const {
    const double tol = tolerance();
    for (int a = 0; a < Dim; ++a) {
      if (x[a] < lower_[a] - tol || x[a] > upper_[a] + tol) return false;
    }
    return true;
  }

  bool on_face(const Point<Dim>& x, Face f) const {
    if (!has_face(f) || !contains(x)) return false;
    return std::abs(x[face_axis(f)] - face_coordinate(f)) <= tolerance();
  }

  /// First face (in declaration order) that x lies on, if any.
  std::optional<Face> locate_face(const Point<Dim>& x) const {
    for (Face f : faces()) {
      if (on_face(x, f)) return f;
    }
    return std::nullopt;
  }

  bool operator==(const Domain&) const = default;

 private:
  Point<Dim> lower_;
  Point<Dim> upper_;
};

/// Assignment of boundary faces to the Dirichlet part and the Neumann part.
struct BoundaryPartition {
  std::set<Face> dirichlet;
  std::set<Face> neumann;

  template <int Dim>
  static BoundaryPartition all_dirichlet(const Domain<Dim>&) {
    BoundaryPartition p;
    for (Face f : Domain<Dim>::faces()) p.dirichlet.insert(f);
    return p;
  }

  bool is_dirichlet(Face f) const { return dirichlet.count(f) > 0; }
  bool is_neumann(Face f) const { return neumann.count(f) > 0; }

  /// Every face of the domain in exactly one part, at least one Dirichlet face.
  template <int Dim>
  void validate(const Domain<Dim>&) const {
    for (Face f : dirichlet) {
      if (!Domain<Dim>::has_face(f)) throw ValidationError("partition names a face the domain lacks: " + std::string(to_string(f)));
    }
    for (Face f : neumann) {
      if (!Domain<Dim>::has_face(f)) throw ValidationError("partition names a face the domain lacks: " + std::string(to_string(f)));
    }
    for (Face f : Domain<Dim>::faces()) {
      const bool d = is_dirichlet(f);
      const bool n = is_neumann(f);
      if (d == n) {
        throw ValidationError("boundary face '" + std::string(to_string(f)) + "' must belong to exactly one of the Dirichlet/Neumann parts");
      }
    }
    if (dirichlet.empty()) throw ValidationError("at least one Dirichlet face is required");
  }

  bool operator==(const BoundaryPartition&) const = default;
};

/// Unit outward normal of `domain` at `x`, which must lie on `face`.
template <int Dim>
Point<Dim> outward_normal(const Domain<Dim>& domain, const Point<Dim>& x, Face face) {
  if (!domain.on_face(x, face)) {
    throw ValidationError("point is not on boundary face '" + std::string(to_string(face)) + "'");
  }
  Point<Dim> n = Point<Dim>::Zero();
  n[face_axis(face)] = face_is_upper(face) ? 1.0 : -1.0;
  return n;
}

enum class PointStrategy { Equispaced, Halton };

inline std::string_view to_string(PointStrategy s) { return s == PointStrategy::Equispaced ? "equispaced" : "halton"; }

/// Van der Corput radical inverse of `index` in `base`.
inline double radical_inverse(std::uint64_t index, unsigned base) {
  double result = 0.0;
  double f = 1.0 / base;
  while (index > 0) {
    result += f * static_cast<double>(index % base);
    index /= base;
    f /= base;
  }
  return result;
}

template <int Dim>
struct BoundaryPoint {
  Point<Dim> x;
  Face face;
  Point<Dim> normal;
};

/// Interior and boundary collocation points plus the two staggered center sets.
///
/// set_u = interior_u followed by the boundary points.
/// set_v = interior_v (interior_u shifted by stagger_offset * spacing) followed by
/// boundary_v (each boundary point moved inward by (1 - stagger_offset) * spacing / 2).
/// Boundary rows of both fields are collocated at `boundary`.
template <int Dim>
struct CollocationSet {
  std::vector<Point<Dim>> interior_u;
  std::vector<Point<Dim>> interior_v;
  std::vector<BoundaryPoint<Dim>> boundary;
  std::vector<Point<Dim>> boundary_v;
  Point<Dim> spacing = Point<Dim>::Zero();
  double stagger_offset = 0.5;
  double min_separation_tolerance = 0.0;

  std::size_t n_u() const { return interior_u.size() + boundary.size(); }
  std::size_t n_v() const { return interior_v.size() + boundary_v.size(); }

  std::vector<Point<Dim>> set_u() const {
    std::vector<Point<Dim>> out = interior_u;
    for (const auto& b : boundary) out.push_back(b.x);
    return out;
  }

  std::vector<Point<Dim>> set_v() const {
    std::vector<Point<Dim>> out = interior_v;
    out.insert(out.end(), boundary_v.begin(), boundary_v.end());
    return out;
  }

  /// Smallest local spacing over the axes.
  double characteristic_spacing() const { return spacing.minCoeff(); }

  /// Distinct collocation rows available: field equation at both interior sets
  /// plus one u-row and one v-row per boundary point.
  std::size_t total() const { return interior_u.size() + interior_v.size() + 2 * boundary.size(); }
};

/// Sentinel returned by min_separation for fewer than two points.
inline constexpr double kNoSeparation = std::numeric_limits<double>::infinity();

template <int Dim>
double min_separation(std::span<const Point<Dim>> points) {
  double best = kNoSeparation;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t j = i + 1; j < points.size(); ++j) {
      best = std::min(best, (points[i] - points[j]).norm());
    }
  }
  return best;
}

template <int Dim>
double min_separation(const std::vector<Point<Dim>>& a, const std::vector<Point<Dim>>& b) {
  std::vector<Point<Dim>> all = a;
  all.insert(all.end(), b.begin(), b.end());
  return min_separation<Dim>(std::span<const Point<Dim>>(all));
}

/// Smallest pairwise distance over the union of set_u and set_v.
template <int Dim>
double min_separation(const CollocationSet<Dim>& set) {
  return min_separation<Dim>(set.set_u(), set.set_v());
}

struct CollocationOptions {
  PointStrategy strategy = PointStrategy::Equispaced;
  double stagger_offset = 0.5;
  /// Minimum allowed separation; a non-positive value selects 1e-8 * diameter.
  double min_separation_tolerance = 0.0;
};

namespace detail {

inline std::vector<int> split_boundary_count(int n_boundary, int n_faces) {
  std::vector<int> counts(n_faces, n_boundary / n_faces);
  for (int i = 0; i < n_boundary % n_faces; ++i) ++counts[i];
  return counts;
}

}  // namespace detail

template <int Dim>
CollocationSet<Dim> generate_collocation(const Domain<Dim>& domain, const BoundaryPartition& partition, int n_interior,
                                         int n_boundary, const CollocationOptions& options = {}) {
  partition.validate(domain);
  if (n_interior < 1) throw ValidationError("n_interior must be at least 1");
  const double s = options.stagger_offset;
  if (!(s > 0.0 && s < 1.0)) throw ValidationError("stagger_offset must lie in the open interval (0, 1)");

  CollocationSet<Dim> set;
  set.stagger_offset = s;
  set.min_separation_tolerance =
      options.min_separation_tolerance > 0.0 ? options.min_separation_tolerance : 1e-8 * domain.diameter();

  const Point<Dim> lo = domain.lower();
  const Point<Dim> hi = domain.upper();

  if constexpr (Dim == 1) {
    if (n_boundary < 2) throw ValidationError("a 1D domain needs n_boundary >= 2");
    if (n_boundary > 2) {
      throw ValidationError("an interval has only two distinct boundary points; n_boundary > 2 would collapse the separation");
    }
    const double h = domain.extent(0) / (n_interior + 1);
    set.spacing[0] = h;
    for (int i = 0; i < n_interior; ++i) {
      double x = options.strategy == PointStrategy::Equispaced
                     ? lo[0] + (i + 1) * h
                     : lo[0] + domain.extent(0) * radical_inverse(static_cast<std::uint64_t>(i + 1), 2);
      set.interior_u.push_back(Point<1>(x));
    }
  } else {
    if (n_boundary < 4) throw ValidationError("a 2D domain needs n_boundary >= 4");
    if (options.strategy == PointStrategy::Equispaced) {
      const int k = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n_interior))));
      if (k * k != n_interior) throw ValidationError("equispaced 2D interiors need a perfect-square n_interior");
      set.spacing = Point<2>(domain.extent(0) / (k + 1), domain.extent(1) / (k + 1));
      for (int j = 0; j < k; ++j) {
        for (int i = 0; i < k; ++i) {
          set.interior_u.push_back(Point<2>(lo[0] + (i + 1) * set.spacing[0], lo[1] + (j + 1) * set.spacing[1]));
        }
      }
    } else {
      const double per_axis = std::sqrt(static_cast<double>(n_interior)) + 1.0;
      set.spacing = Point<2>(domain.extent(0) / per_axis, domain.extent(1) / per_axis);
      for (int i = 0; i < n_interior; ++i) {
        const auto idx = static_cast<std::uint64_t>(i + 1);
        set.interior_u.push_back(Point<2>(lo[0] + domain.extent(0) * radical_inverse(idx, 2),
                                          lo[1] + domain.extent(1) * radical_inverse(idx, 3)));
      }
    }
  }

  // Staggered interior copy; a coordinate that would leave the domain stops
  // halfway between the point and the upper bound.
  for (const auto& x : set.interior_u) {
    Point<Dim> y = x;
    for (int a = 0; a < Dim; ++a) {
      const double shifted = x[a] + s * set.spacing[a];
      y[a] = shifted < hi[a] ? shifted : 0.5 * (x[a] + hi[a]);
    }
    set.interior_v.push_back(y);
  }

  // Boundary points.
  if constexpr (Dim == 1) {
    set.boundary.push_back({lo, Face::Left, outward_normal(domain, lo, Face::Left)});
    set.boundary.push_back({hi, Face::Right, outward_normal(domain, hi, Face::Right)});
  } else {
    const auto faces = Domain<2>::faces();
    const auto counts = detail::split_boundary_count(n_boundary, static_cast<int>(faces.size()));
    for (std::size_t fi = 0; fi < faces.size(); ++fi) {
      const Face f = faces[fi];
      const int normal_axis = face_axis(f);
      const int tangent_axis = 1 - normal_axis;
      for (int j = 0; j < counts[fi]; ++j) {
        Point<2> x;
        x[normal_axis] = domain.face_coordinate(f);
        x[tangent_axis] = lo[tangent_axis] + domain.extent(tangent_axis) * (j + 1) / (counts[fi] + 1);
        set.boundary.push_back({x, f, outward_normal(domain, x, f)});
      }
    }
  }

  for (const auto& b : set.boundary) {
    const int a = face_axis(b.face);
    Point<Dim> y = b.x - b.normal * ((1.0 - s) * set.spacing[a] / 2.0);
    set.boundary_v.push_back(y);
  }

  for (const auto& x : set.interior_u) {
    if (!domain.contains(x)) throw ValidationError("generated interior point outside the domain");
  }
  const double sep = min_separation(set);
  if (sep < set.min_separation_tolerance) {
    throw ValidationError("point counts give a minimum separation " + std::to_string(sep) + " below the tolerance " +
                          std::to_string(set.min_separation_tolerance));
  }
  return set;
}

template <int Dim>
CollocationSet<Dim> generate_collocation(const Domain<Dim>& domain, const BoundaryPartition& partition, int n_interior,
                                         int n_boundary, PointStrategy strategy, double stagger_offset) {
  CollocationOptions options;
  options.strategy = strategy;
  options.stagger_offset = stagger_offset;
  return generate_collocation(domain, partition, n_interior, n_boundary, options);
}

/// Splits a per-field center count N into (n_interior, n_boundary).
/// 1D: (N - 2, 2). 2D: N = k^2 + 4k gives a k-by-k interior grid and k points per face.
template <int Dim>
std::pair<int, int> split_center_count(int n) {
  if constexpr (Dim == 1) {
    if (n < 3) throw ValidationError("1D runs need N >= 3 (two boundary points plus an interior point)");
    return {n - 2, 2};
  } else {
    for (int k = 1; k * k + 4 * k <= n; ++k) {
      if (k * k + 4 * k == n) return {k * k, 4 * k};
    }
    throw ValidationError("2D runs need N of the form k^2 + 4k (e.g. 5, 12, 21, 32, 45); got " + std::to_string(n));
  }
}

}  // namespace dlm
