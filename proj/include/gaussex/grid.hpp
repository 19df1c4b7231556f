#pragma once

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "gaussex/kernels.hpp"

namespace gaussex {

enum class GridKind { interval, hyperrectangle, simplex, sphere_time };

std::string to_string(GridKind kind);
GridKind grid_kind_from_string(const std::string& name);

struct Bounds {
  double lo = 0.0;
  double hi = 0.0;
};

/// One level of geometric refinement around a focus set.
struct RefinementLevel {
  int level = 0;
  double mesh = 0.0;
  double radius = 0.0;
  std::size_t added = 0;
};

/// A finite, lexicographically ordered set of distinct points.
///
/// Every constructor validates the kind-specific invariant (simplex ordering,
/// bounds) and rejects duplicate points.
class GridSpec {
 public:
  /// Uniform grid lo, lo + mesh, ..., hi. The mesh must divide hi - lo.
  static GridSpec interval(double lo, double hi, double mesh);

  /// Tensor product of uniform axes; each mesh must divide its axis length.
  static GridSpec hyperrectangle(std::vector<Bounds> bounds, std::vector<double> mesh);

  /// Lattice points of {0 <= t_1 <= ... <= t_n <= 1} with spacing mesh (1/mesh integral).
  static GridSpec simplex(std::size_t n, double mesh);

  /// Angles [0,pi]^(n-2) x [0,2pi) at the given angular mesh times a list of time points.
  /// The angular mesh is shrunk so that it divides pi.
  static GridSpec sphere_time(std::size_t n, double angular_mesh, const std::vector<double>& times);

  /// Explicit points; sorted lexicographically and validated.
  static GridSpec from_points(GridKind kind, std::vector<Point> points, std::vector<double> mesh,
                              std::vector<Bounds> bounds);

  GridKind kind() const noexcept { return kind_; }
  std::size_t dimension() const noexcept { return bounds_.size(); }
  std::size_t size() const noexcept { return points_.size(); }
  const std::vector<Point>& points() const noexcept { return points_; }
  const Point& point(std::size_t i) const { return points_.at(i); }
  const std::vector<double>& mesh() const noexcept { return mesh_; }
  const std::vector<Bounds>& bounds() const noexcept { return bounds_; }
  const std::vector<RefinementLevel>& refinement() const noexcept { return refinement_; }

  /// Geometric refinement toward focus points: level l = 1..levels adds the lattice
  /// with spacing mesh / ratio^l inside the sup-norm box of radius band / ratio^(l-1)
  /// around each focus point (clipped to the domain). Interval, hyperrectangle and
  /// simplex grids only.
  GridSpec refined(const std::vector<Point>& focus, double band, int levels = 4, int ratio = 2) const;

  /// Position of every point of `sub` inside this grid; throws UsageError if `sub`
  /// is not a subset.
  std::vector<std::size_t> indices_of(const GridSpec& sub) const;

  /// Smallest sup-norm distance from `p` to a grid point.
  double distance_to(const Point& p) const;

  /// Short human-readable description used in result records.
  std::string summary() const;

 private:
  GridSpec(GridKind kind, std::vector<Point> points, std::vector<double> mesh, std::vector<Bounds> bounds);

  GridKind kind_;
  std::vector<Point> points_;
  std::vector<double> mesh_;
  std::vector<Bounds> bounds_;
  std::vector<RefinementLevel> refinement_;
};

}  // namespace gaussex
