#include "gaussex/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "gaussex/error.hpp"

namespace gaussex {

namespace {

constexpr double kDivisibilityTol = 1e-9;

std::size_t divide_exactly(double length, double mesh, const char* what) {
  if (!(mesh > 0.0)) throw UsageError(std::string(what) + ": mesh must be positive");
  if (!(length >= 0.0)) throw UsageError(std::string(what) + ": empty range");
  const double cells = length / mesh;
  const double rounded = std::round(cells);
  if (std::abs(cells - rounded) > kDivisibilityTol * std::max(1.0, cells)) {
    std::ostringstream os;
    os << what << ": mesh " << mesh << " does not divide length " << length;
    throw UsageError(os.str());
  }
  return static_cast<std::size_t>(rounded);
}

std::vector<double> axis_values(double lo, double hi, double mesh, const char* what) {
  const std::size_t cells = divide_exactly(hi - lo, mesh, what);
  std::vector<double> values(cells + 1);
  for (std::size_t k = 0; k < cells; ++k) values[k] = lo + static_cast<double>(k) * mesh;
  values[cells] = hi;
  return values;
}

bool is_simplex_point(const Point& t) {
  double prev = 0.0;
  for (double x : t) {
    if (!(x >= prev)) return false;
    prev = x;
  }
  return prev <= 1.0;
}

// Enumerates nondecreasing integer tuples 0 <= k_1 <= ... <= k_n <= cells.
void enumerate_simplex(std::size_t n, long cells, std::vector<long>& cur, std::vector<std::vector<long>>& out) {
  if (cur.size() == n) {
    out.push_back(cur);
    return;
  }
  const long start = cur.empty() ? 0 : cur.back();
  for (long k = start; k <= cells; ++k) {
    cur.push_back(k);
    enumerate_simplex(n, cells, cur, out);
    cur.pop_back();
  }
}

}  // namespace

std::string to_string(GridKind kind) {
  switch (kind) {
    case GridKind::interval: return "interval";
    case GridKind::hyperrectangle: return "hyperrectangle";
    case GridKind::simplex: return "simplex";
    case GridKind::sphere_time: return "sphere_time";
  }
  return "unknown";
}

GridKind grid_kind_from_string(const std::string& name) {
  if (name == "interval") return GridKind::interval;
  if (name == "hyperrectangle") return GridKind::hyperrectangle;
  if (name == "simplex") return GridKind::simplex;
  if (name == "sphere_time") return GridKind::sphere_time;
  throw UsageError("unknown grid kind '" + name + "'");
}

GridSpec::GridSpec(GridKind kind, std::vector<Point> points, std::vector<double> mesh, std::vector<Bounds> bounds)
    : kind_(kind), points_(std::move(points)), mesh_(std::move(mesh)), bounds_(std::move(bounds)) {}

GridSpec GridSpec::interval(double lo, double hi, double mesh) {
  if (!(hi > lo)) throw UsageError("interval grid needs lo < hi");
  std::vector<Point> pts;
  for (double x : axis_values(lo, hi, mesh, "interval grid")) pts.push_back({x});
  return GridSpec(GridKind::interval, std::move(pts), {mesh}, {{lo, hi}});
}

GridSpec GridSpec::hyperrectangle(std::vector<Bounds> bounds, std::vector<double> mesh) {
  if (bounds.empty() || bounds.size() != mesh.size()) {
    throw UsageError("hyperrectangle grid needs one mesh per axis");
  }
  std::vector<std::vector<double>> axes;
  for (std::size_t d = 0; d < bounds.size(); ++d) {
    if (!(bounds[d].hi > bounds[d].lo)) throw UsageError("hyperrectangle axis needs lo < hi");
    axes.push_back(axis_values(bounds[d].lo, bounds[d].hi, mesh[d], "hyperrectangle grid"));
  }
  std::vector<Point> pts{Point{}};
  for (const auto& axis : axes) {
    std::vector<Point> next;
    next.reserve(pts.size() * axis.size());
    for (const auto& p : pts) {
      for (double x : axis) {
        Point q = p;
        q.push_back(x);
        next.push_back(std::move(q));
      }
    }
    pts = std::move(next);
  }
  return GridSpec(GridKind::hyperrectangle, std::move(pts), std::move(mesh), std::move(bounds));
}

GridSpec GridSpec::simplex(std::size_t n, double mesh) {
  if (n == 0) throw UsageError("simplex grid needs n >= 1");
  const long cells = static_cast<long>(divide_exactly(1.0, mesh, "simplex grid"));
  std::vector<std::vector<long>> lattice;
  std::vector<long> cur;
  enumerate_simplex(n, cells, cur, lattice);
  std::vector<Point> pts;
  pts.reserve(lattice.size());
  for (const auto& k : lattice) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = k[i] == cells ? 1.0 : static_cast<double>(k[i]) * mesh;
    pts.push_back(std::move(p));
  }
  return GridSpec(GridKind::simplex, std::move(pts), std::vector<double>(n, mesh),
                  std::vector<Bounds>(n, Bounds{0.0, 1.0}));
}

GridSpec GridSpec::sphere_time(std::size_t n, double angular_mesh, const std::vector<double>& times) {
  if (n < 2) throw UsageError("sphere x time grid needs n >= 2 components");
  if (!(angular_mesh > 0.0)) throw UsageError("angular mesh must be positive");
  if (times.empty()) throw UsageError("sphere x time grid needs at least one time point");
  const double pi = std::numbers::pi;
  const auto cells = static_cast<std::size_t>(std::ceil(pi / angular_mesh - 1e-12));
  const double h = pi / static_cast<double>(cells);
  std::vector<double> polar(cells + 1);
  for (std::size_t k = 0; k <= cells; ++k) polar[k] = static_cast<double>(k) * h;
  polar[cells] = pi;
  std::vector<double> azimuth(2 * cells);
  for (std::size_t k = 0; k < 2 * cells; ++k) azimuth[k] = static_cast<double>(k) * h;

  std::vector<Point> pts{Point{}};
  auto extend = [&pts](const std::vector<double>& axis) {
    std::vector<Point> next;
    for (const auto& p : pts) {
      for (double x : axis) {
        Point q = p;
        q.push_back(x);
        next.push_back(std::move(q));
      }
    }
    pts = std::move(next);
  };
  for (std::size_t d = 0; d + 2 < n; ++d) extend(polar);
  extend(azimuth);
  extend(times);

  std::vector<Bounds> bounds(n - 2, Bounds{0.0, pi});
  bounds.push_back({0.0, 2.0 * pi});
  const auto [tmin, tmax] = std::minmax_element(times.begin(), times.end());
  bounds.push_back({*tmin, *tmax});
  std::vector<double> mesh(n - 1, h);
  mesh.push_back(times.size() > 1 ? (*tmax - *tmin) / static_cast<double>(times.size() - 1) : 0.0);
  return from_points(GridKind::sphere_time, std::move(pts), std::move(mesh), std::move(bounds));
}

GridSpec GridSpec::from_points(GridKind kind, std::vector<Point> points, std::vector<double> mesh,
                               std::vector<Bounds> bounds) {
  if (points.empty()) throw UsageError("grid has no points");
  const std::size_t dim = bounds.size();
  if (dim == 0) throw UsageError("grid needs at least one axis");
  for (const auto& p : points) {
    if (p.size() != dim) throw UsageError("grid point has wrong dimension");
    for (std::size_t d = 0; d < dim; ++d) {
      if (!(p[d] >= bounds[d].lo - 1e-12 && p[d] <= bounds[d].hi + 1e-12)) {
        throw DomainError("grid point outside bounds on axis " + std::to_string(d));
      }
    }
    if (kind == GridKind::simplex && !is_simplex_point(p)) {
      throw DomainError("simplex grid point violates 0 <= t_1 <= ... <= t_n <= 1");
    }
  }
  std::sort(points.begin(), points.end());
  if (std::adjacent_find(points.begin(), points.end()) != points.end()) {
    throw DomainError("grid contains duplicate points");
  }
  return GridSpec(kind, std::move(points), std::move(mesh), std::move(bounds));
}

GridSpec GridSpec::refined(const std::vector<Point>& focus, double band, int levels, int ratio) const {
  if (kind_ == GridKind::sphere_time) throw UsageError("refinement is not supported on sphere x time grids");
  if (levels < 0 || ratio < 2) throw UsageError("refinement needs levels >= 0 and ratio >= 2");
  if (!(band > 0.0)) throw UsageError("refinement band must be positive");
  const std::size_t dim = dimension();
  long scale = 1;
  for (int l = 0; l < levels; ++l) scale *= ratio;

  // All points live on the integer lattice of spacing mesh / ratio^levels.
  std::vector<double> unit(dim);
  std::vector<long> top(dim);
  for (std::size_t d = 0; d < dim; ++d) {
    unit[d] = mesh_[d] / static_cast<double>(scale);
    top[d] = std::lround((bounds_[d].hi - bounds_[d].lo) / unit[d]);
  }
  std::set<std::vector<long>> lattice;
  for (const auto& p : points_) {
    std::vector<long> k(dim);
    for (std::size_t d = 0; d < dim; ++d) k[d] = std::lround((p[d] - bounds_[d].lo) / unit[d]);
    lattice.insert(std::move(k));
  }

  auto admissible = [&](const std::vector<long>& k) {
    if (kind_ != GridKind::simplex) return true;
    for (std::size_t d = 1; d < dim; ++d) {
      if (k[d] < k[d - 1]) return false;
    }
    return true;
  };

  // Odometer walk over the box lo..hi with the given stride.
  auto add_box = [&](const std::vector<long>& lo, const std::vector<long>& hi, long stride) {
    std::size_t added = 0;
    std::vector<long> k = lo;
    for (;;) {
      if (admissible(k) && lattice.insert(k).second) ++added;
      std::size_t d = dim;
      for (;;) {
        if (d == 0) return added;
        --d;
        k[d] += stride;
        if (k[d] <= hi[d]) break;
        k[d] = lo[d];
      }
    }
  };

  std::vector<RefinementLevel> schedule = refinement_;
  double radius = band;
  long step = scale;
  for (int l = 1; l <= levels; ++l) {
    step /= ratio;
    RefinementLevel info{l, mesh_[0] / std::pow(static_cast<double>(ratio), l), radius, 0};
    for (const auto& f : focus) {
      if (f.size() != dim) throw UsageError("refinement focus point has wrong dimension");
      std::vector<long> lo(dim), hi(dim);
      bool empty = false;
      for (std::size_t d = 0; d < dim; ++d) {
        const double c = (f[d] - bounds_[d].lo) / unit[d];
        const double r = radius / unit[d];
        const auto s = static_cast<double>(step);
        lo[d] = std::max(0L, static_cast<long>(std::ceil((c - r) / s - 1e-9)) * step);
        hi[d] = std::min(top[d], static_cast<long>(std::floor((c + r) / s + 1e-9)) * step);
        empty = empty || lo[d] > hi[d];
      }
      if (!empty) info.added += add_box(lo, hi, step);
    }
    schedule.push_back(info);
    radius /= static_cast<double>(ratio);
  }

  std::vector<Point> pts;
  pts.reserve(lattice.size());
  for (const auto& k : lattice) {
    Point p(dim);
    for (std::size_t d = 0; d < dim; ++d) {
      p[d] = k[d] == top[d] ? bounds_[d].hi : bounds_[d].lo + static_cast<double>(k[d]) * unit[d];
    }
    pts.push_back(std::move(p));
  }
  GridSpec out = from_points(kind_, std::move(pts), mesh_, bounds_);
  out.refinement_ = std::move(schedule);
  return out;
}

std::vector<std::size_t> GridSpec::indices_of(const GridSpec& sub) const {
  if (sub.dimension() != dimension()) throw UsageError("grids have different dimensions");
  constexpr double kKey = 1e9;
  std::map<std::vector<long long>, std::size_t> index;
  auto key = [](const Point& p) {
    std::vector<long long> k(p.size());
    for (std::size_t d = 0; d < p.size(); ++d) k[d] = std::llround(p[d] * kKey);
    return k;
  };
  for (std::size_t i = 0; i < points_.size(); ++i) index.emplace(key(points_[i]), i);
  std::vector<std::size_t> out;
  out.reserve(sub.size());
  for (const auto& p : sub.points()) {
    auto it = index.find(key(p));
    if (it == index.end()) throw UsageError("grid is not a subset of the reference grid");
    out.push_back(it->second);
  }
  return out;
}

double GridSpec::distance_to(const Point& p) const {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& q : points_) {
    double d = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) d = std::max(d, std::abs(q[i] - p[i]));
    best = std::min(best, d);
  }
  return best;
}

std::string GridSpec::summary() const {
  std::ostringstream os;
  os << to_string(kind_) << " dim=" << dimension() << " points=" << size() << " mesh=";
  for (std::size_t d = 0; d < mesh_.size(); ++d) os << (d ? "," : "") << mesh_[d];
  if (!refinement_.empty()) os << " refinement_levels=" << refinement_.size();
  return os.str();
}

}  // namespace gaussex
