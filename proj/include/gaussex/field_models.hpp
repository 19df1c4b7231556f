#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "gaussex/grid.hpp"
#include "gaussex/kernels.hpp"
#include "gaussex/parallel.hpp"

namespace gaussex {

// ---------------------------------------------------------------------------
// Performance table Z(t) = sum_{i=1}^{n+1} a_i (B_i(t_i) - B_i(t_{i-1})) on the
// ordered simplex, t_0 = 0, t_{n+1} = 1, with independent fBMs B_i of index alpha.

/// Weights are rescaled so that max a_i = 1. Index sets use 1-based positions.
class PerfTableSpec {
 public:
  PerfTableSpec(std::size_t n, double alpha, std::vector<double> a);

  std::size_t n() const noexcept { return n_; }
  double alpha() const noexcept { return alpha_; }
  const std::vector<double>& a() const noexcept { return a_; }
  double weight(std::size_t i) const { return a_.at(i - 1); }

  bool in_N(std::size_t i) const { return weight(i) == 1.0; }
  const std::vector<std::size_t>& N() const noexcept { return N_; }
  const std::vector<std::size_t>& Nc() const noexcept { return Nc_; }
  std::size_t m() const noexcept { return N_.size(); }
  std::size_t k_star() const noexcept { return N_.back(); }

 private:
  std::size_t n_;
  double alpha_;
  std::vector<double> a_;
  std::vector<std::size_t> N_;
  std::vector<std::size_t> Nc_;
};

/// Throws DomainError unless 0 <= t_1 <= ... <= t_n <= 1.
void require_simplex_point(PointView t, std::size_t n);

double perf_cov(const PerfTableSpec& spec, PointView s, PointView t);
double perf_variance(const PerfTableSpec& spec, PointView t);

/// 1 - r(s,t), evaluated without forming r.
double perf_one_minus_corr(const PerfTableSpec& spec, PointView s, PointView t);

CovarianceKernel perf_kernel(const PerfTableSpec& spec);

enum class OptimizerKind { unique_point, positive_measure_set, finite_point_set };
std::string to_string(OptimizerKind kind);

struct OptimizerReport {
  OptimizerKind kind = OptimizerKind::unique_point;
  std::vector<Point> points;  ///< the optimizer(s), or a lattice of M when kind is positive_measure_set
  double sigma_star = 1.0;
  std::size_t m = 1;
  std::size_t manifold_dim = 0;
};

/// `manifold_mesh` controls the lattice materialized for the alpha = 1 case.
OptimizerReport perf_optimizer(const PerfTableSpec& spec, double manifold_mesh = 0.05);

/// Upper bound on the sup-norm distance from t to the optimizer set.
double optimizer_distance(const PerfTableSpec& spec, const OptimizerReport& report, PointView t);

enum class Expansion { var1, r1, sigma21, r2, var3 };
std::string to_string(Expansion e);
Expansion expansion_from_string(const std::string& name);

/// Expansions that have a meaning in the table's alpha regime.
std::vector<Expansion> applicable_expansions(const PerfTableSpec& spec);

/// Leading-order approximations of 1 - sigma/sigma* and 1 - r near the optimizer set.
double expansion_value(const PerfTableSpec& spec, Expansion e, PointView t, PointView s = {},
                       std::size_t corner = 0);
/// The exact counterpart of expansion_value.
double expansion_exact(const PerfTableSpec& spec, Expansion e, PointView t, PointView s = {});

/// max over seed-fixed probes within Euclidean distance delta of the optimizer set of
/// |expansion / exact - 1|. An empty `which` means every applicable expansion.
std::map<Expansion, double> check_expansions(const PerfTableSpec& spec, double delta, std::size_t probe_count,
                                             std::uint64_t seed = 20240601, std::vector<Expansion> which = {});

// alpha = 1 coordinates: x = (x_j)_{j != k*}, length n.
Point alpha1_transform(const PerfTableSpec& spec, PointView x);
Point alpha1_inverse(const PerfTableSpec& spec, PointView t);

/// s_0(x), ..., s_{n+1}(x) of the limiting field W.
std::vector<double> w_coordinates(const PerfTableSpec& spec, PointView x);

/// E(W(x) - W(y))^2 from the Brownian representation of W.
double w_increment_var(const PerfTableSpec& spec, PointView x, PointView y);

/// The same quantity written in the min-form of the limiting correlation.
double yrr_min_form(const PerfTableSpec& spec, PointView x, PointView y);

CovarianceKernel w_kernel(const PerfTableSpec& spec);

/// n^(m-1) prod_{N^c} (1 + 2n / (1 - a_i^2)).
double hw_upper_bound(const PerfTableSpec& spec);

// ---------------------------------------------------------------------------
// Chi process built from n i.i.d. copies of X with sd 1/(1 + b t^alpha) and
// correlation 1 - a Var(Y(t) - Y(s)).

struct ChiSpec {
  std::size_t n = 2;
  double alpha = 1.0;
  double a = 1.0;
  double b = 1.0;
  std::string y_name = "fbm";
  CovarianceKernel y_kernel = fbm_kernel(1.0);
  double gamma = 1.0;
  double c_Y = 1.0;
};

/// Validates the parameters and fills y_kernel, gamma and c_Y for the named Y.
ChiSpec make_chi_spec(std::size_t n, double alpha, double a, double b, const std::string& y_name = "fbm");

double chi_sigma(const ChiSpec& spec, double t);
double chi_corr(const ChiSpec& spec, double s, double t);
CovarianceKernel chi_x_kernel(const ChiSpec& spec);

Point spherical_map(PointView theta);

/// Covariance of Z(theta, t) = sum X_i(t) v_i(theta); points are (theta..., t).
double chi_cov(const ChiSpec& spec, PointView p, PointView q);

std::vector<double> chi_sup_sample(const ChiSpec& spec, const GridSpec& time_grid, std::size_t n_reps,
                                   std::uint64_t seed, const Exec& exec = {});

/// Per replication: (sup chi over time grid, sup Z over the sphere x time grid), same X draws.
std::vector<std::pair<double, double>> chi_sphere_pairs(const ChiSpec& spec, const GridSpec& sphere_time_grid,
                                                        std::size_t n_reps, std::uint64_t seed,
                                                        const Exec& exec = {});

// ---------------------------------------------------------------------------

/// A Gaussian field with a known variance maximizer, ready for tail estimation.
struct CustomModel {
  std::string name;
  CovarianceKernel kernel;
  std::vector<Point> optimizer_points;
};

class FieldModel {
 public:
  using Variant = std::variant<PerfTableSpec, ChiSpec, CustomModel>;

  explicit FieldModel(Variant v) : v_(std::move(v)) {}

  const Variant& spec() const noexcept { return v_; }
  std::string name() const;
  OptimizerReport optimizer() const;

  /// Upper bound on the distance from the grid to the optimizer set.
  double coverage_distance(const GridSpec& grid) const;

  /// Supremum of the field over the grid for each replication.
  std::vector<double> sup_samples(const GridSpec& grid, std::size_t n_reps, std::uint64_t seed,
                                  const Exec& exec = {}) const;

  /// Suprema over nested sub-grids of `fine`, all computed from the same draws on `fine`.
  std::vector<std::vector<double>> nested_sup_samples(const GridSpec& fine, const std::vector<GridSpec>& subs,
                                                      std::size_t n_reps, std::uint64_t seed,
                                                      const Exec& exec = {}) const;

 private:
  Variant v_;
};

}  // namespace gaussex
