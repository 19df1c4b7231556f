#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gaussex {

using Point = std::vector<double>;
using PointView = std::span<const double>;

/// fBM covariance (|s|^a + |t|^a - |t-s|^a) / 2 for a in (0, 2].
double fbm_covariance(double alpha, double s, double t);

/// Sub-fractional Brownian motion covariance normalized so that C(1,1) = 1.
/// alpha in (0, 2); the normalizer 2 - 2^(alpha-1) vanishes at alpha = 2.
double subfbm_covariance(double alpha, double s, double t);

/// Var[(B(b1) - B(a1)) - (B(b2) - B(a2))] for a standard fBM B with index alpha.
/// Evaluated through the variogram so that short increments do not cancel.
double fbm_increment_difference_variance(double alpha, double a1, double b1, double a2, double b2);

/// Cov[B(b1) - B(a1), B(b2) - B(a2)] from four covariance evaluations.
double fbm_increment_covariance(double alpha, double a1, double b1, double a2, double b2);

/// A symmetric positive-semidefinite function on R^dimension.
class CovarianceKernel {
 public:
  using Fn = std::function<double(PointView, PointView)>;

  CovarianceKernel(std::string name, std::size_t dimension, Fn fn,
                   std::optional<double> self_similar_index = std::nullopt);

  double operator()(PointView s, PointView t) const { return fn_(s, t); }
  double eval(PointView s, PointView t) const { return fn_(s, t); }

  /// Convenience for one-dimensional kernels.
  double eval(double s, double t) const;

  const std::string& name() const noexcept { return name_; }
  std::size_t dimension() const noexcept { return dimension_; }

  /// Hurst-type index H with Y(rt) = r^H Y(t) in law, when the kernel is self-similar.
  std::optional<double> self_similar_index() const noexcept { return self_similar_index_; }

 private:
  std::string name_;
  std::size_t dimension_;
  Fn fn_;
  std::optional<double> self_similar_index_;
};

CovarianceKernel fbm_kernel(double alpha);
CovarianceKernel subfbm_kernel(double alpha);

/// Builds a one-dimensional self-similar kernel by name ("fbm" or "subfbm").
CovarianceKernel self_similar_kernel(const std::string& name, double alpha);

}  // namespace gaussex
