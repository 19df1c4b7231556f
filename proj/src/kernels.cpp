#include "gaussex/kernels.hpp"

#include <array>
#include <cmath>
#include <string>

#include "gaussex/error.hpp"

namespace gaussex {

namespace {

void check_fbm_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0)) {
    throw DomainError("fBM index alpha must lie in (0, 2], got " + std::to_string(alpha));
  }
}

void check_nonnegative(double s, double t) {
  if (!(s >= 0.0 && t >= 0.0)) {
    throw DomainError("time arguments must be nonnegative");
  }
}

}  // namespace

double fbm_covariance(double alpha, double s, double t) {
  check_fbm_alpha(alpha);
  check_nonnegative(s, t);
  return 0.5 * (std::pow(t, alpha) + std::pow(s, alpha) - std::pow(std::abs(t - s), alpha));
}

double subfbm_covariance(double alpha, double s, double t) {
  if (!(alpha > 0.0 && alpha < 2.0)) {
    throw DomainError("sub-fBM index alpha must lie in (0, 2), got " + std::to_string(alpha));
  }
  check_nonnegative(s, t);
  const double norm = 2.0 - std::pow(2.0, alpha - 1.0);
  const double raw = std::pow(s, alpha) + std::pow(t, alpha) -
                     0.5 * (std::pow(s + t, alpha) + std::pow(std::abs(s - t), alpha));
  return raw / norm;
}

double fbm_increment_difference_variance(double alpha, double a1, double b1, double a2, double b2) {
  check_fbm_alpha(alpha);
  // Var(sum c_k B(p_k)) = -1/2 sum_{k,l} c_k c_l |p_k - p_l|^alpha whenever sum c_k = 0.
  const std::array<double, 4> p{b1, a1, b2, a2};
  const std::array<double, 4> c{1.0, -1.0, -1.0, 1.0};
  double acc = 0.0;
  for (std::size_t k = 0; k < 4; ++k) {
    for (std::size_t l = k + 1; l < 4; ++l) {
      acc -= c[k] * c[l] * std::pow(std::abs(p[k] - p[l]), alpha);
    }
  }
  return acc;
}

double fbm_increment_covariance(double alpha, double a1, double b1, double a2, double b2) {
  return fbm_covariance(alpha, b1, b2) - fbm_covariance(alpha, b1, a2) -
         fbm_covariance(alpha, a1, b2) + fbm_covariance(alpha, a1, a2);
}

CovarianceKernel::CovarianceKernel(std::string name, std::size_t dimension, Fn fn,
                                   std::optional<double> self_similar_index)
    : name_(std::move(name)),
      dimension_(dimension),
      fn_(std::move(fn)),
      self_similar_index_(self_similar_index) {
  if (dimension_ == 0) throw UsageError("kernel dimension must be positive");
  if (!fn_) throw UsageError("kernel function is empty");
}

double CovarianceKernel::eval(double s, double t) const {
  if (dimension_ != 1) throw UsageError("scalar eval on a kernel of dimension " + std::to_string(dimension_));
  const std::array<double, 1> ps{s};
  const std::array<double, 1> pt{t};
  return fn_(ps, pt);
}

CovarianceKernel fbm_kernel(double alpha) {
  check_fbm_alpha(alpha);
  return CovarianceKernel(
      "fbm", 1, [alpha](PointView s, PointView t) { return fbm_covariance(alpha, s[0], t[0]); },
      alpha / 2.0);
}

CovarianceKernel subfbm_kernel(double alpha) {
  // Validate eagerly rather than on first evaluation.
  subfbm_covariance(alpha, 1.0, 1.0);
  return CovarianceKernel(
      "subfbm", 1, [alpha](PointView s, PointView t) { return subfbm_covariance(alpha, s[0], t[0]); },
      alpha / 2.0);
}

CovarianceKernel self_similar_kernel(const std::string& name, double alpha) {
  if (name == "fbm") return fbm_kernel(alpha);
  if (name == "subfbm") return subfbm_kernel(alpha);
  throw UsageError("unknown self-similar kernel '" + name + "' (expected fbm or subfbm)");
}

}  // namespace gaussex
