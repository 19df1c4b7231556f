#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gaussex/field_models.hpp"
#include "gaussex/grid.hpp"
#include "gaussex/kernels.hpp"
#include "gaussex/parallel.hpp"

namespace gaussex {

enum class ConstantKind { pickands, piterbarg, generalized_piterbarg, h_w };
std::string to_string(ConstantKind kind);
ConstantKind constant_kind_from_string(const std::string& name);

struct ConstantEstimate {
  ConstantKind kind = ConstantKind::pickands;
  double value = 0.0;
  double std_error = 0.0;
  double lambda = 0.0;  ///< horizon (lambda, or S for Piterbarg-type constants)
  double mesh = 0.0;
  std::size_t n_reps = 0;
  bool extrapolated = false;
  double alpha = 1.0;
  double drift = 0.0;          ///< b for Piterbarg-type constants
  double lambda_power = 1.0;   ///< normalization exponent: value = E sup / lambda^power
  double truncation_sensitivity = 0.0;  ///< relative drop of the mean when clipped at its 0.999 quantile
  std::uint64_t seed = 0;
};

/// Mean and standard error with a fixed pairwise summation tree in extended precision.
struct MeanStats {
  double mean = 0.0;
  double std_error = 0.0;
  double truncation_sensitivity = 0.0;
};
MeanStats mean_stats(const std::vector<double>& values);

/// Per replication sup over the grid of exp(sqrt(2) X(p) - drift(p)), for X with the kernel's law.
/// One result per entry of `windows` (index lists into the grid); no windows means the whole grid.
std::vector<std::vector<double>> sup_exponential_samples(const CovarianceKernel& kernel, const GridSpec& grid,
                                                         const std::function<double(PointView)>& drift,
                                                         const std::vector<std::vector<std::size_t>>& windows,
                                                         std::size_t n_reps, std::uint64_t seed,
                                                         const Exec& exec = {});

/// lambda^-1 E sup_[0,lambda] exp(sqrt(2) B(t) - t^alpha). With `extrapolated`, the
/// paired slope (E sup_[0,lambda] - E sup_[0,lambda/2]) / (lambda/2) from the same paths.
ConstantEstimate pickands_estimate(double alpha, double lambda, double mesh, std::size_t n_reps, std::uint64_t seed,
                                   bool extrapolated = false, const Exec& exec = {});

/// Smallest horizon S passing the truncation guard for drift (1 + b) t^alpha.
double piterbarg_required_horizon(double alpha, double b);

ConstantEstimate piterbarg_estimate(double alpha, double b, double horizon, double mesh, std::size_t n_reps,
                                    std::uint64_t seed, const Exec& exec = {});

/// E sup_[0,S] exp(sqrt(2) Y(t) - (1 + b) t^alpha) for a self-similar Y of index alpha / 2.
ConstantEstimate generalized_piterbarg_estimate(const CovarianceKernel& y_kernel, double alpha, double b,
                                                double horizon, double mesh, std::size_t n_reps, std::uint64_t seed,
                                                const Exec& exec = {});

/// Largest number of grid points hw_estimate accepts.
inline constexpr std::size_t kMaxHwPoints = 6000;

/// lambda^-(m-1) E sup_[0,lambda]^n exp(sqrt(2) W(x) - sum_{i != k*} x_i).
ConstantEstimate hw_estimate(const PerfTableSpec& spec, double lambda, double mesh, std::size_t n_reps,
                             std::uint64_t seed, const Exec& exec = {});

/// H_W with a caller-supplied drift functional; experimental beyond the built-in drifts.
ConstantEstimate hw_estimate_with_drift(const PerfTableSpec& spec, double lambda, double mesh, std::size_t n_reps,
                                        std::uint64_t seed, const std::function<double(PointView)>& drift,
                                        const Exec& exec = {});

struct KnownConstant {
  ConstantKind kind;
  std::string parameters;
  double value;
  std::string source;
};

std::vector<KnownConstant> known_constants();

/// Exact value when one is tabulated: Pickands at alpha in {1, 2}, Piterbarg at alpha = 1.
std::optional<double> lookup_known(ConstantKind kind, double alpha, double b = 0.0);

/// Two-point slope for Pickands-type kinds, last value for Piterbarg-type kinds.
ConstantEstimate lambda_extrapolate(const std::vector<ConstantEstimate>& estimates);

}  // namespace gaussex
