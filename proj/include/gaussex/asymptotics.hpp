#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gaussex/constants.hpp"
#include "gaussex/field_models.hpp"

namespace gaussex {

/// Standard normal survival function.
double psi(double u);

/// Gamma function; DomainError for x <= 0.
double gamma_fn(double x);

/// Coordinate split for the product-form constant. Indices are 1-based.
struct LambdaPartition {
  std::vector<double> alpha;  ///< alpha_i, i = 1..n
  std::vector<double> beta;   ///< beta_i, i = 1..n (ignored on Lambda_0)
  std::vector<std::size_t> lambda0, lambda1, lambda2, lambda3;
  double vol_M = 1.0;
  std::vector<double> a;  ///< a_i, i = 1..n
  std::vector<double> b;  ///< b_i, i = 1..n

  std::size_t n() const noexcept { return alpha.size(); }

  /// Throws ModelError on overlapping/missing indices or misplaced alpha/beta orderings.
  void validate() const;
};

/// C u^exponent Psi(u / sigma*), with every factor of C itemized.
struct AsymptoticFormula {
  double constant_C = 1.0;
  double u_exponent = 0.0;
  double sigma_star = 1.0;
  std::string description;
  std::vector<std::pair<std::string, double>> factors;

  double evaluate(double u) const;
  double log_evaluate(double u) const;
};

/// Product-form constant for constant coefficients.
/// `pickands` covers Lambda_0 and Lambda_1; `piterbarg` covers Lambda_2 with drift a_i^-beta_i b_i.
AsymptoticFormula prop1_formula(const LambdaPartition& partition,
                                const std::map<std::size_t, ConstantEstimate>& piterbarg,
                                const std::map<std::size_t, ConstantEstimate>& pickands);

enum class PerfRegime { below_one, one, above_one };

/// The three performance-table regimes. Within 1e-9 of alpha = 1 the regime must be given.
/// `pickands` supplies H_{B^alpha} for alpha < 1 (a tabulated value is used when absent and known).
AsymptoticFormula perf_table_formula(const PerfTableSpec& spec, const std::optional<ConstantEstimate>& hw = std::nullopt,
                                     const std::optional<ConstantEstimate>& pickands = std::nullopt,
                                     std::optional<PerfRegime> regime = std::nullopt);

/// p_est must be a (generalized) Piterbarg estimate with drift b / a.
AsymptoticFormula chi_formula(const ChiSpec& spec, const ConstantEstimate& p_est);

}  // namespace gaussex
