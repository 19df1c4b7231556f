#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "gaussex/asymptotics.hpp"
#include "gaussex/constants.hpp"
#include "gaussex/field_models.hpp"
#include "gaussex/grid.hpp"
#include "gaussex/parallel.hpp"

namespace gaussex {

struct WilsonInterval {
  double lo = 0.0;
  double hi = 1.0;
};

/// 95% Wilson score interval for k successes out of n.
WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054);

struct TailEstimate {
  double u = 0.0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  std::size_t n_reps = 0;
  std::string grid;
  std::uint64_t seed = 0;
};

/// Empirical P(max over grid > u) and its Wilson interval, from sup samples.
TailEstimate tail_from_sups(const std::vector<double>& sups, double u, const GridSpec& grid, std::uint64_t seed);

/// Throws UsageError unless some grid point lies within 2 x mesh of the optimizer set.
void check_optimizer_coverage(const FieldModel& model, const GridSpec& grid);

TailEstimate estimate_tail(const FieldModel& model, const GridSpec& grid, double u, std::size_t n_reps,
                           std::uint64_t seed, const Exec& exec = {});

/// One sampling pass, one estimate per level.
std::vector<TailEstimate> estimate_tails(const FieldModel& model, const GridSpec& grid, const std::vector<double>& u,
                                         std::size_t n_reps, std::uint64_t seed, const Exec& exec = {});

/// Estimates on `fine` and on each nested sub-grid, sharing the Gaussian draws.
std::vector<TailEstimate> estimate_tail_nested(const FieldModel& model, const GridSpec& fine,
                                               const std::vector<GridSpec>& subs, double u, std::size_t n_reps,
                                               std::uint64_t seed, const Exec& exec = {});

struct RatioRow {
  double u = 0.0;
  double p_hat = 0.0;
  double ci_lo = 0.0;
  double ci_hi = 0.0;
  double asymptotic = 0.0;
  double ratio = 0.0;
  double ratio_lo = 0.0;
  double ratio_hi = 0.0;
  bool mismatch = false;  ///< ratio interval lies entirely outside [0.2, 5]
};

struct ResultRecord {
  std::string config_hash;
  std::string timestamp;
  std::string software_version;
  std::string model;
  std::string grid;
  std::vector<RefinementLevel> refinement;
  std::size_t n_reps = 0;
  std::uint64_t seed = 0;
  AsymptoticFormula formula;
  std::vector<ConstantEstimate> constants;
  std::vector<RatioRow> rows;
  std::vector<std::string> warnings;
};

/// Largest u with formula.evaluate(u) >= 10 / n_reps.
double max_resolvable_u(const AsymptoticFormula& formula, std::size_t n_reps);

ResultRecord ratio_table(const FieldModel& model, const AsymptoticFormula& formula, const std::vector<double>& u_levels,
                         const GridSpec& grid, std::size_t n_reps, std::uint64_t seed, const Exec& exec = {});

std::string software_version();

}  // namespace gaussex
