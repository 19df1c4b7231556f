#include "gaussex/harness.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gaussex/error.hpp"

#ifndef GAUSSEX_VERSION
#define GAUSSEX_VERSION "0.0.0"
#endif

namespace gaussex {

std::string software_version() { return std::string("gaussex ") + GAUSSEX_VERSION; }

WilsonInterval wilson_interval(std::size_t k, std::size_t n, double z) {
  if (n == 0) throw UsageError("Wilson interval needs n > 0");
  const double nn = static_cast<double>(n);
  const double p = static_cast<double>(k) / nn;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = (p + z2 / (2.0 * nn)) / denom;
  const double half = z * std::sqrt(p * (1.0 - p) / nn + z2 / (4.0 * nn * nn)) / denom;
  return {std::max(0.0, std::min(center - half, p)), std::min(1.0, std::max(center + half, p))};
}

TailEstimate tail_from_sups(const std::vector<double>& sups, double u, const GridSpec& grid, std::uint64_t seed) {
  const auto k = static_cast<std::size_t>(std::count_if(sups.begin(), sups.end(), [u](double s) { return s > u; }));
  TailEstimate t;
  t.u = u;
  t.n_reps = sups.size();
  t.p_hat = static_cast<double>(k) / static_cast<double>(sups.size());
  const auto ci = wilson_interval(k, sups.size());
  t.ci_lo = ci.lo;
  t.ci_hi = ci.hi;
  t.grid = grid.summary();
  t.seed = seed;
  return t;
}

void check_optimizer_coverage(const FieldModel& model, const GridSpec& grid) {
  const double mesh = *std::max_element(grid.mesh().begin(), grid.mesh().end());
  const double d = model.coverage_distance(grid);
  if (d > 2.0 * mesh + 1e-12) {
    std::ostringstream os;
    os << "grid does not cover the optimizer set: nearest grid point is " << d << " away, allowed " << 2.0 * mesh;
    throw UsageError(os.str());
  }
}

std::vector<TailEstimate> estimate_tails(const FieldModel& model, const GridSpec& grid, const std::vector<double>& u,
                                         std::size_t n_reps, std::uint64_t seed, const Exec& exec) {
  if (n_reps == 0) throw UsageError("n_reps must be positive");
  check_optimizer_coverage(model, grid);
  const auto sups = model.sup_samples(grid, n_reps, seed, exec);
  std::vector<TailEstimate> out;
  for (double level : u) out.push_back(tail_from_sups(sups, level, grid, seed));
  return out;
}

TailEstimate estimate_tail(const FieldModel& model, const GridSpec& grid, double u, std::size_t n_reps,
                           std::uint64_t seed, const Exec& exec) {
  return estimate_tails(model, grid, {u}, n_reps, seed, exec).front();
}

std::vector<TailEstimate> estimate_tail_nested(const FieldModel& model, const GridSpec& fine,
                                               const std::vector<GridSpec>& subs, double u, std::size_t n_reps,
                                               std::uint64_t seed, const Exec& exec) {
  check_optimizer_coverage(model, fine);
  const auto sups = model.nested_sup_samples(fine, subs, n_reps, seed, exec);
  std::vector<TailEstimate> out;
  out.push_back(tail_from_sups(sups[0], u, fine, seed));
  for (std::size_t g = 0; g < subs.size(); ++g) out.push_back(tail_from_sups(sups[g + 1], u, subs[g], seed));
  return out;
}

double max_resolvable_u(const AsymptoticFormula& formula, std::size_t n_reps) {
  const double target = 10.0 / static_cast<double>(n_reps);
  // The formula decreases for large u; search upward from a level where it is resolvable.
  double lo = 0.5;
  if (formula.evaluate(lo) < target) return 0.0;
  double hi = lo;
  while (formula.evaluate(hi) >= target) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e3) return hi;
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    (formula.evaluate(mid) >= target ? lo : hi) = mid;
  }
  return lo;
}

ResultRecord ratio_table(const FieldModel& model, const AsymptoticFormula& formula, const std::vector<double>& u_levels,
                         const GridSpec& grid, std::size_t n_reps, std::uint64_t seed, const Exec& exec) {
  if (u_levels.empty()) throw UsageError("ratio table needs at least one u level");
  for (std::size_t i = 1; i < u_levels.size(); ++i) {
    if (!(u_levels[i] > u_levels[i - 1])) throw UsageError("u levels must be strictly increasing");
  }
  const double target = 10.0 / static_cast<double>(n_reps);
  if (formula.evaluate(u_levels.back()) < target) {
    std::ostringstream os;
    os << "u = " << u_levels.back() << " is not resolvable with " << n_reps
       << " replications (predicted p below 10 / n_reps); maximal feasible u is " << max_resolvable_u(formula, n_reps);
    throw UsageError(os.str());
  }
  const auto tails = estimate_tails(model, grid, u_levels, n_reps, seed, exec);

  ResultRecord rec;
  rec.software_version = software_version();
  rec.model = model.name();
  rec.grid = grid.summary();
  rec.refinement = grid.refinement();
  rec.n_reps = n_reps;
  rec.seed = seed;
  rec.formula = formula;
  for (const auto& t : tails) {
    RatioRow row;
    row.u = t.u;
    row.p_hat = t.p_hat;
    row.ci_lo = t.ci_lo;
    row.ci_hi = t.ci_hi;
    row.asymptotic = formula.evaluate(t.u);
    row.ratio = row.p_hat / row.asymptotic;
    row.ratio_lo = row.ci_lo / row.asymptotic;
    row.ratio_hi = row.ci_hi / row.asymptotic;
    row.mismatch = row.ratio_hi < 0.2 || row.ratio_lo > 5.0;
    if (row.mismatch) {
      std::ostringstream os;
      os << "model mismatch at u = " << row.u << ": ratio interval [" << row.ratio_lo << ", " << row.ratio_hi
         << "] excludes [0.2, 5]";
      rec.warnings.push_back(os.str());
    }
    rec.rows.push_back(row);
  }
  return rec;
}

}  // namespace gaussex
