#include "gaussex/constants.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "gaussex/error.hpp"
#include "gaussex/sampler.hpp"

namespace gaussex {

namespace {

// Standard normal level whose upper tail is 1e-4.
constexpr double kTruncationLevel = 3.7190164854556804;

long double pairwise_sum(const double* x, std::size_t n) {
  if (n <= 8) {
    long double s = 0.0L;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t h = n / 2;
  return pairwise_sum(x, h) + pairwise_sum(x + h, n - h);
}

std::size_t cells_of(double length, double mesh, const char* what) {
  const double c = length / mesh;
  const double r = std::round(c);
  if (r < 1.0 || std::abs(c - r) > 1e-9 * std::max(1.0, c)) {
    std::ostringstream os;
    os << what << ": mesh " << mesh << " does not divide " << length;
    throw UsageError(os.str());
  }
  return static_cast<std::size_t>(r);
}

ConstantEstimate finish(ConstantKind kind, const std::vector<double>& values, double scale) {
  const auto st = mean_stats(values);
  ConstantEstimate e;
  e.kind = kind;
  e.value = st.mean / scale;
  e.std_error = st.std_error / scale;
  e.truncation_sensitivity = st.truncation_sensitivity;
  e.n_reps = values.size();
  return e;
}

}  // namespace

std::string to_string(ConstantKind kind) {
  switch (kind) {
    case ConstantKind::pickands: return "pickands";
    case ConstantKind::piterbarg: return "piterbarg";
    case ConstantKind::generalized_piterbarg: return "generalized_piterbarg";
    case ConstantKind::h_w: return "h_w";
  }
  return "unknown";
}

ConstantKind constant_kind_from_string(const std::string& name) {
  for (ConstantKind k : {ConstantKind::pickands, ConstantKind::piterbarg, ConstantKind::generalized_piterbarg,
                         ConstantKind::h_w}) {
    if (to_string(k) == name) return k;
  }
  throw UsageError("unknown constant kind '" + name + "'");
}

MeanStats mean_stats(const std::vector<double>& values) {
  MeanStats st;
  const std::size_t n = values.size();
  if (n == 0) return st;
  const long double mean = pairwise_sum(values.data(), n) / static_cast<long double>(n);
  std::vector<double> sq(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long double d = values[i] - mean;
    sq[i] = static_cast<double>(d * d);
  }
  st.mean = static_cast<double>(mean);
  if (n > 1) {
    const long double var = pairwise_sum(sq.data(), n) / static_cast<long double>(n - 1);
    st.std_error = static_cast<double>(std::sqrt(var / static_cast<long double>(n)));
  }
  std::vector<double> sorted = values;
  const auto q = static_cast<std::size_t>(std::floor(0.999 * static_cast<double>(n - 1)));
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(q), sorted.end());
  const double cap = sorted[q];
  std::vector<double> clipped(n);
  for (std::size_t i = 0; i < n; ++i) clipped[i] = std::min(values[i], cap);
  const long double cmean = pairwise_sum(clipped.data(), n) / static_cast<long double>(n);
  st.truncation_sensitivity = mean != 0.0L ? static_cast<double>((mean - cmean) / mean) : 0.0;
  return st;
}

std::vector<std::vector<double>> sup_exponential_samples(const CovarianceKernel& kernel, const GridSpec& grid,
                                                         const std::function<double(PointView)>& drift,
                                                         const std::vector<std::vector<std::size_t>>& windows,
                                                         std::size_t n_reps, std::uint64_t seed, const Exec& exec) {
  if (n_reps == 0) throw UsageError("n_reps must be positive");
  std::vector<std::vector<Eigen::Index>> idx;
  if (windows.empty()) {
    idx.emplace_back(static_cast<std::size_t>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k) idx[0][k] = static_cast<Eigen::Index>(k);
  }
  for (const auto& w : windows) {
    std::vector<Eigen::Index> ix;
    for (std::size_t k : w) {
      if (k >= grid.size()) throw UsageError("window index outside the grid");
      ix.push_back(static_cast<Eigen::Index>(k));
    }
    idx.push_back(std::move(ix));
  }
  Eigen::VectorXd d(static_cast<Eigen::Index>(grid.size()));
  for (std::size_t k = 0; k < grid.size(); ++k) d(static_cast<Eigen::Index>(k)) = drift(grid.point(k));

  const GaussianSampler sampler(kernel, grid);
  std::vector<std::vector<double>> out(idx.size(), std::vector<double>(n_reps));
  const double root2 = std::numbers::sqrt2;
  sampler.for_each_block(n_reps, seed, exec, [&](std::size_t first, std::size_t count, const Eigen::MatrixXd& block) {
    Eigen::VectorXd e(block.rows());
    for (std::size_t r = 0; r < count; ++r) {
      e = root2 * block.col(static_cast<Eigen::Index>(r)) - d;
      for (std::size_t g = 0; g < idx.size(); ++g) {
        double best = -std::numeric_limits<double>::infinity();
        for (Eigen::Index k : idx[g]) best = std::max(best, e(k));
        out[g][first + r] = std::exp(best);
      }
    }
  });
  return out;
}

ConstantEstimate pickands_estimate(double alpha, double lambda, double mesh, std::size_t n_reps, std::uint64_t seed,
                                   bool extrapolated, const Exec& exec) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("Pickands alpha must lie in (0, 2]");
  if (!(lambda >= 1.0)) throw UsageError("Pickands horizon lambda must be >= 1");
  if (!(mesh > 0.0 && mesh <= 0.1)) throw UsageError("Pickands mesh must lie in (0, 0.1]");
  const std::size_t cells = cells_of(lambda, mesh, "pickands_estimate");
  if (extrapolated && cells % 2 != 0) throw UsageError("pickands_estimate: mesh must divide lambda / 2");
  const auto grid = GridSpec::interval(0.0, lambda, mesh);
  auto drift = [alpha](PointView t) { return std::pow(t[0], alpha); };

  std::vector<std::vector<std::size_t>> windows(1);
  for (std::size_t k = 0; k <= cells; ++k) windows[0].push_back(k);
  if (extrapolated) {
    windows.emplace_back();
    for (std::size_t k = 0; k <= cells / 2; ++k) windows[1].push_back(k);
  }
  const auto sups = sup_exponential_samples(fbm_kernel(alpha), grid, drift, windows, n_reps, seed, exec);

  ConstantEstimate e;
  if (extrapolated) {
    const double half = lambda / 2.0;
    std::vector<double> diff(n_reps);
    for (std::size_t r = 0; r < n_reps; ++r) diff[r] = sups[0][r] - sups[1][r];
    e = finish(ConstantKind::pickands, diff, half);
  } else {
    e = finish(ConstantKind::pickands, sups[0], lambda);
  }
  e.lambda = lambda;
  e.mesh = mesh;
  e.extrapolated = extrapolated;
  e.alpha = alpha;
  e.lambda_power = 1.0;
  e.seed = seed;
  return e;
}

double piterbarg_required_horizon(double alpha, double b) {
  // Y(S) ~ S^(alpha/2) N(0,1), so the integrand at S exceeds 1 with probability
  // Psi((1 + b) S^(alpha/2) / sqrt 2); require that to be at most 1e-4.
  return std::pow(kTruncationLevel * std::numbers::sqrt2 / (1.0 + b), 2.0 / alpha);
}

ConstantEstimate generalized_piterbarg_estimate(const CovarianceKernel& y_kernel, double alpha, double b,
                                                double horizon, double mesh, std::size_t n_reps, std::uint64_t seed,
                                                const Exec& exec) {
  if (!(alpha > 0.0 && alpha <= 2.0)) throw DomainError("Piterbarg alpha must lie in (0, 2]");
  if (!(b > 0.0)) throw UsageError("Piterbarg drift b must be positive");
  if (y_kernel.dimension() != 1) throw UsageError("Piterbarg-type constants need a one-dimensional Y");
  if (auto h = y_kernel.self_similar_index(); h && std::abs(*h - alpha / 2.0) > 1e-12) {
    throw UsageError("Y kernel self-similarity index does not match alpha / 2");
  }
  const double need = piterbarg_required_horizon(alpha, b);
  if (horizon < need * (1.0 - 1e-12)) {
    std::ostringstream os;
    os << "horizon S = " << horizon << " fails the truncation guard; need S >= " << need;
    throw UsageError(os.str());
  }
  if (!(mesh > 0.0 && mesh <= 0.1)) throw UsageError("Piterbarg mesh must lie in (0, 0.1]");
  cells_of(horizon, mesh, "piterbarg_estimate");
  const auto grid = GridSpec::interval(0.0, horizon, mesh);
  auto drift = [alpha, b](PointView t) { return (1.0 + b) * std::pow(t[0], alpha); };
  const auto sups = sup_exponential_samples(y_kernel, grid, drift, {}, n_reps, seed, exec);
  auto e = finish(ConstantKind::generalized_piterbarg, sups[0], 1.0);
  e.lambda = horizon;
  e.mesh = mesh;
  e.alpha = alpha;
  e.drift = b;
  e.lambda_power = 0.0;
  e.seed = seed;
  return e;
}

ConstantEstimate piterbarg_estimate(double alpha, double b, double horizon, double mesh, std::size_t n_reps,
                                    std::uint64_t seed, const Exec& exec) {
  auto e = generalized_piterbarg_estimate(fbm_kernel(alpha), alpha, b, horizon, mesh, n_reps, seed, exec);
  e.kind = ConstantKind::piterbarg;
  return e;
}

ConstantEstimate hw_estimate_with_drift(const PerfTableSpec& spec, double lambda, double mesh, std::size_t n_reps,
                                        std::uint64_t seed, const std::function<double(PointView)>& drift,
                                        const Exec& exec) {
  if (spec.alpha() != 1.0) throw UsageError("H_W is defined for alpha = 1 only");
  if (spec.n() > 3) throw UsageError("H_W estimation is limited to n <= 3 (cost guard)");
  if (!(lambda >= 1.0)) throw UsageError("H_W horizon lambda must be >= 1");
  const std::size_t cells = cells_of(lambda, mesh, "hw_estimate");
  const double points = std::pow(static_cast<double>(cells + 1), static_cast<double>(spec.n()));
  if (points > static_cast<double>(kMaxHwPoints)) {
    std::ostringstream os;
    os << "H_W grid would have " << points << " points; the limit is " << kMaxHwPoints;
    throw UsageError(os.str());
  }
  const auto grid = GridSpec::hyperrectangle(std::vector<Bounds>(spec.n(), Bounds{0.0, lambda}),
                                             std::vector<double>(spec.n(), mesh));
  const auto sups = sup_exponential_samples(w_kernel(spec), grid, drift, {}, n_reps, seed, exec);
  const double power = static_cast<double>(spec.m()) - 1.0;
  auto e = finish(ConstantKind::h_w, sups[0], std::pow(lambda, power));
  e.lambda = lambda;
  e.mesh = mesh;
  e.alpha = 1.0;
  e.lambda_power = power;
  e.seed = seed;
  return e;
}

ConstantEstimate hw_estimate(const PerfTableSpec& spec, double lambda, double mesh, std::size_t n_reps,
                             std::uint64_t seed, const Exec& exec) {
  auto drift = [](PointView x) {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
  };
  return hw_estimate_with_drift(spec, lambda, mesh, n_reps, seed, drift, exec);
}

std::vector<KnownConstant> known_constants() {
  std::vector<KnownConstant> table{
      {ConstantKind::pickands, "alpha=1", 1.0, "Brownian motion: H = 1"},
      {ConstantKind::pickands, "alpha=2", 1.0 / std::sqrt(std::numbers::pi), "B(t) = t N: H = pi^(-1/2)"},
  };
  for (double c : {0.5, 1.0, 2.0, 4.0}) {
    std::ostringstream os;
    os << "alpha=1,b=" << c;
    table.push_back({ConstantKind::piterbarg, os.str(), 1.0 + 1.0 / c, "Brownian motion: P^c = 1 + 1/c"});
  }
  return table;
}

std::optional<double> lookup_known(ConstantKind kind, double alpha, double b) {
  if (kind == ConstantKind::pickands) {
    if (alpha == 1.0) return 1.0;
    if (alpha == 2.0) return 1.0 / std::sqrt(std::numbers::pi);
  }
  if (kind == ConstantKind::piterbarg && alpha == 1.0 && b > 0.0) return 1.0 + 1.0 / b;
  return std::nullopt;
}

ConstantEstimate lambda_extrapolate(const std::vector<ConstantEstimate>& estimates) {
  if (estimates.size() < 2) throw UsageError("lambda extrapolation needs at least two estimates");
  const auto& first = estimates.front();
  for (std::size_t i = 1; i < estimates.size(); ++i) {
    const auto& e = estimates[i];
    if (e.kind != first.kind) throw UsageError("lambda extrapolation got estimates of different kinds");
    if (std::abs(e.mesh - first.mesh) > 1e-12 * first.mesh) {
      throw UsageError("lambda extrapolation got estimates with different meshes");
    }
    if (!(e.lambda > estimates[i - 1].lambda)) throw UsageError("lambda extrapolation needs increasing lambda");
  }
  ConstantEstimate out = estimates.back();
  out.extrapolated = true;
  if (first.kind == ConstantKind::piterbarg || first.kind == ConstantKind::generalized_piterbarg) return out;

  const auto& lo = estimates[estimates.size() - 2];
  const auto& hi = estimates.back();
  const double d = hi.lambda_power;
  const double w1 = std::pow(lo.lambda, d);
  const double w2 = std::pow(hi.lambda, d);
  out.value = (w2 * hi.value - w1 * lo.value) / (w2 - w1);
  out.std_error = std::hypot(w2 * hi.std_error, w1 * lo.std_error) / (w2 - w1);
  return out;
}

}  // namespace gaussex
