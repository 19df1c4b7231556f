#include "gaussex/sampler.hpp"

#include <cmath>

#include "gaussex/error.hpp"

namespace gaussex {

Eigen::MatrixXd build_covariance_matrix(const CovarianceKernel& kernel, const GridSpec& grid) {
  const auto n = static_cast<Eigen::Index>(grid.size());
  Eigen::MatrixXd m(n, n);
  const auto& pts = grid.points();
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = j; i < n; ++i) {
      const double v = kernel(pts[static_cast<std::size_t>(i)], pts[static_cast<std::size_t>(j)]);
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return m;
}

namespace {

// Unblocked Cholesky used only to locate the failing pivot for diagnostics.
std::size_t failing_pivot(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    double d = a(k, k);
    for (Eigen::Index p = 0; p < k; ++p) d -= a(k, p) * a(k, p);
    if (!(d > 0.0)) return static_cast<std::size_t>(k);
    d = std::sqrt(d);
    a(k, k) = d;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      double s = a(i, k);
      for (Eigen::Index p = 0; p < k; ++p) s -= a(i, p) * a(k, p);
      a(i, k) = s / d;
    }
  }
  return static_cast<std::size_t>(n);
}

}  // namespace

CholeskyFactor cholesky_factor(const Eigen::MatrixXd& matrix, const JitterPolicy& policy) {
  if (matrix.rows() != matrix.cols()) throw UsageError("cholesky_factor: matrix is not square");
  const Eigen::Index n = matrix.rows();
  CholeskyFactor out;
  out.lower = Eigen::MatrixXd::Zero(n, n);
  if (n == 0) return out;

  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (matrix.row(i).cwiseAbs().maxCoeff() == 0.0) {
      out.degenerate.push_back(static_cast<std::size_t>(i));
    } else {
      keep.push_back(i);
    }
  }
  const auto k = static_cast<Eigen::Index>(keep.size());
  if (k == 0) return out;

  Eigen::MatrixXd reduced(k, k);
  for (Eigen::Index j = 0; j < k; ++j)
    for (Eigen::Index i = 0; i < k; ++i) reduced(i, j) = matrix(keep[i], keep[j]);

  // Scale uses the full trace / dim so that the reported jitter matches the input matrix.
  const double scale = matrix.trace() / static_cast<double>(n);
  double jitter = 0.0;
  for (double factor : policy.schedule) {
    jitter = factor * scale;
    Eigen::MatrixXd shifted = reduced;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    const Eigen::MatrixXd l = llt.matrixL();
    if (!l.allFinite()) continue;
    for (Eigen::Index j = 0; j < k; ++j)
      for (Eigen::Index i = j; i < k; ++i) out.lower(keep[i], keep[j]) = l(i, j);
    out.jitter = jitter;
    return out;
  }
  Eigen::MatrixXd shifted = reduced;
  shifted.diagonal().array() += jitter;
  const std::size_t pivot = failing_pivot(shifted);
  throw NotPositiveDefinite(pivot < keep.size() ? static_cast<std::size_t>(keep[pivot]) : pivot, jitter);
}

GaussianSampler::GaussianSampler(const Eigen::MatrixXd& covariance, const JitterPolicy& policy)
    : factor_(cholesky_factor(covariance, policy)) {}

GaussianSampler::GaussianSampler(const CovarianceKernel& kernel, const GridSpec& grid, const JitterPolicy& policy)
    : GaussianSampler(build_covariance_matrix(kernel, grid), policy) {}

SampleBatch sample_paths(const CovarianceKernel& kernel, const GridSpec& grid, std::size_t n_reps,
                         std::uint64_t seed, const Exec& exec) {
  if (n_reps == 0) throw UsageError("sample_paths: n_reps must be positive");
  const GaussianSampler sampler(kernel, grid);
  SampleBatch batch;
  batch.grid = std::make_shared<const GridSpec>(grid);
  batch.seed = seed;
  batch.values.resize(static_cast<Eigen::Index>(n_reps), static_cast<Eigen::Index>(grid.size()));
  sampler.for_each_block(n_reps, seed, exec, [&](std::size_t first, std::size_t count, const Eigen::MatrixXd& block) {
    batch.values.middleRows(static_cast<Eigen::Index>(first), static_cast<Eigen::Index>(count)) = block.transpose();
  });
  return batch;
}

}  // namespace gaussex
