#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include "gaussex/grid.hpp"
#include "gaussex/kernels.hpp"
#include "gaussex/parallel.hpp"
#include "gaussex/rng.hpp"

namespace gaussex {

/// Diagonal jitter escalation, expressed as multiples of trace / dim.
struct JitterPolicy {
  std::vector<double> schedule{0.0, 1e-12, 1e-10, 1e-8};
};

/// Lower factor with L L^T = A + jitter I on all non-degenerate coordinates.
/// Degenerate coordinates (identically zero rows of A) get an all-zero row and column.
struct CholeskyFactor {
  Eigen::MatrixXd lower;
  double jitter = 0.0;
  std::vector<std::size_t> degenerate;
};

Eigen::MatrixXd build_covariance_matrix(const CovarianceKernel& kernel, const GridSpec& grid);

/// Throws NotPositiveDefinite (with the failing pivot) if the largest jitter does not suffice.
CholeskyFactor cholesky_factor(const Eigen::MatrixXd& matrix, const JitterPolicy& policy = {});

/// Replications x grid points, with the seed that produced them.
struct SampleBatch {
  std::shared_ptr<const GridSpec> grid;
  Eigen::MatrixXd values;
  std::uint64_t seed = 0;
};

/// Draws centered Gaussian vectors with a fixed covariance, streaming blocks of replications.
///
/// Replication r consumes `components * dim` normals from ReplicationStream(seed, r);
/// component c of replication r is column r_local * components + c of the block.
class GaussianSampler {
 public:
  explicit GaussianSampler(const Eigen::MatrixXd& covariance, const JitterPolicy& policy = {});
  GaussianSampler(const CovarianceKernel& kernel, const GridSpec& grid, const JitterPolicy& policy = {});

  std::size_t dim() const noexcept { return static_cast<std::size_t>(factor_.lower.rows()); }
  const CholeskyFactor& factor() const noexcept { return factor_; }

  /// fn(first_replication, count, block) with block of size dim x (count * components).
  /// fn may run concurrently for different blocks and must only write disjoint state.
  template <class Fn>
  void for_each_block(std::size_t n_reps, std::uint64_t seed, const Exec& exec, Fn&& fn,
                      std::size_t components = 1) const {
    const std::size_t bs = std::max<std::size_t>(1, exec.block_size);
    const std::size_t n_blocks = (n_reps + bs - 1) / bs;
    parallel_blocks(n_blocks, exec, [&](std::size_t b) {
      const std::size_t first = b * bs;
      const std::size_t count = std::min(bs, n_reps - first);
      Eigen::MatrixXd normals(static_cast<Eigen::Index>(dim()), static_cast<Eigen::Index>(count * components));
      for (std::size_t r = 0; r < count; ++r) {
        ReplicationStream stream(seed, first + r);
        for (std::size_t c = 0; c < components; ++c) {
          auto col = normals.col(static_cast<Eigen::Index>(r * components + c));
          stream.fill_normal({col.data(), static_cast<std::size_t>(col.size())});
        }
      }
      Eigen::MatrixXd block(normals.rows(), normals.cols());
      block.noalias() = factor_.lower.triangularView<Eigen::Lower>() * normals;
      fn(first, count, static_cast<const Eigen::MatrixXd&>(block));
    });
  }

 private:
  CholeskyFactor factor_;
};

SampleBatch sample_paths(const CovarianceKernel& kernel, const GridSpec& grid, std::size_t n_reps,
                         std::uint64_t seed, const Exec& exec = {});

}  // namespace gaussex
