#include <gtest/gtest.h>

#include <cmath>

#include "gaussex/error.hpp"
#include "gaussex/sampler.hpp"

using namespace gaussex;

namespace {

Eigen::MatrixXd empirical_covariance(const Eigen::MatrixXd& values) {
  // Centered fields: E[X X^T] without subtracting the sample mean.
  return values.transpose() * values / static_cast<double>(values.rows());
}

}  // namespace

TEST(CovarianceMatrix, OnePoint) {
  const auto m = build_covariance_matrix(fbm_kernel(1.0), GridSpec::interval(1.0, 2.0, 1.0));
  EXPECT_DOUBLE_EQ(m(0, 0), 1.0);
}

TEST(CovarianceMatrix, TwoPoints) {
  const auto g = GridSpec::from_points(GridKind::interval, {{0.5}, {1.0}}, {0.5}, {{0.0, 1.0}});
  const auto m = build_covariance_matrix(fbm_kernel(1.0), g);
  EXPECT_DOUBLE_EQ(m(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(m(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(m(1, 1), 1.0);
}

TEST(Cholesky, Identity) {
  const auto f = cholesky_factor(Eigen::MatrixXd::Identity(4, 4));
  EXPECT_EQ(f.jitter, 0.0);
  EXPECT_TRUE(f.lower.isApprox(Eigen::MatrixXd::Identity(4, 4)));
}

TEST(Cholesky, HandFactor) {
  Eigen::MatrixXd m(2, 2);
  m << 0.5, 0.5, 0.5, 1.0;
  const auto f = cholesky_factor(m);
  EXPECT_NEAR(f.lower(0, 0), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(f.lower(1, 0), std::sqrt(0.5), 1e-15);
  EXPECT_NEAR(f.lower(1, 1), std::sqrt(0.5), 1e-15);
  EXPECT_EQ(f.lower(0, 1), 0.0);
}

TEST(Cholesky, RankDeficientNeedsJitter) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 1, 1, 1;
  const auto f = cholesky_factor(m);
  EXPECT_GT(f.jitter, 0.0);
  const Eigen::MatrixXd rebuilt = f.lower * f.lower.transpose();
  EXPECT_NEAR((rebuilt - m - f.jitter * Eigen::MatrixXd::Identity(2, 2)).norm(), 0.0, 1e-12);
}

TEST(Cholesky, IndefiniteReportsPivot) {
  Eigen::MatrixXd m(3, 3);
  m << 1, 0, 0, 0, 1, 2, 0, 2, 1;
  try {
    cholesky_factor(m);
    FAIL() << "expected NotPositiveDefinite";
  } catch (const NotPositiveDefinite& e) {
    EXPECT_EQ(e.pivot(), 2u);
  }
}

TEST(Cholesky, ZeroVarianceRowIsDegenerate) {
  const auto g = GridSpec::interval(0.0, 1.0, 0.25);  // t = 0 has variance 0
  GaussianSampler s(fbm_kernel(1.0), g);
  ASSERT_EQ(s.factor().degenerate.size(), 1u);
  EXPECT_EQ(s.factor().degenerate[0], 0u);
  const auto batch = sample_paths(fbm_kernel(1.0), g, 1000, 4);
  EXPECT_LE(batch.values.col(0).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Sampler, VarianceAtOnePoint) {
  const auto batch = sample_paths(fbm_kernel(1.0), GridSpec::interval(1.0, 2.0, 1.0), 100000, 1);
  const double var = batch.values.col(0).squaredNorm() / 1e5;
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(Sampler, CovarianceAtTwoPoints) {
  const auto g = GridSpec::from_points(GridKind::interval, {{0.5}, {1.0}}, {0.5}, {{0.0, 1.0}});
  const auto batch = sample_paths(fbm_kernel(1.0), g, 100000, 2);
  EXPECT_NEAR(batch.values.col(0).dot(batch.values.col(1)) / 1e5, 0.5, 0.02);
}

TEST(Sampler, ShapeAndDeterminism) {
  const auto g = GridSpec::interval(0.0, 1.0, 0.1);
  const auto a = sample_paths(fbm_kernel(0.7), g, 300, 42);
  const auto b = sample_paths(fbm_kernel(0.7), g, 300, 42, Exec{3, 256});
  EXPECT_EQ(a.values.rows(), 300);
  EXPECT_EQ(a.values.cols(), 11);
  EXPECT_EQ(a.seed, 42u);
  EXPECT_TRUE((a.values.array() == b.values.array()).all());
  const auto c = sample_paths(fbm_kernel(0.7), g, 300, 43);
  EXPECT_FALSE((a.values.array() == c.values.array()).all());
}

TEST(Sampler, RejectsZeroReplications) {
  EXPECT_THROW(sample_paths(fbm_kernel(1.0), GridSpec::interval(0.0, 1.0, 0.5), 0, 1), UsageError);
}

TEST(Sampler, PrefixGridsShareValues) {
  // Lower-triangular factors: the leading block of a longer grid reproduces the shorter grid's draws.
  const auto short_grid = GridSpec::interval(0.0, 1.0, 0.1);
  const auto long_grid = GridSpec::interval(0.0, 2.0, 0.1);
  const auto a = sample_paths(fbm_kernel(1.0), short_grid, 50, 8);
  const auto b = sample_paths(fbm_kernel(1.0), long_grid, 50, 8);
  EXPECT_LT((a.values - b.values.leftCols(11)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Sampler, FrobeniusConvergence) {
  const auto g = GridSpec::interval(0.05, 1.0, 0.05);
  const auto k = fbm_kernel(0.8);
  const Eigen::MatrixXd truth = build_covariance_matrix(k, g);
  double previous = INFINITY;
  for (std::size_t n : {1000u, 10000u, 100000u}) {
    const auto batch = sample_paths(k, g, n, 2024);
    const double err = (empirical_covariance(batch.values) - truth).norm();
    EXPECT_LE(err, 5.0 * truth.norm() / std::sqrt(static_cast<double>(n))) << n;
    EXPECT_LT(err, previous) << n;
    previous = err;
  }
}

TEST(Sampler, ComponentsUseDisjointDraws) {
  const auto g = GridSpec::interval(0.5, 1.0, 0.5);
  GaussianSampler s(fbm_kernel(1.0), g);
  double cross = 0.0;
  const std::size_t n = 20000;
  std::vector<double> acc(n);
  s.for_each_block(n, 3, Exec{}, [&](std::size_t first, std::size_t count, const Eigen::MatrixXd& block) {
    for (std::size_t r = 0; r < count; ++r) acc[first + r] = block(1, 2 * r) * block(1, 2 * r + 1);
  }, 2);
  for (double v : acc) cross += v;
  EXPECT_NEAR(cross / static_cast<double>(n), 0.0, 0.05);
}
