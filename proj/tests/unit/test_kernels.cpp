#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>

#include "gaussex/error.hpp"
#include "gaussex/grid.hpp"
#include "gaussex/kernels.hpp"
#include "gaussex/sampler.hpp"

using namespace gaussex;

TEST(FbmCovariance, BrownianCaseIsMin) { EXPECT_DOUBLE_EQ(fbm_covariance(1.0, 0.5, 1.0), 0.5); }

TEST(FbmCovariance, UnitVarianceAtOne) {
  for (double a : {0.1, 0.5, 1.0, 1.5, 2.0}) EXPECT_NEAR(fbm_covariance(a, 1.0, 1.0), 1.0, 1e-15);
}

TEST(FbmCovariance, HandEvaluatedAlpha15) {
  // (1 + 2^1.5 - 1) / 2 = sqrt(2)
  EXPECT_NEAR(fbm_covariance(1.5, 1.0, 2.0), std::sqrt(2.0), 1e-14);
}

TEST(FbmCovariance, DiagonalIsPower) {
  for (double a : {0.3, 1.2}) EXPECT_NEAR(fbm_covariance(a, 2.7, 2.7), std::pow(2.7, a), 1e-13);
}

TEST(FbmCovariance, RejectsAlphaOutsideRange) {
  EXPECT_THROW(fbm_covariance(0.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(fbm_covariance(2.1, 1.0, 1.0), DomainError);
  EXPECT_THROW(fbm_covariance(-1.0, 1.0, 1.0), DomainError);
  EXPECT_THROW(fbm_covariance(1.0, -0.5, 1.0), DomainError);
}

TEST(FbmCovariance, SelfSimilarity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (double a : {0.4, 1.0, 1.7}) {
    for (int k = 0; k < 50; ++k) {
      const double s = u(rng), t = u(rng);
      for (double r : {0.5, 2.0}) {
        const double lhs = fbm_covariance(a, r * s, r * t);
        const double rhs = std::pow(r, a) * fbm_covariance(a, s, t);
        EXPECT_NEAR(lhs, rhs, 1e-12 * std::max(1.0, std::abs(rhs)));
      }
    }
  }
}

TEST(SubFbmCovariance, Examples) {
  EXPECT_NEAR(subfbm_covariance(1.0, 1.0, 1.0), 1.0, 1e-15);
  EXPECT_NEAR(subfbm_covariance(0.7, 1.0, 1.0), 1.0, 1e-15);
  EXPECT_EQ(subfbm_covariance(1.3, 0.0, 0.8), 0.0);
  // [1 + 2 - (3 + 1)/2] / 1 = 1
  EXPECT_NEAR(subfbm_covariance(1.0, 1.0, 2.0), 1.0, 1e-15);
}

TEST(SubFbmCovariance, DegenerateAtAlphaTwo) { EXPECT_THROW(subfbm_covariance(2.0, 1.0, 1.0), DomainError); }

TEST(SubFbmCovariance, VarianceScaling) {
  for (double a : {0.5, 1.0, 1.5}) {
    for (double r : {0.25, 3.0}) {
      EXPECT_NEAR(subfbm_covariance(a, r * 0.6, r * 0.6), std::pow(r, a) * subfbm_covariance(a, 0.6, 0.6), 1e-12);
    }
  }
}

TEST(Kernels, Symmetry) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  for (const auto& k : {fbm_kernel(0.6), fbm_kernel(1.9), subfbm_kernel(1.2)}) {
    for (int i = 0; i < 100; ++i) {
      const double s = u(rng), t = u(rng);
      EXPECT_EQ(k.eval(s, t), k.eval(t, s));
    }
  }
}

TEST(Kernels, Metadata) {
  EXPECT_EQ(fbm_kernel(1.2).self_similar_index(), 0.6);
  EXPECT_EQ(subfbm_kernel(0.8).self_similar_index(), 0.4);
  EXPECT_EQ(self_similar_kernel("subfbm", 1.0).name().rfind("subfbm", 0), 0u);
  EXPECT_THROW(self_similar_kernel("bifbm", 1.0), UsageError);
}

TEST(Increments, CovarianceMatchesInclusionExclusion) {
  // Cov[B(1) - B(0.2), B(0.7) - B(0.5)] for Brownian motion is the overlap length 0.2.
  EXPECT_NEAR(fbm_increment_covariance(1.0, 0.2, 1.0, 0.5, 0.7), 0.2, 1e-15);
}

TEST(Increments, DifferenceVarianceAgreesWithCovariances) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (double a : {0.5, 1.0, 1.5}) {
    for (int k = 0; k < 50; ++k) {
      double a1 = u(rng), b1 = u(rng), a2 = u(rng), b2 = u(rng);
      if (a1 > b1) std::swap(a1, b1);
      if (a2 > b2) std::swap(a2, b2);
      const double direct = fbm_increment_covariance(a, a1, b1, a1, b1) + fbm_increment_covariance(a, a2, b2, a2, b2) -
                            2.0 * fbm_increment_covariance(a, a1, b1, a2, b2);
      EXPECT_NEAR(fbm_increment_difference_variance(a, a1, b1, a2, b2), direct, 1e-12);
    }
  }
}

TEST(Kernels, AssembledMatricesArePositiveSemidefinite) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<Point> pts;
  while (pts.size() < 200) pts.push_back({u(rng)});
  const auto grid = GridSpec::from_points(GridKind::interval, pts, {0.005}, {{0.0, 1.0}});
  for (const auto& k : {fbm_kernel(0.3), fbm_kernel(1.0), fbm_kernel(1.95), subfbm_kernel(0.5), subfbm_kernel(1.5)}) {
    const auto m = build_covariance_matrix(k, grid);
    const double tol = 1e-8 * m.trace();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), -tol) << k.name();
    const auto f = cholesky_factor(m);
    EXPECT_LE(f.jitter, 1e-8 * m.trace() / static_cast<double>(m.rows()) * (1.0 + 1e-12)) << k.name();
  }
}
