#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>

#include "gaussex/constants.hpp"
#include "gaussex/error.hpp"

using namespace gaussex;

TEST(Known, Table) {
  EXPECT_EQ(lookup_known(ConstantKind::pickands, 1.0), 1.0);
  EXPECT_NEAR(*lookup_known(ConstantKind::pickands, 2.0), 1.0 / std::sqrt(std::numbers::pi), 1e-15);
  for (double c : {0.5, 1.0, 2.0, 4.0}) EXPECT_NEAR(*lookup_known(ConstantKind::piterbarg, 1.0, c), 1.0 + 1.0 / c, 1e-15);
  EXPECT_FALSE(lookup_known(ConstantKind::pickands, 0.5).has_value());
  EXPECT_GE(known_constants().size(), 6u);
  for (auto k : {ConstantKind::pickands, ConstantKind::piterbarg, ConstantKind::generalized_piterbarg, ConstantKind::h_w}) {
    EXPECT_EQ(constant_kind_from_string(to_string(k)), k);
  }
}

TEST(MeanStats, MatchesNaiveMean) {
  std::vector<double> v(1000);
  std::iota(v.begin(), v.end(), 1.0);
  const auto s = mean_stats(v);
  EXPECT_NEAR(s.mean, 500.5, 1e-12);
  // sample sd of 1..1000 is sqrt(1000 * 1001 / 12)
  EXPECT_NEAR(s.std_error, std::sqrt(1000.0 * 1001.0 / 12.0) / std::sqrt(1000.0), 1e-9);
  EXPECT_GE(s.truncation_sensitivity, 0.0);
}

TEST(Pickands, Preconditions) {
  EXPECT_THROW(pickands_estimate(1.0, 0.5, 0.02, 10, 1), UsageError);
  EXPECT_THROW(pickands_estimate(1.0, 10.0, 0.2, 10, 1), UsageError);
  EXPECT_THROW(pickands_estimate(1.0, 10.0, 0.03, 10, 1), UsageError);
  EXPECT_THROW(pickands_estimate(2.5, 10.0, 0.02, 10, 1), DomainError);
}

TEST(Pickands, PositiveFiniteAndDeterministic) {
  const auto a = pickands_estimate(0.5, 5.0, 0.05, 2000, 3);
  const auto b = pickands_estimate(0.5, 5.0, 0.05, 2000, 3, false, Exec{2, 256});
  EXPECT_GT(a.value, 0.0);
  EXPECT_TRUE(std::isfinite(a.std_error));
  EXPECT_EQ(a.value, b.value);
  EXPECT_EQ(a.kind, ConstantKind::pickands);
  EXPECT_EQ(a.n_reps, 2000u);
  // Every path includes t = 0, where the integrand is 1.
  EXPECT_GE(a.value * a.lambda, 1.0);
}

TEST(Pickands, SubadditivityOfWindowTotals) {
  const std::uint64_t seed = 31;
  const auto e5 = pickands_estimate(1.0, 5.0, 0.05, 4000, seed);
  const auto e10 = pickands_estimate(1.0, 10.0, 0.05, 4000, seed);
  const auto e15 = pickands_estimate(1.0, 15.0, 0.05, 4000, seed);
  const double t5 = e5.value * 5.0, t10 = e10.value * 10.0, t15 = e15.value * 15.0;
  const double se = std::sqrt(std::pow(e5.std_error * 5.0, 2) + std::pow(e10.std_error * 10.0, 2) +
                              std::pow(e15.std_error * 15.0, 2));
  EXPECT_LE(t15, t5 + t10 + 3.0 * se);
  // Prefix horizons share the same paths, so window totals are ordered.
  EXPECT_LE(t5, t10);
  EXPECT_LE(t10, t15);
}

TEST(Pickands, PairedSlopeEqualsTwoPointExtrapolation) {
  const auto half = pickands_estimate(1.0, 5.0, 0.05, 1000, 12);
  const auto full = pickands_estimate(1.0, 10.0, 0.05, 1000, 12);
  const auto paired = pickands_estimate(1.0, 10.0, 0.05, 1000, 12, true);
  const auto ex = lambda_extrapolate({half, full});
  EXPECT_TRUE(paired.extrapolated);
  EXPECT_NEAR(paired.value, ex.value, 1e-9 * std::max(1.0, std::abs(ex.value)));
}

TEST(Piterbarg, GuardNamesRequiredHorizon) {
  try {
    piterbarg_estimate(1.0, 1.0, 2.0, 0.02, 10, 1);
    FAIL() << "expected UsageError";
  } catch (const UsageError& e) {
    EXPECT_NE(std::string(e.what()).find("S"), std::string::npos);
  }
  EXPECT_LE(piterbarg_required_horizon(1.0, 1.0), 8.0);
  EXPECT_LE(piterbarg_required_horizon(1.0, 4.0), 8.0);
  // Psi((1 + b) S^(alpha/2) / sqrt 2) = 1e-4 at the required horizon.
  const double s = piterbarg_required_horizon(1.0, 1.0);
  EXPECT_NEAR(0.5 * std::erfc(2.0 * std::sqrt(s) / 2.0), 1e-4, 1e-9);
}

TEST(Piterbarg, AtLeastOneAndMonotoneInDrift) {
  const auto e05 = piterbarg_estimate(1.0, 0.5, 16.0, 0.04, 3000, 5);
  const auto e1 = piterbarg_estimate(1.0, 1.0, 16.0, 0.04, 3000, 5);
  const auto e4 = piterbarg_estimate(1.0, 4.0, 16.0, 0.04, 3000, 5);
  EXPECT_GE(e4.value, 1.0);
  EXPECT_GE(e05.value, e1.value);
  EXPECT_GE(e1.value, e4.value);
  EXPECT_EQ(e1.kind, ConstantKind::piterbarg);
  EXPECT_EQ(e1.drift, 1.0);
}

TEST(Piterbarg, GeneralizedWithFbmMatches) {
  const auto p = piterbarg_estimate(1.0, 2.0, 8.0, 0.05, 1000, 77);
  const auto g = generalized_piterbarg_estimate(fbm_kernel(1.0), 1.0, 2.0, 8.0, 0.05, 1000, 77);
  EXPECT_EQ(p.value, g.value);
  EXPECT_EQ(g.kind, ConstantKind::generalized_piterbarg);
}

TEST(Piterbarg, GeneralizedSubFbmSelfConsistent) {
  const auto a = generalized_piterbarg_estimate(subfbm_kernel(1.0), 1.0, 1.0, 8.0, 0.05, 4000, 14);
  const auto b = generalized_piterbarg_estimate(subfbm_kernel(1.0), 1.0, 1.0, 16.0, 0.05, 4000, 14);
  EXPECT_GE(a.value, 1.0);
  EXPECT_NEAR(a.value, b.value, 2.0 * std::hypot(a.std_error, b.std_error) + 1e-12);
  EXPECT_THROW(generalized_piterbarg_estimate(subfbm_kernel(0.5), 1.0, 1.0, 8.0, 0.05, 10, 1), UsageError);
}

TEST(Piterbarg, RefinementMonotone) {
  const auto grid = GridSpec::interval(0.0, 8.0, 0.02);
  std::vector<std::size_t> all, coarse;
  for (std::size_t i = 0; i < grid.size(); ++i) all.push_back(i);
  for (std::size_t i = 0; i < grid.size(); i += 2) coarse.push_back(i);
  const auto drift = [](PointView p) { return 2.0 * p[0]; };
  const auto s = sup_exponential_samples(fbm_kernel(1.0), grid, drift, {all, coarse}, 2000, 3);
  for (std::size_t r = 0; r < 2000; ++r) EXPECT_GE(s[0][r], s[1][r]);

  const auto fine = piterbarg_estimate(1.0, 1.0, 8.0, 0.02, 4000, 6);
  const auto rough = piterbarg_estimate(1.0, 1.0, 8.0, 0.04, 4000, 7);
  EXPECT_GE(fine.value, rough.value - 3.0 * std::hypot(fine.std_error, rough.std_error));
}

TEST(Hw, Guards) {
  EXPECT_THROW(hw_estimate(PerfTableSpec(4, 1.0, {1, 1, 1, 1, 1}), 2.0, 0.5, 10, 1), UsageError);
  EXPECT_THROW(hw_estimate(PerfTableSpec(2, 1.5, {1, 1, 1}), 2.0, 0.5, 10, 1), UsageError);
  EXPECT_THROW(hw_estimate(PerfTableSpec(3, 1.0, {1, 1, 1, 1}), 6.0, 0.1, 10, 1), UsageError);
}

TEST(Hw, OneDimensionalBaseline) {
  const PerfTableSpec s(1, 1.0, {1.0, 0.5});
  const auto a = hw_estimate(s, 4.0, 0.05, 4000, 8);
  EXPECT_EQ(a.kind, ConstantKind::h_w);
  EXPECT_GE(a.value, 1.0);  // m = 1, no normalization: the x = 0 term already gives 1
  EXPECT_LE(a.value, hw_upper_bound(s) + 3.0 * a.std_error);
}

TEST(Extrapolate, Rules) {
  ConstantEstimate lo, hi;
  lo.lambda = 10.0;
  hi.lambda = 20.0;
  lo.mesh = hi.mesh = 0.02;
  lo.value = hi.value = 0.9;
  lo.std_error = hi.std_error = 0.01;
  EXPECT_NEAR(lambda_extrapolate({lo, hi}).value, 0.9, 1e-15);
  EXPECT_TRUE(lambda_extrapolate({lo, hi}).extrapolated);

  auto p_lo = lo, p_hi = hi;
  p_lo.kind = p_hi.kind = ConstantKind::piterbarg;
  p_hi.value = 1.7;
  EXPECT_EQ(lambda_extrapolate({p_lo, p_hi}).value, 1.7);

  auto mixed = hi;
  mixed.kind = ConstantKind::piterbarg;
  EXPECT_THROW(lambda_extrapolate({lo, mixed}), UsageError);
  auto mesh = hi;
  mesh.mesh = 0.01;
  EXPECT_THROW(lambda_extrapolate({lo, mesh}), UsageError);
  EXPECT_THROW(lambda_extrapolate({hi, lo}), UsageError);
  EXPECT_THROW(lambda_extrapolate({lo}), UsageError);
}
