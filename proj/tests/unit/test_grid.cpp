#include <gtest/gtest.h>

#include <algorithm>

#include "gaussex/error.hpp"
#include "gaussex/grid.hpp"

using namespace gaussex;

TEST(Grid, IntervalPoints) {
  const auto g = GridSpec::interval(0.0, 1.0, 0.25);
  ASSERT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.point(0)[0], 0.0);
  EXPECT_DOUBLE_EQ(g.point(4)[0], 1.0);
  EXPECT_EQ(g.kind(), GridKind::interval);
}

TEST(Grid, MeshMustDivideLength) { EXPECT_THROW(GridSpec::interval(0.0, 1.0, 0.3), UsageError); }

TEST(Grid, DuplicatesRejected) {
  EXPECT_THROW(GridSpec::from_points(GridKind::interval, {{0.5}, {0.5}}, {0.1}, {{0.0, 1.0}}), DomainError);
}

TEST(Grid, SimplexInvariantAndCount) {
  const auto g = GridSpec::simplex(2, 0.1);
  EXPECT_EQ(g.size(), 66u);  // C(10 + 2, 2)
  for (const auto& p : g.points()) {
    EXPECT_LE(0.0, p[0]);
    EXPECT_LE(p[0], p[1]);
    EXPECT_LE(p[1], 1.0);
  }
  EXPECT_THROW(GridSpec::from_points(GridKind::simplex, {{0.6, 0.4}}, {0.1, 0.1}, {{0, 1}, {0, 1}}), DomainError);
}

TEST(Grid, LexicographicOrder) {
  const auto g = GridSpec::from_points(GridKind::hyperrectangle, {{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.5}}, {0.5, 0.5},
                                       {{0, 1}, {0, 1}});
  EXPECT_TRUE(std::is_sorted(g.points().begin(), g.points().end()));
}

TEST(Grid, HyperrectangleIsTensorProduct) {
  const auto g = GridSpec::hyperrectangle({{0.0, 1.0}, {0.0, 2.0}}, {0.5, 1.0});
  EXPECT_EQ(g.size(), 9u);
  EXPECT_EQ(g.dimension(), 2u);
}

TEST(Grid, SphereTime) {
  const auto g = GridSpec::sphere_time(2, 0.1, {0.0, 0.5});
  EXPECT_EQ(g.dimension(), 2u);
  for (const auto& p : g.points()) {
    EXPECT_GE(p[0], 0.0);
    EXPECT_LT(p[0], 2.0 * 3.14159265358979323846);
  }
}

TEST(Grid, RefinementAddsPointsNearFocus) {
  const auto base = GridSpec::interval(0.0, 1.0, 0.1);
  const auto fine = base.refined({{0.0}}, 0.2, 3, 2);
  EXPECT_GT(fine.size(), base.size());
  ASSERT_EQ(fine.refinement().size(), 3u);
  EXPECT_DOUBLE_EQ(fine.refinement()[2].mesh, 0.1 / 8.0);
  // Base points survive refinement, so the coarse grid is a subset.
  EXPECT_NO_THROW(fine.indices_of(base));
  EXPECT_NEAR(fine.distance_to({0.0125}), 0.0, 1e-12);
  EXPECT_NEAR(fine.distance_to({0.95}), 0.05, 1e-12);
}

TEST(Grid, IndicesOfRejectsNonSubsets) {
  const auto a = GridSpec::interval(0.0, 1.0, 0.5);
  const auto b = GridSpec::interval(0.0, 1.0, 0.25);
  EXPECT_NO_THROW(b.indices_of(a));
  EXPECT_THROW(a.indices_of(b), UsageError);
}

TEST(Grid, KindNames) {
  for (auto k : {GridKind::interval, GridKind::hyperrectangle, GridKind::simplex, GridKind::sphere_time}) {
    EXPECT_EQ(grid_kind_from_string(to_string(k)), k);
  }
}
