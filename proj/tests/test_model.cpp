#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "b4/model.hpp"
#include "support.hpp"

using namespace b4;

TEST(ReactionTerms, VanishAtStationaryPoint) {
  const SystemParams p;
  const Point4 s{p.alpha, p.beta / p.alpha, p.alpha, p.beta / p.alpha};
  const Point4 r = reaction_terms(s, p);
  EXPECT_NEAR(r.u, 0.0, 1e-14);
  EXPECT_NEAR(r.v, 0.0, 1e-14);
  EXPECT_NEAR(r.w, 0.0, 1e-14);
  EXPECT_NEAR(r.z, 0.0, 1e-14);
}

TEST(ReactionTerms, OriginGivesAlphaForcing) {
  SystemParams p;
  p.alpha = 2.0;
  const Point4 r = reaction_terms({0, 0, 0, 0}, p);
  EXPECT_EQ(r, (Point4{2.0, 0.0, 2.0, 0.0}));
}

TEST(ReactionTerms, MatchHandSubstitutionAtOnes) {
  const SystemParams p = SystemParams::standard();
  const Point4 r = reaction_terms({1, 1, 1, 1}, p);
  // alpha - (beta+1) + 1 = 2 - 6.5 + 1; beta - 1; couplings vanish at equal values.
  EXPECT_DOUBLE_EQ(r.u, -3.5);
  EXPECT_DOUBLE_EQ(r.v, 4.5);
  EXPECT_DOUBLE_EQ(r.w, -3.5);
  EXPECT_DOUBLE_EQ(r.z, 4.5);
}

TEST(ReactionTerms, AgreeWithTermwiseOracleAtRandomPoints) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> X(0.0, 4.0);
  for (int i = 0; i < 200; ++i) {
    const SystemParams p = test::random_params(rng);
    const double u = X(rng), v = X(rng), w = X(rng), z = X(rng);
    const auto want = test::reaction_oracle(u, v, w, z, p);
    const Point4 got = reaction_terms({u, v, w, z}, p);
    for (std::size_t k = 0; k < 4; ++k)
      EXPECT_NEAR(got[k], want[k], 1e-12 * (1.0 + std::abs(want[k])));
  }
}

TEST(ReactionTerms, QuasiPositiveOnTheBoundaryOfTheOrthant) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> X(0.0, 10.0);
  const SystemParams p;
  for (int i = 0; i < 500; ++i) {
    const double a = X(rng), b = X(rng), c = X(rng);
    EXPECT_GE(reaction_terms({0, a, b, c}, p).u, 0.0);
    EXPECT_GE(reaction_terms({a, 0, b, c}, p).v, 0.0);
    EXPECT_GE(reaction_terms({a, b, 0, c}, p).w, 0.0);
    EXPECT_GE(reaction_terms({a, b, c, 0}, p).z, 0.0);
  }
}

TEST(ReactionTerms, RejectNonFiniteState) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(reaction_terms({nan, 1, 1, 1}, SystemParams{}), DomainError);
  EXPECT_THROW(reaction_terms({1, 1, 1, INFINITY}, SystemParams{}), DomainError);
}

TEST(StationarySolution, KnownParameterSets) {
  EXPECT_EQ(stationary_solution(SystemParams::standard()), (Point4{2, 2.75, 2, 2.75}));
  SystemParams unit;
  unit.alpha = 1.0;
  unit.beta = 1.0;
  EXPECT_EQ(stationary_solution(unit), (Point4{1, 1, 1, 1}));
  const Point4 s = stationary_solution(SystemParams::chaotic());
  EXPECT_DOUBLE_EQ(s.v, 2.95);
  EXPECT_DOUBLE_EQ(s.z, 2.95);
}

TEST(StationarySolution, RejectsZeroAlpha) {
  SystemParams p;
  p.alpha = 0.0;
  EXPECT_THROW(stationary_solution(p), DomainError);
}

TEST(ValidateParams, ReportsOffendingFields) {
  EXPECT_TRUE(validate_params(SystemParams::standard()).empty());
  SystemParams p;
  p.alpha = 0.0;
  EXPECT_EQ(validate_params(p), std::vector<std::string>{"alpha"});
  SystemParams q;
  q.a = -1e-6;
  EXPECT_EQ(validate_params(q), std::vector<std::string>{"a"});
}

TEST(Grid, IndexingAndGeometry) {
  Grid g{4, 3, 0.5, 2.0};
  EXPECT_EQ(g.size(), 12u);
  EXPECT_EQ(g.index(1, 2), 9u);
  EXPECT_DOUBLE_EQ(g.cell_area(), 1.0);
  EXPECT_FALSE(g.one_dimensional());
  EXPECT_TRUE((Grid{5, 1, 1.0, 1.0}).one_dimensional());
}

TEST(GridState, RejectsNonPositiveSpacing) {
  EXPECT_THROW(GridState(Grid{3, 3, 0.0, 1.0}, BoundaryCondition::Neumann),
               DomainError);
}

TEST(GridState, UniformFill) {
  const auto s = GridState::uniform(Grid{3, 3, 1, 1}, BoundaryCondition::Neumann,
                                    {1, 2, 3, 4});
  for (std::size_t n = 0; n < 9; ++n) EXPECT_EQ(s.at(n), (Point4{1, 2, 3, 4}));
}
