// Copyright 2026 The ppdl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "ppdl/total_variation.h"

#include <cmath>
#include <random>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "ppdl/distributions.h"

namespace ppdl {
namespace {

GaussianParams G1(double mean, double variance) {
  return *GaussianParams::Univariate(mean, variance);
}

Distribution Normal(double mean, double variance) {
  return Distribution(G1(mean, variance));
}

Distribution Normal2(double m0, double m1) {
  return Distribution(*GaussianParams::Create(Eigen::Vector2d(m0, m1),
                                              Eigen::Matrix2d::Identity()));
}

struct RandomPair {
  double m1, v1, m2, v2;
};

std::vector<RandomPair> RandomPairs(int count, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> mean(-5, 5), var(0.1, 10);
  std::vector<RandomPair> out;
  for (int i = 0; i < count; ++i) {
    out.push_back({mean(rng), var(rng), mean(rng), var(rng)});
  }
  return out;
}

TEST(TvExactTest, IdenticalIsZero) {
  EXPECT_EQ(*TvExactGaussian1d(G1(0, 1), G1(0, 1)), 0.0);
  EXPECT_EQ(*TvExactGaussian1d(G1(-3.5, 2), G1(-3.5, 2)), 0.0);
}

TEST(TvExactTest, UnitShiftClosedForm) {
  const double expected = 2 * oracle::Phi(0.5) - 1;
  EXPECT_NEAR(expected, 0.38292, 1e-5);
  EXPECT_NEAR(*TvExactGaussian1d(G1(0, 1), G1(1, 1)), expected, 1e-14);
  EXPECT_NEAR(oracle::GridTvGaussian(0, 1, 1, 1), expected, 1e-9);
}

TEST(TvExactTest, EqualMeansClosedForm) {
  // N(0,1) vs N(0,4): crossings at +-x*, x*^2 = 8 ln 2 / 3.
  const double x = std::sqrt(8 * std::log(2.0) / 3);
  const double expected =
      (2 * oracle::Phi(x) - 1) - (2 * oracle::Phi(x / 2) - 1);
  EXPECT_NEAR(*TvExactGaussian1d(G1(0, 1), G1(0, 4)), expected, 1e-14);
}

TEST(TvExactTest, RejectsMultivariate) {
  auto g2 = GaussianParams::Create(Eigen::Vector2d::Zero(),
                                   Eigen::Matrix2d::Identity());
  EXPECT_FALSE(TvExactGaussian1d(*g2, G1(0, 1)).ok());
}

TEST(TvExactTest, AgreesWithGridIntegration) {
  for (const RandomPair& r : RandomPairs(100, 17)) {
    const double exact = *TvExactGaussian1d(G1(r.m1, r.v1), G1(r.m2, r.v2));
    const double grid =
        oracle::GridTvGaussian(r.m1, std::sqrt(r.v1), r.m2, std::sqrt(r.v2));
    EXPECT_NEAR(exact, grid, 1e-6)
        << r.m1 << " " << r.v1 << " " << r.m2 << " " << r.v2;
  }
}

TEST(TvExactTest, SymmetricBoundedAndTriangle) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> mean(-5, 5), var(0.1, 10);
  for (int i = 0; i < 500; ++i) {
    const GaussianParams a = G1(mean(rng), var(rng));
    const GaussianParams b = G1(mean(rng), var(rng));
    const GaussianParams c = G1(mean(rng), var(rng));
    const double ab = *TvExactGaussian1d(a, b);
    const double ba = *TvExactGaussian1d(b, a);
    const double bc = *TvExactGaussian1d(b, c);
    const double ac = *TvExactGaussian1d(a, c);
    EXPECT_EQ(ab, ba);
    EXPECT_GE(ab, 0.0);
    EXPECT_LE(ab, 1.0);
    EXPECT_LE(ac, ab + bc + 1e-12);
  }
}

TEST(TvExactTest, OneDimensionalLowerBoundHolds) {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> mean(-5, 5), var(0.1, 10);
  int violations = 0;
  for (int i = 0; i < 1000; ++i) {
    const double m1 = mean(rng), v1 = var(rng), m2 = mean(rng), v2 = var(rng);
    // Evaluated directly from the bound's formula.
    const double bound =
        std::min(1.0, std::max(std::abs(v1 - v2) / v1,
                               40 * std::abs(m1 - m2) / std::sqrt(v1))) /
        200;
    const double tv = *TvExactGaussian1d(G1(m1, v1), G1(m2, v2));
    EXPECT_NEAR(
        GaussianTvLowerBound1d({m1, std::sqrt(v1)}, {m2, std::sqrt(v2)}), bound,
        1e-15);
    violations += tv < bound;
  }
  EXPECT_EQ(violations, 0);
}

TEST(TvExactTest, LowerBoundUnitShiftValue) {
  EXPECT_DOUBLE_EQ(GaussianTvLowerBound1d({0, 1}, {1, 1}), 0.005);
  // Small shifts stay in the linear regime.
  const double tv = *TvExactGaussian1d(G1(0, 1), G1(0.001, 1));
  EXPECT_GE(tv, GaussianTvLowerBound1d({0, 1}, {0.001, 1}));
}

TEST(TvMonteCarloTest, IdenticalNearZero) {
  auto tv = TvMonteCarlo(Normal(0, 1), Normal(0, 1), 10000, RngSeed{1});
  ASSERT_TRUE(tv.ok());
  EXPECT_EQ(tv->method, TvMethod::kMonteCarlo);
  EXPECT_LE(tv->value, 0.02);
}

TEST(TvMonteCarloTest, UnitShiftWithinOnePercent) {
  auto tv = TvMonteCarlo(Normal(0, 1), Normal(1, 1), 100000, RngSeed{2});
  ASSERT_TRUE(tv.ok());
  EXPECT_NEAR(tv->value, 2 * oracle::Phi(0.5) - 1, 0.01);
  EXPECT_GT(tv->half_width, 0.0);
}

TEST(TvMonteCarloTest, DisjointSupportsHaveNoSpread) {
  // Both indicator frequencies are pinned (1 and 0), so the variance term of
  // the half-width vanishes.
  auto tv = TvMonteCarlo(Normal(0, 1e-2), Normal(100, 1e-2), 1000, RngSeed{3});
  ASSERT_TRUE(tv.ok());
  EXPECT_EQ(tv->value, 1.0);
  EXPECT_EQ(tv->half_width, 0.0);
}

TEST(TvMonteCarloTest, FarApartBivariate) {
  auto tv = TvMonteCarlo(Normal2(0, 0), Normal2(5, 5), 10000, RngSeed{4});
  ASSERT_TRUE(tv.ok());
  EXPECT_GE(tv->value, 0.99);
}

TEST(TvMonteCarloTest, BivariateShiftMatchesProjection) {
  // Shift by (1, 0) with identity covariance reduces to the 1-d case.
  auto tv = TvMonteCarlo(Normal2(0, 0), Normal2(1, 0), 100000, RngSeed{5});
  ASSERT_TRUE(tv.ok());
  EXPECT_NEAR(tv->value, 2 * oracle::Phi(0.5) - 1, tv->half_width + 0.002);
}

TEST(TvMonteCarloTest, SymmetricWithinHalfWidth) {
  auto mix = Distribution::Mixture({Normal(-1, 1), Normal(2, 0.5)}, {0.4, 0.6});
  ASSERT_TRUE(mix.ok());
  auto pq = TvMonteCarlo(*mix, Normal(0.5, 2), 100000, RngSeed{6});
  auto qp = TvMonteCarlo(Normal(0.5, 2), *mix, 100000, RngSeed{7});
  ASSERT_TRUE(pq.ok() && qp.ok());
  EXPECT_NEAR(pq->value, qp->value, pq->half_width + qp->half_width);
}

TEST(TvMonteCarloTest, MixtureAgainstGridOracle) {
  auto mix = Distribution::Mixture({Normal(-1, 1), Normal(2, 0.5)}, {0.4, 0.6});
  ASSERT_TRUE(mix.ok());
  const double grid = oracle::GridTv(
      [](double x) {
        return 0.4 * oracle::NormalPdf(x, -1, 1) +
               0.6 * oracle::NormalPdf(x, 2, std::sqrt(0.5));
      },
      [](double x) { return oracle::NormalPdf(x, 0.5, std::sqrt(2)); }, -20,
      20);
  auto tv = TvMonteCarlo(*mix, Normal(0.5, 2), 100000, RngSeed{8});
  ASSERT_TRUE(tv.ok());
  EXPECT_NEAR(tv->value, grid, 1.5 * tv->half_width);
}

TEST(TvMonteCarloTest, FiniteAgreesWithHalfL1) {
  const std::vector<double> a{0.1, 0.2, 0.3, 0.4}, b{0.25, 0.25, 0.25, 0.25};
  const Distribution p(*FiniteDist::Create(a)), q(*FiniteDist::Create(b));
  auto tv = TvMonteCarlo(p, q, 100000, RngSeed{9});
  ASSERT_TRUE(tv.ok());
  EXPECT_NEAR(tv->value, oracle::HalfL1(a, b), tv->half_width);
}

TEST(TvMonteCarloTest, RejectsTinyTrialCountsAndMismatchedDims) {
  EXPECT_FALSE(TvMonteCarlo(Normal(0, 1), Normal(1, 1), 99, RngSeed{1}).ok());
  EXPECT_FALSE(
      TvMonteCarlo(Normal(0, 1), Normal2(0, 0), 1000, RngSeed{1}).ok());
}

TEST(TvMonteCarloTest, DeterministicGivenSeed) {
  auto a = TvMonteCarlo(Normal2(0, 0), Normal2(1, 1), 5000, RngSeed{10});
  auto b = TvMonteCarlo(Normal2(0, 0), Normal2(1, 1), 5000, RngSeed{10});
  EXPECT_EQ(a->value, b->value);
  EXPECT_EQ(a->half_width, b->half_width);
}

TEST(TotalVariationTest, DispatchesToExactPaths) {
  auto g = TotalVariation(Normal(0, 1), Normal(1, 1));
  ASSERT_TRUE(g.ok());
  EXPECT_EQ(g->method, TvMethod::kExactGaussian1d);
  EXPECT_EQ(g->half_width, 0.0);
  const std::vector<double> a{0.5, 0.5}, b{0.9, 0.1};
  auto f = TotalVariation(Distribution(*FiniteDist::Create(a)),
                          Distribution(*FiniteDist::Create(b)));
  ASSERT_TRUE(f.ok());
  EXPECT_EQ(f->method, TvMethod::kExactFinite);
  EXPECT_NEAR(f->value, 0.4, 1e-15);
  auto mc = TotalVariation(Normal2(0, 0), Normal2(1, 0));
  ASSERT_TRUE(mc.ok());
  EXPECT_EQ(mc->method, TvMethod::kMonteCarlo);
}

TEST(TvFiniteTest, HalfL1AndDomainCheck) {
  const std::vector<double> a{0.7, 0.2, 0.1}, b{0.1, 0.2, 0.7};
  EXPECT_NEAR(*TvFinite(*FiniteDist::Create(a), *FiniteDist::Create(b)),
              oracle::HalfL1(a, b), 1e-15);
  EXPECT_FALSE(
      TvFinite(*FiniteDist::Create(a), *FiniteDist::Create({0.5, 0.5})).ok());
}

TEST(PointSetDistanceTest, Examples) {
  const Distribution p = Normal(0, 1);
  EXPECT_EQ(PointSetDistance(p, std::vector<Distribution>{p})->value, 0.0);
  EXPECT_EQ(PointSetDistance(
                p, std::vector<Distribution>{Normal(0, 1), Normal(10, 1)})
                ->value,
            0.0);
  EXPECT_NEAR(
      PointSetDistance(p, std::vector<Distribution>{Normal(1, 1), Normal(2, 1)})
          ->value,
      2 * oracle::Phi(0.5) - 1, 1e-14);
  EXPECT_FALSE(PointSetDistance(p, std::vector<Distribution>{}).ok());
}

}  // namespace
}  // namespace ppdl
