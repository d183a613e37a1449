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

#include "ppdl/pipeline.h"

#include <cmath>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "ppdl/distributions.h"
#include "ppdl/total_variation.h"

namespace ppdl {
namespace {

Distribution Normal(double mean, double variance) {
  return Distribution(*GaussianParams::Univariate(mean, variance));
}

double Tv1d(const Distribution& a, const Distribution& b) {
  return *TvExactGaussian1d(*a.As<GaussianParams>(), *b.As<GaussianParams>());
}

Dataset Draw(const Distribution& d, int count, uint64_t seed) {
  return *Sample(d, count, RngSeed{seed});
}

TEST(DefaultGridTest, TiedToAlpha) {
  const GridSpec g = DefaultGrid(0.2, false);
  EXPECT_DOUBLE_EQ(g.mu_step, 0.05);
  EXPECT_DOUBLE_EQ(g.sigma_step, 0.1);
  EXPECT_DOUBLE_EQ(g.mu_range, 3.0);
  EXPECT_DOUBLE_EQ(g.sigma_lo, -0.75);
  EXPECT_DOUBLE_EQ(g.sigma_hi, 3.0);
  const GridSpec r = DefaultGrid(0.2, true);
  EXPECT_DOUBLE_EQ(r.mu_range, 6.0);
  EXPECT_DOUBLE_EQ(r.sigma_lo, -1.5);
  EXPECT_DOUBLE_EQ(r.sigma_hi, 6.0);
}

TEST(LearnerConfigTest, Validation) {
  LearnerConfig c;
  EXPECT_TRUE(c.Validate().ok());
  c.alpha = 0;
  EXPECT_FALSE(c.Validate().ok());
  c = LearnerConfig{};
  c.beta = 1.5;
  EXPECT_FALSE(c.Validate().ok());
  c = LearnerConfig{};
  c.epsilon = -1;
  EXPECT_FALSE(c.Validate().ok());
  c = LearnerConfig{};
  c.robust = true;
  c.robustness = 2.0 / 3;
  c.gamma = 0.34;
  EXPECT_FALSE(c.Validate().ok());
  c.gamma = 1.0 / 3;
  EXPECT_TRUE(c.Validate().ok());
  EXPECT_DOUBLE_EQ(c.AgnosticFactor(), 3.0);
}

TEST(KMeansTest, SeparatedClusters) {
  Dataset data(1, DataRole::kPublic);
  for (double v : {-10.1, 9.8, -9.7, 10.3, -10.0, 10.0}) {
    data.Append(std::vector<double>{v});
  }
  auto labels = KMeansPartition(data, 2);
  ASSERT_TRUE(labels.ok());
  for (size_t i = 0; i < 6; ++i) {
    EXPECT_EQ((*labels)[i] == (*labels)[0], i % 2 == 0) << i;
  }
  EXPECT_FALSE(KMeansPartition(data, 7).ok());
  EXPECT_EQ(*KMeansPartition(data, 1), std::vector<int>(6, 0));
}

TEST(PpLearnTest, SingleCandidateIgnoresPrivateData) {
  LearnerConfig c;
  GridSpec g;
  g.mu_range = 0;
  g.sigma_lo = g.sigma_hi = 0;
  c.grid = g;
  const Dataset pub = Draw(Normal(5, 2), 16, 1);
  auto a = PpLearn(pub, Draw(Normal(0, 1), 100, 2), c);
  auto b = PpLearn(pub, Draw(Normal(-40, 9), 100, 3), c);
  ASSERT_TRUE(a.ok() && b.ok());
  EXPECT_EQ(a->candidates.size(), 1u);
  EXPECT_EQ(a->selection.probabilities, std::vector<double>{1.0});
  EXPECT_EQ(Tv1d(a->hypothesis, b->hypothesis), 0.0);
}

TEST(PpLearnTest, UnboundedMeanAndPrivateSampleTrend) {
  // Truth far from the origin; public data supplies the location.
  const Distribution truth = Normal(37, 2.5);
  LearnerConfig c;
  c.alpha = 0.4;
  const int trials = 40;
  int good_large = 0, good_small = 0;
  for (int t = 0; t < trials; ++t) {
    const Dataset pub = Draw(truth, 32, 100 + t);
    c.seed = RngSeed{uint64_t(t)};
    auto large = PpLearn(pub, Draw(truth, 4000, 900 + t), c);
    auto small = PpLearn(pub, Draw(truth, 50, 900 + t), c);
    ASSERT_TRUE(large.ok() && small.ok());
    good_large += Tv1d(large->hypothesis, truth) <= 0.2;
    good_small += Tv1d(small->hypothesis, truth) <= 0.2;
  }
  EXPECT_GE(good_large, 32);
  EXPECT_LT(good_small, good_large);
}

TEST(PpLearnTest, PublicPrivateDpOnNeighbors) {
  // Candidates depend on public data only, so the selection probabilities
  // are the full output distribution.
  LearnerConfig c;
  c.alpha = 0.8;
  c.epsilon = 0.7;
  const Dataset pub = Draw(Normal(3, 1), 16, 5);
  auto prepared = PrepareCandidates(pub, 1, c);
  ASSERT_TRUE(prepared.ok());
  Dataset priv = Draw(Normal(3, 1), 20, 6);
  auto base = FinishLearn(*prepared, priv, c);
  ASSERT_TRUE(base.ok());
  std::mt19937_64 rng(7);
  std::normal_distribution<double> fresh(3, 3);
  for (int s = 0; s < 50; ++s) {
    Dataset neighbor = priv;
    const double v = fresh(rng);
    neighbor.Replace(rng() % 20, std::vector<double>{v});
    auto other = FinishLearn(*prepared, neighbor, c);
    ASSERT_TRUE(other.ok());
    const auto& p = base->selection.probabilities;
    const auto& q = other->selection.probabilities;
    for (size_t i = 0; i < p.size(); ++i) {
      EXPECT_LE(p[i] / q[i], std::exp(c.epsilon) + 1e-9);
      EXPECT_LE(q[i] / p[i], std::exp(c.epsilon) + 1e-9);
    }
  }
}

TEST(PpLearnTest, PrivateDataReadAfterCandidates) {
  AuditLog log;
  LearnerConfig c;
  c.alpha = 0.8;
  auto r =
      PpLearn(Draw(Normal(0, 1), 16, 8), Draw(Normal(0, 1), 50, 9), c, &log);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(log.events(),
            std::vector<std::string>({std::string(kAuditCandidateGeneration),
                                      std::string(kAuditScheffeCandidate),
                                      std::string(kAuditScheffeEmpirical),
                                      std::string(kAuditUtilities),
                                      std::string(kAuditMechanism)}));
}

TEST(PpLearnTest, Deterministic) {
  LearnerConfig c;
  c.alpha = 0.6;
  c.seed = RngSeed{77};
  const Dataset pub = Draw(Normal(1, 1), 16, 10);
  const Dataset priv = Draw(Normal(1, 1), 200, 11);
  auto a = PpLearn(pub, priv, c);
  auto b = PpLearn(pub, priv, c);
  EXPECT_EQ(a->selection.chosen, b->selection.chosen);
  EXPECT_EQ(a->selection.probabilities, b->selection.probabilities);
}

TEST(PpLearnTest, Errors) {
  LearnerConfig c;
  c.alpha = 0.8;
  const Dataset pub = Draw(Normal(0, 1), 16, 12);
  EXPECT_EQ(PpLearn(pub, Dataset(1, DataRole::kPrivate), c).status().code(),
            absl::StatusCode::kInvalidArgument);
  const Dataset one = Draw(Normal(0, 1), 1, 13);
  EXPECT_FALSE(PpLearn(one, Draw(Normal(0, 1), 10, 14), c).ok());
  c.candidate_cap = 10;
  EXPECT_EQ(PpLearn(pub, Draw(Normal(0, 1), 10, 14), c).status().code(),
            absl::StatusCode::kResourceExhausted);
}

TEST(PpLearnTest, OversizedTournamentFailsCleanly) {
  LearnerConfig c;
  c.family.kind = FamilyKind::kProduct;
  c.alpha = 0.6;
  auto truth = *Distribution::Product({Normal(10, 1), Normal(-5, 4)});
  auto r = PpLearn(Draw(truth, 32, 50), Draw(truth, 100, 51), c);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kResourceExhausted);
}

TEST(PpLearnTest, MixtureFamily) {
  auto truth =
      *Distribution::Mixture({Normal(-4, 1), Normal(4, 1)}, {0.5, 0.5});
  LearnerConfig c;
  c.family.kind = FamilyKind::kMixture;
  c.family.k = 2;
  c.family.weight_step = 0.25;
  GridSpec g;
  g.mu_range = 0.5;
  g.mu_step = 0.5;
  g.sigma_lo = -0.5;
  g.sigma_hi = 0.5;
  g.sigma_step = 0.5;
  c.grid = g;
  int good = 0;
  for (int t = 0; t < 5; ++t) {
    c.seed = RngSeed{uint64_t(t)};
    auto r = PpLearn(Draw(truth, 50, 20 + t), Draw(truth, 4000, 30 + t), c);
    ASSERT_TRUE(r.ok());
    EXPECT_EQ(r->candidates.size(), 405u);
    auto tv = TvMonteCarlo(r->hypothesis, truth, 20000, RngSeed{40u + t});
    good += tv->value <= 0.2;
  }
  EXPECT_GE(good, 4);
}

TEST(PpLearnTest, ProductFamily) {
  auto truth = *Distribution::Product({Normal(10, 1), Normal(-5, 4)});
  LearnerConfig c;
  c.family.kind = FamilyKind::kProduct;
  GridSpec g;
  g.mu_range = 0.5;
  g.mu_step = 0.5;
  g.sigma_lo = -0.5;
  g.sigma_hi = 0.5;
  g.sigma_step = 0.25;
  c.grid = g;
  c.scheffe.mc_trials = 5000;
  auto r = PpLearn(Draw(truth, 32, 50), Draw(truth, 3000, 51), c);
  ASSERT_TRUE(r.ok());
  const auto* p = r->hypothesis.As<ProductParams>();
  ASSERT_NE(p, nullptr);
  ASSERT_EQ(p->factors.size(), 2u);
  // Subadditivity over independent coordinates.
  const double bound =
      Tv1d(p->factors[0], Normal(10, 1)) + Tv1d(p->factors[1], Normal(-5, 4));
  EXPECT_LE(bound, 0.4) << bound;
}

TEST(PpLearnTest, BivariateGaussian) {
  Eigen::Matrix2d cov;
  cov << 2, 0.5, 0.5, 1;
  const Distribution truth(
      *GaussianParams::Create(Eigen::Vector2d(100, -100), cov));
  LearnerConfig c;
  GridSpec g;
  g.mu_range = 0.5;
  g.mu_step = 0.5;
  g.sigma_lo = -0.5;
  g.sigma_hi = 0;
  g.sigma_step = 0.5;
  c.grid = g;
  c.scheffe.mc_trials = 5000;
  auto r = PpLearn(Draw(truth, 32, 60), Draw(truth, 3000, 61), c);
  ASSERT_TRUE(r.ok());
  auto tv = TvMonteCarlo(r->hypothesis, truth, 20000, RngSeed{62});
  EXPECT_LE(tv->value, 0.35);
}

TEST(PpLearnAgnosticShiftedTest, NoShiftMatchesRealizableRate) {
  const Distribution truth = Normal(-12, 0.8);
  LearnerConfig c;
  c.alpha = 0.6;
  c.gamma = 0;
  int good = 0;
  for (int t = 0; t < 10; ++t) {
    c.seed = RngSeed{uint64_t(t)};
    auto r = PpLearnAgnosticShifted(Draw(truth, 32, 70 + t),
                                    Draw(truth, 3000, 80 + t), c);
    ASSERT_TRUE(r.ok());
    good += Tv1d(r->hypothesis, truth) <= 0.2;
  }
  EXPECT_GE(good, 8);
}

TEST(PpLearnAgnosticShiftedTest, ShiftedPublicData) {
  const Distribution truth = Normal(0, 1);
  const Distribution shifted = Normal(0.2, 1);
  EXPECT_NEAR(Tv1d(truth, shifted), 2 * oracle::Phi(0.1) - 1, 1e-12);
  LearnerConfig c;
  c.alpha = 0.6;
  c.gamma = 0.08;
  int good = 0;
  for (int t = 0; t < 10; ++t) {
    c.seed = RngSeed{uint64_t(t)};
    auto r = PpLearnAgnosticShifted(Draw(shifted, 32, 90 + t),
                                    Draw(truth, 3000, 95 + t), c);
    ASSERT_TRUE(r.ok());
    good += Tv1d(r->hypothesis, truth) <= 0.2;
  }
  EXPECT_GE(good, 8);
}

TEST(PpLearnAgnosticShiftedTest, RejectsLargeShift) {
  LearnerConfig c;
  c.gamma = 0.5;
  auto r = PpLearnAgnosticShifted(Draw(Normal(0, 1), 16, 1),
                                  Draw(Normal(0, 1), 16, 2), c);
  EXPECT_EQ(r.status().code(), absl::StatusCode::kInvalidArgument);
}

TEST(SuggestPrivateSamplesTest, Formula) {
  SampleSizeInputs in;
  in.alpha = 0.1;
  in.beta = 0.1;
  in.epsilon = 1;
  in.tau = 32;
  in.bits = 40;
  auto s = SuggestPrivateSamples(in);
  ASSERT_TRUE(s.ok());
  const double expected =
      std::ceil((100 + 10) * (40 + 32 * std::log(32.0) + std::log(20.0)));
  EXPECT_EQ(s->n, expected);
  EXPECT_EQ(s->n, 16929);
  EXPECT_DOUBLE_EQ(s->selection_beta, 0.05);
  in.epsilon = 0.1;
  EXPECT_GT(SuggestPrivateSamples(in)->n, s->n);
  in.split = 1;
  EXPECT_FALSE(SuggestPrivateSamples(in).ok());
}

}  // namespace
}  // namespace ppdl
