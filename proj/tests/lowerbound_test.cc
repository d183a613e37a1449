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

#include "ppdl/lowerbound.h"

#include <cmath>
#include <numbers>
#include <vector>

#include "Eigen/Dense"
#include "gtest/gtest.h"
#include "oracles.h"
#include "ppdl/distributions.h"
#include "ppdl/random.h"
#include "ppdl/total_variation.h"

namespace ppdl {
namespace {

constexpr double kBand = 0.8660254037844386;  // sqrt(3) / 2

FlatGaussianParams Flat(int k, Eigen::VectorXd t, Eigen::VectorXd u) {
  FlatGaussianParams p;
  p.k = k;
  p.t = std::move(t);
  p.u = std::move(u);
  return p;
}

Eigen::VectorXd Direction(double angle) {
  return Eigen::Vector2d(std::cos(angle), std::sin(angle));
}

// Uniform point of the cylinder: disk of radius 1/2 times [1, 2].
void CylinderPoint(int d, Rng& rng, std::span<double> x) {
  double r2;
  do {
    r2 = 0.0;
    for (int j = 0; j < d - 1; ++j) {
      x[j] = UniformUnit(rng) - 0.5;
      r2 += x[j] * x[j];
    }
  } while (r2 > 0.25);
  x[d - 1] = 1.0 + UniformUnit(rng);
}

TEST(FlatGaussianTest, AxisAlignedCovariance) {
  auto g = MakeFlatGaussian(
      Flat(10, Eigen::VectorXd::Zero(1), Eigen::Vector2d(1, 0)));
  ASSERT_TRUE(g.ok());
  EXPECT_NEAR(g->covariance()(0, 0), 0.01, 1e-15);
  EXPECT_NEAR(g->covariance()(1, 1), 1.0, 1e-15);
  EXPECT_NEAR(g->covariance()(0, 1), 0.0, 1e-15);
  EXPECT_EQ(g->mean(), Eigen::Vector2d(0, 0));
}

TEST(FlatGaussianTest, SpectrumDensityAndBasisInvariance) {
  for (int d = 2; d <= 4; ++d) {
    Rng rng = MakeRng(RngSeed{uint64_t(d)});
    for (int trial = 0; trial < 50; ++trial) {
      const int k = 10 + trial;
      const FlatGaussianParams p = SampleInstance(k, d, rng);
      auto g = MakeFlatGaussian(p);
      ASSERT_TRUE(g.ok());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(g->covariance());
      EXPECT_NEAR(eig.eigenvalues()(0), 1.0 / (k * k), 1e-9);
      for (int i = 1; i < d; ++i) EXPECT_NEAR(eig.eigenvalues()(i), 1.0, 1e-9);

      const Eigen::MatrixXd r = HouseholderCompletion(p.u);
      EXPECT_LE((r.transpose() * r - Eigen::MatrixXd::Identity(d, d))
                    .cwiseAbs()
                    .maxCoeff(),
                1e-12);
      EXPECT_LE((r.col(0) - p.u).cwiseAbs().maxCoeff(), 1e-12);

      const Distribution dist(*g);
      std::vector<double> mean(g->mean().data(), g->mean().data() + d);
      EXPECT_NEAR(std::exp(LogDensityAt(dist, mean)),
                  std::pow(2 * std::numbers::pi, -0.5 * d) * k, 1e-9 * k);

      auto other = MakeFlatGaussian(p, 1);
      ASSERT_TRUE(other.ok());
      const Distribution alt(*other);
      for (int s = 0; s < 2; ++s) {
        std::vector<double> x(d);
        for (double& v : x) v = 2 * UniformUnit(rng) - 1;
        const double a = LogDensityAt(dist, x);
        EXPECT_NEAR(a, LogDensityAt(alt, x),
                    1e-10 * std::max(1.0, std::abs(a)));
        EXPECT_NEAR(a, FlatLogDensity(p, x), 1e-8 * std::max(1.0, std::abs(a)));
      }
    }
  }
}

TEST(FlatGaussianTest, RejectsInvalidParameters) {
  EXPECT_FALSE(ValidateFlat(Flat(10, Eigen::VectorXd::Constant(1, 0.6),
                                 Eigen::Vector2d(1, 0)))
                   .ok());
  EXPECT_FALSE(
      ValidateFlat(Flat(10, Eigen::VectorXd::Zero(1), Eigen::Vector2d(0, 1)))
          .ok());
  EXPECT_FALSE(
      ValidateFlat(Flat(10, Eigen::VectorXd::Zero(1), Eigen::Vector2d(1, 1)))
          .ok());
  EXPECT_TRUE(
      ValidateFlat(Flat(10, Eigen::VectorXd::Zero(1), Direction(1.0))).ok());
}

TEST(SampleInstanceTest, InvariantsAndSymmetry) {
  Rng rng = MakeRng(RngSeed{7});
  const int draws = 100000;
  double t_sum = 0.0;
  int inner_band = 0;
  for (int i = 0; i < draws; ++i) {
    const FlatGaussianParams p = SampleInstance(20, 2, rng);
    ASSERT_TRUE(ValidateFlat(p).ok());
    t_sum += p.t(0);
    inner_band += std::abs(p.u(1)) <= 0.5;
  }
  EXPECT_NEAR(t_sum / draws, 0.0, 0.01);
  // On the circle, |sin| <= 1/2 covers 1/3 of the angles and |sin| <= sqrt(3)/2
  // covers 2/3, so the conditional fraction is 1/2.
  EXPECT_NEAR(inner_band / double(draws), 0.5, 0.01);

  int d3_half = 0;
  for (int i = 0; i < draws; ++i) {
    const FlatGaussianParams p = SampleInstance(20, 3, rng);
    EXPECT_LE(p.t.norm(), 0.5);
    // u_3 is uniform on [-1, 1] for the uniform sphere in three dimensions.
    d3_half += std::abs(p.u(2)) <= kBand / 2;
  }
  EXPECT_NEAR(d3_half / double(draws), 0.5, 0.01);
}

TEST(SampleInstanceTest, CapAreaFraction) {
  // Regularized incomplete beta I_{h^2}(1/2, (d-1)/2) for h = sqrt(3)/2.
  const double expected[] = {0.0, 0.0, 2.0 / 3.0, kBand};
  Rng rng = MakeRng(RngSeed{8});
  for (int d = 2; d <= 3; ++d) {
    int inside = 0;
    const int draws = 100000;
    for (int i = 0; i < draws; ++i) {
      Eigen::VectorXd v(d);
      for (int j = 0; j < d; ++j) v(j) = StandardNormal(rng);
      inside += std::abs(v(d - 1)) / v.norm() <= kBand;
    }
    EXPECT_NEAR(inside / double(draws), expected[d], 0.01) << d;
  }
}

TEST(CylinderTest, Membership) {
  EXPECT_TRUE(InCylinder(std::vector<double>{0.2, 1.5}));
  EXPECT_FALSE(InCylinder(std::vector<double>{0.6, 1.5}));
  EXPECT_FALSE(InCylinder(std::vector<double>{0.2, 0.5}));
  EXPECT_TRUE(InCylinder(std::vector<double>{0.3, 0.3, 2.0}));
  EXPECT_FALSE(InCylinder(std::vector<double>{0.4, 0.4, 1.0}));
}

TEST(ClosedFormTest, UkAndC) {
  EXPECT_NEAR(UkValue(10, 2), 10 * std::exp(-0.5) / (2 * std::numbers::pi),
              1e-15);
  EXPECT_NEAR(UkValue(10, 2), 0.96532, 1e-5);
  EXPECT_NEAR(CValue(2), std::exp(4.5), 1e-12);
  EXPECT_NEAR(CValue(2), 90.017, 1e-3);
  EXPECT_NEAR(
      UkValue(20, 3),
      std::pow(std::pow(2 * std::numbers::pi, -1.5) * 20 * std::exp(-0.5), 2),
      1e-12);
}

TEST(ClosedFormTest, UkBoundsLikelihoodOnB) {
  for (int d = 2; d <= 3; ++d) {
    Rng rng = MakeRng(RngSeed{uint64_t(10 + d)});
    const int k = 10;
    double worst = 0.0;
    std::vector<double> x(d);
    for (int i = 0; i < 10000; ++i) {
      const FlatGaussianParams q = SampleInstance(k, d, rng);
      double loglik = 0.0;
      for (int j = 0; j < d - 1; ++j) {
        CylinderPoint(d, rng, x);
        loglik += FlatLogDensity(q, x);
      }
      worst = std::max(worst, std::exp(loglik));
    }
    EXPECT_LE(worst, UkValue(k, d) * (1 + 1e-9)) << d;
    // The designed extremizer attains the bound at the nearest point of C.
    const FlatGaussianParams e =
        Flat(k, Eigen::VectorXd::Zero(d - 1), Eigen::VectorXd::Unit(d, 0));
    std::vector<double> base(d, 0.0);
    base[d - 1] = 1.0;
    EXPECT_NEAR(std::exp((d - 1) * FlatLogDensity(e, base)), UkValue(k, d),
                1e-9 * UkValue(k, d));
  }
}

TEST(EtaTest, PositiveStableAndMonotoneInDimension) {
  auto e10 = EstimateEta(10, 2, 100000, RngSeed{20});
  auto e40 = EstimateEta(40, 2, 100000, RngSeed{21});
  auto e3 = EstimateEta(10, 3, 100000, RngSeed{22});
  ASSERT_TRUE(e10.ok() && e40.ok() && e3.ok());
  EXPECT_GT(e10->value - e10->half_width, 0.0);
  EXPECT_LE(std::abs(e10->value - e40->value),
            e10->half_width + e40->half_width);
  EXPECT_LE(e3->value, e10->value + e10->half_width);
  EXPECT_FALSE(EstimateEta(5, 2, 100, RngSeed{1}).ok());
  EXPECT_FALSE(EstimateEta(10, 1, 100, RngSeed{1}).ok());
  EXPECT_FALSE(EstimateEta(10, 5, 100, RngSeed{1}).ok());
}

TEST(CertificateTest, NeverFiresOnIdenticalInstances) {
  Rng rng = MakeRng(RngSeed{30});
  for (int i = 0; i < 1000; ++i) {
    const FlatGaussianParams p = SampleInstance(10 + i % 70, 2 + i % 3, rng);
    EXPECT_FALSE(SeparationCertified(p, p));
  }
}

TEST(CertificateTest, CertifiedPairsAreFarInTv) {
  // Perturb a random instance just past one of the two certificate
  // thresholds and confirm the Monte Carlo TV clears 1/400.
  Rng rng = MakeRng(RngSeed{31});
  const int k = 10;
  const double window = std::sqrt(2.0) * std::numbers::pi / (2.0 * k);
  int checked = 0;
  int attempts = 0;
  while (checked < 100 && attempts < 10000) {
    ++attempts;
    const FlatGaussianParams p = SampleInstance(k, 2, rng);
    FlatGaussianParams q = p;
    if (attempts % 2 == 0) {
      const double base = std::atan2(p.u(1), p.u(0));
      q.u = Direction(base + window * (1.0 + 0.2 * UniformUnit(rng)));
    } else {
      q.t(0) +=
          (UniformUnit(rng) < 0.5 ? -1 : 1) * (0.05 + 0.05 * UniformUnit(rng));
    }
    if (q.t.norm() > 0.5 || std::abs(q.u(1)) > kBand) continue;
    if (!SeparationCertified(p, q)) continue;
    auto tv = TvMonteCarlo(Distribution(*MakeFlatGaussian(p)),
                           Distribution(*MakeFlatGaussian(q)), 100000,
                           RngSeed{uint64_t(1000 + checked)});
    ASSERT_TRUE(tv.ok());
    EXPECT_GE(tv->value, 1.0 / 400) << checked;
    ++checked;
  }
  EXPECT_EQ(checked, 100);
}

NflBudgets SmallBudgets() {
  NflBudgets b;
  b.eta_trials = 20000;
  b.rk_outer = 4;
  b.rk_inner = 50000;
  b.sk_x = 4;
  b.sk_q = 50000;
  return b;
}

TEST(NflReportTest, DecayTrendsAtReducedBudget) {
  const std::vector<int> ks{10, 20, 40, 80};
  auto report = MakeNflReport(2, ks, SmallBudgets(), RngSeed{40});
  ASSERT_TRUE(report.ok());
  ASSERT_EQ(report->rows.size(), 4u);
  std::vector<double> x, y;
  for (const auto& r : report->rows) {
    x.push_back(std::log(r.k));
    y.push_back(std::log(r.rk.value));
    EXPECT_GE(r.sk.value, 0.0);
    EXPECT_LE(r.sk.value, 1.0);
    EXPECT_GE(r.rk.value, 0.0);
    EXPECT_LE(r.rk.value, 1.0);
  }
  EXPECT_NEAR(report->rk_slope, oracle::Slope(x, y), 1e-12);
  EXPECT_LE(report->rk_slope, -1.5);
  EXPECT_TRUE(report->sk_band);
  EXPECT_TRUE(report->ratio_decreasing);
  EXPECT_TRUE(report->eta_positive);
  EXPECT_TRUE(report->warnings.empty());
}

TEST(NflReportTest, SingleKWarnsAndIsDeterministic) {
  NflBudgets b = SmallBudgets();
  b.eta_trials = 2000;
  b.rk_inner = 2000;
  b.sk_q = 2000;
  const std::vector<int> ks{20};
  auto a = MakeNflReport(2, ks, b, RngSeed{41});
  auto again = MakeNflReport(2, ks, b, RngSeed{41});
  ASSERT_TRUE(a.ok() && again.ok());
  EXPECT_EQ(a->warnings.size(), 1u);
  EXPECT_TRUE(a->rk_decay && a->sk_band && a->ratio_decreasing);
  const std::string csv = FormatNflCsv(*a);
  EXPECT_EQ(csv, FormatNflCsv(*again));
  EXPECT_EQ(
      csv.substr(0, csv.find('\n')),
      "k,eta_hat,eta_ci,u_k,c,rk_hat,rk_ci,sk_hat,sk_ci,ratio,decay_flag");
  EXPECT_FALSE(MakeNflReport(2, std::vector<int>{}, b, RngSeed{1}).ok());
}

}  // namespace
}  // namespace ppdl
