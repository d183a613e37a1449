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

#include "ppdl/yatracos.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include "gtest/gtest.h"
#include "oracles.h"
#include "ppdl/distributions.h"

namespace ppdl {
namespace {

FiniteDist F(std::vector<double> m) {
  return *FiniteDist::Create(std::move(m));
}

Dataset Points(std::vector<double> xs, DataRole role = DataRole::kPublic) {
  return Dataset::FromScalars(xs, role);
}

FiniteDist RandomFinite(std::mt19937_64& rng, int d) {
  std::gamma_distribution<double> g(1.0, 1.0);
  std::vector<double> m(d);
  for (double& v : m) v = g(rng);
  const double s = std::accumulate(m.begin(), m.end(), 0.0);
  for (double& v : m) v /= s;
  return F(m);
}

double MaskMass(const FiniteDist& p, DomainMask mask) {
  double total = 0.0;
  for (int x = 0; x < p.domain_size(); ++x) {
    if ((mask >> x) & 1) total += p.mass(x);
  }
  return total;
}

// Four classes on eight points with pairwise TV between 0.5 and 0.7.
std::vector<FiniteDist> SeparatedClasses() {
  return {F({.4, .25, .1, .1, .05, .04, .03, .03}),
          F({.03, .03, .04, .05, .1, .1, .25, .4}),
          F({.05, .05, .3, .3, .1, .1, .05, .05}),
          F({.1, .1, .05, .05, .3, .3, .05, .05})};
}

TEST(YatracosClassTest, TwoPointExample) {
  const std::vector<FiniteDist> q{F({0.7, 0.3}), F({0.3, 0.7})};
  auto h = YatracosClass(q);
  ASSERT_TRUE(h.ok());
  EXPECT_EQ(std::set<DomainMask>(h->sets.begin(), h->sets.end()),
            std::set<DomainMask>({0b01, 0b10}));
  EXPECT_EQ(h->sets.size(), 2u);
}

TEST(YatracosClassTest, IdenticalPairGivesEmptySet) {
  const std::vector<FiniteDist> q{F({0.5, 0.5}), F({0.5, 0.5})};
  auto h = YatracosClass(q);
  ASSERT_TRUE(h.ok());
  EXPECT_EQ(h->sets, std::vector<DomainMask>{0});
  EXPECT_FALSE(YatracosClass(std::vector<FiniteDist>{F({1.0})}).ok());
}

TEST(YatracosClassTest, MatchesBruteForce) {
  std::mt19937_64 rng(1);
  for (int t = 0; t < 50; ++t) {
    std::vector<FiniteDist> q;
    for (int i = 0; i < 4; ++i) q.push_back(RandomFinite(rng, 8));
    std::set<DomainMask> expected;
    for (int i = 0; i < 4; ++i) {
      for (int j = 0; j < 4; ++j) {
        if (i == j) continue;
        DomainMask m = 0;
        for (int x = 0; x < 8; ++x) {
          if (q[i].mass(x) > q[j].mass(x)) m |= DomainMask{1} << x;
        }
        expected.insert(m);
      }
    }
    auto h = YatracosClass(q);
    ASSERT_TRUE(h.ok());
    EXPECT_EQ(std::set<DomainMask>(h->sets.begin(), h->sets.end()), expected);
    EXPECT_EQ(h->sets.size(), expected.size());
    EXPECT_LE(h->sets.size(), 12u);
  }
}

TEST(PublicCoverTest, IdenticalLabelingsCollapse) {
  HypothesisSet h{4, {0b0011, 0b0111}};
  auto c = PublicCover(h, Points({0, 1, 0}));
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(c->reduced.sets, std::vector<DomainMask>{0b0011});
  EXPECT_EQ(c->mapping, std::vector<size_t>({0, 0}));
  EXPECT_FALSE(PublicCover(h, Points({})).ok());
  EXPECT_FALSE(PublicCover(h, Points({4})).ok());
}

TEST(PublicCoverTest, FullSampleIsIdentity) {
  std::mt19937_64 rng(2);
  std::vector<FiniteDist> q;
  for (int i = 0; i < 4; ++i) q.push_back(RandomFinite(rng, 8));
  auto h = YatracosClass(q);
  auto c = PublicCover(*h, Points({0, 1, 2, 3, 4, 5, 6, 7}));
  ASSERT_TRUE(c.ok());
  EXPECT_EQ(c->reduced.sets, h->sets);
  for (size_t i = 0; i < c->mapping.size(); ++i) EXPECT_EQ(c->mapping[i], i);
}

TEST(PublicCoverTest, LabelingConsistencyAndSmallSymmetricDifference) {
  std::mt19937_64 rng(3);
  const FiniteDist p = F(std::vector<double>(8, 1.0 / 8));
  int good = 0;
  for (int t = 0; t < 200; ++t) {
    std::vector<FiniteDist> q;
    for (int i = 0; i < 4; ++i) q.push_back(RandomFinite(rng, 8));
    auto h = YatracosClass(q);
    auto sample = Sample(Distribution(p), 40, RngSeed{uint64_t(t)});
    auto c = PublicCover(*h, *sample);
    ASSERT_TRUE(c.ok());
    DomainMask support = 0;
    for (double v : sample->values()) support |= DomainMask{1} << int(v);
    double worst = 0.0;
    for (size_t i = 0; i < h->sets.size(); ++i) {
      const DomainMask image = c->reduced.sets[c->mapping[i]];
      EXPECT_EQ(h->sets[i] & support, image & support);
      worst = std::max(worst, MaskMass(p, h->sets[i] ^ image));
    }
    good += worst <= 0.15;
  }
  EXPECT_GE(good, 180);
}

TEST(RepresentativeDomainTest, TrivialCases) {
  auto one = MakeRepresentativeDomain(8, HypothesisSet{8, {0}});
  ASSERT_TRUE(one.ok());
  EXPECT_EQ(one->representatives, std::vector<int>{0});
  HypothesisSet singletons{8, {}};
  for (int x = 0; x < 8; ++x) singletons.sets.push_back(DomainMask{1} << x);
  auto full = MakeRepresentativeDomain(8, singletons);
  ASSERT_TRUE(full.ok());
  EXPECT_EQ(full->representatives.size(), 8u);
  EXPECT_FALSE(MakeRepresentativeDomain(65, HypothesisSet{65, {0}}).ok());
}

TEST(RepresentativeDomainTest, MembershipPreservedExhaustively) {
  std::mt19937_64 rng(4);
  std::uniform_int_distribution<DomainMask> mask(0, (DomainMask{1} << 16) - 1);
  for (int t = 0; t < 100; ++t) {
    HypothesisSet h{16, {}};
    const int count = 1 + t % 5;
    for (int i = 0; i < count; ++i) h.sets.push_back(mask(rng));
    auto rep = MakeRepresentativeDomain(16, h);
    ASSERT_TRUE(rep.ok());
    const HypothesisSet projected = ProjectHypotheses(h, *rep);
    EXPECT_EQ(projected.domain_size, int(rep->representatives.size()));
    EXPECT_LE(rep->representatives.size(), size_t{1} << count);
    for (int x = 0; x < 16; ++x) {
      const int r = rep->representatives[rep->projection[x]];
      EXPECT_LE(r, x);
      for (size_t s = 0; s < h.sets.size(); ++s) {
        EXPECT_EQ((h.sets[s] >> x) & 1, (h.sets[s] >> r) & 1);
        EXPECT_EQ((h.sets[s] >> x) & 1,
                  (projected.sets[s] >> rep->projection[x]) & 1);
      }
    }
  }
}

TEST(SmallDbTest, MultisetCountIsBinomial) {
  for (int d = 1; d <= 10; ++d) {
    for (int k = 1; k <= 10; ++k) {
      EXPECT_EQ(*MultisetCount(d, k),
                static_cast<uint64_t>(oracle::Choose(d + k - 1, k)));
    }
  }
  EXPECT_FALSE(MultisetCount(64, 200).has_value());
}

TEST(SmallDbTest, TwoPointExample) {
  const HypothesisSet h{2, {0b01}};
  const Dataset priv = Points({0, 0, 1, 1}, DataRole::kPrivate);
  SmallDbOptions o;
  o.db_size = 2;
  o.epsilon = 1.0;
  o.keep_distribution = true;
  auto r = SmallDb(priv, h, o, RngSeed{1});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->database_count, 3u);
  ASSERT_EQ(r->utilities.size(), 3u);
  EXPECT_DOUBLE_EQ(r->utilities[0], -0.5);
  EXPECT_DOUBLE_EQ(r->utilities[1], 0.0);
  EXPECT_DOUBLE_EQ(r->utilities[2], -0.5);
  // exp(eps * n * u / 2) with n = 4.
  const double w = std::exp(-1.0);
  EXPECT_NEAR(r->probabilities[1], 1 / (1 + 2 * w), 1e-12);
  EXPECT_NEAR(r->probabilities[0], w / (1 + 2 * w), 1e-12);

  o.epsilon = 1000;
  r = SmallDb(priv, h, o, RngSeed{2});
  EXPECT_GE(r->probabilities[1], 1 - 1e-6);
  EXPECT_EQ(r->chosen_counts, std::vector<int>({1, 1}));
  EXPECT_DOUBLE_EQ(r->estimates[0], 0.5);
}

TEST(SmallDbTest, EmptySetOnlyIsUniform) {
  SmallDbOptions o;
  o.db_size = 3;
  o.keep_distribution = true;
  auto r = SmallDb(Points({0, 2, 3}, DataRole::kPrivate), HypothesisSet{4, {0}},
                   o, RngSeed{3});
  ASSERT_TRUE(r.ok());
  ASSERT_EQ(r->probabilities.size(), 20u);
  for (double p : r->probabilities) EXPECT_NEAR(p, 1.0 / 20, 1e-15);
  EXPECT_EQ(r->estimates, std::vector<double>{0.0});
}

TEST(SmallDbTest, PureDpOnNeighbors) {
  const HypothesisSet h{4, {0b0011, 0b0101, 0b1000}};
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> point(0, 3), slot(0, 19);
  std::vector<double> base(20);
  for (double& v : base) v = point(rng);
  SmallDbOptions o;
  o.db_size = 4;
  o.epsilon = 0.8;
  o.keep_distribution = true;
  const auto p = SmallDb(Points(base, DataRole::kPrivate), h, o, RngSeed{6});
  for (int t = 0; t < 50; ++t) {
    std::vector<double> other = base;
    other[slot(rng)] = point(rng);
    const auto q = SmallDb(Points(other, DataRole::kPrivate), h, o, RngSeed{6});
    for (size_t i = 0; i < p->probabilities.size(); ++i) {
      EXPECT_LE(p->probabilities[i] / q->probabilities[i],
                std::exp(o.epsilon) + 1e-9);
      EXPECT_LE(q->probabilities[i] / p->probabilities[i],
                std::exp(o.epsilon) + 1e-9);
    }
  }
}

TEST(SmallDbTest, SizeRuleAndCap) {
  HypothesisSet h{8, {1, 2, 3, 4, 5, 6, 7}};
  SmallDbOptions o;
  o.alpha = 0.5;
  // ceil(ln 7 / 0.25) = 8.
  EXPECT_EQ(*SmallDbSize(h, o), 8);
  o.cap = 100;
  // C(8 + 2 - 1, 2) = 36 fits; C(10, 3) = 120 does not.
  EXPECT_EQ(*SmallDbSize(h, o), 2);
  o.db_size = 3;
  auto bad = SmallDbSize(h, o);
  EXPECT_EQ(bad.status().code(), absl::StatusCode::kResourceExhausted);
  EXPECT_NE(bad.status().message().find("120"), std::string::npos);
}

TEST(MinimumDistanceSelectTest, Examples) {
  const std::vector<FiniteDist> q{F({0.7, 0.3}), F({0.3, 0.7})};
  const HypothesisSet h{2, {0b01}};
  const std::vector<double> g{0.6};
  const std::vector<size_t> f{0};
  EXPECT_EQ(*MinimumDistanceSelect(q, g, f, h), 0u);

  std::mt19937_64 rng(7);
  std::vector<FiniteDist> four;
  for (int i = 0; i < 4; ++i) four.push_back(RandomFinite(rng, 8));
  auto yh = YatracosClass(four);
  std::vector<double> exact;
  std::vector<size_t> identity;
  for (size_t s = 0; s < yh->sets.size(); ++s) {
    exact.push_back(MaskMass(four[2], yh->sets[s]));
    identity.push_back(s);
  }
  EXPECT_EQ(*MinimumDistanceSelect(four, exact, identity, *yh), 2u);
  EXPECT_FALSE(MinimumDistanceSelect(q, g, std::vector<size_t>{1}, h).ok());
}

TEST(YatracosLearnTest, EndToEndAccuracy) {
  const auto q = SeparatedClasses();
  for (size_t i = 0; i < q.size(); ++i) {
    for (size_t j = i + 1; j < q.size(); ++j) {
      EXPECT_GE(oracle::HalfL1(q[i].masses(), q[j].masses()), 0.3);
    }
  }
  YatracosDemoSpec spec;
  spec.classes = q;
  spec.trials = 40;
  spec.db_cap = 200000;
  spec.seed = RngSeed{8};
  auto trials = RunYatracosDemo(spec);
  ASSERT_TRUE(trials.ok());
  int good = 0;
  for (const auto& t : *trials) {
    const double tv =
        oracle::HalfL1(q[t.run.chosen].masses(), q[t.truth].masses());
    EXPECT_DOUBLE_EQ(t.tv_error, tv);
    good += tv <= 0.1;
  }
  EXPECT_GE(good, 34);
}

TEST(YatracosLearnTest, DemoIsDeterministic) {
  YatracosDemoSpec spec;
  spec.classes = SeparatedClasses();
  spec.trials = 3;
  spec.n = 500;
  spec.db_cap = 20000;
  spec.seed = RngSeed{9};
  auto a = RunYatracosDemo(spec);
  auto b = RunYatracosDemo(spec);
  ASSERT_TRUE(a.ok() && b.ok());
  const std::string csv = FormatYatracosCsv(*a);
  EXPECT_EQ(csv, FormatYatracosCsv(*b));
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "trial,seed,truth,chosen,tv_error,success,hypotheses,"
            "reduced_hypotheses,reduced_domain,db_size");
}

}  // namespace
}  // namespace ppdl
