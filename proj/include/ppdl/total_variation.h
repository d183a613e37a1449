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

// Total-variation distance: closed form for univariate Gaussians, exact
// half-L1 on finite domains, and a two-sample Monte-Carlo estimator for
// everything else.

#ifndef PPDL_TOTAL_VARIATION_H_
#define PPDL_TOTAL_VARIATION_H_

#include <array>
#include <span>
#include <string_view>

#include "absl/status/statusor.h"
#include "ppdl/distributions.h"
#include "ppdl/random.h"

namespace ppdl {

// Open interval (lo, hi); either end may be infinite.
struct Interval {
  double lo;
  double hi;
};

struct Normal1d {
  double mean;
  double sd;
};

Normal1d AsNormal1d(const GaussianParams& g);

// Writes the open intervals on which the density of p strictly exceeds the
// density of q and returns how many there are (0, 1 or 2), in increasing
// order. Equal-variance pairs have one crossing, unequal-variance pairs two.
int DominanceIntervals(const Normal1d& p, const Normal1d& q,
                       std::array<Interval, 2>& out);

// Probability that p assigns to the union of intervals.
double IntervalMass(const Normal1d& p, std::span<const Interval> intervals);

double TvGaussian1d(const Normal1d& p, const Normal1d& q);
absl::StatusOr<double> TvExactGaussian1d(const GaussianParams& p,
                                         const GaussianParams& q);

// Lower bound on TV between univariate Gaussians (Devroye, Mehrabian and
// Reddad): (1/200) min{1, max{|v1 - v2| / v1, 40 |m1 - m2| / sd1}}.
double GaussianTvLowerBound1d(const Normal1d& p, const Normal1d& q);

// Half-L1 distance between masses on the same finite domain.
absl::StatusOr<double> TvFinite(const FiniteDist& p, const FiniteDist& q);

enum class TvMethod { kExactGaussian1d, kExactFinite, kMonteCarlo };
std::string_view TvMethodName(TvMethod method);

struct TvEstimate {
  double value = 0.0;
  // 95% normal-approximation half-width; zero for exact methods.
  double half_width = 0.0;
  TvMethod method = TvMethod::kMonteCarlo;
};

// Estimates TV = P_p[p > q] - P_q[p > q] from `trials` draws of each
// distribution. half_width = 1.96 sqrt((v_p + v_q) / trials) with v the two
// indicator variances. Requires trials >= 100.
absl::StatusOr<TvEstimate> TvMonteCarlo(const Distribution& p,
                                        const Distribution& q, int trials,
                                        RngSeed seed);

struct TvOptions {
  int mc_trials = 100000;
  RngSeed seed{0x7456};
};

// Exact where a closed form exists, Monte-Carlo otherwise.
absl::StatusOr<TvEstimate> TotalVariation(const Distribution& p,
                                          const Distribution& q,
                                          const TvOptions& options = {});

// min over the list of TotalVariation(p, list[i]).
absl::StatusOr<TvEstimate> PointSetDistance(const Distribution& p,
                                            std::span<const Distribution> list,
                                            const TvOptions& options = {});

}  // namespace ppdl

#endif  // PPDL_TOTAL_VARIATION_H_
