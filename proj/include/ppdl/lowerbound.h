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

// Hard family of flat Gaussians and Monte-Carlo estimates of the quantities
// behind the public-sample lower bound: the mass eta of the bad event, the
// TV-ball weight r_k and the alternative-hypothesis weight s_k.

#ifndef PPDL_LOWERBOUND_H_
#define PPDL_LOWERBOUND_H_

#include <span>
#include <string>
#include <vector>

#include "Eigen/Core"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ppdl/distributions.h"
#include "ppdl/random.h"

namespace ppdl {

inline constexpr int kMinLowerBoundDim = 2;
inline constexpr int kMaxLowerBoundDim = 4;
inline constexpr int kMinEtaK = 10;

// G(1/k, (t, 0), u): variance 1/k^2 along u and 1 across it.
struct FlatGaussianParams {
  int k = 1;
  Eigen::VectorXd t;  // length d - 1, norm <= 1/2
  Eigen::VectorXd u;  // length d, unit, |u_d| <= sqrt(3)/2

  int dim() const { return static_cast<int>(u.size()); }
};

absl::Status ValidateFlat(const FlatGaussianParams& p);

// Orthonormal matrix with first column u, from the Householder reflection
// taking e_pivot to u.
Eigen::MatrixXd HouseholderCompletion(const Eigen::VectorXd& u, int pivot = 0);

absl::StatusOr<GaussianParams> MakeFlatGaussian(const FlatGaussianParams& p,
                                                int pivot = 0);

// Closed-form log density; agrees with MakeFlatGaussian.
double FlatLogDensity(const FlatGaussianParams& p, std::span<const double> x);

void SampleFlat(const FlatGaussianParams& p, Rng& rng, std::span<double> out);

// t uniform on the (d-1)-ball of radius 1/2, u uniform on the sphere
// conditioned on |u_d| <= sqrt(3)/2; both by rejection.
FlatGaussianParams SampleInstance(int k, int d, Rng& rng);

// ||x_{1..d-1}|| <= 1/2 and x_d in [1, 2].
bool InCylinder(std::span<const double> x);

// ((2 pi)^{-d/2} k e^{-1/2})^{d-1}, the largest likelihood any member assigns
// to d - 1 points of the cylinder.
double UkValue(int k, int d);
// exp(9 (d - 1) / 2).
double CValue(int d);
// Log of the likelihood threshold ((2 pi)^{-d/2} k e^{-5})^{d-1} that the
// alternative-hypothesis weight s_k is measured against.
double SkLogThreshold(int k, int d);

struct ProportionEstimate {
  double value = 0.0;
  double half_width = 0.0;  // 95%
};

// P[all d - 1 draws of a uniformly chosen member land in the cylinder].
absl::StatusOr<ProportionEstimate> EstimateEta(int k, int d, int trials,
                                               RngSeed seed);

// Whether TV(p, q) >= 1/200 follows from the angle certificate
// angle(u, u') in [sqrt(2) pi / (2k), pi - sqrt(2) pi / (2k)] or from the
// mean-shift certificate |dt . r_hat| >= 1 / (20 k), r_hat the unit direction
// of the first d - 1 coordinates of p.u.
bool SeparationCertified(const FlatGaussianParams& p,
                         const FlatGaussianParams& q);

// Conservative estimate of sup_p P_Q[TV(p, Q) <= 1/400]: the probability that
// neither certificate fires, maximized over the designed point (t = 0,
// u = e_1) and `outer` random members. The two certificate events involve
// independent coordinates of Q, so each factor is estimated from `inner`
// draws.
absl::StatusOr<ProportionEstimate> EstimateRk(int k, int d, int outer,
                                              int inner, RngSeed seed);

// min over x in B of P_Q[Q^{d-1}(x) >= threshold], over the far corner
// x_i = (e_1 / 2, 2) and `x_trials` uniform draws from B.
absl::StatusOr<ProportionEstimate> EstimateSk(int k, int d, int x_trials,
                                              int q_trials, RngSeed seed);

struct NflBudgets {
  int eta_trials = 100000;
  int rk_outer = 16;
  int rk_inner = 200000;
  int sk_x = 16;
  int sk_q = 200000;
};

struct NflRow {
  int k = 0;
  ProportionEstimate eta;
  double u_k = 0.0;
  double c = 0.0;
  ProportionEstimate rk;
  ProportionEstimate sk;
  double ratio = 0.0;
};

struct NflReport {
  int d = 2;
  std::vector<NflRow> rows;
  bool eta_positive = true;
  bool eta_stable = true;
  double rk_slope = 0.0;
  bool rk_decay = true;
  bool sk_band = true;
  bool ratio_decreasing = true;
  bool decay_flag = true;
  std::vector<std::string> warnings;
};

// Rows in the order of `ks`; flags compare rows in increasing k.
absl::StatusOr<NflReport> MakeNflReport(int d, std::span<const int> ks,
                                        const NflBudgets& budgets,
                                        RngSeed seed);

std::string FormatNflCsv(const NflReport& report);

}  // namespace ppdl

#endif  // PPDL_LOWERBOUND_H_
