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

// Seeded experiment harness: sweeps over (m, n, epsilon), one learner run per
// trial, CSV report.

#ifndef PPDL_EXPERIMENT_H_
#define PPDL_EXPERIMENT_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "absl/status/statusor.h"
#include "ppdl/distributions.h"
#include "ppdl/pipeline.h"
#include "ppdl/random.h"
#include "ppdl/total_variation.h"

namespace ppdl {

// Truth generator. With `fixed` set every trial uses that distribution;
// otherwise each trial draws a member of the learner family: coordinates of
// each mean uniform in [mean_lo, mean_hi], eigenvalues of each covariance
// uniform in [var_lo, var_hi] under a random rotation, mixture weights
// proportional to 0.5 + U(0, 1), and mixture components pairwise at TV
// distance >= min_separation (by rejection).
struct TruthSpec {
  std::optional<Distribution> fixed;
  double mean_lo = -10.0;
  double mean_hi = 10.0;
  double var_lo = 0.25;
  double var_hi = 4.0;
  double min_separation = 0.2;
};

struct ExperimentSpec {
  int dim = 1;
  std::vector<int> m_values{32};
  std::vector<int> n_values{1000};
  std::vector<double> epsilons{1.0};
  int trials = 1;
  RngSeed seed{0};
  TruthSpec truth;
  // When set, public samples come from this distribution instead of the
  // truth (distribution shift). Private samples always come from the truth.
  std::optional<Distribution> public_source;
  // alpha, family, grid, robustness, caps and Scheffé options; epsilon and
  // seed are overridden per cell and trial. Cells with m = 0 anchor the grid
  // at N(0, I).
  LearnerConfig learner;
  TvOptions tv;
  // Also compute the best-candidate TV and the selection regret.
  bool decompose = false;
};

absl::Status ValidateSpec(const ExperimentSpec& spec);

struct TrialRecord {
  FamilyKind family = FamilyKind::kGaussian;
  int d = 1;
  int k = 1;
  int m = 0;
  int n = 0;
  double epsilon = 0.0;
  int trial = 0;
  uint64_t seed = 0;
  double tv_error = 0.0;
  double tv_ci = 0.0;
  size_t candidates = 0;
  bool success = false;
  // Filled when decompose is set.
  std::optional<double> best_candidate_tv;
  std::optional<double> regret;
};

// Draws a truth for one trial.
absl::StatusOr<Distribution> DrawTruth(const ExperimentSpec& spec,
                                       RngSeed seed);

absl::StatusOr<TrialRecord> RunTrial(const ExperimentSpec& spec, int m, int n,
                                     double epsilon, int trial,
                                     RngSeed trial_seed);

// Cells in (m, n, epsilon) order with epsilon fastest; trial seeds are
// DeriveSeed(spec.seed, row index).
absl::StatusOr<std::vector<TrialRecord>> RunExperiment(
    const ExperimentSpec& spec);

std::string CsvHeader();
std::string FormatCsv(const std::vector<TrialRecord>& records);

}  // namespace ppdl

#endif  // PPDL_EXPERIMENT_H_
