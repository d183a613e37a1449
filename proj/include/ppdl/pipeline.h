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

// Public-private learner: candidates from public data, private selection, and
// the robust variant for agnostic and distribution-shifted runs.

#ifndef PPDL_PIPELINE_H_
#define PPDL_PIPELINE_H_

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ppdl/candidates.h"
#include "ppdl/distributions.h"
#include "ppdl/random.h"
#include "ppdl/selection.h"

namespace ppdl {

enum class FamilyKind { kGaussian, kMixture, kProduct };

std::string_view FamilyName(FamilyKind kind);
absl::StatusOr<FamilyKind> ParseFamily(std::string_view name);

struct FamilySpec {
  FamilyKind kind = FamilyKind::kGaussian;
  int k = 1;  // mixture components; ignored otherwise
  double weight_step = 0.1;
};

// Where the correction grid is anchored. kPrior centers it on N(0, I) and
// ignores public data, which is what a learner without public samples can do.
enum class AnchorMode { kPublicFit, kPrior };

struct LearnerConfig {
  double alpha = 0.2;
  double beta = 0.1;
  double epsilon = 1.0;
  // Unset means DefaultGrid(alpha, robust).
  std::optional<GridSpec> grid;
  FamilySpec family;
  bool robust = false;
  double robustness = 2.0 / 3.0;  // r
  double gamma = 0.0;             // TV between public and private sources
  size_t candidate_cap = kDefaultCandidateCap;
  ScheffeOptions scheffe;
  RngSeed seed{1};
  AnchorMode anchor = AnchorMode::kPublicFit;

  absl::Status Validate() const;
  // c = 2 / r.
  double AgnosticFactor() const { return 2.0 / robustness; }
  GridSpec EffectiveGrid() const;
};

// mu_step = alpha / 4, sigma_step = alpha / 2, mu_range 3 and sigma range
// [-0.75, 3]; ranges doubled when robust.
GridSpec DefaultGrid(double alpha, bool robust);

// Deterministic Lloyd clustering seeded by farthest-point traversal from the
// point farthest from the mean. Returns a label in [0, k) per point.
absl::StatusOr<std::vector<int>> KMeansPartition(const Dataset& data, int k);

absl::StatusOr<CandidateSet> GenerateCandidates(const Dataset& public_data,
                                                int dim,
                                                const LearnerConfig& config,
                                                AuditLog* log = nullptr);

struct LearnResult {
  Distribution hypothesis;
  SelectionResult selection;
  CandidateSet candidates;
};

// The part of PpLearn that never reads private data: candidates and their
// Scheffé masses.
struct PreparedCandidates {
  CandidateSet candidates;
  SquareMatrix candidate_mass;
};

absl::StatusOr<PreparedCandidates> PrepareCandidates(
    const Dataset& public_data, int dim, const LearnerConfig& config,
    AuditLog* log = nullptr);

absl::StatusOr<LearnResult> FinishLearn(PreparedCandidates prepared,
                                        const Dataset& private_data,
                                        const LearnerConfig& config,
                                        AuditLog* log = nullptr);

// PrepareCandidates followed by FinishLearn.
absl::StatusOr<LearnResult> PpLearn(const Dataset& public_data,
                                    const Dataset& private_data,
                                    const LearnerConfig& config,
                                    AuditLog* log = nullptr);

// Robust variant: requires gamma <= r / 2 and uses the widened grid.
absl::StatusOr<LearnResult> PpLearnAgnosticShifted(const Dataset& public_data,
                                                   const Dataset& private_data,
                                                   const LearnerConfig& config,
                                                   AuditLog* log = nullptr);

struct SampleSizeInputs {
  double alpha = 0.1;
  double beta = 0.1;
  double epsilon = 1.0;
  int tau = 0;
  int bits = 0;
  // Public samples; 0 means tau.
  int m = 0;
  // Share of beta given to selection.
  double split = 0.5;
  double constant = 1.0;
};

struct SampleSizeSuggestion {
  double n = 0.0;
  double complexity = 0.0;  // bits + tau ln m
  double selection_beta = 0.0;
};

// n = C (1 / alpha^2 + 1 / (alpha epsilon)) (bits + tau ln m +
// ln(1 / (split beta))), rounded up. The constant C is not known; it defaults
// to 1.
absl::StatusOr<SampleSizeSuggestion> SuggestPrivateSamples(
    const SampleSizeInputs& in);

}  // namespace ppdl

#endif  // PPDL_PIPELINE_H_
