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

// Pure-DP hypothesis selection over a finite candidate set: Scheffé masses on
// the candidate side, empirical Scheffé frequencies on the private side, and
// the exponential mechanism on the negated Yatracos deviation.

#ifndef PPDL_SELECTION_H_
#define PPDL_SELECTION_H_

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ppdl/distributions.h"
#include "ppdl/random.h"

namespace ppdl {

// Pairwise Scheffé matrices are quadratic in the candidate count.
inline constexpr size_t kMaxTournamentSize = 12'000;

struct PrivacyBudget {
  double epsilon = 1.0;

  static absl::StatusOr<PrivacyBudget> Create(double epsilon);
};

// Dense row-major N x N matrix.
class SquareMatrix {
 public:
  SquareMatrix() = default;
  explicit SquareMatrix(size_t n) : n_(n), data_(n * n, 0.0) {}

  size_t size() const { return n_; }
  double& operator()(size_t i, size_t j) { return data_[i * n_ + j]; }
  double operator()(size_t i, size_t j) const { return data_[i * n_ + j]; }
  const std::vector<double>& data() const { return data_; }

  bool operator==(const SquareMatrix&) const = default;

 private:
  size_t n_ = 0;
  std::vector<double> data_;
};

struct ScheffeTable {
  SquareMatrix candidate_mass;
  SquareMatrix empirical_mass;
};

// kAuto uses closed forms where available (univariate Gaussians, univariate
// mixtures via a refined crossing scan, finite domains) and sampling
// otherwise. kMonteCarlo forces the sampling estimate of candidate masses.
enum class ScheffeMethod { kAuto, kMonteCarlo };

struct ScheffeOptions {
  int mc_trials = 20000;
  RngSeed seed{0x5c4effe};
  ScheffeMethod method = ScheffeMethod::kAuto;
};

// Ordered record of the selection stages that ran, used to check that
// candidate-side work precedes any read of private data.
class AuditLog {
 public:
  void Record(std::string_view event) { events_.emplace_back(event); }
  const std::vector<std::string>& events() const { return events_; }

 private:
  std::vector<std::string> events_;
};

inline constexpr std::string_view kAuditCandidateGeneration =
    "candidate_generation";
inline constexpr std::string_view kAuditScheffeCandidate = "scheffe_candidate";
inline constexpr std::string_view kAuditScheffeEmpirical = "scheffe_empirical";
inline constexpr std::string_view kAuditUtilities = "utilities";
inline constexpr std::string_view kAuditMechanism = "exponential_mechanism";

// C[i][j] = P_{p_i}[p_i(x) > p_j(x)], C[i][i] = 0. Depends on the candidates
// only. Requires mc_trials >= 1000.
absl::StatusOr<SquareMatrix> ScheffeCandidate(
    std::span<const Distribution> candidates, const ScheffeOptions& options,
    AuditLog* log = nullptr);

// E[i][j] = fraction of private samples with p_i(x) > p_j(x), E[i][i] = 0.
absl::StatusOr<SquareMatrix> ScheffeEmpirical(
    std::span<const Distribution> candidates, const Dataset& private_data,
    AuditLog* log = nullptr);

// Same counts as ScheffeEmpirical, as integers. Used by the privacy audits.
absl::StatusOr<std::vector<int64_t>> ScheffeCounts(
    std::span<const Distribution> candidates, const Dataset& private_data);

// u_i = -max_{j != i} |C[i][j] - E[i][j]|; a singleton set gets u = 0.
absl::StatusOr<std::vector<double>> Utilities(const SquareMatrix& candidate,
                                              const SquareMatrix& empirical);

// exp(eps n u_i / 2) normalized, with max subtraction.
std::vector<double> SelectionProbabilities(std::span<const double> utilities,
                                           size_t n, double epsilon);

struct SelectionResult {
  size_t chosen = 0;
  std::vector<double> utilities;
  std::vector<double> probabilities;
  double epsilon = 0.0;
  size_t n = 0;
};

absl::StatusOr<SelectionResult> ExponentialMechanism(
    std::span<const double> utilities, size_t n, const PrivacyBudget& budget,
    RngSeed seed);

struct Selection {
  Distribution hypothesis;
  SelectionResult result;
  ScheffeTable table;
};

// Empirical masses, utilities and the mechanism draw, given candidate masses
// computed beforehand.
absl::StatusOr<Selection> SelectWithCandidateMass(
    std::span<const Distribution> candidates, SquareMatrix candidate_mass,
    const Dataset& private_data, const PrivacyBudget& budget, RngSeed seed,
    AuditLog* log = nullptr);

// Candidate masses, then SelectWithCandidateMass.
absl::StatusOr<Selection> DpSelect(std::span<const Distribution> candidates,
                                   const Dataset& private_data,
                                   const PrivacyBudget& budget,
                                   const ScheffeOptions& options, RngSeed seed,
                                   AuditLog* log = nullptr);

}  // namespace ppdl

#endif  // PPDL_SELECTION_H_
