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

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "absl/strings/str_format.h"
#include "ppdl/status_macros.h"

namespace ppdl {
namespace {

absl::StatusOr<GaussianParams> StandardNormal(int dim) {
  return GaussianParams::Create(Eigen::VectorXd::Zero(dim),
                                Eigen::MatrixXd::Identity(dim, dim));
}

absl::StatusOr<CandidateSet> GaussianCandidates(const Dataset& data, int dim,
                                                const GridSpec& grid,
                                                const LearnerConfig& config) {
  if (config.anchor == AnchorMode::kPrior) {
    PPDL_ASSIGN_OR_RETURN(const GaussianParams prior, StandardNormal(dim));
    return GaussianCandidateGridAround(prior, grid, config.candidate_cap);
  }
  return GaussianCandidateGrid(data, grid, config.candidate_cap);
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double total = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    total += d * d;
  }
  return total;
}

}  // namespace

std::string_view FamilyName(FamilyKind kind) {
  switch (kind) {
    case FamilyKind::kGaussian:
      return "gaussian";
    case FamilyKind::kMixture:
      return "mixture";
    case FamilyKind::kProduct:
      return "product";
  }
  return "unknown";
}

absl::StatusOr<FamilyKind> ParseFamily(std::string_view name) {
  if (name == "gaussian") return FamilyKind::kGaussian;
  if (name == "mixture") return FamilyKind::kMixture;
  if (name == "product") return FamilyKind::kProduct;
  return absl::InvalidArgumentError(
      absl::StrFormat("family: unknown value '%s'", std::string(name)));
}

absl::Status LearnerConfig::Validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1]");
  }
  if (!(beta > 0.0 && beta <= 1.0)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1]");
  }
  PPDL_RETURN_IF_ERROR(PrivacyBudget::Create(epsilon).status());
  if (family.kind == FamilyKind::kMixture) {
    if (family.k < 1) return absl::InvalidArgumentError("k must be >= 1");
    if (!(family.weight_step > 0.0 && family.weight_step <= 1.0)) {
      return absl::InvalidArgumentError("weight_step must lie in (0, 1]");
    }
  }
  if (robust) {
    if (!(robustness > 0.0 && robustness <= 1.0)) {
      return absl::InvalidArgumentError("robustness must lie in (0, 1]");
    }
    if (!(gamma >= 0.0) || gamma > robustness / 2.0) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "gamma = %g exceeds r / 2 = %g", gamma, robustness / 2.0));
    }
  }
  if (grid.has_value()) PPDL_RETURN_IF_ERROR(grid->Validate());
  return absl::OkStatus();
}

GridSpec LearnerConfig::EffectiveGrid() const {
  return grid.has_value() ? *grid : DefaultGrid(alpha, robust);
}

GridSpec DefaultGrid(double alpha, bool robust) {
  GridSpec g;
  g.mu_step = alpha / 4.0;
  g.sigma_step = alpha / 2.0;
  const double scale = robust ? 2.0 : 1.0;
  g.mu_range = 3.0 * scale;
  g.sigma_lo = -0.75 * scale;
  g.sigma_hi = 3.0 * scale;
  return g;
}

absl::StatusOr<std::vector<int>> KMeansPartition(const Dataset& data, int k) {
  const size_t n = data.size();
  const int dim = data.dim();
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  if (n < static_cast<size_t>(k)) {
    return absl::FailedPreconditionError(
        absl::StrFormat("cannot split %d points into %d groups", n, k));
  }
  std::vector<int> labels(n, 0);
  if (k == 1) return labels;

  std::vector<double> mean(dim, 0.0);
  for (size_t i = 0; i < n; ++i) {
    for (int j = 0; j < dim; ++j) mean[j] += data.point(i)[j] / n;
  }
  // Farthest-point seeding.
  std::vector<std::vector<double>> centers;
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  size_t pick = 0;
  double far = -1.0;
  for (size_t i = 0; i < n; ++i) {
    const double d = SquaredDistance(data.point(i), mean);
    if (d > far) {
      far = d;
      pick = i;
    }
  }
  while (static_cast<int>(centers.size()) < k) {
    const auto p = data.point(pick);
    centers.emplace_back(p.begin(), p.end());
    far = -1.0;
    for (size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], SquaredDistance(data.point(i), p));
      if (nearest[i] > far) {
        far = nearest[i];
        pick = i;
      }
    }
  }
  for (int iter = 0; iter < 100; ++iter) {
    bool changed = false;
    for (size_t i = 0; i < n; ++i) {
      int best = 0;
      double best_d = std::numeric_limits<double>::infinity();
      for (int c = 0; c < k; ++c) {
        const double d = SquaredDistance(data.point(i), centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (labels[i] != best || iter == 0) {
        changed = changed || labels[i] != best;
        labels[i] = best;
      }
    }
    std::vector<std::vector<double>> sums(k, std::vector<double>(dim, 0.0));
    std::vector<size_t> counts(k, 0);
    for (size_t i = 0; i < n; ++i) {
      ++counts[labels[i]];
      for (int j = 0; j < dim; ++j) sums[labels[i]][j] += data.point(i)[j];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (int j = 0; j < dim; ++j) centers[c][j] = sums[c][j] / counts[c];
    }
    if (!changed && iter > 0) break;
  }
  return labels;
}

absl::StatusOr<CandidateSet> GenerateCandidates(const Dataset& public_data,
                                                int dim,
                                                const LearnerConfig& config,
                                                AuditLog* log) {
  PPDL_RETURN_IF_ERROR(config.Validate());
  if (log != nullptr) log->Record(kAuditCandidateGeneration);
  if (config.anchor == AnchorMode::kPublicFit && public_data.dim() != dim) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "public data has dimension %d, expected %d", public_data.dim(), dim));
  }
  const GridSpec grid = config.EffectiveGrid();
  switch (config.family.kind) {
    case FamilyKind::kGaussian:
      return GaussianCandidates(public_data, dim, grid, config);
    case FamilyKind::kProduct: {
      std::vector<CandidateSet> per_coordinate;
      for (int axis = 0; axis < dim; ++axis) {
        const Dataset column = config.anchor == AnchorMode::kPrior
                                   ? Dataset(1, DataRole::kPublic)
                                   : public_data.Coordinate(axis);
        PPDL_ASSIGN_OR_RETURN(CandidateSet set,
                              GaussianCandidates(column, 1, grid, config));
        per_coordinate.push_back(std::move(set));
      }
      return ProductCandidates(per_coordinate, config.candidate_cap);
    }
    case FamilyKind::kMixture: {
      const int k = config.family.k;
      std::vector<CandidateSet> per_component;
      if (config.anchor == AnchorMode::kPrior) {
        PPDL_ASSIGN_OR_RETURN(
            CandidateSet set,
            GaussianCandidates(public_data, dim, grid, config));
        per_component.assign(k, set);
      } else {
        PPDL_ASSIGN_OR_RETURN(const std::vector<int> labels,
                              KMeansPartition(public_data, k));
        for (int c = 0; c < k; ++c) {
          std::vector<size_t> members;
          for (size_t i = 0; i < labels.size(); ++i) {
            if (labels[i] == c) members.push_back(i);
          }
          PPDL_ASSIGN_OR_RETURN(CandidateSet set,
                                GaussianCandidates(public_data.Subset(members),
                                                   dim, grid, config));
          per_component.push_back(std::move(set));
        }
      }
      return MixtureCandidates(per_component, config.family.weight_step,
                               config.candidate_cap);
    }
  }
  return absl::InternalError("unhandled family");
}

absl::StatusOr<PreparedCandidates> PrepareCandidates(
    const Dataset& public_data, int dim, const LearnerConfig& config,
    AuditLog* log) {
  PreparedCandidates out;
  PPDL_ASSIGN_OR_RETURN(out.candidates,
                        GenerateCandidates(public_data, dim, config, log));
  ScheffeOptions scheffe = config.scheffe;
  scheffe.seed = DeriveSeed(config.seed, 1);
  PPDL_ASSIGN_OR_RETURN(
      out.candidate_mass,
      ScheffeCandidate(out.candidates.hypotheses, scheffe, log));
  return out;
}

absl::StatusOr<LearnResult> FinishLearn(PreparedCandidates prepared,
                                        const Dataset& private_data,
                                        const LearnerConfig& config,
                                        AuditLog* log) {
  if (private_data.empty()) {
    return absl::InvalidArgumentError("private dataset is empty");
  }
  PPDL_ASSIGN_OR_RETURN(const PrivacyBudget budget,
                        PrivacyBudget::Create(config.epsilon));
  PPDL_ASSIGN_OR_RETURN(
      Selection selection,
      SelectWithCandidateMass(prepared.candidates.hypotheses,
                              std::move(prepared.candidate_mass), private_data,
                              budget, DeriveSeed(config.seed, 2), log));
  return LearnResult{std::move(selection.hypothesis),
                     std::move(selection.result),
                     std::move(prepared.candidates)};
}

absl::StatusOr<LearnResult> PpLearn(const Dataset& public_data,
                                    const Dataset& private_data,
                                    const LearnerConfig& config,
                                    AuditLog* log) {
  PPDL_RETURN_IF_ERROR(config.Validate());
  if (private_data.empty()) {
    return absl::InvalidArgumentError("private dataset is empty");
  }
  PPDL_ASSIGN_OR_RETURN(
      PreparedCandidates prepared,
      PrepareCandidates(public_data, private_data.dim(), config, log));
  return FinishLearn(std::move(prepared), private_data, config, log);
}

absl::StatusOr<LearnResult> PpLearnAgnosticShifted(const Dataset& public_data,
                                                   const Dataset& private_data,
                                                   const LearnerConfig& config,
                                                   AuditLog* log) {
  LearnerConfig robust = config;
  robust.robust = true;
  PPDL_RETURN_IF_ERROR(robust.Validate());
  return PpLearn(public_data, private_data, robust, log);
}

absl::StatusOr<SampleSizeSuggestion> SuggestPrivateSamples(
    const SampleSizeInputs& in) {
  if (!(in.alpha > 0.0 && in.alpha <= 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1]");
  }
  if (!(in.beta > 0.0 && in.beta <= 1.0)) {
    return absl::InvalidArgumentError("beta must lie in (0, 1]");
  }
  if (!(in.epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  if (in.tau < 0 || in.bits < 0 || in.m < 0) {
    return absl::InvalidArgumentError("tau, bits and m must be nonnegative");
  }
  if (!(in.split > 0.0 && in.split < 1.0)) {
    return absl::InvalidArgumentError("split must lie in (0, 1)");
  }
  if (!(in.constant > 0.0)) {
    return absl::InvalidArgumentError("constant must be positive");
  }
  const int m = in.m > 0 ? in.m : in.tau;
  SampleSizeSuggestion out;
  out.selection_beta = in.split * in.beta;
  out.complexity = in.bits + (m > 1 ? in.tau * std::log(m) : 0.0);
  const double rate =
      1.0 / (in.alpha * in.alpha) + 1.0 / (in.alpha * in.epsilon);
  out.n = std::ceil(in.constant * rate *
                    (out.complexity + std::log(1.0 / out.selection_beta)));
  return out;
}

}  // namespace ppdl
