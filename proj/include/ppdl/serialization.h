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

#ifndef PPDL_SERIALIZATION_H_
#define PPDL_SERIALIZATION_H_

#include <string>
#include <string_view>
#include <vector>

#include "absl/status/statusor.h"
#include "json.hpp"
#include "ppdl/candidates.h"
#include "ppdl/distributions.h"
#include "ppdl/experiment.h"
#include "ppdl/pipeline.h"
#include "ppdl/selection.h"

namespace ppdl {

// Insertion-ordered so that emitted documents are byte-stable.
using Json = nlohmann::ordered_json;

// Parse errors come back as InvalidArgument naming the offending key.
absl::StatusOr<Json> ParseJson(std::string_view text);

// Two-space indented, trailing newline.
std::string DumpJson(const Json& json);

// {"kind":"gaussian","mean":[..],"covariance":[[..]]},
// {"kind":"mixture","weights":[..],"components":[..]},
// {"kind":"product","factors":[..]}, {"kind":"finite","masses":[..]}.
// A bare {"masses":[..]} is read as finite.
Json DistributionToJson(const Distribution& dist);
absl::StatusOr<Distribution> DistributionFromJson(const Json& json);

// Accepts [x, ...] for scalars, [[x1, x2], ...] for points, or an object
// {"points": ...} wrapping either form.
absl::StatusOr<Dataset> DatasetFromJson(const Json& json, DataRole role);
Json DatasetToJson(const Dataset& data);

// Learner settings. Unknown keys are rejected. Recognized keys: alpha, beta,
// epsilon, family, k, weight_step, grid {mu_range, mu_step, sigma_lo,
// sigma_hi, sigma_step}, robust, robustness, gamma, candidate_cap,
// scheffe_trials, scheffe_method ("auto" | "monte_carlo"), anchor
// ("public" | "prior"). `extra_keys` are tolerated and left to the caller.
absl::StatusOr<LearnerConfig> LearnerConfigFromJson(
    const Json& json, const std::vector<std::string>& extra_keys = {});
Json LearnerConfigToJson(const LearnerConfig& config);

// Experiment specs. Keys: dim, m, n, epsilon (number or array each), trials,
// truth {distribution | mean_range, var_range, min_separation},
// public_source, learner, tv_trials, decompose. The seed is supplied
// separately.
absl::StatusOr<ExperimentSpec> ExperimentSpecFromJson(const Json& json);

Json SelectionResultToJson(const SelectionResult& result);

// {"candidates":[..], "provenance":[{indices, bitstring, grid_indices}]}.
Json CandidateSetToJson(const CandidateSet& set);

}  // namespace ppdl

#endif  // PPDL_SERIALIZATION_H_
