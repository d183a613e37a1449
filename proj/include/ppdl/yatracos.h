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

// Learning a finite class on a finite domain through its Yatracos class:
// public-data cover, representative domain, SmallDB query release and
// minimum-distance selection, all by exact enumeration.

#ifndef PPDL_YATRACOS_H_
#define PPDL_YATRACOS_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ppdl/distributions.h"
#include "ppdl/random.h"

namespace ppdl {

// Subset of {0, ..., D-1}; bit x set iff x is a member.
using DomainMask = uint64_t;

inline constexpr size_t kDefaultSmallDbCap = 10'000'000;

struct HypothesisSet {
  int domain_size = 0;
  std::vector<DomainMask> sets;
};

// {x : p(x) > q(x)} over ordered pairs of distinct list positions,
// deduplicated in first-seen order. The empty set is kept.
absl::StatusOr<HypothesisSet> YatracosClass(std::span<const FiniteDist> q);

struct CoverResult {
  HypothesisSet reduced;
  // mapping[i] indexes reduced.sets for input set i.
  std::vector<size_t> mapping;
};

// Groups hypotheses by how they label the public sample and keeps the
// smallest mask of each group.
absl::StatusOr<CoverResult> PublicCover(const HypothesisSet& h,
                                        const Dataset& public_data);

struct RepresentativeDomain {
  // Smallest domain point of each behavior class, ascending.
  std::vector<int> representatives;
  // projection[x] indexes representatives.
  std::vector<int> projection;
};

// Points with the same membership vector across all sets share a class.
absl::StatusOr<RepresentativeDomain> MakeRepresentativeDomain(
    int domain_size, const HypothesisSet& h);

// Sets rewritten over the representative domain.
HypothesisSet ProjectHypotheses(const HypothesisSet& h,
                                const RepresentativeDomain& rep);

// Number of size-k multisets over a domain of the given size, or nullopt when
// it exceeds 2^62.
std::optional<uint64_t> MultisetCount(int domain_size, int k);

struct SmallDbOptions {
  double epsilon = 1.0;
  double alpha = 0.1;
  // Unset: ceil(ln|H| / alpha^2), at least 1, lowered to the largest size
  // whose enumeration fits the cap.
  std::optional<int> db_size;
  size_t cap = kDefaultSmallDbCap;
  // Keep the utility and probability of every database.
  bool keep_distribution = false;
};

struct SmallDbResult {
  int db_size = 0;
  uint64_t database_count = 0;
  uint64_t chosen = 0;
  // Multiplicity of each domain point in the chosen database.
  std::vector<int> chosen_counts;
  // g_hat per set: mass of the chosen database on it.
  std::vector<double> estimates;
  std::vector<double> utilities;
  std::vector<double> probabilities;
};

absl::StatusOr<int> SmallDbSize(const HypothesisSet& h,
                                const SmallDbOptions& o);

// Exponential mechanism over all size-k multisets of the domain of `h`
// (enumerated as sorted tuples in lexicographic order), utility
// -max_h |mass_y(h) - empirical(h)|. Private points must lie in the domain.
absl::StatusOr<SmallDbResult> SmallDb(const Dataset& private_data,
                                      const HypothesisSet& h,
                                      const SmallDbOptions& options,
                                      RngSeed seed);

// argmin_i max_j |q_i(h_j) - g_hat[mapping[j]]|, smallest index on ties.
absl::StatusOr<size_t> MinimumDistanceSelect(std::span<const FiniteDist> q,
                                             std::span<const double> g_hat,
                                             std::span<const size_t> mapping,
                                             const HypothesisSet& h);

struct YatracosRun {
  size_t chosen = 0;
  size_t hypotheses = 0;
  size_t reduced_hypotheses = 0;
  int reduced_domain = 0;
  int db_size = 0;
};

// Full pipeline: class, cover on public data, representative domain, SmallDB
// on projected private data, minimum-distance selection.
absl::StatusOr<YatracosRun> YatracosLearn(std::span<const FiniteDist> q,
                                          const Dataset& public_data,
                                          const Dataset& private_data,
                                          const SmallDbOptions& options,
                                          RngSeed seed);

struct YatracosDemoSpec {
  std::vector<FiniteDist> classes;
  int m = 40;
  int n = 2000;
  double epsilon = 1.0;
  double alpha = 0.1;
  int trials = 1;
  RngSeed seed{0};
  std::optional<int> db_size;
  size_t db_cap = kDefaultSmallDbCap;
};

struct YatracosTrial {
  int trial = 0;
  uint64_t seed = 0;
  size_t truth = 0;
  YatracosRun run;
  double tv_error = 0.0;
  bool success = false;
};

// Trial t uses truth classes[t mod |Q|].
absl::StatusOr<std::vector<YatracosTrial>> RunYatracosDemo(
    const YatracosDemoSpec& spec);
std::string FormatYatracosCsv(const std::vector<YatracosTrial>& trials);

}  // namespace ppdl

#endif  // PPDL_YATRACOS_H_
