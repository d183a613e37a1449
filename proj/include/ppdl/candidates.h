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

// Candidate generation from public data: a grid-correction compression
// scheme for Gaussians (forward the public samples, spend bits on a grid
// correction in the empirical whitened frame), mixture and product
// combinators, and the list-learner-to-compression construction.

#ifndef PPDL_CANDIDATES_H_
#define PPDL_CANDIDATES_H_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "ppdl/distributions.h"
#include "ppdl/total_variation.h"

namespace ppdl {

inline constexpr size_t kDefaultCandidateCap = 1'000'000;
inline constexpr std::string_view kGaussianGridDecoder = "gaussian-grid";

// Correction grids. The mean grid is {i * mu_step : |i * mu_step| <= mu_range}
// per coordinate, in units of the empirical covariance square root. The
// covariance grid holds entries of a symmetric correction Delta, anchored at
// zero whenever [sigma_lo, sigma_hi] contains it; candidates whose I + Delta
// is not positive definite are skipped.
struct GridSpec {
  double mu_range = 3.0;
  double mu_step = 0.05;
  double sigma_lo = -0.75;
  double sigma_hi = 3.0;
  double sigma_step = 0.1;

  absl::Status Validate() const;
  std::vector<double> MuValues() const;
  std::vector<double> SigmaValues() const;
  // Grid index closest to a zero correction.
  int MuCenter() const;
  int SigmaCenter() const;
};

// Bits stored one per byte, most significant first within each field.
using Bitstring = std::vector<uint8_t>;

std::string BitsToHex(const Bitstring& bits);
absl::StatusOr<Bitstring> HexToBits(std::string_view hex, int length);

// Output of an encoder: forwarded sample indices plus a bitstring.
struct Encoding {
  std::vector<size_t> indices;
  Bitstring bits;

  bool operator==(const Encoding&) const = default;
};

struct CompressionScheme {
  int tau = 0;   // forwarded samples
  int bits = 0;  // bit budget, the total grid-index width
  std::string decoder{kGaussianGridDecoder};
  double robustness = 0.0;
  int dim = 1;
  GridSpec grid;
};

// Scheme forwarding all m samples of a d-dimensional dataset.
absl::StatusOr<CompressionScheme> GaussianGridScheme(int dim, size_t m,
                                                     const GridSpec& grid,
                                                     double robustness = 0.0);

// Bits needed to address one grid point per mean coordinate and per
// upper-triangular covariance entry.
int GridBitWidth(int dim, const GridSpec& grid);

struct Provenance {
  std::vector<int> grid_indices;
  std::optional<Encoding> encoding;
};

struct CandidateSet {
  std::vector<Distribution> hypotheses;
  std::vector<Provenance> provenance;

  size_t size() const { return hypotheses.size(); }
};

// Empirical mean and population covariance plus lambda I with
// lambda = 1e-9 trace / d. Needs at least d + 1 points.
absl::StatusOr<GaussianParams> GaussianFit(const Dataset& data);

// Every N(mean + S delta, S (I + Delta) S) with S the symmetric square root of
// the fitted covariance, delta on the mean grid and Delta on the covariance
// grid. Enumeration order: mean tuple (first coordinate slowest), then
// covariance tuple over upper-triangular entries in row-major order.
absl::StatusOr<CandidateSet> GaussianCandidateGrid(
    const Dataset& public_data, const GridSpec& grid,
    size_t cap = kDefaultCandidateCap);

// Same enumeration around a fixed anchor instead of a fit, for runs without
// public data. Provenance carries grid indices only.
absl::StatusOr<CandidateSet> GaussianCandidateGridAround(
    const GaussianParams& anchor, const GridSpec& grid,
    size_t cap = kDefaultCandidateCap);

struct EncodeResult {
  Encoding encoding;
  std::vector<int> grid_indices;
  // Set when the target lies beyond the grid; the encoding is then the
  // nearest boundary point.
  bool clamped = false;
};

// Nearest grid candidate to the target: the mean offset minimizing the
// Euclidean distance of means, the correction minimizing the Frobenius
// distance of covariances.
absl::StatusOr<EncodeResult> EncodeGaussian(const GaussianParams& target,
                                            const Dataset& public_data,
                                            const GridSpec& grid);

absl::StatusOr<Distribution> Decode(const CompressionScheme& scheme,
                                    const Encoding& encoding,
                                    const Dataset& source);

// Weight vectors c / K with K = floor(1 / step) and c ranging over
// nonnegative integer vectors summing to K (first entry ascending slowest).
std::vector<std::vector<double>> SimplexWeightGrid(int k, double step);

// One candidate per component crossed with every simplex weight vector.
// k = 1 returns the input set unchanged. Zero-weight components are kept and
// duplicates are not removed.
absl::StatusOr<CandidateSet> MixtureCandidates(
    std::span<const CandidateSet> per_component, double weight_step,
    size_t cap = kDefaultCandidateCap);

absl::StatusOr<CandidateSet> ProductCandidates(
    std::span<const CandidateSet> per_coordinate,
    size_t cap = kDefaultCandidateCap);

struct ListIndexEncoding {
  size_t index = 0;
  int bits = 0;  // ceil(log2(list size))
};

// Smallest index minimizing TV(target, list[i]).
absl::StatusOr<ListIndexEncoding> CompressionFromListLearner(
    std::span<const Distribution> list, const Distribution& target,
    const TvOptions& options = {});

// List size (10/9) exp(epsilon n) forced on any pure-DP learner.
absl::StatusOr<double> PackingListSize(double epsilon, int n);

}  // namespace ppdl

#endif  // PPDL_CANDIDATES_H_
