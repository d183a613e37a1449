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

// Parametric distributions over R^d (and finite domains) with evaluable
// densities and seeded samplers.

#ifndef PPDL_DISTRIBUTIONS_H_
#define PPDL_DISTRIBUTIONS_H_

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include "Eigen/Dense"
#include "absl/status/statusor.h"
#include "ppdl/random.h"

namespace ppdl {

// Covariances whose smallest eigenvalue falls below this are rejected.
inline constexpr double kMinCovarianceEigenvalue = 1e-12;
// Mixture weights must sum to one within this tolerance.
inline constexpr double kWeightSumTolerance = 1e-12;
// Largest finite domain supported by exact enumeration.
inline constexpr int kMaxFiniteDomain = 64;

enum class DataRole { kPublic, kPrivate };

// Ordered list of equal-dimension points stored row-major.
class Dataset {
 public:
  Dataset(int dim, DataRole role) : dim_(dim), role_(role) {}

  static absl::StatusOr<Dataset> FromRows(
      const std::vector<std::vector<double>>& rows, DataRole role);
  static Dataset FromScalars(std::span<const double> values, DataRole role);

  int dim() const { return dim_; }
  DataRole role() const { return role_; }
  size_t size() const { return dim_ == 0 ? 0 : values_.size() / dim_; }
  bool empty() const { return values_.empty(); }

  std::span<const double> point(size_t i) const {
    return {values_.data() + i * dim_, static_cast<size_t>(dim_)};
  }
  const std::vector<double>& values() const { return values_; }

  void Append(std::span<const double> x);
  void Replace(size_t i, std::span<const double> x);
  Dataset Subset(std::span<const size_t> indices) const;
  // Projects every point onto a single coordinate.
  Dataset Coordinate(int axis) const;

  bool operator==(const Dataset& other) const = default;

 private:
  int dim_;
  DataRole role_;
  std::vector<double> values_;
};

class GaussianParams {
 public:
  // Validates symmetry and positive definiteness (smallest eigenvalue at
  // least kMinCovarianceEigenvalue).
  static absl::StatusOr<GaussianParams> Create(Eigen::VectorXd mean,
                                               Eigen::MatrixXd covariance);
  static absl::StatusOr<GaussianParams> Univariate(double mean,
                                                   double variance);

  int dim() const { return static_cast<int>(mean_.size()); }
  const Eigen::VectorXd& mean() const { return mean_; }
  const Eigen::MatrixXd& covariance() const { return covariance_; }
  // Lower-triangular L with covariance = L L^T.
  const Eigen::MatrixXd& cholesky() const { return cholesky_; }

  double LogDensity(std::span<const double> x) const;
  void SampleInto(Rng& rng, std::span<double> out) const;

 private:
  GaussianParams(Eigen::VectorXd mean, Eigen::MatrixXd covariance,
                 Eigen::MatrixXd cholesky, double log_normalizer)
      : mean_(std::move(mean)),
        covariance_(std::move(covariance)),
        cholesky_(std::move(cholesky)),
        log_normalizer_(log_normalizer) {}

  Eigen::VectorXd mean_;
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd cholesky_;
  double log_normalizer_;
};

// Probability masses over the domain {0, ..., D-1}. Points are encoded as
// one-dimensional vectors holding the integer value.
class FiniteDist {
 public:
  static absl::StatusOr<FiniteDist> Create(std::vector<double> masses);

  int domain_size() const { return static_cast<int>(masses_.size()); }
  const std::vector<double>& masses() const { return masses_; }
  double mass(int x) const { return masses_[x]; }
  // Mass of the subset encoded as a bit mask over the domain.
  double MassOf(uint64_t mask) const;
  int Draw(Rng& rng) const;

 private:
  explicit FiniteDist(std::vector<double> masses, std::vector<double> cdf)
      : masses_(std::move(masses)), cdf_(std::move(cdf)) {}

  std::vector<double> masses_;
  std::vector<double> cdf_;
};

class Distribution;

struct MixtureParams {
  std::vector<Distribution> components;
  std::vector<double> weights;
};

struct ProductParams {
  std::vector<Distribution> factors;
};

// Tagged union of the supported families. Immutable after construction.
class Distribution {
 public:
  using Variant =
      std::variant<GaussianParams, MixtureParams, ProductParams, FiniteDist>;

  Distribution(GaussianParams g) : dim_(g.dim()), v_(std::move(g)) {}  // NOLINT
  Distribution(FiniteDist f) : dim_(1), v_(std::move(f)) {}            // NOLINT

  static absl::StatusOr<Distribution> Mixture(
      std::vector<Distribution> components, std::vector<double> weights);
  static absl::StatusOr<Distribution> Product(
      std::vector<Distribution> factors);

  int dim() const { return dim_; }
  const Variant& variant() const { return v_; }

  template <typename T>
  const T* As() const {
    return std::get_if<T>(&v_);
  }

  // Univariate Gaussian, the hot path of every 1-d routine.
  bool IsGaussian1d() const {
    const auto* g = As<GaussianParams>();
    return g != nullptr && g->dim() == 1;
  }

 private:
  Distribution(int dim, Variant v) : dim_(dim), v_(std::move(v)) {}

  int dim_;
  Variant v_;
};

// Density (or mass, for FiniteDist) at x.
absl::StatusOr<double> Density(const Distribution& dist,
                               std::span<const double> x);

// Log density without the dimension check; x.size() must equal dist.dim().
double LogDensityAt(const Distribution& dist, std::span<const double> x);

// Writes one draw into out (size dist.dim()).
void SampleInto(const Distribution& dist, Rng& rng, std::span<double> out);

// count i.i.d. draws; identical (dist, count, seed) give identical datasets.
absl::StatusOr<Dataset> Sample(const Distribution& dist, int count,
                               RngSeed seed, DataRole role = DataRole::kPublic);

// Standard normal CDF evaluated without cancellation in either tail.
double NormalCdf(double z);
// P(lo < Z < hi) for standard normal Z, accurate in the tails.
double NormalIntervalMass(double lo, double hi);

// Cumulative distribution function of a univariate distribution (Gaussian,
// mixture of univariates, or FiniteDist treated as atoms).
double Cdf1d(const Distribution& dist, double x);

}  // namespace ppdl

#endif  // PPDL_DISTRIBUTIONS_H_
