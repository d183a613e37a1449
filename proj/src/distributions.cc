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

#include "ppdl/distributions.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "ppdl/status_macros.h"

namespace ppdl {
namespace {

constexpr double kLogTwoPi = 1.8378770664093454835606594728112;

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double LogSumExp(std::span<const double> terms) {
  double top = -std::numeric_limits<double>::infinity();
  for (double t : terms) top = std::max(top, t);
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (double t : terms) sum += std::exp(t - top);
  return top + std::log(sum);
}

}  // namespace

absl::StatusOr<Dataset> Dataset::FromRows(
    const std::vector<std::vector<double>>& rows, DataRole role) {
  if (rows.empty()) {
    return absl::InvalidArgumentError("dataset has no points");
  }
  const int dim = static_cast<int>(rows.front().size());
  if (dim < 1) return absl::InvalidArgumentError("points must have dim >= 1");
  Dataset out(dim, role);
  for (const auto& row : rows) {
    if (static_cast<int>(row.size()) != dim) {
      return absl::InvalidArgumentError(absl::StrFormat(
          "inconsistent point dimension: %d vs %d", row.size(), dim));
    }
    out.Append(row);
  }
  return out;
}

Dataset Dataset::FromScalars(std::span<const double> values, DataRole role) {
  Dataset out(1, role);
  out.values_.assign(values.begin(), values.end());
  return out;
}

void Dataset::Append(std::span<const double> x) {
  values_.insert(values_.end(), x.begin(), x.end());
}

void Dataset::Replace(size_t i, std::span<const double> x) {
  std::copy(x.begin(), x.end(), values_.begin() + i * dim_);
}

Dataset Dataset::Subset(std::span<const size_t> indices) const {
  Dataset out(dim_, role_);
  out.values_.reserve(indices.size() * dim_);
  for (size_t i : indices) out.Append(point(i));
  return out;
}

Dataset Dataset::Coordinate(int axis) const {
  Dataset out(1, role_);
  out.values_.reserve(size());
  for (size_t i = 0; i < size(); ++i) out.values_.push_back(point(i)[axis]);
  return out;
}

absl::StatusOr<GaussianParams> GaussianParams::Create(
    Eigen::VectorXd mean, Eigen::MatrixXd covariance) {
  const Eigen::Index d = mean.size();
  if (d < 1)
    return absl::InvalidArgumentError("Gaussian dimension must be >= 1");
  if (covariance.rows() != d || covariance.cols() != d) {
    return absl::InvalidArgumentError(
        absl::StrFormat("covariance is %dx%d but mean has dimension %d",
                        covariance.rows(), covariance.cols(), d));
  }
  if (!mean.allFinite() || !covariance.allFinite()) {
    return absl::InvalidArgumentError("Gaussian parameters must be finite");
  }
  const double scale = std::max(1.0, covariance.cwiseAbs().maxCoeff());
  if ((covariance - covariance.transpose()).cwiseAbs().maxCoeff() >
      1e-12 * scale) {
    return absl::InvalidArgumentError("covariance is not symmetric");
  }
  covariance = 0.5 * (covariance + covariance.transpose()).eval();
  double min_eig;
  if (d == 1) {
    min_eig = covariance(0, 0);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(covariance,
                                                       Eigen::EigenvaluesOnly);
    min_eig = eig.eigenvalues().minCoeff();
  }
  if (!(min_eig >= kMinCovarianceEigenvalue)) {
    return absl::FailedPreconditionError(absl::StrFormat(
        "covariance is not positive definite (smallest eigenvalue %g < %g)",
        min_eig, kMinCovarianceEigenvalue));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance);
  if (llt.info() != Eigen::Success) {
    return absl::FailedPreconditionError("Cholesky factorization failed");
  }
  Eigen::MatrixXd l = llt.matrixL();
  const double log_det = 2.0 * l.diagonal().array().log().sum();
  const double log_normalizer =
      -0.5 * (static_cast<double>(d) * kLogTwoPi + log_det);
  return GaussianParams(std::move(mean), std::move(covariance), std::move(l),
                        log_normalizer);
}

absl::StatusOr<GaussianParams> GaussianParams::Univariate(double mean,
                                                          double variance) {
  return Create(Eigen::VectorXd::Constant(1, mean),
                Eigen::MatrixXd::Constant(1, 1, variance));
}

double GaussianParams::LogDensity(std::span<const double> x) const {
  const int d = dim();
  if (d == 1) {
    const double z = (x[0] - mean_(0)) / cholesky_(0, 0);
    return log_normalizer_ - 0.5 * z * z;
  }
  Eigen::VectorXd diff(d);
  for (int i = 0; i < d; ++i) diff(i) = x[i] - mean_(i);
  cholesky_.triangularView<Eigen::Lower>().solveInPlace(diff);
  return log_normalizer_ - 0.5 * diff.squaredNorm();
}

void GaussianParams::SampleInto(Rng& rng, std::span<double> out) const {
  const int d = dim();
  if (d == 1) {
    out[0] = mean_(0) + cholesky_(0, 0) * StandardNormal(rng);
    return;
  }
  Eigen::VectorXd z(d);
  for (int i = 0; i < d; ++i) z(i) = StandardNormal(rng);
  const Eigen::VectorXd x = mean_ + cholesky_ * z;
  for (int i = 0; i < d; ++i) out[i] = x(i);
}

absl::StatusOr<FiniteDist> FiniteDist::Create(std::vector<double> masses) {
  if (masses.empty() || static_cast<int>(masses.size()) > kMaxFiniteDomain) {
    return absl::InvalidArgumentError(
        absl::StrFormat("finite domain size must be in [1, %d], got %d",
                        kMaxFiniteDomain, masses.size()));
  }
  double total = 0.0;
  for (double m : masses) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      return absl::InvalidArgumentError(
          "masses must be finite and nonnegative");
    }
    total += m;
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    return absl::InvalidArgumentError(
        absl::StrFormat("masses sum to %.17g, not 1", total));
  }
  std::vector<double> cdf(masses.size());
  double acc = 0.0;
  for (size_t i = 0; i < masses.size(); ++i) {
    acc += masses[i];
    cdf[i] = acc;
  }
  return FiniteDist(std::move(masses), std::move(cdf));
}

double FiniteDist::MassOf(uint64_t mask) const {
  double total = 0.0;
  for (int x = 0; x < domain_size(); ++x) {
    if (mask >> x & 1ULL) total += masses_[x];
  }
  return total;
}

int FiniteDist::Draw(Rng& rng) const {
  const double u = UniformUnit(rng) * cdf_.back();
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  int x = static_cast<int>(it - cdf_.begin());
  x = std::min(x, domain_size() - 1);
  // Never return an atom with zero mass.
  while (masses_[x] == 0.0 && x > 0) --x;
  while (masses_[x] == 0.0 && x + 1 < domain_size()) ++x;
  return x;
}

absl::StatusOr<Distribution> Distribution::Mixture(
    std::vector<Distribution> components, std::vector<double> weights) {
  if (components.empty()) {
    return absl::InvalidArgumentError("mixture needs at least one component");
  }
  if (components.size() != weights.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("mixture has %d components but %d weights",
                        components.size(), weights.size()));
  }
  const int dim = components.front().dim();
  double total = 0.0;
  for (size_t i = 0; i < components.size(); ++i) {
    if (components[i].dim() != dim) {
      return absl::InvalidArgumentError(
          "mixture components must share a dimension");
    }
    if (!(weights[i] >= 0.0)) {
      return absl::InvalidArgumentError("mixture weights must be nonnegative");
    }
    total += weights[i];
  }
  if (std::abs(total - 1.0) > kWeightSumTolerance) {
    return absl::InvalidArgumentError(
        absl::StrFormat("mixture weights sum to %.17g, not 1", total));
  }
  return Distribution(dim,
                      MixtureParams{std::move(components), std::move(weights)});
}

absl::StatusOr<Distribution> Distribution::Product(
    std::vector<Distribution> factors) {
  if (factors.empty()) {
    return absl::InvalidArgumentError("product needs at least one factor");
  }
  int dim = 0;
  for (const auto& f : factors) dim += f.dim();
  return Distribution(dim, ProductParams{std::move(factors)});
}

double LogDensityAt(const Distribution& dist, std::span<const double> x) {
  return std::visit(
      Overloaded{[&](const GaussianParams& g) { return g.LogDensity(x); },
                 [&](const MixtureParams& m) {
                   double buf[16];
                   std::vector<double> heap;
                   double* terms = buf;
                   if (m.components.size() > 16) {
                     heap.resize(m.components.size());
                     terms = heap.data();
                   }
                   for (size_t i = 0; i < m.components.size(); ++i) {
                     terms[i] = m.weights[i] > 0.0
                                    ? std::log(m.weights[i]) +
                                          LogDensityAt(m.components[i], x)
                                    : -std::numeric_limits<double>::infinity();
                   }
                   return LogSumExp({terms, m.components.size()});
                 },
                 [&](const ProductParams& p) {
                   double total = 0.0;
                   size_t offset = 0;
                   for (const auto& f : p.factors) {
                     const size_t fd = static_cast<size_t>(f.dim());
                     total += LogDensityAt(f, x.subspan(offset, fd));
                     offset += fd;
                   }
                   return total;
                 },
                 [&](const FiniteDist& f) {
                   const double v = x[0];
                   const double r = std::round(v);
                   if (r != v || r < 0 || r >= f.domain_size()) {
                     return -std::numeric_limits<double>::infinity();
                   }
                   return std::log(f.mass(static_cast<int>(r)));
                 }},
      dist.variant());
}

absl::StatusOr<double> Density(const Distribution& dist,
                               std::span<const double> x) {
  if (static_cast<int>(x.size()) != dist.dim()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("point has dimension %d but distribution has %d",
                        x.size(), dist.dim()));
  }
  return std::exp(LogDensityAt(dist, x));
}

void SampleInto(const Distribution& dist, Rng& rng, std::span<double> out) {
  std::visit(
      Overloaded{[&](const GaussianParams& g) { g.SampleInto(rng, out); },
                 [&](const MixtureParams& m) {
                   double u = UniformUnit(rng);
                   size_t pick = m.weights.size() - 1;
                   for (size_t i = 0; i < m.weights.size(); ++i) {
                     if (u < m.weights[i]) {
                       pick = i;
                       break;
                     }
                     u -= m.weights[i];
                   }
                   while (m.weights[pick] == 0.0 && pick > 0) --pick;
                   SampleInto(m.components[pick], rng, out);
                 },
                 [&](const ProductParams& p) {
                   size_t offset = 0;
                   for (const auto& f : p.factors) {
                     const size_t fd = static_cast<size_t>(f.dim());
                     SampleInto(f, rng, out.subspan(offset, fd));
                     offset += fd;
                   }
                 },
                 [&](const FiniteDist& f) {
                   out[0] = static_cast<double>(f.Draw(rng));
                 }},
      dist.variant());
}

absl::StatusOr<Dataset> Sample(const Distribution& dist, int count,
                               RngSeed seed, DataRole role) {
  if (count < 1) {
    return absl::InvalidArgumentError(
        absl::StrFormat("sample count must be >= 1, got %d", count));
  }
  Rng rng = MakeRng(seed);
  Dataset out(dist.dim(), role);
  std::vector<double> x(dist.dim());
  for (int i = 0; i < count; ++i) {
    SampleInto(dist, rng, x);
    out.Append(x);
  }
  return out;
}

double NormalCdf(double z) {
  return 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
}

double NormalIntervalMass(double lo, double hi) {
  if (!(hi > lo)) return 0.0;
  // Work in the tail where erfc has full relative precision.
  if (lo >= 0.0) {
    return 0.5 * (std::erfc(lo / std::numbers::sqrt2) -
                  std::erfc(hi / std::numbers::sqrt2));
  }
  if (hi <= 0.0) {
    return 0.5 * (std::erfc(-hi / std::numbers::sqrt2) -
                  std::erfc(-lo / std::numbers::sqrt2));
  }
  return 1.0 - 0.5 * std::erfc(-lo / std::numbers::sqrt2) -
         0.5 * std::erfc(hi / std::numbers::sqrt2);
}

double Cdf1d(const Distribution& dist, double x) {
  return std::visit(
      Overloaded{
          [&](const GaussianParams& g) {
            return NormalCdf((x - g.mean()(0)) / g.cholesky()(0, 0));
          },
          [&](const MixtureParams& m) {
            double total = 0.0;
            for (size_t i = 0; i < m.components.size(); ++i) {
              if (m.weights[i] > 0.0) {
                total += m.weights[i] * Cdf1d(m.components[i], x);
              }
            }
            return total;
          },
          [&](const ProductParams& p) { return Cdf1d(p.factors.front(), x); },
          [&](const FiniteDist& f) {
            double total = 0.0;
            for (int v = 0; v < f.domain_size() && v <= x; ++v) {
              total += f.mass(v);
            }
            return total;
          }},
      dist.variant());
}

}  // namespace ppdl
