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

#include "ppdl/total_variation.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/status/status.h"
#include "absl/strings/str_format.h"
#include "ppdl/status_macros.h"

namespace ppdl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Roots of a z^2 + b z + c = 0 in ascending order, using the cancellation-free
// form. Returns the number of real roots (0 or 2; a double root counts as 0
// because the sign of the quadratic does not change there).
int QuadraticRoots(double a, double b, double c, double& r0, double& r1) {
  const double disc = b * b - 4.0 * a * c;
  if (!(disc > 0.0)) return 0;
  const double s = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(s, b));
  double x0 = q / a;
  double x1 = c / q;
  if (x0 > x1) std::swap(x0, x1);
  r0 = x0;
  r1 = x1;
  return 2;
}

}  // namespace

Normal1d AsNormal1d(const GaussianParams& g) {
  return Normal1d{g.mean()(0), g.cholesky()(0, 0)};
}

int DominanceIntervals(const Normal1d& p, const Normal1d& q,
                       std::array<Interval, 2>& out) {
  // Standardize on p: z = (x - mp) / sp. Then p is N(0, 1) and q is
  // N(delta, rho^2), and p > q  <=>  f(z) < 0 with
  //   f(z) = z^2 - (z - delta)^2 / rho^2 - 2 ln(rho).
  const double delta = (q.mean - p.mean) / p.sd;
  const double rho = q.sd / p.sd;
  const double inv_rho2 = 1.0 / (rho * rho);
  const double a = 1.0 - inv_rho2;
  const double b = 2.0 * delta * inv_rho2;
  const double c = -delta * delta * inv_rho2 - 2.0 * std::log(rho);
  auto to_x = [&](double z) { return std::isinf(z) ? z : p.mean + p.sd * z; };

  if (a == 0.0) {
    if (b == 0.0) {
      if (c < 0.0) {
        out[0] = {-kInf, kInf};
        return 1;
      }
      return 0;
    }
    const double root = to_x(-c / b);
    out[0] = b > 0.0 ? Interval{-kInf, root} : Interval{root, kInf};
    return 1;
  }
  double r0 = 0.0, r1 = 0.0;
  const int roots = QuadraticRoots(a, b, c, r0, r1);
  if (a > 0.0) {
    // p narrower than q: p dominates between the roots.
    if (roots == 0) return 0;
    out[0] = {to_x(r0), to_x(r1)};
    return 1;
  }
  if (roots == 0) {
    out[0] = {-kInf, kInf};
    return 1;
  }
  out[0] = {-kInf, to_x(r0)};
  out[1] = {to_x(r1), kInf};
  return 2;
}

double IntervalMass(const Normal1d& p, std::span<const Interval> intervals) {
  double total = 0.0;
  for (const auto& iv : intervals) {
    total +=
        NormalIntervalMass((iv.lo - p.mean) / p.sd, (iv.hi - p.mean) / p.sd);
  }
  return total;
}

double TvGaussian1d(const Normal1d& p_in, const Normal1d& q_in) {
  // Canonical argument order makes the result exactly symmetric.
  Normal1d p = p_in;
  Normal1d q = q_in;
  if (q.sd < p.sd || (q.sd == p.sd && q.mean < p.mean)) std::swap(p, q);
  if (p.sd == q.sd && p.mean == q.mean) return 0.0;
  std::array<Interval, 2> iv;
  const int count = DominanceIntervals(p, q, iv);
  const std::span<const Interval> set(iv.data(), count);
  const double tv = IntervalMass(p, set) - IntervalMass(q, set);
  return std::clamp(tv, 0.0, 1.0);
}

absl::StatusOr<double> TvExactGaussian1d(const GaussianParams& p,
                                         const GaussianParams& q) {
  if (p.dim() != 1 || q.dim() != 1) {
    return absl::InvalidArgumentError(
        "exact Gaussian TV requires univariate arguments");
  }
  return TvGaussian1d(AsNormal1d(p), AsNormal1d(q));
}

double GaussianTvLowerBound1d(const Normal1d& p, const Normal1d& q) {
  const double v1 = p.sd * p.sd;
  const double v2 = q.sd * q.sd;
  const double ratio = std::abs(v1 - v2) / v1;
  const double shift = 40.0 * std::abs(p.mean - q.mean) / p.sd;
  return std::min(1.0, std::max(ratio, shift)) / 200.0;
}

absl::StatusOr<double> TvFinite(const FiniteDist& p, const FiniteDist& q) {
  if (p.domain_size() != q.domain_size()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "finite domains differ: %d vs %d", p.domain_size(), q.domain_size()));
  }
  double total = 0.0;
  for (int x = 0; x < p.domain_size(); ++x) {
    total += std::abs(p.mass(x) - q.mass(x));
  }
  return std::clamp(0.5 * total, 0.0, 1.0);
}

std::string_view TvMethodName(TvMethod method) {
  switch (method) {
    case TvMethod::kExactGaussian1d:
      return "exact-gaussian-1d";
    case TvMethod::kExactFinite:
      return "exact-finite";
    case TvMethod::kMonteCarlo:
      return "monte-carlo";
  }
  return "unknown";
}

absl::StatusOr<TvEstimate> TvMonteCarlo(const Distribution& p,
                                        const Distribution& q, int trials,
                                        RngSeed seed) {
  if (p.dim() != q.dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "TV between distributions of dimension %d and %d", p.dim(), q.dim()));
  }
  if (trials < 100) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Monte-Carlo TV needs >= 100 trials, got %d", trials));
  }
  std::vector<double> x(p.dim());
  auto dominance_rate = [&](const Distribution& source, RngSeed s) {
    Rng rng = MakeRng(s);
    int64_t hits = 0;
    for (int i = 0; i < trials; ++i) {
      SampleInto(source, rng, x);
      if (LogDensityAt(p, x) > LogDensityAt(q, x)) ++hits;
    }
    return static_cast<double>(hits) / trials;
  };
  const double a = dominance_rate(p, DeriveSeed(seed, 1));
  const double b = dominance_rate(q, DeriveSeed(seed, 2));
  TvEstimate out;
  out.value = std::clamp(a - b, 0.0, 1.0);
  out.half_width = 1.96 * std::sqrt((a * (1 - a) + b * (1 - b)) / trials);
  out.method = TvMethod::kMonteCarlo;
  return out;
}

absl::StatusOr<TvEstimate> TotalVariation(const Distribution& p,
                                          const Distribution& q,
                                          const TvOptions& options) {
  if (p.dim() != q.dim()) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "TV between distributions of dimension %d and %d", p.dim(), q.dim()));
  }
  if (p.IsGaussian1d() && q.IsGaussian1d()) {
    return TvEstimate{TvGaussian1d(AsNormal1d(*p.As<GaussianParams>()),
                                   AsNormal1d(*q.As<GaussianParams>())),
                      0.0, TvMethod::kExactGaussian1d};
  }
  const auto* fp = p.As<FiniteDist>();
  const auto* fq = q.As<FiniteDist>();
  if (fp != nullptr && fq != nullptr) {
    PPDL_ASSIGN_OR_RETURN(const double tv, TvFinite(*fp, *fq));
    return TvEstimate{tv, 0.0, TvMethod::kExactFinite};
  }
  return TvMonteCarlo(p, q, options.mc_trials, options.seed);
}

absl::StatusOr<TvEstimate> PointSetDistance(const Distribution& p,
                                            std::span<const Distribution> list,
                                            const TvOptions& options) {
  if (list.empty()) {
    return absl::InvalidArgumentError("point-set distance to an empty list");
  }
  TvEstimate best;
  best.value = kInf;
  for (size_t i = 0; i < list.size(); ++i) {
    TvOptions per = options;
    per.seed = DeriveSeed(options.seed, i);
    PPDL_ASSIGN_OR_RETURN(const TvEstimate tv, TotalVariation(p, list[i], per));
    if (tv.value < best.value) best = tv;
  }
  return best;
}

}  // namespace ppdl
