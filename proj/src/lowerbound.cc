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

#include "ppdl/lowerbound.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ppdl/io.h"
#include "ppdl/parallel.h"
#include "ppdl/status_macros.h"

namespace ppdl {
namespace {

const double kBandLimit = std::sqrt(3.0) / 2.0;

absl::Status CheckArgs(int k, int d) {
  if (k < 1) return absl::InvalidArgumentError("k must be >= 1");
  if (d < kMinLowerBoundDim || d > kMaxLowerBoundDim) {
    return absl::InvalidArgumentError(
        absl::StrFormat("d must lie in [%d, %d], got %d", kMinLowerBoundDim,
                        kMaxLowerBoundDim, d));
  }
  return absl::OkStatus();
}

ProportionEstimate Binomial(int64_t hits, int64_t trials) {
  const double p = static_cast<double>(hits) / trials;
  return {p, 1.96 * std::sqrt(p * (1.0 - p) / trials)};
}

Eigen::VectorXd SampleDisk(int dim, Rng& rng) {
  Eigen::VectorXd t(dim);
  do {
    for (int i = 0; i < dim; ++i) t(i) = UniformUnit(rng) - 0.5;
  } while (t.squaredNorm() > 0.25);
  return t;
}

Eigen::VectorXd SampleBand(int d, Rng& rng) {
  Eigen::VectorXd u(d);
  while (true) {
    for (int i = 0; i < d; ++i) u(i) = StandardNormal(rng);
    const double norm = u.norm();
    if (norm == 0.0) continue;
    u /= norm;
    if (std::abs(u(d - 1)) <= kBandLimit) return u;
  }
}

void SampleCylinder(int d, Rng& rng, std::span<double> out) {
  const Eigen::VectorXd r = SampleDisk(d - 1, rng);
  for (int i = 0; i < d - 1; ++i) out[i] = r(i);
  out[d - 1] = 1.0 + UniformUnit(rng);
}

// Quadratic form of the inverse covariance at y = x - (t, 0).
double FlatQuadratic(int k, const Eigen::VectorXd& t, const Eigen::VectorXd& u,
                     std::span<const double> x) {
  const int d = static_cast<int>(u.size());
  double uy = 0.0, yy = 0.0;
  for (int i = 0; i < d; ++i) {
    const double y = x[i] - (i < d - 1 ? t(i) : 0.0);
    uy += u(i) * y;
    yy += y * y;
  }
  return static_cast<double>(k) * k * uy * uy + yy - uy * uy;
}

double FlatLogNormalizer(int k, int d) {
  return -0.5 * d * std::log(2.0 * std::numbers::pi) + std::log(k);
}

double Angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::acos(std::clamp(a.dot(b), -1.0, 1.0));
}

Eigen::VectorXd RHat(const Eigen::VectorXd& u) {
  const int d = static_cast<int>(u.size());
  Eigen::VectorXd r = u.head(d - 1);
  return r / r.norm();
}

// Product of two independent proportions with a delta-method half-width.
ProportionEstimate Product(const ProportionEstimate& a,
                           const ProportionEstimate& b) {
  const double sa = a.half_width / 1.96;
  const double sb = b.half_width / 1.96;
  return {a.value * b.value, 1.96 * std::sqrt(b.value * b.value * sa * sa +
                                              a.value * a.value * sb * sb)};
}

}  // namespace

absl::Status ValidateFlat(const FlatGaussianParams& p) {
  const int d = p.dim();
  PPDL_RETURN_IF_ERROR(CheckArgs(p.k, d));
  if (p.t.size() != d - 1) {
    return absl::InvalidArgumentError("t must have length d - 1");
  }
  if (p.t.norm() > 0.5 + 1e-12) {
    return absl::InvalidArgumentError("t must lie in the disk of radius 1/2");
  }
  if (std::abs(p.u.norm() - 1.0) > 1e-12) {
    return absl::InvalidArgumentError("u must be a unit vector");
  }
  if (std::abs(p.u(d - 1)) > kBandLimit + 1e-12) {
    return absl::InvalidArgumentError("u must satisfy |u_d| <= sqrt(3)/2");
  }
  return absl::OkStatus();
}

Eigen::MatrixXd HouseholderCompletion(const Eigen::VectorXd& u, int pivot) {
  const int d = static_cast<int>(u.size());
  Eigen::VectorXd w = u;
  w(pivot) -= 1.0;
  const double ww = w.squaredNorm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(d, d);
  if (ww > 0.0) h -= (2.0 / ww) * w * w.transpose();
  // h e_pivot = u; move that column to the front.
  Eigen::MatrixXd r(d, d);
  r.col(0) = h.col(pivot);
  int next = 1;
  for (int j = 0; j < d; ++j) {
    if (j != pivot) r.col(next++) = h.col(j);
  }
  return r;
}

absl::StatusOr<GaussianParams> MakeFlatGaussian(const FlatGaussianParams& p,
                                                int pivot) {
  PPDL_RETURN_IF_ERROR(ValidateFlat(p));
  const int d = p.dim();
  if (pivot < 0 || pivot >= d) {
    return absl::InvalidArgumentError("pivot out of range");
  }
  const Eigen::MatrixXd r = HouseholderCompletion(p.u, pivot);
  Eigen::VectorXd diag = Eigen::VectorXd::Ones(d);
  diag(0) = 1.0 / (static_cast<double>(p.k) * p.k);
  Eigen::MatrixXd cov = r * diag.asDiagonal() * r.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  Eigen::VectorXd mean = Eigen::VectorXd::Zero(d);
  mean.head(d - 1) = p.t;
  return GaussianParams::Create(std::move(mean), std::move(cov));
}

double FlatLogDensity(const FlatGaussianParams& p, std::span<const double> x) {
  return FlatLogNormalizer(p.k, p.dim()) -
         0.5 * FlatQuadratic(p.k, p.t, p.u, x);
}

void SampleFlat(const FlatGaussianParams& p, Rng& rng, std::span<double> out) {
  const int d = p.dim();
  double uz = 0.0;
  for (int i = 0; i < d; ++i) {
    out[i] = StandardNormal(rng);
    uz += p.u(i) * out[i];
  }
  const double shrink = (1.0 / p.k - 1.0) * uz;
  for (int i = 0; i < d; ++i) {
    out[i] += shrink * p.u(i) + (i < d - 1 ? p.t(i) : 0.0);
  }
}

FlatGaussianParams SampleInstance(int k, int d, Rng& rng) {
  FlatGaussianParams p;
  p.k = k;
  p.t = SampleDisk(d - 1, rng);
  p.u = SampleBand(d, rng);
  return p;
}

bool InCylinder(std::span<const double> x) {
  const size_t d = x.size();
  double radial = 0.0;
  for (size_t i = 0; i + 1 < d; ++i) radial += x[i] * x[i];
  return radial <= 0.25 && x[d - 1] >= 1.0 && x[d - 1] <= 2.0;
}

double UkValue(int k, int d) {
  return std::pow(
      std::pow(2.0 * std::numbers::pi, -0.5 * d) * k * std::exp(-0.5), d - 1);
}

double CValue(int d) { return std::exp(4.5 * (d - 1)); }

double SkLogThreshold(int k, int d) {
  return (d - 1) * (FlatLogNormalizer(k, d) - 5.0);
}

absl::StatusOr<ProportionEstimate> EstimateEta(int k, int d, int trials,
                                               RngSeed seed) {
  PPDL_RETURN_IF_ERROR(CheckArgs(k, d));
  if (k < kMinEtaK) {
    return absl::InvalidArgumentError(
        absl::StrFormat("eta needs k >= %d, got %d", kMinEtaK, k));
  }
  if (trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  const size_t blocks = std::min<size_t>(64, trials);
  std::vector<int64_t> hits(blocks, 0);
  ParallelFor(blocks, [&](size_t b) {
    Rng rng = MakeRng(DeriveSeed(seed, b));
    const int64_t begin = trials * static_cast<int64_t>(b) / blocks;
    const int64_t end = trials * static_cast<int64_t>(b + 1) / blocks;
    std::vector<double> x(d);
    for (int64_t i = begin; i < end; ++i) {
      const FlatGaussianParams q = SampleInstance(k, d, rng);
      bool inside = true;
      for (int j = 0; j < d - 1 && inside; ++j) {
        SampleFlat(q, rng, x);
        inside = InCylinder(x);
      }
      if (inside) ++hits[b];
    }
  });
  int64_t total = 0;
  for (int64_t h : hits) total += h;
  return Binomial(total, trials);
}

bool SeparationCertified(const FlatGaussianParams& p,
                         const FlatGaussianParams& q) {
  const double window = std::sqrt(2.0) * std::numbers::pi / (2.0 * p.k);
  const double angle = Angle(p.u, q.u);
  if (angle >= window && angle <= std::numbers::pi - window) return true;
  const double shift = (q.t - p.t).dot(RHat(p.u));
  return std::abs(shift) >= 1.0 / (20.0 * p.k);
}

absl::StatusOr<ProportionEstimate> EstimateRk(int k, int d, int outer,
                                              int inner, RngSeed seed) {
  PPDL_RETURN_IF_ERROR(CheckArgs(k, d));
  if (outer < 0 || inner < 1) {
    return absl::InvalidArgumentError("outer must be >= 0 and inner >= 1");
  }
  const double window = std::sqrt(2.0) * std::numbers::pi / (2.0 * k);
  const double strip = 1.0 / (20.0 * k);
  std::vector<ProportionEstimate> per(outer + 1);
  ParallelFor(outer + 1, [&](size_t o) {
    Rng rng = MakeRng(DeriveSeed(seed, o));
    FlatGaussianParams p;
    if (o == 0) {
      p.k = k;
      p.t = Eigen::VectorXd::Zero(d - 1);
      p.u = Eigen::VectorXd::Unit(d, 0);
    } else {
      p = SampleInstance(k, d, rng);
    }
    const Eigen::VectorXd r_hat = RHat(p.u);
    int64_t near_t = 0, near_u = 0;
    for (int i = 0; i < inner; ++i) {
      const Eigen::VectorXd t = SampleDisk(d - 1, rng);
      if (std::abs((t - p.t).dot(r_hat)) < strip) ++near_t;
    }
    for (int i = 0; i < inner; ++i) {
      const double angle = Angle(p.u, SampleBand(d, rng));
      if (angle < window || angle > std::numbers::pi - window) ++near_u;
    }
    per[o] = Product(Binomial(near_t, inner), Binomial(near_u, inner));
  });
  ProportionEstimate best = per.front();
  for (const auto& e : per) {
    if (e.value > best.value) best = e;
  }
  return best;
}

absl::StatusOr<ProportionEstimate> EstimateSk(int k, int d, int x_trials,
                                              int q_trials, RngSeed seed) {
  PPDL_RETURN_IF_ERROR(CheckArgs(k, d));
  if (x_trials < 0 || q_trials < 1) {
    return absl::InvalidArgumentError(
        "x_trials must be >= 0 and q_trials >= 1");
  }
  const double threshold = SkLogThreshold(k, d);
  const double normalizer = FlatLogNormalizer(k, d);
  std::vector<ProportionEstimate> per(x_trials + 1);
  ParallelFor(x_trials + 1, [&](size_t o) {
    Rng rng = MakeRng(DeriveSeed(seed, o));
    std::vector<double> points((d - 1) * d);
    for (int i = 0; i < d - 1; ++i) {
      const std::span<double> x(&points[i * d], d);
      if (o == 0) {
        std::fill(x.begin(), x.end(), 0.0);
        x[0] = 0.5;
        x[d - 1] = 2.0;
      } else {
        SampleCylinder(d, rng, x);
      }
    }
    int64_t hits = 0;
    for (int i = 0; i < q_trials; ++i) {
      const FlatGaussianParams q = SampleInstance(k, d, rng);
      double loglik = 0.0;
      for (int j = 0; j < d - 1; ++j) {
        loglik += normalizer - 0.5 * FlatQuadratic(k, q.t, q.u,
                                                   std::span<const double>(
                                                       &points[j * d], d));
      }
      if (loglik >= threshold) ++hits;
    }
    per[o] = Binomial(hits, q_trials);
  });
  ProportionEstimate best = per.front();
  for (const auto& e : per) {
    if (e.value < best.value) best = e;
  }
  return best;
}

absl::StatusOr<NflReport> MakeNflReport(int d, std::span<const int> ks,
                                        const NflBudgets& budgets,
                                        RngSeed seed) {
  if (ks.empty()) return absl::InvalidArgumentError("k list is empty");
  NflReport report;
  report.d = d;
  for (size_t i = 0; i < ks.size(); ++i) {
    const int k = ks[i];
    PPDL_RETURN_IF_ERROR(CheckArgs(k, d));
    const RngSeed row_seed = DeriveSeed(seed, static_cast<uint64_t>(k));
    NflRow row;
    row.k = k;
    PPDL_ASSIGN_OR_RETURN(row.eta, EstimateEta(k, d, budgets.eta_trials,
                                               DeriveSeed(row_seed, 1)));
    row.u_k = UkValue(k, d);
    row.c = CValue(d);
    PPDL_ASSIGN_OR_RETURN(row.rk,
                          EstimateRk(k, d, budgets.rk_outer, budgets.rk_inner,
                                     DeriveSeed(row_seed, 2)));
    PPDL_ASSIGN_OR_RETURN(row.sk, EstimateSk(k, d, budgets.sk_x, budgets.sk_q,
                                             DeriveSeed(row_seed, 3)));
    row.ratio = row.sk.value > 0.0 ? row.rk.value / row.sk.value
                                   : std::numeric_limits<double>::infinity();
    report.rows.push_back(row);
  }

  std::vector<const NflRow*> sorted;
  for (const auto& r : report.rows) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(),
            [](const NflRow* a, const NflRow* b) { return a->k < b->k; });
  for (const NflRow* r : sorted) {
    if (!(r->eta.value - r->eta.half_width > 0.0)) report.eta_positive = false;
  }
  if (sorted.size() < 2) {
    report.warnings.push_back(
        "a single k was given: trend flags hold vacuously");
  } else {
    for (size_t a = 0; a < sorted.size(); ++a) {
      for (size_t b = a + 1; b < sorted.size(); ++b) {
        const auto& ea = sorted[a]->eta;
        const auto& eb = sorted[b]->eta;
        if (std::abs(ea.value - eb.value) > ea.half_width + eb.half_width) {
          report.eta_stable = false;
        }
      }
    }
    // Least-squares slope of log r_k against log k.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool positive = true;
    for (const NflRow* r : sorted) {
      if (!(r->rk.value > 0.0)) positive = false;
      const double x = std::log(r->k);
      const double y = std::log(r->rk.value);
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double n = static_cast<double>(sorted.size());
    const double denom = n * sxx - sx * sx;
    if (!positive || denom <= 0.0) {
      report.rk_slope = std::numeric_limits<double>::quiet_NaN();
      report.rk_decay = false;
      report.warnings.push_back(
          "r_k estimate is zero or k values repeat: slope undefined");
    } else {
      report.rk_slope = (n * sxy - sx * sy) / denom;
      report.rk_decay = report.rk_slope <= -1.5;
    }
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (const NflRow* r : sorted) {
      const double scaled = r->sk.value * r->k;
      lo = std::min(lo, scaled);
      hi = std::max(hi, scaled);
    }
    report.sk_band = lo > 0.0 && hi <= 3.0 * lo;
    for (size_t a = 1; a < sorted.size(); ++a) {
      if (!(sorted[a]->ratio < sorted[a - 1]->ratio)) {
        report.ratio_decreasing = false;
      }
    }
  }
  report.decay_flag = report.eta_positive && report.eta_stable &&
                      report.rk_decay && report.sk_band &&
                      report.ratio_decreasing;
  return report;
}

std::string FormatNflCsv(const NflReport& report) {
  std::string out =
      "k,eta_hat,eta_ci,u_k,c,rk_hat,rk_ci,sk_hat,sk_ci,ratio,decay_flag\n";
  for (const auto& r : report.rows) {
    absl::StrAppend(&out, r.k, ",", FormatDouble(r.eta.value), ",",
                    FormatDouble(r.eta.half_width), ",", FormatDouble(r.u_k),
                    ",", FormatDouble(r.c), ",", FormatDouble(r.rk.value), ",",
                    FormatDouble(r.rk.half_width), ",",
                    FormatDouble(r.sk.value), ",",
                    FormatDouble(r.sk.half_width), ",", FormatDouble(r.ratio),
                    ",", report.decay_flag ? 1 : 0, "\n");
  }
  return out;
}

}  // namespace ppdl
