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

#include "ppdl/selection.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <utility>

#include "absl/strings/str_format.h"
#include "ppdl/parallel.h"
#include "ppdl/status_macros.h"
#include "ppdl/total_variation.h"

namespace ppdl {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Backend { kGaussian1d, kMixture1d, kFinite, kGeneric };

bool IsUnivariateGaussianMixture(const Distribution& d) {
  if (d.IsGaussian1d()) return true;
  const auto* m = d.As<MixtureParams>();
  if (m == nullptr || d.dim() != 1) return false;
  return std::all_of(m->components.begin(), m->components.end(),
                     [](const Distribution& c) { return c.IsGaussian1d(); });
}

absl::StatusOr<Backend> Classify(std::span<const Distribution> candidates) {
  if (candidates.empty()) {
    return absl::InvalidArgumentError("candidate set is empty");
  }
  if (candidates.size() > kMaxTournamentSize) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "Scheffé tournament over %d candidates needs %d x %d matrices; the "
        "limit is %d candidates",
        candidates.size(), candidates.size(), candidates.size(),
        kMaxTournamentSize));
  }
  const int dim = candidates.front().dim();
  for (const auto& c : candidates) {
    if (c.dim() != dim) {
      return absl::InvalidArgumentError(
          absl::StrFormat("candidates mix dimensions %d and %d", dim, c.dim()));
    }
  }
  if (std::all_of(candidates.begin(), candidates.end(),
                  [](const Distribution& c) { return c.IsGaussian1d(); })) {
    return Backend::kGaussian1d;
  }
  if (std::all_of(candidates.begin(), candidates.end(),
                  IsUnivariateGaussianMixture)) {
    return Backend::kMixture1d;
  }
  const auto* first = candidates.front().As<FiniteDist>();
  if (first != nullptr &&
      std::all_of(
          candidates.begin(), candidates.end(), [&](const Distribution& c) {
            const auto* f = c.As<FiniteDist>();
            return f != nullptr && f->domain_size() == first->domain_size();
          })) {
    return Backend::kFinite;
  }
  return Backend::kGeneric;
}

// Sorted, disjoint open intervals.
using IntervalList = std::vector<Interval>;

// Open intervals between the closed members of `set`.
void OpenComplement(const IntervalList& set, IntervalList& out) {
  out.clear();
  double left = -kInf;
  for (const auto& iv : set) {
    if (iv.lo > left) out.push_back({left, iv.lo});
    left = iv.hi;
  }
  if (left < kInf) out.push_back({left, kInf});
}

double Mass1d(const Distribution& d, const Interval& iv) {
  if (const auto* g = d.As<GaussianParams>()) {
    const double m = g->mean()(0);
    const double s = g->cholesky()(0, 0);
    return NormalIntervalMass((iv.lo - m) / s, (iv.hi - m) / s);
  }
  if (const auto* mix = d.As<MixtureParams>()) {
    double total = 0.0;
    for (size_t k = 0; k < mix->components.size(); ++k) {
      if (mix->weights[k] > 0.0) {
        total += mix->weights[k] * Mass1d(mix->components[k], iv);
      }
    }
    return total;
  }
  return Cdf1d(d, iv.hi) - Cdf1d(d, iv.lo);
}

double Mass1d(const Distribution& d, const IntervalList& set) {
  double total = 0.0;
  for (const auto& iv : set) total += Mass1d(d, iv);
  return std::clamp(total, 0.0, 1.0);
}

// Number of sorted values strictly inside the intervals.
int64_t CountInside(const std::vector<double>& sorted,
                    const IntervalList& set) {
  int64_t total = 0;
  for (const auto& iv : set) {
    const auto lo = std::upper_bound(sorted.begin(), sorted.end(), iv.lo);
    const auto hi = std::lower_bound(lo, sorted.end(), iv.hi);
    total += hi - lo;
  }
  return total;
}

// Scheffé-set geometry for univariate candidates: for each ordered pair the
// open set where one density strictly exceeds the other.
class Geometry1d {
 public:
  static Geometry1d Build(std::span<const Distribution> candidates,
                          Backend backend) {
    Geometry1d g(candidates, backend);
    if (backend == Backend::kGaussian1d) {
      g.normals_.reserve(candidates.size());
      for (const auto& c : candidates) {
        g.normals_.push_back(AsNormal1d(*c.As<GaussianParams>()));
      }
    } else {
      g.BuildScanGrid();
    }
    return g;
  }

  // Fills A_ij and A_ji for i != j.
  void PairSets(size_t i, size_t j, IntervalList& a_ij,
                IntervalList& a_ji) const {
    a_ij.clear();
    a_ji.clear();
    if (backend_ == Backend::kGaussian1d) {
      const Normal1d& p = normals_[i];
      const Normal1d& q = normals_[j];
      if (p.mean == q.mean && p.sd == q.sd) return;
      std::array<Interval, 2> iv;
      const int count = DominanceIntervals(p, q, iv);
      a_ij.assign(iv.begin(), iv.begin() + count);
      OpenComplement(a_ij, a_ji);
      return;
    }
    // Two distinct analytic densities cannot agree on an interval, so the
    // reverse set is the open complement; an empty forward set means the
    // densities coincide.
    Scan(i, j, a_ij);
    if (!a_ij.empty()) OpenComplement(a_ij, a_ji);
  }

 private:
  Geometry1d(std::span<const Distribution> candidates, Backend backend)
      : candidates_(candidates), backend_(backend) {}

  void BuildScanGrid() {
    double lo = kInf, hi = -kInf, min_sd = kInf;
    auto visit = [&](const Distribution& d) {
      const Normal1d n = AsNormal1d(*d.As<GaussianParams>());
      lo = std::min(lo, n.mean - 10.0 * n.sd);
      hi = std::max(hi, n.mean + 10.0 * n.sd);
      min_sd = std::min(min_sd, n.sd);
    };
    for (const auto& c : candidates_) {
      if (const auto* m = c.As<MixtureParams>()) {
        for (const auto& comp : m->components) visit(comp);
      } else {
        visit(c);
      }
    }
    const double wanted = std::ceil((hi - lo) / (min_sd / 8.0)) + 1.0;
    const size_t points =
        static_cast<size_t>(std::clamp(wanted, 512.0, 8192.0));
    grid_.resize(points);
    for (size_t g = 0; g < points; ++g) {
      grid_[g] = lo + (hi - lo) * static_cast<double>(g) / (points - 1);
    }
    table_.resize(candidates_.size() * points);
    ParallelFor(candidates_.size(), [&](size_t c) {
      for (size_t g = 0; g < points; ++g) {
        table_[c * points + g] =
            LogDensityAt(candidates_[c], std::span<const double>(&grid_[g], 1));
      }
    });
  }

  double Diff(size_t i, size_t j, double x) const {
    const std::span<const double> pt(&x, 1);
    return LogDensityAt(candidates_[i], pt) - LogDensityAt(candidates_[j], pt);
  }

  // Zero of the log-density difference inside [a, b] where it changes sign:
  // linear interpolation followed by a few Illinois steps.
  double Crossing(size_t i, size_t j, double a, double fa, double b,
                  double fb) const {
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    int side = 0;
    double x = a;
    for (int iter = 0; iter < 6; ++iter) {
      x = (a * fb - b * fa) / (fb - fa);
      const double fx = Diff(i, j, x);
      if (fx == 0.0 || !std::isfinite(fx)) return x;
      if ((fx > 0.0) == (fb > 0.0)) {
        b = x;
        fb = fx;
        if (side == -1) fa *= 0.5;
        side = -1;
      } else {
        a = x;
        fa = fx;
        if (side == 1) fb *= 0.5;
        side = 1;
      }
    }
    return x;
  }

  // Open set where log p_i - log p_j > 0, with the end cells extended to
  // infinity.
  void Scan(size_t i, size_t j, IntervalList& out) const {
    const size_t points = grid_.size();
    const double* li = &table_[i * points];
    const double* lj = &table_[j * points];
    auto value = [&](size_t g) { return li[g] - lj[g]; };
    double prev = value(0);
    bool inside = prev > 0.0;
    double start = -kInf;
    for (size_t g = 1; g < points; ++g) {
      const double cur = value(g);
      const bool now = cur > 0.0;
      if (now != inside) {
        const double x = Crossing(i, j, grid_[g - 1], prev, grid_[g], cur);
        if (inside) {
          out.push_back({start, x});
        } else {
          start = x;
        }
        inside = now;
      }
      prev = cur;
    }
    if (inside) out.push_back({start, kInf});
  }

  std::span<const Distribution> candidates_;
  Backend backend_;
  std::vector<Normal1d> normals_;
  std::vector<double> grid_;
  std::vector<double> table_;
};

std::vector<double> LogDensityMatrix(std::span<const Distribution> candidates,
                                     std::span<const double> points, int dim) {
  const size_t count = points.size() / dim;
  std::vector<double> out(count * candidates.size());
  ParallelFor(count, [&](size_t s) {
    const auto x = points.subspan(s * dim, dim);
    for (size_t c = 0; c < candidates.size(); ++c) {
      out[s * candidates.size() + c] = LogDensityAt(candidates[c], x);
    }
  });
  return out;
}

SquareMatrix MonteCarloCandidateMass(std::span<const Distribution> candidates,
                                     const ScheffeOptions& options) {
  const size_t n = candidates.size();
  const int dim = candidates.front().dim();
  SquareMatrix out(n);
  for (size_t i = 0; i < n; ++i) {
    Rng rng = MakeRng(DeriveSeed(options.seed, i));
    std::vector<double> samples(static_cast<size_t>(options.mc_trials) * dim);
    for (int t = 0; t < options.mc_trials; ++t) {
      SampleInto(
          candidates[i], rng,
          std::span<double>(&samples[static_cast<size_t>(t) * dim], dim));
    }
    const std::vector<double> logd = LogDensityMatrix(candidates, samples, dim);
    std::vector<int64_t> hits(n, 0);
    for (int t = 0; t < options.mc_trials; ++t) {
      const double* row = &logd[static_cast<size_t>(t) * n];
      for (size_t j = 0; j < n; ++j) {
        if (row[i] > row[j]) ++hits[j];
      }
    }
    for (size_t j = 0; j < n; ++j) {
      out(i, j) =
          i == j ? 0.0 : static_cast<double>(hits[j]) / options.mc_trials;
    }
  }
  return out;
}

}  // namespace

absl::StatusOr<PrivacyBudget> PrivacyBudget::Create(double epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "epsilon must be positive and finite, got %g", epsilon));
  }
  return PrivacyBudget{epsilon};
}

absl::StatusOr<SquareMatrix> ScheffeCandidate(
    std::span<const Distribution> candidates, const ScheffeOptions& options,
    AuditLog* log) {
  PPDL_ASSIGN_OR_RETURN(const Backend backend, Classify(candidates));
  if (options.mc_trials < 1000) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "Scheffé Monte-Carlo needs >= 1000 trials, got %d", options.mc_trials));
  }
  if (log != nullptr) log->Record(kAuditScheffeCandidate);
  const size_t n = candidates.size();
  if (options.method == ScheffeMethod::kMonteCarlo ||
      backend == Backend::kGeneric) {
    return MonteCarloCandidateMass(candidates, options);
  }
  SquareMatrix out(n);
  if (backend == Backend::kFinite) {
    for (size_t i = 0; i < n; ++i) {
      const auto& pi = *candidates[i].As<FiniteDist>();
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto& pj = *candidates[j].As<FiniteDist>();
        double total = 0.0;
        for (int x = 0; x < pi.domain_size(); ++x) {
          if (pi.mass(x) > pj.mass(x)) total += pi.mass(x);
        }
        out(i, j) = std::clamp(total, 0.0, 1.0);
      }
    }
    return out;
  }
  const Geometry1d geometry = Geometry1d::Build(candidates, backend);
  ParallelFor(n, [&](size_t i) {
    IntervalList a_ij, a_ji;
    for (size_t j = i + 1; j < n; ++j) {
      geometry.PairSets(i, j, a_ij, a_ji);
      out(i, j) = Mass1d(candidates[i], a_ij);
      out(j, i) = Mass1d(candidates[j], a_ji);
    }
  });
  return out;
}

absl::StatusOr<std::vector<int64_t>> ScheffeCounts(
    std::span<const Distribution> candidates, const Dataset& private_data) {
  PPDL_ASSIGN_OR_RETURN(const Backend backend, Classify(candidates));
  if (private_data.empty()) {
    return absl::InvalidArgumentError("private dataset is empty");
  }
  if (private_data.dim() != candidates.front().dim()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("private data has dimension %d but candidates have %d",
                        private_data.dim(), candidates.front().dim()));
  }
  const size_t n = candidates.size();
  std::vector<int64_t> counts(n * n, 0);
  if (backend == Backend::kFinite) {
    const int domain = candidates.front().As<FiniteDist>()->domain_size();
    std::vector<int64_t> histogram(domain, 0);
    for (double v : private_data.values()) {
      const double r = std::round(v);
      if (r == v && r >= 0 && r < domain) ++histogram[static_cast<int>(r)];
    }
    for (size_t i = 0; i < n; ++i) {
      const auto& pi = *candidates[i].As<FiniteDist>();
      for (size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const auto& pj = *candidates[j].As<FiniteDist>();
        int64_t total = 0;
        for (int x = 0; x < domain; ++x) {
          if (pi.mass(x) > pj.mass(x)) total += histogram[x];
        }
        counts[i * n + j] = total;
      }
    }
    return counts;
  }
  if (backend == Backend::kGeneric) {
    const int dim = private_data.dim();
    const std::vector<double> logd =
        LogDensityMatrix(candidates, private_data.values(), dim);
    ParallelFor(n, [&](size_t i) {
      for (size_t s = 0; s < private_data.size(); ++s) {
        const double* row = &logd[s * n];
        for (size_t j = 0; j < n; ++j) {
          if (row[i] > row[j]) ++counts[i * n + j];
        }
      }
    });
    return counts;
  }
  std::vector<double> sorted = private_data.values();
  std::sort(sorted.begin(), sorted.end());
  const Geometry1d geometry = Geometry1d::Build(candidates, backend);
  ParallelFor(n, [&](size_t i) {
    IntervalList a_ij, a_ji;
    for (size_t j = i + 1; j < n; ++j) {
      geometry.PairSets(i, j, a_ij, a_ji);
      counts[i * n + j] = CountInside(sorted, a_ij);
      counts[j * n + i] = CountInside(sorted, a_ji);
    }
  });
  return counts;
}

absl::StatusOr<SquareMatrix> ScheffeEmpirical(
    std::span<const Distribution> candidates, const Dataset& private_data,
    AuditLog* log) {
  if (log != nullptr) log->Record(kAuditScheffeEmpirical);
  PPDL_ASSIGN_OR_RETURN(const std::vector<int64_t> counts,
                        ScheffeCounts(candidates, private_data));
  const size_t n = candidates.size();
  const double total = static_cast<double>(private_data.size());
  SquareMatrix out(n);
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < n; ++j) {
      out(i, j) = static_cast<double>(counts[i * n + j]) / total;
    }
  }
  return out;
}

absl::StatusOr<std::vector<double>> Utilities(const SquareMatrix& candidate,
                                              const SquareMatrix& empirical) {
  if (candidate.size() != empirical.size()) {
    return absl::InvalidArgumentError(
        absl::StrFormat("Scheffé matrices differ in size: %d vs %d",
                        candidate.size(), empirical.size()));
  }
  const size_t n = candidate.size();
  std::vector<double> u(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double worst = 0.0;
    for (size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      worst = std::max(worst, std::abs(candidate(i, j) - empirical(i, j)));
    }
    u[i] = -worst;
  }
  return u;
}

std::vector<double> SelectionProbabilities(std::span<const double> utilities,
                                           size_t n, double epsilon) {
  std::vector<double> p(utilities.size());
  if (utilities.empty()) return p;
  const double top = *std::max_element(utilities.begin(), utilities.end());
  const double scale = 0.5 * epsilon * static_cast<double>(n);
  double total = 0.0;
  for (size_t i = 0; i < utilities.size(); ++i) {
    p[i] = std::exp(scale * (utilities[i] - top));
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

absl::StatusOr<SelectionResult> ExponentialMechanism(
    std::span<const double> utilities, size_t n, const PrivacyBudget& budget,
    RngSeed seed) {
  if (utilities.empty()) {
    return absl::InvalidArgumentError("exponential mechanism over no outcomes");
  }
  if (n < 1) return absl::InvalidArgumentError("n must be >= 1");
  if (!(budget.epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  SelectionResult out;
  out.utilities.assign(utilities.begin(), utilities.end());
  out.probabilities = SelectionProbabilities(utilities, n, budget.epsilon);
  out.epsilon = budget.epsilon;
  out.n = n;
  Rng rng = MakeRng(seed);
  double u = UniformUnit(rng);
  out.chosen = out.probabilities.size() - 1;
  for (size_t i = 0; i < out.probabilities.size(); ++i) {
    if (u < out.probabilities[i]) {
      out.chosen = i;
      break;
    }
    u -= out.probabilities[i];
  }
  while (out.probabilities[out.chosen] == 0.0 && out.chosen > 0) --out.chosen;
  return out;
}

absl::StatusOr<Selection> SelectWithCandidateMass(
    std::span<const Distribution> candidates, SquareMatrix candidate_mass,
    const Dataset& private_data, const PrivacyBudget& budget, RngSeed seed,
    AuditLog* log) {
  if (candidate_mass.size() != candidates.size()) {
    return absl::InvalidArgumentError(
        "candidate mass matrix does not match the candidate set");
  }
  ScheffeTable table;
  table.candidate_mass = std::move(candidate_mass);
  PPDL_ASSIGN_OR_RETURN(table.empirical_mass,
                        ScheffeEmpirical(candidates, private_data, log));
  if (log != nullptr) log->Record(kAuditUtilities);
  PPDL_ASSIGN_OR_RETURN(const std::vector<double> u,
                        Utilities(table.candidate_mass, table.empirical_mass));
  if (log != nullptr) log->Record(kAuditMechanism);
  PPDL_ASSIGN_OR_RETURN(
      SelectionResult result,
      ExponentialMechanism(u, private_data.size(), budget, seed));
  Distribution chosen = candidates[result.chosen];
  return Selection{std::move(chosen), std::move(result), std::move(table)};
}

absl::StatusOr<Selection> DpSelect(std::span<const Distribution> candidates,
                                   const Dataset& private_data,
                                   const PrivacyBudget& budget,
                                   const ScheffeOptions& options, RngSeed seed,
                                   AuditLog* log) {
  if (candidates.empty()) {
    return absl::InvalidArgumentError("candidate set is empty");
  }
  if (private_data.empty()) {
    return absl::InvalidArgumentError("private dataset is empty");
  }
  PPDL_ASSIGN_OR_RETURN(SquareMatrix candidate_mass,
                        ScheffeCandidate(candidates, options, log));
  return SelectWithCandidateMass(candidates, std::move(candidate_mass),
                                 private_data, budget, seed, log);
}

}  // namespace ppdl
