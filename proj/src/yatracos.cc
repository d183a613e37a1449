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

#include "ppdl/yatracos.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ppdl/io.h"
#include "ppdl/parallel.h"
#include "ppdl/status_macros.h"
#include "ppdl/total_variation.h"

namespace ppdl {
namespace {

bool Contains(DomainMask mask, int x) { return (mask >> x) & 1U; }

absl::StatusOr<int> DomainPoint(double v, int domain_size) {
  const double r = std::round(v);
  if (r != v || r < 0 || r >= domain_size) {
    return absl::InvalidArgumentError(absl::StrFormat(
        "sample value %g is not a point of the domain {0, ..., %d}", v,
        domain_size - 1));
  }
  return static_cast<int>(r);
}

// Walks all size-k multisets of {0, ..., d-1} as count vectors in the order
// of their sorted tuples. The visitor sees the running per-set member counts.
class MultisetWalker {
 public:
  MultisetWalker(int domain, int k, const HypothesisSet& h)
      : domain_(domain),
        k_(k),
        sets_(h.sets.size()),
        counts_(domain, 0),
        set_counts_(h.sets.size(), 0),
        member_(static_cast<size_t>(domain) * h.sets.size(), 0) {
    for (int x = 0; x < domain; ++x) {
      for (size_t s = 0; s < sets_; ++s) {
        member_[x * sets_ + s] = Contains(h.sets[s], x) ? 1 : 0;
      }
    }
  }

  template <typename Visitor>
  void Walk(Visitor&& visit) {
    index_ = 0;
    std::fill(counts_.begin(), counts_.end(), 0);
    std::fill(set_counts_.begin(), set_counts_.end(), 0);
    Recurse(0, k_, visit);
  }

  const std::vector<int>& counts() const { return counts_; }
  const std::vector<int>& set_counts() const { return set_counts_; }

 private:
  void Add(int x, int c) {
    counts_[x] += c;
    const uint8_t* row = &member_[x * sets_];
    for (size_t s = 0; s < sets_; ++s) set_counts_[s] += row[s] * c;
  }

  template <typename Visitor>
  void Recurse(int x, int remaining, Visitor& visit) {
    if (x == domain_ - 1) {
      Add(x, remaining);
      visit(index_++);
      Add(x, -remaining);
      return;
    }
    for (int c = remaining; c >= 0; --c) {
      Add(x, c);
      Recurse(x + 1, remaining - c, visit);
      Add(x, -c);
    }
  }

  int domain_;
  int k_;
  size_t sets_;
  std::vector<int> counts_;
  std::vector<int> set_counts_;
  std::vector<uint8_t> member_;
  uint64_t index_ = 0;
};

}  // namespace

absl::StatusOr<HypothesisSet> YatracosClass(std::span<const FiniteDist> q) {
  if (q.size() < 2) {
    return absl::InvalidArgumentError(
        "Yatracos class needs at least 2 members");
  }
  const int d = q.front().domain_size();
  HypothesisSet out;
  out.domain_size = d;
  for (const auto& p : q) {
    if (p.domain_size() != d) {
      return absl::InvalidArgumentError("class members have different domains");
    }
  }
  for (size_t i = 0; i < q.size(); ++i) {
    for (size_t j = 0; j < q.size(); ++j) {
      if (i == j) continue;
      DomainMask mask = 0;
      for (int x = 0; x < d; ++x) {
        if (q[i].mass(x) > q[j].mass(x)) mask |= DomainMask{1} << x;
      }
      if (std::find(out.sets.begin(), out.sets.end(), mask) == out.sets.end()) {
        out.sets.push_back(mask);
      }
    }
  }
  return out;
}

absl::StatusOr<CoverResult> PublicCover(const HypothesisSet& h,
                                        const Dataset& public_data) {
  if (public_data.empty()) {
    return absl::InvalidArgumentError("public dataset is empty");
  }
  DomainMask support = 0;
  for (double v : public_data.values()) {
    PPDL_ASSIGN_OR_RETURN(const int x, DomainPoint(v, h.domain_size));
    support |= DomainMask{1} << x;
  }
  // Representative (smallest mask) per labeling.
  std::map<DomainMask, DomainMask> best;
  for (DomainMask s : h.sets) {
    const DomainMask key = s & support;
    auto [it, inserted] = best.emplace(key, s);
    if (!inserted) it->second = std::min(it->second, s);
  }
  CoverResult out;
  out.reduced.domain_size = h.domain_size;
  std::map<DomainMask, size_t> index;
  for (DomainMask s : h.sets) {
    const DomainMask rep = best[s & support];
    auto [it, inserted] = index.emplace(rep, out.reduced.sets.size());
    if (inserted) out.reduced.sets.push_back(rep);
    out.mapping.push_back(it->second);
  }
  return out;
}

absl::StatusOr<RepresentativeDomain> MakeRepresentativeDomain(
    int domain_size, const HypothesisSet& h) {
  if (domain_size < 1 || domain_size > kMaxFiniteDomain) {
    return absl::InvalidArgumentError(
        absl::StrFormat("domain size must lie in [1, %d], got %d",
                        kMaxFiniteDomain, domain_size));
  }
  RepresentativeDomain out;
  out.projection.resize(domain_size);
  std::map<std::vector<bool>, int> classes;
  for (int x = 0; x < domain_size; ++x) {
    std::vector<bool> behavior(h.sets.size());
    for (size_t s = 0; s < h.sets.size(); ++s) {
      behavior[s] = Contains(h.sets[s], x);
    }
    auto [it, inserted] =
        classes.emplace(std::move(behavior), out.representatives.size());
    if (inserted) out.representatives.push_back(x);
    out.projection[x] = it->second;
  }
  return out;
}

HypothesisSet ProjectHypotheses(const HypothesisSet& h,
                                const RepresentativeDomain& rep) {
  HypothesisSet out;
  out.domain_size = static_cast<int>(rep.representatives.size());
  for (DomainMask s : h.sets) {
    DomainMask mask = 0;
    for (size_t r = 0; r < rep.representatives.size(); ++r) {
      if (Contains(s, rep.representatives[r])) mask |= DomainMask{1} << r;
    }
    out.sets.push_back(mask);
  }
  return out;
}

std::optional<uint64_t> MultisetCount(int domain_size, int k) {
  // C(domain_size + k - 1, k) computed as a running product.
  if (domain_size < 1 || k < 0) return std::nullopt;
  const int r = std::min(k, domain_size - 1);
  const int top = domain_size + k - 1;
  unsigned __int128 exact = 1;
  for (int i = 1; i <= r; ++i) {
    exact =
        exact * static_cast<unsigned>(top - r + i) / static_cast<unsigned>(i);
    if (exact > (unsigned __int128){1} << 62) return std::nullopt;
  }
  return static_cast<uint64_t>(exact);
}

absl::StatusOr<int> SmallDbSize(const HypothesisSet& h,
                                const SmallDbOptions& o) {
  if (h.domain_size < 1 || h.domain_size > kMaxFiniteDomain) {
    return absl::InvalidArgumentError("SmallDB domain size out of range");
  }
  if (o.db_size.has_value()) {
    if (*o.db_size < 1)
      return absl::InvalidArgumentError("db_size must be >= 1");
    const auto count = MultisetCount(h.domain_size, *o.db_size);
    if (!count.has_value() || *count > o.cap) {
      return absl::ResourceExhaustedError(absl::StrFormat(
          "SmallDB enumeration of size-%d databases over %d points needs a cap "
          "of at least %s (cap %d)",
          *o.db_size, h.domain_size,
          count.has_value() ? absl::StrCat(*count) : std::string("2^62"),
          o.cap));
    }
    return *o.db_size;
  }
  if (!(o.alpha > 0.0 && o.alpha <= 1.0)) {
    return absl::InvalidArgumentError("alpha must lie in (0, 1]");
  }
  const double sets = static_cast<double>(std::max<size_t>(h.sets.size(), 1));
  int k = std::max(
      1, static_cast<int>(std::ceil(std::log(sets) / (o.alpha * o.alpha))));
  while (k > 1) {
    const auto count = MultisetCount(h.domain_size, k);
    if (count.has_value() && *count <= o.cap) break;
    --k;
  }
  const auto count = MultisetCount(h.domain_size, k);
  if (!count.has_value() || *count > o.cap) {
    return absl::ResourceExhaustedError(absl::StrFormat(
        "SmallDB enumeration over %d points exceeds the cap %d even for "
        "single-point databases",
        h.domain_size, o.cap));
  }
  return k;
}

absl::StatusOr<SmallDbResult> SmallDb(const Dataset& private_data,
                                      const HypothesisSet& h,
                                      const SmallDbOptions& options,
                                      RngSeed seed) {
  if (private_data.empty()) {
    return absl::InvalidArgumentError("private dataset is empty");
  }
  if (!(options.epsilon > 0.0)) {
    return absl::InvalidArgumentError("epsilon must be positive");
  }
  PPDL_ASSIGN_OR_RETURN(const int k, SmallDbSize(h, options));
  const int domain = h.domain_size;
  const size_t nsets = h.sets.size();
  std::vector<double> empirical(nsets, 0.0);
  for (double v : private_data.values()) {
    PPDL_ASSIGN_OR_RETURN(const int x, DomainPoint(v, domain));
    for (size_t s = 0; s < nsets; ++s) {
      if (Contains(h.sets[s], x)) empirical[s] += 1.0;
    }
  }
  const double n = static_cast<double>(private_data.size());
  for (double& e : empirical) e /= n;

  SmallDbResult out;
  out.db_size = k;
  out.database_count = *MultisetCount(domain, k);
  MultisetWalker walker(domain, k, h);
  const std::vector<int>& set_counts = walker.set_counts();
  auto utility = [&]() {
    double worst = 0.0;
    for (size_t s = 0; s < nsets; ++s) {
      worst = std::max(worst, std::abs(set_counts[s] / static_cast<double>(k) -
                                       empirical[s]));
    }
    return -worst;
  };
  const double scale = 0.5 * options.epsilon * n;

  // Pass 1: running log-sum-exp of scale * u.
  double top = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  if (options.keep_distribution) out.utilities.reserve(out.database_count);
  walker.Walk([&](uint64_t) {
    const double u = utility();
    if (options.keep_distribution) out.utilities.push_back(u);
    if (u > top) {
      sum = sum * std::exp(scale * (top - u)) + 1.0;
      top = u;
    } else {
      sum += std::exp(scale * (u - top));
    }
  });
  if (options.keep_distribution) {
    out.probabilities.resize(out.utilities.size());
    for (size_t i = 0; i < out.utilities.size(); ++i) {
      out.probabilities[i] = std::exp(scale * (out.utilities[i] - top)) / sum;
    }
  }
  // Pass 2: inverse-CDF draw.
  Rng rng = MakeRng(seed);
  const double target = UniformUnit(rng) * sum;
  double cumulative = 0.0;
  bool found = false;
  uint64_t last_positive = 0;
  std::vector<int> last_counts;
  walker.Walk([&](uint64_t index) {
    if (found) return;
    const double w = std::exp(scale * (utility() - top));
    if (w > 0.0) {
      last_positive = index;
      last_counts = walker.counts();
    }
    cumulative += w;
    if (target < cumulative && w > 0.0) {
      found = true;
      out.chosen = index;
      out.chosen_counts = walker.counts();
    }
  });
  if (!found) {
    out.chosen = last_positive;
    out.chosen_counts = last_counts;
  }
  out.estimates.resize(nsets);
  for (size_t s = 0; s < nsets; ++s) {
    int c = 0;
    for (int x = 0; x < domain; ++x) {
      if (Contains(h.sets[s], x)) c += out.chosen_counts[x];
    }
    out.estimates[s] = static_cast<double>(c) / k;
  }
  return out;
}

absl::StatusOr<size_t> MinimumDistanceSelect(std::span<const FiniteDist> q,
                                             std::span<const double> g_hat,
                                             std::span<const size_t> mapping,
                                             const HypothesisSet& h) {
  if (q.empty()) return absl::InvalidArgumentError("empty class");
  if (mapping.size() != h.sets.size()) {
    return absl::InvalidArgumentError("mapping size differs from class size");
  }
  for (size_t m : mapping) {
    if (m >= g_hat.size()) {
      return absl::InvalidArgumentError("mapping points outside g_hat");
    }
  }
  size_t best = 0;
  double best_dev = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < q.size(); ++i) {
    double dev = 0.0;
    for (size_t j = 0; j < h.sets.size(); ++j) {
      dev = std::max(dev, std::abs(q[i].MassOf(h.sets[j]) - g_hat[mapping[j]]));
    }
    if (dev < best_dev) {
      best_dev = dev;
      best = i;
    }
  }
  return best;
}

absl::StatusOr<YatracosRun> YatracosLearn(std::span<const FiniteDist> q,
                                          const Dataset& public_data,
                                          const Dataset& private_data,
                                          const SmallDbOptions& options,
                                          RngSeed seed) {
  PPDL_ASSIGN_OR_RETURN(const HypothesisSet h, YatracosClass(q));
  PPDL_ASSIGN_OR_RETURN(const CoverResult cover, PublicCover(h, public_data));
  PPDL_ASSIGN_OR_RETURN(const RepresentativeDomain rep,
                        MakeRepresentativeDomain(h.domain_size, cover.reduced));
  const HypothesisSet projected = ProjectHypotheses(cover.reduced, rep);
  Dataset reduced_private(1, DataRole::kPrivate);
  for (double v : private_data.values()) {
    PPDL_ASSIGN_OR_RETURN(const int x, DomainPoint(v, h.domain_size));
    const double p = rep.projection[x];
    reduced_private.Append(std::span<const double>(&p, 1));
  }
  PPDL_ASSIGN_OR_RETURN(const SmallDbResult db,
                        SmallDb(reduced_private, projected, options, seed));
  PPDL_ASSIGN_OR_RETURN(
      const size_t chosen,
      MinimumDistanceSelect(q, db.estimates, cover.mapping, h));
  YatracosRun out;
  out.chosen = chosen;
  out.hypotheses = h.sets.size();
  out.reduced_hypotheses = cover.reduced.sets.size();
  out.reduced_domain = static_cast<int>(rep.representatives.size());
  out.db_size = db.db_size;
  return out;
}

absl::StatusOr<std::vector<YatracosTrial>> RunYatracosDemo(
    const YatracosDemoSpec& spec) {
  if (spec.classes.size() < 2) {
    return absl::InvalidArgumentError("classes: need at least 2 distributions");
  }
  if (spec.m < 1 || spec.n < 1 || spec.trials < 1) {
    return absl::InvalidArgumentError("m, n and trials must be >= 1");
  }
  SmallDbOptions options;
  options.epsilon = spec.epsilon;
  options.alpha = spec.alpha;
  options.db_size = spec.db_size;
  options.cap = spec.db_cap;
  std::vector<absl::StatusOr<YatracosTrial>> results(
      spec.trials, absl::UnknownError("not run"));
  ParallelFor(spec.trials, [&](size_t t) {
    results[t] = [&]() -> absl::StatusOr<YatracosTrial> {
      YatracosTrial trial;
      trial.trial = static_cast<int>(t);
      const RngSeed seed = DeriveSeed(spec.seed, t);
      trial.seed = seed.value;
      trial.truth = t % spec.classes.size();
      const Distribution truth(spec.classes[trial.truth]);
      PPDL_ASSIGN_OR_RETURN(
          const Dataset pub,
          Sample(truth, spec.m, DeriveSeed(seed, 1), DataRole::kPublic));
      PPDL_ASSIGN_OR_RETURN(
          const Dataset priv,
          Sample(truth, spec.n, DeriveSeed(seed, 2), DataRole::kPrivate));
      PPDL_ASSIGN_OR_RETURN(
          trial.run,
          YatracosLearn(spec.classes, pub, priv, options, DeriveSeed(seed, 3)));
      PPDL_ASSIGN_OR_RETURN(
          trial.tv_error,
          TvFinite(spec.classes[trial.run.chosen], spec.classes[trial.truth]));
      trial.success = trial.tv_error <= spec.alpha;
      return trial;
    }();
  });
  std::vector<YatracosTrial> out;
  for (auto& r : results) {
    if (!r.ok()) return r.status();
    out.push_back(*std::move(r));
  }
  return out;
}

std::string FormatYatracosCsv(const std::vector<YatracosTrial>& trials) {
  std::string out =
      "trial,seed,truth,chosen,tv_error,success,hypotheses,"
      "reduced_hypotheses,reduced_domain,db_size\n";
  for (const auto& t : trials) {
    absl::StrAppend(&out, t.trial, ",", t.seed, ",", t.truth, ",", t.run.chosen,
                    ",", FormatDouble(t.tv_error), ",", t.success ? 1 : 0, ",",
                    t.run.hypotheses, ",", t.run.reduced_hypotheses, ",",
                    t.run.reduced_domain, ",", t.run.db_size, "\n");
  }
  return out;
}

}  // namespace ppdl
