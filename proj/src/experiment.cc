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

#include "ppdl/experiment.h"

#include <algorithm>
#include <cmath>
#include <utility>

#include "Eigen/QR"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_format.h"
#include "ppdl/io.h"
#include "ppdl/parallel.h"
#include "ppdl/status_macros.h"

namespace ppdl {
namespace {

constexpr int kMaxTruthAttempts = 1000;

double Uniform(Rng& rng, double lo, double hi) {
  return lo + (hi - lo) * UniformUnit(rng);
}

absl::StatusOr<GaussianParams> RandomGaussian(const TruthSpec& truth, int dim,
                                              Rng& rng) {
  Eigen::VectorXd mean(dim);
  for (int i = 0; i < dim; ++i) {
    mean(i) = Uniform(rng, truth.mean_lo, truth.mean_hi);
  }
  Eigen::VectorXd eigenvalues(dim);
  for (int i = 0; i < dim; ++i) {
    eigenvalues(i) = Uniform(rng, truth.var_lo, truth.var_hi);
  }
  if (dim == 1) {
    return GaussianParams::Create(
        std::move(mean), Eigen::MatrixXd::Constant(1, 1, eigenvalues(0)));
  }
  Eigen::MatrixXd g(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) g(r, c) = StandardNormal(rng);
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  Eigen::MatrixXd q = qr.householderQ();
  const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int c = 0; c < dim; ++c) {
    if (r(c, c) < 0) q.col(c) *= -1.0;
  }
  Eigen::MatrixXd cov = q * eigenvalues.asDiagonal() * q.transpose();
  cov = 0.5 * (cov + cov.transpose()).eval();
  return GaussianParams::Create(std::move(mean), std::move(cov));
}

int FamilyK(const ExperimentSpec& spec) {
  switch (spec.learner.family.kind) {
    case FamilyKind::kMixture:
      return spec.learner.family.k;
    case FamilyKind::kProduct:
      return spec.dim;
    case FamilyKind::kGaussian:
      return 1;
  }
  return 1;
}

}  // namespace

absl::Status ValidateSpec(const ExperimentSpec& spec) {
  if (spec.dim < 1) return absl::InvalidArgumentError("dim must be >= 1");
  if (spec.m_values.empty() || spec.n_values.empty() || spec.epsilons.empty()) {
    return absl::InvalidArgumentError("sweep lists must be nonempty");
  }
  if (spec.trials < 1) return absl::InvalidArgumentError("trials must be >= 1");
  for (int m : spec.m_values) {
    if (m < 0) return absl::InvalidArgumentError("m values must be >= 0");
  }
  for (int n : spec.n_values) {
    if (n < 1) return absl::InvalidArgumentError("n values must be >= 1");
  }
  for (double e : spec.epsilons) {
    PPDL_RETURN_IF_ERROR(PrivacyBudget::Create(e).status());
  }
  if (!(spec.truth.var_lo > 0.0 && spec.truth.var_hi >= spec.truth.var_lo)) {
    return absl::InvalidArgumentError("truth variance range is invalid");
  }
  if (!(spec.truth.mean_hi >= spec.truth.mean_lo)) {
    return absl::InvalidArgumentError("truth mean range is invalid");
  }
  if (spec.truth.fixed.has_value() && spec.truth.fixed->dim() != spec.dim) {
    return absl::InvalidArgumentError("fixed truth dimension differs from dim");
  }
  if (spec.public_source.has_value() && spec.public_source->dim() != spec.dim) {
    return absl::InvalidArgumentError(
        "public_source dimension differs from dim");
  }
  if (spec.tv.mc_trials < 100) {
    return absl::InvalidArgumentError("tv mc_trials must be >= 100");
  }
  return spec.learner.Validate();
}

absl::StatusOr<Distribution> DrawTruth(const ExperimentSpec& spec,
                                       RngSeed seed) {
  if (spec.truth.fixed.has_value()) return *spec.truth.fixed;
  Rng rng = MakeRng(seed);
  switch (spec.learner.family.kind) {
    case FamilyKind::kGaussian: {
      PPDL_ASSIGN_OR_RETURN(GaussianParams g,
                            RandomGaussian(spec.truth, spec.dim, rng));
      return Distribution(std::move(g));
    }
    case FamilyKind::kProduct: {
      std::vector<Distribution> factors;
      for (int i = 0; i < spec.dim; ++i) {
        PPDL_ASSIGN_OR_RETURN(GaussianParams g,
                              RandomGaussian(spec.truth, 1, rng));
        factors.emplace_back(std::move(g));
      }
      return Distribution::Product(std::move(factors));
    }
    case FamilyKind::kMixture: {
      const int k = spec.learner.family.k;
      TvOptions tv = spec.tv;
      tv.mc_trials = std::min(tv.mc_trials, 20000);
      for (int attempt = 0; attempt < kMaxTruthAttempts; ++attempt) {
        std::vector<Distribution> components;
        for (int c = 0; c < k; ++c) {
          PPDL_ASSIGN_OR_RETURN(GaussianParams g,
                                RandomGaussian(spec.truth, spec.dim, rng));
          components.emplace_back(std::move(g));
        }
        bool separated = true;
        for (int a = 0; a < k && separated; ++a) {
          for (int b = a + 1; b < k && separated; ++b) {
            tv.seed = DeriveSeed(seed, 1000 + attempt);
            PPDL_ASSIGN_OR_RETURN(
                const TvEstimate est,
                TotalVariation(components[a], components[b], tv));
            separated = est.value >= spec.truth.min_separation;
          }
        }
        if (!separated) continue;
        std::vector<double> weights(k);
        double total = 0.0;
        for (double& w : weights) {
          w = 0.5 + UniformUnit(rng);
          total += w;
        }
        for (double& w : weights) w /= total;
        return Distribution::Mixture(std::move(components), std::move(weights));
      }
      return absl::FailedPreconditionError(
          "could not draw a mixture truth meeting the separation requirement");
    }
  }
  return absl::InternalError("unhandled family");
}

absl::StatusOr<TrialRecord> RunTrial(const ExperimentSpec& spec, int m, int n,
                                     double epsilon, int trial,
                                     RngSeed trial_seed) {
  PPDL_ASSIGN_OR_RETURN(const Distribution truth,
                        DrawTruth(spec, DeriveSeed(trial_seed, 1)));
  const Distribution& public_source =
      spec.public_source.has_value() ? *spec.public_source : truth;
  Dataset public_data(spec.dim, DataRole::kPublic);
  if (m > 0) {
    PPDL_ASSIGN_OR_RETURN(
        public_data,
        Sample(public_source, m, DeriveSeed(trial_seed, 2), DataRole::kPublic));
  }
  PPDL_ASSIGN_OR_RETURN(
      const Dataset private_data,
      Sample(truth, n, DeriveSeed(trial_seed, 3), DataRole::kPrivate));

  LearnerConfig config = spec.learner;
  config.epsilon = epsilon;
  config.seed = DeriveSeed(trial_seed, 4);
  if (m == 0) config.anchor = AnchorMode::kPrior;
  PPDL_ASSIGN_OR_RETURN(
      const LearnResult learned,
      config.robust ? PpLearnAgnosticShifted(public_data, private_data, config)
                    : PpLearn(public_data, private_data, config));

  TvOptions tv = spec.tv;
  tv.seed = DeriveSeed(trial_seed, 5);
  PPDL_ASSIGN_OR_RETURN(const TvEstimate error,
                        TotalVariation(learned.hypothesis, truth, tv));

  TrialRecord rec;
  rec.family = spec.learner.family.kind;
  rec.d = spec.dim;
  rec.k = FamilyK(spec);
  rec.m = m;
  rec.n = n;
  rec.epsilon = epsilon;
  rec.trial = trial;
  rec.seed = trial_seed.value;
  rec.tv_error = error.value;
  rec.tv_ci = error.half_width;
  rec.candidates = learned.candidates.size();
  rec.success = error.value <= spec.learner.alpha;
  if (spec.decompose) {
    TvOptions per = tv;
    double best = 2.0;
    size_t best_index = 0;
    for (size_t i = 0; i < learned.candidates.size(); ++i) {
      per.seed = DeriveSeed(tv.seed, 1 + i);
      PPDL_ASSIGN_OR_RETURN(
          const TvEstimate est,
          TotalVariation(learned.candidates.hypotheses[i], truth, per));
      if (est.value < best) {
        best = est.value;
        best_index = i;
      }
    }
    per.seed = DeriveSeed(tv.seed, 0);
    PPDL_ASSIGN_OR_RETURN(
        const TvEstimate regret,
        TotalVariation(learned.hypothesis,
                       learned.candidates.hypotheses[best_index], per));
    rec.best_candidate_tv = best;
    rec.regret = regret.value;
  }
  return rec;
}

absl::StatusOr<std::vector<TrialRecord>> RunExperiment(
    const ExperimentSpec& spec) {
  PPDL_RETURN_IF_ERROR(ValidateSpec(spec));
  struct Cell {
    int m;
    int n;
    double epsilon;
  };
  std::vector<Cell> cells;
  for (int m : spec.m_values) {
    for (int n : spec.n_values) {
      for (double e : spec.epsilons) cells.push_back({m, n, e});
    }
  }
  const size_t rows = cells.size() * static_cast<size_t>(spec.trials);
  std::vector<absl::StatusOr<TrialRecord>> results(
      rows, absl::UnknownError("not run"));
  ParallelFor(rows, [&](size_t row) {
    const Cell& cell = cells[row / spec.trials];
    const int trial = static_cast<int>(row % spec.trials);
    results[row] = RunTrial(spec, cell.m, cell.n, cell.epsilon, trial,
                            DeriveSeed(spec.seed, row));
  });
  std::vector<TrialRecord> out;
  out.reserve(rows);
  for (auto& r : results) {
    if (!r.ok()) return r.status();
    out.push_back(*std::move(r));
  }
  return out;
}

std::string CsvHeader() {
  return "family,d,k,m,n,epsilon,trial,seed,tv_error,tv_ci,candidates,"
         "success@alpha\n";
}

std::string FormatCsv(const std::vector<TrialRecord>& records) {
  std::string out = CsvHeader();
  for (const auto& r : records) {
    absl::StrAppend(&out, std::string(FamilyName(r.family)), ",", r.d, ",", r.k,
                    ",", r.m, ",", r.n, ",", FormatDouble(r.epsilon), ",",
                    r.trial, ",", r.seed, ",", FormatDouble(r.tv_error), ",",
                    FormatDouble(r.tv_ci), ",", r.candidates, ",",
                    r.success ? 1 : 0, "\n");
  }
  return out;
}

}  // namespace ppdl
