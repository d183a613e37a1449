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

#include "ppdl/serialization.h"

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "absl/status/status.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "ppdl/status_macros.h"

namespace ppdl {
namespace {

absl::Status KeyError(std::string_view key, std::string_view what) {
  return absl::InvalidArgumentError(
      absl::StrCat("key '", std::string(key), "' ", std::string(what)));
}

// Rejects keys outside `allowed`, in document order so the first offender
// is reported.
absl::Status CheckKeys(const Json& json, std::string_view context,
                       const std::vector<std::string>& allowed) {
  if (!json.is_object()) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(context), " must be a JSON object"));
  }
  for (const auto& [key, value] : json.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      return absl::InvalidArgumentError(
          absl::StrCat("unknown key '", key, "' in ", std::string(context),
                       " (expected ", absl::StrJoin(allowed, ", "), ")"));
    }
  }
  return absl::OkStatus();
}

absl::StatusOr<double> GetNumber(const Json& json, std::string_view key) {
  if (!json.is_number()) return KeyError(key, "must be a number");
  return json.get<double>();
}

absl::StatusOr<int64_t> GetInteger(const Json& json, std::string_view key) {
  if (json.is_number_integer()) return json.get<int64_t>();
  if (json.is_number_float()) {
    const double v = json.get<double>();
    if (v == static_cast<double>(static_cast<int64_t>(v))) {
      return static_cast<int64_t>(v);
    }
  }
  return KeyError(key, "must be an integer");
}

absl::StatusOr<int> GetInt(const Json& json, std::string_view key) {
  PPDL_ASSIGN_OR_RETURN(const int64_t v, GetInteger(json, key));
  if (v < INT32_MIN || v > INT32_MAX) return KeyError(key, "is out of range");
  return static_cast<int>(v);
}

absl::StatusOr<bool> GetBool(const Json& json, std::string_view key) {
  if (!json.is_boolean()) return KeyError(key, "must be true or false");
  return json.get<bool>();
}

absl::StatusOr<std::string> GetString(const Json& json, std::string_view key) {
  if (!json.is_string()) return KeyError(key, "must be a string");
  return json.get<std::string>();
}

absl::StatusOr<std::vector<double>> GetNumbers(const Json& json,
                                               std::string_view key) {
  if (json.is_number()) return std::vector<double>{json.get<double>()};
  if (!json.is_array()) return KeyError(key, "must be a number array");
  std::vector<double> out;
  out.reserve(json.size());
  for (const Json& v : json) {
    if (!v.is_number()) return KeyError(key, "must contain only numbers");
    out.push_back(v.get<double>());
  }
  return out;
}

absl::StatusOr<std::vector<int>> GetInts(const Json& json,
                                         std::string_view key) {
  if (!json.is_array()) {
    PPDL_ASSIGN_OR_RETURN(const int v, GetInt(json, key));
    return std::vector<int>{v};
  }
  std::vector<int> out;
  for (const Json& v : json) {
    PPDL_ASSIGN_OR_RETURN(const int x, GetInt(v, key));
    out.push_back(x);
  }
  return out;
}

absl::StatusOr<std::pair<double, double>> GetRange(const Json& json,
                                                   std::string_view key) {
  PPDL_ASSIGN_OR_RETURN(const std::vector<double> v, GetNumbers(json, key));
  if (v.size() != 2) return KeyError(key, "must be [lo, hi]");
  return std::pair{v[0], v[1]};
}

Json VectorToJson(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

absl::StatusOr<Distribution> GaussianFromJson(const Json& json) {
  PPDL_RETURN_IF_ERROR(
      CheckKeys(json, "gaussian", {"kind", "mean", "covariance"}));
  if (!json.contains("mean")) return KeyError("mean", "is required");
  if (!json.contains("covariance")) {
    return KeyError("covariance", "is required");
  }
  PPDL_ASSIGN_OR_RETURN(const std::vector<double> mean,
                        GetNumbers(json["mean"], "mean"));
  const Json& cov = json["covariance"];
  const size_t d = mean.size();
  if (d == 0) return KeyError("mean", "must be non-empty");
  if (!cov.is_array() || cov.size() != d) {
    return KeyError("covariance",
                    absl::StrCat("must be a ", d, "x", d, " array of rows"));
  }
  Eigen::MatrixXd sigma(d, d);
  for (size_t i = 0; i < d; ++i) {
    PPDL_ASSIGN_OR_RETURN(const std::vector<double> row,
                          GetNumbers(cov[i], "covariance"));
    if (row.size() != d || !cov[i].is_array()) {
      return KeyError("covariance",
                      absl::StrCat("must be a ", d, "x", d, " array of rows"));
    }
    for (size_t j = 0; j < d; ++j) sigma(i, j) = row[j];
  }
  PPDL_ASSIGN_OR_RETURN(
      GaussianParams g,
      GaussianParams::Create(Eigen::Map<const Eigen::VectorXd>(mean.data(), d),
                             sigma));
  return Distribution(std::move(g));
}

absl::StatusOr<std::vector<Distribution>> DistributionList(
    const Json& json, std::string_view key) {
  if (!json.is_array() || json.empty()) {
    return KeyError(key, "must be a non-empty array of distributions");
  }
  std::vector<Distribution> out;
  out.reserve(json.size());
  for (const Json& item : json) {
    PPDL_ASSIGN_OR_RETURN(Distribution d, DistributionFromJson(item));
    out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

absl::StatusOr<Json> ParseJson(std::string_view text) {
  Json out = Json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (out.is_discarded()) {
    return absl::InvalidArgumentError("malformed JSON document");
  }
  return out;
}

std::string DumpJson(const Json& json) { return json.dump(2) + "\n"; }

Json DistributionToJson(const Distribution& dist) {
  Json out;
  if (const auto* g = dist.As<GaussianParams>()) {
    out["kind"] = "gaussian";
    out["mean"] = VectorToJson(g->mean());
    Json cov = Json::array();
    for (Eigen::Index i = 0; i < g->covariance().rows(); ++i) {
      cov.push_back(VectorToJson(g->covariance().row(i).transpose()));
    }
    out["covariance"] = std::move(cov);
  } else if (const auto* m = dist.As<MixtureParams>()) {
    out["kind"] = "mixture";
    out["weights"] = m->weights;
    Json comps = Json::array();
    for (const Distribution& c : m->components) {
      comps.push_back(DistributionToJson(c));
    }
    out["components"] = std::move(comps);
  } else if (const auto* p = dist.As<ProductParams>()) {
    out["kind"] = "product";
    Json factors = Json::array();
    for (const Distribution& f : p->factors) {
      factors.push_back(DistributionToJson(f));
    }
    out["factors"] = std::move(factors);
  } else if (const auto* f = dist.As<FiniteDist>()) {
    out["kind"] = "finite";
    out["masses"] = f->masses();
  }
  return out;
}

absl::StatusOr<Distribution> DistributionFromJson(const Json& json) {
  if (!json.is_object()) {
    return absl::InvalidArgumentError("distribution must be a JSON object");
  }
  std::string kind;
  if (json.contains("kind")) {
    PPDL_ASSIGN_OR_RETURN(kind, GetString(json["kind"], "kind"));
  } else if (json.contains("masses")) {
    kind = "finite";
  } else {
    return KeyError("kind", "is required");
  }
  if (kind == "gaussian") return GaussianFromJson(json);
  if (kind == "mixture") {
    PPDL_RETURN_IF_ERROR(
        CheckKeys(json, "mixture", {"kind", "weights", "components"}));
    if (!json.contains("weights")) return KeyError("weights", "is required");
    if (!json.contains("components")) {
      return KeyError("components", "is required");
    }
    PPDL_ASSIGN_OR_RETURN(std::vector<double> weights,
                          GetNumbers(json["weights"], "weights"));
    PPDL_ASSIGN_OR_RETURN(std::vector<Distribution> comps,
                          DistributionList(json["components"], "components"));
    return Distribution::Mixture(std::move(comps), std::move(weights));
  }
  if (kind == "product") {
    PPDL_RETURN_IF_ERROR(CheckKeys(json, "product", {"kind", "factors"}));
    if (!json.contains("factors")) return KeyError("factors", "is required");
    PPDL_ASSIGN_OR_RETURN(std::vector<Distribution> factors,
                          DistributionList(json["factors"], "factors"));
    return Distribution::Product(std::move(factors));
  }
  if (kind == "finite") {
    PPDL_RETURN_IF_ERROR(CheckKeys(json, "finite", {"kind", "masses"}));
    if (!json.contains("masses")) return KeyError("masses", "is required");
    PPDL_ASSIGN_OR_RETURN(std::vector<double> masses,
                          GetNumbers(json["masses"], "masses"));
    PPDL_ASSIGN_OR_RETURN(FiniteDist f, FiniteDist::Create(std::move(masses)));
    return Distribution(std::move(f));
  }
  return KeyError("kind", absl::StrCat("has unsupported value '", kind,
                                       "' (gaussian, mixture, product, "
                                       "finite)"));
}

absl::StatusOr<Dataset> DatasetFromJson(const Json& json, DataRole role) {
  if (json.is_object()) {
    PPDL_RETURN_IF_ERROR(CheckKeys(json, "dataset", {"points"}));
    if (!json.contains("points")) return KeyError("points", "is required");
    return DatasetFromJson(json["points"], role);
  }
  if (!json.is_array()) {
    return KeyError("points", "must be an array of numbers or of points");
  }
  if (json.empty()) return Dataset(1, role);
  if (json.front().is_number()) {
    PPDL_ASSIGN_OR_RETURN(const std::vector<double> values,
                          GetNumbers(json, "points"));
    return Dataset::FromScalars(values, role);
  }
  std::vector<std::vector<double>> rows;
  rows.reserve(json.size());
  for (const Json& row : json) {
    if (!row.is_array()) {
      return KeyError("points", "must not mix numbers and points");
    }
    PPDL_ASSIGN_OR_RETURN(std::vector<double> r, GetNumbers(row, "points"));
    rows.push_back(std::move(r));
  }
  return Dataset::FromRows(rows, role);
}

Json DatasetToJson(const Dataset& data) {
  Json points = Json::array();
  for (size_t i = 0; i < data.size(); ++i) {
    const auto p = data.point(i);
    if (data.dim() == 1) {
      points.push_back(p[0]);
    } else {
      points.push_back(std::vector<double>(p.begin(), p.end()));
    }
  }
  return points;
}

absl::StatusOr<LearnerConfig> LearnerConfigFromJson(
    const Json& json, const std::vector<std::string>& extra_keys) {
  std::vector<std::string> allowed = {"alpha",
                                      "beta",
                                      "epsilon",
                                      "family",
                                      "k",
                                      "weight_step",
                                      "grid",
                                      "robust",
                                      "robustness",
                                      "gamma",
                                      "candidate_cap",
                                      "scheffe_trials",
                                      "scheffe_method",
                                      "anchor"};
  allowed.insert(allowed.end(), extra_keys.begin(), extra_keys.end());
  PPDL_RETURN_IF_ERROR(CheckKeys(json, "learner config", allowed));

  LearnerConfig c;
  const Json* grid_json = nullptr;
  for (const auto& [key, value] : json.items()) {
    if (key == "alpha") {
      PPDL_ASSIGN_OR_RETURN(c.alpha, GetNumber(value, key));
    } else if (key == "beta") {
      PPDL_ASSIGN_OR_RETURN(c.beta, GetNumber(value, key));
    } else if (key == "epsilon") {
      PPDL_ASSIGN_OR_RETURN(c.epsilon, GetNumber(value, key));
    } else if (key == "family") {
      PPDL_ASSIGN_OR_RETURN(const std::string name, GetString(value, key));
      auto kind = ParseFamily(name);
      if (!kind.ok())
        return KeyError(key, std::string(kind.status().message()));
      c.family.kind = *kind;
    } else if (key == "k") {
      PPDL_ASSIGN_OR_RETURN(c.family.k, GetInt(value, key));
    } else if (key == "weight_step") {
      PPDL_ASSIGN_OR_RETURN(c.family.weight_step, GetNumber(value, key));
    } else if (key == "grid") {
      PPDL_RETURN_IF_ERROR(CheckKeys(
          value, "grid",
          {"mu_range", "mu_step", "sigma_lo", "sigma_hi", "sigma_step"}));
      grid_json = &value;
    } else if (key == "robust") {
      PPDL_ASSIGN_OR_RETURN(c.robust, GetBool(value, key));
    } else if (key == "robustness") {
      PPDL_ASSIGN_OR_RETURN(c.robustness, GetNumber(value, key));
    } else if (key == "gamma") {
      PPDL_ASSIGN_OR_RETURN(c.gamma, GetNumber(value, key));
    } else if (key == "candidate_cap") {
      PPDL_ASSIGN_OR_RETURN(const int64_t cap, GetInteger(value, key));
      if (cap <= 0) return KeyError(key, "must be positive");
      c.candidate_cap = static_cast<size_t>(cap);
    } else if (key == "scheffe_trials") {
      PPDL_ASSIGN_OR_RETURN(c.scheffe.mc_trials, GetInt(value, key));
    } else if (key == "scheffe_method") {
      PPDL_ASSIGN_OR_RETURN(const std::string m, GetString(value, key));
      if (m == "auto") {
        c.scheffe.method = ScheffeMethod::kAuto;
      } else if (m == "monte_carlo") {
        c.scheffe.method = ScheffeMethod::kMonteCarlo;
      } else {
        return KeyError(key, "must be \"auto\" or \"monte_carlo\"");
      }
    } else if (key == "anchor") {
      PPDL_ASSIGN_OR_RETURN(const std::string a, GetString(value, key));
      if (a == "public") {
        c.anchor = AnchorMode::kPublicFit;
      } else if (a == "prior") {
        c.anchor = AnchorMode::kPrior;
      } else {
        return KeyError(key, "must be \"public\" or \"prior\"");
      }
    }
  }
  if (grid_json != nullptr) {
    // Unlisted grid fields keep their alpha-derived defaults.
    GridSpec g = DefaultGrid(c.alpha, c.robust);
    for (const auto& [gk, gv] : grid_json->items()) {
      PPDL_ASSIGN_OR_RETURN(const double x, GetNumber(gv, gk));
      if (gk == "mu_range") g.mu_range = x;
      if (gk == "mu_step") g.mu_step = x;
      if (gk == "sigma_lo") g.sigma_lo = x;
      if (gk == "sigma_hi") g.sigma_hi = x;
      if (gk == "sigma_step") g.sigma_step = x;
    }
    c.grid = g;
  }
  const absl::Status valid = c.Validate();
  if (!valid.ok()) return valid;
  return c;
}

Json LearnerConfigToJson(const LearnerConfig& config) {
  Json out;
  out["alpha"] = config.alpha;
  out["beta"] = config.beta;
  out["epsilon"] = config.epsilon;
  out["family"] = std::string(FamilyName(config.family.kind));
  out["k"] = config.family.k;
  out["weight_step"] = config.family.weight_step;
  const GridSpec g = config.EffectiveGrid();
  out["grid"] = {{"mu_range", g.mu_range},
                 {"mu_step", g.mu_step},
                 {"sigma_lo", g.sigma_lo},
                 {"sigma_hi", g.sigma_hi},
                 {"sigma_step", g.sigma_step}};
  out["robust"] = config.robust;
  out["robustness"] = config.robustness;
  out["gamma"] = config.gamma;
  out["candidate_cap"] = config.candidate_cap;
  out["scheffe_trials"] = config.scheffe.mc_trials;
  out["scheffe_method"] =
      config.scheffe.method == ScheffeMethod::kAuto ? "auto" : "monte_carlo";
  out["anchor"] = config.anchor == AnchorMode::kPrior ? "prior" : "public";
  return out;
}

absl::StatusOr<ExperimentSpec> ExperimentSpecFromJson(const Json& json) {
  PPDL_RETURN_IF_ERROR(
      CheckKeys(json, "experiment spec",
                {"dim", "m", "n", "epsilon", "trials", "truth", "public_source",
                 "learner", "tv_trials", "decompose"}));
  ExperimentSpec spec;
  for (const auto& [key, value] : json.items()) {
    if (key == "dim") {
      PPDL_ASSIGN_OR_RETURN(spec.dim, GetInt(value, key));
    } else if (key == "m") {
      PPDL_ASSIGN_OR_RETURN(spec.m_values, GetInts(value, key));
    } else if (key == "n") {
      PPDL_ASSIGN_OR_RETURN(spec.n_values, GetInts(value, key));
    } else if (key == "epsilon") {
      PPDL_ASSIGN_OR_RETURN(spec.epsilons, GetNumbers(value, key));
    } else if (key == "trials") {
      PPDL_ASSIGN_OR_RETURN(spec.trials, GetInt(value, key));
    } else if (key == "truth") {
      PPDL_RETURN_IF_ERROR(CheckKeys(
          value, "truth",
          {"distribution", "mean_range", "var_range", "min_separation"}));
      for (const auto& [tk, tv] : value.items()) {
        if (tk == "distribution") {
          PPDL_ASSIGN_OR_RETURN(Distribution d, DistributionFromJson(tv));
          spec.truth.fixed = std::move(d);
        } else if (tk == "mean_range") {
          PPDL_ASSIGN_OR_RETURN(const auto r, GetRange(tv, tk));
          spec.truth.mean_lo = r.first;
          spec.truth.mean_hi = r.second;
        } else if (tk == "var_range") {
          PPDL_ASSIGN_OR_RETURN(const auto r, GetRange(tv, tk));
          spec.truth.var_lo = r.first;
          spec.truth.var_hi = r.second;
        } else if (tk == "min_separation") {
          PPDL_ASSIGN_OR_RETURN(spec.truth.min_separation, GetNumber(tv, tk));
        }
      }
    } else if (key == "public_source") {
      PPDL_ASSIGN_OR_RETURN(Distribution d, DistributionFromJson(value));
      spec.public_source = std::move(d);
    } else if (key == "learner") {
      PPDL_ASSIGN_OR_RETURN(spec.learner, LearnerConfigFromJson(value));
    } else if (key == "tv_trials") {
      PPDL_ASSIGN_OR_RETURN(spec.tv.mc_trials, GetInt(value, key));
    } else if (key == "decompose") {
      PPDL_ASSIGN_OR_RETURN(spec.decompose, GetBool(value, key));
    }
  }
  return spec;
}

Json SelectionResultToJson(const SelectionResult& result) {
  Json out;
  out["chosen"] = result.chosen;
  out["utilities"] = result.utilities;
  out["probabilities"] = result.probabilities;
  out["epsilon"] = result.epsilon;
  out["n"] = result.n;
  return out;
}

Json CandidateSetToJson(const CandidateSet& set) {
  Json candidates = Json::array();
  for (const Distribution& d : set.hypotheses) {
    candidates.push_back(DistributionToJson(d));
  }
  Json provenance = Json::array();
  for (const Provenance& p : set.provenance) {
    Json record;
    if (p.encoding.has_value()) {
      record["indices"] = p.encoding->indices;
      record["bitstring"] = BitsToHex(p.encoding->bits);
    } else {
      record["indices"] = Json::array();
      record["bitstring"] = "";
    }
    record["grid_indices"] = p.grid_indices;
    provenance.push_back(std::move(record));
  }
  Json out;
  out["candidates"] = std::move(candidates);
  out["provenance"] = std::move(provenance);
  return out;
}

}  // namespace ppdl
