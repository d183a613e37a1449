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

#include "ppdl/cli.h"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "absl/status/status.h"
#include "absl/status/statusor.h"
#include "absl/strings/str_cat.h"
#include "absl/strings/str_join.h"
#include "ppdl/distributions.h"
#include "ppdl/experiment.h"
#include "ppdl/io.h"
#include "ppdl/lowerbound.h"
#include "ppdl/pipeline.h"
#include "ppdl/selection.h"
#include "ppdl/serialization.h"
#include "ppdl/status_macros.h"
#include "ppdl/total_variation.h"
#include "ppdl/yatracos.h"

namespace ppdl {
namespace {

inline constexpr std::string_view kAuditReadPublic = "read_public";
inline constexpr std::string_view kAuditReadPrivate = "read_private";

struct LearnArgs {
  std::string config;
  std::string public_path;
  std::string private_path;
  std::string out;
  std::string candidates_out;
  uint64_t seed = 0;
  bool audit = false;
};

struct ExperimentArgs {
  std::string spec;
  std::string out;
  uint64_t seed = 0;
};

struct LowerBoundArgs {
  int d = 2;
  std::vector<int> ks{10, 20, 40, 80};
  double trials_eta = NflBudgets{}.eta_trials;
  double trials_rk = NflBudgets{}.rk_inner;
  double trials_sk = NflBudgets{}.sk_q;
  double rk_outer = NflBudgets{}.rk_outer;
  double sk_x = NflBudgets{}.sk_x;
  std::string out;
  uint64_t seed = 0;
};

struct YatracosArgs {
  int domain = 0;
  std::string classes;
  double m = 40;
  double n = 2000;
  double epsilon = 1.0;
  double alpha = 0.1;
  double trials = 1;
  std::optional<int> db_size;
  double db_cap = kDefaultSmallDbCap;
  std::string out;
  uint64_t seed = 0;
};

struct TvArgs {
  std::string p;
  std::string q;
  double trials = TvOptions{}.mc_trials;
  std::optional<uint64_t> seed;
  std::string out;
};

struct SuggestArgs {
  SampleSizeInputs in;
};

// Accepts counts written as 1e5.
absl::StatusOr<int> Count(std::string_view flag, double value) {
  if (!(value >= 1) || value > 2147483647.0 || value != std::floor(value)) {
    return absl::InvalidArgumentError(
        absl::StrCat("--", std::string(flag),
                     " must be a positive integer, got ", FormatDouble(value)));
  }
  return static_cast<int>(value);
}

absl::StatusOr<Json> ReadJsonFile(const std::string& path,
                                  std::string_view what) {
  PPDL_ASSIGN_OR_RETURN(const std::string text, ReadFile(path));
  auto json = ParseJson(text);
  if (!json.ok()) {
    return absl::InvalidArgumentError(
        absl::StrCat(std::string(what), " ", path, ": ",
                     std::string(json.status().message())));
  }
  return json;
}

// Inline JSON when the argument starts with '{', otherwise a file path.
absl::StatusOr<Distribution> DistributionArg(const std::string& arg) {
  size_t first = 0;
  while (first < arg.size() &&
         std::isspace(static_cast<unsigned char>(arg[first]))) {
    ++first;
  }
  Json json;
  if (first < arg.size() && arg[first] == '{') {
    PPDL_ASSIGN_OR_RETURN(json, ParseJson(arg));
  } else {
    PPDL_ASSIGN_OR_RETURN(json, ReadJsonFile(arg, "distribution"));
  }
  return DistributionFromJson(json);
}

absl::StatusOr<std::string> RunLearn(const LearnArgs& args) {
  PPDL_ASSIGN_OR_RETURN(const Json config_json,
                        ReadJsonFile(args.config, "config"));
  PPDL_ASSIGN_OR_RETURN(LearnerConfig config,
                        LearnerConfigFromJson(config_json, {"dim"}));
  config.seed = RngSeed{args.seed};
  std::optional<int> config_dim;
  if (config_json.contains("dim")) {
    if (!config_json["dim"].is_number_integer() ||
        config_json["dim"].get<int>() < 1) {
      return absl::InvalidArgumentError("key 'dim' must be a positive integer");
    }
    config_dim = config_json["dim"].get<int>();
  }

  AuditLog log;
  PPDL_ASSIGN_OR_RETURN(const Json public_json,
                        ReadJsonFile(args.public_path, "public data"));
  PPDL_ASSIGN_OR_RETURN(const Dataset public_data,
                        DatasetFromJson(public_json, DataRole::kPublic));
  log.Record(kAuditReadPublic);
  int dim = 0;
  if (!public_data.empty()) {
    dim = public_data.dim();
    if (config_dim.has_value() && *config_dim != dim) {
      return absl::InvalidArgumentError(
          absl::StrCat("key 'dim' is ", *config_dim,
                       " but public points have dimension ", dim));
    }
  } else if (config_dim.has_value()) {
    dim = *config_dim;
  } else {
    return absl::InvalidArgumentError(
        "key 'dim' is required when the public dataset is empty");
  }
  PPDL_ASSIGN_OR_RETURN(PreparedCandidates prepared,
                        PrepareCandidates(public_data, dim, config, &log));
  Json candidate_json;
  if (!args.candidates_out.empty()) {
    candidate_json = CandidateSetToJson(prepared.candidates);
  }

  PPDL_ASSIGN_OR_RETURN(const Json private_json,
                        ReadJsonFile(args.private_path, "private data"));
  PPDL_ASSIGN_OR_RETURN(const Dataset private_data,
                        DatasetFromJson(private_json, DataRole::kPrivate));
  log.Record(kAuditReadPrivate);
  if (private_data.empty()) {
    return absl::InvalidArgumentError("private dataset is empty");
  }
  if (private_data.dim() != dim) {
    return absl::InvalidArgumentError(
        absl::StrCat("private points have dimension ", private_data.dim(),
                     ", expected ", dim));
  }
  PPDL_ASSIGN_OR_RETURN(
      LearnResult result,
      FinishLearn(std::move(prepared), private_data, config, &log));

  Json out;
  out["hypothesis"] = DistributionToJson(result.hypothesis);
  out["selection"] = SelectionResultToJson(result.selection);
  out["candidates"] = result.candidates.size();
  out["seed"] = args.seed;
  out["config"] = LearnerConfigToJson(config);
  if (args.audit) out["audit"] = log.events();
  if (!args.candidates_out.empty()) {
    PPDL_RETURN_IF_ERROR(
        WriteFileAtomic(args.candidates_out, DumpJson(candidate_json)));
  }
  PPDL_RETURN_IF_ERROR(WriteFileAtomic(args.out, DumpJson(out)));
  return absl::StrCat(
      "learn: chose candidate ", result.selection.chosen, " of ",
      result.candidates.size(), " (n=", private_data.size(),
      ", epsilon=", FormatDouble(config.epsilon), ") -> ", args.out);
}

absl::StatusOr<std::string> RunExperimentCommand(const ExperimentArgs& args) {
  PPDL_ASSIGN_OR_RETURN(const Json json, ReadJsonFile(args.spec, "spec"));
  PPDL_ASSIGN_OR_RETURN(ExperimentSpec spec, ExperimentSpecFromJson(json));
  spec.seed = RngSeed{args.seed};
  PPDL_RETURN_IF_ERROR(ValidateSpec(spec));
  PPDL_ASSIGN_OR_RETURN(const std::vector<TrialRecord> rows,
                        RunExperiment(spec));
  PPDL_RETURN_IF_ERROR(WriteFileAtomic(args.out, FormatCsv(rows)));
  size_t successes = 0;
  for (const TrialRecord& r : rows) successes += r.success ? 1 : 0;
  return absl::StrCat("experiment: ", rows.size(), " rows, ", successes,
                      " successes -> ", args.out);
}

absl::StatusOr<std::string> RunLowerBound(const LowerBoundArgs& args,
                                          std::ostream& err) {
  NflBudgets budgets;
  PPDL_ASSIGN_OR_RETURN(budgets.eta_trials,
                        Count("trials-eta", args.trials_eta));
  PPDL_ASSIGN_OR_RETURN(budgets.rk_inner, Count("trials-rk", args.trials_rk));
  PPDL_ASSIGN_OR_RETURN(budgets.sk_q, Count("trials-sk", args.trials_sk));
  PPDL_ASSIGN_OR_RETURN(budgets.rk_outer, Count("rk-outer", args.rk_outer));
  PPDL_ASSIGN_OR_RETURN(budgets.sk_x, Count("sk-x", args.sk_x));
  PPDL_ASSIGN_OR_RETURN(
      const NflReport report,
      MakeNflReport(args.d, args.ks, budgets, RngSeed{args.seed}));
  PPDL_RETURN_IF_ERROR(WriteFileAtomic(args.out, FormatNflCsv(report)));
  for (const std::string& w : report.warnings) err << "warning: " << w << "\n";
  return absl::StrCat(
      "lowerbound: d=", report.d, " rk_slope=", FormatDouble(report.rk_slope),
      " decay_flag=", report.decay_flag ? 1 : 0, " -> ", args.out);
}

absl::StatusOr<std::vector<FiniteDist>> ReadClasses(const std::string& path,
                                                    int domain) {
  PPDL_ASSIGN_OR_RETURN(Json json, ReadJsonFile(path, "classes"));
  if (json.is_object()) {
    if (!json.contains("classes") || json.size() != 1) {
      return absl::InvalidArgumentError(
          "classes file must be an array or {\"classes\": [...]}");
    }
    json = json["classes"];
  }
  if (!json.is_array() || json.empty()) {
    return absl::InvalidArgumentError(
        "key 'classes' must be a non-empty array of finite distributions");
  }
  std::vector<FiniteDist> classes;
  for (const Json& item : json) {
    // A bare array is shorthand for {"masses": [...]}.
    PPDL_ASSIGN_OR_RETURN(
        const Distribution d,
        DistributionFromJson(item.is_array() ? Json{{"masses", item}} : item));
    const auto* f = d.As<FiniteDist>();
    if (f == nullptr) {
      return absl::InvalidArgumentError(
          "key 'classes' must contain finite distributions");
    }
    if (f->domain_size() != domain) {
      return absl::InvalidArgumentError(
          absl::StrCat("key 'masses' has ", f->domain_size(),
                       " entries but --domain is ", domain));
    }
    classes.push_back(*f);
  }
  return classes;
}

absl::StatusOr<std::string> RunYatracos(const YatracosArgs& args) {
  if (args.domain < 1 || args.domain > kMaxFiniteDomain) {
    return absl::InvalidArgumentError(
        absl::StrCat("--domain must be in [1, ", kMaxFiniteDomain, "]"));
  }
  YatracosDemoSpec spec;
  PPDL_ASSIGN_OR_RETURN(spec.classes, ReadClasses(args.classes, args.domain));
  PPDL_ASSIGN_OR_RETURN(spec.m, Count("m", args.m));
  PPDL_ASSIGN_OR_RETURN(spec.n, Count("n", args.n));
  PPDL_ASSIGN_OR_RETURN(spec.trials, Count("trials", args.trials));
  spec.epsilon = args.epsilon;
  spec.alpha = args.alpha;
  spec.seed = RngSeed{args.seed};
  spec.db_size = args.db_size;
  PPDL_ASSIGN_OR_RETURN(const int cap, Count("db-cap", args.db_cap));
  spec.db_cap = static_cast<size_t>(cap);
  PPDL_ASSIGN_OR_RETURN(const std::vector<YatracosTrial> trials,
                        RunYatracosDemo(spec));
  PPDL_RETURN_IF_ERROR(WriteFileAtomic(args.out, FormatYatracosCsv(trials)));
  size_t successes = 0;
  for (const YatracosTrial& t : trials) successes += t.success ? 1 : 0;
  return absl::StrCat("yatracos-demo: ", successes, "/", trials.size(),
                      " trials within alpha -> ", args.out);
}

bool NeedsMonteCarlo(const Distribution& p, const Distribution& q) {
  if (p.IsGaussian1d() && q.IsGaussian1d()) return false;
  if (p.As<FiniteDist>() != nullptr && q.As<FiniteDist>() != nullptr) {
    return false;
  }
  return true;
}

absl::StatusOr<std::string> RunTv(const TvArgs& args) {
  PPDL_ASSIGN_OR_RETURN(const Distribution p, DistributionArg(args.p));
  std::optional<Distribution> q_storage;
  if (args.q != "same") {
    PPDL_ASSIGN_OR_RETURN(q_storage, DistributionArg(args.q));
  }
  const Distribution& q = q_storage.has_value() ? *q_storage : p;
  TvOptions options;
  PPDL_ASSIGN_OR_RETURN(options.mc_trials, Count("trials", args.trials));
  if (NeedsMonteCarlo(p, q) && p.dim() == q.dim()) {
    if (!args.seed.has_value()) {
      return absl::InvalidArgumentError(
          "--seed is required when TV is estimated by Monte Carlo");
    }
  }
  if (args.seed.has_value()) options.seed = RngSeed{*args.seed};
  PPDL_ASSIGN_OR_RETURN(const TvEstimate tv, TotalVariation(p, q, options));
  if (!args.out.empty()) {
    Json out;
    out["tv"] = tv.value;
    out["half_width"] = tv.half_width;
    out["method"] = std::string(TvMethodName(tv.method));
    PPDL_RETURN_IF_ERROR(WriteFileAtomic(args.out, DumpJson(out)));
  }
  return absl::StrCat(FormatDouble(tv.value),
                      "\nmethod=", std::string(TvMethodName(tv.method)),
                      " half_width=", FormatDouble(tv.half_width));
}

absl::StatusOr<std::string> RunSuggest(const SuggestArgs& args) {
  PPDL_ASSIGN_OR_RETURN(const SampleSizeSuggestion s,
                        SuggestPrivateSamples(args.in));
  const int m = args.in.m > 0 ? args.in.m : args.in.tau;
  return absl::StrCat(FormatDouble(s.n),
                      "\nn = ceil(C*(1/alpha^2 + 1/(alpha*epsilon))*(bits + "
                      "tau*ln(m) + ln(1/(split*beta)))) with C=",
                      FormatDouble(args.in.constant), " m=", m,
                      " split=", FormatDouble(args.in.split),
                      " complexity=", FormatDouble(s.complexity),
                      " selection_beta=", FormatDouble(s.selection_beta));
}

}  // namespace

int ExitCodeFor(const absl::Status& status) {
  switch (status.code()) {
    case absl::StatusCode::kOk:
      return kExitOk;
    case absl::StatusCode::kInvalidArgument:
    case absl::StatusCode::kNotFound:
    case absl::StatusCode::kOutOfRange:
      return kExitConfigError;
    default:
      return kExitNumericalFailure;
  }
}

int Dispatch(int argc, const char* const* argv, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Public-private distribution learning", "ppdl"};
  app.require_subcommand(1);
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "Suppress the summary line");

  LearnArgs learn;
  CLI::App* learn_cmd =
      app.add_subcommand("learn",
                         "Learn a distribution from public and "
                         "private samples");
  learn_cmd->add_option("--config", learn.config, "Learner config JSON")
      ->required();
  learn_cmd->add_option("--public", learn.public_path, "Public samples JSON")
      ->required();
  learn_cmd->add_option("--private", learn.private_path, "Private samples JSON")
      ->required();
  learn_cmd->add_option("--out", learn.out, "Result JSON")->required();
  learn_cmd->add_option("--candidates", learn.candidates_out,
                        "Also write the candidate set JSON here");
  learn_cmd->add_option("--seed", learn.seed, "Master seed")->required();
  learn_cmd->add_flag("--audit", learn.audit,
                      "Include the operation-order audit log");

  ExperimentArgs experiment;
  CLI::App* experiment_cmd =
      app.add_subcommand("experiment", "Run a seeded experiment grid");
  experiment_cmd
      ->add_option("--spec,--config", experiment.spec, "Experiment spec JSON")
      ->required();
  experiment_cmd->add_option("--out", experiment.out, "Report CSV")->required();
  experiment_cmd->add_option("--seed", experiment.seed, "Master seed")
      ->required();

  LowerBoundArgs lb;
  CLI::App* lb_cmd = app.add_subcommand(
      "lowerbound", "Estimate the flat-Gaussian no-free-lunch quantities");
  lb_cmd->add_option("--d", lb.d, "Dimension")->capture_default_str();
  lb_cmd->add_option("--k", lb.ks, "Comma-separated k values")
      ->delimiter(',')
      ->capture_default_str();
  lb_cmd->add_option("--trials-eta", lb.trials_eta, "Samples for eta")
      ->capture_default_str();
  lb_cmd
      ->add_option("--trials-rk", lb.trials_rk,
                   "Inner samples per outer draw for r_k")
      ->capture_default_str();
  lb_cmd
      ->add_option("--trials-sk", lb.trials_sk,
                   "Alternative draws per point for s_k")
      ->capture_default_str();
  lb_cmd->add_option("--rk-outer", lb.rk_outer, "Outer draws for r_k")
      ->capture_default_str();
  lb_cmd->add_option("--sk-x", lb.sk_x, "Sample points for s_k")
      ->capture_default_str();
  lb_cmd->add_option("--out", lb.out, "Report CSV")->required();
  lb_cmd->add_option("--seed", lb.seed, "Master seed")->required();

  YatracosArgs yat;
  CLI::App* yat_cmd = app.add_subcommand(
      "yatracos-demo", "Finite-domain Yatracos learner with SmallDB");
  yat_cmd->add_option("--domain", yat.domain, "Domain size")->required();
  yat_cmd
      ->add_option("--classes", yat.classes,
                   "JSON array of finite distributions")
      ->required();
  yat_cmd->add_option("--m", yat.m, "Public samples")->capture_default_str();
  yat_cmd->add_option("--n", yat.n, "Private samples")->capture_default_str();
  yat_cmd->add_option("--epsilon", yat.epsilon, "Privacy parameter")
      ->capture_default_str();
  yat_cmd->add_option("--alpha", yat.alpha, "Accuracy target")
      ->capture_default_str();
  yat_cmd->add_option("--trials", yat.trials, "Trials")->capture_default_str();
  yat_cmd->add_option("--db-size", yat.db_size, "SmallDB database size");
  yat_cmd
      ->add_option("--db-cap", yat.db_cap,
                   "Largest number of databases SmallDB may enumerate")
      ->capture_default_str();
  yat_cmd->add_option("--out", yat.out, "Report CSV")->required();
  yat_cmd->add_option("--seed", yat.seed, "Master seed")->required();

  TvArgs tv;
  CLI::App* tv_cmd = app.add_subcommand("tv",
                                        "Total variation distance between two "
                                        "distributions");
  tv_cmd->add_option("--p", tv.p, "Distribution JSON or file")->required();
  tv_cmd->add_option("--q", tv.q, "Distribution JSON, file, or 'same'")
      ->required();
  tv_cmd->add_option("--trials", tv.trials, "Monte Carlo samples")
      ->capture_default_str();
  tv_cmd->add_option("--seed", tv.seed,
                     "Seed; required when Monte Carlo is used");
  tv_cmd->add_option("--out", tv.out, "Optional result JSON");

  SuggestArgs suggest;
  CLI::App* suggest_cmd = app.add_subcommand(
      "suggest-n", "Private sample size suggested by the selection bound");
  suggest_cmd->add_option("--alpha", suggest.in.alpha, "Accuracy")->required();
  suggest_cmd->add_option("--beta", suggest.in.beta, "Failure probability")
      ->required();
  suggest_cmd->add_option("--epsilon", suggest.in.epsilon, "Privacy")
      ->required();
  suggest_cmd->add_option("--tau", suggest.in.tau, "Forwarded samples")
      ->required();
  suggest_cmd->add_option("--bits", suggest.in.bits, "Bit budget")->required();
  suggest_cmd->add_option("--m", suggest.in.m, "Public samples (default tau)");
  suggest_cmd
      ->add_option("--split", suggest.in.split,
                   "Share of beta given to selection")
      ->capture_default_str();
  suggest_cmd
      ->add_option("--constant", suggest.in.constant, "Leading constant C")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfigError;
  }

  absl::StatusOr<std::string> summary;
  if (*learn_cmd) {
    summary = RunLearn(learn);
  } else if (*experiment_cmd) {
    summary = RunExperimentCommand(experiment);
  } else if (*lb_cmd) {
    summary = RunLowerBound(lb, err);
  } else if (*yat_cmd) {
    summary = RunYatracos(yat);
  } else if (*tv_cmd) {
    summary = RunTv(tv);
  } else if (*suggest_cmd) {
    summary = RunSuggest(suggest);
  }
  if (!summary.ok()) {
    err << "ppdl: " << summary.status().message() << "\n";
    return ExitCodeFor(summary.status());
  }
  // tv and suggest-n print their value even when quiet.
  if (*tv_cmd || *suggest_cmd) {
    const std::string& s = *summary;
    out << (quiet ? s.substr(0, s.find('\n')) : s) << "\n";
  } else if (!quiet) {
    out << *summary << "\n";
  }
  return kExitOk;
}

}  // namespace ppdl
