// Copyright 2026 The catdiv Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "catdiv/counts.hpp"
#include "catdiv/error.hpp"
#include "catdiv/estimators.hpp"
#include "catdiv/experiment.hpp"
#include "json.hpp"

namespace {

using catdiv::experiment::Divergence;
using catdiv::experiment::EstimatorId;
using catdiv::experiment::ExperimentConfig;

constexpr int kExitInput = 2;
constexpr int kExitDomain = 3;

struct EstimateArgs {
  std::vector<std::string> files;
  std::string estimator = "dpm";
  std::string divergence = "kl";
  std::optional<std::int64_t> k;
};

// Flags shared by the benchmark commands, stored as raw strings so that they
// can override a config file through the same key=value path.
struct ExperimentArgs {
  std::string config_path;
  std::string out_path;
  std::vector<std::pair<std::string, std::string>> overrides;
  bool nested = false;
};

nlohmann::json diagnostics_json(const catdiv::Diagnostics& d) {
  return {{"alpha_star", d.alpha_star},
          {"beta_star", d.beta_star},
          {"grid_bins_alpha", d.grid_bins_alpha},
          {"grid_bins_beta", d.grid_bins_beta},
          {"log_evidence_at_max", d.log_evidence_at_max},
          {"log_posterior_at_max", d.log_posterior_at_max},
          {"alpha_at_boundary", d.alpha_at_boundary},
          {"beta_at_boundary", d.beta_at_boundary},
          {"collapsed", d.collapsed},
          {"measure", d.measure}};
}

catdiv::PseudoCount pseudo_count(EstimatorId id) {
  switch (id) {
    case EstimatorId::kJeffreys: return catdiv::PseudoCount::kJeffreys;
    case EstimatorId::kTrybula: return catdiv::PseudoCount::kTrybula;
    case EstimatorId::kPerks: return catdiv::PseudoCount::kPerks;
    default: return catdiv::PseudoCount::kNaive;
  }
}

int run_estimate(const EstimateArgs& args) {
  const EstimatorId id = catdiv::experiment::parse_estimator(args.estimator);
  const Divergence div = catdiv::experiment::parse_divergence(args.divergence);
  const bool kl = div == Divergence::kKl;
  if (id == EstimatorId::kZhang && !kl) {
    throw catdiv::ParseError("zhang estimates only the kl divergence");
  }

  const auto table = [&] {
    if (args.files.size() == 1) return catdiv::read_pair_csv(args.files[0]);
    return catdiv::table_from_count_files(catdiv::read_count_file(args.files[0]),
                                          catdiv::read_count_file(args.files[1]), args.k);
  }();

  nlohmann::json out = {{"estimator", args.estimator}, {"divergence", args.divergence}};
  switch (id) {
    case EstimatorId::kDpm:
    case EstimatorId::kDp: {
      const bool dpm = id == EstimatorId::kDpm;
      const auto r = kl ? (dpm ? catdiv::estimate_dkl_dpm(table) : catdiv::estimate_dkl_dp(table))
                        : (dpm ? catdiv::estimate_hellinger_dpm(table)
                               : catdiv::estimate_hellinger_dp(table));
      out["value"] = r.value;
      if (r.posterior_std) out["posterior_std"] = *r.posterior_std;
      out["diagnostics"] = diagnostics_json(r.diagnostics);
      break;
    }
    case EstimatorId::kZhang:
      out["value"] = catdiv::estimate_dkl_zhang(table);
      out["diagnostics"] = nlohmann::json::object();
      break;
    default: {
      const auto pc = pseudo_count(id);
      out["value"] = kl ? catdiv::estimate_dkl_plugin(table, pc)
                        : catdiv::estimate_hellinger_plugin(table, pc);
      const auto ab = catdiv::pseudo_counts(table, pc);
      out["diagnostics"] = {{"pseudo_count_a", ab.a}, {"pseudo_count_b", ab.b}};
      break;
    }
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

ExperimentConfig build_config(const ExperimentArgs& args) {
  ExperimentConfig config;
  if (!args.config_path.empty()) {
    std::ifstream in(args.config_path);
    if (!in) throw catdiv::ParseError("cannot open config file " + args.config_path);
    catdiv::experiment::load_config(config, in, args.config_path);
  }
  for (const auto& [key, value] : args.overrides) {
    catdiv::experiment::apply_setting(config, key, value);
  }
  if (args.nested) config.nested_subsample = true;
  config.validate();
  return config;
}

template <typename Write>
void emit(const std::string& path, Write&& write) {
  if (path.empty() || path == "-") {
    write(std::cout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw catdiv::ParseError("cannot write " + path);
  write(out);
  if (!out) throw catdiv::ParseError("failed writing " + path);
}

void add_experiment_flags(CLI::App* cmd, ExperimentArgs& args) {
  cmd->add_option("--config", args.config_path, "key=value config file (flags override it)");
  cmd->add_option("--out", args.out_path, "output CSV path (default stdout)");
  cmd->add_flag("--nested-subsample", args.nested,
                "draw ladder samples as nested subsets of one parent sample");
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"--generator", "generator"},     {"--estimator", "estimators"},
      {"--divergence", "divergence"},   {"--k", "k"},
      {"--alpha", "alpha"},             {"--beta", "beta"},
      {"--alpha-grid", "alpha_grid"},   {"--beta-grid", "beta_grid"},
      {"--states", "states"},           {"--gram-length", "gram_length"},
      {"--ladder", "ladder"},           {"--reps", "reps"},
      {"--seed", "seed"},               {"--parent-size", "parent_size"},
      {"--threads", "threads"}};
  for (const auto& [flag, key] : flags) {
    cmd->add_option_function<std::string>(
        flag, [&args, key = key](const std::string& v) { args.overrides.emplace_back(key, v); },
        "sets '" + key + "'");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bayesian estimators of divergences between categorical samples"};
  app.require_subcommand(1);

  EstimateArgs est;
  auto* estimate = app.add_subcommand("estimate", "estimate a divergence from two samples");
  estimate->add_option("files", est.files,
                       "two category<TAB>count files, or one CSV of n,m rows")
      ->required()
      ->expected(1, 2);
  estimate->add_option("--estimator", est.estimator,
                       "dpm, dp, naive, jeffreys, trybula, perks or zhang");
  estimate->add_option("--divergence", est.divergence, "kl or hellinger2");
  estimate->add_option("--k", est.k, "number of categories");

  ExperimentArgs conv_args;
  auto* convergence = app.add_subcommand("convergence", "estimates along a sample-size ladder");
  add_experiment_flags(convergence, conv_args);

  ExperimentArgs nstar_args;
  auto* nstar = app.add_subcommand("nstar", "N*/K scores over a grid of concentrations");
  add_experiment_flags(nstar, nstar_args);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (estimate->parsed()) return run_estimate(est);
    if (convergence->parsed()) {
      const auto config = build_config(conv_args);
      const auto rows = catdiv::experiment::run_convergence(config);
      emit(conv_args.out_path,
           [&](std::ostream& out) { catdiv::experiment::write_convergence_csv(out, rows); });
      return 0;
    }
    if (nstar->parsed()) {
      const auto config = build_config(nstar_args);
      const auto rows = catdiv::experiment::run_nstar(config);
      emit(nstar_args.out_path,
           [&](std::ostream& out) { catdiv::experiment::write_nstar_csv(out, rows); });
      return 0;
    }
  } catch (const catdiv::DomainError& e) {
    std::fprintf(stderr, "catdiv: %s\n", e.what());
    return kExitDomain;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "catdiv: %s\n", e.what());
    return kExitInput;
  }
  return kExitInput;
}
