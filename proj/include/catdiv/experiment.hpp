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

#ifndef CATDIV_EXPERIMENT_HPP_
#define CATDIV_EXPERIMENT_HPP_

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace catdiv::experiment {

enum class Generator { kDirichlet, kMarkov };
enum class Divergence { kKl, kHellingerSq };
enum class EstimatorId { kDpm, kDp, kNaive, kJeffreys, kTrybula, kPerks, kZhang };

std::string to_string(Generator g);
std::string to_string(Divergence d);
std::string to_string(EstimatorId e);
// Throw ParseError on unknown names.
Generator parse_generator(const std::string& s);
Divergence parse_divergence(const std::string& s);
EstimatorId parse_estimator(const std::string& s);

struct ExperimentConfig {
  Generator generator = Generator::kDirichlet;
  std::int64_t categories = 400;
  double alpha_true = 1.0;
  double beta_true = 1.0;
  // Grids scanned by the N* command; empty means {alpha_true} / {beta_true}.
  std::vector<double> alpha_grid;
  std::vector<double> beta_grid;
  int states = 20;
  int gram_length = 2;
  std::vector<std::int64_t> ladder = {100, 200, 400, 1000, 4000, 10000, 40000};
  int repetitions = 10;
  std::vector<EstimatorId> estimators = {EstimatorId::kDpm,      EstimatorId::kDp,
                                         EstimatorId::kNaive,    EstimatorId::kJeffreys,
                                         EstimatorId::kTrybula,  EstimatorId::kPerks,
                                         EstimatorId::kZhang};
  Divergence divergence = Divergence::kKl;
  std::uint64_t master_seed = 1;
  bool nested_subsample = false;
  // Parent sample size for nested subsampling; 0 means ten times the largest
  // ladder size.
  std::int64_t parent_size = 0;
  int threads = 1;

  // K for Dirichlet runs, S^L for Markov runs.
  std::int64_t effective_categories() const;
  // Throws ParseError describing the first violated constraint.
  void validate() const;
};

// Applies one key=value setting. Throws ParseError on unknown keys or values.
void apply_setting(ExperimentConfig& config, const std::string& key, const std::string& value);

// key=value per line; '#' starts a comment.
void load_config(ExperimentConfig& config, std::istream& in, const std::string& source_name);

struct ConvergenceRow {
  EstimatorId estimator = EstimatorId::kDpm;
  std::int64_t n = 0;
  int rep = 0;
  double estimate = 0.0;
  double true_value = 0.0;
  std::optional<double> posterior_std;
};

// Rows ordered by (estimator in config order, N, rep); identical for any
// thread count.
std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& config);

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows);
std::vector<ConvergenceRow> parse_convergence_csv(std::istream& in);

struct CurvePoint {
  EstimatorId estimator = EstimatorId::kDpm;
  std::int64_t n = 0;
  int repetitions = 0;
  // Dirichlet: mean estimate and mean truth. Markov: mean of estimate/truth
  // and 1.
  double mean_estimate = 0.0;
  double mean_true = 0.0;
  double relative_error = 0.0;
  double spread = 0.0;           // across-repetition std of the averaged quantity
  double mean_posterior_std = 0.0;
};

std::vector<CurvePoint> summarize(const std::vector<ConvergenceRow>& rows, Generator generator);

// Smallest ladder size from which every relative error stays below tolerance;
// nullopt if the last point fails. Points must share one estimator.
std::optional<std::int64_t> first_stable_entry(const std::vector<CurvePoint>& curve,
                                               double tolerance = 0.05);

struct NstarRow {
  double alpha_true = 0.0;
  double beta_true = 0.0;
  EstimatorId estimator = EstimatorId::kDpm;
  std::optional<double> nstar_over_k;
};

std::vector<NstarRow> run_nstar(const ExperimentConfig& config);
void write_nstar_csv(std::ostream& out, const std::vector<NstarRow>& rows);

}  // namespace catdiv::experiment

#endif  // CATDIV_EXPERIMENT_HPP_
