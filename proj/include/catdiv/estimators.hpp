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

#ifndef CATDIV_ESTIMATORS_HPP_
#define CATDIV_ESTIMATORS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "catdiv/counts.hpp"

namespace catdiv {

// Concentration parameters are searched and integrated over
// [kMinConcentration, kMaxConcentration] in log coordinates.
inline constexpr double kMinConcentration = 1e-6;
inline constexpr double kMaxConcentration = 1e6;

struct Diagnostics {
  double alpha_star = 0.0;
  double beta_star = 0.0;
  std::int64_t grid_bins_alpha = 0;
  std::int64_t grid_bins_beta = 0;
  // ln P(n | alpha*) + ln P(m | beta*), up to the alpha-independent constant.
  double log_evidence_at_max = 0.0;
  // The maximized objective (evidence, hyper-prior and log-grid Jacobian).
  double log_posterior_at_max = 0.0;
  // Set when the maximum sits on the box edge or the objective is flat.
  bool alpha_at_boundary = false;
  bool beta_at_boundary = false;
  // Set when the quadrature weights degenerated and the value is the fixed
  // (alpha*, beta*) expectation.
  bool collapsed = false;
  // Integration measure used by the mixture estimators.
  std::string measure;
};

struct EstimateReport {
  double value = 0.0;
  std::optional<double> posterior_std;
  Diagnostics diagnostics;
};

// What the concentration parameters are weighted by.
enum class Weighting {
  kEvidence,            // DP: likelihoods only
  kKlHyperPrior,        // DPM for D_KL
  kHellingerHyperPrior  // DPM for D_H^2
};

struct LogPosteriorMaximum {
  double log_alpha = 0.0;
  double log_beta = 0.0;
  // Gaussian-approximation standard deviations in (ln alpha, ln beta).
  double std_log_alpha = 1.0;
  double std_log_beta = 1.0;
  bool alpha_at_boundary = false;
  bool beta_at_boundary = false;
  bool converged = false;
  double value = 0.0;
};

// Maximizes the log posterior of (ln alpha, ln beta) over the box. The DP
// objective separates and each coordinate is maximized on its own.
LogPosteriorMaximum maximize_log_posterior(const MultiplicityTable& table, Weighting weighting);

struct QuadratureGrid {
  std::vector<double> log_alpha;
  std::vector<double> log_beta;
};

// max(20, min(2000, 10 (K / N)^2)) nodes per axis; 2000 when N = 0.
std::int64_t heuristic_bins(std::int64_t categories, std::int64_t sample_size);

// Nodes spanning 3 standard deviations around the maximum, clipped to the box.
QuadratureGrid make_quadrature_grid(const LogPosteriorMaximum& max, std::int64_t bins_alpha,
                                    std::int64_t bins_beta);

struct MixtureOptions {
  // Multiplies the heuristic bin count on each axis.
  double bin_scale = 1.0;
  // Added to every log weight before normalization; the estimate must not
  // depend on it.
  double log_weight_offset = 0.0;
};

EstimateReport estimate_dkl_dpm(const MultiplicityTable& table, const MixtureOptions& options = {});
EstimateReport estimate_dkl_dp(const MultiplicityTable& table);
EstimateReport estimate_hellinger_dpm(const MultiplicityTable& table,
                                      const MixtureOptions& options = {});
EstimateReport estimate_hellinger_dp(const MultiplicityTable& table);

// Mixture-of-Dirichlet entropy estimate of a single sample, with weight
// P(counts | alpha) dA/dalpha over ln alpha.
EstimateReport estimate_entropy_nsb(const MultiplicityTable& table, Sample sample = Sample::kFirst,
                                    const MixtureOptions& options = {});

enum class PseudoCount { kNaive, kJeffreys, kTrybula, kPerks };

struct PseudoCounts {
  double a = 0.0;
  double b = 0.0;
};

PseudoCounts pseudo_counts(const MultiplicityTable& table, PseudoCount scheme);

// Additive-smoothing plug-in. With b = 0, categories with m_i = 0 are dropped.
double estimate_dkl_plugin(const MultiplicityTable& table, PseudoCount scheme);
double estimate_hellinger_plugin(const MultiplicityTable& table, PseudoCount scheme);

// Bias-corrected Z estimator in closed digamma form. Can be negative.
double estimate_dkl_zhang(const MultiplicityTable& table);

}  // namespace catdiv

#endif  // CATDIV_ESTIMATORS_HPP_
