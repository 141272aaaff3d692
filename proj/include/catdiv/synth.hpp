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

#ifndef CATDIV_SYNTH_HPP_
#define CATDIV_SYNTH_HPP_

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace catdiv::synth {

using Rng = std::mt19937_64;

// Counter-based seed derivation: distinct (stream, index) pairs give
// independent-looking seeds for one master seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index);

struct ProbabilityVector {
  std::vector<double> p;

  std::int64_t size() const { return static_cast<std::int64_t>(p.size()); }
  // Throws DomainError on negative or non-finite entries, or |sum - 1| > 1e-12.
  void validate() const;
};

ProbabilityVector sample_dirichlet(std::int64_t categories, double alpha, Rng& rng);
ProbabilityVector sample_dirichlet(std::int64_t categories, double alpha, std::uint64_t seed);

std::vector<std::int64_t> sample_multinomial(const ProbabilityVector& p, std::int64_t n, Rng& rng);
std::vector<std::int64_t> sample_multinomial(const ProbabilityVector& p, std::int64_t n,
                                             std::uint64_t seed);

double exact_entropy(const ProbabilityVector& q);
// Throws DomainError when t_i = 0 where q_i > 0.
double exact_crossentropy(const ProbabilityVector& q, const ProbabilityVector& t);
double exact_dkl(const ProbabilityVector& q, const ProbabilityVector& t);
double exact_hellinger_sq(const ProbabilityVector& q, const ProbabilityVector& t);

struct MarkovChainSpec {
  int states = 0;
  int gram_length = 1;
  // transition[nu * states + mu] = P(mu -> nu); columns sum to one.
  std::vector<double> transition;
  std::vector<double> stationary;

  double w(int nu, int mu) const {
    return transition[static_cast<std::size_t>(nu) * static_cast<std::size_t>(states) +
                      static_cast<std::size_t>(mu)];
  }
  // S^L; throws DomainError if it does not fit in int64.
  std::int64_t categories() const;
  void validate() const;
};

// uniform_transitions forces every entry to 1/S.
MarkovChainSpec build_markov_spec(int states, int gram_length, std::uint64_t seed,
                                  bool uniform_transitions = false);

double markov_entropy(const MarkovChainSpec& spec);
double markov_crossentropy(const MarkovChainSpec& q, const MarkovChainSpec& t);

// Index of (x_1, ..., x_L) is sum_k x_k S^(k-1).
std::int64_t lgram_index(std::span<const int> states, int state_count);

ProbabilityVector lgram_distribution(const MarkovChainSpec& spec);

std::vector<std::int64_t> sample_lgrams(const MarkovChainSpec& spec, std::int64_t n, Rng& rng);
std::vector<std::int64_t> sample_lgrams(const MarkovChainSpec& spec, std::int64_t n,
                                        std::uint64_t seed);

// Draws sequentially without replacement from a parent histogram and returns
// the histogram of the first N draws for every N in the increasing ladder.
std::vector<std::vector<std::int64_t>> nested_subsamples(std::span<const std::int64_t> parent,
                                                         std::span<const std::int64_t> ladder,
                                                         Rng& rng);

}  // namespace catdiv::synth

#endif  // CATDIV_SYNTH_HPP_
