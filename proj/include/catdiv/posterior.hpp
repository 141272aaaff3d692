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

#ifndef CATDIV_POSTERIOR_HPP_
#define CATDIV_POSTERIOR_HPP_

#include <cstdint>

#include "catdiv/counts.hpp"

// Expectations under fixed symmetric Dirichlet priors: q ~ Dir(alpha), t ~
// Dir(beta), updated by the counts n and m. All values are in nats.

namespace catdiv {

struct HyperParams {
  double alpha = 1.0;
  double beta = 1.0;
  std::int64_t categories = 2;

  // Throws DomainError unless alpha, beta are finite and > 0 and K >= 2.
  void validate() const;
};

// ln P(counts | alpha) without the alpha-independent multinomial constant:
//   sum_i [lnG(c_i + alpha) - lnG(alpha)] - lnG(C + K alpha) + lnG(K alpha).
double log_evidence(const MultiplicityTable& table, double alpha, Sample sample);

// d/d(ln alpha) of log_evidence.
double log_evidence_slope(const MultiplicityTable& table, double alpha, Sample sample);

// A(alpha) = <S | alpha> = psi(K alpha + 1) - psi(alpha + 1).
double prior_mean_entropy(double alpha, std::int64_t categories);

// B(beta) = <H | beta> = psi(K beta) - psi(beta).
double prior_mean_crossentropy(double beta, std::int64_t categories);

// <S(q) | counts; alpha> for the chosen sample.
double posterior_entropy(const MultiplicityTable& table, double alpha, Sample sample);

// <H(q || t) | n, m; alpha, beta>.
double posterior_crossentropy(const MultiplicityTable& table, const HyperParams& hp);

// <D_KL(q || t) | n, m; alpha, beta>.
double posterior_dkl(const MultiplicityTable& table, const HyperParams& hp);

// <D_KL^2 | n, m; alpha, beta>, summed pair by pair over the multiplicity
// table (O(U^2) in the number U of distinct count pairs).
double posterior_dkl_squared(const MultiplicityTable& table, const HyperParams& hp);

// <D_H^2 | n, m; alpha, beta> = 1 - <sum_i sqrt(q_i t_i)>.
double posterior_hellinger_sq(const MultiplicityTable& table, const HyperParams& hp);

}  // namespace catdiv

#endif  // CATDIV_POSTERIOR_HPP_
