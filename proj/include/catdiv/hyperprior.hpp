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

#ifndef CATDIV_HYPERPRIOR_HPP_
#define CATDIV_HYPERPRIOR_HPP_

#include <cstdint>

// Mixture weights rho(alpha, beta) over the concentration parameters, chosen
// so the a-priori expected divergence z is log-uniform (rho(z) ~ 1/z). All
// weights are densities in (alpha, beta), returned as logarithms and defined
// up to a global additive constant.

namespace catdiv {

enum class HyperPriorKind { kKl, kHellingerSq };

struct HyperPriorSpec {
  HyperPriorKind kind = HyperPriorKind::kKl;
  std::int64_t categories = 2;
};

// dA/dalpha = K psi_1(K alpha + 1) - psi_1(alpha + 1) > 0.
double prior_mean_entropy_slope(double alpha, std::int64_t categories);

// dB/dbeta = K psi_1(K beta) - psi_1(beta) < 0.
double prior_mean_crossentropy_slope(double beta, std::int64_t categories);

// ln phi(z) for the KL construction: -2 ln z below ln K, -ln z - ln ln K above.
double log_phi_kl(double z, std::int64_t categories);

double log_weight_kl(double alpha, double beta, std::int64_t categories);

// g(x) = sqrt(K) B(1/2, K x) / B(1/2, x), so that <D_H^2 | alpha, beta> =
// 1 - g(alpha) g(beta).
double hellinger_g(double x, std::int64_t categories);
double hellinger_g_slope(double x, std::int64_t categories);
double hellinger_log_g(double x, std::int64_t categories);
// d ln g / dx > 0.
double hellinger_log_g_slope(double x, std::int64_t categories);

// A-priori <D_H^2 | alpha, beta>.
double prior_mean_hellinger_sq(double alpha, double beta, std::int64_t categories);

// ln phi_H(z) = ln[(1 - z)^2 / (z^2 (2 - z))].
double log_phi_hellinger(double z);

double log_weight_hellinger(double alpha, double beta, std::int64_t categories);

double log_weight(const HyperPriorSpec& spec, double alpha, double beta);

}  // namespace catdiv

#endif  // CATDIV_HYPERPRIOR_HPP_
