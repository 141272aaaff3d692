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

#include "catdiv/hyperprior.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "catdiv/error.hpp"
#include "catdiv/posterior.hpp"
#include "catdiv/specfun.hpp"

namespace catdiv {
namespace {

void require_args(double a, double b, std::int64_t k, const char* fn) {
  if (!std::isfinite(a) || !(a > 0.0) || !std::isfinite(b) || !(b > 0.0)) {
    throw DomainError(std::string(fn) + ": concentrations must be finite and > 0");
  }
  if (k < 2) throw DomainError(std::string(fn) + ": K must be >= 2");
}

// ln g(x) = ln sqrt(K) + ln B(1/2, K x) - ln B(1/2, x)
double log_g(double x, double k) {
  return 0.5 * std::log(k) + specfun::log_beta2(0.5, k * x) - specfun::log_beta2(0.5, x);
}

// d ln g / dx, using d ln B(1/2, z)/dz = psi(z) - psi(z + 1/2).
double log_g_slope(double x, double k) {
  return specfun::delta_psi(x + 0.5, x) - k * specfun::delta_psi(k * x + 0.5, k * x);
}

}  // namespace

double prior_mean_entropy_slope(double alpha, std::int64_t categories) {
  require_args(alpha, alpha, categories, "prior_mean_entropy_slope");
  const auto k = static_cast<double>(categories);
  return k * specfun::trigamma(k * alpha + 1.0) - specfun::trigamma(alpha + 1.0);
}

double prior_mean_crossentropy_slope(double beta, std::int64_t categories) {
  require_args(beta, beta, categories, "prior_mean_crossentropy_slope");
  const auto k = static_cast<double>(categories);
  return k * specfun::trigamma(k * beta) - specfun::trigamma(beta);
}

double log_phi_kl(double z, std::int64_t categories) {
  if (!(z > 0.0) || !std::isfinite(z)) throw DomainError("log_phi_kl: z must be > 0");
  const double log_k = std::log(static_cast<double>(categories));
  // phi(z) = rho(z) / min(z, ln K) with rho(z) = 1/z
  return z < log_k ? -2.0 * std::log(z) : -std::log(z) - std::log(log_k);
}

double log_weight_kl(double alpha, double beta, std::int64_t categories) {
  require_args(alpha, beta, categories, "log_weight_kl");
  const double z = prior_mean_crossentropy(beta, categories) -
                   prior_mean_entropy(alpha, categories);
  assert(z > 0.0);
  return std::log(std::abs(prior_mean_entropy_slope(alpha, categories))) +
         std::log(std::abs(prior_mean_crossentropy_slope(beta, categories))) +
         log_phi_kl(z, categories);
}

double hellinger_g(double x, std::int64_t categories) {
  require_args(x, x, categories, "hellinger_g");
  return std::exp(log_g(x, static_cast<double>(categories)));
}

double hellinger_g_slope(double x, std::int64_t categories) {
  require_args(x, x, categories, "hellinger_g_slope");
  const auto k = static_cast<double>(categories);
  return std::exp(log_g(x, k)) * log_g_slope(x, k);
}

double hellinger_log_g(double x, std::int64_t categories) {
  require_args(x, x, categories, "hellinger_log_g");
  return log_g(x, static_cast<double>(categories));
}

double hellinger_log_g_slope(double x, std::int64_t categories) {
  require_args(x, x, categories, "hellinger_log_g_slope");
  return log_g_slope(x, static_cast<double>(categories));
}

double prior_mean_hellinger_sq(double alpha, double beta, std::int64_t categories) {
  require_args(alpha, beta, categories, "prior_mean_hellinger_sq");
  const auto k = static_cast<double>(categories);
  return -std::expm1(log_g(alpha, k) + log_g(beta, k));
}

double log_phi_hellinger(double z) {
  if (!(z > 0.0 && z < 1.0)) throw DomainError("log_phi_hellinger: z must lie in (0, 1)");
  // rho_H(z) (1-z)^2 / (z (2-z)) with rho_H(z) = 1/z
  return 2.0 * std::log1p(-z) - 2.0 * std::log(z) - std::log(2.0 - z);
}

double log_weight_hellinger(double alpha, double beta, std::int64_t categories) {
  require_args(alpha, beta, categories, "log_weight_hellinger");
  const auto k = static_cast<double>(categories);
  const double lga = log_g(alpha, k);
  const double lgb = log_g(beta, k);
  const double z = -std::expm1(lga + lgb);
  assert(z > 0.0 && z < 1.0);
  return lga + std::log(std::abs(log_g_slope(alpha, k))) + lgb +
         std::log(std::abs(log_g_slope(beta, k))) + log_phi_hellinger(z);
}

double log_weight(const HyperPriorSpec& spec, double alpha, double beta) {
  switch (spec.kind) {
    case HyperPriorKind::kKl:
      return log_weight_kl(alpha, beta, spec.categories);
    case HyperPriorKind::kHellingerSq:
      return log_weight_hellinger(alpha, beta, spec.categories);
  }
  throw DomainError("log_weight: unknown hyper-prior kind");
}

}  // namespace catdiv
