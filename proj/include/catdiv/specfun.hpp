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

#ifndef CATDIV_SPECFUN_HPP_
#define CATDIV_SPECFUN_HPP_

#include <cstdint>
#include <span>
#include <utility>

// Gamma-family special functions on the positive real axis. Every function
// throws catdiv::DomainError for arguments that are not finite and strictly
// positive. All functions are pure and reentrant.

namespace catdiv::specfun {

double log_gamma(double x);

double digamma(double x);

double trigamma(double x);

// psi(z1) - psi(z2). Integer gaps up to kTelescopeLimit are summed exactly as
// 1/z2 + 1/(z2+1) + ...; other gaps shift both arguments into the asymptotic
// region together so the difference never cancels catastrophically.
double delta_psi(double z1, double z2);

inline constexpr std::int64_t kTelescopeLimit = 10000;

// lnG(x + d) - lnG(x) for x > 0 and x + d > 0, evaluated as a difference of
// Stirling series so it stays accurate when x is large and d is small.
double log_gamma_ratio(double x, double d);

// ln B(z1, z2) = lnG(z1) + lnG(z2) - lnG(z1 + z2).
double log_beta2(double z1, double z2);

// ln B(x) = sum_j lnG(x_j) - lnG(sum_j x_j).
double log_multivariate_beta(std::span<const double> x);

// Compressed form: each entry is (value, multiplicity). Multiplicities must be
// positive and at least one entry is required.
double log_multivariate_beta(
    std::span<const std::pair<double, std::int64_t>> compressed);

}  // namespace catdiv::specfun

#endif  // CATDIV_SPECFUN_HPP_
