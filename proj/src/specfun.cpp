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

#include "catdiv/specfun.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include <boost/math/special_functions/gamma.hpp>

#include "catdiv/error.hpp"

namespace catdiv::specfun {
namespace {

// Below this the recurrence psi(x) = psi(x + 1) - 1/x moves the argument up.
constexpr double kAsymptoticThreshold = 8.0;

void require_positive(double x, const char* fn) {
  if (!std::isfinite(x) || !(x > 0.0)) {
    throw DomainError(std::string(fn) + ": argument must be finite and > 0, got " +
                      std::to_string(x));
  }
}

// Coefficients c_k of x^{-2k} in psi(x) ~ ln x - 1/(2x) - sum_k c_k x^{-2k},
// c_k = B_{2k} / (2k).
constexpr std::array<double, 8> kDigammaSeries = {
    1.0 / 12.0,          -1.0 / 120.0,   1.0 / 252.0,  -1.0 / 240.0,
    1.0 / 132.0,         -691.0 / 32760.0, 1.0 / 12.0, -3617.0 / 8160.0,
};

// Coefficients B_{2k} of x^{-(2k+1)} in psi_1(x) ~ 1/x + 1/(2x^2) + sum_k ...
constexpr std::array<double, 8> kTrigammaSeries = {
    1.0 / 6.0,  -1.0 / 30.0,       1.0 / 42.0, -1.0 / 30.0,
    5.0 / 66.0, -691.0 / 2730.0,   7.0 / 6.0,  -3617.0 / 510.0,
};

double digamma_asymptotic(double x) {
  const double inv2 = 1.0 / (x * x);
  double series = 0.0;
  for (auto it = kDigammaSeries.rbegin(); it != kDigammaSeries.rend(); ++it) {
    series = (series + *it) * inv2;
  }
  return std::log(x) - 0.5 / x - series;
}

double trigamma_asymptotic(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (auto it = kTrigammaSeries.rbegin(); it != kTrigammaSeries.rend(); ++it) {
    series = (series + *it) * inv2;
  }
  return inv + 0.5 * inv2 + series * inv;
}

// sum_k c_k (a^{-2k} - b^{-2k}), both arguments in the asymptotic region.
double digamma_series_difference(double a, double b) {
  const double ia = 1.0 / (a * a);
  const double ib = 1.0 / (b * b);
  double pa = 1.0;
  double pb = 1.0;
  double out = 0.0;
  for (double c : kDigammaSeries) {
    pa *= ia;
    pb *= ib;
    out += c * (pa - pb);
  }
  return out;
}

// Stirling tail sum_k B_{2k} / (2k (2k-1) x^{2k-1}).
constexpr std::array<double, 8> kStirlingSeries = {
    1.0 / 12.0,    -1.0 / 360.0,         1.0 / 1260.0, -1.0 / 1680.0,
    1.0 / 1188.0,  -691.0 / 360360.0,    1.0 / 156.0,  -3617.0 / 122400.0,
};

constexpr double kStirlingThreshold = 10.0;

double stirling_tail(double x) {
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  double series = 0.0;
  for (auto it = kStirlingSeries.rbegin(); it != kStirlingSeries.rend(); ++it) {
    series = series * inv2 + *it;
  }
  return series * inv;
}

}  // namespace

double log_gamma(double x) {
  require_positive(x, "log_gamma");
  return boost::math::lgamma(x);
}

double digamma(double x) {
  require_positive(x, "digamma");
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift -= 1.0 / x;
    x += 1.0;
  }
  return digamma_asymptotic(x) + shift;
}

double trigamma(double x) {
  require_positive(x, "trigamma");
  double shift = 0.0;
  while (x < kAsymptoticThreshold) {
    shift += 1.0 / (x * x);
    x += 1.0;
  }
  return trigamma_asymptotic(x) + shift;
}

double delta_psi(double z1, double z2) {
  require_positive(z1, "delta_psi");
  require_positive(z2, "delta_psi");
  if (z1 == z2) return 0.0;

  const double gap = z1 - z2;
  if (std::abs(gap) <= static_cast<double>(kTelescopeLimit) &&
      gap == std::nearbyint(gap)) {
    const double lo = gap > 0.0 ? z2 : z1;
    const auto steps = static_cast<std::int64_t>(std::abs(gap));
    double sum = 0.0;
    for (std::int64_t k = steps - 1; k >= 0; --k) {
      sum += 1.0 / (lo + static_cast<double>(k));
    }
    return gap > 0.0 ? sum : -sum;
  }

  // psi(a) - psi(b) = psi(a+1) - psi(b+1) + (a - b)/(a b)
  double a = z1;
  double b = z2;
  double shift = 0.0;
  while (a < kAsymptoticThreshold || b < kAsymptoticThreshold) {
    shift += (a - b) / (a * b);
    a += 1.0;
    b += 1.0;
  }
  const double d = a - b;
  return std::log1p(d / b) + d / (2.0 * a * b) - digamma_series_difference(a, b) +
         shift;
}

double log_gamma_ratio(double x, double d) {
  require_positive(x, "log_gamma_ratio");
  require_positive(x + d, "log_gamma_ratio");
  if (d == 0.0) return 0.0;
  // lnG(x+d) - lnG(x) = lnG(x+1+d) - lnG(x+1) - log1p(d/x)
  double shift = 0.0;
  while (x < kStirlingThreshold || x + d < kStirlingThreshold) {
    shift -= std::log1p(d / x);
    x += 1.0;
  }
  const double y = x + d;
  return (x - 0.5) * std::log1p(d / x) + d * std::log(y) - d + stirling_tail(y) -
         stirling_tail(x) + shift;
}

double log_beta2(double z1, double z2) {
  require_positive(z1, "log_beta2");
  require_positive(z2, "log_beta2");
  const double small = std::min(z1, z2);
  const double large = std::max(z1, z2);
  return log_gamma(small) - log_gamma_ratio(large, small);
}

double log_multivariate_beta(std::span<const double> x) {
  if (x.empty()) throw DomainError("log_multivariate_beta: empty vector");
  double sum_log = 0.0;
  double total = 0.0;
  for (double v : x) {
    sum_log += log_gamma(v);
    total += v;
  }
  return sum_log - log_gamma(total);
}

double log_multivariate_beta(
    std::span<const std::pair<double, std::int64_t>> compressed) {
  if (compressed.empty()) throw DomainError("log_multivariate_beta: empty vector");
  double sum_log = 0.0;
  double total = 0.0;
  for (const auto& [value, mult] : compressed) {
    if (mult < 1) throw DomainError("log_multivariate_beta: multiplicity must be >= 1");
    const auto m = static_cast<double>(mult);
    sum_log += m * log_gamma(value);
    total += m * value;
  }
  return sum_log - log_gamma(total);
}

}  // namespace catdiv::specfun
