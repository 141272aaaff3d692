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

#ifndef CATDIV_DETAIL_WOLPERT_WOLF_HPP_
#define CATDIV_DETAIL_WOLPERT_WOLF_HPP_

#include <numeric>
#include <span>

#include "catdiv/specfun.hpp"

// Ratios of derivatives and shifts of the multivariate Beta function B(x)
// to B(x) itself. With x = n + alpha they are posterior moments under
// Dir(x):  <q_i> = Omega_i, <ln q_i> = Lambda_i, <q_i q_j> = Omega_ij, and
// the composed forms give <q_i q_j ln q_k ln q_h> and friends.
//
// Indices are zero-based; total is X = sum(x), passed in to avoid O(K) work
// per call.

namespace catdiv::detail::ww {

inline double total(std::span<const double> x) {
  return std::accumulate(x.begin(), x.end(), 0.0);
}

inline double kd(std::size_t a, std::size_t b) { return a == b ? 1.0 : 0.0; }

// d_i B / B
inline double lambda(std::span<const double> x, double X, std::size_t i) {
  return specfun::delta_psi(x[i], X);
}

// d_i d_j B / B
inline double lambda2(std::span<const double> x, double X, std::size_t i, std::size_t j) {
  return lambda(x, X, i) * lambda(x, X, j) + kd(i, j) * specfun::trigamma(x[i]) -
         specfun::trigamma(X);
}

// e^{d_i} B / B
inline double omega(std::span<const double> x, double X, std::size_t i) { return x[i] / X; }

// e^{d_i} e^{d_j} B / B
inline double omega2(std::span<const double> x, double X, std::size_t i, std::size_t j) {
  return x[i] * (x[j] + kd(i, j)) / (X * (X + 1.0));
}

// d_j log Omega_i
inline double dlog_omega(std::span<const double> x, double X, std::size_t i, std::size_t j) {
  return kd(i, j) / x[j] - 1.0 / X;
}

// d_k log Omega_ij
inline double dlog_omega2(std::span<const double> x, double X, std::size_t i, std::size_t j,
                          std::size_t k) {
  const double same = kd(i, j);
  const double xk = x[k];
  return same * kd(i, k) * (1.0 / xk + 1.0 / (xk + 1.0)) +
         (kd(i, k) + kd(j, k)) * (1.0 - same) / xk - 1.0 / X - 1.0 / (X + 1.0);
}

// d_j d_k Omega_i / Omega_i
inline double d2_omega_ratio(std::span<const double> x, double X, std::size_t i,
                             std::size_t j, std::size_t k) {
  return 2.0 / (X * X) - (kd(i, j) + kd(i, k)) / (x[i] * X);
}

// d_k d_h Omega_ij / Omega_ij
inline double d2_omega2_ratio(std::span<const double> x, double X, std::size_t i,
                              std::size_t j, std::size_t k, std::size_t h) {
  const double same = kd(i, j);
  const double xh = x[h];
  const double all4 = same * kd(i, k) * kd(i, h);
  const double three = (kd(i, k) * kd(k, h) + kd(j, k) * kd(k, h)) * (1.0 - same);
  return 1.0 / (X * X) + 1.0 / ((X + 1.0) * (X + 1.0)) -
         all4 * (1.0 / (xh * xh) + 1.0 / ((xh + 1.0) * (xh + 1.0))) - three / (xh * xh) +
         dlog_omega2(x, X, i, j, k) * dlog_omega2(x, X, i, j, h);
}

// e^{d_i} d_j B / B  ->  <q_i ln q_j>
inline double shift1_deriv1(std::span<const double> x, double X, std::size_t i,
                            std::size_t j) {
  const double om = omega(x, X, i);
  return om * lambda(x, X, j) + om * dlog_omega(x, X, i, j);
}

// e^{d_i} e^{d_j} d_k B / B  ->  <q_i q_j ln q_k>
inline double shift2_deriv1(std::span<const double> x, double X, std::size_t i,
                            std::size_t j, std::size_t k) {
  const double om = omega2(x, X, i, j);
  return om * lambda(x, X, k) + om * dlog_omega2(x, X, i, j, k);
}

// e^{d_i} d_j d_k B / B  ->  <q_i ln q_j ln q_k>
inline double shift1_deriv2(std::span<const double> x, double X, std::size_t i,
                            std::size_t j, std::size_t k) {
  const double om = omega(x, X, i);
  return om * lambda2(x, X, j, k) + om * dlog_omega(x, X, i, j) * lambda(x, X, k) +
         om * dlog_omega(x, X, i, k) * lambda(x, X, j) + om * d2_omega_ratio(x, X, i, j, k);
}

// e^{d_i} e^{d_j} d_k d_h B / B  ->  <q_i q_j ln q_k ln q_h>
inline double shift2_deriv2(std::span<const double> x, double X, std::size_t i,
                            std::size_t j, std::size_t k, std::size_t h) {
  const double om = omega2(x, X, i, j);
  return om * lambda2(x, X, k, h) + om * dlog_omega2(x, X, i, j, k) * lambda(x, X, h) +
         om * dlog_omega2(x, X, i, j, h) * lambda(x, X, k) +
         om * d2_omega2_ratio(x, X, i, j, k, h);
}

}  // namespace catdiv::detail::ww

#endif  // CATDIV_DETAIL_WOLPERT_WOLF_HPP_
