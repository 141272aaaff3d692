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

#ifndef CATDIV_DETAIL_GRID_KERNELS_HPP_
#define CATDIV_DETAIL_GRID_KERNELS_HPP_

#include <vector>

#include "catdiv/counts.hpp"

// Posterior moments split into an alpha-only part (a row) and a beta-only
// part (a column), so that a quadrature grid of R x C hyper-parameter nodes
// costs O((R + C) U) special-function calls and O(R C U) arithmetic, U being
// the number of distinct count pairs. The pair-by-pair routines in
// posterior.hpp are the reference these kernels are tested against.

namespace catdiv::detail {

struct KlRow {
  double total = 0.0;              // X = N + K alpha
  double trigamma_total2 = 0.0;    // psi_1(X + 2)
  double entropy = 0.0;            // <S | n; alpha>
  std::vector<double> x;           // n_u + alpha
  std::vector<double> shift1;      // psi(x_u + 1) - psi(X + 2)
  std::vector<double> shift2;      // psi(x_u + 2) - psi(X + 2)
  std::vector<double> trigamma2;   // psi_1(x_u + 2)
};

struct KlColumn {
  double total = 0.0;              // Y = M + K beta
  double trigamma_total = 0.0;     // psi_1(Y)
  std::vector<double> log_t;       // <ln t_u> = psi(y_u) - psi(Y)
  std::vector<double> trigamma;    // psi_1(y_u)
};

struct KlMoments {
  double mean = 0.0;    // <D_KL>
  double second = 0.0;  // <D_KL^2>
};

KlRow make_kl_row(const MultiplicityTable& table, double alpha);
KlColumn make_kl_column(const MultiplicityTable& table, double beta);

// Only the mean is computed when with_second is false.
KlMoments kl_moments(const MultiplicityTable& table, const KlRow& row, const KlColumn& col,
                     bool with_second);

// exp[ln B(1/2, X) - ln B(1/2, x_u)] for each entry, X, x_u taken from one
// sample. The Bhattacharyya coefficient is sum_u nu_u row_u col_u.
std::vector<double> make_hellinger_factors(const MultiplicityTable& table, double conc,
                                           Sample sample);

double hellinger_from_factors(const MultiplicityTable& table, const std::vector<double>& row,
                              const std::vector<double>& col);

}  // namespace catdiv::detail

#endif  // CATDIV_DETAIL_GRID_KERNELS_HPP_
