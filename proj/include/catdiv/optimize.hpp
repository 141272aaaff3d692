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

#ifndef CATDIV_OPTIMIZE_HPP_
#define CATDIV_OPTIMIZE_HPP_

#include <functional>
#include <span>
#include <vector>

namespace catdiv::optimize {

// Returns f(x) and writes the gradient of f at x into grad.
using Objective = std::function<double(std::span<const double> x, std::span<double> grad)>;

struct BoxOptions {
  double lower = 0.0;
  double upper = 1.0;
  // Converged when every free coordinate of the projected gradient is below
  // gradient_tolerance * max(1, |f|).
  double gradient_tolerance = 1e-8;
  int max_iterations = 500;
  // Longest step (infinity norm) tried by the line search.
  double max_step = 4.0;
};

struct BoxMaximum {
  std::vector<double> point;
  double value = 0.0;
  std::vector<bool> at_lower;
  std::vector<bool> at_upper;
  bool converged = false;
  int iterations = 0;
};

// Maximizes f over the box [lower, upper]^d with projected BFGS from each
// start point and keeps the best result (earliest start on ties). An interior
// best point is then refined by Newton steps on the gradient, accepted only
// while they shrink it.
BoxMaximum maximize_in_box(const Objective& f, std::span<const std::vector<double>> starts,
                           const BoxOptions& options);

// Central-difference gradient of a value-only function.
std::vector<double> central_gradient(const std::function<double(std::span<const double>)>& f,
                                     std::span<const double> x, double step);

// Central second differences; row-major d x d.
std::vector<double> central_hessian(const std::function<double(std::span<const double>)>& f,
                                    std::span<const double> x, double step);

}  // namespace catdiv::optimize

#endif  // CATDIV_OPTIMIZE_HPP_
