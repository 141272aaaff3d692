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

#ifndef CATDIV_TESTS_ZHANG_SERIES_HPP_
#define CATDIV_TESTS_ZHANG_SERIES_HPP_

#include <cstdint>
#include <vector>

namespace oracle {

// The divergence estimator of Zhang and Grabchak in its original
// nested-sum form, evaluated term by term in long double.
inline double zhang_series(const std::vector<std::int64_t>& n, const std::vector<std::int64_t>& m) {
  long double N = 0;
  long double M = 0;
  for (auto v : n) N += static_cast<long double>(v);
  for (auto v : m) M += static_cast<long double>(v);
  long double total = 0;
  for (std::size_t i = 0; i < n.size(); ++i) {
    if (n[i] == 0) continue;
    const auto ni = static_cast<long double>(n[i]);
    const auto mi = static_cast<long double>(m[i]);
    long double cross = 0;
    long double prod = 1;
    for (std::int64_t v = 1; v <= static_cast<std::int64_t>(M - mi); ++v) {
      prod *= 1 - mi / (M - static_cast<long double>(v) + 1);
      cross += prod / static_cast<long double>(v);
    }
    long double self = 0;
    prod = 1;
    for (std::int64_t v = 1; v <= static_cast<std::int64_t>(N - ni); ++v) {
      prod *= 1 - (ni - 1) / (N - static_cast<long double>(v));
      self += prod / static_cast<long double>(v);
    }
    total += ni / N * (cross - self);
  }
  return static_cast<double>(total);
}

}  // namespace oracle

#endif  // CATDIV_TESTS_ZHANG_SERIES_HPP_
