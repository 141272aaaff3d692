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

#include <algorithm>
#include <cmath>
#include <string>

#include "catdiv/error.hpp"
#include "catdiv/estimators.hpp"
#include "catdiv/specfun.hpp"

namespace catdiv {
namespace {

double perks(const MultiplicityTable& table, Sample s) {
  const std::int64_t seen = table.observed(s);
  if (seen == 0) throw DomainError("perks pseudo-count: sample has no observed categories");
  return 1.0 / static_cast<double>(seen);
}

struct Smoothed {
  double a;
  double b;
  double norm_n;
  double norm_m;
};

Smoothed smoothing(const MultiplicityTable& table, PseudoCount scheme, const char* fn) {
  const PseudoCounts pc = pseudo_counts(table, scheme);
  const auto k = static_cast<double>(table.categories());
  const double nn = static_cast<double>(table.total1()) + k * pc.a;
  const double nm = static_cast<double>(table.total2()) + k * pc.b;
  if (!(nn > 0.0) || !(nm > 0.0)) {
    throw DomainError(std::string(fn) + ": empty sample with zero pseudo-count");
  }
  return {pc.a, pc.b, nn, nm};
}

}  // namespace

PseudoCounts pseudo_counts(const MultiplicityTable& table, PseudoCount scheme) {
  const auto k = static_cast<double>(table.categories());
  switch (scheme) {
    case PseudoCount::kNaive:
      return {0.0, 0.0};
    case PseudoCount::kJeffreys:
      return {0.5, 0.5};
    case PseudoCount::kTrybula:
      return {std::sqrt(static_cast<double>(table.total1())) / k,
              std::sqrt(static_cast<double>(table.total2())) / k};
    case PseudoCount::kPerks:
      return {perks(table, Sample::kFirst), perks(table, Sample::kSecond)};
  }
  throw DomainError("pseudo_counts: unknown scheme");
}

double estimate_dkl_plugin(const MultiplicityTable& table, PseudoCount scheme) {
  const Smoothed s = smoothing(table, scheme, "estimate_dkl_plugin");
  return sum_over_categories(table, [&](const CountPair& c) {
    const double q = (static_cast<double>(c.n) + s.a) / s.norm_n;
    const double t = (static_cast<double>(c.m) + s.b) / s.norm_m;
    if (q == 0.0 || t == 0.0) return 0.0;
    return q * std::log(q / t);
  });
}

double estimate_hellinger_plugin(const MultiplicityTable& table, PseudoCount scheme) {
  const Smoothed s = smoothing(table, scheme, "estimate_hellinger_plugin");
  const double overlap = sum_over_categories(table, [&](const CountPair& c) {
    const double q = (static_cast<double>(c.n) + s.a) / s.norm_n;
    const double t = (static_cast<double>(c.m) + s.b) / s.norm_m;
    return std::sqrt(q * t);
  });
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

double estimate_dkl_zhang(const MultiplicityTable& table) {
  const std::int64_t n_total = table.total1();
  if (n_total < 1) throw DomainError("estimate_dkl_zhang: first sample is empty");
  const auto nt = static_cast<double>(n_total);
  const auto mt = static_cast<double>(table.total2());
  return sum_over_categories(table, [&](const CountPair& c) {
    if (c.n == 0) return 0.0;
    const auto n = static_cast<double>(c.n);
    const auto m = static_cast<double>(c.m);
    return (n / nt) * (specfun::delta_psi(mt + 1.0, m + 1.0) - specfun::delta_psi(nt, n));
  });
}

}  // namespace catdiv
