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

#include "catdiv/posterior.hpp"

#include <cmath>
#include <string>

#include "catdiv/detail/grid_kernels.hpp"
#include "catdiv/error.hpp"
#include "catdiv/specfun.hpp"

namespace catdiv {

using specfun::delta_psi;
using specfun::trigamma;

namespace {

void require_concentration(double c, const char* fn) {
  if (!std::isfinite(c) || !(c > 0.0)) {
    throw DomainError(std::string(fn) + ": concentration must be finite and > 0");
  }
}

void require_categories(std::int64_t k, const char* fn) {
  if (k < 2) throw DomainError(std::string(fn) + ": K must be >= 2");
}

void require_match(const MultiplicityTable& table, const HyperParams& hp, const char* fn) {
  hp.validate();
  if (table.categories() != hp.categories) {
    throw ShapeError(std::string(fn) + ": table has K = " + std::to_string(table.categories()) +
                     " but hyper-parameters have K = " + std::to_string(hp.categories));
  }
}

double count_of(const CountPair& p, Sample s) {
  return static_cast<double>(s == Sample::kFirst ? p.n : p.m);
}

}  // namespace

void HyperParams::validate() const {
  require_concentration(alpha, "HyperParams");
  require_concentration(beta, "HyperParams");
  require_categories(categories, "HyperParams");
}

double log_evidence(const MultiplicityTable& table, double alpha, Sample sample) {
  require_concentration(alpha, "log_evidence");
  const auto k = static_cast<double>(table.categories());
  double out = 0.0;
  for (const auto& c : table.marginal(sample)) {
    if (c.count == 0) continue;
    out += static_cast<double>(c.multiplicity) *
           specfun::log_gamma_ratio(alpha, static_cast<double>(c.count));
  }
  const auto total = static_cast<double>(table.total(sample));
  return out - specfun::log_gamma_ratio(k * alpha, total);
}

double log_evidence_slope(const MultiplicityTable& table, double alpha, Sample sample) {
  require_concentration(alpha, "log_evidence_slope");
  const auto k = static_cast<double>(table.categories());
  double out = 0.0;
  for (const auto& c : table.marginal(sample)) {
    if (c.count == 0) continue;
    out += static_cast<double>(c.multiplicity) *
           delta_psi(static_cast<double>(c.count) + alpha, alpha);
  }
  const auto total = static_cast<double>(table.total(sample));
  if (total > 0.0) out -= k * delta_psi(total + k * alpha, k * alpha);
  return alpha * out;
}

double prior_mean_entropy(double alpha, std::int64_t categories) {
  require_concentration(alpha, "prior_mean_entropy");
  require_categories(categories, "prior_mean_entropy");
  const auto k = static_cast<double>(categories);
  return delta_psi(k * alpha + 1.0, alpha + 1.0);
}

double prior_mean_crossentropy(double beta, std::int64_t categories) {
  require_concentration(beta, "prior_mean_crossentropy");
  require_categories(categories, "prior_mean_crossentropy");
  const auto k = static_cast<double>(categories);
  return delta_psi(k * beta, beta);
}

double posterior_entropy(const MultiplicityTable& table, double alpha, Sample sample) {
  require_concentration(alpha, "posterior_entropy");
  const auto k = static_cast<double>(table.categories());
  const double X = static_cast<double>(table.total(sample)) + k * alpha;
  double out = 0.0;
  for (const auto& c : table.marginal(sample)) {
    const double x = static_cast<double>(c.count) + alpha;
    out += static_cast<double>(c.multiplicity) * (x / X) * delta_psi(X + 1.0, x + 1.0);
  }
  return out;
}

double posterior_crossentropy(const MultiplicityTable& table, const HyperParams& hp) {
  require_match(table, hp, "posterior_crossentropy");
  const auto k = static_cast<double>(hp.categories);
  const double X = static_cast<double>(table.total1()) + k * hp.alpha;
  const double Y = static_cast<double>(table.total2()) + k * hp.beta;
  return sum_over_categories(table, [&](const CountPair& p) {
    const double x = static_cast<double>(p.n) + hp.alpha;
    const double y = static_cast<double>(p.m) + hp.beta;
    return (x / X) * delta_psi(Y, y);
  });
}

double posterior_dkl(const MultiplicityTable& table, const HyperParams& hp) {
  require_match(table, hp, "posterior_dkl");
  const auto k = static_cast<double>(hp.categories);
  const double X = static_cast<double>(table.total1()) + k * hp.alpha;
  const double Y = static_cast<double>(table.total2()) + k * hp.beta;
  return sum_over_categories(table, [&](const CountPair& p) {
    const double x = static_cast<double>(p.n) + hp.alpha;
    const double y = static_cast<double>(p.m) + hp.beta;
    return (x / X) * (delta_psi(Y, y) - delta_psi(X + 1.0, x + 1.0));
  });
}

double posterior_dkl_squared(const MultiplicityTable& table, const HyperParams& hp) {
  require_match(table, hp, "posterior_dkl_squared");
  const auto k = static_cast<double>(hp.categories);
  const double X = static_cast<double>(table.total1()) + k * hp.alpha;
  const double Y = static_cast<double>(table.total2()) + k * hp.beta;
  const double norm = X * (X + 1.0);
  const double tri_X2 = trigamma(X + 2.0);
  const double tri_Y = trigamma(Y);

  // i == j: q_i^2 (ln q_i - ln t_i)^2
  auto diag = [&](const CountPair& p) {
    const double x = static_cast<double>(p.n) + hp.alpha;
    const double y = static_cast<double>(p.m) + hp.beta;
    const double a = delta_psi(x + 2.0, X + 2.0);
    const double b = delta_psi(y, Y);
    return x * (x + 1.0) / norm *
           (trigamma(x + 2.0) - tri_X2 + a * a - 2.0 * a * b + trigamma(y) - tri_Y + b * b);
  };
  // i != j: q_i q_j (ln q_i - ln t_i)(ln q_j - ln t_j), symmetrized in i <-> j
  auto off = [&](const CountPair& p, const CountPair& r) {
    const double xi = static_cast<double>(p.n) + hp.alpha;
    const double xj = static_cast<double>(r.n) + hp.alpha;
    const double yi = static_cast<double>(p.m) + hp.beta;
    const double yj = static_cast<double>(r.m) + hp.beta;
    const double ai = delta_psi(xi + 1.0, X + 2.0);
    const double aj = delta_psi(xj + 1.0, X + 2.0);
    const double bi = delta_psi(yi, Y);
    const double bj = delta_psi(yj, Y);
    return xi * xj / norm * (-tri_X2 + ai * aj - (ai * bj + aj * bi) - tri_Y + bi * bj);
  };
  return double_sum_over_categories(table, diag, off);
}

double posterior_hellinger_sq(const MultiplicityTable& table, const HyperParams& hp) {
  require_match(table, hp, "posterior_hellinger_sq");
  const auto k = static_cast<double>(hp.categories);
  const double X = static_cast<double>(table.total1()) + k * hp.alpha;
  const double Y = static_cast<double>(table.total2()) + k * hp.beta;
  const double log_bx = specfun::log_beta2(0.5, X);
  const double log_by = specfun::log_beta2(0.5, Y);
  const double bc = sum_over_categories(table, [&](const CountPair& p) {
    const double x = static_cast<double>(p.n) + hp.alpha;
    const double y = static_cast<double>(p.m) + hp.beta;
    return std::exp(log_bx - specfun::log_beta2(0.5, x) + log_by - specfun::log_beta2(0.5, y));
  });
  return 1.0 - bc;
}

// --- grid kernels --------------------------------------------------------------

namespace detail {

KlRow make_kl_row(const MultiplicityTable& table, double alpha) {
  require_concentration(alpha, "make_kl_row");
  const auto k = static_cast<double>(table.categories());
  KlRow row;
  row.total = static_cast<double>(table.total1()) + k * alpha;
  const double X = row.total;
  row.trigamma_total2 = trigamma(X + 2.0);
  const auto& entries = table.entries();
  row.x.reserve(entries.size());
  row.shift1.reserve(entries.size());
  row.shift2.reserve(entries.size());
  row.trigamma2.reserve(entries.size());
  for (const auto& e : entries) {
    const double x = count_of(e.pair, Sample::kFirst) + alpha;
    row.x.push_back(x);
    row.shift1.push_back(delta_psi(x + 1.0, X + 2.0));
    row.shift2.push_back(delta_psi(x + 2.0, X + 2.0));
    row.trigamma2.push_back(trigamma(x + 2.0));
  }
  row.entropy = posterior_entropy(table, alpha, Sample::kFirst);
  return row;
}

KlColumn make_kl_column(const MultiplicityTable& table, double beta) {
  require_concentration(beta, "make_kl_column");
  const auto k = static_cast<double>(table.categories());
  KlColumn col;
  col.total = static_cast<double>(table.total2()) + k * beta;
  const double Y = col.total;
  col.trigamma_total = trigamma(Y);
  const auto& entries = table.entries();
  col.log_t.reserve(entries.size());
  col.trigamma.reserve(entries.size());
  for (const auto& e : entries) {
    const double y = count_of(e.pair, Sample::kSecond) + beta;
    col.log_t.push_back(delta_psi(y, Y));
    col.trigamma.push_back(trigamma(y));
  }
  return col;
}

KlMoments kl_moments(const MultiplicityTable& table, const KlRow& row, const KlColumn& col,
                     bool with_second) {
  const auto& entries = table.entries();
  const double X = row.total;
  KlMoments out;

  double cross = 0.0;  // sum_u nu x_u <ln t_u>
  for (std::size_t u = 0; u < entries.size(); ++u) {
    cross += static_cast<double>(entries[u].multiplicity) * row.x[u] * col.log_t[u];
  }
  out.mean = -cross / X - row.entropy;
  if (!with_second) return out;

  // <D^2> X (X+1) = -c X^2 + (sum nu x D)^2 - sum nu x^2 (D^2 - c)
  //                 + sum nu x (x+1) (psi_1(x+2) + psi_1(y) - c + D'^2)
  // with D = shift1 - ln t, D' = shift2 - ln t, c = psi_1(X+2) + psi_1(Y).
  const double c = row.trigamma_total2 + col.trigamma_total;
  double s1 = 0.0;
  double s2 = 0.0;
  double s3 = 0.0;
  for (std::size_t u = 0; u < entries.size(); ++u) {
    const auto nu = static_cast<double>(entries[u].multiplicity);
    const double x = row.x[u];
    const double d1 = row.shift1[u] - col.log_t[u];
    const double d2 = row.shift2[u] - col.log_t[u];
    s1 += nu * x * d1;
    s2 += nu * x * x * (d1 * d1 - c);
    s3 += nu * x * (x + 1.0) * (row.trigamma2[u] + col.trigamma[u] - c + d2 * d2);
  }
  out.second = (-c * X * X + s1 * s1 - s2 + s3) / (X * (X + 1.0));
  return out;
}

std::vector<double> make_hellinger_factors(const MultiplicityTable& table, double conc,
                                           Sample sample) {
  require_concentration(conc, "make_hellinger_factors");
  const auto k = static_cast<double>(table.categories());
  const double total = static_cast<double>(table.total(sample)) + k * conc;
  const double log_b_total = specfun::log_beta2(0.5, total);
  std::vector<double> out;
  out.reserve(table.entries().size());
  for (const auto& e : table.entries()) {
    const double x = count_of(e.pair, sample) + conc;
    out.push_back(std::exp(log_b_total - specfun::log_beta2(0.5, x)));
  }
  return out;
}

double hellinger_from_factors(const MultiplicityTable& table, const std::vector<double>& row,
                              const std::vector<double>& col) {
  const auto& entries = table.entries();
  double bc = 0.0;
  for (std::size_t u = 0; u < entries.size(); ++u) {
    bc += static_cast<double>(entries[u].multiplicity) * row[u] * col[u];
  }
  return 1.0 - bc;
}

}  // namespace detail
}  // namespace catdiv
