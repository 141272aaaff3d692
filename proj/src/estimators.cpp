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

#include "catdiv/estimators.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "catdiv/detail/grid_kernels.hpp"
#include "catdiv/error.hpp"
#include "catdiv/hyperprior.hpp"
#include "catdiv/optimize.hpp"
#include "catdiv/posterior.hpp"

namespace catdiv {
namespace {

const double kLogLower = std::log(kMinConcentration);
const double kLogUpper = std::log(kMaxConcentration);

constexpr double kHessianStep = 0.05;
constexpr double kWindowSigmas = 3.0;
// Used when the curvature at the maximum is not negative: a +-3 log-unit window.
constexpr double kFallbackStd = 1.0;
constexpr double kPriorGradientStep = 1e-5;
constexpr std::int64_t kMinBins = 20;
constexpr std::int64_t kMaxBins = 2000;

constexpr std::array<double, 5> kStarts = {-9.210340371976184, -4.605170185988092, 0.0,
                                           4.605170185988092, 9.210340371976184};

const char* const kLogGridMeasure =
    "rho(alpha,beta) dalpha dbeta integrated on ln(alpha), ln(beta) with Jacobian alpha*beta";

// Neumaier-compensated accumulator.
class Sum {
 public:
  void add(double v) {
    const double t = total_ + v;
    if (std::abs(total_) >= std::abs(v)) {
      comp_ += (total_ - t) + v;
    } else {
      comp_ += (v - t) + total_;
    }
    total_ = t;
  }
  double value() const { return total_ + comp_; }

 private:
  double total_ = 0.0;
  double comp_ = 0.0;
};

optimize::BoxOptions box_options() {
  optimize::BoxOptions o;
  o.lower = kLogLower;
  o.upper = kLogUpper;
  return o;
}

double hyper_prior_term(Weighting w, double la, double lb, std::int64_t k) {
  const double a = std::exp(la);
  const double b = std::exp(lb);
  switch (w) {
    case Weighting::kEvidence:
      return 0.0;
    case Weighting::kKlHyperPrior:
      return log_weight_kl(a, b, k) + la + lb;
    case Weighting::kHellingerHyperPrior:
      return log_weight_hellinger(a, b, k) + la + lb;
  }
  return 0.0;
}

struct AxisMaximum {
  double point = 0.0;
  double std = kFallbackStd;
  bool boundary = false;
  bool converged = false;
};

double std_from_curvature(double h) { return h < 0.0 ? 1.0 / std::sqrt(-h) : kFallbackStd; }

// One-dimensional maximization of the evidence of one sample.
AxisMaximum maximize_evidence(const MultiplicityTable& table, Sample sample) {
  auto value = [&](double la) { return log_evidence(table, std::exp(la), sample); };

  // A flat objective (fewer than two observations) has no maximizer.
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i <= 8; ++i) {
    const double v = value(kLogLower + (kLogUpper - kLogLower) * i / 8.0);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  AxisMaximum out;
  if (hi - lo <= 1e-10 * (1.0 + std::abs(hi))) {
    out.point = 0.0;
    out.boundary = true;
    out.converged = true;
    return out;
  }

  optimize::Objective f = [&](std::span<const double> x, std::span<double> g) {
    const double a = std::exp(x[0]);
    g[0] = log_evidence_slope(table, a, sample);
    return log_evidence(table, a, sample);
  };
  std::vector<std::vector<double>> starts;
  for (double s : kStarts) starts.push_back({s});
  const auto best = optimize::maximize_in_box(f, starts, box_options());
  out.point = best.point[0];
  out.boundary = best.at_lower[0] || best.at_upper[0];
  out.converged = best.converged;
  const double h = (value(out.point + kHessianStep) - 2.0 * value(out.point) +
                    value(out.point - kHessianStep)) /
                   (kHessianStep * kHessianStep);
  out.std = std_from_curvature(h);
  return out;
}

LogPosteriorMaximum maximize_mixture(const MultiplicityTable& table, Weighting weighting) {
  const std::int64_t k = table.categories();
  auto value = [&](std::span<const double> x) {
    return log_evidence(table, std::exp(x[0]), Sample::kFirst) +
           log_evidence(table, std::exp(x[1]), Sample::kSecond) +
           hyper_prior_term(weighting, x[0], x[1], k);
  };
  optimize::Objective f = [&](std::span<const double> x, std::span<double> g) {
    const double a = std::exp(x[0]);
    const double b = std::exp(x[1]);
    const double h = kPriorGradientStep;
    g[0] = log_evidence_slope(table, a, Sample::kFirst) +
           (hyper_prior_term(weighting, x[0] + h, x[1], k) -
            hyper_prior_term(weighting, x[0] - h, x[1], k)) / (2.0 * h);
    g[1] = log_evidence_slope(table, b, Sample::kSecond) +
           (hyper_prior_term(weighting, x[0], x[1] + h, k) -
            hyper_prior_term(weighting, x[0], x[1] - h, k)) / (2.0 * h);
    return value(x);
  };

  std::vector<std::vector<double>> starts;
  for (double s : kStarts) starts.push_back({s, s});
  const AxisMaximum dp_a = maximize_evidence(table, Sample::kFirst);
  const AxisMaximum dp_b = maximize_evidence(table, Sample::kSecond);
  starts.push_back({dp_a.point, dp_b.point});

  const auto best = optimize::maximize_in_box(f, starts, box_options());
  LogPosteriorMaximum out;
  out.log_alpha = best.point[0];
  out.log_beta = best.point[1];
  out.alpha_at_boundary = best.at_lower[0] || best.at_upper[0];
  out.beta_at_boundary = best.at_lower[1] || best.at_upper[1];
  out.converged = best.converged;
  out.value = best.value;

  const auto hess = optimize::central_hessian(value, best.point, kHessianStep);
  const double a = -hess[0];
  const double b = -hess[1];
  const double c = -hess[3];
  const double det = a * c - b * b;
  if (a > 0.0 && c > 0.0 && det > 0.0) {
    out.std_log_alpha = std::sqrt(c / det);
    out.std_log_beta = std::sqrt(a / det);
  } else {
    out.std_log_alpha = std_from_curvature(hess[0]);
    out.std_log_beta = std_from_curvature(hess[3]);
  }
  return out;
}

std::vector<double> axis_nodes(double center, double sd, std::int64_t bins) {
  const double lo = std::max(kLogLower, center - kWindowSigmas * sd);
  const double hi = std::min(kLogUpper, center + kWindowSigmas * sd);
  std::vector<double> nodes(static_cast<std::size_t>(bins));
  for (std::int64_t i = 0; i < bins; ++i) {
    nodes[static_cast<std::size_t>(i)] =
        bins == 1 ? center : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins - 1);
  }
  return nodes;
}

// Trapezoid coefficients on a uniform grid.
std::vector<double> trapezoid(const std::vector<double>& nodes) {
  std::vector<double> c(nodes.size(), 0.0);
  if (nodes.size() < 2) {
    std::fill(c.begin(), c.end(), 1.0);
    return c;
  }
  const double h = (nodes.back() - nodes.front()) / static_cast<double>(nodes.size() - 1);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    c[i] = (i == 0 || i + 1 == nodes.size()) ? 0.5 * h : h;
  }
  return c;
}

std::int64_t scaled_bins(std::int64_t k, std::int64_t n, double scale) {
  const auto b = static_cast<double>(heuristic_bins(k, n)) * scale;
  return std::max<std::int64_t>(2, static_cast<std::int64_t>(std::llround(b)));
}

Diagnostics mixture_diagnostics(const MultiplicityTable& table, const LogPosteriorMaximum& max,
                                const QuadratureGrid& grid) {
  Diagnostics d;
  d.alpha_star = std::exp(max.log_alpha);
  d.beta_star = std::exp(max.log_beta);
  d.grid_bins_alpha = static_cast<std::int64_t>(grid.log_alpha.size());
  d.grid_bins_beta = static_cast<std::int64_t>(grid.log_beta.size());
  d.log_evidence_at_max = log_evidence(table, d.alpha_star, Sample::kFirst) +
                          log_evidence(table, d.beta_star, Sample::kSecond);
  d.log_posterior_at_max = max.value;
  d.alpha_at_boundary = max.alpha_at_boundary;
  d.beta_at_boundary = max.beta_at_boundary;
  d.measure = kLogGridMeasure;
  return d;
}

void require_two_categories(const MultiplicityTable& table, const char* fn) {
  if (table.categories() < 2) throw DomainError(std::string(fn) + ": K must be >= 2");
}

}  // namespace

std::int64_t heuristic_bins(std::int64_t categories, std::int64_t sample_size) {
  if (sample_size <= 0) return kMaxBins;
  const double r = static_cast<double>(categories) / static_cast<double>(sample_size);
  const double b = 10.0 * r * r;
  if (b >= static_cast<double>(kMaxBins)) return kMaxBins;
  return std::clamp<std::int64_t>(static_cast<std::int64_t>(std::llround(b)), kMinBins, kMaxBins);
}

QuadratureGrid make_quadrature_grid(const LogPosteriorMaximum& max, std::int64_t bins_alpha,
                                    std::int64_t bins_beta) {
  QuadratureGrid g;
  g.log_alpha = axis_nodes(max.log_alpha, max.std_log_alpha, bins_alpha);
  g.log_beta = axis_nodes(max.log_beta, max.std_log_beta, bins_beta);
  return g;
}

LogPosteriorMaximum maximize_log_posterior(const MultiplicityTable& table, Weighting weighting) {
  require_two_categories(table, "maximize_log_posterior");
  if (weighting != Weighting::kEvidence) return maximize_mixture(table, weighting);
  const AxisMaximum a = maximize_evidence(table, Sample::kFirst);
  const AxisMaximum b = maximize_evidence(table, Sample::kSecond);
  LogPosteriorMaximum out;
  out.log_alpha = a.point;
  out.log_beta = b.point;
  out.std_log_alpha = a.std;
  out.std_log_beta = b.std;
  out.alpha_at_boundary = a.boundary;
  out.beta_at_boundary = b.boundary;
  out.converged = a.converged && b.converged;
  out.value = log_evidence(table, std::exp(a.point), Sample::kFirst) +
              log_evidence(table, std::exp(b.point), Sample::kSecond);
  return out;
}

EstimateReport estimate_dkl_dpm(const MultiplicityTable& table, const MixtureOptions& options) {
  require_two_categories(table, "estimate_dkl_dpm");
  const std::int64_t k = table.categories();
  const auto max = maximize_log_posterior(table, Weighting::kKlHyperPrior);
  const auto grid =
      make_quadrature_grid(max, scaled_bins(k, table.total1(), options.bin_scale),
                           scaled_bins(k, table.total2(), options.bin_scale));
  EstimateReport report;
  report.diagnostics = mixture_diagnostics(table, max, grid);

  const std::size_t na = grid.log_alpha.size();
  const std::size_t nb = grid.log_beta.size();
  std::vector<detail::KlRow> rows;
  std::vector<detail::KlColumn> cols;
  std::vector<double> row_log(na);
  std::vector<double> row_a(na);
  std::vector<double> col_log(nb);
  std::vector<double> col_b(nb);
  rows.reserve(na);
  cols.reserve(nb);
  for (std::size_t i = 0; i < na; ++i) {
    const double la = grid.log_alpha[i];
    const double a = std::exp(la);
    rows.push_back(detail::make_kl_row(table, a));
    row_a[i] = prior_mean_entropy(a, k);
    row_log[i] = log_evidence(table, a, Sample::kFirst) +
                 std::log(std::abs(prior_mean_entropy_slope(a, k))) + la;
  }
  for (std::size_t j = 0; j < nb; ++j) {
    const double lb = grid.log_beta[j];
    const double b = std::exp(lb);
    cols.push_back(detail::make_kl_column(table, b));
    col_b[j] = prior_mean_crossentropy(b, k);
    col_log[j] = log_evidence(table, b, Sample::kSecond) +
                 std::log(std::abs(prior_mean_crossentropy_slope(b, k))) + lb;
  }
  auto log_w = [&](std::size_t i, std::size_t j) {
    return row_log[i] + col_log[j] + log_phi_kl(col_b[j] - row_a[i], k) + options.log_weight_offset;
  };

  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) peak = std::max(peak, log_w(i, j));
  }
  const auto ca = trapezoid(grid.log_alpha);
  const auto cb = trapezoid(grid.log_beta);
  Sum w0;
  Sum w1;
  Sum w2;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const double w = ca[i] * cb[j] * std::exp(log_w(i, j) - peak);
      if (!(w > 0.0)) continue;
      const auto m = detail::kl_moments(table, rows[i], cols[j], true);
      w0.add(w);
      w1.add(w * m.mean);
      w2.add(w * m.second);
    }
  }
  const double norm = w0.value();
  const double mean = w1.value() / norm;
  const double second = w2.value() / norm;
  if (!std::isfinite(peak) || !(norm > 0.0) || !std::isfinite(mean) || !std::isfinite(second)) {
    HyperParams hp{report.diagnostics.alpha_star, report.diagnostics.beta_star, k};
    report.value = posterior_dkl(table, hp);
    report.posterior_std = 0.0;
    report.diagnostics.collapsed = true;
    return report;
  }
  report.value = mean;
  report.posterior_std = std::sqrt(std::max(0.0, second - mean * mean));
  return report;
}

EstimateReport estimate_dkl_dp(const MultiplicityTable& table) {
  require_two_categories(table, "estimate_dkl_dp");
  const auto max = maximize_log_posterior(table, Weighting::kEvidence);
  EstimateReport report;
  auto& d = report.diagnostics;
  d.alpha_star = std::exp(max.log_alpha);
  d.beta_star = std::exp(max.log_beta);
  d.log_evidence_at_max = max.value;
  d.log_posterior_at_max = max.value;
  d.alpha_at_boundary = max.alpha_at_boundary;
  d.beta_at_boundary = max.beta_at_boundary;
  d.measure = "point estimate at the maximum-likelihood concentrations";
  report.value = posterior_dkl(table, HyperParams{d.alpha_star, d.beta_star, table.categories()});
  return report;
}

EstimateReport estimate_hellinger_dpm(const MultiplicityTable& table,
                                      const MixtureOptions& options) {
  require_two_categories(table, "estimate_hellinger_dpm");
  const std::int64_t k = table.categories();
  const auto max = maximize_log_posterior(table, Weighting::kHellingerHyperPrior);
  const auto grid =
      make_quadrature_grid(max, scaled_bins(k, table.total1(), options.bin_scale),
                           scaled_bins(k, table.total2(), options.bin_scale));
  EstimateReport report;
  report.diagnostics = mixture_diagnostics(table, max, grid);

  const std::size_t na = grid.log_alpha.size();
  const std::size_t nb = grid.log_beta.size();
  std::vector<std::vector<double>> rows(na);
  std::vector<std::vector<double>> cols(nb);
  std::vector<double> row_log(na);
  std::vector<double> row_g(na);
  std::vector<double> col_log(nb);
  std::vector<double> col_g(nb);
  for (std::size_t i = 0; i < na; ++i) {
    const double la = grid.log_alpha[i];
    const double a = std::exp(la);
    rows[i] = detail::make_hellinger_factors(table, a, Sample::kFirst);
    row_g[i] = hellinger_log_g(a, k);
    row_log[i] = log_evidence(table, a, Sample::kFirst) + row_g[i] +
                 std::log(std::abs(hellinger_log_g_slope(a, k))) + la;
  }
  for (std::size_t j = 0; j < nb; ++j) {
    const double lb = grid.log_beta[j];
    const double b = std::exp(lb);
    cols[j] = detail::make_hellinger_factors(table, b, Sample::kSecond);
    col_g[j] = hellinger_log_g(b, k);
    col_log[j] = log_evidence(table, b, Sample::kSecond) + col_g[j] +
                 std::log(std::abs(hellinger_log_g_slope(b, k))) + lb;
  }
  auto log_w = [&](std::size_t i, std::size_t j) {
    const double z = -std::expm1(row_g[i] + col_g[j]);
    return row_log[i] + col_log[j] + log_phi_hellinger(z) + options.log_weight_offset;
  };

  double peak = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) peak = std::max(peak, log_w(i, j));
  }
  const auto ca = trapezoid(grid.log_alpha);
  const auto cb = trapezoid(grid.log_beta);
  Sum w0;
  Sum w1;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      const double w = ca[i] * cb[j] * std::exp(log_w(i, j) - peak);
      if (!(w > 0.0)) continue;
      w0.add(w);
      w1.add(w * detail::hellinger_from_factors(table, rows[i], cols[j]));
    }
  }
  const double norm = w0.value();
  const double mean = w1.value() / norm;
  if (!std::isfinite(peak) || !(norm > 0.0) || !std::isfinite(mean)) {
    HyperParams hp{report.diagnostics.alpha_star, report.diagnostics.beta_star, k};
    report.value = posterior_hellinger_sq(table, hp);
    report.diagnostics.collapsed = true;
    return report;
  }
  report.value = mean;
  return report;
}

EstimateReport estimate_hellinger_dp(const MultiplicityTable& table) {
  require_two_categories(table, "estimate_hellinger_dp");
  EstimateReport report = estimate_dkl_dp(table);
  const auto& d = report.diagnostics;
  report.value =
      posterior_hellinger_sq(table, HyperParams{d.alpha_star, d.beta_star, table.categories()});
  return report;
}

EstimateReport estimate_entropy_nsb(const MultiplicityTable& table, Sample sample,
                                    const MixtureOptions& options) {
  require_two_categories(table, "estimate_entropy_nsb");
  const std::int64_t k = table.categories();
  auto log_w = [&](double la) {
    const double a = std::exp(la);
    return log_evidence(table, a, sample) + std::log(prior_mean_entropy_slope(a, k)) + la +
           options.log_weight_offset;
  };
  optimize::Objective f = [&](std::span<const double> x, std::span<double> g) {
    const double a = std::exp(x[0]);
    const double h = kPriorGradientStep;
    g[0] = log_evidence_slope(table, a, sample) +
           (std::log(prior_mean_entropy_slope(std::exp(x[0] + h), k)) -
            std::log(prior_mean_entropy_slope(std::exp(x[0] - h), k))) / (2.0 * h) + 1.0;
    return log_w(x[0]);
  };
  std::vector<std::vector<double>> starts;
  for (double s : kStarts) starts.push_back({s});
  const auto best = optimize::maximize_in_box(f, starts, box_options());
  const double center = best.point[0];
  const double curv = (log_w(center + kHessianStep) - 2.0 * log_w(center) +
                       log_w(center - kHessianStep)) / (kHessianStep * kHessianStep);
  const auto nodes = axis_nodes(center, std_from_curvature(curv),
                                scaled_bins(k, table.total(sample), options.bin_scale));
  const auto coef = trapezoid(nodes);

  EstimateReport report;
  auto& d = report.diagnostics;
  d.alpha_star = std::exp(center);
  d.beta_star = 0.0;
  d.grid_bins_alpha = static_cast<std::int64_t>(nodes.size());
  d.log_evidence_at_max = log_evidence(table, d.alpha_star, sample);
  d.log_posterior_at_max = best.value;
  d.alpha_at_boundary = best.at_lower[0] || best.at_upper[0];
  d.measure = "rho(alpha) dalpha integrated on ln(alpha) with Jacobian alpha";

  double peak = -std::numeric_limits<double>::infinity();
  std::vector<double> lw(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    lw[i] = log_w(nodes[i]);
    peak = std::max(peak, lw[i]);
  }
  Sum w0;
  Sum w1;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const double w = coef[i] * std::exp(lw[i] - peak);
    if (!(w > 0.0)) continue;
    w0.add(w);
    w1.add(w * posterior_entropy(table, std::exp(nodes[i]), sample));
  }
  const double mean = w1.value() / w0.value();
  if (!std::isfinite(mean)) {
    report.value = posterior_entropy(table, d.alpha_star, sample);
    d.collapsed = true;
    return report;
  }
  report.value = mean;
  return report;
}

}  // namespace catdiv
