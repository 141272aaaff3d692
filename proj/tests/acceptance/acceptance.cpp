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

// Acceptance harness: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <sys/wait.h>

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "catdiv/counts.hpp"
#include "catdiv/estimators.hpp"
#include "catdiv/experiment.hpp"
#include "catdiv/hyperprior.hpp"
#include "catdiv/posterior.hpp"
#include "catdiv/synth.hpp"
#include "oracles.hpp"
#include "zhang_series.hpp"

namespace ex = catdiv::experiment;
using catdiv::MultiplicityTable;
using Counts = std::vector<std::int64_t>;
using ex::EstimatorId;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  std::array<char, 64> buf{};
  std::snprintf(buf.data(), buf.size(), f, v);
  return buf.data();
}

std::string nstar_text(const std::optional<std::int64_t>& n) {
  return n ? std::to_string(*n) : std::string("never");
}

// ---------------------------------------------------------------------------

Outcome z_series() {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<int> kd(2, 10);
  std::uniform_int_distribution<int> cd(0, 15);
  double worst = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const int k = kd(rng);
    Counts n(static_cast<std::size_t>(k));
    Counts m(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      n[static_cast<std::size_t>(i)] = cd(rng);
      m[static_cast<std::size_t>(i)] = cd(rng);
    }
    if (n[0] == 0) n[0] = 1;
    const auto t = MultiplicityTable::build(n, m, k);
    worst = std::max(worst, std::abs(catdiv::estimate_dkl_zhang(t) - oracle::zhang_series(n, m)));
  }
  return {worst <= 1e-10, "100 instances, max |closed - series| = " + fmt("%.3g", worst) +
                              " (tol 1e-10)"};
}

Outcome dp_to_z() {
  std::mt19937_64 rng(1002);
  std::uniform_int_distribution<int> kd(2, 10);
  std::uniform_int_distribution<int> nd(1, 15);
  std::uniform_int_distribution<int> md(0, 15);
  double worst = 0.0;
  for (int rep = 0; rep < 50; ++rep) {
    const int k = kd(rng);
    Counts n(static_cast<std::size_t>(k));
    Counts m(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      n[static_cast<std::size_t>(i)] = nd(rng);
      m[static_cast<std::size_t>(i)] = md(rng);
    }
    const auto t = MultiplicityTable::build(n, m, k);
    const auto N = static_cast<long double>(t.total1());
    const auto M = static_cast<long double>(t.total2());
    const double offset = static_cast<double>(oracle::digamma(M + k) - oracle::digamma(M + 1) +
                                              (k - 1.0L) / N);
    const double post = catdiv::posterior_dkl(t, {1e-8, 1.0, k});
    worst = std::max(worst, std::abs(post - offset - catdiv::estimate_dkl_zhang(t)));
  }
  return {worst <= 1e-6, "50 instances (all n_i >= 1), max deviation = " + fmt("%.3g", worst) +
                             " (tol 1e-6)"};
}

Outcome posterior_moments() {
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<int> kd(2, 8);
  std::uniform_int_distribution<int> cd(0, 10);
  std::uniform_real_distribution<double> ld(std::log(0.2), std::log(10.0));
  int failures = 0;
  double worst = 0.0;
  for (int rep = 0; rep < 20; ++rep) {
    const int k = kd(rng);
    Counts n;
    Counts m;
    for (int i = 0; i < k; ++i) {
      n.push_back(cd(rng));
      m.push_back(cd(rng));
    }
    const catdiv::HyperParams hp{std::exp(ld(rng)), std::exp(ld(rng)), k};
    std::vector<double> x;
    std::vector<double> y;
    for (int i = 0; i < k; ++i) {
      x.push_back(static_cast<double>(n[static_cast<std::size_t>(i)]) + hp.alpha);
      y.push_back(static_cast<double>(m[static_cast<std::size_t>(i)]) + hp.beta);
    }
    oracle::Moments d;
    oracle::Moments d2;
    oracle::Moments h;
    for (int s = 0; s < 100000; ++s) {
      const auto q = oracle::dirichlet(x, rng);
      const auto t = oracle::dirichlet(y, rng);
      const double v = oracle::kl(q, t);
      d.add(v);
      d2.add(v * v);
      h.add(oracle::hellinger_sq(q, t));
    }
    const auto table = MultiplicityTable::build(n, m, k);
    for (const auto& [mc, exact] :
         {std::pair{d, catdiv::posterior_dkl(table, hp)},
          std::pair{d2, catdiv::posterior_dkl_squared(table, hp)},
          std::pair{h, catdiv::posterior_hellinger_sq(table, hp)}}) {
      const double z = std::abs(mc.mean - exact) / mc.standard_error();
      worst = std::max(worst, z);
      if (!(z < 3.0)) ++failures;
    }
  }
  return {failures == 0, "20 instances x 3 moments, 1e5 draws, max |dev|/SE = " +
                             fmt("%.2f", worst) + " (tol 3)"};
}

Outcome prior_means() {
  int bad = 0;
  for (std::int64_t k : {400, 8000}) {
    const double lnk = std::log(static_cast<double>(k));
    for (int i = 0; i < 100; ++i) {
      const double x = std::pow(10.0, -4.0 + 8.0 * i / 99.0);
      if (!(catdiv::prior_mean_entropy(x, k) < lnk)) ++bad;
      if (!(catdiv::prior_mean_crossentropy(x, k) > lnk)) ++bad;
    }
  }
  return {bad == 0, "K in {400, 8000}, 100 log-spaced values each, violations = " +
                        std::to_string(bad)};
}

Outcome flatness() {
  const std::int64_t k = 400;
  const int points = 1200;
  const double lo_l = std::log(1e-6);
  const double hi_l = std::log(1e6);
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> wa;
  std::vector<double> wb;
  for (int i = 0; i < points; ++i) {
    const double l = lo_l + (hi_l - lo_l) * i / (points - 1);
    const double x = std::exp(l);
    a.push_back(catdiv::prior_mean_entropy(x, k));
    b.push_back(catdiv::prior_mean_crossentropy(x, k));
    wa.push_back(std::log(catdiv::prior_mean_entropy_slope(x, k)) + l);
    wb.push_back(std::log(-catdiv::prior_mean_crossentropy_slope(x, k)) + l);
  }
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (double av : a) {
    for (double bv : b) {
      lo = std::min(lo, std::log(bv - av));
      hi = std::max(hi, std::log(bv - av));
    }
  }
  const int bins = 30;
  std::vector<double> hist(bins, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      const double z = b[j] - a[i];
      const int bin = std::min(bins - 1, static_cast<int>((std::log(z) - lo) / (hi - lo) * bins));
      hist[static_cast<std::size_t>(bin)] += std::exp(wa[i] + wb[j] + catdiv::log_phi_kl(z, k));
    }
  }
  const int first = bins / 10;
  const int last = bins - bins / 10;
  double mean = 0.0;
  for (int i = first; i < last; ++i) mean += hist[static_cast<std::size_t>(i)];
  mean /= last - first;
  double worst = 0.0;
  for (int i = first; i < last; ++i) {
    worst = std::max(worst, std::abs(hist[static_cast<std::size_t>(i)] / mean - 1.0));
  }
  return {worst <= 0.25, "K=400, central 24 of 30 ln z bins, max |density/mean - 1| = " +
                             fmt("%.3f", worst) + " (tol 0.25)"};
}

std::vector<ex::CurvePoint> curve_of(const std::vector<ex::CurvePoint>& all, EstimatorId id) {
  std::vector<ex::CurvePoint> out;
  for (const auto& p : all) {
    if (p.estimator == id) out.push_back(p);
  }
  return out;
}

ex::ExperimentConfig dirichlet_config(ex::Divergence div) {
  ex::ExperimentConfig c;
  c.categories = 400;
  c.alpha_true = 1.0;
  c.beta_true = 1.0;
  c.ladder = {25, 50, 100, 200, 400, 1000, 4000, 10000, 40000};
  c.repetitions = 10;
  c.divergence = div;
  c.master_seed = 2024;
  c.estimators = {EstimatorId::kDpm,     EstimatorId::kDp,    EstimatorId::kNaive,
                  EstimatorId::kJeffreys, EstimatorId::kTrybula, EstimatorId::kPerks};
  if (div == ex::Divergence::kKl) c.estimators.push_back(EstimatorId::kZhang);
  return c;
}

// DPM N* no larger than that of every competitor except DP.
Outcome dpm_first(const ex::ExperimentConfig& c, bool check_dp) {
  const auto curve = ex::summarize(ex::run_convergence(c), c.generator);
  const auto dpm = ex::first_stable_entry(curve_of(curve, EstimatorId::kDpm));
  bool ok = dpm.has_value();
  std::string detail = "N*: dpm=" + nstar_text(dpm);
  for (auto id : c.estimators) {
    if (id == EstimatorId::kDpm || id == EstimatorId::kDp) continue;
    const auto other = ex::first_stable_entry(curve_of(curve, id));
    detail += " " + ex::to_string(id) + "=" + nstar_text(other);
    if (other && (!dpm || *dpm > *other)) ok = false;
  }
  const auto dp = curve_of(curve, EstimatorId::kDp);
  const double dp_err = dp.back().relative_error;
  detail += "; dp rel.err at N=" + std::to_string(dp.back().n) + " = " + fmt("%.4f", dp_err);
  if (check_dp) {
    ok = ok && dp_err < 0.05;
    detail += " (tol 0.05)";
  }
  return {ok, detail};
}

Outcome fig4a() { return dpm_first(dirichlet_config(ex::Divergence::kKl), true); }

Outcome fig6a() { return dpm_first(dirichlet_config(ex::Divergence::kHellingerSq), false); }

double enumerated_entropy_gap(int l, std::uint64_t seed) {
  const auto q = catdiv::synth::build_markov_spec(4, l, seed);
  const auto t = catdiv::synth::build_markov_spec(4, l, seed + 1);
  const std::size_t k = static_cast<std::size_t>(std::pow(4, l));
  double hq = 0.0;
  double hqt = 0.0;
  std::vector<int> x(static_cast<std::size_t>(l));
  for (std::size_t idx = 0; idx < k; ++idx) {
    std::size_t r = idx;
    for (auto& v : x) {
      v = static_cast<int>(r % 4);
      r /= 4;
    }
    double pq = q.stationary[static_cast<std::size_t>(x[0])];
    double pt = t.stationary[static_cast<std::size_t>(x[0])];
    for (std::size_t j = 1; j < x.size(); ++j) {
      pq *= q.w(x[j], x[j - 1]);
      pt *= t.w(x[j], x[j - 1]);
    }
    hq -= pq * std::log(pq);
    hqt -= pq * std::log(pt);
  }
  return std::max(std::abs(catdiv::synth::markov_entropy(q) - hq),
                  std::abs(catdiv::synth::markov_crossentropy(q, t) - hqt));
}

Outcome fig5() {
  double worst = 0.0;
  for (int l : {1, 2, 3}) {
    for (std::uint64_t s = 0; s < 5; ++s) worst = std::max(worst, enumerated_entropy_gap(l, 10 * s));
  }
  ex::ExperimentConfig c;
  c.generator = ex::Generator::kMarkov;
  c.states = 20;
  c.gram_length = 2;
  c.ladder = {100, 400, 1000, 4000, 10000, 40000};
  c.repetitions = 10;
  c.estimators = {EstimatorId::kDpm};
  c.master_seed = 2025;
  const auto curve = ex::summarize(ex::run_convergence(c), c.generator);
  const double mean = curve.back().mean_estimate;
  const bool ok = worst <= 1e-12 && std::abs(mean - 1.0) <= 0.05;
  return {ok, "S=20 L=2, DPM mean est/true at N=40000 = " + fmt("%.4f", mean) +
                  " (tol +-0.05); S=4 enumeration max gap = " + fmt("%.2g", worst) +
                  " (tol 1e-12)"};
}

Outcome std_calibration() {
  ex::ExperimentConfig c;
  c.generator = ex::Generator::kMarkov;
  c.states = 20;
  c.gram_length = 2;
  c.ladder = {4000};
  c.repetitions = 30;
  c.estimators = {EstimatorId::kDpm};
  c.master_seed = 2026;
  const auto p = ex::summarize(ex::run_convergence(c), c.generator).front();
  const double ratio = p.mean_posterior_std / p.spread;
  return {ratio >= 0.5 && ratio <= 2.0,
          "30 reps, K=400, N=4000: mean posterior std / across-rep std = " + fmt("%.3f", ratio) +
              " (tol [0.5, 2])"};
}

std::optional<std::string> cli_output(const std::string& args) {
  const std::string cmd = std::string(CATDIV_CLI_PATH) + " " + args;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (pipe == nullptr) return std::nullopt;
  std::string out;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), got);
  const int status = pclose(pipe);
  if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) return std::nullopt;
  return out;
}

Outcome determinism() {
  const std::string base =
      "convergence --k 200 --ladder 30,300,3000 --reps 4 --seed 77 "
      "--estimator dpm,dp,jeffreys,zhang";
  const auto a = cli_output(base + " --threads 1");
  const auto b = cli_output(base + " --threads 1");
  const auto c = cli_output(base + " --threads 3");
  const auto d = cli_output(base + " --threads 3 --nested-subsample");
  const auto e = cli_output(base + " --threads 1 --nested-subsample");
  const bool ran = a && b && c && d && e;
  const bool ok = ran && !a->empty() && *a == *b && *a == *c && *d == *e;
  return {ok, ran ? "CSV identical across two runs and 1 vs 3 threads (fresh and nested draws)"
                  : "cli run failed"};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"Z closed form equals series", z_series},
      {"DP posterior limit reduces to Z", dp_to_z},
      {"posterior moments match Monte Carlo", posterior_moments},
      {"prior means bracket ln K", prior_means},
      {"KL hyper-prior flattens ln z", flatness},
      {"Dirichlet KL convergence, DPM first", fig4a},
      {"Markov chain KL convergence", fig5},
      {"Dirichlet Hellinger convergence, DPM first", fig6a},
      {"posterior std tracks repetition spread", std_calibration},
      {"convergence CSV determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failed;
    std::printf("criterion %2zu: %s  %s | %s [%.1fs]\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first, o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
