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

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

#include "catdiv/counts.hpp"
#include "catdiv/error.hpp"
#include "catdiv/estimators.hpp"
#include "catdiv/synth.hpp"
#include "doctest.h"
#include "oracles.hpp"

namespace synth = catdiv::synth;
using Counts = std::vector<std::int64_t>;

namespace {

// Brute-force L-gram probabilities: walk every tuple (x_1, ..., x_L) with
// x_1 least significant.
std::vector<double> enumerate_lgrams(const synth::MarkovChainSpec& s) {
  const int S = s.states;
  std::size_t k = 1;
  for (int i = 0; i < s.gram_length; ++i) k *= static_cast<std::size_t>(S);
  std::vector<double> q(k);
  std::vector<int> x(static_cast<std::size_t>(s.gram_length));
  for (std::size_t idx = 0; idx < k; ++idx) {
    std::size_t r = idx;
    for (auto& v : x) {
      v = static_cast<int>(r % static_cast<std::size_t>(S));
      r /= static_cast<std::size_t>(S);
    }
    double p = s.stationary[static_cast<std::size_t>(x[0])];
    for (std::size_t j = 1; j < x.size(); ++j) {
      p *= s.transition[static_cast<std::size_t>(x[j]) * static_cast<std::size_t>(S) +
                        static_cast<std::size_t>(x[j - 1])];
    }
    q[idx] = p;
  }
  return q;
}

double brute_entropy(const std::vector<double>& q) {
  double h = 0.0;
  for (double v : q) h -= v * std::log(v);
  return h;
}

double brute_crossentropy(const std::vector<double>& q, const std::vector<double>& t) {
  double h = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) h -= q[i] * std::log(t[i]);
  return h;
}

}  // namespace

TEST_CASE("seed derivation is deterministic and stream-separated") {
  CHECK(synth::derive_seed(7, 1, 3) == synth::derive_seed(7, 1, 3));
  CHECK(synth::derive_seed(7, 1, 3) != synth::derive_seed(7, 2, 3));
  CHECK(synth::derive_seed(7, 1, 3) != synth::derive_seed(7, 1, 4));
  CHECK(synth::derive_seed(7, 1, 3) != synth::derive_seed(8, 1, 3));
}

TEST_CASE("dirichlet draws lie on the simplex") {
  for (double a : {0.01, 0.3, 1.0, 25.0}) {
    const auto p = synth::sample_dirichlet(400, a, 11);
    CHECK(p.size() == 400);
    const double sum = std::accumulate(p.p.begin(), p.p.end(), 0.0);
    CHECK(std::abs(sum - 1.0) < 1e-12);
    for (double v : p.p) CHECK(v >= 0.0);
    CHECK_NOTHROW(p.validate());
  }
  CHECK_THROWS_AS(synth::sample_dirichlet(1, 1.0, 1), catdiv::DomainError);
  CHECK_THROWS_AS(synth::sample_dirichlet(4, 0.0, 1), catdiv::DomainError);
  CHECK_THROWS_AS(synth::sample_dirichlet(4, -1.0, 1), catdiv::DomainError);
}

TEST_CASE("dirichlet component means") {
  for (double a : {0.2, 1.0, 5.0}) {
    const int k = 5;
    std::vector<oracle::Moments> m(k);
    synth::Rng rng(12);
    for (int d = 0; d < 100000; ++d) {
      const auto p = synth::sample_dirichlet(k, a, rng);
      for (int i = 0; i < k; ++i) m[static_cast<std::size_t>(i)].add(p.p[static_cast<std::size_t>(i)]);
    }
    for (const auto& mi : m) CHECK(std::abs(mi.mean - 1.0 / k) < 5.0 * mi.standard_error());
  }
}

TEST_CASE("dirichlet draws concentrate at the prior mean entropy") {
  const double want = static_cast<double>(oracle::digamma(401.0L) - oracle::digamma(2.0L));
  oracle::Moments h;
  for (std::uint64_t s = 0; s < 200; ++s) h.add(synth::exact_entropy(synth::sample_dirichlet(400, 1.0, s)));
  CHECK(std::abs(h.mean - want) < 5.0 * h.standard_error());
  CHECK(std::sqrt(h.m2 / h.n) < 0.02 * want);
}

TEST_CASE("dirichlet is reproducible") {
  const auto a = synth::sample_dirichlet(50, 0.5, 99);
  const auto b = synth::sample_dirichlet(50, 0.5, 99);
  CHECK(a.p == b.p);
  CHECK(synth::sample_dirichlet(50, 0.5, 100).p != a.p);
}

TEST_CASE("multinomial basics") {
  const synth::ProbabilityVector p{{0.5, 0.25, 0.25}};
  const auto zero = synth::sample_multinomial(p, 0, 1);
  CHECK(zero == Counts{0, 0, 0});
  const synth::ProbabilityVector point{{1.0, 0.0, 0.0, 0.0}};
  CHECK(synth::sample_multinomial(point, 1234, 5) == Counts{1234, 0, 0, 0});
  const auto c = synth::sample_multinomial(p, 777, 3);
  CHECK(std::accumulate(c.begin(), c.end(), std::int64_t{0}) == 777);
  CHECK(c == synth::sample_multinomial(p, 777, 3));
}

TEST_CASE("multinomial frequencies") {
  const auto p = synth::sample_dirichlet(30, 1.0, 21);
  const std::int64_t n = 1000000;
  const auto c = synth::sample_multinomial(p, n, 22);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const double se = std::sqrt(p.p[i] * (1.0 - p.p[i]) / static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(c[i]) / static_cast<double>(n) - p.p[i]) < 5.0 * se + 1e-15);
  }
}

TEST_CASE("exact divergences") {
  const synth::ProbabilityVector q{{0.75, 0.25}};
  const synth::ProbabilityVector t{{0.25, 0.75}};
  CHECK(std::abs(synth::exact_dkl(q, t) - 0.5 * std::log(3.0)) < 1e-15);
  CHECK(std::abs(synth::exact_dkl(q, q)) < 1e-15);
  CHECK(std::abs(synth::exact_hellinger_sq(q, q)) < 1e-15);
  const synth::ProbabilityVector a{{0.5, 0.5, 0.0, 0.0}};
  const synth::ProbabilityVector b{{0.0, 0.0, 0.3, 0.7}};
  CHECK(synth::exact_hellinger_sq(a, b) == 1.0);
  CHECK_THROWS_AS(synth::exact_dkl(a, b), catdiv::DomainError);

  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto x = synth::sample_dirichlet(40, 0.7, 2 * s);
    const auto y = synth::sample_dirichlet(40, 0.7, 2 * s + 1);
    const double d = synth::exact_dkl(x, y);
    CHECK(d >= 0.0);
    CHECK(std::abs(d - oracle::kl(x.p, y.p)) < 1e-12);
    CHECK(std::abs(d - (synth::exact_crossentropy(x, y) - synth::exact_entropy(x))) < 1e-12);
    const double h = synth::exact_hellinger_sq(x, y);
    CHECK(std::abs(h - oracle::hellinger_sq(x.p, y.p)) < 1e-12);
    CHECK(h == synth::exact_hellinger_sq(y, x));
    CHECK(h >= 0.0);
    CHECK(h <= 1.0);
  }
}

TEST_CASE("markov spec is valid") {
  for (int s : {2, 4, 20}) {
    const auto spec = synth::build_markov_spec(s, 2, 5);
    CHECK_NOTHROW(spec.validate());
    for (int mu = 0; mu < s; ++mu) {
      double col = 0.0;
      for (int nu = 0; nu < s; ++nu) {
        CHECK(spec.w(nu, mu) > 0.0);
        col += spec.w(nu, mu);
      }
      CHECK(std::abs(col - 1.0) < 1e-12);
    }
    double resid = 0.0;
    for (int nu = 0; nu < s; ++nu) {
      double wp = 0.0;
      for (int mu = 0; mu < s; ++mu) wp += spec.w(nu, mu) * spec.stationary[static_cast<std::size_t>(mu)];
      resid += std::abs(wp - spec.stationary[static_cast<std::size_t>(nu)]);
    }
    CHECK(resid <= 1e-12);
  }
  const auto uni = synth::build_markov_spec(20, 3, 1, true);
  for (double v : uni.stationary) CHECK(std::abs(v - 0.05) < 1e-15);
  CHECK(uni.categories() == 8000);
  CHECK(std::abs(synth::markov_entropy(uni) - 3.0 * std::log(20.0)) < 1e-12);
  CHECK(std::abs(synth::markov_entropy(uni) - 8.987197) < 1e-6);
}

TEST_CASE("markov formulas match enumeration") {
  for (int l : {1, 2, 3}) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      const auto q = synth::build_markov_spec(4, l, 100 + seed);
      const auto t = synth::build_markov_spec(4, l, 200 + seed);
      const auto eq = enumerate_lgrams(q);
      const auto et = enumerate_lgrams(t);
      CHECK(std::abs(synth::markov_entropy(q) - brute_entropy(eq)) < 1e-12);
      CHECK(std::abs(synth::markov_crossentropy(q, t) - brute_crossentropy(eq, et)) < 1e-12);
      CHECK(std::abs(synth::markov_crossentropy(q, q) - synth::markov_entropy(q)) < 1e-12);
      CHECK(synth::markov_crossentropy(q, t) - synth::markov_entropy(q) >= 0.0);
      const auto lg = synth::lgram_distribution(q);
      REQUIRE(lg.p.size() == eq.size());
      for (std::size_t i = 0; i < eq.size(); ++i) CHECK(std::abs(lg.p[i] - eq[i]) < 1e-15);
    }
  }
  CHECK(std::abs(synth::markov_entropy(synth::build_markov_spec(4, 1, 3)) -
                 brute_entropy(synth::build_markov_spec(4, 1, 3).stationary)) < 1e-12);
  CHECK_THROWS_AS(synth::markov_crossentropy(synth::build_markov_spec(4, 2, 1),
                                             synth::build_markov_spec(5, 2, 1)),
                  catdiv::DomainError);
  CHECK_THROWS_AS(synth::markov_crossentropy(synth::build_markov_spec(4, 2, 1),
                                             synth::build_markov_spec(4, 3, 1)),
                  catdiv::DomainError);
}

TEST_CASE("lgram indexing is little-endian") {
  const std::vector<int> x = {1, 0, 2};
  CHECK(synth::lgram_index(x, 3) == 1 + 0 * 3 + 2 * 9);
  const std::vector<int> y = {19, 19};
  CHECK(synth::lgram_index(y, 20) == 399);
}

TEST_CASE("lgram sampling") {
  const auto spec = synth::build_markov_spec(4, 2, 31);
  CHECK(synth::sample_lgrams(spec, 0, 1) == Counts(16, 0));
  const std::int64_t n = 1000000;
  const auto c = synth::sample_lgrams(spec, n, 32);
  const auto q = enumerate_lgrams(spec);
  for (std::size_t i = 0; i < q.size(); ++i) {
    const double se = std::sqrt(q[i] * (1.0 - q[i]) / static_cast<double>(n));
    CHECK(std::abs(static_cast<double>(c[i]) / static_cast<double>(n) - q[i]) < 5.0 * se);
  }
  CHECK(c == synth::sample_lgrams(spec, n, 32));

  const auto uni = synth::build_markov_spec(3, 2, 1, true);
  const auto u = synth::sample_lgrams(uni, 900000, 3);
  for (auto v : u) CHECK(std::abs(static_cast<double>(v) / 900000.0 - 1.0 / 9.0) < 0.002);
}

TEST_CASE("nested subsamples") {
  const Counts parent = {5, 0, 3, 7, 1};
  const Counts ladder = {0, 1, 4, 10, 16};
  synth::Rng rng(8);
  const auto subs = synth::nested_subsamples(parent, ladder, rng);
  REQUIRE(subs.size() == ladder.size());
  for (std::size_t j = 0; j < subs.size(); ++j) {
    CHECK(std::accumulate(subs[j].begin(), subs[j].end(), std::int64_t{0}) == ladder[j]);
    for (std::size_t i = 0; i < parent.size(); ++i) {
      CHECK(subs[j][i] <= parent[i]);
      if (j > 0) CHECK(subs[j][i] >= subs[j - 1][i]);
    }
  }
  CHECK(subs.back() == parent);

  const Counts bad = {3, 2};
  CHECK_THROWS(synth::nested_subsamples(parent, bad, rng));
  const Counts too_big = {17};
  CHECK_THROWS(synth::nested_subsamples(parent, too_big, rng));
}

TEST_CASE("nested subsample marginals are hypergeometric") {
  const Counts parent = {60, 30, 10};
  const Counts ladder = {20};
  oracle::Moments first;
  synth::Rng rng(77);
  for (int r = 0; r < 20000; ++r) {
    first.add(static_cast<double>(synth::nested_subsamples(parent, ladder, rng)[0][0]));
  }
  CHECK(std::abs(first.mean - 12.0) < 5.0 * first.standard_error());
}

TEST_CASE("plugin on a large sample approaches the exact divergence") {
  const auto q = synth::sample_dirichlet(400, 1.0, 41);
  const auto t = synth::sample_dirichlet(400, 1.0, 42);
  const auto n = synth::sample_multinomial(q, 10000000, 43);
  const auto m = synth::sample_multinomial(t, 10000000, 44);
  const auto table = catdiv::MultiplicityTable::build(n, m, 400);
  const double exact = synth::exact_dkl(q, t);
  CHECK(std::abs(catdiv::estimate_dkl_plugin(table, catdiv::PseudoCount::kNaive) - exact) <
        0.01 * exact);
}
