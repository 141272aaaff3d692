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

#include "catdiv/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "catdiv/error.hpp"

namespace catdiv::synth {
namespace {

constexpr double kSimplexTolerance = 1e-12;
constexpr double kStationaryTolerance = 1e-12;
constexpr int kMaxPowerIterations = 100000;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

void require_same_size(const ProbabilityVector& q, const ProbabilityVector& t, const char* fn) {
  if (q.p.size() != t.p.size()) throw ShapeError(std::string(fn) + ": size mismatch");
}

double power_of(int base, int exponent) {
  return std::pow(static_cast<double>(base), static_cast<double>(exponent));
}

// Fenwick tree over category counts for sampling without replacement.
class Fenwick {
 public:
  explicit Fenwick(std::span<const std::int64_t> counts) : tree_(counts.size() + 1, 0) {
    for (std::size_t i = 0; i < counts.size(); ++i) add(i, counts[i]);
    top_ = 1;
    while (top_ * 2 <= counts.size()) top_ *= 2;
  }

  void add(std::size_t i, std::int64_t v) {
    for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += v;
  }

  // Category holding the zero-based r-th remaining item.
  std::size_t find(std::int64_t r) const {
    std::size_t pos = 0;
    for (std::size_t step = top_; step > 0; step /= 2) {
      if (pos + step < tree_.size() && tree_[pos + step] <= r) {
        pos += step;
        r -= tree_[pos];
      }
    }
    return pos;
  }

 private:
  std::vector<std::int64_t> tree_;
  std::size_t top_ = 1;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t index) {
  return splitmix64(splitmix64(splitmix64(master) ^ stream) ^ index);
}

void ProbabilityVector::validate() const {
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < 0.0) throw DomainError("ProbabilityVector: invalid entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw DomainError("ProbabilityVector: entries do not sum to one");
  }
}

ProbabilityVector sample_dirichlet(std::int64_t categories, double alpha, Rng& rng) {
  if (categories < 2) throw DomainError("sample_dirichlet: K must be >= 2");
  if (!std::isfinite(alpha) || !(alpha > 0.0)) {
    throw DomainError("sample_dirichlet: alpha must be finite and > 0");
  }
  // Small alpha underflows Gamma draws, so work with their logarithms:
  // Gamma(a) = Gamma(a + 1) * U^(1/a).
  const bool boost = alpha < 1.0;
  std::gamma_distribution<double> gamma(boost ? alpha + 1.0 : alpha, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<double> logs(static_cast<std::size_t>(categories));
  for (auto& l : logs) {
    double g = gamma(rng);
    while (g <= 0.0) g = gamma(rng);
    l = std::log(g);
    if (boost) {
      double u = unif(rng);
      while (u <= 0.0) u = unif(rng);
      l += std::log(u) / alpha;
    }
  }
  const double top = *std::max_element(logs.begin(), logs.end());
  double sum = 0.0;
  ProbabilityVector out;
  out.p.resize(logs.size());
  for (std::size_t i = 0; i < logs.size(); ++i) {
    out.p[i] = std::exp(logs[i] - top);
    sum += out.p[i];
  }
  for (auto& v : out.p) v /= sum;
  return out;
}

ProbabilityVector sample_dirichlet(std::int64_t categories, double alpha, std::uint64_t seed) {
  Rng rng(seed);
  return sample_dirichlet(categories, alpha, rng);
}

std::vector<std::int64_t> sample_multinomial(const ProbabilityVector& p, std::int64_t n,
                                             Rng& rng) {
  if (n < 0) throw DomainError("sample_multinomial: N must be >= 0");
  std::vector<std::int64_t> counts(p.p.size(), 0);
  double rest = 1.0;
  std::int64_t left = n;
  for (std::size_t i = 0; i < p.p.size() && left > 0; ++i) {
    if (i + 1 == p.p.size()) {
      counts[i] = left;
      break;
    }
    const double prob = rest > 0.0 ? std::clamp(p.p[i] / rest, 0.0, 1.0) : 1.0;
    std::binomial_distribution<std::int64_t> binom(left, prob);
    counts[i] = binom(rng);
    left -= counts[i];
    rest -= p.p[i];
  }
  return counts;
}

std::vector<std::int64_t> sample_multinomial(const ProbabilityVector& p, std::int64_t n,
                                             std::uint64_t seed) {
  Rng rng(seed);
  return sample_multinomial(p, n, rng);
}

double exact_entropy(const ProbabilityVector& q) {
  double s = 0.0;
  for (double v : q.p) {
    if (v > 0.0) s -= v * std::log(v);
  }
  return s;
}

double exact_crossentropy(const ProbabilityVector& q, const ProbabilityVector& t) {
  require_same_size(q, t, "exact_crossentropy");
  double h = 0.0;
  for (std::size_t i = 0; i < q.p.size(); ++i) {
    if (q.p[i] == 0.0) continue;
    if (!(t.p[i] > 0.0)) throw DomainError("exact_crossentropy: t_i = 0 where q_i > 0");
    h -= q.p[i] * std::log(t.p[i]);
  }
  return h;
}

double exact_dkl(const ProbabilityVector& q, const ProbabilityVector& t) {
  require_same_size(q, t, "exact_dkl");
  double d = 0.0;
  for (std::size_t i = 0; i < q.p.size(); ++i) {
    if (q.p[i] == 0.0) continue;
    if (!(t.p[i] > 0.0)) throw DomainError("exact_dkl: t_i = 0 where q_i > 0");
    d += q.p[i] * std::log(q.p[i] / t.p[i]);
  }
  return std::max(0.0, d);
}

double exact_hellinger_sq(const ProbabilityVector& q, const ProbabilityVector& t) {
  require_same_size(q, t, "exact_hellinger_sq");
  double overlap = 0.0;
  for (std::size_t i = 0; i < q.p.size(); ++i) overlap += std::sqrt(q.p[i] * t.p[i]);
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

std::int64_t MarkovChainSpec::categories() const {
  const double k = power_of(states, gram_length);
  if (!(k < 9.0e18)) throw DomainError("MarkovChainSpec: S^L overflows");
  std::int64_t out = 1;
  for (int i = 0; i < gram_length; ++i) out *= states;
  return out;
}

void MarkovChainSpec::validate() const {
  if (states < 2 || gram_length < 1) throw DomainError("MarkovChainSpec: need S >= 2, L >= 1");
  const auto s = static_cast<std::size_t>(states);
  if (transition.size() != s * s || stationary.size() != s) {
    throw ShapeError("MarkovChainSpec: matrix or vector has the wrong size");
  }
  for (int mu = 0; mu < states; ++mu) {
    double col = 0.0;
    for (int nu = 0; nu < states; ++nu) {
      if (!(w(nu, mu) > 0.0)) throw DomainError("MarkovChainSpec: non-positive transition");
      col += w(nu, mu);
    }
    if (std::abs(col - 1.0) > kSimplexTolerance) {
      throw DomainError("MarkovChainSpec: column does not sum to one");
    }
  }
  double sum = 0.0;
  double resid = 0.0;
  for (int nu = 0; nu < states; ++nu) {
    if (!(stationary[static_cast<std::size_t>(nu)] > 0.0)) {
      throw DomainError("MarkovChainSpec: non-positive stationary entry");
    }
    sum += stationary[static_cast<std::size_t>(nu)];
    double row = 0.0;
    for (int mu = 0; mu < states; ++mu) row += w(nu, mu) * stationary[static_cast<std::size_t>(mu)];
    resid += std::abs(row - stationary[static_cast<std::size_t>(nu)]);
  }
  if (std::abs(sum - 1.0) > kSimplexTolerance) {
    throw DomainError("MarkovChainSpec: stationary vector does not sum to one");
  }
  if (resid > 1e-10) throw DomainError("MarkovChainSpec: stationary vector is not a fixed point");
}

MarkovChainSpec build_markov_spec(int states, int gram_length, std::uint64_t seed,
                                  bool uniform_transitions) {
  if (states < 2 || gram_length < 1) throw DomainError("build_markov_spec: need S >= 2, L >= 1");
  MarkovChainSpec spec;
  spec.states = states;
  spec.gram_length = gram_length;
  const auto s = static_cast<std::size_t>(states);
  spec.transition.assign(s * s, 1.0 / static_cast<double>(states));
  if (!uniform_transitions) {
    Rng rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (auto& v : spec.transition) {
      do {
        v = unif(rng);
      } while (v <= 0.0);
    }
    for (std::size_t mu = 0; mu < s; ++mu) {
      double col = 0.0;
      for (std::size_t nu = 0; nu < s; ++nu) col += spec.transition[nu * s + mu];
      for (std::size_t nu = 0; nu < s; ++nu) spec.transition[nu * s + mu] /= col;
    }
  }

  std::vector<double> pi(s, 1.0 / static_cast<double>(states));
  std::vector<double> next(s);
  for (int it = 0; it < kMaxPowerIterations; ++it) {
    double total = 0.0;
    for (std::size_t nu = 0; nu < s; ++nu) {
      double row = 0.0;
      for (std::size_t mu = 0; mu < s; ++mu) row += spec.transition[nu * s + mu] * pi[mu];
      next[nu] = row;
      total += row;
    }
    double change = 0.0;
    for (std::size_t nu = 0; nu < s; ++nu) {
      next[nu] /= total;
      change += std::abs(next[nu] - pi[nu]);
    }
    pi.swap(next);
    if (change <= kStationaryTolerance) break;
  }
  spec.stationary = std::move(pi);
  return spec;
}

double markov_entropy(const MarkovChainSpec& spec) {
  const auto& pi = spec.stationary;
  double s = 0.0;
  for (double v : pi) s -= v * std::log(v);
  double rate = 0.0;
  for (int mu = 0; mu < spec.states; ++mu) {
    for (int nu = 0; nu < spec.states; ++nu) {
      const double w = spec.w(nu, mu);
      rate -= w * pi[static_cast<std::size_t>(mu)] * std::log(w);
    }
  }
  return s + static_cast<double>(spec.gram_length - 1) * rate;
}

double markov_crossentropy(const MarkovChainSpec& q, const MarkovChainSpec& t) {
  if (q.states != t.states || q.gram_length != t.gram_length) {
    throw DomainError("markov_crossentropy: chains differ in S or L");
  }
  double h = 0.0;
  for (std::size_t i = 0; i < q.stationary.size(); ++i) {
    h -= q.stationary[i] * std::log(t.stationary[i]);
  }
  double rate = 0.0;
  for (int mu = 0; mu < q.states; ++mu) {
    for (int nu = 0; nu < q.states; ++nu) {
      rate -= q.w(nu, mu) * q.stationary[static_cast<std::size_t>(mu)] * std::log(t.w(nu, mu));
    }
  }
  return h + static_cast<double>(q.gram_length - 1) * rate;
}

std::int64_t lgram_index(std::span<const int> states, int state_count) {
  std::int64_t index = 0;
  std::int64_t scale = 1;
  for (int x : states) {
    if (x < 0 || x >= state_count) throw DomainError("lgram_index: state out of range");
    index += static_cast<std::int64_t>(x) * scale;
    scale *= state_count;
  }
  return index;
}

ProbabilityVector lgram_distribution(const MarkovChainSpec& spec) {
  const std::int64_t k = spec.categories();
  if (k > (std::int64_t{1} << 28)) throw DomainError("lgram_distribution: too many categories");
  ProbabilityVector out;
  out.p.resize(static_cast<std::size_t>(k));
  std::vector<int> gram(static_cast<std::size_t>(spec.gram_length));
  for (std::int64_t i = 0; i < k; ++i) {
    std::int64_t r = i;
    for (auto& x : gram) {
      x = static_cast<int>(r % spec.states);
      r /= spec.states;
    }
    double p = spec.stationary[static_cast<std::size_t>(gram[0])];
    for (std::size_t j = 1; j < gram.size(); ++j) p *= spec.w(gram[j], gram[j - 1]);
    out.p[static_cast<std::size_t>(i)] = p;
  }
  return out;
}

std::vector<std::int64_t> sample_lgrams(const MarkovChainSpec& spec, std::int64_t n, Rng& rng) {
  if (n < 0) throw DomainError("sample_lgrams: N must be >= 0");
  const std::int64_t k = spec.categories();
  std::vector<std::int64_t> counts(static_cast<std::size_t>(k), 0);
  std::discrete_distribution<int> first(spec.stationary.begin(), spec.stationary.end());
  std::vector<std::discrete_distribution<int>> step;
  step.reserve(static_cast<std::size_t>(spec.states));
  std::vector<double> col(static_cast<std::size_t>(spec.states));
  for (int mu = 0; mu < spec.states; ++mu) {
    for (int nu = 0; nu < spec.states; ++nu) col[static_cast<std::size_t>(nu)] = spec.w(nu, mu);
    step.emplace_back(col.begin(), col.end());
  }
  for (std::int64_t draw = 0; draw < n; ++draw) {
    int x = first(rng);
    std::int64_t index = x;
    std::int64_t scale = spec.states;
    for (int j = 1; j < spec.gram_length; ++j) {
      x = step[static_cast<std::size_t>(x)](rng);
      index += static_cast<std::int64_t>(x) * scale;
      scale *= spec.states;
    }
    ++counts[static_cast<std::size_t>(index)];
  }
  return counts;
}

std::vector<std::int64_t> sample_lgrams(const MarkovChainSpec& spec, std::int64_t n,
                                        std::uint64_t seed) {
  Rng rng(seed);
  return sample_lgrams(spec, n, rng);
}

std::vector<std::vector<std::int64_t>> nested_subsamples(std::span<const std::int64_t> parent,
                                                         std::span<const std::int64_t> ladder,
                                                         Rng& rng) {
  std::int64_t total = 0;
  for (auto c : parent) {
    if (c < 0) throw DomainError("nested_subsamples: negative parent count");
    total += c;
  }
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 0 || (i > 0 && ladder[i] <= ladder[i - 1])) {
      throw DomainError("nested_subsamples: ladder must be strictly increasing");
    }
  }
  if (!ladder.empty() && ladder.back() > total) {
    throw DomainError("nested_subsamples: ladder exceeds parent size");
  }
  Fenwick tree(parent);
  std::vector<std::int64_t> hist(parent.size(), 0);
  std::vector<std::vector<std::int64_t>> out;
  out.reserve(ladder.size());
  std::int64_t drawn = 0;
  for (std::int64_t target : ladder) {
    for (; drawn < target; ++drawn) {
      std::uniform_int_distribution<std::int64_t> pick(0, total - drawn - 1);
      const std::size_t cat = tree.find(pick(rng));
      tree.add(cat, -1);
      ++hist[cat];
    }
    out.push_back(hist);
  }
  return out;
}

}  // namespace catdiv::synth
