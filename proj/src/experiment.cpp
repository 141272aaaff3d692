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

#include "catdiv/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <exception>
#include <istream>
#include <limits>
#include <map>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

#include "catdiv/counts.hpp"
#include "catdiv/error.hpp"
#include "catdiv/estimators.hpp"
#include "catdiv/synth.hpp"

namespace catdiv::experiment {
namespace {

enum Stream : std::uint64_t {
  kTruthQ = 1,
  kTruthT = 2,
  kSampleN = 3,
  kSampleM = 4,
  kChainQ = 5,
  kChainT = 6,
};

const char* const kConvergenceHeader = "estimator,N,rep,estimate,true_value,posterior_std";
const char* const kNstarHeader = "alpha_true,beta_true,estimator,nstar_over_k";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw ParseError(key + ": not a number: '" + v + "'");
  }
  return out;
}

std::int64_t parse_integer(const std::string& key, const std::string& v) {
  const double d = parse_double(key, v);
  if (!std::isfinite(d) || d != std::floor(d) || std::abs(d) > 9.0e15) {
    throw ParseError(key + ": not an integer: '" + v + "'");
  }
  return static_cast<std::int64_t>(d);
}

std::uint64_t parse_seed(const std::string& key, const std::string& v) {
  std::uint64_t out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end || v.empty()) {
    throw ParseError(key + ": not an unsigned integer: '" + v + "'");
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw ParseError(key + ": not a boolean: '" + v + "'");
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Estimate {
  double value = 0.0;
  std::optional<double> std;
};

Estimate run_estimator(EstimatorId id, Divergence div, const MultiplicityTable& table) {
  const bool kl = div == Divergence::kKl;
  auto plugin = [&](PseudoCount pc) {
    return Estimate{kl ? estimate_dkl_plugin(table, pc) : estimate_hellinger_plugin(table, pc),
                    std::nullopt};
  };
  switch (id) {
    case EstimatorId::kDpm: {
      const auto r = kl ? estimate_dkl_dpm(table) : estimate_hellinger_dpm(table);
      return {r.value, r.posterior_std};
    }
    case EstimatorId::kDp:
      return {kl ? estimate_dkl_dp(table).value : estimate_hellinger_dp(table).value,
              std::nullopt};
    case EstimatorId::kNaive:
      return plugin(PseudoCount::kNaive);
    case EstimatorId::kJeffreys:
      return plugin(PseudoCount::kJeffreys);
    case EstimatorId::kTrybula:
      return plugin(PseudoCount::kTrybula);
    case EstimatorId::kPerks:
      return plugin(PseudoCount::kPerks);
    case EstimatorId::kZhang:
      return {estimate_dkl_zhang(table), std::nullopt};
  }
  throw DomainError("unknown estimator");
}

// Ground truth and samplers for one repetition.
struct Source {
  synth::ProbabilityVector q;
  synth::ProbabilityVector t;
  const synth::MarkovChainSpec* chain_q = nullptr;
  const synth::MarkovChainSpec* chain_t = nullptr;
  double truth = 0.0;

  std::vector<std::int64_t> draw(bool first, std::int64_t n, synth::Rng& rng) const {
    const auto* chain = first ? chain_q : chain_t;
    if (chain != nullptr) return synth::sample_lgrams(*chain, n, rng);
    return synth::sample_multinomial(first ? q : t, n, rng);
  }
};

template <typename F>
void parallel_for(std::size_t count, int threads, F&& body) {
  const auto workers = static_cast<std::size_t>(std::max(1, threads));
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (workers == 1 || count <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, count); ++w) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double sample_std(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

std::string to_string(Generator g) { return g == Generator::kDirichlet ? "dirichlet" : "markov"; }

std::string to_string(Divergence d) { return d == Divergence::kKl ? "kl" : "hellinger2"; }

std::string to_string(EstimatorId e) {
  switch (e) {
    case EstimatorId::kDpm: return "dpm";
    case EstimatorId::kDp: return "dp";
    case EstimatorId::kNaive: return "naive";
    case EstimatorId::kJeffreys: return "jeffreys";
    case EstimatorId::kTrybula: return "trybula";
    case EstimatorId::kPerks: return "perks";
    case EstimatorId::kZhang: return "zhang";
  }
  return "?";
}

Generator parse_generator(const std::string& s) {
  if (s == "dirichlet") return Generator::kDirichlet;
  if (s == "markov") return Generator::kMarkov;
  throw ParseError("unknown generator '" + s + "'");
}

Divergence parse_divergence(const std::string& s) {
  if (s == "kl") return Divergence::kKl;
  if (s == "hellinger2") return Divergence::kHellingerSq;
  throw ParseError("unknown divergence '" + s + "'");
}

EstimatorId parse_estimator(const std::string& s) {
  for (auto e : {EstimatorId::kDpm, EstimatorId::kDp, EstimatorId::kNaive, EstimatorId::kJeffreys,
                 EstimatorId::kTrybula, EstimatorId::kPerks, EstimatorId::kZhang}) {
    if (to_string(e) == s) return e;
  }
  throw ParseError("unknown estimator '" + s + "'");
}

std::int64_t ExperimentConfig::effective_categories() const {
  if (generator == Generator::kDirichlet) return categories;
  std::int64_t k = 1;
  for (int i = 0; i < gram_length; ++i) {
    if (k > (std::int64_t{1} << 40) / std::max(1, states)) {
      throw ParseError("states^gram_length is too large");
    }
    k *= states;
  }
  return k;
}

void ExperimentConfig::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (generator == Generator::kDirichlet) {
    if (categories < 2) throw ParseError("k must be >= 2");
    if (!positive(alpha_true) || !positive(beta_true)) {
      throw ParseError("alpha and beta must be finite and > 0");
    }
    for (double v : alpha_grid) {
      if (!positive(v)) throw ParseError("alpha_grid entries must be finite and > 0");
    }
    for (double v : beta_grid) {
      if (!positive(v)) throw ParseError("beta_grid entries must be finite and > 0");
    }
  } else {
    if (states < 2) throw ParseError("states must be >= 2");
    if (gram_length < 1) throw ParseError("gram_length must be >= 1");
    if (effective_categories() > (std::int64_t{1} << 28)) {
      throw ParseError("states^gram_length is too large");
    }
  }
  if (ladder.empty()) throw ParseError("ladder must not be empty");
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (ladder[i] < 1) throw ParseError("ladder sizes must be >= 1");
    if (i > 0 && ladder[i] <= ladder[i - 1]) {
      throw ParseError("ladder must be strictly increasing");
    }
  }
  if (repetitions < 1) throw ParseError("reps must be >= 1");
  if (threads < 1) throw ParseError("threads must be >= 1");
  if (estimators.empty()) throw ParseError("estimators must not be empty");
  for (std::size_t i = 0; i < estimators.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (estimators[i] == estimators[j]) throw ParseError("duplicate estimator");
    }
    if (estimators[i] == EstimatorId::kZhang && divergence != Divergence::kKl) {
      throw ParseError("zhang estimates only the kl divergence");
    }
  }
  if (nested_subsample && parent_size != 0 && parent_size < ladder.back()) {
    throw ParseError("parent_size must be >= the largest ladder size");
  }
  if (parent_size < 0) throw ParseError("parent_size must be >= 0");
}

void apply_setting(ExperimentConfig& c, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  auto doubles = [&] {
    std::vector<double> out;
    for (const auto& s : split(value, ',')) out.push_back(parse_double(key, s));
    return out;
  };
  if (key == "generator") {
    c.generator = parse_generator(value);
  } else if (key == "k") {
    c.categories = parse_integer(key, value);
  } else if (key == "alpha") {
    c.alpha_true = parse_double(key, value);
  } else if (key == "beta") {
    c.beta_true = parse_double(key, value);
  } else if (key == "alpha_grid") {
    c.alpha_grid = doubles();
  } else if (key == "beta_grid") {
    c.beta_grid = doubles();
  } else if (key == "states") {
    c.states = static_cast<int>(parse_integer(key, value));
  } else if (key == "gram_length") {
    c.gram_length = static_cast<int>(parse_integer(key, value));
  } else if (key == "ladder") {
    c.ladder.clear();
    for (const auto& s : split(value, ',')) c.ladder.push_back(parse_integer(key, s));
  } else if (key == "reps") {
    c.repetitions = static_cast<int>(parse_integer(key, value));
  } else if (key == "estimators") {
    c.estimators.clear();
    for (const auto& s : split(value, ',')) c.estimators.push_back(parse_estimator(s));
  } else if (key == "divergence") {
    c.divergence = parse_divergence(value);
  } else if (key == "seed") {
    c.master_seed = parse_seed(key, value);
  } else if (key == "nested_subsample") {
    c.nested_subsample = parse_bool(key, value);
  } else if (key == "parent_size") {
    c.parent_size = parse_integer(key, value);
  } else if (key == "threads") {
    c.threads = static_cast<int>(parse_integer(key, value));
  } else {
    throw ParseError("unknown setting '" + key + "'");
  }
}

void load_config(ExperimentConfig& config, std::istream& in, const std::string& source_name) {
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParseError(source_name + ":" + std::to_string(lineno) + ": expected key=value");
    }
    try {
      apply_setting(config, line.substr(0, eq), line.substr(eq + 1));
    } catch (const ParseError& e) {
      throw ParseError(source_name + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::vector<ConvergenceRow> run_convergence(const ExperimentConfig& config) {
  config.validate();
  const std::int64_t k = config.effective_categories();
  const bool markov = config.generator == Generator::kMarkov;
  const bool kl = config.divergence == Divergence::kKl;
  const auto ladder_size = config.ladder.size();
  const std::uint64_t master = config.master_seed;

  // One chain pair per master seed; repetitions resample from it.
  synth::MarkovChainSpec chain_q;
  synth::MarkovChainSpec chain_t;
  double markov_truth = 0.0;
  if (markov) {
    chain_q = synth::build_markov_spec(config.states, config.gram_length,
                                       synth::derive_seed(master, kChainQ, 0));
    chain_t = synth::build_markov_spec(config.states, config.gram_length,
                                       synth::derive_seed(master, kChainT, 0));
    if (kl) {
      markov_truth = synth::markov_crossentropy(chain_q, chain_t) - synth::markov_entropy(chain_q);
    } else {
      markov_truth = synth::exact_hellinger_sq(synth::lgram_distribution(chain_q),
                                               synth::lgram_distribution(chain_t));
    }
  }

  auto make_source = [&](int rep) {
    Source s;
    if (markov) {
      s.chain_q = &chain_q;
      s.chain_t = &chain_t;
      s.truth = markov_truth;
      return s;
    }
    const auto r = static_cast<std::uint64_t>(rep);
    s.q = synth::sample_dirichlet(k, config.alpha_true, synth::derive_seed(master, kTruthQ, r));
    s.t = synth::sample_dirichlet(k, config.beta_true, synth::derive_seed(master, kTruthT, r));
    s.truth = kl ? synth::exact_dkl(s.q, s.t) : synth::exact_hellinger_sq(s.q, s.t);
    return s;
  };

  auto estimate_all = [&](const std::vector<std::int64_t>& n, const std::vector<std::int64_t>& m,
                          std::int64_t size, int rep, double truth,
                          std::vector<ConvergenceRow>& out) {
    const auto table = MultiplicityTable::build(n, m, k);
    for (auto id : config.estimators) {
      ConvergenceRow row;
      row.estimator = id;
      row.n = size;
      row.rep = rep;
      row.true_value = truth;
      try {
        const auto e = run_estimator(id, config.divergence, table);
        row.estimate = e.value;
        row.posterior_std = e.std;
      } catch (const DomainError&) {
        row.estimate = std::numeric_limits<double>::quiet_NaN();
      }
      out.push_back(row);
    }
  };

  // Fresh draws: one task per (rep, ladder size). Nested draws: one task per rep.
  const std::size_t tasks = config.nested_subsample
                                ? static_cast<std::size_t>(config.repetitions)
                                : static_cast<std::size_t>(config.repetitions) * ladder_size;
  std::vector<std::vector<ConvergenceRow>> results(tasks);
  parallel_for(tasks, config.threads, [&](std::size_t task) {
    const int rep = static_cast<int>(config.nested_subsample ? task : task / ladder_size);
    const auto r = static_cast<std::uint64_t>(rep);
    const Source src = make_source(rep);
    if (config.nested_subsample) {
      const std::int64_t parent =
          config.parent_size > 0 ? config.parent_size : 10 * config.ladder.back();
      synth::Rng rng_n(synth::derive_seed(master, kSampleN, r));
      synth::Rng rng_m(synth::derive_seed(master, kSampleM, r));
      const auto parent_n = src.draw(true, parent, rng_n);
      const auto parent_m = src.draw(false, parent, rng_m);
      const auto subs_n = synth::nested_subsamples(parent_n, config.ladder, rng_n);
      const auto subs_m = synth::nested_subsamples(parent_m, config.ladder, rng_m);
      for (std::size_t i = 0; i < ladder_size; ++i) {
        estimate_all(subs_n[i], subs_m[i], config.ladder[i], rep, src.truth, results[task]);
      }
      return;
    }
    const std::size_t idx = task % ladder_size;
    const std::int64_t size = config.ladder[idx];
    synth::Rng rng_n(synth::derive_seed(synth::derive_seed(master, kSampleN, r), 0, idx));
    synth::Rng rng_m(synth::derive_seed(synth::derive_seed(master, kSampleM, r), 0, idx));
    const auto n = src.draw(true, size, rng_n);
    const auto m = src.draw(false, size, rng_m);
    estimate_all(n, m, size, rep, src.truth, results[task]);
  });

  std::vector<ConvergenceRow> rows;
  for (auto& chunk : results) rows.insert(rows.end(), chunk.begin(), chunk.end());
  auto rank = [&](EstimatorId id) {
    return std::find(config.estimators.begin(), config.estimators.end(), id) -
           config.estimators.begin();
  };
  std::stable_sort(rows.begin(), rows.end(), [&](const ConvergenceRow& a, const ConvergenceRow& b) {
    if (a.estimator != b.estimator) return rank(a.estimator) < rank(b.estimator);
    if (a.n != b.n) return a.n < b.n;
    return a.rep < b.rep;
  });
  return rows;
}

void write_convergence_csv(std::ostream& out, const std::vector<ConvergenceRow>& rows) {
  out << kConvergenceHeader << '\n';
  for (const auto& r : rows) {
    out << to_string(r.estimator) << ',' << r.n << ',' << r.rep << ',' << format_double(r.estimate)
        << ',' << format_double(r.true_value) << ',';
    if (r.posterior_std) out << format_double(*r.posterior_std);
    out << '\n';
  }
}

std::vector<ConvergenceRow> parse_convergence_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || trim(line) != kConvergenceHeader) {
    throw ParseError("convergence csv: missing or unexpected header");
  }
  std::vector<ConvergenceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto f = split(trim(line), ',');
    if (f.size() != 6) {
      throw ParseError("convergence csv:" + std::to_string(lineno) + ": expected 6 fields");
    }
    ConvergenceRow r;
    r.estimator = parse_estimator(f[0]);
    r.n = parse_integer("N", f[1]);
    r.rep = static_cast<int>(parse_integer("rep", f[2]));
    r.estimate = f[3] == "nan" ? std::numeric_limits<double>::quiet_NaN()
                               : parse_double("estimate", f[3]);
    r.true_value = parse_double("true_value", f[4]);
    if (!f[5].empty()) r.posterior_std = parse_double("posterior_std", f[5]);
    rows.push_back(r);
  }
  return rows;
}

std::vector<CurvePoint> summarize(const std::vector<ConvergenceRow>& rows, Generator generator) {
  std::vector<std::pair<EstimatorId, std::int64_t>> order;
  std::map<std::pair<EstimatorId, std::int64_t>, std::vector<const ConvergenceRow*>> groups;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.estimator, r.n);
    auto& g = groups[key];
    if (g.empty()) order.push_back(key);
    g.push_back(&r);
  }
  std::vector<CurvePoint> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    std::vector<double> est;
    std::vector<double> truth;
    std::vector<double> stds;
    for (const auto* r : g) {
      const double v =
          generator == Generator::kMarkov ? r->estimate / r->true_value : r->estimate;
      est.push_back(v);
      truth.push_back(generator == Generator::kMarkov ? 1.0 : r->true_value);
      if (r->posterior_std) {
        stds.push_back(generator == Generator::kMarkov ? *r->posterior_std / r->true_value
                                                       : *r->posterior_std);
      }
    }
    CurvePoint p;
    p.estimator = key.first;
    p.n = key.second;
    p.repetitions = static_cast<int>(g.size());
    p.mean_estimate = mean(est);
    p.mean_true = mean(truth);
    p.relative_error = std::abs(p.mean_estimate - p.mean_true) / std::abs(p.mean_true);
    p.spread = sample_std(est);
    p.mean_posterior_std = stds.empty() ? 0.0 : mean(stds);
    out.push_back(p);
  }
  return out;
}

std::optional<std::int64_t> first_stable_entry(const std::vector<CurvePoint>& curve,
                                               double tolerance) {
  std::optional<std::int64_t> entry;
  for (auto it = curve.rbegin(); it != curve.rend(); ++it) {
    if (!(it->relative_error < tolerance)) break;
    entry = it->n;
  }
  return entry;
}

std::vector<NstarRow> run_nstar(const ExperimentConfig& config) {
  config.validate();
  const std::vector<double> alphas =
      config.alpha_grid.empty() ? std::vector<double>{config.alpha_true} : config.alpha_grid;
  const std::vector<double> betas =
      config.beta_grid.empty() ? std::vector<double>{config.beta_true} : config.beta_grid;
  const auto k = static_cast<double>(config.effective_categories());
  std::vector<NstarRow> out;
  for (double a : alphas) {
    for (double b : betas) {
      ExperimentConfig c = config;
      c.alpha_true = a;
      c.beta_true = b;
      const auto curve = summarize(run_convergence(c), c.generator);
      for (auto id : c.estimators) {
        std::vector<CurvePoint> mine;
        for (const auto& p : curve) {
          if (p.estimator == id) mine.push_back(p);
        }
        NstarRow row{a, b, id, std::nullopt};
        if (const auto n = first_stable_entry(mine)) row.nstar_over_k = static_cast<double>(*n) / k;
        out.push_back(row);
      }
    }
  }
  return out;
}

void write_nstar_csv(std::ostream& out, const std::vector<NstarRow>& rows) {
  out << kNstarHeader << '\n';
  for (const auto& r : rows) {
    out << format_double(r.alpha_true) << ',' << format_double(r.beta_true) << ','
        << to_string(r.estimator) << ',';
    if (r.nstar_over_k) out << format_double(*r.nstar_over_k);
    out << '\n';
  }
}

}  // namespace catdiv::experiment
