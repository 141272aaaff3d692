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

#include <random>
#include <sstream>
#include <vector>

#include "catdiv/counts.hpp"
#include "catdiv/error.hpp"
#include "doctest.h"

using catdiv::MultiplicityTable;
using catdiv::Sample;

namespace {

struct Instance {
  std::vector<std::int64_t> n;
  std::vector<std::int64_t> m;
  std::int64_t k;
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> kdist(2, 12);
  std::uniform_int_distribution<int> cdist(0, 4);
  Instance in;
  in.k = kdist(rng);
  std::uniform_int_distribution<std::int64_t> len(0, in.k);
  const auto l = len(rng);
  for (std::int64_t i = 0; i < l; ++i) {
    in.n.push_back(cdist(rng));
    in.m.push_back(cdist(rng));
  }
  return in;
}

}  // namespace

TEST_CASE("table accounts for every category") {
  const std::vector<std::int64_t> n = {3, 0, 1, 1, 0};
  const std::vector<std::int64_t> m = {0, 0, 2, 2, 5};
  const auto t = MultiplicityTable::build(n, m, 8);
  CHECK(t.categories() == 8);
  CHECK(t.total1() == 5);
  CHECK(t.total2() == 9);
  CHECK(t.observed(Sample::kFirst) == 3);
  CHECK(t.observed(Sample::kSecond) == 3);
  std::int64_t k = 0;
  for (const auto& e : t.entries()) k += e.multiplicity;
  CHECK(k == 8);
  // (0,0): one listed and three implicit categories.
  CHECK(t.entries().front().pair == catdiv::CountPair{0, 0});
  CHECK(t.entries().front().multiplicity == 4);
  for (std::size_t i = 1; i < t.entries().size(); ++i) {
    CHECK(t.entries()[i - 1].pair < t.entries()[i].pair);
  }
}

TEST_CASE("marginals, swap and expand") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto in = random_instance(rng);
    const auto t = MultiplicityTable::build(in.n, in.m, in.k);
    const auto s = t.swapped();
    CHECK(s.total1() == t.total2());
    CHECK(s.total2() == t.total1());
    CHECK(s.swapped().entries().size() == t.entries().size());

    std::int64_t marg = 0;
    for (const auto& c : t.marginal(Sample::kFirst)) marg += c.count * c.multiplicity;
    CHECK(marg == t.total1());

    const auto [n2, m2] = t.expand();
    CHECK(static_cast<std::int64_t>(n2.size()) == in.k);
    const auto again = MultiplicityTable::build(n2, m2, in.k);
    REQUIRE(again.entries().size() == t.entries().size());
    for (std::size_t i = 0; i < t.entries().size(); ++i) {
      CHECK(again.entries()[i].pair == t.entries()[i].pair);
      CHECK(again.entries()[i].multiplicity == t.entries()[i].multiplicity);
    }
  }
}

TEST_CASE("compressed sums equal per-category loops") {
  std::mt19937_64 rng(17);
  for (int rep = 0; rep < 50; ++rep) {
    const auto in = random_instance(rng);
    const auto t = MultiplicityTable::build(in.n, in.m, in.k);
    const auto [n, m] = t.expand();
    auto f = [](const catdiv::CountPair& p) { return 1.0 + 0.3 * p.n - 0.7 * p.m * p.m; };
    auto g = [](const catdiv::CountPair& a, const catdiv::CountPair& b) {
      return (a.n + 1.5) * (b.m + 0.25) - a.m * b.n;
    };
    double single = 0.0;
    double pairs = 0.0;
    for (std::size_t i = 0; i < n.size(); ++i) {
      single += f({n[i], m[i]});
      pairs += f({n[i], m[i]});
      for (std::size_t j = 0; j < n.size(); ++j) {
        if (i != j) pairs += g({n[i], m[i]}, {n[j], m[j]});
      }
    }
    CHECK(catdiv::sum_over_categories(t, f) == doctest::Approx(single).epsilon(1e-12));
    CHECK(catdiv::double_sum_over_categories(t, f, g) == doctest::Approx(pairs).epsilon(1e-12));
  }
}

TEST_CASE("shape and domain errors") {
  const std::vector<std::int64_t> a = {1, 2};
  const std::vector<std::int64_t> b = {1};
  const std::vector<std::int64_t> neg = {1, -1};
  CHECK_THROWS_AS(MultiplicityTable::build(a, b, 5), catdiv::ShapeError);
  CHECK_THROWS_AS(MultiplicityTable::build(a, a, 1), catdiv::ShapeError);
  CHECK_THROWS_AS(MultiplicityTable::build(a, neg, 5), catdiv::DomainError);
}

TEST_CASE("single-sample table") {
  const std::vector<std::int64_t> n = {2, 1, 0};
  const auto t = MultiplicityTable::single(n, 4);
  CHECK(t.total1() == 3);
  CHECK(t.total2() == 0);
  CHECK(t.observed(Sample::kFirst) == 2);
}

TEST_CASE("count files join on category id") {
  std::istringstream f1("# sample one\n#K=10\napple\t3\npear\t1\n\nfig\t0\n");
  std::istringstream f2("#K=10\npear\t2\nplum\t4\n");
  const auto c1 = catdiv::parse_count_file(f1);
  const auto c2 = catdiv::parse_count_file(f2);
  CHECK(c1.categories == 10);
  CHECK(c1.counts.at("apple") == 3);
  const auto t = catdiv::table_from_count_files(c1, c2, std::nullopt);
  CHECK(t.categories() == 10);
  CHECK(t.total1() == 4);
  CHECK(t.total2() == 6);
  // apple (3,0), fig (0,0), pear (1,2), plum (0,4), six unseen.
  CHECK(t.entries().front().multiplicity == 7);

  const auto k12 = catdiv::table_from_count_files(c1, c2, 12);
  CHECK(k12.categories() == 12);
  CHECK_THROWS_AS(catdiv::table_from_count_files(c1, c2, 3), catdiv::ShapeError);
}

TEST_CASE("count file errors") {
  auto parse = [](const std::string& s) {
    std::istringstream in(s);
    return catdiv::parse_count_file(in);
  };
  CHECK_THROWS_AS(parse("a 3\n"), catdiv::ParseError);
  CHECK_THROWS_AS(parse("a\tx\n"), catdiv::ParseError);
  CHECK_THROWS_AS(parse("a\t-2\n"), catdiv::ParseError);
  CHECK_THROWS_AS(parse("a\t1\na\t2\n"), catdiv::ParseError);
  CHECK_THROWS_AS(parse("#K=0\n"), catdiv::ParseError);
  const auto no_k = parse("a\t1\n");
  CHECK_THROWS_AS(catdiv::table_from_count_files(no_k, no_k, std::nullopt), catdiv::ParseError);
  const auto k3 = parse("#K=3\na\t1\n");
  const auto k4 = parse("#K=4\na\t1\n");
  CHECK_THROWS_AS(catdiv::table_from_count_files(k3, k4, std::nullopt), catdiv::ParseError);
  CHECK_THROWS_AS(catdiv::read_count_file("/nonexistent/file.tsv"), catdiv::ParseError);
}

TEST_CASE("pair csv") {
  std::istringstream with_header("n,m\n2,1\n1,0\n0,0\n");
  const auto t = catdiv::parse_pair_csv(with_header);
  CHECK(t.categories() == 3);
  CHECK(t.total1() == 3);
  CHECK(t.total2() == 1);
  std::istringstream bare("4,4\n0,1\n");
  CHECK(catdiv::parse_pair_csv(bare).categories() == 2);
  std::istringstream bad("1;2\n");
  CHECK_THROWS_AS(catdiv::parse_pair_csv(bad), catdiv::ParseError);
  std::istringstream empty("n,m\n");
  CHECK_THROWS_AS(catdiv::parse_pair_csv(empty), catdiv::ParseError);
}
