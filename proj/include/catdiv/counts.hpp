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

#ifndef CATDIV_COUNTS_HPP_
#define CATDIV_COUNTS_HPP_

#include <compare>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace catdiv {

enum class Sample { kFirst, kSecond };

// Counts (n, m) of one category in the two samples.
struct CountPair {
  std::int64_t n = 0;
  std::int64_t m = 0;

  auto operator<=>(const CountPair&) const = default;
};

// A count value shared by `multiplicity` categories of a single sample.
struct CountMultiplicity {
  std::int64_t count = 0;
  std::int64_t multiplicity = 0;
};

// Joint histogram of count pairs. Every one of the K categories is accounted
// for, including those unobserved in both samples, which are stored as an
// explicit (0, 0) entry. Immutable after construction.
class MultiplicityTable {
 public:
  struct Entry {
    CountPair pair;
    std::int64_t multiplicity = 0;
  };

  // counts1[i], counts2[i] are the counts of category i. Categories beyond
  // counts1.size() (up to K) are unobserved in both samples.
  static MultiplicityTable build(std::span<const std::int64_t> counts1,
                                 std::span<const std::int64_t> counts2,
                                 std::int64_t categories);

  // Single-sample table; the second sample is empty.
  static MultiplicityTable single(std::span<const std::int64_t> counts,
                                  std::int64_t categories);

  const std::vector<Entry>& entries() const { return entries_; }
  std::int64_t categories() const { return categories_; }
  std::int64_t total(Sample s) const { return s == Sample::kFirst ? total1_ : total2_; }
  std::int64_t total1() const { return total1_; }
  std::int64_t total2() const { return total2_; }

  // Number of categories with a non-zero count in the given sample.
  std::int64_t observed(Sample s) const;

  // Histogram of a single sample's counts, sorted by count, zeros included.
  const std::vector<CountMultiplicity>& marginal(Sample s) const {
    return s == Sample::kFirst ? marginal1_ : marginal2_;
  }

  // The same data with the roles of the two samples exchanged.
  MultiplicityTable swapped() const;

  // Uncompressed per-category counts in a canonical order.
  std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> expand() const;

 private:
  MultiplicityTable() = default;
  static MultiplicityTable from_map(const std::map<CountPair, std::int64_t>& groups,
                                    std::int64_t categories);

  std::vector<Entry> entries_;
  std::vector<CountMultiplicity> marginal1_;
  std::vector<CountMultiplicity> marginal2_;
  std::int64_t categories_ = 0;
  std::int64_t total1_ = 0;
  std::int64_t total2_ = 0;
};

// sum_i f(n_i, m_i) over all K categories.
template <typename F>
double sum_over_categories(const MultiplicityTable& table, F&& f) {
  double sum = 0.0;
  for (const auto& e : table.entries()) {
    sum += static_cast<double>(e.multiplicity) * f(e.pair);
  }
  return sum;
}

// sum_i f_diag(x_i) + sum_{i != j} f_off(x_i, x_j). Categories sharing a count
// pair still form i != j pairs among themselves, hence nu_x (nu_x' - [x == x']).
template <typename Diag, typename Off>
double double_sum_over_categories(const MultiplicityTable& table, Diag&& f_diag,
                                  Off&& f_off) {
  const auto& entries = table.entries();
  double diag = 0.0;
  double off = 0.0;
  for (std::size_t a = 0; a < entries.size(); ++a) {
    const auto nu_a = static_cast<double>(entries[a].multiplicity);
    diag += nu_a * f_diag(entries[a].pair);
    for (std::size_t b = 0; b < entries.size(); ++b) {
      const double nu_b = static_cast<double>(entries[b].multiplicity) - (a == b ? 1.0 : 0.0);
      if (nu_b == 0.0) continue;
      off += nu_a * nu_b * f_off(entries[a].pair, entries[b].pair);
    }
  }
  return diag + off;
}

// --- ingestion ---------------------------------------------------------------

// One "category_id<TAB>count" file. Lines starting with '#' are comments except
// a "#K=<integer>" header.
struct CountFile {
  std::map<std::string, std::int64_t> counts;
  std::optional<std::int64_t> categories;
};

CountFile parse_count_file(std::istream& in, const std::string& source_name = "<stream>");
CountFile read_count_file(const std::filesystem::path& path);

// Joins two count files on category id. K comes from `categories` if given,
// otherwise from the files' "#K=" headers.
MultiplicityTable table_from_count_files(const CountFile& first, const CountFile& second,
                                         std::optional<std::int64_t> categories);

// Two-column "n,m" CSV, one row per category; an optional non-numeric header
// row is skipped. K is the number of data rows.
MultiplicityTable parse_pair_csv(std::istream& in, const std::string& source_name = "<stream>");
MultiplicityTable read_pair_csv(const std::filesystem::path& path);

}  // namespace catdiv

#endif  // CATDIV_COUNTS_HPP_
