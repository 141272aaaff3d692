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

#include "catdiv/counts.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

#include "catdiv/error.hpp"

namespace catdiv {
namespace {

std::vector<CountMultiplicity> marginal_of(const std::map<CountPair, std::int64_t>& groups,
                                           bool first) {
  std::map<std::int64_t, std::int64_t> by_count;
  for (const auto& [pair, nu] : groups) by_count[first ? pair.n : pair.m] += nu;
  std::vector<CountMultiplicity> out;
  out.reserve(by_count.size());
  for (const auto& [count, nu] : by_count) out.push_back({count, nu});
  return out;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool parse_int(std::string_view text, std::int64_t& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const char* first = t.data();
  const char* last = t.data() + t.size();
  if (*first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, out);
  return ec == std::errc() && ptr == last;
}

std::int64_t parse_count(std::string_view text, const std::string& where) {
  std::int64_t v = 0;
  if (!parse_int(text, v)) throw ParseError(where + ": expected an integer count, got '" + std::string(text) + "'");
  if (v < 0) throw ParseError(where + ": negative count " + std::to_string(v));
  return v;
}

}  // namespace

MultiplicityTable MultiplicityTable::build(std::span<const std::int64_t> counts1,
                                           std::span<const std::int64_t> counts2,
                                           std::int64_t categories) {
  if (counts1.size() != counts2.size()) {
    throw ShapeError("build_table: count vectors have different lengths (" +
                     std::to_string(counts1.size()) + " vs " + std::to_string(counts2.size()) + ")");
  }
  if (categories < 1) throw ShapeError("build_table: K must be >= 1");
  if (static_cast<std::int64_t>(counts1.size()) > categories) {
    throw ShapeError("build_table: " + std::to_string(counts1.size()) +
                     " categories given but K = " + std::to_string(categories));
  }
  std::map<CountPair, std::int64_t> groups;
  for (std::size_t i = 0; i < counts1.size(); ++i) {
    if (counts1[i] < 0 || counts2[i] < 0) {
      throw DomainError("build_table: negative count at category " + std::to_string(i));
    }
    ++groups[CountPair{counts1[i], counts2[i]}];
  }
  const auto unseen = categories - static_cast<std::int64_t>(counts1.size());
  if (unseen > 0) groups[CountPair{0, 0}] += unseen;
  return from_map(groups, categories);
}

MultiplicityTable MultiplicityTable::single(std::span<const std::int64_t> counts,
                                            std::int64_t categories) {
  const std::vector<std::int64_t> zeros(counts.size(), 0);
  return build(counts, zeros, categories);
}

MultiplicityTable MultiplicityTable::from_map(const std::map<CountPair, std::int64_t>& groups,
                                              std::int64_t categories) {
  MultiplicityTable t;
  t.categories_ = categories;
  t.entries_.reserve(groups.size());
  for (const auto& [pair, nu] : groups) {
    t.entries_.push_back({pair, nu});
    t.total1_ += nu * pair.n;
    t.total2_ += nu * pair.m;
  }
  t.marginal1_ = marginal_of(groups, true);
  t.marginal2_ = marginal_of(groups, false);
  return t;
}

std::int64_t MultiplicityTable::observed(Sample s) const {
  std::int64_t k = 0;
  for (const auto& c : marginal(s)) {
    if (c.count > 0) k += c.multiplicity;
  }
  return k;
}

MultiplicityTable MultiplicityTable::swapped() const {
  std::map<CountPair, std::int64_t> groups;
  for (const auto& e : entries_) groups[CountPair{e.pair.m, e.pair.n}] = e.multiplicity;
  return from_map(groups, categories_);
}

std::pair<std::vector<std::int64_t>, std::vector<std::int64_t>> MultiplicityTable::expand() const {
  std::vector<std::int64_t> n;
  std::vector<std::int64_t> m;
  n.reserve(static_cast<std::size_t>(categories_));
  m.reserve(static_cast<std::size_t>(categories_));
  for (const auto& e : entries_) {
    for (std::int64_t r = 0; r < e.multiplicity; ++r) {
      n.push_back(e.pair.n);
      m.push_back(e.pair.m);
    }
  }
  return {std::move(n), std::move(m)};
}

CountFile parse_count_file(std::istream& in, const std::string& source_name) {
  CountFile out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source_name + ":" + std::to_string(lineno);
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '#') {
      if (t.rfind("#K=", 0) == 0) {
        std::int64_t k = 0;
        if (!parse_int(std::string_view(t).substr(3), k) || k < 1) {
          throw ParseError(where + ": malformed K header '" + t + "'");
        }
        if (out.categories && *out.categories != k) throw ParseError(where + ": conflicting K headers");
        out.categories = k;
      }
      continue;
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(where + ": expected 'category_id<TAB>count'");
    std::string id = trim(std::string_view(line).substr(0, tab));
    if (id.empty()) throw ParseError(where + ": empty category id");
    const std::int64_t count = parse_count(std::string_view(line).substr(tab + 1), where);
    if (!out.counts.emplace(std::move(id), count).second) {
      throw ParseError(where + ": duplicate category id");
    }
  }
  return out;
}

CountFile read_count_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open count file " + path.string());
  return parse_count_file(in, path.string());
}

MultiplicityTable table_from_count_files(const CountFile& first, const CountFile& second,
                                         std::optional<std::int64_t> categories) {
  std::optional<std::int64_t> k = categories;
  if (!k) {
    if (first.categories && second.categories && *first.categories != *second.categories) {
      throw ParseError("count files declare different K (" + std::to_string(*first.categories) +
                       " vs " + std::to_string(*second.categories) + ")");
    }
    k = first.categories ? first.categories : second.categories;
  }
  if (!k) throw ParseError("number of categories K is required (--k or a #K= header)");

  std::map<std::string, CountPair> joined;
  for (const auto& [id, c] : first.counts) joined[id].n = c;
  for (const auto& [id, c] : second.counts) joined[id].m = c;
  if (static_cast<std::int64_t>(joined.size()) > *k) {
    throw ShapeError(std::to_string(joined.size()) + " distinct categories in the files exceed K = " +
                     std::to_string(*k));
  }
  std::vector<std::int64_t> n;
  std::vector<std::int64_t> m;
  n.reserve(joined.size());
  m.reserve(joined.size());
  for (const auto& [id, p] : joined) {
    n.push_back(p.n);
    m.push_back(p.m);
  }
  return MultiplicityTable::build(n, m, *k);
}

MultiplicityTable parse_pair_csv(std::istream& in, const std::string& source_name) {
  std::vector<std::int64_t> n;
  std::vector<std::int64_t> m;
  std::string line;
  std::size_t lineno = 0;
  bool seen_data = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = source_name + ":" + std::to_string(lineno);
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto comma = t.find(',');
    if (comma == std::string::npos) throw ParseError(where + ": expected 'n,m'");
    const std::string_view left = std::string_view(t).substr(0, comma);
    const std::string_view right = std::string_view(t).substr(comma + 1);
    std::int64_t probe = 0;
    if (!seen_data && !parse_int(left, probe)) continue;  // header row
    seen_data = true;
    n.push_back(parse_count(left, where));
    m.push_back(parse_count(right, where));
  }
  if (n.empty()) throw ParseError(source_name + ": no data rows");
  return MultiplicityTable::build(n, m, static_cast<std::int64_t>(n.size()));
}

MultiplicityTable read_pair_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open CSV file " + path.string());
  return parse_pair_csv(in, path.string());
}

}  // namespace catdiv
