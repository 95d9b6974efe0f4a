// Copyright 2026 The qlog Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.


#include "qlog/metrics.h"

#include <cmath>
#include <map>
#include <unordered_map>

#include "qlog/errors.h"

namespace qlog {
namespace {

double choose2(double n) { return n * (n - 1) / 2.0; }

}  // namespace

LeafOrdering LeafOrdering::from_order(std::span<const std::uint32_t> order) {
  LeafOrdering o;
  o.position.assign(order.size(), UINT32_MAX);
  for (std::uint32_t k = 0; k < order.size(); ++k) {
    std::uint32_t item = order[k];
    if (item >= order.size() || o.position[item] != UINT32_MAX) {
      throw PreconditionError("leaf order is not a permutation");
    }
    o.position[item] = k;
  }
  return o;
}

LeafOrdering LeafOrdering::from_dendrogram(const Dendrogram& dendrogram) {
  return from_order(dendrogram.leaf_order());
}

double entanglement(const LeafOrdering& a, const LeafOrdering& b, double p) {
  if (a.size() != b.size()) throw PreconditionError("entanglement: orderings differ in size");
  if (!(p >= 1.0)) throw PreconditionError("entanglement: p must be >= 1");
  const std::size_t n = a.size();
  if (n < 2) return 0.0;
  double num = 0.0;
  double den = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    num += std::pow(std::fabs(double(a.position[i]) - double(b.position[i])), p);
    den += std::pow(std::fabs(double(i) - double(n - 1 - i)), p);
  }
  // The reversal maximizes the distance, so the ratio stays within [0, 1].
  return std::min(1.0, std::pow(num, 1.0 / p) / std::pow(den, 1.0 / p));
}

double entanglement(const Dendrogram& a, std::span<const std::string> a_ids, const Dendrogram& b,
                    std::span<const std::string> b_ids, double p) {
  if (a_ids.size() != a.leaves || b_ids.size() != b.leaves || a.leaves != b.leaves) {
    throw PreconditionError("entanglement: leaf sets differ");
  }
  std::unordered_map<std::string, std::uint32_t> index;
  for (std::uint32_t i = 0; i < a_ids.size(); ++i) index.emplace(a_ids[i], i);
  if (index.size() != a_ids.size()) throw PreconditionError("entanglement: duplicate leaf ids");
  LeafOrdering oa = LeafOrdering::from_dendrogram(a);
  LeafOrdering ob_local = LeafOrdering::from_dendrogram(b);
  LeafOrdering ob;
  ob.position.assign(a.leaves, 0);
  std::vector<char> hit(a.leaves, 0);
  for (std::uint32_t j = 0; j < b_ids.size(); ++j) {
    auto it = index.find(b_ids[j]);
    if (it == index.end() || hit[it->second]) {
      throw PreconditionError("entanglement: leaf sets differ");
    }
    hit[it->second] = 1;
    ob.position[it->second] = ob_local.position[j];
  }
  return entanglement(oa, ob, p);
}

double adjusted_rand(std::span<const std::uint32_t> labels_a,
                     std::span<const std::uint32_t> labels_b) {
  if (labels_a.size() != labels_b.size()) {
    throw PreconditionError("adjusted_rand: label vectors differ in length");
  }
  const double n = static_cast<double>(labels_a.size());
  std::map<std::pair<std::uint32_t, std::uint32_t>, double> cells;
  std::map<std::uint32_t, double> rows;
  std::map<std::uint32_t, double> cols;
  for (std::size_t i = 0; i < labels_a.size(); ++i) {
    cells[{labels_a[i], labels_b[i]}] += 1;
    rows[labels_a[i]] += 1;
    cols[labels_b[i]] += 1;
  }
  double index = 0.0;
  for (const auto& [_, c] : cells) index += choose2(c);
  double sum_a = 0.0;
  for (const auto& [_, c] : rows) sum_a += choose2(c);
  double sum_b = 0.0;
  for (const auto& [_, c] : cols) sum_b += choose2(c);
  double total = choose2(n);
  double expected = total > 0 ? sum_a * sum_b / total : 0.0;
  double max_index = (sum_a + sum_b) / 2.0;
  if (max_index == expected) return 1.0;  // both trivial partitions
  return (index - expected) / (max_index - expected);
}

}  // namespace qlog
