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


// Agreement between two clusterings of the same skeletons.

#ifndef QLOG_METRICS_H_
#define QLOG_METRICS_H_

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qlog/cluster.h"

namespace qlog {

// position[item] = index of `item` in a dendrogram's leaf sequence.
struct LeafOrdering {
  std::vector<std::uint32_t> position;

  // `order[k]` is the item at position k; must be a permutation of 0..N-1.
  static LeafOrdering from_order(std::span<const std::uint32_t> order);
  static LeafOrdering from_dendrogram(const Dendrogram& dendrogram);

  std::size_t size() const { return position.size(); }
};

// L-p distance between the two position vectors divided by the L-p distance
// between the identity and its reversal: 0 for equal orderings, 1 for
// reversed ones. p >= 1. Throws PreconditionError on a size mismatch.
double entanglement(const LeafOrdering& a, const LeafOrdering& b, double p = 2.0);

// Aligns two dendrograms by leaf id before scoring. Both id lists must name
// the same items.
double entanglement(const Dendrogram& a, std::span<const std::string> a_ids, const Dendrogram& b,
                    std::span<const std::string> b_ids, double p = 2.0);

// Hubert-Arabie adjusted Rand index. Two partitions that are both all
// singletons or both one block score 1.
double adjusted_rand(std::span<const std::uint32_t> labels_a,
                     std::span<const std::uint32_t> labels_b);

}  // namespace qlog

#endif  // QLOG_METRICS_H_
