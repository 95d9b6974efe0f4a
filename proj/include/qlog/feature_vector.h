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

#ifndef QLOG_FEATURE_VECTOR_H_
#define QLOG_FEATURE_VECTOR_H_

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "qlog/registry.h"

namespace qlog {

// Sparse bag of feature ids. Entries are kept sorted by id and every stored
// multiplicity is at least 1.
class FeatureVector {
 public:
  struct Entry {
    FeatureId id;
    std::uint32_t count;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  FeatureVector() = default;

  // Builds the vector for a bag given as a flat list of ids (any order).
  static FeatureVector from_bag(std::vector<FeatureId> ids);
  // Entries must be sorted by id, unique, with count >= 1.
  static FeatureVector from_entries(std::vector<Entry> entries);

  std::uint32_t count(FeatureId id) const;
  bool contains(FeatureId id) const { return count(id) != 0; }
  std::size_t distinct() const { return entries_.size(); }
  std::uint64_t total() const;
  bool empty() const { return entries_.empty(); }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<FeatureId> keys() const;

  // Multiset union (multiplicities add).
  void merge(const FeatureVector& other);

  friend bool operator==(const FeatureVector&, const FeatureVector&) = default;

 private:
  std::vector<Entry> entries_;
};

}  // namespace qlog

#endif  // QLOG_FEATURE_VECTOR_H_
