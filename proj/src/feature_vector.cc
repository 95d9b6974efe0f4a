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

#include "qlog/feature_vector.h"

#include <algorithm>

#include "qlog/errors.h"

namespace qlog {

FeatureVector FeatureVector::from_bag(std::vector<FeatureId> ids) {
  std::sort(ids.begin(), ids.end());
  FeatureVector v;
  for (FeatureId id : ids) {
    if (!v.entries_.empty() && v.entries_.back().id == id) {
      ++v.entries_.back().count;
    } else {
      v.entries_.push_back({id, 1});
    }
  }
  return v;
}

FeatureVector FeatureVector::from_entries(std::vector<Entry> entries) {
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].count == 0 || (i > 0 && entries[i - 1].id >= entries[i].id)) {
      throw PreconditionError("feature vector entries must be sorted, unique and positive");
    }
  }
  FeatureVector v;
  v.entries_ = std::move(entries);
  return v;
}

std::uint32_t FeatureVector::count(FeatureId id) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), id,
                             [](const Entry& e, FeatureId x) { return e.id < x; });
  return it != entries_.end() && it->id == id ? it->count : 0;
}

std::uint64_t FeatureVector::total() const {
  std::uint64_t t = 0;
  for (const Entry& e : entries_) t += e.count;
  return t;
}

std::vector<FeatureId> FeatureVector::keys() const {
  std::vector<FeatureId> out;
  out.reserve(entries_.size());
  for (const Entry& e : entries_) out.push_back(e.id);
  return out;
}

void FeatureVector::merge(const FeatureVector& other) {
  std::vector<Entry> out;
  out.reserve(entries_.size() + other.entries_.size());
  auto a = entries_.begin();
  auto b = other.entries_.begin();
  while (a != entries_.end() || b != other.entries_.end()) {
    if (b == other.entries_.end() || (a != entries_.end() && a->id < b->id)) {
      out.push_back(*a++);
    } else if (a == entries_.end() || b->id < a->id) {
      out.push_back(*b++);
    } else {
      out.push_back({a->id, a->count + b->count});
      ++a;
      ++b;
    }
  }
  entries_ = std::move(out);
}

}  // namespace qlog
