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

#ifndef QLOG_REGISTRY_H_
#define QLOG_REGISTRY_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace qlog {

using FeatureId = std::uint32_t;

enum class DigestKind : std::uint8_t { kList, kBag, kSet, kAtom };

std::string_view digest_kind_name(DigestKind kind);

// Canonicalized digest input. BAG elements are sorted with multiplicity kept,
// SET elements are sorted and unique, LIST elements keep the caller's order.
// ATOM keys carry `text` and no elements.
struct DigestKey {
  DigestKind kind = DigestKind::kAtom;
  std::vector<FeatureId> elements;
  std::string text;

  friend bool operator==(const DigestKey&, const DigestKey&) = default;
};

struct DigestKeyHash {
  std::size_t operator()(const DigestKey& key) const noexcept;
};

// Table-backed assignment of dense integer ids to lists, bags and sets of
// existing ids, and to atom strings. Equal canonical keys always map to the
// same id; distinct keys never share one. The four kinds are disjoint
// namespaces, so the list <x> and the bag {x} receive different ids.
//
// Ids 0..3 are reserved: the empty list, the empty bag, the empty set and the
// constant placeholder atom "?". New ids are handed out in first-seen order.
//
// Thread-safe: lookups of existing keys take a shared lock and insertion is
// atomic, so concurrent callers interning the same key observe the same id.
class DigestRegistry {
 public:
  static constexpr FeatureId kEmptyList = 0;
  static constexpr FeatureId kEmptyBag = 1;
  static constexpr FeatureId kEmptySet = 2;
  static constexpr FeatureId kPlaceholder = 3;
  static constexpr FeatureId kReservedCount = 4;

  DigestRegistry();
  DigestRegistry(const DigestRegistry& other);
  DigestRegistry& operator=(const DigestRegistry& other);

  // Throws RegistryError(kUnknownId) if an element was never assigned.
  FeatureId digest_list(std::span<const FeatureId> elems);
  FeatureId digest_bag(std::span<const FeatureId> elems);
  FeatureId digest_set(std::span<const FeatureId> elems);
  FeatureId intern_atom(std::string_view text);

  FeatureId digest_list(std::initializer_list<FeatureId> elems) {
    return digest_list(std::span<const FeatureId>(elems.begin(), elems.size()));
  }
  FeatureId digest_bag(std::initializer_list<FeatureId> elems) {
    return digest_bag(std::span<const FeatureId>(elems.begin(), elems.size()));
  }
  FeatureId digest_set(std::initializer_list<FeatureId> elems) {
    return digest_set(std::span<const FeatureId>(elems.begin(), elems.size()));
  }

  // Lookup without assignment; returns false if the key was never digested.
  bool find(const DigestKey& canonical_key, FeatureId* id) const;

  void mark_pruned(FeatureId id);
  bool is_pruned(FeatureId id) const;
  std::vector<FeatureId> pruned_ids() const;  // ascending

  // Reverse lookup. Throws RegistryError(kUnknownId) for unassigned ids.
  DigestKey key(FeatureId id) const;
  std::size_t size() const;

  // Persistence: the line-oriented `QLOGREG v1` format.
  void save(const std::filesystem::path& path) const;
  void write(std::ostream& out) const;
  static DigestRegistry load(const std::filesystem::path& path);
  static DigestRegistry read(std::istream& in);

 private:
  FeatureId intern(DigestKey&& key);
  void check_elements(std::span<const FeatureId> elems) const;

  mutable std::shared_mutex mu_;
  std::unordered_map<DigestKey, FeatureId, DigestKeyHash> ids_;
  std::vector<DigestKey> keys_;
  std::unordered_set<FeatureId> pruned_;
};

}  // namespace qlog

#endif  // QLOG_REGISTRY_H_
