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

#include "qlog/registry.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <mutex>
#include <sstream>

#include "qlog/ast.h"
#include "qlog/errors.h"

namespace qlog {
namespace {

constexpr std::string_view kHeader = "QLOGREG v1";
constexpr std::string_view kPrunedTag = "PRUNED";

std::string escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      case '\r':
        out += "\\r";
        break;
      default:
        out += c;
    }
  }
  return out;
}

[[noreturn]] void corrupt(const std::string& why) {
  throw RegistryError(RegistryError::Code::kCorrupt, "corrupt registry file: " + why);
}

std::string unescape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\') {
      out += s[i];
      continue;
    }
    if (++i == s.size()) corrupt("dangling escape");
    switch (s[i]) {
      case '\\':
        out += '\\';
        break;
      case 't':
        out += '\t';
        break;
      case 'n':
        out += '\n';
        break;
      case 'r':
        out += '\r';
        break;
      default:
        corrupt("bad escape");
    }
  }
  return out;
}

FeatureId parse_id(std::string_view s) {
  FeatureId v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) corrupt("bad id '" + std::string(s) + "'");
  return v;
}

std::vector<FeatureId> parse_ids(std::string_view s) {
  std::vector<FeatureId> out;
  if (s.empty()) return out;
  std::size_t start = 0;
  for (;;) {
    std::size_t comma = s.find(',', start);
    out.push_back(parse_id(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string join_ids(const std::vector<FeatureId>& ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(ids[i]);
  }
  return out;
}

std::vector<DigestKey> reserved_keys() {
  return {
      DigestKey{DigestKind::kList, {}, {}},
      DigestKey{DigestKind::kBag, {}, {}},
      DigestKey{DigestKind::kSet, {}, {}},
      DigestKey{DigestKind::kAtom, {}, std::string(kPlaceholder)},
  };
}

}  // namespace

std::string_view digest_kind_name(DigestKind kind) {
  switch (kind) {
    case DigestKind::kList:
      return "LIST";
    case DigestKind::kBag:
      return "BAG";
    case DigestKind::kSet:
      return "SET";
    case DigestKind::kAtom:
      break;
  }
  return "ATOM";
}

std::size_t DigestKeyHash::operator()(const DigestKey& key) const noexcept {
  // FNV-1a over kind, elements and text.
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    h ^= v;
    h *= 1099511628211ULL;
  };
  mix(static_cast<std::uint64_t>(key.kind));
  for (FeatureId e : key.elements) mix(e);
  for (char c : key.text) mix(static_cast<unsigned char>(c));
  mix(key.elements.size());
  return static_cast<std::size_t>(h);
}

DigestRegistry::DigestRegistry() {
  for (DigestKey& k : reserved_keys()) intern(std::move(k));
}

DigestRegistry::DigestRegistry(const DigestRegistry& other) {
  std::shared_lock lock(other.mu_);
  ids_ = other.ids_;
  keys_ = other.keys_;
  pruned_ = other.pruned_;
}

DigestRegistry& DigestRegistry::operator=(const DigestRegistry& other) {
  if (this == &other) return *this;
  DigestRegistry copy(other);
  std::unique_lock lock(mu_);
  ids_ = std::move(copy.ids_);
  keys_ = std::move(copy.keys_);
  pruned_ = std::move(copy.pruned_);
  return *this;
}

void DigestRegistry::check_elements(std::span<const FeatureId> elems) const {
  std::shared_lock lock(mu_);
  for (FeatureId e : elems) {
    if (e >= keys_.size()) {
      throw RegistryError(RegistryError::Code::kUnknownId,
                          "digest element " + std::to_string(e) + " was never assigned");
    }
  }
}

FeatureId DigestRegistry::intern(DigestKey&& key) {
  {
    std::shared_lock lock(mu_);
    auto it = ids_.find(key);
    if (it != ids_.end()) return it->second;
  }
  std::unique_lock lock(mu_);
  auto [it, inserted] = ids_.try_emplace(key, static_cast<FeatureId>(keys_.size()));
  if (inserted) keys_.push_back(std::move(key));
  return it->second;
}

FeatureId DigestRegistry::digest_list(std::span<const FeatureId> elems) {
  check_elements(elems);
  return intern(DigestKey{DigestKind::kList, {elems.begin(), elems.end()}, {}});
}

FeatureId DigestRegistry::digest_bag(std::span<const FeatureId> elems) {
  check_elements(elems);
  DigestKey key{DigestKind::kBag, {elems.begin(), elems.end()}, {}};
  std::sort(key.elements.begin(), key.elements.end());
  return intern(std::move(key));
}

FeatureId DigestRegistry::digest_set(std::span<const FeatureId> elems) {
  check_elements(elems);
  DigestKey key{DigestKind::kSet, {elems.begin(), elems.end()}, {}};
  std::sort(key.elements.begin(), key.elements.end());
  key.elements.erase(std::unique(key.elements.begin(), key.elements.end()),
                     key.elements.end());
  return intern(std::move(key));
}

FeatureId DigestRegistry::intern_atom(std::string_view text) {
  return intern(DigestKey{DigestKind::kAtom, {}, std::string(text)});
}

bool DigestRegistry::find(const DigestKey& canonical_key, FeatureId* id) const {
  std::shared_lock lock(mu_);
  auto it = ids_.find(canonical_key);
  if (it == ids_.end()) return false;
  if (id) *id = it->second;
  return true;
}

void DigestRegistry::mark_pruned(FeatureId id) {
  std::unique_lock lock(mu_);
  if (id >= keys_.size()) {
    throw RegistryError(RegistryError::Code::kUnknownId,
                        "cannot prune unassigned id " + std::to_string(id));
  }
  pruned_.insert(id);
}

bool DigestRegistry::is_pruned(FeatureId id) const {
  std::shared_lock lock(mu_);
  return pruned_.count(id) != 0;
}

std::vector<FeatureId> DigestRegistry::pruned_ids() const {
  std::shared_lock lock(mu_);
  std::vector<FeatureId> out(pruned_.begin(), pruned_.end());
  std::sort(out.begin(), out.end());
  return out;
}

DigestKey DigestRegistry::key(FeatureId id) const {
  std::shared_lock lock(mu_);
  if (id >= keys_.size()) {
    throw RegistryError(RegistryError::Code::kUnknownId,
                        "unknown feature id " + std::to_string(id));
  }
  return keys_[id];
}

std::size_t DigestRegistry::size() const {
  std::shared_lock lock(mu_);
  return keys_.size();
}

void DigestRegistry::write(std::ostream& out) const {
  std::shared_lock lock(mu_);
  out << kHeader << '\n';
  for (std::size_t id = 0; id < keys_.size(); ++id) {
    const DigestKey& k = keys_[id];
    out << id << '\t' << digest_kind_name(k.kind) << '\t';
    if (k.kind == DigestKind::kAtom) {
      out << escape(k.text);
    } else {
      out << join_ids(k.elements);
    }
    out << '\n';
  }
  std::vector<FeatureId> pruned(pruned_.begin(), pruned_.end());
  std::sort(pruned.begin(), pruned.end());
  out << kPrunedTag << '\t' << join_ids(pruned) << '\n';
}

void DigestRegistry::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw RegistryError(RegistryError::Code::kIo, "cannot write " + path.string());
  }
  write(out);
  if (!out.flush()) {
    throw RegistryError(RegistryError::Code::kIo, "write failed for " + path.string());
  }
}

DigestRegistry DigestRegistry::read(std::istream& in) {
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (content.empty()) corrupt("empty file");
  if (content.back() != '\n') corrupt("truncated (no trailing newline)");

  std::vector<std::string_view> lines;
  std::string_view rest(content);
  while (!rest.empty()) {
    std::size_t nl = rest.find('\n');
    lines.push_back(rest.substr(0, nl));
    rest.remove_prefix(nl + 1);
  }
  if (lines.front() != kHeader) {
    if (lines.front().substr(0, 8) == "QLOGREG ") {
      throw RegistryError(RegistryError::Code::kVersionMismatch,
                          "unsupported registry version '" + std::string(lines.front()) + "'");
    }
    corrupt("missing QLOGREG header");
  }

  DigestRegistry reg;
  reg.ids_.clear();
  reg.keys_.clear();
  bool saw_pruned = false;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    std::string_view line = lines[li];
    if (saw_pruned) corrupt("records after PRUNED section");
    std::size_t t1 = line.find('\t');
    if (t1 == std::string_view::npos) corrupt("malformed line " + std::to_string(li + 1));
    std::string_view first = line.substr(0, t1);
    if (first == kPrunedTag) {
      saw_pruned = true;
      for (FeatureId id : parse_ids(line.substr(t1 + 1))) {
        if (id >= reg.keys_.size()) corrupt("pruned id out of range");
        reg.pruned_.insert(id);
      }
      continue;
    }
    std::size_t t2 = line.find('\t', t1 + 1);
    if (t2 == std::string_view::npos) corrupt("malformed line " + std::to_string(li + 1));
    FeatureId id = parse_id(first);
    if (id != reg.keys_.size()) corrupt("ids out of order at line " + std::to_string(li + 1));
    std::string_view kind = line.substr(t1 + 1, t2 - t1 - 1);
    std::string_view payload = line.substr(t2 + 1);
    DigestKey key;
    if (kind == "ATOM") {
      key.kind = DigestKind::kAtom;
      key.text = unescape(payload);
    } else {
      if (kind == "LIST") {
        key.kind = DigestKind::kList;
      } else if (kind == "BAG") {
        key.kind = DigestKind::kBag;
      } else if (kind == "SET") {
        key.kind = DigestKind::kSet;
      } else {
        corrupt("unknown kind '" + std::string(kind) + "'");
      }
      key.elements = parse_ids(payload);
      for (FeatureId e : key.elements) {
        if (e >= id) corrupt("element references a later id");
      }
      bool sorted = std::is_sorted(key.elements.begin(), key.elements.end());
      if (key.kind == DigestKind::kBag && !sorted) corrupt("bag not canonical");
      if (key.kind == DigestKind::kSet &&
          (!sorted || std::adjacent_find(key.elements.begin(), key.elements.end()) !=
                          key.elements.end())) {
        corrupt("set not canonical");
      }
    }
    if (!reg.ids_.try_emplace(key, id).second) corrupt("duplicate key for id " + std::to_string(id));
    reg.keys_.push_back(std::move(key));
  }
  if (!saw_pruned) corrupt("truncated (missing PRUNED section)");
  std::vector<DigestKey> reserved = reserved_keys();
  if (reg.keys_.size() < reserved.size() ||
      !std::equal(reserved.begin(), reserved.end(), reg.keys_.begin())) {
    corrupt("reserved ids do not match");
  }
  return reg;
}

DigestRegistry DigestRegistry::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw RegistryError(RegistryError::Code::kIo, "cannot open " + path.string());
  }
  return read(in);
}

}  // namespace qlog
