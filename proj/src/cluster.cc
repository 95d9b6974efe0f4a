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

#include "qlog/cluster.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qlog/errors.h"

namespace qlog {
namespace {

using json = nlohmann::json;

double squared_distance(const FeatureVector& u, const FeatureVector& v, double su, double sv) {
  const auto& a = u.entries();
  const auto& b = v.entries();
  std::size_t i = 0;
  std::size_t j = 0;
  double acc = 0.0;
  while (i < a.size() || j < b.size()) {
    double x = 0.0;
    double y = 0.0;
    if (j == b.size() || (i < a.size() && a[i].id < b[j].id)) {
      x = a[i++].count * su;
    } else if (i == a.size() || b[j].id < a[i].id) {
      y = b[j++].count * sv;
    } else {
      x = a[i++].count * su;
      y = b[j++].count * sv;
    }
    acc += (x - y) * (x - y);
  }
  return acc;
}

double norm(const FeatureVector& v) {
  double s = 0.0;
  for (const auto& e : v.entries()) s += static_cast<double>(e.count) * e.count;
  return std::sqrt(s);
}

struct UnionFind {
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::vector<std::size_t> parent;
};

FlatClustering apply_merges(const Dendrogram& d, std::size_t count) {
  const std::size_t n = d.leaves;
  // Node id -> representative leaf.
  std::vector<std::uint32_t> rep(n + d.merges.size());
  std::iota(rep.begin(), rep.begin() + static_cast<std::ptrdiff_t>(n), 0);
  UnionFind uf(n);
  for (std::size_t m = 0; m < d.merges.size(); ++m) {
    rep[n + m] = rep[d.merges[m].left];
    if (m < count) uf.unite(rep[d.merges[m].left], rep[d.merges[m].right]);
  }
  FlatClustering out;
  out.labels.assign(n, 0);
  std::vector<std::int64_t> label_of_root(n, -1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t r = uf.find(i);
    if (label_of_root[r] < 0) label_of_root[r] = out.k++;
    out.labels[i] = static_cast<std::uint32_t>(label_of_root[r]);
  }
  return out;
}

}  // namespace

// --- Corpus -------------------------------------------------------------------

namespace {

// Pre-order serialization of the skeleton shape of `ast` (constants read as
// the placeholder). Two trees print to the same canonical text exactly when
// their keys match, and the key is far cheaper to build than the text.
std::string skeleton_key(const LabeledAst& ast) {
  std::string key;
  key.reserve(ast.size() * 8);
  std::vector<NodeIndex> stack{ast.root()};
  while (!stack.empty()) {
    const AstNode& n = ast.node(stack.back());
    stack.pop_back();
    key += static_cast<char>(n.atom);
    key += static_cast<char>(n.children.size() & 0xff);
    key += static_cast<char>(n.children.size() >> 8);
    if (n.is_const) {
      key += kPlaceholder;
    } else {
      key += n.text;
    }
    key += '\0';
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return key;
}

}  // namespace

std::size_t CorpusBuilder::add(const LabeledAst& ast) {
  std::string key = skeleton_key(ast);
  auto it = index_.find(key);
  if (it != index_.end()) {
    corpus_.skeletons[it->second].count += 1;
    corpus_.total_queries += 1;
    return it->second;
  }
  return insert(std::move(key), skeletonize(ast));
}

std::size_t CorpusBuilder::add(QuerySkeleton skeleton) {
  std::string key = skeleton_key(skeleton.ast);
  auto it = index_.find(key);
  if (it != index_.end()) {
    corpus_.skeletons[it->second].count += std::max<std::uint64_t>(skeleton.count, 1);
    corpus_.total_queries += std::max<std::uint64_t>(skeleton.count, 1);
    return it->second;
  }
  return insert(std::move(key), std::move(skeleton));
}

void CorpusBuilder::repeat(std::size_t index) {
  corpus_.skeletons.at(index).count += 1;
  corpus_.total_queries += 1;
}

std::size_t CorpusBuilder::insert(std::string key, QuerySkeleton skeleton) {
  skeleton.count = std::max<std::uint64_t>(skeleton.count, 1);
  corpus_.total_queries += skeleton.count;
  std::size_t idx = corpus_.skeletons.size();
  index_.emplace(std::move(key), idx);
  corpus_.skeletons.push_back(std::move(skeleton));
  return idx;
}

SkeletonCorpus CorpusBuilder::finish() && {
  index_.clear();
  return std::move(corpus_);
}

SkeletonCorpus dedupe(std::span<const LabeledAst> parsed) {
  CorpusBuilder b;
  for (const LabeledAst& ast : parsed) b.add(ast);
  return std::move(b).finish();
}

// --- Distances -------------------------------------------------------------------

double distance(const FeatureVector& u, const FeatureVector& v) {
  return std::sqrt(squared_distance(u, v, 1.0, 1.0));
}

double normalized_distance(const FeatureVector& u, const FeatureVector& v) {
  if (u.empty() || v.empty()) return u.empty() && v.empty() ? 0.0 : 1.0;
  double nu = norm(u);
  double nv = norm(v);
  return std::sqrt(squared_distance(u, v, nu > 0 ? 1.0 / nu : 0.0, nv > 0 ? 1.0 / nv : 0.0));
}

DistanceMatrix::DistanceMatrix(std::size_t n) : n_(n), data_(n > 1 ? n * (n - 1) / 2 : 0, 0.0) {}

std::size_t DistanceMatrix::index(std::size_t i, std::size_t j) const {
  if (i > j) std::swap(i, j);
  // Row i of the upper triangle starts after i rows of decreasing length.
  return i * n_ - i * (i + 1) / 2 + (j - i - 1);
}

double DistanceMatrix::operator()(std::size_t i, std::size_t j) const {
  if (i == j) return 0.0;
  return data_[index(i, j)];
}

void DistanceMatrix::set(std::size_t i, std::size_t j, double d) {
  if (i == j) return;
  data_[index(i, j)] = d;
}

DistanceMatrix build_matrix(std::span<const FeatureVector> vectors, const MatrixOptions& options) {
  const std::size_t n = vectors.size();
  DistanceMatrix m(n);
  std::vector<double> scale(n, 1.0);
  if (options.normalize) {
    for (std::size_t i = 0; i < n; ++i) {
      double nv = norm(vectors[i]);
      scale[i] = nv > 0 ? 1.0 / nv : 0.0;
    }
  }
  auto rows = [&](std::size_t first, std::size_t stride) {
    for (std::size_t i = first; i < n; i += stride) {
      for (std::size_t j = i + 1; j < n; ++j) {
        m.set(i, j, std::sqrt(squared_distance(vectors[i], vectors[j], scale[i], scale[j])));
      }
    }
  };
  unsigned threads = std::max(1u, options.threads);
  if (threads == 1 || n < 64) {
    rows(0, 1);
  } else {
    // Rows are interleaved so workers get similar amounts of work; each entry
    // is written by exactly one worker.
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(rows, t, threads);
    for (auto& th : pool) th.join();
  }
  return m;
}

DistanceMatrix build_matrix(const SkeletonCorpus& corpus, const MatrixOptions& options) {
  std::vector<FeatureVector> vs;
  vs.reserve(corpus.size());
  for (const auto& s : corpus.skeletons) vs.push_back(s.vector);
  return build_matrix(vs, options);
}

// --- Hierarchical clustering ----------------------------------------------------

std::string_view linkage_name(Linkage linkage) {
  switch (linkage) {
    case Linkage::kSingle:
      return "single";
    case Linkage::kComplete:
      return "complete";
    case Linkage::kAverage:
      break;
  }
  return "average";
}

std::optional<Linkage> linkage_from_name(std::string_view name) {
  for (Linkage l : {Linkage::kSingle, Linkage::kComplete, Linkage::kAverage}) {
    if (linkage_name(l) == name) return l;
  }
  return std::nullopt;
}

Dendrogram hierarchical_cluster(const DistanceMatrix& matrix, Linkage linkage) {
  const std::size_t n = matrix.size();
  if (n == 0) throw PreconditionError("hierarchical_cluster: empty corpus");
  Dendrogram out;
  out.leaves = n;
  if (n == 1) return out;

  DistanceMatrix d = matrix;
  std::vector<char> active(n, 1);
  std::vector<std::uint32_t> size(n, 1);
  std::vector<std::uint32_t> node(n);
  std::iota(node.begin(), node.end(), 0);
  std::vector<std::size_t> nn(n, 0);
  std::vector<double> nnd(n, 0.0);

  // Nearest active neighbour of slot s: smallest distance, then smallest
  // partner node id.
  auto refresh = [&](std::size_t s) {
    bool found = false;
    for (std::size_t t = 0; t < n; ++t) {
      if (t == s || !active[t]) continue;
      double dt = d(s, t);
      if (!found || dt < nnd[s] || (dt == nnd[s] && node[t] < node[nn[s]])) {
        nn[s] = t;
        nnd[s] = dt;
        found = true;
      }
    }
  };
  for (std::size_t s = 0; s < n; ++s) refresh(s);

  out.merges.reserve(n - 1);
  for (std::size_t step = 0; step + 1 < n; ++step) {
    std::size_t a = n;
    std::uint32_t best_lo = 0;
    std::uint32_t best_hi = 0;
    for (std::size_t s = 0; s < n; ++s) {
      if (!active[s]) continue;
      std::uint32_t lo = std::min(node[s], node[nn[s]]);
      std::uint32_t hi = std::max(node[s], node[nn[s]]);
      if (a == n || nnd[s] < nnd[a] ||
          (nnd[s] == nnd[a] && (lo < best_lo || (lo == best_lo && hi < best_hi)))) {
        a = s;
        best_lo = lo;
        best_hi = hi;
      }
    }
    std::size_t b = nn[a];
    double height = nnd[a];
    std::size_t keep = std::min(a, b);
    std::size_t gone = std::max(a, b);

    Merge m;
    m.left = best_lo;
    m.right = best_hi;
    m.height = height;
    m.size = size[a] + size[b];
    out.merges.push_back(m);

    const double na = size[keep];
    const double nb = size[gone];
    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == keep || k == gone) continue;
      double dk;
      switch (linkage) {
        case Linkage::kSingle:
          dk = std::min(d(keep, k), d(gone, k));
          break;
        case Linkage::kComplete:
          dk = std::max(d(keep, k), d(gone, k));
          break;
        case Linkage::kAverage:
        default:
          dk = (na * d(keep, k) + nb * d(gone, k)) / (na + nb);
          break;
      }
      d.set(keep, k, dk);
    }
    active[gone] = 0;
    size[keep] = m.size;
    node[keep] = static_cast<std::uint32_t>(n + step);

    for (std::size_t k = 0; k < n; ++k) {
      if (!active[k] || k == keep) continue;
      if (nn[k] == keep || nn[k] == gone) {
        refresh(k);
      } else if (d(k, keep) < nnd[k]) {
        nn[k] = keep;
        nnd[k] = d(k, keep);
      }
    }
    refresh(keep);
  }
  return out;
}

std::vector<std::uint32_t> Dendrogram::leaf_order() const {
  std::vector<std::uint32_t> order;
  if (leaves == 0) return order;
  order.reserve(leaves);
  const std::uint32_t root = static_cast<std::uint32_t>(leaves + merges.size() - 1);
  std::vector<std::uint32_t> stack{root};
  while (!stack.empty()) {
    std::uint32_t v = stack.back();
    stack.pop_back();
    if (v < leaves) {
      order.push_back(v);
      continue;
    }
    const Merge& m = merges[v - leaves];
    stack.push_back(m.right);
    stack.push_back(m.left);
  }
  return order;
}

FlatClustering cut_k(const Dendrogram& dendrogram, std::size_t k) {
  if (k < 1 || k > dendrogram.leaves) {
    throw PreconditionError("cut_k: k must be in [1, " + std::to_string(dendrogram.leaves) + "]");
  }
  return apply_merges(dendrogram, dendrogram.leaves - k);
}

FlatClustering cut_height(const Dendrogram& dendrogram, double threshold) {
  if (dendrogram.leaves == 0) throw PreconditionError("cut_height: empty dendrogram");
  std::size_t count = 0;
  while (count < dendrogram.merges.size() && dendrogram.merges[count].height <= threshold) ++count;
  return apply_merges(dendrogram, count);
}

// --- Export ------------------------------------------------------------------------

std::string dendrogram_to_json(const Dendrogram& dendrogram, std::span<const std::string> leaf_ids) {
  if (leaf_ids.size() != dendrogram.leaves) {
    throw PreconditionError("dendrogram_to_json: leaf id count mismatch");
  }
  json j;
  j["format"] = "qlog-dendrogram";
  j["version"] = 1;
  j["leaves"] = dendrogram.leaves;
  j["leaf_ids"] = std::vector<std::string>(leaf_ids.begin(), leaf_ids.end());
  json merges = json::array();
  for (const Merge& m : dendrogram.merges) merges.push_back(json::array({m.left, m.right, m.height}));
  j["merges"] = std::move(merges);
  j["leaf_order"] = dendrogram.leaf_order();
  return j.dump(1) + "\n";
}

Dendrogram dendrogram_from_json(std::string_view text, std::vector<std::string>* leaf_ids) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw RunStoreError(RunStoreError::Code::kCorrupt, std::string("dendrogram JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("merges") || !j.contains("leaves")) {
    throw RunStoreError(RunStoreError::Code::kCorrupt, "dendrogram JSON: missing fields");
  }
  if (j.value("version", 0) != 1) {
    throw RunStoreError(RunStoreError::Code::kVersionMismatch, "dendrogram JSON: unsupported version");
  }
  Dendrogram d;
  try {
    d.leaves = j.at("leaves").get<std::size_t>();
    std::vector<std::uint32_t> sizes(d.leaves, 1);
    for (const auto& m : j.at("merges")) {
      Merge mg;
      mg.left = m.at(0).get<std::uint32_t>();
      mg.right = m.at(1).get<std::uint32_t>();
      mg.height = m.at(2).get<double>();
      if (mg.right >= sizes.size() || mg.left >= mg.right) {
        throw RunStoreError(RunStoreError::Code::kCorrupt, "dendrogram JSON: bad merge");
      }
      mg.size = sizes[mg.left] + sizes[mg.right];
      sizes.push_back(mg.size);
      d.merges.push_back(mg);
    }
    if (d.leaves > 0 && d.merges.size() + 1 != d.leaves) {
      throw RunStoreError(RunStoreError::Code::kCorrupt, "dendrogram JSON: merge count mismatch");
    }
    if (leaf_ids) *leaf_ids = j.value("leaf_ids", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw RunStoreError(RunStoreError::Code::kCorrupt, std::string("dendrogram JSON: ") + e.what());
  }
  return d;
}

std::string dendrogram_to_newick(const Dendrogram& dendrogram,
                                 std::span<const std::string> leaf_names) {
  if (leaf_names.size() != dendrogram.leaves) {
    throw PreconditionError("dendrogram_to_newick: leaf name count mismatch");
  }
  if (dendrogram.leaves == 0) return ";";
  const std::size_t n = dendrogram.leaves;
  auto height_of = [&](std::uint32_t v) { return v < n ? 0.0 : dendrogram.merges[v - n].height; };
  auto quote = [](const std::string& s) {
    bool plain = std::none_of(s.begin(), s.end(), [](char c) {
      return c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == '\'' || c == ' ' ||
             c == '[' || c == ']';
    });
    if (plain && !s.empty()) return s;
    std::string out = "'";
    for (char c : s) {
      out += c;
      if (c == '\'') out += '\'';
    }
    return out + "'";
  };
  std::ostringstream out;
  out.precision(17);
  std::function<void(std::uint32_t)> emit = [&](std::uint32_t v) {
    if (v < n) {
      out << quote(leaf_names[v]);
      return;
    }
    const Merge& m = dendrogram.merges[v - n];
    out << '(';
    emit(m.left);
    out << ':' << (m.height - height_of(m.left)) << ',';
    emit(m.right);
    out << ':' << (m.height - height_of(m.right)) << ')';
  };
  emit(static_cast<std::uint32_t>(n + dendrogram.merges.size() - 1));
  out << ';';
  return out.str();
}

}  // namespace qlog
